"""Sparse multivariate polynomials with exact rational coefficients.

The variable set is fixed: the phase-space symbols ``x`` and ``y``, the
scale-separation parameter ``eps``, the time step ``h``, the unfolding
parameter ``lam`` and a dedicated reciprocal slot ``epsinv`` standing for
1/eps.  Keeping 1/eps as an explicit exponent lets slow-form right-hand
sides (which divide by eps) stay fully symbolic; a product eps * epsinv
is cancelled on construction so every polynomial has a unique canonical
form and ``==`` is structural equality.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping

from .errors import SingularEvaluationError

VARIABLES = ("x", "y", "eps", "h", "lam", "epsinv")
_NVARS = len(VARIABLES)
_IDX = {name: i for i, name in enumerate(VARIABLES)}
_EPS = _IDX["eps"]
_EPSINV = _IDX["epsinv"]

Exponents = tuple[int, int, int, int, int, int]


def _reduced(exps: Iterable[int]) -> Exponents:
    e = list(exps)
    if len(e) != _NVARS:
        raise ValueError(f"expected {_NVARS} exponents, got {len(e)}")
    if any(d < 0 for d in e):
        raise ValueError(f"negative exponent in {e}")
    cancel = min(e[_EPS], e[_EPSINV])
    if cancel:
        e[_EPS] -= cancel
        e[_EPSINV] -= cancel
    return tuple(e)


class RationalPoly:
    """Immutable sparse polynomial; terms map exponent tuples to Fractions."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Iterable[int], Fraction | int] | None = None):
        canon: dict[Exponents, Fraction] = {}
        if terms:
            for exps, coef in terms.items():
                coef = Fraction(coef)
                if coef == 0:
                    continue
                key = _reduced(exps)
                acc = canon.get(key, None)
                coef = coef if acc is None else acc + coef
                if coef == 0:
                    canon.pop(key, None)
                else:
                    canon[key] = coef
        object.__setattr__(self, "terms", canon)

    def __setattr__(self, *_):
        raise AttributeError("RationalPoly is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls) -> "RationalPoly":
        return cls()

    @classmethod
    def constant(cls, value) -> "RationalPoly":
        return cls({(0,) * _NVARS: Fraction(value)})

    @classmethod
    def var(cls, name: str, power: int = 1) -> "RationalPoly":
        exps = [0] * _NVARS
        exps[_IDX[name]] = power
        return cls({tuple(exps): Fraction(1)})

    @classmethod
    def monomial(cls, coef, **degrees: int) -> "RationalPoly":
        exps = [0] * _NVARS
        for name, d in degrees.items():
            exps[_IDX[name]] = d
        return cls({tuple(exps): Fraction(coef)})

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        other = _as_poly(other)
        merged = dict(self.terms)
        for exps, coef in other.terms.items():
            merged[exps] = merged.get(exps, Fraction(0)) + coef
        return RationalPoly(merged)

    __radd__ = __add__

    def __neg__(self):
        return RationalPoly({e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return RationalPoly()
            q = Fraction(other)
            return RationalPoly({e: c * q for e, c in self.terms.items()})
        other = _as_poly(other)
        out: dict[Exponents, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                key = _reduced(a + b for a, b in zip(e1, e2))
                out[key] = out.get(key, Fraction(0)) + c1 * c2
        return RationalPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers are not supported")
        result = RationalPoly.constant(1)
        for _ in range(n):
            result = result * self
        return result

    def __eq__(self, other):
        if not isinstance(other, RationalPoly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    # -- calculus and substitution ----------------------------------------

    def diff(self, name: str) -> "RationalPoly":
        """Exact partial derivative with respect to ``x`` or ``y``."""
        if name not in ("x", "y"):
            raise ValueError("differentiation is supported in x and y only")
        i = _IDX[name]
        out: dict[Exponents, Fraction] = {}
        for exps, coef in self.terms.items():
            d = exps[i]
            if d == 0:
                continue
            e = list(exps)
            e[i] = d - 1
            out[tuple(e)] = coef * d
        return RationalPoly(out)

    def substitute(self, name: str, value) -> "RationalPoly":
        """Replace a parameter symbol by an exact rational value."""
        i = _IDX[name]
        q = Fraction(value)
        out: dict[Exponents, Fraction] = {}
        for exps, coef in self.terms.items():
            d = exps[i]
            e = list(exps)
            e[i] = 0
            key = _reduced(e)
            out[key] = out.get(key, Fraction(0)) + coef * q**d
        return RationalPoly(out)

    def substitute_poly(self, name: str, replacement: "RationalPoly") -> "RationalPoly":
        """Replace a symbol by a polynomial (used e.g. for y := x)."""
        i = _IDX[name]
        result = RationalPoly()
        for exps, coef in self.terms.items():
            e = list(exps)
            d = e[i]
            e[i] = 0
            base = RationalPoly({tuple(e): coef})
            result = result + base * replacement**d
        return result

    def scale_epsinv(self, k: int = 1) -> "RationalPoly":
        """Multiply by (1/eps)^k, cancelling against eps exponents."""
        out: dict[Exponents, Fraction] = {}
        for exps, coef in self.terms.items():
            e = list(exps)
            e[_EPSINV] += k
            out[_reduced(e)] = coef
        return RationalPoly(out)

    def scale_eps(self, k: int = 1) -> "RationalPoly":
        """Multiply by eps^k, cancelling against epsinv exponents."""
        out: dict[Exponents, Fraction] = {}
        for exps, coef in self.terms.items():
            e = list(exps)
            e[_EPS] += k
            out[_reduced(e)] = coef
        return RationalPoly(out)

    def substitute_h_with_h_over_eps(self) -> "RationalPoly":
        """Replace the step symbol h by h/eps (fast-to-slow step change)."""
        out: dict[Exponents, Fraction] = {}
        for exps, coef in self.terms.items():
            e = list(exps)
            e[_EPSINV] += e[_IDX["h"]]
            key = _reduced(e)
            out[key] = out.get(key, Fraction(0)) + coef
        return RationalPoly(out)

    # -- evaluation --------------------------------------------------------

    def evaluate(self, x, y, eps, h=0, lam=0):
        """Numeric value at a point; arithmetic stays in the input type.

        Fraction inputs give exact results.  eps = 0 with a live epsinv
        term raises SingularEvaluationError.
        """
        total = None
        for exps, coef in self.terms.items():
            a, b, c, d, e, f = exps
            if f and eps == 0:
                raise SingularEvaluationError(
                    "evaluation at eps=0 of a field with 1/eps terms"
                )
            v = _coerce(coef, x)
            if a:
                v = v * x**a
            if b:
                v = v * y**b
            if c:
                v = v * eps**c
            if d:
                v = v * h**d
            if e:
                v = v * lam**e
            if f:
                v = v / eps**f
            total = v if total is None else total + v
        if total is None:
            return _zero_like(x)
        return total

    # -- presentation ------------------------------------------------------

    def sorted_terms(self) -> list[tuple[Exponents, Fraction]]:
        return sorted(self.terms.items())

    def to_lines(self) -> list[str]:
        """Plain-text term list, one ``coeff * factors`` entry per line."""
        if not self.terms:
            return ["0"]
        lines = []
        for exps, coef in self.sorted_terms():
            factors = [
                f"{name}^{d}" for name, d in zip(VARIABLES, exps) if d != 0
            ]
            if factors:
                lines.append(f"{coef} * " + " ".join(factors))
            else:
                lines.append(str(coef))
        return lines

    def __repr__(self):
        return "RationalPoly(" + " + ".join(self.to_lines()) + ")"


def _as_poly(value) -> RationalPoly:
    if isinstance(value, RationalPoly):
        return value
    if isinstance(value, (int, Fraction)):
        return RationalPoly.constant(value)
    raise TypeError(f"cannot coerce {type(value).__name__} to RationalPoly")


def _coerce(coef: Fraction, like):
    """Convert an exact coefficient into the arithmetic type of ``like``."""
    if isinstance(like, (Fraction, int)):
        return coef
    if isinstance(like, float):
        return float(coef)
    # mpmath mpf (or anything with true division against ints)
    return (type(like)(coef.numerator)) / coef.denominator


def _zero_like(like):
    if isinstance(like, (Fraction, int)):
        return Fraction(0)
    if isinstance(like, float):
        return 0.0
    return type(like)(0)
