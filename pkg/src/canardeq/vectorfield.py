"""Planar polynomial vector fields and the canonical fast-slow systems."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import mpmath as mp

from .errors import InvalidInputError
from .poly import RationalPoly


class TimeScale(enum.Enum):
    SLOW = "slow"
    FAST = "fast"


class SystemName(enum.Enum):
    FOLD_SLOW = "fold"
    FOLD_LAMBDA = "fold-lambda"
    FOLD_LAMBDA_FAST = "fold-lambda-fast"
    TRANSCRITICAL = "transcritical"


@dataclass(frozen=True)
class PolyVectorField:
    """Pair of exact polynomial components plus the time scale they live on."""

    fx: RationalPoly
    fy: RationalPoly
    time_scale: TimeScale

    def jacobian(self) -> tuple[tuple[RationalPoly, RationalPoly],
                                tuple[RationalPoly, RationalPoly]]:
        """2x2 matrix of exact partial derivatives in (x, y)."""
        return (
            (self.fx.diff("x"), self.fx.diff("y")),
            (self.fy.diff("x"), self.fy.diff("y")),
        )

    @property
    def uses_epsinv(self) -> bool:
        idx = 5  # epsinv slot
        return any(
            e[idx] > 0 for p in (self.fx, self.fy) for e in p.terms
        )

    def evaluate(self, x, y, eps, h=0, lam=0):
        return (
            self.fx.evaluate(x, y, eps, h, lam),
            self.fy.evaluate(x, y, eps, h, lam),
        )

    def to_lines(self) -> list[str]:
        return (
            ["fx:"]
            + ["  " + s for s in self.fx.to_lines()]
            + ["fy:"]
            + ["  " + s for s in self.fy.to_lines()]
        )


@dataclass(frozen=True)
class SystemParams:
    """Numeric parameter set: scale separation, time step, unfolding."""

    eps: Fraction | float
    h: Fraction | float
    lambda_p: Fraction | float = 0

    def __post_init__(self):
        if not (0 < self.eps <= 1):
            raise InvalidInputError(f"eps must satisfy 0 < eps <= 1, got {self.eps}")
        if not self.h >= 0:
            raise InvalidInputError(f"h must be nonnegative, got {self.h}")

    def require_step_below_eps(self):
        """Slow-form fold runs must resolve the fast scale: 0 < h < eps."""
        if not (0 < self.h < self.eps):
            raise InvalidInputError(
                f"slow-form fold requires 0 < h < eps, got h={self.h}, eps={self.eps}"
            )


_X = RationalPoly.var("x")
_Y = RationalPoly.var("y")
_EPS = RationalPoly.var("eps")
_LAM = RationalPoly.var("lam")


def canonical(name: SystemName | str) -> PolyVectorField:
    """Exact symbolic field for one of the four canonical systems.

    Slow-form fold components carry the 1/eps division symbolically via
    the epsinv exponent slot.
    """
    if isinstance(name, str):
        try:
            name = SystemName(name)
        except ValueError:
            raise InvalidInputError(f"unknown canonical system {name!r}")
    if name is SystemName.FOLD_SLOW:
        return PolyVectorField(
            fx=(-_Y + _X**2).scale_epsinv(),
            fy=_X,
            time_scale=TimeScale.SLOW,
        )
    if name is SystemName.FOLD_LAMBDA:
        return PolyVectorField(
            fx=(-_Y + _X**2).scale_epsinv(),
            fy=_X - _LAM,
            time_scale=TimeScale.SLOW,
        )
    if name is SystemName.FOLD_LAMBDA_FAST:
        return PolyVectorField(
            fx=-_Y + _X**2,
            fy=_EPS * (_X - _LAM),
            time_scale=TimeScale.FAST,
        )
    if name is SystemName.TRANSCRITICAL:
        return PolyVectorField(
            fx=_X**2 - _Y**2 + _EPS,
            fy=_EPS,
            time_scale=TimeScale.FAST,
        )
    raise InvalidInputError(f"unknown canonical system {name!r}")


def jacobian(f: PolyVectorField):
    return f.jacobian()


# -- numeric binding ---------------------------------------------------------


def _to_mpf(value):
    if isinstance(value, Fraction):
        return mp.mpf(value.numerator) / mp.mpf(value.denominator)
    return mp.mpf(value)


def _fold_params_mpf(poly: RationalPoly, eps, h, lam):
    """Fold parameter symbols into mpf coefficients; keep (deg_x, deg_y)."""
    compiled: dict[tuple[int, int], mp.mpf] = {}
    for (a, b, c, d, e, f), coef in poly.terms.items():
        v = _to_mpf(coef)
        if c:
            v *= eps**c
        if d:
            v *= h**d
        if e:
            v *= lam**e
        if f:
            v /= eps**f
        key = (a, b)
        compiled[key] = compiled.get(key, mp.mpf(0)) + v
    return sorted(compiled.items())


def bind_mp(field: PolyVectorField, params: SystemParams, digits: int,
            h_value=None) -> Callable:
    """Compile the field into an (x, y) -> (fx, fy) callable at ``digits``.

    ``h_value`` overrides params.h when the field carries the step symbol
    with a different meaning (e.g. the fast-time step h~).
    """
    with mp.workdps(digits):
        eps = _to_mpf(params.eps)
        h = _to_mpf(params.h if h_value is None else h_value)
        lam = _to_mpf(params.lambda_p)
        cx = _fold_params_mpf(field.fx, eps, h, lam)
        cy = _fold_params_mpf(field.fy, eps, h, lam)

    def f(x, y):
        fx = mp.mpf(0)
        fy = mp.mpf(0)
        for (a, b), c in cx:
            fx += c * x**a * y**b
        for (a, b), c in cy:
            fy += c * x**a * y**b
        return fx, fy

    return f


def bind_float(field: PolyVectorField, params: SystemParams,
               h_value=None) -> Callable:
    """Compile the field into a float (x, y) -> (fx, fy) callable."""
    eps = float(params.eps)
    h = float(params.h if h_value is None else h_value)
    lam = float(params.lambda_p)

    def fold(poly):
        compiled: dict[tuple[int, int], float] = {}
        for (a, b, c, d, e, f), coef in poly.terms.items():
            v = float(coef) * eps**c * h**d * lam**e
            if f:
                v /= eps**f
            key = (a, b)
            compiled[key] = compiled.get(key, 0.0) + v
        return sorted(compiled.items())

    cx = fold(field.fx)
    cy = fold(field.fy)

    def f(x, y):
        fx = 0.0
        fy = 0.0
        for (a, b), c in cx:
            fx += c * x**a * y**b
        for (a, b), c in cy:
            fy += c * x**a * y**b
        return fx, fy

    return f
