"""Quantitative canard analysis for the modified fold and transcritical systems.

Spectra along the slow manifold, the complex-eigenvalue window, way-in/
way-out maps with exit times, the transcritical case classification and
the Hopf / maximal-canard parameter prediction.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    BracketingError,
    DivergedError,
    InvalidInputError,
    QuadratureError,
)
from .vectorfield import SystemName, SystemParams, bind_float, canonical


# -- spectra along the fold slow manifold ------------------------------------


@dataclass(frozen=True)
class SpectrumSample:
    """Eigenvalue pair of the modified fold field linearized on S_eps."""

    x: float
    mu1: complex
    mu2: complex
    trace: float
    det: float
    discriminant: float


def fold_spectrum(x: float, eps: float, h: float) -> SpectrumSample:
    """Closed-form eigenvalues at (x, x^2 - eps/2) on the slow manifold.

    mu1 is the eigenvalue of maximal modulus; for a complex pair the one
    with non-negative imaginary part is taken (the real parts coincide).
    """
    if eps <= 0:
        raise InvalidInputError("eps must be positive")
    x = float(x)
    eps = float(eps)
    h = float(h)
    half_tr = -h * x**2 + h * eps / 4 + eps * x  # eps^2 * trace / 2
    disc = half_tr**2 - eps**2 * (eps - h * x)
    if disc >= 0:
        root = math.sqrt(disc)
        a = (half_tr + root) / eps**2
        b = (half_tr - root) / eps**2
        mu1, mu2 = (a, b) if abs(a) >= abs(b) else (b, a)
        mu1, mu2 = complex(mu1), complex(mu2)
    else:
        root = cmath.sqrt(disc)
        mu1 = (half_tr + abs(root) * 1j) / eps**2
        mu2 = mu1.conjugate()
    trace = 2 * half_tr / eps**2
    det = (eps - h * x) / eps**2
    return SpectrumSample(
        x=x, mu1=mu1, mu2=mu2, trace=trace, det=det,
        discriminant=trace**2 - 4 * det,
    )


# -- complex-eigenvalue window -----------------------------------------------


@dataclass(frozen=True)
class ComplexWindow:
    """x-interval on S_eps where the eigenvalues form a complex pair."""

    x1: float
    x2: float


def _window_discriminant(x: float, eps: float, h: float) -> float:
    return (h * x**2 - h * eps / 4 - eps * x) ** 2 - eps**2 * (eps - h * x)


def _bisect(f, a, b, xtol):
    fa, fb = f(a), f(b)
    if fa == 0:
        return a
    if fb == 0:
        return b
    if fa * fb > 0:
        raise BracketingError(f"no sign change on [{a}, {b}]")
    while b - a > xtol:
        m = 0.5 * (a + b)
        fm = f(m)
        if fm == 0:
            return m
        if fa * fm < 0:
            b, fb = m, fm
        else:
            a, fa = m, fm
    return 0.5 * (a + b)


def complex_window(eps: float, h: float) -> ComplexWindow:
    """Boundaries of the complex-pair window, bracketing x = 0.

    Initial guesses come from the first-order expansion +-sqrt(eps) + h/4;
    the quartic discriminant condition is then refined by bisection.
    """
    eps = float(eps)
    h = float(h)
    if eps <= 0 or h < 0:
        raise InvalidInputError("need eps > 0 and h >= 0")
    if h >= eps:
        raise InvalidInputError("window analysis requires h < eps")

    def d(x):
        return _window_discriminant(x, eps, h)

    if d(0.0) >= 0:
        raise BracketingError(
            "discriminant non-negative at x=0; parameters outside regime"
        )
    roots = []
    for sign in (-1.0, 1.0):
        guess = sign * math.sqrt(eps) + h / 4
        a = guess
        step = sign * 0.25 * math.sqrt(eps)
        tries = 0
        while d(a) < 0:
            a += step
            tries += 1
            if tries > 200:
                raise BracketingError("could not bracket window boundary")
        lo, hi = (a, 0.0) if sign < 0 else (0.0, a)
        roots.append(_bisect(d, lo, hi, 1e-14))
    return ComplexWindow(x1=roots[0], x2=roots[1])


def trace_zero(eps: float, h: float) -> float:
    """x on S_eps where the real part of the spectrum vanishes.

    Located by bisection of Re mu1 inside the complex window.
    """
    eps = float(eps)
    h = float(h)
    if not (0 < h < eps):
        raise InvalidInputError("need 0 < h < eps")
    w = complex_window(eps, h)

    def re1(x):
        return fold_spectrum(x, eps, h).mu1.real

    return _bisect(re1, w.x1, 0.0, 1e-14)


def trace_zero_closed_form(eps: float, h: float) -> float:
    """Root of the trace quadratic: (eps - sqrt(eps^2 + h^2 eps)) / (2h)."""
    eps = float(eps)
    h = float(h)
    return (eps - math.sqrt(eps**2 + h**2 * eps)) / (2 * h)


def trace_zero_report(eps: float, h: float) -> dict:
    """Numeric trace zero plus its gaps to the -h/2 and -h/4 expansions.

    The two first-order predictions disagree at leading order; both gaps
    are reported, neither is reconciled.
    """
    x_star = trace_zero(eps, h)
    return {
        "x_star": x_star,
        "closed_form": trace_zero_closed_form(eps, h),
        "gap_minus_h_over_2": x_star - (-h / 2),
        "gap_minus_h_over_4": x_star - (-h / 4),
    }


# -- way-in/way-out map for the fold -----------------------------------------


@dataclass(frozen=True)
class WayInOutResult:
    x0: float
    t0: float
    psi_curve: list  # (t, Psi(t)) samples
    roots: list
    exit_time: float | None


def _adaptive_simpson(f, a, b, tol, depth=40):
    def simpson(a, fa, m, fm, b, fb):
        return (b - a) / 6 * (fa + 4 * fm + fb)

    def recurse(a, fa, m, fm, b, fb, whole, tol, depth):
        tol = max(tol, 4e-16 * (1.0 + abs(whole)))  # float roundoff floor
        lm = 0.5 * (a + m)
        rm = 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = simpson(a, fa, lm, flm, m, fm)
        right = simpson(m, fm, rm, frm, b, fb)
        gap = abs(left + right - whole)
        if gap <= 15 * tol:
            return left + right + (left + right - whole) / 15
        if depth <= 0:
            if gap <= 1e-10:
                return left + right
            raise QuadratureError("adaptive Simpson depth exhausted",
                                  estimate=left + right)
        return (recurse(a, fa, lm, flm, m, fm, left, tol / 2, depth - 1)
                + recurse(m, fm, rm, frm, b, fb, right, tol / 2, depth - 1))

    if a == b:
        return 0.0
    m = 0.5 * (a + b)
    fa, fm, fb = f(a), f(m), f(b)
    whole = simpson(a, fa, m, fm, b, fb)
    return recurse(a, fa, m, fm, b, fb, whole, tol, depth)


def psi_fold(x0: float, eps: float, h: float, t_max: float,
             n_panels: int = 10_000, tol: float = 1e-10) -> WayInOutResult:
    """Accumulated real-part exponent along the canard path x = x0 + t/2.

    Integrates Re mu1 by adaptive Simpson with mandatory panel splits at
    the window boundaries, where the max-modulus eigenvalue has a kink.
    Roots of Psi are bracketed on the sample grid and refined by
    bisection; the exit time is the first root followed by Psi > 0.
    """
    eps = float(eps)
    h = float(h)
    x0 = float(x0)
    t_max = float(t_max)
    if t_max <= 0:
        raise InvalidInputError("t_max must be positive")
    window = complex_window(eps, h)
    if x0 >= window.x1:
        raise InvalidInputError(
            f"x0={x0} must start on the attracting branch left of x1={window.x1}"
        )

    def integrand(s):
        return fold_spectrum(x0 + s / 2, eps, h).mu1.real

    # grid with breakpoints where the path crosses the window boundaries
    kinks = [2 * (window.x1 - x0), 2 * (window.x2 - x0)]
    grid = sorted({0.0, t_max,
                   *(k for k in kinks if 0.0 < k < t_max),
                   *(t_max * i / n_panels for i in range(1, n_panels))})
    panel_tol = tol / max(len(grid) - 1, 1)
    psi_curve = [(0.0, 0.0)]
    acc = 0.0
    for a, b in zip(grid, grid[1:]):
        acc += _adaptive_simpson(integrand, a, b, panel_tol)
        psi_curve.append((b, acc))

    def psi_at(t, anchor_idx):
        ta, pa = psi_curve[anchor_idx]
        return pa + _adaptive_simpson(integrand, ta, t, tol)

    roots = []
    exit_time = None
    for i in range(1, len(psi_curve) - 1):
        (ta, pa), (tb, pb) = psi_curve[i], psi_curve[i + 1]
        if pa == 0.0 or pa * pb < 0:
            root = _bisect(lambda t: psi_at(t, i), ta, tb, 1e-12) \
                if pa * pb < 0 else ta
            roots.append(root)
            if exit_time is None and pb > 0:
                exit_time = root
    return WayInOutResult(x0=x0, t0=0.0, psi_curve=psi_curve,
                          roots=roots, exit_time=exit_time)


# -- transcritical analysis --------------------------------------------------


def transcritical_eigenvalue(x, h):
    """Non-zero eigenvalue along y = x for the modified field: 2x(1 - hx)."""
    return 2 * x * (1 - h * x)


def psi_transcritical(x0, eps, h, t):
    """Closed-form way-in/way-out map along x = x0 + eps*t.

    Exact when called with Fraction arguments.
    """
    return (2 * x0 * (1 - h * x0) * t
            + eps * t**2
            - 2 * eps * h * x0 * t**2
            - Fraction(2, 3) * (eps**2 * h * t**3))


def transcritical_parabola(x0, eps, h):
    """Coefficients (c0, c1, c2) of f with Psi(t) = t * f(t)."""
    return (2 * x0 * (1 - h * x0),
            eps - 2 * eps * h * x0,
            -Fraction(2, 3) * (eps**2 * h))


class TranscriticalCase(enum.Enum):
    TWO_ROOTS = "two-roots"
    TANGENCY = "tangency"
    NO_ESCAPE = "no-escape"


@dataclass(frozen=True)
class TranscriticalClassification:
    case: TranscriticalCase
    x0: object
    eps: object
    h: object
    t1: float | None = None
    t2: float | None = None
    t_star: object = None


def _is_exact(*values) -> bool:
    return all(isinstance(v, (int, Fraction)) for v in values)


def classify_transcritical(x0, eps, h) -> TranscriticalClassification:
    """Three-way case split of the transcritical way-in/way-out map.

    Exact inputs (int/Fraction) classify the x0 = -1/(2h) boundary and
    the tangency time 3/(2*h*eps) in rational arithmetic; float inputs
    use a 1e-12 relative tolerance at the boundary.
    """
    if eps <= 0 or h <= 0:
        raise InvalidInputError("need eps > 0 and h > 0")
    if x0 >= 0:
        raise InvalidInputError(
            "x0 must be negative (start on the attracting branch)"
        )
    if _is_exact(x0, h):
        boundary = Fraction(-1, 1) / (2 * Fraction(h))
        at_boundary = Fraction(x0) == boundary
        below = Fraction(x0) < boundary
    else:
        boundary = -1.0 / (2 * float(h))
        gap = float(x0) - boundary
        at_boundary = abs(gap) <= 1e-12 * max(1.0, abs(boundary))
        below = gap < 0 and not at_boundary
    if at_boundary:
        if _is_exact(h, eps):
            t_star = Fraction(3, 2) / (Fraction(h) * Fraction(eps))
        else:
            t_star = 3.0 / (2 * float(h) * float(eps))
        return TranscriticalClassification(
            TranscriticalCase.TANGENCY, x0, eps, h, t_star=t_star)
    if below:
        return TranscriticalClassification(
            TranscriticalCase.NO_ESCAPE, x0, eps, h)
    c0, c1, c2 = (float(c) for c in transcritical_parabola(x0, eps, h))
    disc = c1**2 - 4 * c2 * c0
    if disc <= 0:
        raise InvalidInputError(
            "parabola has no real roots; inconsistent parameters"
        )
    root = math.sqrt(disc)
    # c2 < 0: smaller root of the downward parabola comes from the minus branch
    t1 = (-c1 + root) / (2 * c2)
    t2 = (-c1 - root) / (2 * c2)
    return TranscriticalClassification(
        TranscriticalCase.TWO_ROOTS, x0, eps, h, t1=t1, t2=t2)


# -- normal-form constants and Hopf prediction -------------------------------


@dataclass(frozen=True)
class NormalFormReport:
    h_tilde: float
    a1: float
    a2: float
    a3: float
    a4: float
    a5: float
    A: float
    lambda_h: float
    lambda_c: float


def normal_form_report(eps, h) -> NormalFormReport:
    """Canard-point normal-form constants of the fast-time modified field.

    Leading order only: lambda_H = lambda_C = -h/2, with an O(h sqrt(eps))
    remainder that is not computed.
    """
    if not (0 < h < eps):
        raise InvalidInputError("need 0 < h < eps")
    ht = h / eps
    return NormalFormReport(
        h_tilde=ht,
        a1=ht / 2, a2=-ht, a3=-ht, a4=-ht / 2, a5=ht / 2,
        A=0.0,
        lambda_h=-h / 2,
        lambda_c=-h / 2,
    )


def normal_form_factors(eps, h, x, y, lam):
    """The six structure factors h1..h6 of the normal-form embedding."""
    ht = h / eps
    return (
        1 - ht * x,
        1 - ht * x,
        ht / 2 * (x - lam),
        1 - ht / 2 * x,
        1 + 0 * x,
        ht / 2 + 0 * x,
    )


# -- Hopf probe --------------------------------------------------------------


@dataclass(frozen=True)
class HopfProbeResult:
    bounded: bool
    exit_time: float | None
    final_radius: float


def hopf_probe(eps: float, h: float, lambda_p: float,
               horizon: float = 200.0, ball_radius: float = 0.5,
               offset: float = 0.05) -> HopfProbeResult:
    """Euler-map orbit test near the unfolded-fold equilibrium.

    Iterates the Euler map of the unfolded fold from
    (lambda_p + offset, lambda_p^2) and reports whether the orbit stays
    within ``ball_radius`` of the equilibrium for the full horizon.
    """
    if horizon <= 0:
        raise InvalidInputError("horizon must be positive")
    params = SystemParams(eps=eps, h=h, lambda_p=lambda_p)
    params.require_step_below_eps()
    f = bind_float(canonical(SystemName.FOLD_LAMBDA), params)
    lam = float(lambda_p)
    hv = float(h)
    x, y = lam + offset, lam**2
    n_steps = int(round(horizon / hv))
    r = math.hypot(x - lam, y - lam**2)
    for n in range(1, n_steps + 1):
        fx, fy = f(x, y)
        x += hv * fx
        y += hv * fy
        if abs(x) > 1e10 or abs(y) > 1e10:
            raise DivergedError(n)
        r = math.hypot(x - lam, y - lam**2)
        if r > ball_radius:
            return HopfProbeResult(bounded=False, exit_time=n * hv,
                                   final_radius=r)
    return HopfProbeResult(bounded=True, exit_time=None, final_radius=r)
