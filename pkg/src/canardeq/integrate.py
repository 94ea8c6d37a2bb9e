"""Map iteration at arbitrary precision and adaptive reference solving."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath as mp
import numpy as np
from scipy.integrate import solve_ivp

from .errors import (
    DivergedError,
    InvalidInputError,
    SingularStepError,
    SolverStallError,
)
from .poly import RationalPoly
from .vectorfield import (
    PolyVectorField,
    SystemParams,
    _to_mpf,
    bind_float,
    bind_mp,
)

DIVERGENCE_GUARD = 1e10


class Scheme(enum.Enum):
    EULER_MAP = "euler"
    KAHAN_MAP = "kahan"
    REFERENCE_ODE = "reference"


class ManifoldKind(enum.Enum):
    FOLD_SLOW_MANIFOLD = "fold-slow-manifold"
    TRANSCRITICAL_LINE = "transcritical-line"


@dataclass(frozen=True)
class ManifoldSpec:
    """Residual r(x, y) vanishing on the tracked invariant set."""

    kind: ManifoldKind
    expression: RationalPoly

    @classmethod
    def fold_slow_manifold(cls) -> "ManifoldSpec":
        # y - x^2 + eps/2 = 0 on S_eps
        x = RationalPoly.var("x")
        y = RationalPoly.var("y")
        eps = RationalPoly.var("eps")
        return cls(ManifoldKind.FOLD_SLOW_MANIFOLD,
                   y - x**2 + Fraction(1, 2) * eps)

    @classmethod
    def transcritical_line(cls) -> "ManifoldSpec":
        y = RationalPoly.var("y")
        x = RationalPoly.var("x")
        return cls(ManifoldKind.TRANSCRITICAL_LINE, y - x)

    def residual(self, x, y, eps):
        return self.expression.evaluate(x, y, eps)


@dataclass(frozen=True)
class Trajectory:
    """Ordered (t, x, y) samples with the scheme and precision that made them."""

    samples: list
    scheme: Scheme
    params: SystemParams
    digits: int
    meta: dict = field(default_factory=dict)

    def arrays(self):
        t = np.array([float(s[0]) for s in self.samples])
        x = np.array([float(s[1]) for s in self.samples])
        y = np.array([float(s[2]) for s in self.samples])
        return t, x, y

    def __len__(self):
        return len(self.samples)


def _check_map_preconditions(f0, params, digits):
    if digits < 16:
        raise InvalidInputError(f"digits must be >= 16, got {digits}")
    if f0.uses_epsinv:
        params.require_step_below_eps()


def euler_iterate(f0: PolyVectorField, z0, params: SystemParams,
                  n_steps: int, digits: int = 50) -> Trajectory:
    """Iterate z -> z + h f0(z) exactly n_steps times at ``digits``.

    Raises DivergedError (carrying the partial trajectory) if |z| leaves
    the 1e10 guard region.
    """
    _check_map_preconditions(f0, params, digits)
    with mp.workdps(digits):
        f = bind_mp(f0, params, digits)
        h = _to_mpf(params.h)
        x, y = _to_mpf(z0[0]), _to_mpf(z0[1])
        samples = [(mp.mpf(0), x, y)]
        for n in range(1, n_steps + 1):
            fx, fy = f(x, y)
            x = x + h * fx
            y = y + h * fy
            if abs(x) > DIVERGENCE_GUARD or abs(y) > DIVERGENCE_GUARD:
                partial = Trajectory(samples, Scheme.EULER_MAP, params, digits)
                raise DivergedError(n, partial)
            samples.append((n * h, x, y))
    return Trajectory(samples, Scheme.EULER_MAP, params, digits)


def kahan_iterate(f0: PolyVectorField, z0, params: SystemParams,
                  n_steps: int, digits: int = 50) -> Trajectory:
    """Linearly implicit Kahan iteration for quadratic fields.

    Each step solves the 2x2 system (Id - (h/2) Df(z)) w = f(z) and sets
    z -> z + h w; one step matches z + h f + (h^2/2) Df f up to O(h^3).
    """
    _check_map_preconditions(f0, params, digits)
    (jxx, jxy), (jyx, jyy) = f0.jacobian()
    jac = PolyVectorField(fx=jxx, fy=jxy, time_scale=f0.time_scale)
    jac2 = PolyVectorField(fx=jyx, fy=jyy, time_scale=f0.time_scale)
    with mp.workdps(digits):
        f = bind_mp(f0, params, digits)
        jrow1 = bind_mp(jac, params, digits)
        jrow2 = bind_mp(jac2, params, digits)
        h = _to_mpf(params.h)
        half_h = h / 2
        det_floor = mp.mpf(10) ** (-digits + 4)
        x, y = _to_mpf(z0[0]), _to_mpf(z0[1])
        samples = [(mp.mpf(0), x, y)]
        for n in range(1, n_steps + 1):
            fx, fy = f(x, y)
            a11, a12 = jrow1(x, y)
            a21, a22 = jrow2(x, y)
            m11 = 1 - half_h * a11
            m12 = -half_h * a12
            m21 = -half_h * a21
            m22 = 1 - half_h * a22
            det = m11 * m22 - m12 * m21
            if abs(det) < det_floor:
                raise SingularStepError(n, float(det))
            wx = (m22 * fx - m12 * fy) / det
            wy = (m11 * fy - m21 * fx) / det
            x = x + h * wx
            y = y + h * wy
            if abs(x) > DIVERGENCE_GUARD or abs(y) > DIVERGENCE_GUARD:
                partial = Trajectory(samples, Scheme.KAHAN_MAP, params, digits)
                raise DivergedError(n, partial)
            samples.append((n * h, x, y))
    return Trajectory(samples, Scheme.KAHAN_MAP, params, digits)


def reference_solve(f: PolyVectorField, z0, params: SystemParams, t_span,
                    abstol: float = 1e-12, reltol: float = 1e-12,
                    t_eval=None, h_value=None,
                    stop_radius: float | None = None) -> Trajectory:
    """Adaptive Dormand-Prince 4(5) solve of the continuous field.

    ``h_value`` supplies the numeric value of the step symbol when ``f``
    is a modified field; it defaults to params.h.  ``stop_radius``
    terminates the solve once |(x, y)| exceeds the given radius (used to
    stop canard blow-up cleanly).
    """
    if abstol < 1e-14 or reltol < 1e-14:
        raise InvalidInputError("tolerances below 1e-14 are not supported")
    rhs_xy = bind_float(f, params, h_value=h_value)

    def rhs(t, z):
        return rhs_xy(z[0], z[1])

    events = None
    if stop_radius is not None:
        def escape(t, z):
            return z[0] ** 2 + z[1] ** 2 - stop_radius**2
        escape.terminal = True
        escape.direction = 1
        events = [escape]

    t0, t1 = float(t_span[0]), float(t_span[1])
    sol = solve_ivp(
        rhs, (t0, t1), [float(z0[0]), float(z0[1])],
        method="RK45", rtol=reltol, atol=abstol,
        t_eval=t_eval, first_step=1e-4 * (t1 - t0),
        events=events, dense_output=False,
    )
    if not sol.success and sol.status != 1:
        raise SolverStallError(
            f"reference solver stalled: {sol.message}",
            last_time=sol.t[-1] if len(sol.t) else t0,
            last_state=sol.y[:, -1] if sol.y.size else None,
        )
    samples = [
        (sol.t[i], sol.y[0, i], sol.y[1, i]) for i in range(len(sol.t))
    ]
    meta = {"terminated_early": sol.status == 1}
    return Trajectory(samples, Scheme.REFERENCE_ODE, params, 16, meta)


def escape_time(traj: Trajectory, manifold: ManifoldSpec,
                threshold: float = 0.1):
    """First time the manifold residual exceeds ``threshold``.

    The trajectory must first have been within threshold/10 of the
    manifold; returns (t_exit, index) or None.
    """
    if threshold <= 0:
        raise InvalidInputError("threshold must be positive")
    eps = float(traj.params.eps)
    armed = False
    for i, (t, x, y) in enumerate(traj.samples):
        r = abs(float(manifold.residual(float(x), float(y), eps)))
        if not armed:
            if r <= threshold / 10:
                armed = True
            continue
        if r > threshold:
            return float(t), i
    return None


def fold_first_integral(x, y, eps):
    """Conserved quantity of the fold system: exp(-2y/eps)(y - x^2 + eps/2).

    Computed in mpmath so the exponential cannot overflow.
    """
    x = _to_mpf(x)
    y = _to_mpf(y)
    eps = _to_mpf(eps)
    return mp.exp(-2 * y / eps) * (y - x**2 + eps / 2)


def fold_integral_drift(traj: Trajectory) -> float:
    """max |H(z_n) - H(z_0)| along a trajectory."""
    eps = traj.params.eps
    with mp.workdps(max(traj.digits, 30)):
        h0 = fold_first_integral(traj.samples[0][1], traj.samples[0][2], eps)
        drift = mp.mpf(0)
        for _, x, y in traj.samples[1:]:
            drift = max(drift, abs(fold_first_integral(x, y, eps) - h0))
    return float(drift)
