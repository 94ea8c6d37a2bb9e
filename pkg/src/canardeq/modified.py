"""Backward error analysis: first-order modified fields for the Euler map.

For an explicit Euler step z -> z + h f0(z), the field
f0 - (h/2) Df0 f0 is solved by the iterates to second order in h.  The
correction is computed as an exact symbolic matrix-vector product, so
golden comparisons against hand-derived modified equations are exact
rational identities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DegenerateFitError, InvalidInputError
from .poly import RationalPoly
from .vectorfield import (
    PolyVectorField,
    SystemName,
    SystemParams,
    bind_float,
    canonical,
)

_H = RationalPoly.var("h")
_HALF = Fraction(1, 2)


@dataclass(frozen=True)
class ModifiedSystem:
    """Original field f0, first correction f1 and composite fh = f0 + h f1."""

    f0: PolyVectorField
    f1: PolyVectorField
    fh: PolyVectorField


def derive_modified(f0: PolyVectorField, order: int = 1) -> ModifiedSystem:
    """Build the modified system for the Euler discretization of f0.

    Only the first-order correction f1 = -1/2 Df0 f0 is available;
    higher orders are rejected.
    """
    if order != 1:
        raise NotImplementedError(
            "only the first-order modified equation is implemented"
        )
    (dxx, dxy), (dyx, dyy) = f0.jacobian()
    f1x = -_HALF * (dxx * f0.fx + dxy * f0.fy)
    f1y = -_HALF * (dyx * f0.fx + dyy * f0.fy)
    f1 = PolyVectorField(fx=f1x, fy=f1y, time_scale=f0.time_scale)
    fh = PolyVectorField(
        fx=f0.fx + _H * f1x,
        fy=f0.fy + _H * f1y,
        time_scale=f0.time_scale,
    )
    return ModifiedSystem(f0=f0, f1=f1, fh=fh)


def transcritical_modified_paper_variant() -> PolyVectorField:
    """The printed modified transcritical field, with correction +eps*h*x.

    The generic construction yields +eps*h*y instead; the two agree on
    the invariant line y = x and differ by eps*h*(x - y) off it.  Both
    variants are exposed so analyses can be run against either.
    """
    x = RationalPoly.var("x")
    y = RationalPoly.var("y")
    eps = RationalPoly.var("eps")
    one = RationalPoly.constant(1)
    fx = (one - _H * x) * (x**2 - y**2 + eps) + eps * _H * x
    return PolyVectorField(fx=fx, fy=eps, time_scale=canonical(
        SystemName.TRANSCRITICAL).time_scale)


def _flow_endpoint(field: PolyVectorField, params: SystemParams, z0, t_end,
                   h_value, tol):
    """High-order reference flow endpoint (float arithmetic)."""
    from .integrate import reference_solve

    traj = reference_solve(
        field, z0, params, (0.0, t_end),
        abstol=tol, reltol=tol, t_eval=[t_end], h_value=h_value,
    )
    _, x, y = traj.samples[-1]
    return float(x), float(y)


def local_defect(f0: PolyVectorField, params: SystemParams, z0, h_val: float,
                 flow_field: PolyVectorField | None = None,
                 tol: float = 1e-13) -> float:
    """One-step defect: Euler step of f0 versus the time-h flow of fh.

    ``flow_field`` defaults to the modified field; passing f0 itself
    measures the ordinary O(h^2) local truncation error instead.
    """
    if flow_field is None:
        flow_field = derive_modified(f0).fh
    f = bind_float(f0, params)
    x0, y0 = float(z0[0]), float(z0[1])
    fx, fy = f(x0, y0)
    ex, ey = x0 + h_val * fx, y0 + h_val * fy
    rx, ry = _flow_endpoint(flow_field, params, (x0, y0), h_val, h_val, tol)
    return math.hypot(ex - rx, ey - ry)


def order_slope(f0: PolyVectorField, params: SystemParams, z0, t_end: float,
                h_list, against: str = "modified") -> float:
    """Convergence order of the Euler map against a continuous flow.

    Measures the global error at t_end between Euler iterates of f0 and
    the reference flow of either the modified field (``"modified"``) or
    f0 itself (``"original"``), and returns the least-squares slope of
    log error versus log h.
    """
    from .integrate import euler_iterate

    if len(h_list) < 3:
        raise InvalidInputError("need at least 3 step sizes for a slope fit")
    h_list = list(h_list)
    if any(b >= a for a, b in zip(h_list, h_list[1:])):
        raise InvalidInputError("h_list must be strictly decreasing")
    if against == "modified":
        target = derive_modified(f0).fh
    elif against == "original":
        target = f0
    else:
        raise InvalidInputError(f"unknown comparison target {against!r}")

    errors = []
    for h in h_list:
        n = round(t_end / h)
        p = SystemParams(eps=params.eps, h=h, lambda_p=params.lambda_p)
        traj = euler_iterate(f0, z0, p, n_steps=n, digits=25)
        _, xe, ye = traj.samples[-1]
        rx, ry = _flow_endpoint(target, p, (float(z0[0]), float(z0[1])),
                                n * h, h, 1e-13)
        errors.append(math.hypot(float(xe) - rx, float(ye) - ry))

    if max(errors) < 1e-13:
        raise DegenerateFitError(
            f"errors at rounding level ({errors}); order is undefined"
        )
    slope, _ = np.polyfit(np.log(h_list), np.log(errors), 1)
    return float(slope)
