"""Modified-equation derivation and its defect/order diagnostics."""

from fractions import Fraction

import numpy as np
import pytest

from canardeq.modified import (
    derive_modified,
    local_defect,
    order_slope,
    transcritical_modified_paper_variant,
)
from canardeq.poly import RationalPoly
from canardeq.vectorfield import SystemName, SystemParams, canonical

X = RationalPoly.var("x")
Y = RationalPoly.var("y")
EPS = RationalPoly.var("eps")
H = RationalPoly.var("h")


def test_higher_orders_rejected():
    with pytest.raises(NotImplementedError):
        derive_modified(canonical(SystemName.TRANSCRITICAL), order=2)


def test_correction_is_minus_half_jacobian_product():
    """Numeric oracle: f1 must equal -1/2 Df0 f0 at sample points."""
    ms = derive_modified(canonical(SystemName.TRANSCRITICAL))
    eps = 0.25
    rng = np.random.default_rng(3)
    for _ in range(20):
        x, y = rng.uniform(-2, 2, size=2)
        f0 = np.array([x * x - y * y + eps, eps])
        jac = np.array([[2 * x, -2 * y], [0.0, 0.0]])
        expected = -0.5 * jac @ f0
        got = np.array([float(ms.f1.fx.evaluate(x, y, eps)),
                        float(ms.f1.fy.evaluate(x, y, eps))])
        assert np.allclose(got, expected, atol=1e-12)


def test_fh_is_f0_plus_h_f1():
    ms = derive_modified(canonical(SystemName.TRANSCRITICAL))
    assert ms.fh.fx == ms.f0.fx + H * ms.f1.fx
    assert ms.fh.fy == ms.f0.fy + H * ms.f1.fy


def test_transcritical_variants_differ_by_eps_h_x_minus_y():
    engine = derive_modified(canonical(SystemName.TRANSCRITICAL)).fh
    paper = transcritical_modified_paper_variant()
    assert paper.fx - engine.fx == EPS * H * (X - Y)
    assert paper.fy == engine.fy
    # identical on the invariant line y = x
    for x in (Fraction(-2), Fraction(1, 3)):
        assert paper.fx.evaluate(x, x, Fraction(1, 4), Fraction(1, 10)) == \
            engine.fx.evaluate(x, x, Fraction(1, 4), Fraction(1, 10))


def test_order_slope_degenerate_for_constant_field():
    """Euler is exact on a constant field, so no order can be fitted."""
    from canardeq.errors import DegenerateFitError
    from canardeq.vectorfield import PolyVectorField, TimeScale

    const = PolyVectorField(fx=RationalPoly.constant(1),
                            fy=RationalPoly.constant(Fraction(-1, 2)),
                            time_scale=TimeScale.FAST)
    params = SystemParams(eps=1, h=Fraction(1, 10))
    with pytest.raises(DegenerateFitError):
        order_slope(const, params, (0.0, 0.0), 1.0,
                    [1e-2, 5e-3, 2.5e-3], against="original")


def test_local_defect_third_order_against_modified():
    """Euler vs modified-flow defect halves by ~8 when h halves."""
    f0 = canonical(SystemName.TRANSCRITICAL)
    params = SystemParams(eps=Fraction(1, 4), h=Fraction(1, 10))
    z0 = (-2.0, -1.0)
    d1 = local_defect(f0, params, z0, 0.02)
    d2 = local_defect(f0, params, z0, 0.01)
    assert 7.0 < d1 / d2 < 9.0


def test_local_defect_second_order_against_original():
    f0 = canonical(SystemName.TRANSCRITICAL)
    params = SystemParams(eps=Fraction(1, 4), h=Fraction(1, 10))
    z0 = (-2.0, -1.0)
    d1 = local_defect(f0, params, z0, 0.02, flow_field=f0)
    d2 = local_defect(f0, params, z0, 0.01, flow_field=f0)
    assert 3.5 < d1 / d2 < 4.5
