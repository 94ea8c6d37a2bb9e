"""Spectra, windows, way-in/way-out maps, classification and the Hopf probe."""

import math
from fractions import Fraction

import numpy as np
import pytest
from scipy.integrate import fixed_quad

from canardeq.canard import (
    TranscriticalCase,
    classify_transcritical,
    complex_window,
    fold_spectrum,
    hopf_probe,
    normal_form_factors,
    normal_form_report,
    psi_fold,
    psi_transcritical,
    trace_zero,
    trace_zero_closed_form,
    transcritical_eigenvalue,
    transcritical_parabola,
)
from canardeq.errors import BracketingError, InvalidInputError

EPS, H = 0.1, 0.01


def test_spectrum_matches_trace_and_det():
    for x in (-0.4, -0.1, 0.0, 0.2, 0.45):
        s = fold_spectrum(x, EPS, H)
        assert abs((s.mu1 + s.mu2).real - s.trace) < 1e-12
        assert abs((s.mu1 + s.mu2).imag) < 1e-12
        assert abs((s.mu1 * s.mu2).real - s.det) < 1e-10
    with pytest.raises(InvalidInputError):
        fold_spectrum(0.0, -1.0, H)


def test_spectrum_matches_numeric_eigensolve():
    """Independent oracle: numpy eigensolve of the modified Jacobian on S_eps."""
    from canardeq.modified import derive_modified
    from canardeq.vectorfield import SystemName, canonical

    jac = derive_modified(canonical(SystemName.FOLD_SLOW)).fh.jacobian()
    for x in (-0.45, -0.2, 0.05, 0.3):
        y = x * x - EPS / 2
        mat = np.array([[float(jac[i][j].evaluate(x, y, EPS, H))
                         for j in range(2)] for i in range(2)])
        numeric = sorted(np.linalg.eigvals(mat), key=lambda z: (z.real, z.imag))
        s = fold_spectrum(x, EPS, H)
        closed = sorted((s.mu1, s.mu2), key=lambda z: (z.real, z.imag))
        for a, b in zip(closed, numeric):
            assert abs(a - b) <= 1e-10 * max(1.0, abs(b))


def test_spectrum_complex_inside_window_real_outside():
    w = complex_window(EPS, H)
    inside = fold_spectrum(0.5 * (w.x1 + w.x2), EPS, H)
    assert inside.mu1.imag > 0 and inside.mu2 == inside.mu1.conjugate()
    outside = fold_spectrum(w.x2 + 0.1, EPS, H)
    assert outside.mu1.imag == 0
    assert abs(outside.mu1) >= abs(outside.mu2)


def test_window_symmetric_at_zero_step():
    w = complex_window(EPS, 0.0)
    assert abs(w.x1 + math.sqrt(EPS)) < 1e-12
    assert abs(w.x2 - math.sqrt(EPS)) < 1e-12


def test_window_regime_guards():
    with pytest.raises(InvalidInputError):
        complex_window(EPS, EPS)  # needs h < eps
    with pytest.raises((InvalidInputError, BracketingError)):
        complex_window(-1.0, 0.0)


def test_trace_zero_inside_window_and_near_closed_form():
    x_star = trace_zero(EPS, H)
    w = complex_window(EPS, H)
    assert w.x1 < x_star < 0
    assert abs(fold_spectrum(x_star, EPS, H).mu1.real) < 1e-10
    assert abs(x_star - trace_zero_closed_form(EPS, H)) < 1e-10


def test_psi_fold_structure():
    r = psi_fold(-0.5, EPS, H, 2.5)
    # Psi decreases through the attracting phase, then recovers to a root
    assert r.psi_curve[0] == (0.0, 0.0)
    mid = min(p for _, p in r.psi_curve)
    assert mid < 0
    assert r.exit_time is not None and r.roots
    assert math.isclose(r.exit_time, r.roots[0], rel_tol=1e-9)
    # residual check at the reported root via independent quadrature
    from scipy.integrate import quad

    w = complex_window(EPS, H)
    kinks = [2 * (w.x1 + 0.5), 2 * (w.x2 + 0.5)]
    val, _ = quad(lambda s: fold_spectrum(-0.5 + s / 2, EPS, H).mu1.real,
                  0.0, r.exit_time,
                  points=[k for k in kinks if 0 < k < r.exit_time], limit=200)
    assert abs(val) < 1e-7


def test_psi_fold_rejects_starts_inside_window():
    with pytest.raises(InvalidInputError):
        psi_fold(0.0, EPS, H, 1.0)
    with pytest.raises(InvalidInputError):
        psi_fold(-0.5, EPS, H, -1.0)


def test_psi_transcritical_exact_in_rational_arithmetic():
    x0, eps, h = Fraction(-2), Fraction(1, 4), Fraction(1, 10)
    t = Fraction(3)
    expected = (2 * x0 * (1 - h * x0) * t + eps * t**2
                - 2 * eps * h * x0 * t**2 - Fraction(2, 3) * eps**2 * h * t**3)
    assert psi_transcritical(x0, eps, h, t) == expected
    c0, c1, c2 = transcritical_parabola(x0, eps, h)
    assert psi_transcritical(x0, eps, h, t) == t * (c0 + c1 * t + c2 * t**2)


def test_psi_transcritical_is_integral_of_eigenvalue():
    """Oracle: Psi(t) must equal the integral of 2x(1-hx) along x = x0+eps*s."""
    x0, eps, h, t = -2.0, 0.25, 0.1, 7.0

    def integrand(s):
        x = x0 + eps * np.asarray(s)
        return 2 * x * (1 - h * x)

    val, _ = fixed_quad(integrand, 0.0, t, n=10)  # exact for cubics
    assert abs(float(psi_transcritical(x0, eps, h, t)) - val) < 1e-10


def test_transcritical_eigenvalue_sign_change():
    h = 0.1
    assert transcritical_eigenvalue(-1.0, h) < 0
    assert transcritical_eigenvalue(0.0, h) == 0
    assert transcritical_eigenvalue(1.0, h) > 0


def test_classification_three_cases():
    eps, h = Fraction(1, 4), Fraction(1, 10)
    two = classify_transcritical(Fraction(-2), eps, h)
    assert two.case is TranscriticalCase.TWO_ROOTS
    assert 0 < two.t1 < two.t2
    tangent = classify_transcritical(Fraction(-5), eps, h)
    assert tangent.case is TranscriticalCase.TANGENCY
    assert tangent.t_star == Fraction(3, 2) / (h * eps)
    none = classify_transcritical(Fraction(-8), eps, h)
    assert none.case is TranscriticalCase.NO_ESCAPE


def test_classification_roots_are_psi_zeros():
    eps, h = Fraction(1, 4), Fraction(1, 10)
    c = classify_transcritical(Fraction(-2), eps, h)
    for t in (c.t1, c.t2):
        assert abs(float(psi_transcritical(-2.0, 0.25, 0.1, t))) < 1e-9
    # and Psi at the tangency time has a double zero: value and slope small
    t_star = float(classify_transcritical(Fraction(-5), eps, h).t_star)
    p = float(psi_transcritical(-5.0, 0.25, 0.1, t_star))
    dp = (float(psi_transcritical(-5.0, 0.25, 0.1, t_star + 1e-6))
          - float(psi_transcritical(-5.0, 0.25, 0.1, t_star - 1e-6))) / 2e-6
    assert abs(p) < 1e-7 and abs(dp) < 1e-5


def test_classification_float_boundary_tolerance():
    c = classify_transcritical(-5.0 + 1e-14, 0.25, 0.1)
    assert c.case is TranscriticalCase.TANGENCY


def test_classification_input_guards():
    with pytest.raises(InvalidInputError):
        classify_transcritical(Fraction(1), Fraction(1, 4), Fraction(1, 10))
    with pytest.raises(InvalidInputError):
        classify_transcritical(Fraction(-2), Fraction(1, 4), 0)


def test_normal_form_report_values():
    r = normal_form_report(Fraction(1, 10), Fraction(1, 100))
    ht = Fraction(1, 10)
    assert (r.a1, r.a2, r.a3, r.a4, r.a5) == \
        (ht / 2, -ht, -ht, -ht / 2, ht / 2)
    assert r.A == 0.0
    assert r.lambda_h == r.lambda_c == Fraction(-1, 200)
    with pytest.raises(InvalidInputError):
        normal_form_report(0.01, 0.1)


def test_normal_form_factors_at_origin():
    h1, h2, h3, h4, h5, h6 = normal_form_factors(
        Fraction(1, 10), Fraction(1, 100), 0, 0, 0)
    assert h1 == h2 == 1
    assert h3 == 0
    assert h4 == 1 and h5 == 1
    assert h6 == Fraction(1, 20)


def test_hopf_probe_short_horizon_bounded():
    r = hopf_probe(0.1, 0.01, -0.005, horizon=20.0)
    assert r.bounded and r.exit_time is None
    assert r.final_radius < 0.5
    with pytest.raises(InvalidInputError):
        hopf_probe(0.1, 0.01, 0.0, horizon=-1.0)
