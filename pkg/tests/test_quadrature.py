import math

import pytest

from expmoments.engines import fourier_abs_moment_from_cf
from expmoments.quadrature import (
    QuadratureConfig,
    QuadratureError,
    integral_iqs,
    integrate,
    integrate_abs_power,
)
from expmoments.specialfn import closed_integral_iqs, fourier_constant, gaussian_abs_moment

SQRT_HALF_PI = 1.2533141373155003  # sqrt(pi/2), by parts down to the Gaussian integral


def test_exponential_integral():
    val, err = integrate(lambda t: math.exp(-t), 0.0, math.inf)
    assert val == pytest.approx(1.0, abs=1e-12)
    assert err >= abs(val - 1.0)


def test_gaussian_tail_integral():
    def f(t):
        return -math.expm1(-0.5 * t * t) / (t * t) if t > 1e-8 else 0.5

    val, err = integrate(f, 0.0, math.inf)
    assert val == pytest.approx(SQRT_HALF_PI, rel=1e-9)
    assert err >= abs(val - SQRT_HALF_PI)


def test_arctangent_family_integral():
    def f(t):
        return (1.0 - 1.0 / (1.0 + t * t)) / (t * t)

    val, _ = integrate(f, 0.0, math.inf)
    assert val == pytest.approx(math.pi / 2.0, rel=1e-9)


def test_finite_interval_polynomial():
    val, err = integrate(lambda t: t**4, 0.0, 1.0)
    assert val == pytest.approx(0.2, rel=1e-13)
    # both embedded rules are exact on quartics; only roundoff remains
    assert err + 4e-16 * abs(val) >= abs(val - 0.2)


def test_split_at_interior_kink():
    val, _ = integrate(lambda t: abs(t - 0.3), 0.0, 1.0, singular_points=[0.3])
    truth = 0.5 * (0.3**2 + 0.7**2)
    assert val == pytest.approx(truth, rel=1e-12)


def test_nonconvergence_carries_best_estimate():
    cfg = QuadratureConfig(rel_tol=1e-10, abs_tol=1e-16, max_depth=10, max_panels=40)
    with pytest.raises(QuadratureError) as info:
        integrate(lambda t: abs(t - 1.0 / 3.0) ** -0.9, 0.0, 1.0, cfg, singular_points=[1.0 / 3.0])
    assert math.isfinite(info.value.value)
    assert info.value.err_estimate > 0.0


def test_config_validation():
    with pytest.raises(ValueError):
        QuadratureConfig(rel_tol=0.0)
    with pytest.raises(ValueError):
        QuadratureConfig(max_depth=5)


def test_abs_power_negative_exponent_endpoint():
    # int_0^inf |t-1|^(-1/2) e^(-t) dt; oracle: series/Gamma evaluation of
    # the same centered-exponential moment (independent code path)
    from expmoments.analysis import centered_exp_abs_moment

    val, err = integrate_abs_power(lambda t: math.exp(-t), -0.5, 1.0, 0.0, math.inf)
    truth = centered_exp_abs_moment(-0.5)
    assert val == pytest.approx(truth, rel=1e-10)
    assert err >= abs(val - truth)


def test_abs_power_positive_exponent():
    val, _ = integrate_abs_power(lambda t: math.exp(-t), 1.0, 1.0, 0.0, math.inf)
    assert val == pytest.approx(2.0 / math.e, rel=1e-10)


def test_abs_power_rejects_bad_power():
    with pytest.raises(ValueError):
        integrate_abs_power(lambda t: 1.0, -1.0, 0.0, 0.0, 1.0)


def test_iqs_quadrature_matches_closed_form_on_grid():
    for q in (0.25, 0.75, 1.0, 1.25, 1.75):
        for s in (0.5, 1.0, 2.0, 10.0, 100.0):
            closed = closed_integral_iqs(q, s)
            quad, err = integral_iqs(q, s)
            assert quad == pytest.approx(closed, rel=1e-8)
            assert err >= abs(quad - closed)


def test_gaussian_fourier_identity():
    # c_q int (1 - e^(-t^2/2)) / t^(q+1) dt = E|G|^q; the s -> infinity
    # limit of the power-tail family
    for q in (0.3, 0.9, 1.5):
        val, err = fourier_abs_moment_from_cf(
            lambda t: math.exp(-0.5 * t * t),
            q,
            (1.0, 3.0, 15.0),
            lambda t: math.exp(-0.5 * t * t),
        )
        truth = gaussian_abs_moment(q)
        assert val == pytest.approx(truth, rel=1e-7)
        assert err >= abs(val - truth) * 0.1


def test_fourier_constant_consistency_with_arctangent_cell():
    # q = 1 ties the Laplace transform square to the arctangent integral
    val, _ = integral_iqs(1.0, 1.0)
    assert fourier_constant(1.0) * val == pytest.approx(
        fourier_constant(1.0) * math.pi / 2.0, rel=1e-9
    )
