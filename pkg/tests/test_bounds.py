"""Bound formula tests. Closed-form spot values are derived by hand:

- beta_lower_bound(0.5, 0.25, 1, 1): the log of the survival product is
  0.25*ln(1) - 2*0.25 + 2*(0.5 ln 0.5 - 0.25 ln 0.25) = -0.5, so the bound
  is 1 - exp(-1/2).
- beta_scaled(0.5, 0.5, 1, 1): the inner log is 0.5*(ln 0.5 - 1) -
  0.5*ln 0.5 = -1/2, times 2*delta = 1/2 gives the same 1 - exp(-1/2).
- delta_star(0.5, 1, 1) = e * 0.5^(0.5/0.5) / 1 = e/2.
"""

import math

import numpy as np
import pytest

from coreset_al.bounds import (
    BoundParams,
    adaptive_simpson,
    beta_lower_bound,
    beta_scaled,
    delta_star,
    doubt_upper_bound,
    bound_curve_grid,
    hat_delta_bound,
    log_square_antiderivative,
    p_err_bound,
    verify_claims,
)


def test_doubt_upper_bound_caps_at_one():
    assert doubt_upper_bound(0.3, 2.0) == 0.6
    assert doubt_upper_bound(5.0, 2.0) == 1.0
    assert doubt_upper_bound(0.0, 2.0) == 0.0
    with pytest.raises(ValueError):
        doubt_upper_bound(-0.1, 2.0)


def test_hat_delta_bound_regimes():
    assert hat_delta_bound(0.5, 1.0) == 0.25  # quadratic while delta*lambda < 1
    assert hat_delta_bound(2.0, 1.0) == 2.0  # linear once doubt saturates
    assert hat_delta_bound(1.0, 1.0) == 1.0  # boundary belongs to the linear leg
    assert hat_delta_bound(0.5, 4.0) == 0.5
    with pytest.raises(ValueError):
        hat_delta_bound(-1.0, 1.0)


def test_p_err_bound_quadratic_and_unclamped():
    assert p_err_bound(0.5, 1.0, 1.0) == 0.25
    assert p_err_bound(3.0, 2.0, 1.0) == 18.0  # deliberately not capped at 1


def test_beta_lower_bound_hand_value():
    assert beta_lower_bound(0.5, 0.25, 1.0, 1.0) == pytest.approx(
        1.0 - math.exp(-0.5), rel=1e-12
    )


def test_beta_lower_bound_zero_width_is_exact_zero():
    assert beta_lower_bound(0.7, 0.7, 2.0, 3.0) == 0.0


def test_beta_lower_bound_domain():
    with pytest.raises(ValueError):
        beta_lower_bound(0.5, 0.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        beta_lower_bound(0.5, 0.6, 1.0, 1.0)
    with pytest.raises(ValueError):
        beta_lower_bound(0.5, 0.25, 0.0, 1.0)


def test_beta_lower_bound_can_go_negative():
    # far past the vacuity point the raw bound is negative, by design
    assert beta_lower_bound(5.0, 0.5, 1.0, 1.0) < 0.0


def test_beta_scaled_hand_value():
    assert beta_scaled(0.5, 0.5, 1.0, 1.0) == pytest.approx(
        1.0 - math.exp(-0.5), rel=1e-12
    )


def test_beta_scaled_z_one_is_exact_zero():
    assert beta_scaled(1.7, 1.0, 2.0, 0.5) == 0.0


def test_beta_scaled_domain():
    with pytest.raises(ValueError):
        beta_scaled(0.5, 0.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        beta_scaled(0.5, 1.1, 1.0, 1.0)
    with pytest.raises(ValueError):
        beta_scaled(0.0, 0.5, 1.0, 1.0)


def test_delta_star_hand_values():
    assert delta_star(0.5, 1.0, 1.0) == pytest.approx(math.e / 2.0, rel=1e-12)
    # z -> 0+ tends to e / sqrt(lambda_c * lambda_eps)
    assert delta_star(1e-9, 1.0, 1.0) == pytest.approx(math.e, rel=1e-6)
    assert delta_star(0.5, 4.0, 1.0) == pytest.approx(math.e / 4.0, rel=1e-12)


def test_delta_star_is_the_zero_crossing():
    for z in (0.1, 0.25, 0.5, 0.9):
        for lam_c, lam_eps in ((1.0, 1.0), (0.5, 3.0)):
            root = delta_star(z, lam_c, lam_eps)
            assert beta_scaled(root, z, lam_c, lam_eps) == pytest.approx(0.0, abs=1e-12)


def test_delta_star_domain():
    with pytest.raises(ValueError):
        delta_star(1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        delta_star(0.0, 1.0, 1.0)


def test_scaling_identity_on_a_grid():
    # the generic bound at r0 = z*delta equals the closed scaled form
    for delta in (0.2, 1.0, 2.5):
        for z in (0.1, 0.5, 0.99):
            lhs = beta_lower_bound(delta, z * delta, 1.3, 0.7)
            rhs = beta_scaled(delta, z, 1.3, 0.7)
            assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)


def test_adaptive_simpson_polynomial_exact():
    # Simpson is exact on cubics
    assert adaptive_simpson(lambda x: x * x, 0.0, 1.0) == pytest.approx(1.0 / 3.0, abs=1e-15)
    assert adaptive_simpson(lambda x: x**3 - x, -1.0, 2.0) == pytest.approx(
        (2.0**4 / 4 - 2.0) - (0.25 - 0.5), abs=1e-12
    )


def test_adaptive_simpson_transcendental():
    assert adaptive_simpson(math.sin, 0.0, math.pi) == pytest.approx(2.0, abs=1e-12)
    assert adaptive_simpson(math.exp, 0.0, 1.0) == pytest.approx(math.e - 1.0, abs=1e-12)


def test_adaptive_simpson_degenerate_and_invalid():
    assert adaptive_simpson(math.sin, 1.0, 1.0) == 0.0
    with pytest.raises(ValueError):
        adaptive_simpson(math.sin, 2.0, 1.0)
    with pytest.raises(ValueError):
        adaptive_simpson(math.sin, 0.0, 1.0, tol=0.0)


def test_antiderivative_differentiates_back():
    h = 1e-6
    for a in (0.3, 1.0, 7.0):
        for x in (0.2, 1.0, 4.0):
            slope = (
                log_square_antiderivative(x + h, a) - log_square_antiderivative(x - h, a)
            ) / (2 * h)
            assert slope == pytest.approx(math.log(a * x * x), rel=1e-7, abs=1e-7)
    with pytest.raises(ValueError):
        log_square_antiderivative(0.0, 1.0)


def test_verify_claims_all_pass_at_stated_tolerances():
    report = verify_claims()
    names = [check.name for check in report.checks]
    assert names == ["product-integral", "quadrature-antiderivative", "radius-scaling-identity"]
    for check in report.checks:
        assert check.passed, f"{check.name}: {check.max_deviation} > {check.tolerance}"
    assert report.all_passed


def test_verify_claims_honest_failure_under_impossible_tolerance():
    report = verify_claims(tol_quadrature=1e-18)
    assert not report.all_passed


def test_bound_curve_grid_shape_and_flags():
    deltas = np.linspace(0.1, 3.0, 30)
    rows = bound_curve_grid([0.25, 0.5], deltas, BoundParams(1.0, 1.0))
    assert len(rows) == 60
    for row in rows:
        assert row.beta_lower_clamped == max(0.0, row.beta_lower)
        assert row.quadratic_regime == (row.delta < 1.0)
    # delta_star is constant within a z slice and matches the formula
    first_slice = [r for r in rows if r.z == 0.25]
    assert len({r.delta_star for r in first_slice}) == 1
    assert first_slice[0].delta_star == pytest.approx(delta_star(0.25, 1.0, 1.0), rel=1e-12)


def test_bound_curve_grid_sign_change_brackets_delta_star():
    deltas = np.linspace(0.05, 3.0, 400)
    rows = bound_curve_grid([0.5], deltas, BoundParams(1.0, 1.0))
    root = delta_star(0.5, 1.0, 1.0)
    below = [r.delta for r in rows if r.beta_lower >= 0.0]
    above = [r.delta for r in rows if r.beta_lower < 0.0]
    assert max(below) <= root <= min(above)


def test_bound_params_validation():
    with pytest.raises(ValueError):
        BoundParams(lambda_c=0.0)
    with pytest.raises(ValueError):
        BoundParams(lambda_eps=-1.0)
