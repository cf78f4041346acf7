"""Convergence-bound formulas and their self-checks.

The bounds relate the covering radius ``delta`` of an acquired core-set to
classifier error through two regularity constants: ``lambda_c`` (how fast
doubt can grow with distance from labeled points) and ``lambda_eps`` (how
fast pointwise error can grow with doubt). ``beta_lower_bound`` gives the
generic configuration-survival lower bound over radii ``r0`` to ``delta``;
``beta_scaled`` is its closed form at ``r0 = z * delta``; ``delta_star`` is
the radius where that closed form crosses zero and the bound goes vacuous.

Everything exponential-shaped is computed in log space so large arguments
degrade to ``-inf``/overflow-free results instead of raising.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from coreset_al.seeding import make_rng


@dataclass
class BoundParams:
    """Regularity constants shared by a family of bound evaluations."""

    lambda_c: float = 1.0
    lambda_eps: float = 1.0

    def __post_init__(self):
        if self.lambda_c <= 0.0 or self.lambda_eps <= 0.0:
            raise ValueError(
                f"lambda_c and lambda_eps must be positive, got "
                f"({self.lambda_c}, {self.lambda_eps})"
            )


def doubt_upper_bound(r: float, lambda_c: float) -> float:
    """Largest doubt reachable at distance ``r`` from a labeled point."""
    if r < 0.0:
        raise ValueError(f"distance must be nonnegative, got {r}")
    return min(1.0, r * lambda_c)


def hat_delta_bound(delta: float, lambda_c: float) -> float:
    """Upper bound on the doubt-scaled radius given a plain radius ``delta``.

    Quadratic (``delta^2 * lambda_c``) while ``delta * lambda_c < 1``, where
    doubt itself still caps the product; linear (``delta``) once doubt
    saturates at 1.
    """
    if delta < 0.0:
        raise ValueError(f"delta must be nonnegative, got {delta}")
    if delta * lambda_c >= 1.0:
        return delta
    return delta * delta * lambda_c


def p_err_bound(r: float, lambda_c: float, lambda_eps: float) -> float:
    """Pointwise error bound ``lambda_c * lambda_eps * r^2`` (may exceed 1)."""
    return lambda_c * lambda_eps * r * r


def beta_lower_bound(delta: float, r0: float, lambda_c: float, lambda_eps: float) -> float:
    """Survival lower bound over radii ``r0`` to ``delta``.

    Computed as ``1 - Q`` with ``ln Q = (delta - r0) ln(lambda_c lambda_eps)
    - 2 (delta - r0) + 2 (delta ln delta - r0 ln r0)``. The result is exact
    zero at ``r0 == delta`` and can be negative (a vacuous bound) for large
    radii. Requires ``0 < r0 <= delta``.
    """
    if r0 <= 0.0:
        raise ValueError(f"r0 must be positive, got {r0}")
    if r0 > delta:
        raise ValueError(f"r0 must not exceed delta, got r0={r0}, delta={delta}")
    _check_lambdas(lambda_c, lambda_eps)
    gap = delta - r0
    log_q = (
        gap * math.log(lambda_c * lambda_eps)
        - 2.0 * gap
        + 2.0 * (delta * math.log(delta) - r0 * math.log(r0))
    )
    return 1.0 - math.exp(log_q)


def beta_scaled(delta: float, z: float, lambda_c: float, lambda_eps: float) -> float:
    """Survival lower bound with the inner radius pinned at ``r0 = z delta``.

    Closed form ``1 - ((delta sqrt(lambda_c lambda_eps) / e)^(1-z) *
    z^(-z))^(2 delta)``, evaluated in log space. ``z`` must lie in (0, 1]
    and ``delta`` must be positive. At ``z = 1`` the bound is exactly zero.
    """
    if not 0.0 < z <= 1.0:
        raise ValueError(f"z must lie in (0, 1], got {z}")
    if delta <= 0.0:
        raise ValueError(f"delta must be positive, got {delta}")
    _check_lambdas(lambda_c, lambda_eps)
    log_inner = (1.0 - z) * (
        math.log(delta) + 0.5 * math.log(lambda_c * lambda_eps) - 1.0
    ) - z * math.log(z)
    return 1.0 - math.exp(2.0 * delta * log_inner)


def delta_star(z: float, lambda_c: float, lambda_eps: float) -> float:
    """Radius where :func:`beta_scaled` crosses zero and goes vacuous.

    ``e * z^(z / (1 - z)) / sqrt(lambda_c lambda_eps)`` for ``z`` in (0, 1).
    As ``z`` approaches 0 the crossing tends to ``e / sqrt(lambda_c lambda_eps)``.
    """
    if not 0.0 < z < 1.0:
        raise ValueError(f"z must lie in (0, 1), got {z}")
    _check_lambdas(lambda_c, lambda_eps)
    return math.e * z ** (z / (1.0 - z)) / math.sqrt(lambda_c * lambda_eps)


def adaptive_simpson(f, a: float, b: float, tol: float = 1e-12, max_depth: int = 50) -> float:
    """Integral of ``f`` over [a, b] by adaptive Simpson refinement.

    Halves intervals until the Richardson error estimate drops below the
    per-interval share of ``tol`` (absolute) or ``max_depth`` is reached.
    """
    if a > b:
        raise ValueError(f"integration bounds out of order: a={a}, b={b}")
    if a == b:
        return 0.0
    if tol <= 0.0:
        raise ValueError(f"tol must be positive, got {tol}")
    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    return _simpson_refine(f, a, b, fa, fm, fb, whole, tol, int(max_depth))


def _simpson_refine(f, a, b, fa, fm, fb, whole, tol, depth):
    mid = 0.5 * (a + b)
    lm = 0.5 * (a + mid)
    rm = 0.5 * (mid + b)
    flm, frm = f(lm), f(rm)
    left = (mid - a) / 6.0 * (fa + 4.0 * flm + fm)
    right = (b - mid) / 6.0 * (fm + 4.0 * frm + fb)
    refined = left + right
    if depth <= 0 or abs(refined - whole) <= 15.0 * tol:
        return refined + (refined - whole) / 15.0
    return _simpson_refine(
        f, a, mid, fa, flm, fm, left, 0.5 * tol, depth - 1
    ) + _simpson_refine(f, mid, b, fm, frm, fb, right, 0.5 * tol, depth - 1)


def log_square_antiderivative(x: float, a: float) -> float:
    """Antiderivative ``x ln(a x^2) - 2x`` of ``ln(a x^2)``, for positive x."""
    if x <= 0.0:
        raise ValueError(f"x must be positive, got {x}")
    if a <= 0.0:
        raise ValueError(f"a must be positive, got {a}")
    return x * math.log(a * x * x) - 2.0 * x


@dataclass
class ClaimCheck:
    """Outcome of one numeric self-check."""

    name: str
    passed: bool
    max_deviation: float
    tolerance: float
    samples: int


@dataclass
class ClaimReport:
    checks: list[ClaimCheck] = field(default_factory=list)

    @property
    def all_passed(self) -> bool:
        return all(check.passed for check in self.checks)


def verify_claims(
    tol_quadrature: float = 1e-9,
    tol_identity: float = 1e-12,
    tol_product: float = 1e-4,
    samples: int = 40,
    seed: int = 20240817,
) -> ClaimReport:
    """Cross-check the bound formulas against independent computations.

    Three checks, each over ``samples`` random instances:

    - ``product-integral``: the closed-form survival bound matches
      ``1 - exp(sum dr ln(lambda_c lambda_eps r^2))`` on a midpoint grid
      with ``dr <= 1e-5`` (tolerance ``tol_product``).
    - ``quadrature-antiderivative``: adaptive Simpson integration of
      ``ln(a x^2)`` matches ``x ln(a x^2) - 2x`` (tolerance
      ``tol_quadrature``, relative).
    - ``radius-scaling-identity``: ``beta_lower_bound(delta, z * delta)``
      equals ``beta_scaled(delta, z)`` (tolerance ``tol_identity``,
      relative).

    Deviations are measured relative to ``max(1, |expected|)`` so vacuous
    (hugely negative) bounds are compared proportionally.
    """
    if samples < 1:
        raise ValueError(f"samples must be at least 1, got {samples}")
    rng = make_rng(seed)
    report = ClaimReport()

    dev = 0.0
    n_product = max(1, samples // 4)  # each instance integrates ~1e5 grid points
    for case in range(n_product + 1):
        if case == 0:
            r0, delta, lam_c, lam_eps = 0.25, 0.5, 1.0, 1.0
        else:
            r0 = float(rng.uniform(0.05, 2.0))
            delta = r0 + float(rng.uniform(0.1, 2.5))
            lam_c = float(rng.uniform(0.5, 2.0))
            lam_eps = float(rng.uniform(0.5, 2.0))
        closed = beta_lower_bound(delta, r0, lam_c, lam_eps)
        discrete = _product_integral_beta(delta, r0, lam_c, lam_eps, dr=1e-5)
        dev = max(dev, abs(closed - discrete) / max(1.0, abs(closed)))
    report.checks.append(
        ClaimCheck("product-integral", dev <= tol_product, dev, tol_product, n_product + 1)
    )

    dev = 0.0
    for _ in range(samples):
        a = float(rng.uniform(0.1, 10.0))
        x0 = float(rng.uniform(0.05, 3.0))
        x1 = x0 + float(rng.uniform(0.1, 3.0))
        quad = adaptive_simpson(lambda x: math.log(a * x * x), x0, x1, tol=1e-12)
        exact = log_square_antiderivative(x1, a) - log_square_antiderivative(x0, a)
        dev = max(dev, abs(quad - exact) / max(1.0, abs(exact)))
    report.checks.append(
        ClaimCheck("quadrature-antiderivative", dev <= tol_quadrature, dev, tol_quadrature, samples)
    )

    dev = 0.0
    for _ in range(samples):
        delta = float(rng.uniform(0.05, 5.0))
        z = float(rng.uniform(0.05, 1.0))
        lam_c = float(rng.uniform(0.1, 10.0))
        lam_eps = float(rng.uniform(0.1, 10.0))
        generic = beta_lower_bound(delta, z * delta, lam_c, lam_eps)
        scaled = beta_scaled(delta, z, lam_c, lam_eps)
        dev = max(dev, abs(generic - scaled) / max(1.0, abs(generic), abs(scaled)))
    report.checks.append(
        ClaimCheck("radius-scaling-identity", dev <= tol_identity, dev, tol_identity, samples)
    )
    return report


def _product_integral_beta(delta, r0, lambda_c, lambda_eps, dr):
    """Survival bound via the discretised product over per-radius error bounds."""
    steps = max(1, math.ceil((delta - r0) / dr))
    width = (delta - r0) / steps
    mids = r0 + (np.arange(steps) + 0.5) * width
    log_q = float(width * np.log(p_err_bound(mids, lambda_c, lambda_eps)).sum())
    return 1.0 - math.exp(log_q)


@dataclass
class BoundCurveRow:
    """One grid point of the bound curves report."""

    z: float
    delta: float
    beta_lower: float
    beta_lower_clamped: float
    delta_star: float
    quadratic_regime: bool


def bound_curve_grid(z_values, deltas, params: BoundParams | None = None) -> list[BoundCurveRow]:
    """Bound curves over a radius grid, one sweep per ``z`` slice.

    Args:
        z_values: Scale factors, each in (0, 1).
        deltas: Radius grid, each entry positive.
        params: Regularity constants; defaults to ``lambda_c = lambda_eps = 1``.

    Returns:
        Rows ordered by (z slice, then radius): the raw bound, its clamp at
        zero, the vacuity crossing for the slice, and whether the radius is
        still in the quadratic regime ``delta * lambda_c < 1``.
    """
    if params is None:
        params = BoundParams()
    z_list = [float(z) for z in z_values]
    delta_list = [float(d) for d in deltas]
    if not z_list:
        raise ValueError("need at least one z value")
    if not delta_list:
        raise ValueError("need at least one delta value")
    rows = []
    for z in z_list:
        crossing = delta_star(z, params.lambda_c, params.lambda_eps)
        for delta in delta_list:
            raw = beta_scaled(delta, z, params.lambda_c, params.lambda_eps)
            rows.append(
                BoundCurveRow(
                    z=z,
                    delta=delta,
                    beta_lower=raw,
                    beta_lower_clamped=max(0.0, raw),
                    delta_star=crossing,
                    quadratic_regime=delta * params.lambda_c < 1.0,
                )
            )
    return rows


def _check_lambdas(lambda_c: float, lambda_eps: float) -> None:
    if lambda_c <= 0.0 or lambda_eps <= 0.0:
        raise ValueError(
            f"lambda_c and lambda_eps must be positive, got ({lambda_c}, {lambda_eps})"
        )
