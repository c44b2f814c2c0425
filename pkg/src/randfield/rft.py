"""Familywise-error thresholds for smooth fields on bounded regions.

The central quantity is the expected Euler characteristic of the excursion
set above h,

    E chi(A_h) = sum_d mu_d rho_d(h),

which for high h approximates P(sup Y > h).  ``rft_threshold`` inverts that
expansion; ``bonferroni_threshold`` gives the pointwise union bound;
``rice_expected_upcrossings`` and ``poisson_clump_sup_prob`` provide the 1D
level-crossing rate and the clump heuristic for the supremum.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

TWO_PI = 2.0 * math.pi

# Absolute tolerance on |expected_ec(h) - alpha| for the bisection solver.
SOLVER_TOL = 1e-8


class RegimeViolation(Exception):
    """The expected-EC tail approximation is not valid for the request."""


@dataclass(frozen=True)
class ThresholdResult:
    """Solved threshold, the error rate it achieves, and the method used."""

    h: float
    alpha_achieved: float
    method: str

    def __post_init__(self):
        object.__setattr__(self, "h", float(self.h))
        object.__setattr__(self, "alpha_achieved", float(self.alpha_achieved))
        if not 0.0 <= self.alpha_achieved <= 1.0:
            raise ValueError(f"alpha_achieved must lie in [0, 1], got {self.alpha_achieved}")
        if self.method not in ("expected_ec", "bonferroni", "poisson_clump"):
            raise ValueError(f"unknown method {self.method!r}")


@dataclass(frozen=True)
class RiceInputs:
    """Covariance data for the Rice rate: r0 = R(0), r2 = -R''(0)."""

    r0: float
    r2: float

    def __post_init__(self):
        if not (self.r0 > 0 and math.isfinite(self.r0)):
            raise ValueError(f"r0 must be a positive real, got {self.r0}")
        if not (self.r2 >= 0 and math.isfinite(self.r2)):
            raise ValueError(f"r2 must be a non-negative real, got {self.r2}")


def _gaussian_density(d: int, lam: float, h: float) -> float:
    e = math.exp(-0.5 * h * h)
    if d == 0:
        return float(special.ndtr(-h))
    if d == 1:
        return math.sqrt(lam) * e / TWO_PI
    if d == 2:
        return lam * h * e / TWO_PI**1.5
    if d == 3:
        return lam**1.5 * (h * h - 1.0) * e / TWO_PI**2
    raise ValueError(f"gaussian EC density is defined for d in 0..3, got {d}")


def _power(r: float, exponent: float) -> float:
    """r ** exponent with the r -> 0+ limit handled explicitly."""
    if r > 0.0:
        return math.exp(exponent * math.log(r))
    if exponent > 0.0:
        return 0.0
    if exponent == 0.0:
        return 1.0
    return math.inf


def _f_tail_integrand(x: float, a: int, b: int, log_coef: float) -> float:
    r = a * x / b
    return math.exp(log_coef + math.log(a / b) - 0.5 * (a + b) * math.log1p(r)) * _power(
        r, 0.5 * (a - 2)
    )


def _f_density(d: int, lam: float, h: float, a: int, b: int) -> float:
    if h < 0:
        raise ValueError(f"F-field EC densities need h >= 0, got {h}")
    if a + b <= 3:
        raise ValueError(f"F-field EC densities need alpha + beta > 3, got {a} + {b}")
    log_gamma_ab = special.gammaln(0.5 * a) + special.gammaln(0.5 * b)
    if d == 0:
        # Tail mass of the F density, integrated numerically rather than via
        # an incomplete-beta identity; tests pin it to an independent oracle.
        log_coef = special.gammaln(0.5 * (a + b)) - log_gamma_ab
        value, _ = integrate.quad(
            _f_tail_integrand,
            h,
            np.inf,
            args=(a, b, log_coef),
            epsabs=0.0,
            epsrel=1e-9,
            limit=200,
        )
        return float(value)
    r = a * h / b
    if d == 1:
        log_coef = special.gammaln(0.5 * (a + b - 1)) + 0.5 * math.log(2.0) - log_gamma_ab
        value = math.exp(log_coef - 0.5 * (a + b - 2) * math.log1p(r)) * _power(
            r, 0.5 * (a - 1)
        )
        return math.sqrt(lam) * value
    if d == 2:
        log_coef = special.gammaln(0.5 * (a + b - 2)) - log_gamma_ab
        poly = (b - 1.0) * r - (a - 1.0)
        if r == 0.0 and a == 1:
            return 0.0  # r**(-1/2) * poly -> (b-1) sqrt(r) -> 0
        value = math.exp(log_coef - 0.5 * (a + b - 2) * math.log1p(r)) * _power(
            r, 0.5 * (a - 2)
        )
        return lam / TWO_PI * value * poly
    raise ValueError(f"F-field EC densities are defined for d in 0..2, got {d}")


def ec_density(spec, d: int, h: float) -> float:
    """EC density rho_d(h) of the field family described by ``spec``.

    Gaussian supports d = 0..3; F supports d = 0..2 with h >= 0.
    """
    if math.isnan(h):
        raise ValueError("threshold must not be NaN")
    if spec.family == "gaussian":
        return _gaussian_density(d, spec.lam, h)
    if spec.family == "f":
        a, b = spec.df
        return _f_density(d, spec.lam, h, a, b)
    raise ValueError(f"unsupported family {spec.family!r}")


def _mu_vector(iv) -> np.ndarray:
    mu = np.asarray(getattr(iv, "mu", iv), dtype=np.float64)
    if mu.ndim != 1 or not 1 <= mu.size <= 4:
        raise ValueError("intrinsic volumes must hold between 1 and 4 entries")
    if not np.isfinite(mu).all():
        raise ValueError("intrinsic volumes must be finite")
    return mu


def expected_ec(iv, spec, h: float) -> float:
    """Expected excursion-set EC: sum over d of mu_d * rho_d(h).

    Terms with mu_d == 0 are skipped, so families that lack high-order
    densities still work when those orders carry no weight.
    """
    mu = _mu_vector(iv)
    total = 0.0
    for d, m in enumerate(mu):
        if m != 0.0:
            total += m * ec_density(spec, d, h)
    return float(total)


def corrected_pvalue(iv, spec, h: float) -> float:
    """Familywise-corrected p-value: expected EC clamped to [0, 1]."""
    return float(min(1.0, max(0.0, expected_ec(iv, spec, h))))


def _statistic_mode(spec) -> float:
    if spec.family == "gaussian":
        return 0.0
    a, b = spec.df
    if a > 2:
        return (a - 2.0) * b / (a * (b + 2.0))
    return 0.0


def rft_threshold(iv, spec, alpha: float) -> ThresholdResult:
    """Invert the expected-EC expansion: find h with E chi(A_h) = alpha.

    Bisection over [h_lo, h_hi] with h_lo = max(1, statistic mode) and h_hi
    found by doubling.  The approximation only holds in the decreasing tail,
    so the solver checks monotonicity at the bracket ends and raises
    RegimeViolation when expected_ec(h_lo) < alpha (the requested rate can
    only be reached below the valid regime).
    """
    if not (0.0 < alpha < 1.0):
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    mu = _mu_vector(iv)

    def f(h: float) -> float:
        return expected_ec(mu, spec, h)

    h_lo = max(1.0, _statistic_mode(spec))
    e_lo = f(h_lo)
    if e_lo < alpha:
        raise RegimeViolation(
            f"expected EC at h = {h_lo:g} is {e_lo:.6g} < alpha = {alpha:g}; the "
            "expected-EC approximation is only valid for sufficiently high "
            "thresholds (domain too small or alpha too large)"
        )
    # The expansion is inverted on the decreasing tail.  For some statistics
    # (an F field with few numerator df, say) the curve still rises just past
    # the floor, so walk the bracket start over the bump before bisecting.
    step_up = 0.25 * h_lo
    climbed = False
    for _ in range(400):
        e_next = f(h_lo + step_up)
        if e_next > e_lo:
            h_lo += step_up
            e_lo = e_next
            climbed = True
        else:
            break
    else:
        raise RegimeViolation("could not bracket the threshold; expected EC does not decay")
    if climbed and e_next >= alpha:
        h_lo += step_up
        e_lo = e_next
    h_hi = h_lo
    for _ in range(200):
        h_hi *= 2.0
        if f(h_hi) < alpha:
            break
    else:
        raise RegimeViolation("could not bracket the threshold; expected EC does not decay")
    step = 1e-6 * (h_hi - h_lo)
    e_hi = f(h_hi)
    decreasing_lo = f(h_lo) > f(h_lo + step)
    # At the top end strictness is only meaningful before the tail
    # underflows to exactly zero.
    decreasing_hi = f(h_hi - step) > e_hi if e_hi > 0.0 else f(h_hi - step) >= e_hi
    if not (decreasing_lo and decreasing_hi):
        raise RegimeViolation(
            "expected EC is not strictly decreasing on the search bracket"
        )
    lo, hi = h_lo, h_hi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        e_mid = f(mid)
        if abs(e_mid - alpha) <= SOLVER_TOL:
            return ThresholdResult(h=mid, alpha_achieved=e_mid, method="expected_ec")
        if e_mid > alpha:
            lo = mid
        else:
            hi = mid
    raise RegimeViolation("bisection failed to reach the expected-EC tolerance")


def bonferroni_threshold(alpha: float, n_tests: int) -> ThresholdResult:
    """Pointwise Gaussian threshold for the union bound over n_tests cells."""
    if not (0.0 < alpha <= 1.0):
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    if n_tests < 1:
        raise ValueError(f"n_tests must be a positive integer, got {n_tests}")
    p = alpha / n_tests
    if p <= 0.0:
        raise ValueError("alpha / n_tests underflowed to zero")
    h = float(0.0 - special.ndtri(p))
    return ThresholdResult(h=h, alpha_achieved=float(alpha), method="bonferroni")


def rice_expected_upcrossings(inputs: RiceInputs, h: float, length: float = 1.0) -> float:
    """Expected h-upcrossings of a stationary process over ``length``:

        (length / 2 pi) sqrt(r2 / r0) exp(-h^2 / (2 r0)).
    """
    if not (length > 0 and math.isfinite(length)):
        raise ValueError(f"length must be a positive real, got {length}")
    if math.isnan(h):
        raise ValueError("threshold must not be NaN")
    rate = math.sqrt(inputs.r2 / inputs.r0) / TWO_PI * math.exp(-0.5 * h * h / inputs.r0)
    return length * rate


def poisson_clump_sup_prob(vol: float, mean_clump: float, marginal_tail: float) -> float:
    """Clump-heuristic P(sup Y < h) = exp(-(vol / mean_clump) * P(Y > h))."""
    if not (vol > 0 and math.isfinite(vol)):
        raise ValueError(f"vol must be a positive real, got {vol}")
    if not (mean_clump > 0 and math.isfinite(mean_clump)):
        raise ValueError(f"mean_clump must be a positive real, got {mean_clump}")
    if not (0.0 <= marginal_tail <= 1.0):
        raise ValueError(f"marginal_tail must lie in [0, 1], got {marginal_tail}")
    return math.exp(-(vol / mean_clump) * marginal_tail)
