"""Self-contained validation suites behind the validate subcommand.

Each criterion recomputes its reference quantities, measures the library
against them, and reports one PASS/FAIL line.  The quick suite shrinks the
Monte Carlo sizes (bands are recomputed for the reduced sizes, so they stay
statistically meaningful); the full suite runs the reference sizes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, stats

from .grid import FieldSpec, Grid, RngSeed, key_signal, white_noise
from .montecarlo import (
    SimConfig,
    count_upcrossings,
    empirical_fwer,
    estimate_lambda,
    integral_variance_check,
    replicate_field,
    run_replicates,
)
from .rft import bonferroni_threshold, ec_density, expected_ec, rft_threshold, rice_expected_upcrossings, RiceInputs
from .smoothing import smoothness_params
from .topology import (
    BinaryMask,
    closed_form_intrinsic_volumes,
    euler_characteristic,
    excursion_set,
    lattice_intrinsic_volumes,
)

IV_REFERENCE = (1.0, 200.0, 10000.0)

SUITE_SIZES = {
    "quick": {"ec_replicates": 200, "rice": (2000, 1000), "integral_replicates": 500},
    "full": {"ec_replicates": 2000, "rice": (4000, 5000), "integral_replicates": 2000},
}


@dataclass(frozen=True)
class CriterionResult:
    index: int
    name: str
    passed: bool
    detail: str


def _c1_bonferroni():
    h1 = bonferroni_threshold(0.05, 1).h
    h2 = bonferroni_threshold(0.05, 10000).h
    passed = abs(h1 - 1.6449) <= 5e-4 and abs(h2 - 4.4172) <= 5e-4
    return passed, f"h(n=1)={h1:.6f} h(n=10000)={h2:.6f} targets 1.6449/4.4172 +-5e-4"


def _c2_false_positive_rate(seed: int):
    base = RngSeed(1000 + seed)
    grid = Grid(dims=(100, 100))
    fracs = [
        float((white_noise(grid, 1.0, base.child(i)).values > 1.64).mean()) for i in range(20)
    ]
    mean = float(np.mean(fracs))
    passed = 0.043 <= mean <= 0.057
    return passed, f"mean fraction above 1.64 = {mean:.6f} over 20 seeds, band [0.043, 0.057]"


def _c3_topology(seed: int):
    checks = []
    bits = np.zeros((12, 12), dtype=bool)
    bits[1:11, 1:11] = True
    checks.append(euler_characteristic(BinaryMask(Grid(dims=(12, 12)), bits.ravel())) == 1)

    key = key_signal(Grid(dims=(60, 37)))
    key_mask = BinaryMask(key.grid, key.values.ravel() > 0.0)
    checks.append(euler_characteristic(key_mask) == 0)

    bits = np.zeros((10, 10), dtype=bool)
    bits[1:3, 1:3] = True
    bits[6:8, 6:8] = True
    checks.append(euler_characteristic(BinaryMask(Grid(dims=(10, 10)), bits.ravel())) == 2)

    rng = RngSeed(303 + seed).generator()
    for _ in range(5):
        a, b = (int(v) for v in rng.integers(2, 40, size=2))
        delta = float(rng.choice(np.array([0.5, 1.0, 2.0])))
        grid = Grid(dims=(a, b), delta=delta)
        iv = lattice_intrinsic_volumes(BinaryMask(grid, np.ones(grid.n_cells, dtype=bool)))
        checks.append(abs(iv[0] - 1.0) <= 1e-12)
        checks.append(abs(iv[1] - (a + b) * delta) <= 1e-12 * (a + b) * delta)
        checks.append(abs(iv[2] - a * b * delta**2) <= 1e-12 * a * b * delta**2)

    ball = closed_form_intrinsic_volumes("ball", 1.0)
    checks.append(abs(ball[1] - 4.0) <= 1e-12)
    checks.append(abs(ball[2] - 2.0 * math.pi) <= 1e-12)
    checks.append(abs(ball[3] - 4.0 * math.pi / 3.0) <= 1e-12)
    box = closed_form_intrinsic_volumes("box", 1.0, 1.0, 1.0)
    checks.append(tuple(box.mu) == (1.0, 3.0, 3.0, 1.0))

    passed = all(checks)
    return passed, f"{sum(checks)}/{len(checks)} shape identities hold"


def _c4_ec_densities():
    checks = []
    g = FieldSpec("gaussian", lam=1.0)
    checks.append(abs(ec_density(g, 0, 0.0) - 0.5) <= 1e-12)
    checks.append(ec_density(g, 2, 0.0) == 0.0)
    checks.append(ec_density(g, 3, 1.0) == 0.0)
    for d in (1, 2, 3):
        lo = ec_density(FieldSpec("gaussian", lam=0.2), d, 1.7)
        hi = ec_density(FieldSpec("gaussian", lam=0.4), d, 1.7)
        checks.append(abs(hi - 2.0 ** (d / 2.0) * lo) <= 1e-12 * abs(hi))
    worst = 0.0
    for a, b in ((3, 20), (5, 30)):
        spec = FieldSpec("f", lam=1.0, df=(a, b))
        for h in (1.0, 2.0, 4.0):
            oracle, _ = integrate.quad(
                lambda x: stats.f.pdf(x, a, b), h, np.inf, epsabs=1e-12, epsrel=1e-12
            )
            worst = max(worst, abs(ec_density(spec, 0, h) - oracle))
    checks.append(worst <= 1e-8)
    passed = all(checks)
    return passed, f"identities hold, F tail max |error| = {worst:.3e} (limit 1e-8)"


def _ec_simulation(seed: int, replicates: int) -> SimConfig:
    return SimConfig(
        grid=Grid(dims=(100, 100)),
        fwhm=10.0,
        sigma_w=1.0,
        n_replicates=replicates,
        thresholds=(2.0, 2.5, 3.0, 3.5),
        base_seed=RngSeed(42 + seed),
        standardize="sample",
        crop_boundary=True,
    )


def _c5_expected_ec(summary, config, lambda_factor: float):
    spec = FieldSpec("gaussian", lam=smoothness_params(fwhm=10.0).lam * lambda_factor)
    worst = 0.0
    for i, h in enumerate(config.thresholds):
        target = expected_ec(IV_REFERENCE, spec, h)
        se = float(summary.ec_curves[:, i].std(ddof=1)) / math.sqrt(config.n_replicates)
        worst = max(worst, abs(float(summary.mean_ec[i]) - target) / se)
    passed = worst <= 3.0
    return passed, f"max |mean EC - expected| = {worst:.2f} SE over h in 2.0..3.5 (limit 3)"


def _c6_fwer(summary, config, h_star: float, suite: str):
    fwer = empirical_fwer(summary.sup_values, h_star)
    if suite == "full":
        lo, hi = 0.03, 0.07
    else:
        half = 3.0 * math.sqrt(0.05 * 0.95 / config.n_replicates)
        lo, hi = 0.05 - half, 0.05 + half
    passed = lo <= fwer <= hi
    return passed, f"empirical FWER {fwer:.4f} at h*={h_star:.4f}, band [{lo:.4f}, {hi:.4f}]"


def _c7_ordering(h_star: float):
    h_point = bonferroni_threshold(0.05, 1).h
    h_bonf = bonferroni_threshold(0.05, 10000).h
    passed = h_point < h_star < h_bonf
    return passed, f"{h_point:.4f} < {h_star:.4f} < {h_bonf:.4f}"


def _c8_lambda(config):
    fields = [replicate_field(config, r) for r in range(50)]
    lam_hat = estimate_lambda(fields)
    target = smoothness_params(fwhm=10.0).lam
    rel = abs(lam_hat - target) / target
    passed = rel <= 0.15
    return passed, f"lambda_hat {lam_hat:.6f} vs {target:.6f} (rel error {rel:.3f}, limit 0.15)"


def _c9_rice(seed: int, n_points: int, n_paths: int):
    config = SimConfig(
        grid=Grid(dims=(n_points,)),
        fwhm=10.0,
        sigma_w=1.0,
        n_replicates=n_paths,
        thresholds=(1.0,),
        base_seed=RngSeed(5 + seed),
        standardize="theory",
        crop_boundary=True,
    )
    kernel = config.kernel()
    rho1 = float(kernel.taps[:-1] @ kernel.taps[1:]) / float(kernel.taps @ kernel.taps)
    inputs = RiceInputs(r0=1.0, r2=2.0 * (1.0 - rho1))
    length = (n_points - 1) * config.grid.delta
    counts = {1.0: np.empty(n_paths), 2.0: np.empty(n_paths)}
    for r in range(n_paths):
        values = replicate_field(config, r).values
        for h in counts:
            counts[h][r] = count_upcrossings(values, h)
    devs = []
    for h, arr in counts.items():
        target = rice_expected_upcrossings(inputs, h, length=length)
        se = float(arr.std(ddof=1)) / math.sqrt(n_paths)
        devs.append(abs(float(arr.mean()) - target) / se)
    worst = max(devs)
    passed = worst <= 3.0
    return passed, f"max |count - rice| = {worst:.2f} SE at h in (1, 2) over {n_paths} paths (limit 3)"


def _c10_integral(seed: int, replicates: int):
    config = SimConfig(
        grid=Grid(dims=(50, 50)),
        fwhm=5.0,
        sigma_w=1.0,
        n_replicates=replicates,
        thresholds=(1.0,),
        base_seed=RngSeed(99 + seed),
    )
    empirical, theoretical = integral_variance_check(config)
    ratio = empirical / theoretical
    passed = 0.85 <= ratio <= 1.15
    return passed, f"variance ratio {ratio:.4f} over {replicates} replicates, band [0.85, 1.15]"


def _c11_curve_shape(seed: int, threads: int):
    grid = Grid(dims=(60, 37))
    thresholds = tuple(float(-10 + i) / 10.0 for i in range(21))
    config = SimConfig(
        grid=grid,
        fwhm=10.0,
        sigma_w=1.0,
        n_replicates=50,
        thresholds=thresholds,
        base_seed=RngSeed(314 + seed),
        signal=key_signal(grid),
        standardize="none",
        crop_boundary=True,
    )
    summary = run_replicates(config, n_workers=threads)
    i_mid = thresholds.index(-0.5)
    mid = float(summary.mean_ec[i_mid])
    se = float(summary.ec_curves[:, i_mid].std(ddof=1)) / math.sqrt(config.n_replicates)
    mid_ok = abs(mid - 0.0) <= 3.0 * se if se > 0.0 else mid == 0.0
    h_top = 1.0 + max(0.0, max(summary.sup_values) - 1.0) + 1e-9
    top_ecs = [
        abs(
            lattice_intrinsic_volumes(excursion_set(replicate_field(config, r), h_top))[0]
        )
        for r in range(config.n_replicates)
    ]
    top_ok = max(top_ecs) == 0.0
    passed = mid_ok and top_ok
    return passed, (
        f"mean EC at h=-0.5 is {mid:.4f} (object chi 0, SE {se:.4f}); "
        f"EC at h_top={h_top:.4f} is 0 in all replicates: {top_ok}"
    )


def _c12_determinism(seed: int, threads: int):
    config = SimConfig(
        grid=Grid(dims=(50, 50)),
        fwhm=8.0,
        sigma_w=1.0,
        n_replicates=30,
        thresholds=(1.5, 2.5),
        base_seed=RngSeed(711 + seed),
        standardize="sample",
        crop_boundary=True,
    )
    first = run_replicates(config, n_workers=1)
    again = run_replicates(config, n_workers=1)
    threaded = run_replicates(config, n_workers=max(2, threads))
    same = (
        np.array_equal(first.sup_values, again.sup_values)
        and np.array_equal(first.ec_curves, again.ec_curves)
        and np.array_equal(first.sup_values, threaded.sup_values)
        and np.array_equal(first.ec_curves, threaded.ec_curves)
        and np.array_equal(first.standardization, threaded.standardization)
    )
    return same, f"repeat and single-vs-multi-worker runs bit-identical: {same}"


def run_suite(
    suite: str = "quick",
    seed: int = 0,
    threads: int = 1,
    lambda_factor: float = 1.0,
) -> list[CriterionResult]:
    if suite not in SUITE_SIZES:
        raise ValueError(f"unknown suite {suite!r} (use quick or full)")
    if threads < 1:
        raise ValueError("threads must be at least 1")
    if not (lambda_factor > 0.0):
        raise ValueError("lambda corruption factor must be positive")
    sizes = SUITE_SIZES[suite]

    ec_config = _ec_simulation(seed, sizes["ec_replicates"])
    ec_summary = run_replicates(ec_config, n_workers=threads)
    spec_true = FieldSpec("gaussian", lam=smoothness_params(fwhm=10.0).lam)
    h_star = rft_threshold(IV_REFERENCE, spec_true, 0.05).h

    entries = [
        ("bonferroni_reference", _c1_bonferroni()),
        ("pointwise_false_positive_rate", _c2_false_positive_rate(seed)),
        ("topology_oracles", _c3_topology(seed)),
        ("ec_density_identities", _c4_ec_densities()),
        ("expected_ec_vs_monte_carlo", _c5_expected_ec(ec_summary, ec_config, lambda_factor)),
        ("fwer_calibration", _c6_fwer(ec_summary, ec_config, h_star, suite)),
        ("threshold_ordering", _c7_ordering(h_star)),
        ("smoothness_recovery", _c8_lambda(ec_config)),
        ("rice_upcrossings", _c9_rice(seed, *sizes["rice"])),
        ("integral_variance", _c10_integral(seed, sizes["integral_replicates"])),
        ("mean_ec_curve_shape", _c11_curve_shape(seed, threads)),
        ("determinism", _c12_determinism(seed, threads)),
    ]
    return [
        CriterionResult(index=i, name=name, passed=passed, detail=detail)
        for i, (name, (passed, detail)) in enumerate(entries, start=1)
    ]


def format_report(suite: str, seed: int, results: list[CriterionResult]) -> str:
    lines = [f"suite={suite} seed={seed}"]
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        lines.append(f"{status} {r.index:02d} {r.name}: {r.detail}")
    n_pass = sum(r.passed for r in results)
    overall = "PASS" if n_pass == len(results) else "FAIL"
    lines.append(f"RESULT {overall} {n_pass}/{len(results)}")
    return "\n".join(lines)
