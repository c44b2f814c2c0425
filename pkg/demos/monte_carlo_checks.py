"""Cross-validate the analytic machinery against brute-force simulation:
mean excursion EC versus the expected-EC formula, the familywise error rate
at the solved threshold, and the Poisson clump approximation of P(sup > h).

Two hundred null replicates are enough to pin each curve to a few percent;
the validate subcommand runs the same comparisons at acceptance size.
"""

import math
from pathlib import Path

import numpy as np
from scipy import special

from randfield import (
    BinaryMask,
    FieldSpec,
    Grid,
    RngSeed,
    SimConfig,
    empirical_fwer,
    estimate_mean_clump_size,
    expected_ec,
    lattice_intrinsic_volumes,
    poisson_clump_sup_prob,
    replicate_field,
    rft_threshold,
    run_replicates,
    smoothness_params,
)

GRID = Grid(dims=(100, 100))
N_REPLICATES = 200


def main():
    config = SimConfig(
        grid=GRID,
        fwhm=10.0,
        sigma_w=1.0,
        n_replicates=N_REPLICATES,
        thresholds=(2.0, 2.25, 2.5, 2.75, 3.0, 3.25, 3.5),
        base_seed=RngSeed(42),
        standardize="sample",
        crop_boundary=True,
    )
    summary = run_replicates(config)
    full = BinaryMask(GRID, np.ones(GRID.n_cells, dtype=bool))
    iv = tuple(lattice_intrinsic_volumes(full))
    spec = FieldSpec("gaussian", lam=smoothness_params(fwhm=10.0).lam)

    print(f"{N_REPLICATES} null replicates on {GRID.dims}, FWHM 10")
    print(f"{'h':>5} {'mean EC':>9} {'expected':>9} {'stderr':>8}")
    expected = []
    for i, h in enumerate(config.thresholds):
        target = expected_ec(iv, spec, h)
        expected.append(target)
        se = float(summary.ec_curves[:, i].std(ddof=1)) / math.sqrt(N_REPLICATES)
        print(f"{h:5.2f} {summary.mean_ec[i]:9.3f} {target:9.3f} {se:8.3f}")

    h_star = rft_threshold(iv, spec, 0.05).h
    fwer = empirical_fwer(summary.sup_values, h_star)
    print(f"\nsolved h* = {h_star:.4f}; empirical FWER {fwer:.3f} (target 0.05)")

    clump_h = 2.5
    fields = [replicate_field(config, r) for r in range(N_REPLICATES)]
    mean_clump = estimate_mean_clump_size(fields, clump_h)
    vol = GRID.n_cells * GRID.cell_measure
    tail = float(special.ndtr(-clump_h))
    predicted = 1.0 - poisson_clump_sup_prob(vol, mean_clump, tail)
    observed = empirical_fwer(summary.sup_values, clump_h)
    print(
        f"clump heuristic at h = {clump_h}: mean clump {mean_clump:.1f} cells, "
        f"predicted P(sup > h) {predicted:.3f}, observed {observed:.3f}"
    )

    plot(config.thresholds, summary, expected)


def plot(thresholds, summary, expected):
    try:
        import matplotlib
    except ImportError:
        print("matplotlib not installed; skipping figure")
        return
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    stderr = summary.ec_curves.std(ddof=1, axis=0) / math.sqrt(summary.ec_curves.shape[0])
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.errorbar(thresholds, summary.mean_ec, yerr=3.0 * stderr, fmt="o", capsize=3,
                label="simulation (3 SE)")
    ax.plot(thresholds, expected, "-", label="expected EC")
    ax.set_xlabel("threshold h")
    ax.set_ylabel("mean excursion EC")
    ax.legend()
    fig.tight_layout()
    out_dir = Path(__file__).parent / "output"
    out_dir.mkdir(exist_ok=True)
    path = out_dir / "monte_carlo_checks.png"
    fig.savefig(path, dpi=140)
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
