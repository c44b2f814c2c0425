"""Level upcrossings of a smooth 1D process versus the Rice rate.

For a stationary standardized process the expected number of h-upcrossings
over a stretch of length L is (L / 2 pi) sqrt(r2 / r0) exp(-h^2 / (2 r0)),
with r0 the variance and r2 the second spectral moment.  On the lattice r2
is taken from the one-step autocorrelation of the smoothing kernel, which is
the convention the discrete crossing counter actually realises.
"""

import math
from pathlib import Path

import numpy as np

from randfield import (
    Grid,
    RiceInputs,
    RngSeed,
    SimConfig,
    count_upcrossings,
    replicate_field,
    rice_expected_upcrossings,
)

N_POINTS = 3000
N_PATHS = 800
LEVELS = (0.0, 0.5, 1.0, 1.5, 2.0, 2.5)


def main():
    config = SimConfig(
        grid=Grid(dims=(N_POINTS,)),
        fwhm=12.0,
        sigma_w=1.0,
        n_replicates=N_PATHS,
        thresholds=(1.0,),
        base_seed=RngSeed(6),
        standardize="theory",
        crop_boundary=True,
    )
    kernel = config.kernel()
    rho1 = float(kernel.taps[:-1] @ kernel.taps[1:]) / float(kernel.taps @ kernel.taps)
    inputs = RiceInputs(r0=1.0, r2=2.0 * (1.0 - rho1))
    length = (N_POINTS - 1) * config.grid.delta
    print(f"lattice spectral moments: r0 = 1, r2 = {inputs.r2:.6e} (rho1 = {rho1:.6f})")

    counts = np.empty((N_PATHS, len(LEVELS)))
    for r in range(N_PATHS):
        values = replicate_field(config, r).values
        counts[r] = [count_upcrossings(values, h) for h in LEVELS]

    print(f"\n{N_PATHS} paths of {N_POINTS} points, FWHM 12")
    print(f"{'h':>5} {'mean count':>11} {'rice':>9} {'stderr':>8}")
    rice = []
    for j, h in enumerate(LEVELS):
        target = rice_expected_upcrossings(inputs, h, length=length)
        rice.append(target)
        se = float(counts[:, j].std(ddof=1)) / math.sqrt(N_PATHS)
        print(f"{h:5.1f} {counts[:, j].mean():11.3f} {target:9.3f} {se:8.3f}")
        assert abs(counts[:, j].mean() - target) <= 4.0 * se

    plot(counts, rice)


def plot(counts, rice):
    try:
        import matplotlib
    except ImportError:
        print("matplotlib not installed; skipping figure")
        return
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    stderr = counts.std(ddof=1, axis=0) / math.sqrt(counts.shape[0])
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.errorbar(LEVELS, counts.mean(axis=0), yerr=3.0 * stderr, fmt="o", capsize=3,
                label="simulation (3 SE)")
    ax.plot(LEVELS, rice, "-", label="Rice rate")
    ax.set_xlabel("level h")
    ax.set_ylabel("mean upcrossings")
    ax.legend()
    fig.tight_layout()
    out_dir = Path(__file__).parent / "output"
    out_dir.mkdir(exist_ok=True)
    path = out_dir / "rice_crossings_1d.png"
    fig.savefig(path, dpi=140)
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
