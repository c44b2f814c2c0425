"""Command line front end: simulate fields, solve thresholds, export EC
curves, and run the validation suites.

File formats owned here:
  rfgrid  line 1 ``rfgrid <ndim> <dims...> <delta>``, then one value per
          line, row-major, 17 significant digits (byte-identical round trip).
  config  flat ``key=value`` lines for ec-curve simulation runs; thresholds
          accept ``lo:step:hi`` ranges or comma lists.
  CSV     header ``h,mean_ec,expected_ec,stderr_ec``, LF line endings.

Exit codes: 0 success, 1 validation failure, 2 regime violation, 64 usage
or input error.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

import numpy as np
from scipy import special

from . import validation
from .grid import (
    FieldSpec,
    Grid,
    RngSeed,
    ScalarField,
    key_signal,
    synthetic_signal,
    white_noise,
)
from .montecarlo import SimConfig, run_replicates
from .rft import (
    RegimeViolation,
    ThresholdResult,
    bonferroni_threshold,
    expected_ec,
    poisson_clump_sup_prob,
    rft_threshold,
)
from .smoothing import gaussian_kernel_1d, smooth, smoothness_params
from .topology import BinaryMask, closed_form_intrinsic_volumes, lattice_intrinsic_volumes

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_REGIME = 2
EXIT_USAGE = 64


class UsageError(Exception):
    """Bad flags, malformed files, or unusable parameter combinations."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def format_value(v: float) -> str:
    return f"{float(v):.17g}"


def write_rfgrid(field: ScalarField, path: str) -> None:
    grid = field.grid
    header = f"rfgrid {grid.ndim} {' '.join(str(d) for d in grid.dims)} {format_value(grid.delta)}"
    lines = [header]
    lines.extend(format_value(v) for v in field.values.ravel())
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_rfgrid(path: str) -> ScalarField:
    try:
        with open(path) as fh:
            tokens = fh.read().split()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    if not tokens or tokens[0] != "rfgrid":
        raise UsageError(f"{path}: missing rfgrid header")
    try:
        ndim = int(tokens[1])
        dims = tuple(int(t) for t in tokens[2 : 2 + ndim])
        delta = float(tokens[2 + ndim])
        values = np.array([float(t) for t in tokens[3 + ndim :]], dtype=np.float64)
    except (IndexError, ValueError) as exc:
        raise UsageError(f"{path}: malformed rfgrid content ({exc})") from exc
    grid = Grid(dims=dims, delta=delta)
    if values.size != grid.n_cells:
        raise UsageError(
            f"{path}: expected {grid.n_cells} values for dims {dims}, found {values.size}"
        )
    return ScalarField(grid, values)


def _parse_int_list(text: str, flag: str) -> tuple[int, ...]:
    try:
        items = tuple(int(part) for part in text.split(","))
    except ValueError as exc:
        raise UsageError(f"{flag} expects comma-separated integers, got {text!r}") from exc
    if not items:
        raise UsageError(f"{flag} must not be empty")
    return items


def parse_thresholds(text: str) -> tuple[float, ...]:
    """Parse ``lo:step:hi`` (inclusive, exact decimal steps) or a comma list."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise UsageError(f"threshold range must be lo:step:hi, got {text!r}")
        try:
            lo, step, hi = (Fraction(p) for p in parts)
        except ValueError as exc:
            raise UsageError(f"bad threshold range {text!r}: {exc}") from exc
        if step <= 0 or hi < lo:
            raise UsageError(f"threshold range {text!r} must increase")
        count = int((hi - lo) / step) + 1
        return tuple(float(lo + i * step) for i in range(count))
    try:
        return tuple(float(p) for p in text.split(","))
    except ValueError as exc:
        raise UsageError(f"bad threshold list {text!r}: {exc}") from exc


def _build_signal(name: str, grid: Grid) -> ScalarField | None:
    if name == "none":
        return None
    if name == "coskey":
        return synthetic_signal(grid)
    if name == "key":
        return key_signal(grid)
    if name.startswith("file:"):
        field = read_rfgrid(name[5:])
        if field.grid.dims != grid.dims or field.grid.delta != grid.delta:
            raise UsageError(
                f"signal grid {field.grid.dims} delta {field.grid.delta} does not match "
                f"simulation grid {grid.dims} delta {grid.delta}"
            )
        return field
    raise UsageError(f"unknown signal {name!r} (use none, coskey, key, or file:PATH)")


def cmd_simulate(args) -> int:
    grid = Grid(dims=_parse_int_list(args.dims, "--dims"), delta=args.delta)
    signal = _build_signal(args.signal, grid)
    field = white_noise(grid, args.sigma_w, RngSeed(args.seed))
    if signal is not None:
        field = ScalarField(grid, signal.values.ravel() + field.values.ravel())
    if args.iterations < 1:
        raise UsageError("--iterations must be at least 1")
    if args.fwhm > 0.0:
        kernel = gaussian_kernel_1d(smoothness_params(fwhm=args.fwhm), grid.delta)
        for _ in range(args.iterations):
            field = smooth(field, kernel)
    try:
        write_rfgrid(field, args.out)
    except OSError as exc:
        raise UsageError(f"cannot write {args.out}: {exc}") from exc
    return EXIT_OK


def _region_intrinsic_volumes(args) -> tuple[float, ...] | None:
    chosen = [n for n, v in (("--mask", args.mask), ("--ball", args.ball), ("--box", args.box)) if v]
    if len(chosen) > 1:
        raise UsageError(f"give at most one region ({', '.join(chosen)} conflict)")
    if args.mask:
        field = read_rfgrid(args.mask)
        if field.grid.ndim != 2:
            raise UsageError("--mask requires a 2D rfgrid file")
        mask = BinaryMask(field.grid, field.values.ravel() > 0.5)
        return tuple(lattice_intrinsic_volumes(mask).mu)
    if args.ball is not None:
        return tuple(closed_form_intrinsic_volumes("ball", args.ball).mu)
    if args.box:
        sizes = _parse_int_list(args.box, "--box")
        if len(sizes) == 2:
            grid = Grid(dims=sizes, delta=args.delta)
            mask = BinaryMask(grid, np.ones(grid.n_cells, dtype=bool))
            return tuple(lattice_intrinsic_volumes(mask).mu)
        if len(sizes) == 3:
            return tuple(closed_form_intrinsic_volumes("box", *(float(s) for s in sizes)).mu)
        raise UsageError("--box expects A,B (lattice rectangle) or A,B,C (closed-form box)")
    return None


def _clump_threshold(vol: float, mean_clump: float, alpha: float) -> ThresholdResult:
    if not (0.0 < alpha < 1.0):
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    tail_target = -np.log1p(-alpha) * mean_clump / vol
    if tail_target >= 1.0:
        raise RegimeViolation(
            f"requested alpha {alpha:g} needs marginal tail {tail_target:.3g} >= 1; "
            "the clump approximation cannot reach it"
        )
    h = float(-special.ndtri(tail_target))
    achieved = 1.0 - poisson_clump_sup_prob(vol, mean_clump, float(special.ndtr(-h)))
    return ThresholdResult(h=h, alpha_achieved=achieved, method="poisson_clump")


def cmd_threshold(args) -> int:
    iv = _region_intrinsic_volumes(args)
    lam = None
    if args.fwhm is not None and args.lam is not None:
        raise UsageError("give --fwhm or --lambda, not both")
    if args.fwhm is not None:
        lam = smoothness_params(fwhm=args.fwhm).lam
    elif args.lam is not None:
        lam = args.lam

    if args.method == "ec":
        if iv is None:
            raise UsageError("--method ec needs a region (--mask, --ball, or --box)")
        if lam is None:
            raise UsageError("--method ec needs --fwhm or --lambda")
        if args.family == "f":
            if args.df is None:
                raise UsageError("--family f needs --df A,B")
            spec = FieldSpec("f", lam=lam, df=_parse_int_list(args.df, "--df"))
        else:
            spec = FieldSpec("gaussian", lam=lam)
        result = rft_threshold(iv, spec, args.alpha)
    elif args.method == "bonferroni":
        if args.n_tests is None:
            raise UsageError("--method bonferroni needs --n-tests")
        result = bonferroni_threshold(args.alpha, args.n_tests)
    else:
        if iv is None:
            raise UsageError("--method clump needs a region (--mask, --ball, or --box)")
        if args.mean_clump is None:
            raise UsageError("--method clump needs --mean-clump")
        if args.family == "f":
            raise UsageError("--method clump supports --family gaussian only")
        result = _clump_threshold(iv[-1], args.mean_clump, args.alpha)

    lines = [
        f"method={result.method}",
        f"h={result.h!r}",
        f"alpha_achieved={result.alpha_achieved!r}",
    ]
    if iv is not None:
        lines.extend(f"mu{d}={float(m)!r}" for d, m in enumerate(iv))
    if lam is not None:
        lines.append(f"lambda={float(lam)!r}")
    print("\n".join(lines))
    return EXIT_OK


CONFIG_KEYS = {
    "dims",
    "delta",
    "fwhm",
    "sigma_w",
    "n_replicates",
    "thresholds",
    "seed",
    "signal",
    "standardize",
    "crop",
}


def parse_config(path: str) -> dict:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    raw = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise UsageError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, value = (part.strip() for part in body.split("=", 1))
        if key not in CONFIG_KEYS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        if key in raw:
            raise UsageError(f"{path}:{lineno}: duplicate key {key!r}")
        raw[key] = value
    for required in ("dims", "fwhm", "n_replicates", "thresholds"):
        if required not in raw:
            raise UsageError(f"{path}: missing required key {required!r}")
    return raw


def _config_to_simulation(raw: dict) -> tuple[SimConfig, float]:
    try:
        grid = Grid(
            dims=_parse_int_list(raw["dims"], "dims"),
            delta=float(raw.get("delta", "1")),
        )
        fwhm = float(raw["fwhm"])
        sigma_w = float(raw.get("sigma_w", "1"))
        n_replicates = int(raw["n_replicates"])
        seed = int(raw.get("seed", "0"))
    except ValueError as exc:
        raise UsageError(f"bad config value: {exc}") from exc
    thresholds = parse_thresholds(raw["thresholds"])
    signal = _build_signal(raw.get("signal", "none"), grid)
    crop_text = raw.get("crop", "0")
    if crop_text not in ("0", "1"):
        raise UsageError(f"crop must be 0 or 1, got {crop_text!r}")
    try:
        config = SimConfig(
            grid=grid,
            fwhm=fwhm,
            sigma_w=sigma_w,
            n_replicates=n_replicates,
            thresholds=thresholds,
            base_seed=RngSeed(seed),
            signal=signal,
            standardize=raw.get("standardize", "none"),
            crop_boundary=crop_text == "1",
        )
    except ValueError as exc:
        raise UsageError(f"bad config: {exc}") from exc
    return config, fwhm


def cmd_ec_curve(args) -> int:
    raw = parse_config(args.config)
    config, fwhm = _config_to_simulation(raw)
    if config.grid.ndim != 2:
        raise UsageError("ec-curve supports 2D grids only")
    if fwhm <= 0.0:
        raise UsageError("ec-curve needs fwhm > 0 for the expected-EC column")
    grid = config.grid
    full = BinaryMask(grid, np.ones(grid.n_cells, dtype=bool))
    iv = tuple(lattice_intrinsic_volumes(full).mu)
    spec = FieldSpec("gaussian", lam=smoothness_params(fwhm=fwhm).lam)
    summary = run_replicates(config, n_workers=args.threads)
    lines = ["h,mean_ec,expected_ec,stderr_ec"]
    n = config.n_replicates
    for i, h in enumerate(config.thresholds):
        stderr = float(summary.ec_curves[:, i].std(ddof=1) / np.sqrt(n)) if n > 1 else 0.0
        lines.append(
            f"{float(h)!r},{float(summary.mean_ec[i])!r},"
            f"{expected_ec(iv, spec, h)!r},{stderr!r}"
        )
    try:
        with open(args.out, "w", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise UsageError(f"cannot write {args.out}: {exc}") from exc
    return EXIT_OK


def cmd_validate(args) -> int:
    results = validation.run_suite(
        suite=args.suite,
        seed=args.seed,
        threads=args.threads,
        lambda_factor=args.corrupt_lambda,
    )
    print(validation.format_report(args.suite, args.seed, results))
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


def build_parser() -> _Parser:
    parser = _Parser(prog="randfield", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="simulate a (smoothed) random field")
    sim.add_argument("--dims", required=True, help="comma-separated grid dims, 1 to 3 axes")
    sim.add_argument("--delta", type=float, default=1.0, help="lattice spacing (default 1)")
    sim.add_argument("--fwhm", type=float, default=0.0, help="kernel FWHM; 0 disables smoothing")
    sim.add_argument("--sigma-w", type=float, default=1.0, help="white-noise sd (default 1)")
    sim.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    sim.add_argument(
        "--signal",
        default="none",
        help="added before smoothing: none, coskey, key, or file:PATH (default none)",
    )
    sim.add_argument("--iterations", type=int, default=1, help="smoothing passes (default 1)")
    sim.add_argument("--out", required=True, help="output rfgrid path")
    sim.set_defaults(func=cmd_simulate)

    thr = sub.add_parser("threshold", help="solve a corrected threshold")
    thr.add_argument("--mask", help="region of interest as a 0/1 rfgrid file (2D)")
    thr.add_argument("--ball", type=float, help="solid ball region of this radius")
    thr.add_argument("--box", help="A,B full lattice rectangle or A,B,C closed-form box")
    thr.add_argument("--delta", type=float, default=1.0, help="lattice spacing for --box A,B")
    thr.add_argument("--family", choices=("gaussian", "f"), default="gaussian")
    thr.add_argument("--df", help="F-field degrees of freedom A,B")
    thr.add_argument("--fwhm", type=float, help="kernel FWHM defining smoothness")
    thr.add_argument("--lambda", dest="lam", type=float, help="smoothness parameter directly")
    thr.add_argument("--alpha", type=float, required=True, help="familywise error rate")
    thr.add_argument("--method", choices=("ec", "bonferroni", "clump"), required=True)
    thr.add_argument("--n-tests", type=int, help="comparison count for bonferroni")
    thr.add_argument("--mean-clump", type=float, help="mean excursion clump measure for clump")
    thr.set_defaults(func=cmd_threshold)

    curve = sub.add_parser("ec-curve", help="Monte Carlo mean EC curve as CSV")
    curve.add_argument("--config", required=True, help="key=value simulation config path")
    curve.add_argument("--out", required=True, help="output CSV path")
    curve.add_argument("--threads", type=int, default=1, help="replicate worker threads")
    curve.set_defaults(func=cmd_ec_curve)

    val = sub.add_parser("validate", help="run the acceptance criteria")
    val.add_argument("--suite", choices=("quick", "full"), default="quick")
    val.add_argument("--seed", type=int, default=0, help="suite seed (default 0)")
    val.add_argument("--threads", type=int, default=1, help="replicate worker threads")
    val.add_argument("--corrupt-lambda", type=float, default=1.0, help=argparse.SUPPRESS)
    val.set_defaults(func=cmd_validate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RegimeViolation as exc:
        print(f"regime violation: {exc}", file=sys.stderr)
        return EXIT_REGIME
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
