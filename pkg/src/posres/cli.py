"""Command-line front end.

Subcommands wrap the library one-to-one:

    construct  worst-case adversarial pair, verified gap vs sigma
    detect     singular-value-thresholding source count (fixed s or sweep)
    music      imaging functional plus selected peaks
    sweep      Monte-Carlo phase diagram with CSV/SVG output and slope fit
    l0         exhaustive sparsest-fit oracle on a candidate grid
    bounds     closed-form critical-separation bounds

Exit codes: 0 success, 1 argument or precondition error, 2 verification
failure (a constructed gap not below sigma), 3 degenerate analysis (all
trials share one outcome).  Flags may be preloaded from a JSON config file
via --config; explicit flags win.  All floats print with 17 significant
digits so outputs replay exactly.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import experiments, music, number_detection
from .constructions import (
    construct_clustered_adversarial,
    construct_number_adversarial,
    construct_support_adversarial,
)
from .errors import DegenerateLabels
from .measures import (
    DiscreteMeasure,
    FourierMeasurement,
    MeasurementConfig,
    add_bounded_noise,
    default_sample_count,
    fourier_forward,
)

__all__ = ["main"]


class _ArgumentError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit code 1 instead of argparse's 2
        raise _ArgumentError(message)


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _csv_floats(text: str) -> list[float]:
    return [float(part) for part in text.split(",") if part.strip()]


def _add_measurement_args(parser):
    group = parser.add_argument_group("measurement input")
    group.add_argument("--measure-json", type=Path, help="FourierMeasurement JSON file")
    group.add_argument("--supports", type=_csv_floats, help="comma-separated source locations")
    group.add_argument("--amplitudes", type=_csv_floats, help="comma-separated positive amplitudes")
    group.add_argument("--omega", type=float, default=1.0, help="cutoff frequency")
    group.add_argument("--m-samples", type=int, help="number of frequency samples (odd)")
    group.add_argument("--sigma", type=float, default=0.0, help="noise bound")
    group.add_argument("--noise-seed", type=int, help="add bounded noise with this seed")


def _load_measurement(args) -> FourierMeasurement:
    if args.measure_json is not None:
        data = json.loads(Path(args.measure_json).read_text(encoding="utf-8"))
        return FourierMeasurement.from_json_dict(data)
    if args.supports is None or args.amplitudes is None:
        raise _ArgumentError("provide --measure-json or both --supports and --amplitudes")
    measure = DiscreteMeasure(args.supports, args.amplitudes)
    m = args.m_samples if args.m_samples is not None else default_sample_count(max(measure.n, 1))
    config = MeasurementConfig(args.omega, m, args.sigma)
    meas = fourier_forward(measure, config)
    if args.noise_seed is not None:
        meas = add_bounded_noise(meas, args.sigma, args.noise_seed)
    return meas


def _cmd_construct(args) -> int:
    kwargs = dict(n=args.n, omega=args.omega, sigma=args.sigma, m_min=args.m_min)
    if args.kind == "number":
        pair = construct_number_adversarial(**kwargs)
    elif args.kind == "support":
        pair = construct_support_adversarial(**kwargs)
    else:
        pair = construct_clustered_adversarial(s=args.s, **kwargs)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"adversarial_{pair.kind}_n{args.n}.json"
    path.write_text(json.dumps(pair.to_json_dict(), indent=2) + "\n", encoding="utf-8")
    ok = pair.verified_gap < pair.sigma
    print(f"kind={pair.kind} n={args.n} tau={_fmt(pair.tau)}")
    print(f"verified_gap={_fmt(pair.verified_gap)} sigma={_fmt(pair.sigma)}")
    print(f"written={path}")
    print("PASS" if ok else "FAIL")
    return 0 if ok else 2


def _cmd_detect(args) -> int:
    meas = _load_measurement(args)
    sigma = args.threshold_sigma if args.threshold_sigma is not None else meas.config.sigma
    if args.s is not None:
        reports = [number_detection.detect_count_fixed_s(meas, args.s, sigma)]
        n_max = reports[0].estimated_n
    else:
        n_max, reports = number_detection.detect_count_sweep(meas, sigma)
    print("s  estimated_n  threshold              top singular values")
    for rep in reports:
        top = " ".join(_fmt(v) for v in rep.singular_values[:4])
        print(f"{rep.s:<3}{rep.estimated_n:<13}{_fmt(rep.threshold):<23}{top}")
    print(f"detected_count={n_max}")
    if args.out is not None:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        payload = {"detected_count": n_max, "reports": [rep.to_json_dict() for rep in reports]}
        (out / "detection.json").write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    return 0


def _cmd_music(args) -> int:
    meas = _load_measurement(args)
    if args.n is not None:
        n, mode = args.n, "known-n"
    elif args.detect_n:
        n, _ = number_detection.detect_count_sweep(meas, meas.config.sigma)
        mode = "detected-n"
        if n < 1:
            print("detected_count=0; nothing to image")
            return 0
    else:
        raise _ArgumentError("provide --n or --detect-n")
    if args.window is not None:
        if len(args.window) != 3:
            raise _ArgumentError("--window takes exactly TS,TE,TPS")
        ts, te, tps = args.window
    else:
        ts, te, tps = music.default_window(n, meas.config.omega)
    image = music.music_image(meas, n, (ts, te, tps))
    params = None
    if args.dct is not None or args.pcr is not None or args.dcr is not None:
        defaults = music.PeakSelectionParams.defaults_for(image)
        params = music.PeakSelectionParams(
            pcr=args.pcr if args.pcr is not None else defaults.pcr,
            dcr=args.dcr if args.dcr is not None else defaults.dcr,
            dct=args.dct if args.dct is not None else defaults.dct,
        )
    peaks = music.select_peaks(image, params)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    image.write_csv(out / "music_image.csv")
    payload = {"mode": mode, "n": n, "peaks": peaks.tolist()}
    (out / "music_peaks.json").write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    print(f"mode={mode} n={n}")
    print("peaks=" + " ".join(_fmt(p) for p in peaks))
    return 0


def _cmd_sweep(args) -> int:
    ranges = experiments.SamplingRanges(
        log_snr_min=args.log_snr_min,
        log_snr_max=args.log_snr_max,
        log_srf_min=args.log_srf_min,
        log_srf_max=args.log_srf_max,
    )
    diagram = experiments.run_phase_sweep(
        task=args.task,
        n=args.n,
        trials=args.trials,
        ranges=ranges,
        seed=args.seed,
        omega=args.omega,
        m_samples=args.m_samples,
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    paths = experiments.OutputPaths(csv=out / "phase.csv", svg=out / "phase.svg")
    exit_code = 0
    try:
        slope = experiments.fit_boundary_slope(diagram)
        print(f"fitted_slope={_fmt(slope)} theory_slope={diagram.theory_slope}")
    except DegenerateLabels as exc:
        print(f"slope fit skipped: {exc}", file=sys.stderr)
        exit_code = 3
    except ValueError as exc:
        print(f"slope fit skipped: {exc}", file=sys.stderr)
    experiments.emit_diagram(diagram, paths)
    successes = sum(r.success for r in diagram.records)
    manifest = {
        "task": args.task,
        "n": args.n,
        "trials": args.trials,
        "seed": args.seed,
        "omega": args.omega,
        "m_samples": args.m_samples,
        "ranges": ranges.to_json_dict(),
        "successes": successes,
        "resampled": diagram.resampled,
        "theory_slope": diagram.theory_slope,
        "fitted_boundary_slope": diagram.fitted_boundary_slope,
        "fitted_intercept": diagram.fitted_intercept,
        "outputs": {"csv": str(paths.csv), "svg": str(paths.svg)},
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    print(f"records={len(diagram.records)} successes={successes} written={out}")
    return exit_code


def _cmd_l0(args) -> int:
    meas = _load_measurement(args)
    result = experiments.l0_grid_oracle(meas, args.grid, args.n_max)
    if result is None:
        print("no feasible measure up to the requested cardinality")
        payload = None
    else:
        payload = result.to_json_dict()
        print(f"cardinality={result.n}")
        print("supports=" + " ".join(_fmt(v) for v in result.supports))
        print("amplitudes=" + " ".join(_fmt(v) for v in result.amplitudes))
    if args.out is not None:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "l0_solution.json").write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    return 0


def _cmd_bounds(args) -> int:
    bounds = music.separation_bounds(args.n, args.omega, args.sigma, args.m_min)
    payload = bounds.to_json_dict()
    if args.srf is not None:
        payload["location_error_bound"] = bounds.location_error_bound(args.srf)
        payload["srf"] = args.srf
    for key, value in payload.items():
        print(f"{key}={_fmt(value) if isinstance(value, float) else value}")
    return 0


def _build_parser() -> _Parser:
    parser = _Parser(prog="posres", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--config", type=Path, help="JSON file with default flag values")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="build and verify an adversarial pair")
    p.add_argument("--kind", choices=("number", "support", "clustered"), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--omega", type=float, default=1.0)
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--m-min", type=float, default=1.0)
    p.add_argument("--s", type=float, default=4.0, help="cluster spacing factor (clustered kind)")
    p.add_argument("--out", type=Path, default=Path("."))
    p.set_defaults(func=_cmd_construct)

    p = sub.add_parser("detect", help="singular-value-thresholding source count")
    _add_measurement_args(p)
    p.add_argument("--s", type=int, help="fixed matrix size parameter; omit to sweep")
    p.add_argument("--threshold-sigma", type=float, help="noise level for the threshold (defaults to measurement sigma)")
    p.add_argument("--out", type=Path)
    p.set_defaults(func=_cmd_detect)

    p = sub.add_parser("music", help="imaging functional and peak selection")
    _add_measurement_args(p)
    p.add_argument("--n", type=int, help="assumed source count")
    p.add_argument("--detect-n", action="store_true", help="detect the count first")
    p.add_argument("--window", type=_csv_floats, metavar="TS,TE,TPS")
    p.add_argument("--pcr", type=int)
    p.add_argument("--dcr", type=int)
    p.add_argument("--dct", type=float)
    p.add_argument("--out", type=Path, default=Path("."))
    p.set_defaults(func=_cmd_music)

    p = sub.add_parser("sweep", help="Monte-Carlo phase diagram")
    p.add_argument("--task", choices=experiments.TASKS, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--omega", type=float, default=1.0)
    p.add_argument("--m-samples", type=int)
    p.add_argument("--log-snr-min", type=float, default=0.5)
    p.add_argument("--log-snr-max", type=float, default=6.0)
    p.add_argument("--log-srf-min", type=float, default=0.1)
    p.add_argument("--log-srf-max", type=float, default=1.1)
    p.add_argument("--out", type=Path, default=Path("."))
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("l0", help="exhaustive sparsest-fit oracle")
    _add_measurement_args(p)
    p.add_argument("--grid", type=_csv_floats, required=True, help="candidate support locations")
    p.add_argument("--n-max", type=int, default=4)
    p.add_argument("--out", type=Path)
    p.set_defaults(func=_cmd_l0)

    p = sub.add_parser("bounds", help="closed-form critical-separation bounds")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--omega", type=float, default=1.0)
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--m-min", type=float, default=1.0)
    p.add_argument("--srf", type=float, help="also evaluate the location error bound at this SRF")
    p.set_defaults(func=_cmd_bounds)
    return parser


def _subcommand_parsers(parser: _Parser):
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            return list(action.choices.values())
    return []


def _apply_config(parser: _Parser, argv: list[str]) -> list[str]:
    """Preload defaults from --config JSON; explicit flags still win."""
    if "--config" not in argv:
        return argv
    idx = argv.index("--config")
    if idx + 1 >= len(argv):
        raise _ArgumentError("--config requires a file path")
    path = Path(argv[idx + 1])
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise _ArgumentError(f"cannot read config {path}: {exc}")
    if not isinstance(data, dict):
        raise _ArgumentError("config file must hold a JSON object")
    subparsers = _subcommand_parsers(parser)
    known = {action.dest for action in parser._actions}
    for p in subparsers:
        known |= {action.dest for action in p._actions}
    unknown = set(data) - known
    if unknown:
        raise _ArgumentError(f"unknown config fields: {sorted(unknown)}")
    parser.set_defaults(**data)
    for p in subparsers:
        p.set_defaults(**{k: v for k, v in data.items() if k in {a.dest for a in p._actions}})
        for action in p._actions:
            if action.dest in data:
                action.required = False
    return [a for i, a in enumerate(argv) if i not in (idx, idx + 1)]


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    parser = _build_parser()
    try:
        argv = _apply_config(parser, argv)
        args = parser.parse_args(argv)
        return args.func(args)
    except _ArgumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
