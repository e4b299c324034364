"""Command-line interface: seeded, file-emitting runs of the density
benchmark and both dynamical-system experiments, plus band extraction for
external plotting.

Commands
--------
bench-gaussian   tri-modal density regression across input dimensions
sysid            forced second-order system identification
timeseries       Van der Pol one-step model with closed-loop rollout
plot-data        (time, truth, mean, lower, upper) bands from a finished run

Parameter precedence is: built-in defaults, then a --config JSON file, then
explicit command-line flags. Every run directory receives a
resolved_config.json that reproduces the run byte-for-byte when passed back
through --config.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import bench

# the hidden identity activation stays off the CLI
_CLI_ACTIVATIONS = ("tanh", "relu", "sigmoid", "cos")


def _parse_dims(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"dims must be comma-separated integers, got {text!r}")


def _parse_lengthscale(text: str):
    if text == "median":
        return text
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"lengthscale must be 'median' or a positive number, got {text!r}")
    return value


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                   help="master seed for all sampled quantities (default 0)")
    p.add_argument("--out", type=Path, default=None, metavar="DIR",
                   help="output directory (default runs/<command>)")
    p.add_argument("--config", type=Path, default=None, metavar="FILE.json",
                   help="JSON config; explicit flags override its fields")
    p.add_argument("--jobs", type=int, default=argparse.SUPPRESS, metavar="N",
                   help="parallel worker processes where applicable (default 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bwl",
        description="Laguerre-filtered random-feature models: benchmarks "
                    "and experiments with seeded, reproducible artifacts.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bench-gaussian",
                       help="density regression benchmark over dimensions")
    _add_common(p)
    p.add_argument("--dims", type=_parse_dims, default=argparse.SUPPRESS,
                   help="comma-separated input dimensions (default 1,2,3,4,5)")
    p.add_argument("--samples", type=int, default=argparse.SUPPRESS,
                   help="training/test sample count per run (default 2000)")
    p.add_argument("--features", type=int, default=argparse.SUPPRESS,
                   help="feature count K (default 1500)")
    p.add_argument("--repeats", type=int, default=argparse.SUPPRESS,
                   help="seeded repetitions per cell (default 20)")
    p.add_argument("--fit", choices=("ls", "bayes", "both"),
                   default=argparse.SUPPRESS,
                   help="output-weight estimator(s) to run (default both)")

    p = sub.add_parser("sysid",
                       help="forced second-order system identification")
    _add_common(p)
    p.add_argument("--order", type=int, default=argparse.SUPPRESS,
                   help="Laguerre order p (default 15)")
    p.add_argument("--lambda", dest="lam", type=float,
                   default=argparse.SUPPRESS,
                   help="forgetting factor (default 30.0)")
    p.add_argument("--features", type=int, default=argparse.SUPPRESS,
                   help="cosine feature count K (default 1000)")
    p.add_argument("--noise-std", type=float, default=argparse.SUPPRESS,
                   help="observation noise std (default 0.02)")
    p.add_argument("--reg-sigma", type=float, default=argparse.SUPPRESS,
                   help="regression noise level sigma (default 0.08)")
    p.add_argument("--alpha", type=float, default=argparse.SUPPRESS,
                   help="prior precision on output weights (default 1.0)")
    p.add_argument("--lengthscale", type=_parse_lengthscale,
                   default=argparse.SUPPRESS,
                   help="kernel lengthscale or 'median' (default median)")

    p = sub.add_parser("timeseries",
                       help="Van der Pol one-step model and rollout")
    _add_common(p)
    p.add_argument("--order", type=int, default=argparse.SUPPRESS,
                   help="Laguerre order per channel (default 50)")
    p.add_argument("--lambda", dest="lam", type=float,
                   default=argparse.SUPPRESS,
                   help="forgetting factor (default 3.0)")
    p.add_argument("--neurons", type=int, default=argparse.SUPPRESS,
                   help="hidden layer width K (default 2000)")
    p.add_argument("--noise-std", type=float, default=argparse.SUPPRESS,
                   help="observation noise std, both channels (default 0.1)")
    p.add_argument("--reg-sigma", type=float, default=argparse.SUPPRESS,
                   help="regression noise level sigma (default 0.5)")
    p.add_argument("--alpha", type=float, default=argparse.SUPPRESS,
                   help="prior precision on output weights (default 1.0)")
    p.add_argument("--mu", type=float, default=argparse.SUPPRESS,
                   help="Van der Pol damping parameter (default 2.0)")
    p.add_argument("--shift", type=int, default=argparse.SUPPRESS,
                   help="steps ahead k for the regression target (default 1)")
    p.add_argument("--activation", choices=_CLI_ACTIVATIONS,
                   default=argparse.SUPPRESS,
                   help="hidden-layer activation (default tanh)")
    p.add_argument("--order-mode", choices=("per-channel", "split"),
                   default=argparse.SUPPRESS,
                   help="apply --order to each channel, or split it across "
                        "channels (default per-channel)")

    p = sub.add_parser("plot-data",
                       help="emit prediction bands from a finished run")
    p.add_argument("run_dir", type=Path,
                   help="directory containing report.json")
    p.add_argument("--table", default="samples",
                   help="which per-sample table to band (default samples)")
    p.add_argument("--variance", choices=("latent", "total"), default="total",
                   help="band width source: latent or latent+noise "
                        "(default total)")
    p.add_argument("--out", type=Path, default=None, metavar="DIR",
                   help="output directory (default: the run directory)")
    return parser


_RUNNERS = {
    "bench-gaussian": (bench.GaussianBenchConfig, bench.run_gaussian_bench),
    "sysid": (bench.SysIdConfig, bench.run_sysid),
    "timeseries": (bench.TimeSeriesConfig, bench.run_timeseries),
}


def _build_config(command: str, args: argparse.Namespace):
    cls, runner = _RUNNERS[command]
    merged = {}
    if args.config is not None:
        with open(args.config) as fh:
            merged.update(json.load(fh))
    for key, value in vars(args).items():
        if key in ("command", "out", "config"):
            continue
        if isinstance(value, list):
            value = tuple(value)
        merged[key] = value
    return bench._config_from_dict(cls, merged, command), runner


def _print_summary(command: str, report: dict) -> None:
    if command == "bench-gaussian":
        for row in report["results"]:
            print(f"d={row['dim']} {row['method']:<3} {row['fit']:<5} "
                  f"mse={row['mse_mean']:.3e} (+/-{row['mse_std']:.1e})  "
                  f"nmse={row['nmse_mean']:.3e}  "
                  f"published={row['published_mean']:.3e}")
    elif command == "sysid":
        m = report["metrics"]["test"]
        print(f"test rmse={m['rmse']:.5f} (published "
              f"{report['published']['rmse']})")
        print(f"test mean latent variance={m['mean_latent_variance']:.5f} "
              f"(published {report['published']['mean_latent_variance']})")
    elif command == "timeseries":
        open_m = report["metrics"]["open_loop"]["test_both"]
        print(f"open-loop test rmse={open_m['rmse']:.5f}")
        if "closed_loop" in report["metrics"]:
            closed = report["metrics"]["closed_loop"]
            roll = report["rollout"]
            print(f"closed-loop test rmse={closed['test_both']['rmse']:.5f} "
                  f"(published {report['published']['rmse']})")
            print(f"rollout max |ch0|={roll['max_abs_ch0']:.3f}, "
                  f"max |ch1|={roll['max_abs_ch1']:.3f}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "plot-data":
            path = bench.run_plot_data(args.run_dir, table=args.table,
                                       variance=args.variance,
                                       out_dir=args.out)
            print(f"wrote {path}")
            return 0
        cfg, runner = _build_config(args.command, args)
        out_dir = args.out if args.out is not None else \
            Path("runs") / args.command
        report = runner(cfg, out_dir)
        _print_summary(args.command, report)
        print(f"artifacts in {out_dir}")
        return 0
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
