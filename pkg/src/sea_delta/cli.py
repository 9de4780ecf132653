"""Command-line front end: ``sea-delta run|compare|validate CONFIG``."""

import argparse
import csv
import io
import sys
from dataclasses import replace
from pathlib import Path

from .config import MODES, check_config, load_config
from .errors import ConfigError, SeaDeltaError, SimulationError
from .simulator import TRACE_COLUMNS, run_scenario, trace_rows

EXIT_CONFIG = 2
EXIT_SIMULATION = 3
EXIT_IO = 4


def format_metrics(metrics) -> str:
    lines = []
    for key, value in metrics.items():
        if isinstance(value, bool):
            value = "true" if value else "false"
        elif isinstance(value, float):
            value = repr(value)
        lines.append(f"{key}={value}")
    return "\n".join(lines) + "\n"


def format_trace(trace) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TRACE_COLUMNS)
    w.writerows(trace_rows(trace))
    return buf.getvalue()


def _load(args):
    cfg = load_config(args.config)
    if args.seed is not None:
        if args.seed < 0 or args.seed >= 1 << 64:
            raise ConfigError("--seed", "must be an unsigned 64-bit integer")
        cfg = replace(cfg, sim=replace(cfg.sim, seed=args.seed))
    check_config(cfg)
    return cfg


def _out_dir(args, cfg):
    return Path(args.out if args.out is not None else cfg.output.dir)


def _write(files):
    """Write ``{path: str | callable}``; everything is computed before this is called."""
    for path, content in files.items():
        path.parent.mkdir(parents=True, exist_ok=True)
        if callable(content):
            content(path)
        else:
            path.write_text(content)


def _suffixed(name, tag):
    p = Path(name)
    return f"{p.stem}_{tag}{p.suffix}"


def cmd_run(args):
    cfg = _load(args)
    mode = args.mode or cfg.mode
    result = run_scenario(cfg.scenario(mode))
    out = _out_dir(args, cfg)
    files = {
        out / cfg.output.trace: format_trace(result.trace),
        out / cfg.output.metrics: format_metrics(result.metrics),
    }
    if cfg.output.figure and not args.no_figures:
        from .plotting import plot_run
        files[out / cfg.output.figure] = lambda p: plot_run(result.trace, p, f"{cfg.name} ({mode})")
    _write(files)
    if not args.quiet:
        print(format_metrics(result.metrics), end="")
    return 0


def compare_summary(name, pos_metrics, hyb_metrics):
    e_pos = pos_metrics.get("steady_force_error_N", float("nan"))
    e_hyb = hyb_metrics.get("steady_force_error_N", float("nan"))
    summary = {
        "scenario": name,
        "f_z_ref_N": hyb_metrics["f_z_ref_N"],
        "steady_force_error_position_N": e_pos,
        "steady_force_error_hybrid_N": e_hyb,
        "error_ratio_position_over_hybrid": e_pos / e_hyb if e_hyb > 0 else float("inf"),
        "hybrid_better": e_hyb < e_pos,
    }
    if "trigger_tick" in hyb_metrics:
        summary["hybrid_trigger_tick"] = hyb_metrics["trigger_tick"]
        summary["hybrid_trigger_time_s"] = hyb_metrics["trigger_time_s"]
    if "settle_time_s" in hyb_metrics:
        summary["hybrid_settle_time_s"] = hyb_metrics["settle_time_s"]
    return summary


def cmd_compare(args):
    cfg = _load(args)
    results = {mode: run_scenario(cfg.scenario(mode)) for mode in ("position", "hybrid")}
    out = _out_dir(args, cfg)
    files = {}
    for mode, res in results.items():
        files[out / _suffixed(cfg.output.trace, mode)] = format_trace(res.trace)
        files[out / _suffixed(cfg.output.metrics, mode)] = format_metrics(res.metrics)
    summary = compare_summary(cfg.name, results["position"].metrics, results["hybrid"].metrics)
    files[out / "compare.txt"] = format_metrics(summary)
    if cfg.output.figure and not args.no_figures:
        from .plotting import plot_compare
        files[out / _suffixed(cfg.output.figure, "compare")] = lambda p: plot_compare(
            results["position"].trace, results["hybrid"].trace, p, cfg.name)
    _write(files)
    if not args.quiet:
        print(format_metrics(summary), end="")
    return 0


def cmd_validate(args):
    cfg = _load(args)
    if not args.quiet:
        n = len(cfg.samples(check=False))
        print(f"{args.config}: ok ({n} samples, mode {cfg.mode})")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="sea-delta",
        description="Simulate the SEA delta massage robot from a TOML scenario file.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("config", help="scenario TOML file")
        p.add_argument("--seed", type=int, default=None, help="override sim.seed")
        p.add_argument("--quiet", action="store_true", help="suppress the stdout summary")

    p_run = sub.add_parser("run", help="simulate one scenario")
    common(p_run)
    p_run.add_argument("--out", help="output directory (default: output.dir)")
    p_run.add_argument("--mode", choices=MODES, help="override control.mode")
    p_run.add_argument("--no-figures", action="store_true", help="skip the PNG figure")
    p_run.set_defaults(func=cmd_run)

    p_cmp = sub.add_parser("compare", help="run position-only and hybrid back to back")
    common(p_cmp)
    p_cmp.add_argument("--out", help="output directory (default: output.dir)")
    p_cmp.add_argument("--no-figures", action="store_true", help="skip the PNG figure")
    p_cmp.set_defaults(func=cmd_compare)

    p_val = sub.add_parser("validate", help="check schema and reachability without simulating")
    common(p_val)
    p_val.set_defaults(func=cmd_validate)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"sea-delta: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SimulationError as exc:
        print(f"sea-delta: simulation failed at {exc}", file=sys.stderr)
        return EXIT_SIMULATION
    except SeaDeltaError as exc:
        print(f"sea-delta: error: {exc}", file=sys.stderr)
        return EXIT_SIMULATION
    except OSError as exc:
        print(f"sea-delta: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
