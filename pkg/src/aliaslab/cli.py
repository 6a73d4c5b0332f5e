"""Command line harness.

Subcommands:
    psi-table   tabulate Psi(a*h'; a, r) over h' in [0, 1]
    crt-demo    full-angle line-family experiment (global + ROI + profile)
    grt-demo    limited-angle circle-family experiment
    verify      run acceptance criteria; exit 0 iff all selected pass

Output directory precedence: --out, then outputs.directory from the
config, then $ALIASLAB_OUT, then ./aliaslab-out.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from .experiment_config import ConfigError, ExperimentConfig, load_config_file
from .outputs import write_psi_table_csv
from .pipeline import run_experiment, write_artifacts
from .special_functions import big_psi

__all__ = ["main", "crt_preset", "grt_preset", "ENV_OUT"]

ENV_OUT = "ALIASLAB_OUT"
_FALLBACK_OUT = "aliaslab-out"


def crt_preset() -> ExperimentConfig:
    """Full-angle line-family run: unit disk jump of radius 5 at the
    origin, probe through x0 = (5, 7)."""
    return ExperimentConfig(
        family="line",
        phantom_center=(0.0, 0.0),
        phantom_radius=5.0,
        epsilon=0.02,
        n_views=200,
        shift=0.03,
        probe_x0=(5.0, 7.0),
        theta_mode="radial",
        h_max=11.0,
        h_step=0.25,
        artifacts=("profile", "report", "roi-image", "global-image"),
    )


def grt_preset() -> ExperimentConfig:
    """Limited-angle circle-family run: vertices on |x| = 5, disk of
    radius 2 at (1, 1), quarter-circle window around the tangent view."""
    alpha_star = 0.53 * math.pi
    return ExperimentConfig(
        family="circle",
        acquisition_radius=5.0,
        phantom_center=(1.0, 1.0),
        phantom_radius=2.0,
        epsilon=0.01,
        n_views=500,
        shift=0.0,
        window=(alpha_star - math.pi / 4.0, alpha_star + math.pi / 4.0),
        probe_x0=(-1.42, 2.95),
        theta_mode="minus-u0",
        h_max=6.0,
        h_step=0.25,
        artifacts=("profile", "report", "roi-image", "global-image"),
    )


def _resolve_out(cli_out, config: ExperimentConfig | None) -> str:
    if cli_out:
        return cli_out
    if config is not None and config.out_dir:
        return config.out_dir
    return os.environ.get(ENV_OUT) or _FALLBACK_OUT


def _load_demo_config(args, preset, expected_family: str) -> ExperimentConfig:
    config = load_config_file(args.config) if args.config else preset()
    if config.family != expected_family:
        raise ConfigError(
            f"family: this subcommand needs family = {expected_family}, got {config.family}"
        )
    if args.eta is not None:
        config = config.with_overrides(eta=args.eta)
    return config


def _cmd_demo(args, preset, expected_family: str) -> int:
    config = _load_demo_config(args, preset, expected_family)
    result = run_experiment(config, threads=args.threads)
    out_dir = _resolve_out(args.out, config)
    written = write_artifacts(result, out_dir)
    m = result.metrics
    print(f"descriptors: {len(result.descriptors)}")
    print(f"sup mismatch: {m.sup_mismatch:.6g}")
    print(f"prediction peak-to-peak: {m.peak_to_peak:.6g}")
    print(f"relative mismatch: {m.relative_mismatch:.6g}")
    for name in config.artifacts:
        print(f"wrote {written[name]}")
    return 0


def _cmd_crt_demo(args) -> int:
    return _cmd_demo(args, crt_preset, "line")


def _cmd_grt_demo(args) -> int:
    return _cmd_demo(args, grt_preset, "circle")


def _cmd_psi_table(args) -> int:
    a_values = args.a if args.a else [1.0, 2.0, 4.0]
    h_prime = np.linspace(0.0, 1.0, args.samples)
    rows = [(h, a, big_psi(a * h, a, args.r)) for a in a_values for h in h_prime]
    out_dir = _resolve_out(args.out, None)
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, "psi_table.csv")
    write_psi_table_csv(path, rows)
    print(f"wrote {path}")
    return 0


def _cmd_verify(args) -> int:
    from . import acceptance

    numbers = acceptance.select(args.suite)
    results = acceptance.run_criteria(numbers, threads=args.threads)
    text = acceptance.format_report(results)
    print(text, end="")
    out_dir = _resolve_out(args.out, None)
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, "verify_report.txt")
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)
    print(f"wrote {path}")
    return 0 if all(r.passed for r in results) else 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aliaslab",
        description="Tomographic view-aliasing laboratory: reconstruct disk "
        "phantoms from angularly discretized data and compare the artifact "
        "against its closed-form prediction.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_psi = sub.add_parser("psi-table", help="tabulate the aliasing profile function")
    p_psi.add_argument("--a", action="append", type=float, help="rate parameter; repeatable (default 1 2 4)")
    p_psi.add_argument("--r", type=float, default=1.0 / 3.0, help="grid offset (default 1/3)")
    p_psi.add_argument("--samples", type=int, default=201, help="h' samples on [0, 1]")
    p_psi.add_argument("--out", help="output directory")
    p_psi.set_defaults(func=_cmd_psi_table)

    for name, handler, blurb in (
        ("crt-demo", _cmd_crt_demo, "full-angle line-family experiment"),
        ("grt-demo", _cmd_grt_demo, "limited-angle circle-family experiment"),
    ):
        p = sub.add_parser(name, help=blurb)
        p.add_argument("--config", help="experiment config file (default: built-in preset)")
        p.add_argument("--out", help="output directory")
        p.add_argument("--threads", type=int, default=1, help="worker threads")
        p.add_argument("--eta", type=int, help="override filtering oversampling factor")
        p.set_defaults(func=handler)

    p_ver = sub.add_parser("verify", help="run acceptance criteria")
    p_ver.add_argument("suite", nargs="?", default="all", help="criterion slug or suite name (default all)")
    p_ver.add_argument("--out", help="output directory")
    p_ver.add_argument("--threads", type=int, default=1, help="worker threads")
    p_ver.set_defaults(func=_cmd_verify)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
