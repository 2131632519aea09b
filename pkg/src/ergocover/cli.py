"""Command-line entry point.

Exit codes: 0 success, 2 configuration error, 3 estimator divergence, 4 IO error.
"""
from __future__ import annotations

import argparse
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .config import parse_config, resolve
from .errors import ConfigError
from .harness import compare, run
from .outputs import OutputError, write_comparison, write_outputs

EXIT_OK, EXIT_CONFIG, EXIT_DIVERGED, EXIT_IO = 0, 2, 3, 4

log = logging.getLogger("ergocover")


def _load(path, seed=None, out=None):
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {p}")
    cfg = parse_config(p)
    if seed is not None:
        cfg = cfg.replace("run.seed", seed)
    if out is not None:
        cfg = cfg.replace("run.output_dir", str(out))
    return resolve(cfg)


def cmd_run(args) -> int:
    cfg = _load(args.config, args.seed, args.out)
    record = run(cfg)
    out = Path(cfg.run.output_dir)
    write_outputs(record, out, images=args.images)
    print(f"wrote {out} (final normalized RMSE {record.final_rmse:.6g})")
    if record.aborted:
        print(f"run aborted: {record.aborted}", file=sys.stderr)
        return EXIT_DIVERGED
    return EXIT_OK


def cmd_compare(args) -> int:
    cfg_a, cfg_b = _load(args.config_a), _load(args.config_b)
    cmp = compare(cfg_a, cfg_b)
    write_comparison(cmp, args.out, images=args.images)
    print(
        f"wrote {args.out}: final ratio {cmp.final_ratio:.4g}, "
        f"final-quarter fraction {cmp.final_quarter_fraction:.3g}"
    )
    if cmp.a.aborted or cmp.b.aborted:
        print(f"run aborted: {cmp.a.aborted or cmp.b.aborted}", file=sys.stderr)
        return EXIT_DIVERGED
    return EXIT_OK


def _sweep_one(job):
    cfg, out, images = job
    record = run(cfg)
    write_outputs(record, out, images=images)
    return out, record.final_rmse, record.aborted


def cmd_sweep(args) -> int:
    base = _load(args.config, args.seed)
    root = Path(args.out or base.run.output_dir)
    values = [v.strip() for v in args.values.split(",") if v.strip()]
    if not values:
        raise ConfigError("--values: give at least one value")
    jobs = []
    for v in values:
        cfg = resolve(base.replace(args.param, v))
        safe = v.replace(" ", "_").replace("/", "_")
        jobs.append((cfg, root / f"{args.param}={safe}", args.images))
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            results = list(pool.map(_sweep_one, jobs))
    else:
        results = [_sweep_one(j) for j in jobs]
    code = EXIT_OK
    for out, rmse, aborted in results:
        print(f"{out}: final normalized RMSE {rmse:.6g}" + (" (aborted)" if aborted else ""))
        if aborted:
            code = EXIT_DIVERGED
    return code


def cmd_validate(args) -> int:
    cfg = _load(args.config)
    print(f"{args.config}: ok ({cfg.field.variant}, {cfg.controller.mode}, t_sim {cfg.run.t_sim:g} s)")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ergocover", description="Adaptive ergodic coverage simulator")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="simulate one scenario")
    r.add_argument("--config", required=True)
    r.add_argument("--seed", type=int)
    r.add_argument("--out")
    r.add_argument("--images", action="store_true")
    r.set_defaults(func=cmd_run)

    c = sub.add_parser("compare", help="run two scenarios and pair their RMSE series")
    c.add_argument("--config-a", required=True)
    c.add_argument("--config-b", required=True)
    c.add_argument("--out", required=True)
    c.add_argument("--images", action="store_true")
    c.set_defaults(func=cmd_compare)

    s = sub.add_parser("sweep", help="repeat a scenario over values of one key")
    s.add_argument("--config", required=True)
    s.add_argument("--param", required=True, help="section.key, e.g. estimator.alpha")
    s.add_argument("--values", required=True, help="comma-separated values")
    s.add_argument("--seed", type=int)
    s.add_argument("--out")
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--images", action="store_true")
    s.set_defaults(func=cmd_sweep)

    v = sub.add_parser("validate-config", help="parse and check a config file")
    v.add_argument("--config", required=True)
    v.set_defaults(func=cmd_validate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OutputError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
