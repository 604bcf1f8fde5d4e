"""Command-line interface.

Subcommands mirror the experiment kinds; each accepts --config <json> plus
flag overrides (--seed and --trials always win over the config file).  On
success the manifest path is printed.  Exit codes: 0 success, 2 bad usage
or config, 3 numeric failure during a trial.
"""

import argparse
import json
import sys

from .experiments import ConfigError, parse_config, run
from .gaussian import EntropyError
from .numerics import NumericsError
from .sampler import CircuitError

_GEOM_KINDS = ("brickwall", "octahedral", "brickworkD")


def _add_common(sub):
    sub.add_argument("--config", help="JSON config file")
    sub.add_argument("--seed", type=int, help="root RNG seed (overrides config)")
    sub.add_argument("--trials", type=int, help="trial count (overrides config)")
    sub.add_argument("--out", default="runs", help="output root directory")
    sub.add_argument("--threads", type=int,
                     help="worker threads (default: LINOPT_THREADS or 1)")


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="linopt",
        description="Random passive linear-optical circuit experiments")
    subs = parser.add_subparsers(dest="kind", required=True)

    sweep = subs.add_parser("entropy-sweep", help="Renyi-2 growth vs depth")
    sweep.add_argument("--n", type=int)
    sweep.add_argument("--k", type=int, help="subsystem = first k modes")
    sweep.add_argument("--s", type=float)
    sweep.add_argument("--depths", help="comma list or lo:hi[:step]")
    sweep.add_argument("--per-trial", action="store_true")
    sweep.add_argument("--full", action="store_true",
                       help="use 5000 trials instead of the CI default 200")

    heat = subs.add_parser("uut-heatmap", help="mean |UU^T| effective band")
    heat.add_argument("--n", type=int)
    heat.add_argument("--depth", type=int)

    walk = subs.add_parser("walk-check", help="boson random-walk identity")
    walk.add_argument("--n", type=int)
    walk.add_argument("--depth", type=int)
    walk.add_argument("--geometry", choices=_GEOM_KINDS)

    mix = subs.add_parser("mixing", help="total-variation mixing time")
    mix.add_argument("--n", type=int)
    mix.add_argument("--geometry", choices=_GEOM_KINDS)
    mix.add_argument("--epsilon", type=float)
    mix.add_argument("--t-max", type=int, dest="t_max")

    meet = subs.add_parser("meeting", help="pair pi-meeting tails")
    meet.add_argument("--n", type=int)
    meet.add_argument("--geometry", choices=_GEOM_KINDS)
    meet.add_argument("--epsilon", type=float)
    meet.add_argument("--t-max", type=int, dest="t_max")
    meet.add_argument("--method", choices=("exact", "mc"))

    dec = subs.add_parser("decouple", help="fourth-moment decoupling floor")
    dec.add_argument("--n", type=int)
    dec.add_argument("--depth", type=int)

    comp = subs.add_parser("compress-sweep", aliases=["compress"],
                           help="banded compression error/gate-count sweep")
    comp.add_argument("--n", type=int)
    comp.add_argument("--depth", type=int)
    comp.add_argument("--kappa", type=float)
    comp.add_argument("--c-band", type=float, action="append", dest="c_bands")
    comp.add_argument("--seeds", type=int, dest="n_seeds")

    bounds = subs.add_parser("bounds-audit", help="entropy bound audit")
    bounds.add_argument("--n", type=int, help="max mode count")
    bounds.add_argument("--samples", type=int)
    bounds.add_argument("--d-max", type=int, dest="d_max")
    bounds.add_argument("--s-max", type=float, dest="s_max")

    seen = set()
    for sub in subs.choices.values():
        if id(sub) not in seen:
            seen.add(id(sub))
            _add_common(sub)
    return parser


def _parse_depths(text):
    if ":" in text:
        parts = [int(p) for p in text.split(":")]
        lo, hi = parts[0], parts[1]
        step = parts[2] if len(parts) > 2 else 1
        return list(range(lo, hi + 1, step))
    return [int(p) for p in text.split(",")]


def _resolve_config(args) -> dict:
    cfg = {}
    if args.config:
        try:
            with open(args.config) as fh:
                cfg = json.load(fh)
        except FileNotFoundError:
            raise ConfigError(f"config: file not found: {args.config}")
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config: invalid JSON: {exc}")
    kind = "compress-sweep" if args.kind == "compress" else args.kind
    if cfg.get("kind") not in (None, kind):
        raise ConfigError(
            f"kind: config says {cfg.get('kind')!r} but subcommand is {kind!r}")
    cfg["kind"] = kind

    for name in ("n", "k", "s", "epsilon", "t_max", "kappa", "n_seeds",
                 "samples", "d_max", "s_max", "method", "seed", "trials"):
        value = getattr(args, name, None)
        if value is not None:
            cfg[name] = value
    if getattr(args, "depth", None) is not None:
        cfg["depth"] = args.depth
    if getattr(args, "depths", None):
        cfg["depths"] = _parse_depths(args.depths)
    if getattr(args, "c_bands", None):
        cfg["c_bands"] = args.c_bands
    if getattr(args, "geometry", None):
        geom = {"kind": args.geometry}
        if args.geometry != "octahedral":
            geom["n"] = cfg.get("n")
        cfg["geometry"] = geom
    if getattr(args, "per_trial", False):
        cfg["per_trial"] = True
    if getattr(args, "full", False):
        cfg["trials"] = 5000
    elif kind == "entropy-sweep" and "trials" not in cfg:
        cfg["trials"] = 200
    return cfg


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = parse_config(_resolve_config(args))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        record = run(cfg, out_root=args.out, threads=args.threads)
    except (CircuitError, EntropyError, NumericsError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3
    for key, value in record.aggregates.items():
        print(f"{key}: {value}")
    print(record.manifest_path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
