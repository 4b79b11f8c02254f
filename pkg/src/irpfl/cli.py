"""Command line front end: ``irpfl generate|solve|oracle|certify|gadget|bench``."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

from . import instance as inst_mod
from .harness import ExperimentConfig, bench, certify, summarize
from .instance import (GeneratorParams, IapGeneratorParams, IapInstance, InstanceError, ParseError,
                       Variant, generate_random, generate_random_iap, make_partition_gadget)
from .lp import build_csiap_lp, build_cssirpfl_lp, build_usirpfl_lp, export_lp
from .oracle import OracleTooLarge, exact_iap, exact_sirpfl
from .rounding import RoundingError, solve_detailed
from .schedule import schedule_to_csv, schedule_to_json

EXIT_INPUT, EXIT_BOUND, EXIT_GATE = 1, 2, 3


def _write(text: str, path: str | None) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _with_variant(instance, variant: str | None):
    if variant is None:
        return instance
    v = Variant(variant)
    if v.capacitated and instance.capacity is None:
        raise InstanceError([f"variant {v.value} needs a capacity"])
    return replace(instance, variant=v, capacity=instance.capacity if v.capacitated else None)


def cmd_generate(a) -> int:
    variant = Variant(a.variant)
    if a.iap:
        x = generate_random_iap(IapGeneratorParams(
            T=a.T, demand_density=a.density, capacity=a.capacity, variant=variant,
            items_per_day=a.items_per_day), a.seed)
    else:
        x = generate_random(GeneratorParams(
            n=a.n, T=a.T, demand_density=a.density, capacity=a.capacity, variant=variant,
            max_demands=a.max_demands), a.seed)
    _write(inst_mod.serialize(x), a.out)
    return 0


def cmd_gadget(a) -> int:
    _write(inst_mod.serialize(make_partition_gadget(a.items, a.w)), a.out)
    return 0


def cmd_solve(a) -> int:
    x = _with_variant(inst_mod.load(a.instance), a.variant)
    if a.lp_export:
        if isinstance(x, IapInstance):
            model = build_csiap_lp(x) if x.variant.capacitated else None
        elif x.variant is Variant.UNCAP:
            model = build_usirpfl_lp(x)
        else:
            model = build_cssirpfl_lp(x)
        if model is None:
            print("no LP for the uncapacitated access problem; solved by DP", file=sys.stderr)
        else:
            _write(export_lp(model), a.lp_export)
    sol = solve_detailed(x)
    _write(schedule_to_json(sol.schedule), a.out)
    if a.csv:
        _write(schedule_to_csv(sol.schedule), a.csv)
    lp = f", LP {sol.lp.objective}" if sol.lp is not None else ""
    print(f"cost {sol.schedule.total}{lp} [{sol.method}]", file=sys.stderr)
    return 0


def cmd_oracle(a) -> int:
    x = inst_mod.load(a.instance)
    res = exact_iap(x) if isinstance(x, IapInstance) else exact_sirpfl(x)
    print(f"optimum {res.optimum} ({res.method.value})")
    if a.out:
        _write(schedule_to_json(res.witness), a.out)
    return 0


def cmd_certify(a) -> int:
    cfg = ExperimentConfig.load(a.config)
    if a.out:
        cfg.output = a.out
    report = certify(cfg, workers=a.workers)
    if not cfg.output:
        sys.stdout.write(report.to_csv())
    print(summarize(report), file=sys.stderr)
    for line in report.failures():
        print(line, file=sys.stderr)
    return 0 if report.passed else EXIT_BOUND


def cmd_bench(a) -> int:
    cfg = ExperimentConfig.load(a.config)
    _write(bench(cfg, workers=a.workers), a.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="irpfl", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a seeded random instance")
    g.add_argument("--n", type=int, default=4)
    g.add_argument("--T", type=int, default=3)
    g.add_argument("--density", type=float, default=0.5)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--variant", default="UNCAP", choices=[v.value for v in Variant])
    g.add_argument("--capacity", type=int)
    g.add_argument("--max-demands", type=int)
    g.add_argument("--iap", action="store_true", help="single depot, single client instance")
    g.add_argument("--items-per-day", type=int, default=1)
    g.add_argument("--out")
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("solve", help="round the LP relaxation of an instance")
    s.add_argument("instance")
    s.add_argument("--variant", choices=[v.value for v in Variant])
    s.add_argument("--lp-export", metavar="PATH", help="also write the LP (approximate MPS)")
    s.add_argument("--csv", metavar="PATH", help="also write one row per trip")
    s.add_argument("--out")
    s.set_defaults(func=cmd_solve)

    o = sub.add_parser("oracle", help="exact optimum by enumeration")
    o.add_argument("instance")
    o.add_argument("--out", help="write the optimal schedule")
    o.set_defaults(func=cmd_oracle)

    c = sub.add_parser("certify", help="run a ratio certification config")
    c.add_argument("config")
    c.add_argument("--out")
    c.add_argument("--workers", type=int)
    c.set_defaults(func=cmd_certify)

    gd = sub.add_parser("gadget", help="partition gadget instance from integers")
    gd.add_argument("items", type=int, nargs="+")
    gd.add_argument("--w", default="1")
    gd.add_argument("--out")
    gd.set_defaults(func=cmd_gadget)

    b = sub.add_parser("bench", help="timing table for a config")
    b.add_argument("config")
    b.add_argument("--out")
    b.add_argument("--workers", type=int, default=1)
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except OracleTooLarge as e:
        print(str(e), file=sys.stderr)
        return EXIT_GATE
    except (ParseError, InstanceError, ValueError, OSError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except RoundingError as e:
        print(f"bound violation: {e}", file=sys.stderr)
        return EXIT_BOUND


if __name__ == "__main__":
    sys.exit(main())
