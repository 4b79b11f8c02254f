"""Ratio certification runs over seeded random instances."""

from __future__ import annotations

import csv
import io
import json
import os
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Sequence

from .instance import (GeneratorParams, IapGeneratorParams, IapInstance, Instance, Variant,
                       generate_random, generate_random_iap, validate)
from .lp import build_csiap_lp, build_cssirpfl_lp, build_usirpfl_lp, solve_lp
from .oracle import MAX_IAP_DAYS, MAX_SIRPFL, OracleTooLarge, exact_iap, exact_sirpfl, visit_enum_iap
from .rounding import QUARTER, RoundingError, Solution, solve_detailed
from .schedule import check_schedule

WORKERS_ENV = "IRPFL_WORKERS"

# proven factors: (holding, routing, facility, total)
BOUNDS = {
    ("sirpfl", Variant.UNCAP): (2, 12, 4, 12),
    ("sirpfl", Variant.CAP_SPLIT): (2, 24, 4, 24),
    ("sirpfl", Variant.CAP_UNSPLIT): (2, 48, 4, 48),
    ("iap", Variant.CAP_SPLIT): (2, 3, 0, 3),
    ("iap", Variant.CAP_UNSPLIT): (2, 6, 0, 6),
    ("iap", Variant.UNCAP): (1, 1, 1, 1),
}

CSV_COLUMNS = [
    "seed", "variant", "n", "T", "num_demands", "lp_obj", "f_lp", "r_lp", "h_lp",
    "rounded_total", "f_used_factor", "r_used_factor", "h_used_factor", "oracle_opt",
    "ratio_vs_lp", "ratio_vs_opt", "pass",
]


@dataclass
class ExperimentConfig:
    variant: Variant = Variant.UNCAP
    problem: str = "sirpfl"             # "sirpfl" or "iap"
    seeds: list[int] = field(default_factory=list)
    n_range: tuple[int, int] = (2, 5)
    T_range: tuple[int, int] = (1, 4)
    density: float = 0.5
    capacity: int | None = None
    demand_range: tuple[int, int] = (1, 5)
    weight_range: tuple[int, int] = (0, 10)
    facility_range: tuple[int, int] = (0, 20)
    holding_slope_range: tuple[int, int] = (0, 4)
    max_demands: int | None = 8
    items_per_day: int = 1
    oracle: bool = True
    output: str | None = None

    def __post_init__(self):
        self.variant = Variant(self.variant)
        self.seeds = sequence_of_seeds(self.seeds)
        self.n_range = tuple(self.n_range)
        self.T_range = tuple(self.T_range)
        if self.problem not in ("sirpfl", "iap"):
            raise ValueError(f"unknown problem {self.problem!r}")
        if self.variant.capacitated and self.capacity is None:
            raise ValueError("capacitated runs need a capacity")
        if self.oracle:
            if self.problem == "sirpfl":
                if (self.n_range[1] > MAX_SIRPFL["n"] or self.T_range[1] > MAX_SIRPFL["T"]
                        or self.max_demands is None or self.max_demands > MAX_SIRPFL["demands"]):
                    raise ValueError("instance ranges exceed the oracle gates")
            elif self.variant.capacitated and self.T_range[1] > MAX_IAP_DAYS:
                raise ValueError("horizon exceeds the oracle gate")

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(doc) - known
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        return cls(**doc)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["variant"] = self.variant.value
        return d

    def instance(self, seed: int) -> Instance | IapInstance:
        rng = random.Random(f"shape-{seed}")
        T = rng.randint(*self.T_range)
        if self.problem == "iap":
            lo, hi = self.weight_range
            return generate_random_iap(IapGeneratorParams(
                T=T, demand_density=self.density, distance_range=(max(1, lo), max(1, hi)),
                holding_slope_range=self.holding_slope_range, demand_range=self.demand_range,
                capacity=self.capacity, variant=self.variant, items_per_day=self.items_per_day), seed)
        n = rng.randint(*self.n_range)
        return generate_random(GeneratorParams(
            n=n, T=T, demand_density=self.density, weight_range=self.weight_range,
            facility_range=self.facility_range, holding_slope_range=self.holding_slope_range,
            demand_range=self.demand_range, capacity=self.capacity, variant=self.variant,
            max_demands=self.max_demands), seed)


@dataclass
class ReportRow:
    seed: int
    variant: Variant
    n: int
    T: int
    num_demands: int
    lp_obj: Fraction | None
    f_lp: Fraction | None
    r_lp: Fraction | None
    h_lp: Fraction | None
    rounded_total: Fraction
    f_used: Fraction | None
    r_used: Fraction | None
    h_used: Fraction | None
    oracle_opt: Fraction | None
    ratio_vs_lp: Fraction | None
    ratio_vs_opt: Fraction | None
    failures: list[str] = field(default_factory=list)
    components: tuple[Fraction, Fraction, Fraction] | None = None  # rounded f, r, h
    balls_checked: int = 0
    anchor_sets_checked: int = 0
    repack_days: int = 0
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_csv_row(self) -> list:
        q = lambda x: "" if x is None else str(x)  # noqa: E731
        fr, rr, hr = self.components or (None, None, None)
        return [
            self.seed, self.variant.value, self.n, self.T, self.num_demands, q(self.lp_obj),
            q(self.f_lp), q(self.r_lp), q(self.h_lp), q(self.rounded_total),
            _factor_cell(fr, self.f_lp), _factor_cell(rr, self.r_lp), _factor_cell(hr, self.h_lp),
            q(self.oracle_opt), _fmt_ratio(self.ratio_vs_lp), _fmt_ratio(self.ratio_vs_opt),
            "pass" if self.passed else "FAIL",
        ]


def _ratio(a: Fraction, b: Fraction | None) -> Fraction | None:
    if b is None:
        return None
    if b == 0:
        return Fraction(0) if a == 0 else None
    return a / b


def _fmt_ratio(r: Fraction | None) -> str:
    return "" if r is None else f"{r} ({float(r):.6f})"


def _factor_cell(rounded: Fraction | None, lp: Fraction | None) -> str:
    if rounded is None or lp is None:
        return ""
    if lp == 0:
        return "0 (0.000000)" if rounded == 0 else "inf"
    return _fmt_ratio(rounded / lp)


@dataclass
class RatioReport:
    config: ExperimentConfig
    rows: list[ReportRow]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def _ratios(self, attr: str) -> list[Fraction]:
        return [getattr(r, attr) for r in self.rows if getattr(r, attr) is not None]

    @property
    def max_ratio_vs_lp(self) -> Fraction | None:
        xs = self._ratios("ratio_vs_lp")
        return max(xs) if xs else None

    @property
    def mean_ratio_vs_lp(self) -> Fraction | None:
        xs = self._ratios("ratio_vs_lp")
        return sum(xs, Fraction(0)) / len(xs) if xs else None

    @property
    def max_ratio_vs_opt(self) -> Fraction | None:
        xs = self._ratios("ratio_vs_opt")
        return max(xs) if xs else None

    @property
    def mean_ratio_vs_opt(self) -> Fraction | None:
        xs = self._ratios("ratio_vs_opt")
        return sum(xs, Fraction(0)) / len(xs) if xs else None

    def failures(self) -> list[str]:
        return [f"seed {r.seed}: {msg}" for r in self.rows for msg in r.failures]

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(CSV_COLUMNS)
        wr.writerows(r.to_csv_row() for r in self.rows)
        return buf.getvalue()


def anchors_disjoint(plan) -> bool:
    iv = sorted(plan.anchor_intervals())
    return all(a[1] < b[0] for a, b in zip(iv, iv[1:]))


def check_component_bounds(sol: Solution, problem: str, variant: Variant) -> list[str]:
    """Per-component and total factor checks of a rounded solution against its LP."""
    fails = []
    lp = sol.lp
    hb, rb, fb, tb = BOUNDS[(problem, variant)]
    sched = sol.schedule
    if variant is Variant.CAP_UNSPLIT:
        split = sol.split_schedule
        shb, srb, sfb, stb = BOUNDS[(problem, Variant.CAP_SPLIT)]
        if split.holding_cost > shb * lp.holding_cost:
            fails.append("split holding above bound")
        if split.routing_cost > srb * lp.routing_cost:
            fails.append("split routing above bound")
        if split.facility_cost > sfb * lp.facility_cost:
            fails.append("split facility above bound")
        if sched.holding_cost != split.holding_cost:
            fails.append("repacking changed the holding cost")
        if sched.facility_cost != split.facility_cost:
            fails.append("repacking changed the facility cost")
        if sched.routing_cost > 2 * split.routing_cost:
            fails.append("repacking more than doubled routing")
        if sched.total > 2 * split.total:
            fails.append("unsplittable total above twice the splittable total")
        for rec in sol.repacks:
            if rec.unsplit_trips > 2 * rec.split_trips:
                fails.append(f"day {rec.day} of {rec.client}: {rec.unsplit_trips} > 2*{rec.split_trips} trips")
    if sched.holding_cost > hb * lp.holding_cost:
        fails.append(f"holding {sched.holding_cost} > {hb} * {lp.holding_cost}")
    if sched.routing_cost > rb * lp.routing_cost:
        fails.append(f"routing {sched.routing_cost} > {rb} * {lp.routing_cost}")
    if sched.facility_cost > fb * lp.facility_cost:
        fails.append(f"facility {sched.facility_cost} > {fb} * {lp.facility_cost}")
    if sched.total > tb * lp.objective:
        fails.append(f"total {sched.total} > {tb} * {lp.objective}")
    if sched.total < lp.objective:
        fails.append("rounded cost below the LP objective")
    return fails


def check_structure(sol: Solution) -> tuple[list[str], int, int]:
    """Anchor disjointness and ball invariants; returns (failures, balls, anchor sets)."""
    fails = []
    for v, plan in sol.plans.items():
        if not anchors_disjoint(plan):
            fails.append(f"anchor intervals of {v} overlap")
        for t, s in plan.assignment.items():
            if s > t:
                fails.append(f"demand ({v},{t}) assigned after its deadline")
        if set(plan.visit_days) != {plan.s_star[t] for t in plan.anchors}:
            fails.append(f"visit days of {v} do not match its anchors")
    nballs = 0
    b = sol.balls
    if b is not None and b.selected:
        lp = sol.lp
        for v in b.selected:
            nballs += 1
            mass = sum((lp.value(("Z", u)) for u in b.balls[v]), Fraction(0))
            if mass < QUARTER:
                fails.append(f"selected ball {v} has facility mass {mass} < 1/4")
        for i, v in enumerate(b.selected):
            for u in b.selected[i + 1:]:
                if b.balls[v] & b.balls[u]:
                    fails.append(f"selected balls {v} and {u} intersect")
        for v in b.balls:
            if v in b.selected:
                continue
            if not any(b.balls[v] & b.balls[u] and b.radius(u) <= b.radius(v) for u in b.selected):
                fails.append(f"ball {v} was skipped without a smaller selected neighbour")
    return fails, nballs, len(sol.plans)


def certify_one(config: ExperimentConfig, seed: int) -> ReportRow:
    start = time.perf_counter()
    inst = config.instance(seed)
    iap = isinstance(inst, IapInstance)
    fails = validate(inst)
    n = 2 if iap else inst.n
    nd = len(inst.demands)
    if fails:
        return ReportRow(seed, config.variant, n, inst.horizon, nd, None, None, None, None,
                         Fraction(0), None, None, None, None, None, None, failures=fails)
    try:
        sol = solve_detailed(inst)
    except RoundingError as e:
        return ReportRow(seed, config.variant, n, inst.horizon, nd, None, None, None, None,
                         Fraction(0), None, None, None, None, None, None, failures=[str(e)])
    sched = sol.schedule
    fails += check_schedule(inst, sched)
    if sol.split_schedule is not None:
        fails += [f"split schedule: {p}" for p in check_schedule(inst, sol.split_schedule, unsplittable=False)]
    lp = sol.lp
    if lp is not None:
        fails += check_component_bounds(sol, config.problem, config.variant)
    more, nballs, nplans = check_structure(sol)
    fails += more
    oracle_opt = None
    if config.oracle:
        try:
            if iap and not config.variant.capacitated:
                res = visit_enum_iap(inst)
            elif iap:
                res = exact_iap(inst)
            else:
                res = exact_sirpfl(inst)
        except OracleTooLarge:
            res = None
        if res is not None:
            oracle_opt = res.optimum
            fails += [f"oracle witness: {p}" for p in check_schedule(inst, res.witness)]
            if res.witness.total != res.optimum:
                fails.append("oracle witness cost differs from its optimum")
            if lp is not None and oracle_opt < lp.objective:
                fails.append(f"oracle optimum {oracle_opt} below LP objective {lp.objective}")
            if sched.total < oracle_opt:
                fails.append("rounded cost below the exact optimum")
            factor = BOUNDS[(config.problem, config.variant)][3]
            if sched.total > factor * oracle_opt:
                fails.append(f"rounded cost above {factor} x optimum")
    if lp is None:
        lp_obj = f_lp = r_lp = h_lp = None
        f_used = r_used = h_used = None
    else:
        lp_obj, f_lp, r_lp, h_lp = lp.objective, lp.facility_cost, lp.routing_cost, lp.holding_cost
        f_used = _ratio(sched.facility_cost, f_lp)
        r_used = _ratio(sched.routing_cost, r_lp)
        h_used = _ratio(sched.holding_cost, h_lp)
    return ReportRow(
        seed=seed, variant=config.variant, n=n, T=inst.horizon, num_demands=nd,
        lp_obj=lp_obj, f_lp=f_lp, r_lp=r_lp, h_lp=h_lp, rounded_total=sched.total,
        f_used=f_used, r_used=r_used, h_used=h_used, oracle_opt=oracle_opt,
        ratio_vs_lp=_ratio(sched.total, lp_obj), ratio_vs_opt=_ratio(sched.total, oracle_opt),
        failures=fails,
        components=(sched.facility_cost, sched.routing_cost, sched.holding_cost),
        balls_checked=nballs, anchor_sets_checked=nplans,
        repack_days=len(sol.repacks), seconds=time.perf_counter() - start,
    )


def default_workers() -> int:
    env = os.environ.get(WORKERS_ENV)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _run(fn, config: ExperimentConfig, workers: int | None):
    seeds = list(config.seeds)
    workers = default_workers() if workers is None else workers
    if workers <= 1 or len(seeds) <= 1:
        return [fn(config, s) for s in seeds]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        # map keeps rows in seed order whatever the completion order
        return list(pool.map(fn, [config] * len(seeds), seeds))


def certify(config: ExperimentConfig, workers: int | None = None) -> RatioReport:
    """Generate, solve, round and check every seed; optionally compare with the oracle."""
    report = RatioReport(config, _run(certify_one, config, workers))
    if config.output:
        with open(config.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(report.to_csv())
    return report


BENCH_COLUMNS = ["seed", "variant", "n", "T", "num_demands", "lp_vars", "lp_rows", "pivots",
                 "build_s", "lp_s", "round_s", "oracle_s"]


def bench_one(config: ExperimentConfig, seed: int) -> list:
    inst = config.instance(seed)
    iap = isinstance(inst, IapInstance)
    t0 = time.perf_counter()
    if iap:
        model = build_csiap_lp(inst) if config.variant.capacitated else None
    elif config.variant is Variant.UNCAP:
        model = build_usirpfl_lp(inst)
    else:
        model = build_cssirpfl_lp(inst)
    t1 = time.perf_counter()
    lp = solve_lp(model) if model is not None else None
    t2 = time.perf_counter()
    solve_detailed(inst)
    t3 = time.perf_counter()
    oracle_s = ""
    if config.oracle:
        try:
            if iap:
                exact_iap(inst)
            else:
                exact_sirpfl(inst)
            oracle_s = f"{time.perf_counter() - t3:.4f}"
        except OracleTooLarge:
            oracle_s = "gated"
    return [seed, config.variant.value, 2 if iap else inst.n, inst.horizon, len(inst.demands),
            len(model.variables) if model else 0, len(model.constraints) if model else 0,
            lp.iterations if lp else 0, f"{t1 - t0:.4f}", f"{t2 - t1:.4f}",
            f"{t3 - t2:.4f}", oracle_s]


def bench(config: ExperimentConfig, workers: int | None = 1) -> str:
    rows = _run(bench_one, config, workers)
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(BENCH_COLUMNS)
    wr.writerows(rows)
    return buf.getvalue()


def summarize(report: RatioReport) -> str:
    lines = [f"{len(report.rows)} instances, {sum(r.passed for r in report.rows)} passed"]
    for name in ("max_ratio_vs_lp", "mean_ratio_vs_lp", "max_ratio_vs_opt", "mean_ratio_vs_opt"):
        v = getattr(report, name)
        if v is not None:
            lines.append(f"{name}: {float(v):.6f}")
    return "\n".join(lines)


def sequence_of_seeds(seeds: str | Sequence[int]) -> list[int]:
    """Accept ``[1, 2]`` or ``"0-29"`` style seed lists."""
    if isinstance(seeds, str):
        lo, _, hi = seeds.partition("-")
        return list(range(int(lo), int(hi or lo) + 1))
    return [int(s) for s in seeds]
