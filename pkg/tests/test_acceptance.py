"""Acceptance suite: certification runs, structural checks, oracles and the solver."""

import itertools
import random
import time
from fractions import Fraction

import pytest

from irpfl.harness import ExperimentConfig, certify
from irpfl.instance import IapGeneratorParams, generate_random_iap, make_partition_gadget
from irpfl.lp import build_usirpfl_lp, solve_lp
from irpfl.oracle import (OracleTooLarge, exact_iap, exact_sirpfl, partition_exists,
                          visit_enum_iap, ww_dp)
from irpfl.rounding import (QUARTER, plan_visits_capacitated, plan_visits_uncapacitated,
                            solve_detailed)
from irpfl.simplex import IterationLimit, solve_standard

from conftest import record

F = Fraction

UNCAP_CFG = ExperimentConfig(variant="UNCAP", seeds="0-59", n_range=(2, 5), T_range=(1, 4),
                             max_demands=8)
IAP_SPLIT_CFG = ExperimentConfig(problem="iap", variant="CAP_SPLIT", capacity=6, seeds="0-79",
                                 T_range=(1, 6), items_per_day=2, demand_range=(1, 6))
IAP_UNSPLIT_CFG = ExperimentConfig(problem="iap", variant="CAP_UNSPLIT", capacity=6, seeds="0-79",
                                   T_range=(1, 6), items_per_day=2, demand_range=(1, 6))
STAR_CFG = {
    v: ExperimentConfig(variant=v, capacity=5, seeds="0-49", n_range=(2, 4), T_range=(1, 3),
                        max_demands=8)
    for v in ("CAP_SPLIT", "CAP_UNSPLIT")
}


class Run:
    """Instances of one config with their rounded solutions and timing."""

    def __init__(self, cfg):
        start = time.perf_counter()
        self.cfg = cfg
        self.instances = [cfg.instance(s) for s in cfg.seeds]
        self.solutions = [solve_detailed(x) for x in self.instances]
        self.report = certify(cfg, workers=1)
        self.seconds = time.perf_counter() - start


_RUNS: dict[str, Run] = {}


def run(name: str, cfg) -> Run:
    if name not in _RUNS:
        _RUNS[name] = Run(cfg)
    return _RUNS[name]


def all_runs() -> list[Run]:
    return [run("uncap", UNCAP_CFG), run("iap_split", IAP_SPLIT_CFG),
            run("iap_unsplit", IAP_UNSPLIT_CFG), run("star_split", STAR_CFG["CAP_SPLIT"]),
            run("star_unsplit", STAR_CFG["CAP_UNSPLIT"])]


def _ratio(a, b):
    # a zero LP optimum forces a zero rounded cost through the bound checks
    return F(0) if b == 0 else a / b


def _finish(label, problems, detail):
    record(str(label), not problems, detail if not problems else f"{detail}; {problems[:3]}")
    assert not problems, problems


def test_criterion_1_uncapacitated_star():
    r = run("uncap", UNCAP_CFG)
    problems = list(r.report.failures())
    worst = F(0)
    for x, sol in zip(r.instances, r.solutions):
        assert x.n <= 5 and x.horizon <= 4 and len(x.demands) <= 8
        s, lp = sol.schedule, sol.lp
        if not (s.holding_cost <= 2 * lp.holding_cost and s.routing_cost <= 12 * lp.routing_cost
                and s.facility_cost <= 4 * lp.facility_cost and s.total <= 12 * lp.objective):
            problems.append(f"bound violated on n={x.n}, T={x.horizon}")
        worst = max(worst, _ratio(s.total, lp.objective))
    if r.seconds >= 60:
        problems.append(f"took {r.seconds:.1f}s")
    _finish(1, problems, f"{len(r.instances)} instances, max total/LP {float(worst):.4f}, "
                         f"{r.seconds:.1f}s")


def test_criterion_2_capacitated_splittable_iap():
    r = run("iap_split", IAP_SPLIT_CFG)
    problems = list(r.report.failures())
    worst = F(0)
    for x, sol in zip(r.instances, r.solutions):
        assert x.horizon <= 6
        s, lp = sol.schedule, sol.lp
        if not (s.total <= 3 * lp.objective and s.holding_cost <= 2 * lp.holding_cost
                and s.routing_cost <= 3 * lp.routing_cost):
            problems.append(f"bound violated on T={x.horizon}")
        worst = max(worst, _ratio(s.total, lp.objective))
    if r.seconds >= 30:
        problems.append(f"took {r.seconds:.1f}s")
    _finish(2, problems, f"{len(r.instances)} instances, max total/LP {float(worst):.4f}, "
                         f"{r.seconds:.1f}s")


def test_criterion_3_capacitated_unsplittable_iap():
    split = run("iap_split", IAP_SPLIT_CFG)
    r = run("iap_unsplit", IAP_UNSPLIT_CFG)
    problems = list(r.report.failures())
    days = 0
    for xs, x, ssol, sol in zip(split.instances, r.instances, split.solutions, r.solutions):
        if xs.demands != x.demands or xs.holding != x.holding:
            problems.append("split and unsplit runs drew different instances")
        if sol.split_schedule.total != ssol.schedule.total:
            problems.append("split stage differs from the splittable rounding")
        s, sp = sol.schedule, sol.split_schedule
        if s.total > 2 * sp.total or s.total > 6 * sol.lp.objective:
            problems.append("unsplittable cost above its bound")
        if s.holding_cost != sp.holding_cost:
            problems.append("repacking changed the holding cost")
        for d in sp.deliveries:
            days += 1
            if s.trips_on(d.client, d.day) > 2 * len(d.trips):
                problems.append(f"day {d.day}: more than twice the split trips")
    if r.seconds >= 30:
        problems.append(f"took {r.seconds:.1f}s")
    _finish(3, problems, f"{len(r.instances)} instances, {days} visit days repacked, "
                         f"{r.seconds:.1f}s")


@pytest.mark.parametrize("variant,factor", [("CAP_SPLIT", 24), ("CAP_UNSPLIT", 48)])
def test_criterion_4_capacitated_star(variant, factor):
    r = run(f"star_{variant.split('_')[1].lower()}", STAR_CFG[variant])
    problems = list(r.report.failures())
    worst = F(0)
    for x, sol in zip(r.instances, r.solutions):
        assert x.n <= 4 and x.horizon <= 3
        s, lp = sol.schedule, sol.lp
        split = sol.split_schedule or s
        if s.total > factor * lp.objective:
            problems.append(f"total above {factor} x LP")
        if not (split.holding_cost <= 2 * lp.holding_cost and split.routing_cost <= 24 * lp.routing_cost
                and split.facility_cost <= 4 * lp.facility_cost):
            problems.append("splittable component bound violated")
        if sol.split_schedule is not None:
            if s.holding_cost != split.holding_cost or s.facility_cost != split.facility_cost:
                problems.append("repacking changed holding or facility cost")
            if s.routing_cost > 2 * split.routing_cost:
                problems.append("repacking more than doubled routing")
        worst = max(worst, _ratio(s.total, lp.objective))
    if r.seconds >= 120:
        problems.append(f"took {r.seconds:.1f}s")
    _finish(f"4 {variant}", problems, f"{len(r.instances)} instances, max total/LP "
                         f"{float(worst):.4f}, {r.seconds:.1f}s")


def _disjoint(intervals):
    iv = sorted(intervals)
    return all(a[1] < b[0] for a, b in zip(iv, iv[1:]))


def test_criterion_5_ball_mass_and_anchor_disjointness():
    problems = []
    balls = plans = 0
    for r in all_runs():
        for x, sol in zip(r.instances, r.solutions):
            if sol.balls is not None:
                for v in sol.balls.selected:
                    balls += 1
                    z = sum((sol.lp.value(("Z", u)) for u in sol.balls.balls[v]), F(0))
                    if z < QUARTER:
                        problems.append(f"ball {v} holds {z}")
            kind = sol.lp.model.kind
            clients = [None] if kind == "csiap" else x.clients
            for v in clients:
                rules = [plan_visits_capacitated]
                if kind == "usirpfl":
                    rules.append(plan_visits_uncapacitated)
                for rule in rules:
                    plans += 1
                    if not _disjoint(rule(sol.lp, v).anchor_intervals()):
                        problems.append(f"{rule.__name__}: overlapping anchors for {v}")
    _finish(5, problems, f"{balls} selected balls, {plans} anchor sets")


def test_criterion_6_oracle_agreement():
    problems = []
    checked = gated = 0
    for r in all_runs():
        for x, sol in zip(r.instances, r.solutions):
            lp = sol.lp.objective
            if sol.schedule.total < lp:
                problems.append("rounded cost below LP")
            try:
                opt = (exact_sirpfl(x) if hasattr(x, "n") else exact_iap(x)).optimum
            except OracleTooLarge:
                gated += 1
                continue
            checked += 1
            if opt < lp:
                problems.append(f"oracle {opt} below LP {lp}")
    ww = 0
    rng = random.Random(2024)
    while ww < 100:
        x = generate_random_iap(IapGeneratorParams(T=rng.randint(1, 12), demand_density=0.7,
                                                   distance_range=(1, 30)), rng.randrange(10**9))
        assert len(x.demand_days) <= 12
        ww += 1
        if ww_dp(x).optimum != visit_enum_iap(x).optimum:
            problems.append(f"dp and enumeration disagree on {x}")
    _finish(6, problems, f"{checked} instances against the oracle ({gated} above the gate), "
                         f"{ww} dp/enumeration pairs")


def test_criterion_7_partition_reduction():
    start = time.perf_counter()
    w = F(7, 3)
    problems = []
    count = 0
    for k in range(1, 7):
        for S in itertools.combinations_with_replacement(range(1, 10), k):
            if 2 * max(S) > sum(S):
                continue
            count += 1
            opt = exact_iap(make_partition_gadget(S, w)).optimum
            if (opt == 2 * w) != partition_exists(S):
                problems.append(S)
    seconds = time.perf_counter() - start
    if seconds >= 60:
        problems.append(f"took {seconds:.1f}s")
    _finish(7, problems, f"{count} multisets, {seconds:.1f}s")


def planted_lp(rng: random.Random):
    """Random LP whose optimum is known: a feasible basic point plus a dual certificate."""
    m = rng.randint(1, 5)
    n = rng.randint(m + 1, 9)
    A = [[rng.randint(-4, 6) for _ in range(n)] for _ in range(m)]
    basis = rng.sample(range(n), m)
    x = [F(0)] * n
    for j in basis:
        x[j] = F(rng.randint(1, 9), rng.randint(1, 4))
    relations = [rng.choice(["=", ">="]) for _ in range(m)]
    b = [sum(A[i][j] * x[j] for j in range(n)) for i in range(m)]
    # duals of >= rows must be nonnegative; equality duals are free
    y = [F(rng.randint(0 if relations[i] == ">=" else -5, 5), rng.randint(1, 3)) for i in range(m)]
    c = []
    for j in range(n):
        reduced = F(0) if j in basis else F(rng.randint(1, 6), rng.randint(1, 3))
        c.append(sum(A[i][j] * y[i] for i in range(m)) + reduced)
    rows = [{j: a for j, a in enumerate(row) if a} for row in A]
    return c, rows, relations, b, sum(bi * yi for bi, yi in zip(b, y))


def _scipy_value(c, rows, relations, b):
    import numpy as np
    from scipy.optimize import linprog
    n = len(c)
    dense = [[float(r.get(j, 0)) for j in range(n)] for r in rows]
    eq = [i for i, rel in enumerate(relations) if rel == "="]
    ge = [i for i, rel in enumerate(relations) if rel == ">="]
    res = linprog([float(a) for a in c],
                  A_ub=-np.array([dense[i] for i in ge]) if ge else None,
                  b_ub=[-float(b[i]) for i in ge] if ge else None,
                  A_eq=np.array([dense[i] for i in eq]) if eq else None,
                  b_eq=[float(b[i]) for i in eq] if eq else None, bounds=(0, None))
    return res.fun if res.status == 0 else None


BEALE = ([F(-3, 4), 150, F(-1, 50), 6],
         [{0: F(-1, 4), 1: 60, 2: F(1, 25), 3: -9}, {0: F(-1, 2), 1: 90, 2: F(1, 50), 3: -3}, {2: -1}],
         [">="] * 3, [0, 0, -1])


def test_criterion_8_exact_simplex():
    rng = random.Random(8)
    problems = []
    for k in range(200):
        c, rows, rel, b, expected = planted_lp(rng)
        res = solve_standard(c, rows, rel, b)
        if res.objective != expected:
            problems.append(f"lp {k}: got {res.objective}, planted {expected}")
        for row, r_, bi in zip(rows, rel, b):
            lhs = sum(a * res.x[j] for j, a in row.items())
            if (r_ == "=" and lhs != bi) or (r_ == ">=" and lhs < bi):
                problems.append(f"lp {k}: infeasible answer")
        ref = _scipy_value(c, rows, rel, b)
        if ref is None or abs(ref - float(expected)) > 1e-6 * max(1, abs(ref)):
            problems.append(f"lp {k}: float reference {ref} vs {expected}")
    # Beale's example cycles under the textbook largest-coefficient rule
    try:
        solve_standard(*BEALE, rule="dantzig", max_iter=500)
        problems.append("largest-coefficient rule did not cycle on Beale's example")
    except IterationLimit:
        pass
    beale = solve_standard(*BEALE, max_iter=1000)
    if beale.objective != F(-1, 20):
        problems.append(f"cycling example ended at {beale.objective}")
    ref = _scipy_value(*BEALE)
    if ref is None or abs(ref + 0.05) > 1e-9:
        problems.append("float reference disagrees on the cycling example")
    # the USIRPFL models are heavily degenerate too
    for seed in range(5):
        lp = solve_lp(build_usirpfl_lp(UNCAP_CFG.instance(seed)))
        if lp.objective <= 0:
            problems.append("degenerate star LP produced a non-positive optimum")
    _finish(8, problems, f"200 planted LPs exact, cycling example finished in {beale.iterations} pivots")
