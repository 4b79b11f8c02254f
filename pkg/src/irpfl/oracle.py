"""Exact solvers used as ground truth at desk scale.

Nothing here approximates: inputs beyond the size gates raise
:class:`OracleTooLarge` instead of returning a possibly non-optimal value.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator

from .instance import IapInstance, Instance, Variant
from .lp import LpModel, solve_lp
from .schedule import IAP_CLIENT, IAP_DEPOT, Delivery, Schedule, fill_trips, make_schedule

MAX_IAP_DAYS = 6
MAX_UNSPLIT_ITEMS = 10
MAX_TRIP_BOUND = 40
MAX_SIRPFL = {"n": 5, "T": 4, "demands": 8}


class Method(str, enum.Enum):
    WW_DP = "WW_DP"
    VISIT_ENUM = "VISIT_ENUM"
    TRIP_ENUM = "TRIP_ENUM"
    FACILITY_ENUM = "FACILITY_ENUM"
    PACK_ENUM = "PACK_ENUM"


class OracleTooLarge(ValueError):
    code = "EXPLICIT_TOO_LARGE"

    def __init__(self, message: str):
        super().__init__(f"{self.code}: {message}")


@dataclass(frozen=True)
class OracleResult:
    optimum: Fraction
    witness: Schedule
    method: Method


# --------------------------------------------------------------------------
# uncapacitated access problem


def ww_dp(iap: IapInstance) -> OracleResult:
    """Lot-sizing recursion over demand deadlines.

    With holding non-increasing in the delivery day, an optimal plan serves
    consecutive blocks of deadlines, each on the first deadline of its block,
    so ``opt[j] = min_i opt[i-1] + W + sum_{k=i..j} d_k h(t_i, t_k)``.
    """
    if iap.variant.capacitated:
        raise ValueError("ww_dp only handles the uncapacitated access problem")
    days = iap.demand_days
    d = [iap.day_demand(t) for t in days]
    W = iap.distance
    L = len(days)
    opt: list[Fraction] = [Fraction(0)] + [None] * L  # type: ignore[list-item]
    cut = [0] * (L + 1)
    for j in range(1, L + 1):
        best = None
        for i in range(1, j + 1):
            s = days[i - 1]
            c = opt[i - 1] + W + sum((d[k - 1] * iap.h(s, days[k - 1]) for k in range(i, j + 1)), Fraction(0))
            if best is None or c < best:
                best, cut[j] = c, i
        opt[j] = best
    deliveries = []
    j = L
    while j > 0:
        i = cut[j]
        block = set(days[i - 1:j])
        pieces = tuple((t, a) for t, a in sorted(iap.demands) if t in block)
        deliveries.append(Delivery(IAP_CLIENT, days[i - 1], IAP_DEPOT, (pieces,)))
        j = i - 1
    witness = make_schedule(iap, (), deliveries)
    assert witness.total == opt[L]
    return OracleResult(opt[L], witness, Method.WW_DP)


def visit_enum_iap(iap: IapInstance) -> OracleResult:
    """Brute force over every visit set; each demand rides the latest visit before it."""
    if iap.variant.capacitated:
        raise ValueError("visit enumeration only handles the uncapacitated access problem")
    T = iap.horizon
    if T > 16:
        raise OracleTooLarge(f"horizon {T} > 16 for visit enumeration")
    best = None
    best_set = None
    for mask in range(1, 1 << T):
        visits = [s for s in range(1, T + 1) if mask >> (s - 1) & 1]
        cost = iap.distance * len(visits)
        ok = True
        for t, a in iap.demands:
            prior = [s for s in visits if s <= t]
            if not prior:
                ok = False
                break
            cost += a * iap.h(prior[-1], t)
        if ok and (best is None or cost < best):
            best, best_set = cost, visits
    deliveries = []
    for s in best_set:
        pieces = tuple((t, a) for t, a in sorted(iap.demands)
                       if s <= t and max(x for x in best_set if x <= t) == s)
        if pieces:
            deliveries.append(Delivery(IAP_CLIENT, s, IAP_DEPOT, (pieces,)))
    witness = make_schedule(iap, (), deliveries)
    # empty visits are dropped from the witness; they only add routing cost
    return OracleResult(witness.total, witness, Method.VISIT_ENUM)


# --------------------------------------------------------------------------
# capacitated access problem


def _compositions(total: int, caps: list[int]) -> Iterator[tuple[int, ...]]:
    if not caps:
        if total == 0:
            yield ()
        return
    rest = sum(caps[1:])
    for k in range(max(0, total - rest), min(caps[0], total) + 1):
        for tail in _compositions(total - k, caps[1:]):
            yield (k,) + tail


def _transport(iap: IapInstance, trips: tuple[int, ...], d: dict[int, Fraction]):
    U = iap.capacity
    m = LpModel(kind="transport")
    for t in d:
        for s in range(1, t + 1):
            if trips[s - 1]:
                m.add_variable((s, t), iap.h(s, t))
    for t in d:
        m.add_constraint({(s, t): 1 for s in range(1, t + 1) if trips[s - 1]}, "=", d[t])
    for s in range(1, iap.horizon + 1):
        terms = {(s, t): 1 for t in d if t >= s and trips[s - 1]}
        if terms:
            m.add_constraint(terms, "<=", trips[s - 1] * U)
    return solve_lp(m)


def _exact_split(iap: IapInstance) -> OracleResult:
    U, W, T = iap.capacity, iap.distance, iap.horizon
    days = iap.demand_days
    d = {t: iap.day_demand(t) for t in days}
    total = sum(d.values(), Fraction(0))
    k_min = math.ceil(total / U)
    bound = k_min + T
    if T > MAX_IAP_DAYS or bound > MAX_TRIP_BOUND:
        raise OracleTooLarge(f"T={T}, trip bound {bound}")
    caps = [math.ceil(sum((d[t] for t in days if t >= s), Fraction(0)) / U) for s in range(1, T + 1)]
    need = [sum((d[t] for t in days if t <= s), Fraction(0)) for s in range(1, T + 1)]
    base = sum((d[t] * iap.h(t, t) for t in days), Fraction(0))
    best = None
    best_plan = None
    for K in range(k_min, bound + 1):
        if best is not None and W * K + base >= best:
            break
        for trips in _compositions(K, caps):
            cum = 0
            feasible = True
            for s in range(T):
                cum += trips[s]
                if cum * U < need[s]:
                    feasible = False
                    break
            if not feasible:
                continue
            sol = _transport(iap, trips, d)
            cost = W * K + sol.objective
            if best is None or cost < best:
                best, best_plan = cost, sol
    deliveries = []
    for s in range(1, T + 1):
        pieces = [(t, best_plan.value((s, t))) for t in days if t >= s]
        pieces = [(t, a) for t, a in pieces if a > 0]
        if pieces:
            deliveries.append(Delivery(IAP_CLIENT, s, IAP_DEPOT, fill_trips(pieces, U)))
    witness = make_schedule(iap, (), deliveries)
    if witness.total > best:
        raise AssertionError("split witness costs more than the enumerated optimum")
    return OracleResult(witness.total, witness, Method.TRIP_ENUM)


def min_bins(sizes: tuple[Fraction, ...], U: Fraction) -> list[list[int]]:
    """Exact bin packing by recursion over subsets; returns bins of item indices."""
    n = len(sizes)

    @lru_cache(maxsize=None)
    def best(mask: int) -> tuple[int, tuple[int, ...]]:
        if mask == 0:
            return 0, ()
        low = mask & -mask
        rest = mask ^ low
        answer = None
        sub = rest
        while True:
            chosen = sub | low
            load = sum((sizes[i] for i in range(n) if chosen >> i & 1), Fraction(0))
            if load <= U:
                k, bins = best(mask ^ chosen)
                if answer is None or k + 1 < answer[0]:
                    answer = (k + 1, (chosen,) + bins)
            if sub == 0:
                break
            sub = (sub - 1) & rest
        if answer is None:
            raise ValueError("an item exceeds the capacity")
        return answer

    _, bins = best((1 << n) - 1)
    return [[i for i in range(n) if b >> i & 1] for b in bins]


def _exact_unsplit(iap: IapInstance) -> OracleResult:
    U, W, T = iap.capacity, iap.distance, iap.horizon
    items = sorted(iap.demands)
    k = len(items)
    if T > MAX_IAP_DAYS or k > MAX_UNSPLIT_ITEMS:
        raise OracleTooLarge(f"T={T}, {k} items")
    sizes = tuple(a for _, a in items)

    @lru_cache(maxsize=None)
    def bins(mask: int) -> tuple[tuple[int, ...], ...]:
        idx = [i for i in range(k) if mask >> i & 1]
        packing = min_bins(tuple(sizes[i] for i in idx), U)
        return tuple(tuple(idx[j] for j in b) for b in packing)

    due = [0] * (T + 2)
    for i, (t, _) in enumerate(items):
        due[t] |= 1 << i

    @lru_cache(maxsize=None)
    def f(s: int, pending: int) -> tuple[Fraction, tuple[tuple[int, int], ...]]:
        if s > T:
            return (Fraction(0), ()) if pending == 0 else (None, ())
        forced = pending & due[s]
        free = pending & ~forced
        answer = None
        sub = free
        while True:
            X = forced | sub
            cost = Fraction(0)
            if X:
                cost += W * len(bins(X))
                cost += sum((items[i][1] * iap.h(s, items[i][0]) for i in range(k) if X >> i & 1), Fraction(0))
            rest, plan = f(s + 1, pending & ~X)
            if rest is not None:
                total = cost + rest
                if answer is None or total < answer[0]:
                    answer = (total, ((s, X),) + plan)
            if sub == 0:
                break
            sub = (sub - 1) & free
        return answer if answer is not None else (None, ())

    opt, plan = f(1, (1 << k) - 1)
    deliveries = []
    for s, X in plan:
        if X:
            trips = tuple(tuple(items[i] for i in b) for b in bins(X))
            deliveries.append(Delivery(IAP_CLIENT, s, IAP_DEPOT, trips))
    witness = make_schedule(iap, (), deliveries)
    assert witness.total == opt
    return OracleResult(opt, witness, Method.PACK_ENUM)


def exact_iap(iap: IapInstance, variant: Variant | str | None = None) -> OracleResult:
    """Exact optimum of an access problem under ``variant`` (default: its own)."""
    variant = iap.variant if variant is None else Variant(variant)
    if variant is Variant.UNCAP:
        return ww_dp(IapInstance(iap.distance, iap.horizon, iap.demands, iap.holding, None, Variant.UNCAP))
    if iap.capacity is None:
        raise ValueError("capacitated oracle needs a capacity")
    if not iap.demands:
        return OracleResult(Fraction(0), make_schedule(iap, (), ()),
                            Method.TRIP_ENUM if variant is Variant.CAP_SPLIT else Method.PACK_ENUM)
    if variant is Variant.CAP_SPLIT:
        return _exact_split(iap)
    return _exact_unsplit(iap)


# --------------------------------------------------------------------------
# star problem with facility location


def exact_sirpfl(instance: Instance) -> OracleResult:
    """Enumerate facility sets; each client then solves its own access problem."""
    n, T, D = instance.n, instance.horizon, len(instance.demands)
    if n > MAX_SIRPFL["n"] or T > MAX_SIRPFL["T"] or D > MAX_SIRPFL["demands"]:
        raise OracleTooLarge(f"n={n}, T={T}, |D|={D}")
    clients = instance.clients
    if not clients:
        return OracleResult(Fraction(0), make_schedule(instance, (), ()), Method.FACILITY_ENUM)
    memo: dict[tuple[int, Fraction], OracleResult] = {}

    def client_opt(v: int, W: Fraction) -> OracleResult:
        key = (v, W)
        if key not in memo:
            memo[key] = exact_iap(instance.client_iap(v, W))
        return memo[key]

    best = None
    for size in range(1, n + 1):
        for F in itertools.combinations(range(n), size):
            cost = sum((instance.facility_costs[u] for u in F), Fraction(0))
            if best is not None and cost >= best[0]:
                continue
            chosen = {}
            for v in clients:
                u = min(F, key=lambda q: (instance.w(q, v), q))
                chosen[v] = (u, client_opt(v, instance.w(u, v)))
                cost += chosen[v][1].optimum
            if best is None or cost < best[0]:
                best = (cost, F, chosen)
    cost, F, chosen = best
    deliveries = []
    for v, (u, res) in chosen.items():
        for dl in res.witness.deliveries:
            deliveries.append(Delivery(v, dl.day, u, dl.trips))
    witness = make_schedule(instance, F, deliveries)
    assert witness.total == cost
    return OracleResult(cost, witness, Method.FACILITY_ENUM)


# --------------------------------------------------------------------------
# number partitioning


def partition_exists(S: Iterable[int]) -> bool:
    """Subset-sum reachability for half the total (bitset DP); empty set is True."""
    S = [int(a) for a in S]
    total = sum(S)
    if total > 10 ** 6:
        raise OracleTooLarge(f"sum {total} > 10^6")
    if total % 2:
        return False
    reach = 1
    for a in S:
        reach |= reach << a
    return bool(reach >> (total // 2) & 1)
