"""Deterministic LP rounding for the star inventory routing problems.

The pipeline for the star problems is

1. per client, pick *anchor* demand days and the visit days they induce
   (:func:`plan_visits_uncapacitated` or :func:`plan_visits_capacitated`);
2. grow a ball around each client whose radius is four times its cheapest
   anchor's distance-weighted connection mass (:func:`build_balls`);
3. greedily keep disjoint balls, smallest radius first, and open the cheapest
   vertex of every kept ball (:func:`select_balls`);
4. route every client from its nearest opened facility on its visit days.

Unsplittable variants round the splittable relaxation and then repack every
visit day with :func:`unsplit_repack`.

Ties are broken by lowest index everywhere so runs are reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Mapping, Sequence

from .instance import IapInstance, Instance, Variant, require_valid
from .lp import (LpSolution, build_csiap_lp, build_cssirpfl_lp, build_usirpfl_lp,
                 solve_lp)
from .schedule import (IAP_CLIENT, IAP_DEPOT, Delivery, Schedule, fill_trips,
                       make_schedule)

HALF = Fraction(1, 2)
QUARTER = Fraction(1, 4)


class RoundingError(AssertionError):
    """A proven rounding invariant failed; indicates a non-optimal LP or a bug."""


# --------------------------------------------------------------------------
# half-mass days


def latest_half_day(mass: Mapping[int, Fraction], t: int) -> int:
    """Latest ``s <= t`` with ``sum(mass[s..t]) >= 1/2``."""
    acc = Fraction(0)
    for s in range(t, 0, -1):
        acc += mass.get(s, 0)
        if acc >= HALF:
            return s
    raise RoundingError(f"demand day {t} never accumulates half a unit of service")


def service_mass(lp: LpSolution, v: int | None, t: int) -> dict[int, Fraction]:
    """Per-day LP service mass of demand ``(v, t)``.

    For the access problem this is ``x_{s,t}``; for the star problems it is
    the connection mass ``sum_u y^{uv}_{st}``.
    """
    if lp.model.kind == "csiap":
        return {s: lp.value(("X", s, t)) for s in range(1, t + 1)}
    n = lp.model.source.n
    return {s: sum((lp.value(("Yst", u, v, s, t)) for u in range(n)), Fraction(0))
            for s in range(1, t + 1)}


def compute_s_star(lp: LpSolution, v: int | None, t: int) -> int:
    return latest_half_day(service_mass(lp, v, t), t)


# --------------------------------------------------------------------------
# visit rules


@dataclass(frozen=True)
class VisitPlan:
    client: int
    anchors: tuple[int, ...]
    visit_days: tuple[int, ...]
    assignment: Mapping[int, int]
    s_star: Mapping[int, int]

    def served_on(self, s: int) -> list[int]:
        return sorted(t for t, day in self.assignment.items() if day == s)

    def anchor_intervals(self) -> list[tuple[int, int]]:
        return [(self.s_star[t], t) for t in self.anchors]


def visits_uncapacitated(s_star: Mapping[int, int], client: int = 0) -> VisitPlan:
    """Backward sweep: a demand day joins the earliest anchor's visit if it can."""
    days = sorted(s_star, reverse=True)
    if not days:
        raise ValueError("client has no demand days")
    latest = days[0]
    anchors = [latest]
    assignment = {latest: s_star[latest]}
    earliest = latest
    for t in days[1:]:
        if t >= s_star[earliest]:
            assignment[t] = s_star[earliest]
        else:
            anchors.append(t)
            assignment[t] = s_star[t]
            earliest = t
    return VisitPlan(client, tuple(anchors), tuple(sorted({s_star[t] for t in anchors})),
                     assignment, dict(s_star))


def visits_capacitated(s_star: Mapping[int, int], client: int = 0) -> VisitPlan:
    """Anchor on the unsatisfied day with the latest half-mass day (ties: latest deadline).

    That anchor's visit also takes every unsatisfied day it is not too late for.
    """
    if not s_star:
        raise ValueError("client has no demand days")
    open_days = set(s_star)
    anchors: list[int] = []
    assignment: dict[int, int] = {}
    while open_days:
        t = max(open_days, key=lambda d: (s_star[d], d))
        s = s_star[t]
        anchors.append(t)
        for d in sorted(open_days):
            if d >= s:
                assignment[d] = s
                open_days.discard(d)
    return VisitPlan(client, tuple(anchors), tuple(sorted({s_star[t] for t in anchors})),
                     assignment, dict(s_star))


def _demand_days(lp: LpSolution, v: int | None) -> list[int]:
    src = lp.model.source
    if isinstance(src, IapInstance):
        return src.demand_days
    return src.demand_days(v)


def _s_star_map(lp: LpSolution, v: int | None) -> dict[int, int]:
    return {t: compute_s_star(lp, v, t) for t in _demand_days(lp, v)}


def plan_visits_uncapacitated(lp: LpSolution, v: int) -> VisitPlan:
    return visits_uncapacitated(_s_star_map(lp, v), v)


def plan_visits_capacitated(lp: LpSolution, v: int | None) -> VisitPlan:
    client = IAP_CLIENT if lp.model.kind == "csiap" else v
    return visits_capacitated(_s_star_map(lp, v), client)


# --------------------------------------------------------------------------
# balls


@dataclass(frozen=True)
class BallSystem:
    weights: Sequence[Sequence[Fraction]]
    anchor_mass: Mapping[int, Mapping[int, Fraction]]   # v -> t -> W_{v,t}
    seed_radius: Mapping[int, Fraction]                  # v -> W_v
    balls: Mapping[int, frozenset[int]]
    cheapest: Mapping[int, int]
    z_mass: Mapping[int, Fraction] | None = None
    selected: tuple[int, ...] = ()
    facility_of: Mapping[int, int] = field(default_factory=dict)

    def radius(self, v: int) -> Fraction:
        return 4 * self.seed_radius[v]

    @property
    def opened(self) -> frozenset[int]:
        return frozenset(self.cheapest[v] for v in self.selected)


def make_ball(weights, v: int, radius: Fraction) -> frozenset[int]:
    return frozenset(u for u in range(len(weights)) if weights[u][v] <= radius)


def build_balls(lp: LpSolution, plans: Mapping[int, VisitPlan]) -> BallSystem:
    inst: Instance = lp.model.source
    n = inst.n
    Wvt: dict[int, dict[int, Fraction]] = {}
    Wv: dict[int, Fraction] = {}
    balls: dict[int, frozenset[int]] = {}
    cheapest: dict[int, int] = {}
    mass: dict[int, Fraction] = {}
    for v, plan in sorted(plans.items()):
        per = {}
        for t in plan.anchors:
            per[t] = sum((inst.w(u, v) * lp.value(("Yst", u, v, s, t))
                          for u in range(n) for s in range(plan.s_star[t], t + 1)), Fraction(0))
        Wvt[v] = per
        Wv[v] = min(per.values())
        balls[v] = make_ball(inst.weights, v, 4 * Wv[v])
        cheapest[v] = min(balls[v], key=lambda q: (inst.facility_costs[q], q))
        mass[v] = sum((lp.value(("Z", u)) for u in balls[v]), Fraction(0))
    return BallSystem(inst.weights, Wvt, Wv, balls, cheapest, mass)


def select_balls(balls: BallSystem) -> BallSystem:
    """Greedy disjoint subfamily by increasing radius; assign clients to the nearest opening."""
    order = sorted(balls.balls, key=lambda v: (balls.radius(v), v))
    taken: set[int] = set()
    selected = []
    for v in order:
        if taken.isdisjoint(balls.balls[v]):
            selected.append(v)
            taken |= balls.balls[v]
    if balls.z_mass is not None:
        for v in selected:
            if balls.z_mass[v] < QUARTER:
                raise RoundingError(f"ball around {v} holds facility mass {balls.z_mass[v]} < 1/4")
    opened = sorted({balls.cheapest[v] for v in selected})
    w = balls.weights
    facility_of = {v: min(opened, key=lambda u: (w[u][v], u)) for v in balls.balls}
    return replace(balls, selected=tuple(selected), facility_of=facility_of)


# --------------------------------------------------------------------------
# schedules from plans


@dataclass
class StarRounding:
    schedule: Schedule
    plans: dict[int, VisitPlan]
    balls: BallSystem


def _deliveries(plan: VisitPlan, amount: Mapping[int, Fraction], facility: int,
                capacity: Fraction | None) -> list[Delivery]:
    out = []
    for s in plan.visit_days:
        pieces = [(t, amount[t]) for t in plan.served_on(s)]
        out.append(Delivery(plan.client, s, facility, fill_trips(pieces, capacity)))
    return out


def _round_star(instance: Instance, lp: LpSolution, capacitated: bool) -> StarRounding:
    rule = plan_visits_capacitated if capacitated else plan_visits_uncapacitated
    plans = {v: rule(lp, v) for v in instance.clients}
    if not plans:
        return StarRounding(make_schedule(instance, (), ()), {}, BallSystem(instance.weights, {}, {}, {}, {}))
    balls = select_balls(build_balls(lp, plans))
    cap = instance.capacity if capacitated else None
    deliveries = []
    for v, plan in plans.items():
        amount = {t: instance.demands[(v, t)] for t in plan.assignment}
        deliveries += _deliveries(plan, amount, balls.facility_of[v], cap)
    return StarRounding(make_schedule(instance, balls.opened, deliveries), plans, balls)


def round_usirpfl(instance: Instance, lp: LpSolution) -> Schedule:
    """Open the cheapest vertex of each kept ball; one trip per visit day."""
    return _round_star(instance, lp, capacitated=False).schedule


def round_cssirpfl(instance: Instance, lp: LpSolution) -> Schedule:
    """Capacitated splittable rounding: ``ceil(load / U)`` trips per visit day."""
    return _round_star(instance, lp, capacitated=True).schedule


@dataclass
class IapRounding:
    schedule: Schedule
    plan: VisitPlan


def _round_iap(iap: IapInstance, lp: LpSolution) -> IapRounding:
    plan = plan_visits_capacitated(lp, None)
    amount = {t: iap.day_demand(t) for t in iap.demand_days}
    deliveries = _deliveries(plan, amount, IAP_DEPOT, iap.capacity)
    return IapRounding(make_schedule(iap, (), deliveries), plan)


def round_csiap(iap: IapInstance, lp: LpSolution) -> Schedule:
    return _round_iap(iap, lp).schedule


# --------------------------------------------------------------------------
# unsplittable repacking


def _repack(items: list[tuple[object, Fraction]], U: Fraction) -> list[list[tuple[object, Fraction]]]:
    for _, a in items:
        if a > U:
            raise ValueError(f"item of size {a} exceeds capacity {U}")
    order = sorted(range(len(items)), key=lambda i: (-items[i][1], i))
    big = [items[i] for i in order if items[i][1] > U / 2]
    small = [items[i] for i in order if items[i][1] <= U / 2]
    trips = [[it] for it in big]
    loads = [it[1] for it in big]
    for it in small:
        for k in range(len(trips)):
            if loads[k] + it[1] <= U:
                trips[k].append(it)
                loads[k] += it[1]
                break
        else:
            trips.append([it])
            loads.append(it[1])
    return trips


def unsplit_repack(sizes: Sequence, U, n_split: int | None = None) -> list[list[Fraction]]:
    """Pack whole items into trips: big items alone, small ones first-fit decreasing.

    Items above ``U/2`` each open their own trip; the rest go into the first
    trip with room, largest first.  The result uses at most ``2 * n_split``
    trips when ``n_split`` trips sufficed with splitting.
    """
    U = Fraction(U)
    sizes = [Fraction(a) for a in sizes]
    lower = math.ceil(sum(sizes, Fraction(0)) / U) if sizes else 0
    if n_split is not None and n_split < lower:
        raise ValueError(f"{n_split} split trips cannot carry {sum(sizes)}")
    trips = _repack(list(enumerate(sizes)), U)
    if n_split is not None and len(trips) > 2 * n_split:
        raise RoundingError(f"repacking used {len(trips)} trips for {n_split} split trips")
    return [[a for _, a in trip] for trip in trips]


@dataclass(frozen=True)
class RepackRecord:
    client: int
    day: int
    split_trips: int
    unsplit_trips: int


def _day_items(instance, client: int, delivered: Mapping[int, Fraction]) -> list[tuple[int, Fraction]]:
    items = []
    for t in sorted(delivered):
        if isinstance(instance, IapInstance):
            whole = [a for u, a in instance.demands if u == t]
        else:
            whole = [instance.demands[(client, t)]]
        if sum(whole, Fraction(0)) != delivered[t]:
            raise RoundingError(f"demand ({client},{t}) is split across visit days")
        items += [(t, a) for a in whole]
    return items


def repack_schedule(instance: Instance | IapInstance,
                    split: Schedule) -> tuple[Schedule, list[RepackRecord]]:
    """Turn a splittable schedule into an unsplittable one, day by day."""
    U = instance.capacity
    records = []
    deliveries = []
    for d in split.deliveries:
        items = _day_items(instance, d.client, d.delivered)
        trips = _repack(items, U)
        n_split, n_unsplit = len(d.trips), len(trips)
        if n_unsplit > 2 * n_split:
            raise RoundingError(f"repacking used {n_unsplit} trips for {n_split} split trips")
        records.append(RepackRecord(d.client, d.day, n_split, n_unsplit))
        deliveries.append(Delivery(d.client, d.day, d.facility,
                                   tuple(tuple(trip) for trip in trips)))
    return make_schedule(instance, split.opened, deliveries), records


# --------------------------------------------------------------------------
# end to end


@dataclass
class Solution:
    """Everything produced on the way to a schedule."""

    schedule: Schedule
    lp: LpSolution | None = None
    split_schedule: Schedule | None = None
    plans: dict[int, VisitPlan] = field(default_factory=dict)
    balls: BallSystem | None = None
    repacks: list[RepackRecord] = field(default_factory=list)
    method: str = ""


def solve_detailed(instance: Instance | IapInstance) -> Solution:
    require_valid(instance)
    variant = instance.variant
    if isinstance(instance, IapInstance):
        if variant is Variant.UNCAP:
            from .oracle import ww_dp
            res = ww_dp(instance)
            return Solution(schedule=res.witness, method="ww_dp")
        lp = solve_lp(build_csiap_lp(instance))
        r = _round_iap(instance, lp)
        sol = Solution(schedule=r.schedule, lp=lp, plans={IAP_CLIENT: r.plan}, method="csiap")
    elif variant is Variant.UNCAP:
        lp = solve_lp(build_usirpfl_lp(instance))
        r = _round_star(instance, lp, capacitated=False)
        return Solution(schedule=r.schedule, lp=lp, plans=r.plans, balls=r.balls, method="usirpfl")
    else:
        lp = solve_lp(build_cssirpfl_lp(instance))
        r = _round_star(instance, lp, capacitated=True)
        sol = Solution(schedule=r.schedule, lp=lp, plans=r.plans, balls=r.balls, method="cssirpfl")
    if variant is Variant.CAP_UNSPLIT:
        sol.split_schedule = sol.schedule
        sol.schedule, sol.repacks = repack_schedule(instance, sol.split_schedule)
        sol.method += "+repack"
    return sol


def solve(instance: Instance | IapInstance) -> Schedule:
    """Round the matching LP relaxation (or run the exact DP) and return a schedule."""
    return solve_detailed(instance).schedule
