"""Delivery schedules, their cost and feasibility checks."""

from __future__ import annotations

import csv
import io
import json
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .instance import IapInstance, Instance

# in access-problem schedules the depot is vertex 0 and the client vertex 1
IAP_DEPOT, IAP_CLIENT = 0, 1

Trip = tuple[tuple[int, Fraction], ...]  # (deadline, amount) pieces


@dataclass(frozen=True)
class Delivery:
    client: int
    day: int
    facility: int
    trips: tuple[Trip, ...]

    @property
    def loads(self) -> list[Fraction]:
        return [sum((a for _, a in trip), Fraction(0)) for trip in self.trips]

    @property
    def delivered(self) -> dict[int, Fraction]:
        out: dict[int, Fraction] = {}
        for trip in self.trips:
            for t, a in trip:
                out[t] = out.get(t, Fraction(0)) + a
        return out


@dataclass(frozen=True)
class Schedule:
    opened: frozenset[int]
    deliveries: tuple[Delivery, ...]
    facility_cost: Fraction
    routing_cost: Fraction
    holding_cost: Fraction

    @property
    def total(self) -> Fraction:
        return self.facility_cost + self.routing_cost + self.holding_cost

    def trips_on(self, client: int, day: int) -> int:
        return sum(len(d.trips) for d in self.deliveries if d.client == client and d.day == day)


def _w(instance, u, v) -> Fraction:
    if isinstance(instance, IapInstance):
        return Fraction(0) if u == v else instance.distance
    return instance.w(u, v)


def _h(instance, v, s, t) -> Fraction:
    if isinstance(instance, IapInstance):
        return instance.h(s, t)
    return instance.h(v, s, t)


def make_schedule(instance: Instance | IapInstance, opened: Iterable[int],
                  deliveries: Iterable[Delivery]) -> Schedule:
    """Bundle deliveries into a schedule, pricing them against ``instance``."""
    opened = frozenset(opened)
    deliveries = tuple(sorted(deliveries, key=lambda d: (d.client, d.day, d.facility)))
    if isinstance(instance, IapInstance):
        fac = Fraction(0)
    else:
        fac = sum((instance.facility_costs[u] for u in opened), Fraction(0))
    route = Fraction(0)
    hold = Fraction(0)
    for d in deliveries:
        route += len(d.trips) * _w(instance, d.facility, d.client)
        for trip in d.trips:
            for t, a in trip:
                hold += a * _h(instance, d.client, d.day, t)
    return Schedule(opened, deliveries, fac, route, hold)


def fill_trips(pieces: list[tuple[int, Fraction]], capacity: Fraction | None) -> tuple[Trip, ...]:
    """Load ``pieces`` into as few trips as possible, splitting across trips.

    Uncapacitated deliveries use a single trip.
    """
    if capacity is None:
        return (tuple(pieces),)
    trips: list[list[tuple[int, Fraction]]] = [[]]
    room = capacity
    for t, a in pieces:
        while a > 0:
            if room == 0:
                trips.append([])
                room = capacity
            take = min(a, room)
            trips[-1].append((t, take))
            a -= take
            room -= take
    return tuple(tuple(tr) for tr in trips if tr)


def check_schedule(instance: Instance | IapInstance, schedule: Schedule,
                   *, unsplittable: bool | None = None) -> list[str]:
    """List feasibility violations; empty means the schedule is feasible."""
    p: list[str] = []
    iap = isinstance(instance, IapInstance)
    U = instance.capacity
    if unsplittable is None:
        unsplittable = instance.variant.value == "CAP_UNSPLIT"
    got: dict[tuple[int, int], Fraction] = {}
    pieces: dict[tuple[int, int], list[Fraction]] = {}
    for d in schedule.deliveries:
        if not iap and d.facility not in schedule.opened:
            p.append(f"delivery from unopened facility {d.facility}")
        for k, trip in enumerate(d.trips):
            load = sum((a for _, a in trip), Fraction(0))
            if instance.variant.capacitated and U is not None and load > U:
                p.append(f"trip {k} to {d.client} on day {d.day} carries {load} > {U}")
            for t, a in trip:
                if a <= 0:
                    p.append(f"non-positive piece for ({d.client},{t})")
                if d.day > t:
                    p.append(f"demand ({d.client},{t}) delivered late on day {d.day}")
                got[(d.client, t)] = got.get((d.client, t), Fraction(0)) + a
                pieces.setdefault((d.client, t), []).append(a)
    if iap:
        want: dict[tuple[int, int], Fraction] = {}
        items: dict[tuple[int, int], list[Fraction]] = {}
        for t, a in instance.demands:
            want[(IAP_CLIENT, t)] = want.get((IAP_CLIENT, t), Fraction(0)) + a
            items.setdefault((IAP_CLIENT, t), []).append(a)
    else:
        want = dict(instance.demands)
        items = {k: [a] for k, a in want.items()}
    for k in sorted(set(want) | set(got)):
        if got.get(k, 0) != want.get(k, 0):
            p.append(f"demand {k} receives {got.get(k, 0)} instead of {want.get(k, 0)}")
    if unsplittable:
        for k, lst in items.items():
            if Counter(pieces.get(k, [])) != Counter(lst):
                p.append(f"demand {k} is split across trips")
    recomputed = make_schedule(instance, schedule.opened, schedule.deliveries)
    if (recomputed.facility_cost, recomputed.routing_cost, recomputed.holding_cost) != (
            schedule.facility_cost, schedule.routing_cost, schedule.holding_cost):
        p.append("stored costs do not match the deliveries")
    return p


# --------------------------------------------------------------------------
# export


def schedule_to_dict(schedule: Schedule) -> dict:
    return {
        "opened": sorted(schedule.opened),
        "deliveries": [
            {
                "client": d.client,
                "day": d.day,
                "facility": d.facility,
                "trips": [str(x) for x in d.loads],
                "delivered": {str(t): str(a) for t, a in sorted(d.delivered.items())},
            }
            for d in schedule.deliveries
        ],
        "costs": {
            "facility": str(schedule.facility_cost),
            "routing": str(schedule.routing_cost),
            "holding": str(schedule.holding_cost),
            "total": str(schedule.total),
        },
    }


def schedule_to_json(schedule: Schedule) -> str:
    return json.dumps(schedule_to_dict(schedule), indent=2) + "\n"


CSV_COLUMNS = ["client", "day", "facility", "trip", "load", "pieces"]


def schedule_to_csv(schedule: Schedule) -> str:
    """One row per trip; ``pieces`` lists ``deadline:amount`` pairs."""
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(CSV_COLUMNS)
    for d in schedule.deliveries:
        for k, trip in enumerate(d.trips):
            load = sum((a for _, a in trip), Fraction(0))
            wr.writerow([d.client, d.day, d.facility, k, str(load),
                         " ".join(f"{t}:{a}" for t, a in trip)])
    return buf.getvalue()
