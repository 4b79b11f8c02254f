"""Problem data for star inventory routing with facility location.

Two instance types live here: :class:`Instance` for the multi-client problem
with facility opening decisions, and :class:`IapInstance` for the single
depot, single client access problem.  All numbers are exact
:class:`~fractions.Fraction` values.
"""

from __future__ import annotations

import enum
import json
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping


class Variant(str, enum.Enum):
    UNCAP = "UNCAP"
    CAP_SPLIT = "CAP_SPLIT"
    CAP_UNSPLIT = "CAP_UNSPLIT"

    @property
    def capacitated(self) -> bool:
        return self is not Variant.UNCAP


class InstanceError(ValueError):
    """Raised when an instance violates the model assumptions."""

    def __init__(self, problems: list[str]):
        self.problems = problems
        super().__init__("; ".join(problems))


class ParseError(ValueError):
    def __init__(self, message: str, field: str | None = None, line: int | None = None):
        self.field = field
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)


def _frac(x) -> Fraction:
    if isinstance(x, float):
        raise TypeError("floats are not accepted; use Fraction, int or 'p/q' strings")
    return Fraction(x)


@dataclass(frozen=True, eq=True)
class Instance:
    """A star inventory routing instance with facility location.

    Vertices are ``0..n-1``; days are ``1..horizon``.  ``demands`` maps
    ``(v, t)`` to the amount due at ``v`` by day ``t`` and ``holding`` maps
    ``(v, s, t)`` to the unit cost of delivering that demand on day ``s``.
    """

    n: int
    weights: tuple[tuple[Fraction, ...], ...]
    horizon: int
    demands: Mapping[tuple[int, int], Fraction]
    holding: Mapping[tuple[int, int, int], Fraction]
    facility_costs: tuple[Fraction, ...]
    capacity: Fraction | None = None
    variant: Variant = Variant.UNCAP

    @classmethod
    def create(cls, weights, demands, holding, facility_costs, horizon=None,
               capacity=None, variant=Variant.UNCAP) -> "Instance":
        """Build an instance from loosely typed data, converting to rationals.

        Zero demands are dropped together with their holding rows.
        """
        w = tuple(tuple(_frac(x) for x in row) for row in weights)
        d = {(int(v), int(t)): _frac(a) for (v, t), a in dict(demands).items()}
        d = {k: a for k, a in sorted(d.items()) if a != 0}
        h = {(int(v), int(s), int(t)): _frac(c) for (v, s, t), c in dict(holding).items()}
        h = {k: c for k, c in sorted(h.items()) if (k[0], k[2]) in d}
        if horizon is None:
            horizon = max((t for _, t in d), default=1)
        return cls(
            n=len(w),
            weights=w,
            horizon=int(horizon),
            demands=d,
            holding=h,
            facility_costs=tuple(_frac(f) for f in facility_costs),
            capacity=None if capacity is None else _frac(capacity),
            variant=Variant(variant),
        )

    @property
    def clients(self) -> list[int]:
        return sorted({v for v, _ in self.demands})

    def demand_days(self, v: int) -> list[int]:
        return sorted(t for (u, t) in self.demands if u == v)

    def w(self, u: int, v: int) -> Fraction:
        return self.weights[u][v]

    def h(self, v: int, s: int, t: int) -> Fraction:
        return self.holding[(v, s, t)]

    def H(self, v: int, s: int, t: int) -> Fraction:
        """Holding cost of delivering all of demand ``(v, t)`` on day ``s``."""
        return self.demands[(v, t)] * self.holding[(v, s, t)]

    def client_iap(self, v: int, distance) -> "IapInstance":
        """The access problem left for client ``v`` once its depot is fixed."""
        days = self.demand_days(v)
        return IapInstance.create(
            distance=distance,
            horizon=self.horizon,
            demands=[(t, self.demands[(v, t)]) for t in days],
            holding={(s, t): self.holding[(v, s, t)] for t in days for s in range(1, t + 1)},
            capacity=self.capacity,
            variant=self.variant,
        )

    def scaled(self, c) -> "Instance":
        c = _frac(c)
        return Instance(
            n=self.n,
            weights=tuple(tuple(c * x for x in row) for row in self.weights),
            horizon=self.horizon,
            demands=dict(self.demands),
            holding={k: c * x for k, x in self.holding.items()},
            facility_costs=tuple(c * f for f in self.facility_costs),
            capacity=self.capacity,
            variant=self.variant,
        )


@dataclass(frozen=True, eq=True)
class IapInstance:
    """Single depot, single client instance.

    ``demands`` is a tuple of ``(deadline, amount)`` items.  Several items may
    share a deadline; they only differ from one merged demand when trips are
    unsplittable.
    """

    distance: Fraction
    horizon: int
    demands: tuple[tuple[int, Fraction], ...]
    holding: Mapping[tuple[int, int], Fraction]
    capacity: Fraction | None = None
    variant: Variant = Variant.UNCAP

    @classmethod
    def create(cls, distance, demands, holding, horizon=None, capacity=None,
               variant=Variant.UNCAP) -> "IapInstance":
        if isinstance(demands, Mapping):
            demands = demands.items()
        items = tuple((int(t), _frac(a)) for t, a in demands)
        items = tuple(it for it in items if it[1] != 0)
        days = {t for t, _ in items}
        h = {(int(s), int(t)): _frac(c) for (s, t), c in dict(holding).items()}
        h = {k: c for k, c in sorted(h.items()) if k[1] in days}
        if horizon is None:
            horizon = max(days, default=1)
        return cls(
            distance=_frac(distance),
            horizon=int(horizon),
            demands=items,
            holding=h,
            capacity=None if capacity is None else _frac(capacity),
            variant=Variant(variant),
        )

    @property
    def demand_days(self) -> list[int]:
        return sorted({t for t, _ in self.demands})

    def day_demand(self, t: int) -> Fraction:
        return sum((a for u, a in self.demands if u == t), Fraction(0))

    def h(self, s: int, t: int) -> Fraction:
        return self.holding[(s, t)]


def _check_holding(problems, label, demand_days, horizon, h):
    # h(s, t) lookup; label(s, t) formats the location
    for t in demand_days:
        prev = None
        for s in range(1, t + 1):
            c = h(s, t)
            if c is None:
                problems.append(f"holding missing at {label(s, t)}")
                prev = None
                continue
            if c < 0:
                problems.append(f"holding negative at {label(s, t)}")
            if prev is not None and c > prev:
                problems.append(f"holding not monotone at {label(s, t)}")
            prev = c


def validate(instance: Instance | IapInstance) -> list[str]:
    """Return a list of human readable violations; empty means valid."""
    if isinstance(instance, IapInstance):
        return _validate_iap(instance)
    p: list[str] = []
    n, T = instance.n, instance.horizon
    if n < 1:
        p.append("instance has no vertices")
    if T < 1:
        p.append("horizon must be at least 1")
    if len(instance.weights) != n or any(len(r) != n for r in instance.weights):
        p.append("weights must be an n x n matrix")
        return p
    w = instance.weights
    for u in range(n):
        if w[u][u] != 0:
            p.append(f"weight w[{u}][{u}] must be zero")
        for v in range(n):
            if w[u][v] < 0:
                p.append(f"weight w[{u}][{v}] is negative")
            if w[u][v] != w[v][u]:
                p.append(f"weights not symmetric at ({u},{v})")
    for a in range(n):
        for b in range(n):
            for c in range(n):
                if w[a][c] > w[a][b] + w[b][c]:
                    p.append(f"weights violate triangle inequality at ({a},{b},{c})")
    if len(instance.facility_costs) != n:
        p.append("facility_costs must have n entries")
    elif any(f < 0 for f in instance.facility_costs):
        p.append("facility cost is negative")
    U = instance.capacity
    if instance.variant.capacitated and (U is None or U <= 0):
        p.append("capacitated variant needs a positive capacity")
        U = None
    for (v, t), d in instance.demands.items():
        if not 0 <= v < n:
            p.append(f"demand at unknown vertex {v}")
        if not 1 <= t <= T:
            p.append(f"demand day {t} outside horizon at ({v},{t})")
        if d <= 0:
            p.append(f"demand not positive at ({v},{t})")
        if instance.variant.capacitated and U is not None and d > U:
            p.append(f"demand exceeds capacity at ({v},{t})")
    for v in instance.clients:
        _check_holding(
            p, lambda s, t, v=v: f"({v},{s},{t})", instance.demand_days(v), T,
            lambda s, t, v=v: instance.holding.get((v, s, t)),
        )
    return p


def _validate_iap(iap: IapInstance) -> list[str]:
    p: list[str] = []
    if iap.distance < 0:
        p.append("distance is negative")
    if iap.horizon < 1:
        p.append("horizon must be at least 1")
    U = iap.capacity
    if iap.variant.capacitated and (U is None or U <= 0):
        p.append("capacitated variant needs a positive capacity")
        U = None
    for t, d in iap.demands:
        if not 1 <= t <= iap.horizon:
            p.append(f"demand day {t} outside horizon")
        if d <= 0:
            p.append(f"demand not positive at day {t}")
        if iap.variant.capacitated and U is not None and d > U:
            p.append(f"demand exceeds capacity at day {t}")
    _check_holding(p, lambda s, t: f"({s},{t})", iap.demand_days, iap.horizon,
                   lambda s, t: iap.holding.get((s, t)))
    return p


def require_valid(instance: Instance | IapInstance) -> None:
    problems = validate(instance)
    if problems:
        raise InstanceError(problems)


# --------------------------------------------------------------------------
# random generation


@dataclass
class GeneratorParams:
    n: int
    T: int
    demand_density: float = 0.5
    weight_range: tuple[int, int] = (0, 10)
    facility_range: tuple[int, int] = (0, 20)
    holding_slope_range: tuple[int, int] = (0, 4)
    demand_range: tuple[int, int] = (1, 5)
    capacity: Fraction | int | None = None
    variant: Variant = Variant.UNCAP
    max_demands: int | None = None


def _random_demands(rng: random.Random, keys: list, density: float, lo: int, hi: int,
                    max_demands: int | None) -> dict:
    chosen = [k for k in keys if rng.random() < density]
    if not chosen:
        chosen = [rng.choice(keys)]
    if max_demands is not None and len(chosen) > max_demands:
        chosen = sorted(rng.sample(chosen, max_demands))
    return {k: Fraction(rng.randint(lo, hi)) for k in chosen}


def _demand_bounds(lo: int, hi: int, variant: Variant, capacity) -> tuple[int, int]:
    if variant.capacitated:
        if capacity is None:
            raise ValueError("capacitated variant needs a capacity")
        cap = int(Fraction(capacity))
        hi = min(hi, cap)
        lo = min(lo, hi)
    return lo, hi


def generate_random(params: GeneratorParams, seed: int) -> Instance:
    """Seeded random metric instance.

    Vertices are integer points in the plane under the L1 metric, so the
    weights are integral and satisfy the triangle inequality exactly.
    Holding costs are ``slope_v * (t - s)`` with a per-client rational slope.
    """
    if params.n < 1 or params.T < 1:
        raise ValueError("need n >= 1 and T >= 1")
    if not 0 < params.demand_density <= 1:
        raise ValueError("demand_density must lie in (0, 1]")
    rng = random.Random(seed)
    variant = Variant(params.variant)
    lo, hi = params.weight_range
    span = max(hi - lo, 0)
    pts = [(rng.randint(0, span), rng.randint(0, span)) for _ in range(params.n)]
    weights = [[Fraction(abs(a[0] - b[0]) + abs(a[1] - b[1])) for b in pts] for a in pts]
    if lo > 0:
        # shifting off-diagonal entries by a constant keeps the triangle inequality
        weights = [[x + (lo if i != j else 0) for j, x in enumerate(r)] for i, r in enumerate(weights)]
    fac = [Fraction(rng.randint(*params.facility_range)) for _ in range(params.n)]
    dlo, dhi = _demand_bounds(*params.demand_range, variant, params.capacity)
    keys = [(v, t) for v in range(params.n) for t in range(1, params.T + 1)]
    demands = _random_demands(rng, keys, params.demand_density, dlo, dhi, params.max_demands)
    slopes = {v: Fraction(rng.randint(2 * params.holding_slope_range[0],
                                      2 * params.holding_slope_range[1]), 2)
              for v in range(params.n)}
    holding = {(v, s, t): slopes[v] * (t - s) for (v, t) in demands for s in range(1, t + 1)}
    return Instance.create(
        weights=weights, demands=demands, holding=holding, facility_costs=fac,
        horizon=params.T,
        capacity=params.capacity if variant.capacitated else None,
        variant=variant,
    )


@dataclass
class IapGeneratorParams:
    T: int
    demand_density: float = 0.6
    distance_range: tuple[int, int] = (1, 10)
    holding_slope_range: tuple[int, int] = (0, 4)
    demand_range: tuple[int, int] = (1, 5)
    capacity: Fraction | int | None = None
    variant: Variant = Variant.UNCAP
    items_per_day: int = 1


def generate_random_iap(params: IapGeneratorParams, seed: int) -> IapInstance:
    """Seeded random access-problem instance.

    Each demand day gets ``1..items_per_day`` items.  Holding is linear in the
    lead time ``t - s`` with a global slope plus a random per-deadline extra,
    so it is non-increasing in ``s``.
    """
    if params.T < 1:
        raise ValueError("need T >= 1")
    if not 0 < params.demand_density <= 1:
        raise ValueError("demand_density must lie in (0, 1]")
    rng = random.Random(seed)
    variant = Variant(params.variant)
    dlo, dhi = _demand_bounds(*params.demand_range, variant, params.capacity)
    days = [t for t in range(1, params.T + 1) if rng.random() < params.demand_density]
    if not days:
        days = [rng.randint(1, params.T)]
    items = []
    for t in days:
        for _ in range(rng.randint(1, params.items_per_day)):
            items.append((t, Fraction(rng.randint(dlo, dhi))))
    slope = Fraction(rng.randint(2 * params.holding_slope_range[0],
                                 2 * params.holding_slope_range[1]), 2)
    holding = {}
    for t in days:
        bump = Fraction(rng.randint(0, 4), 4)
        for s in range(1, t + 1):
            holding[(s, t)] = slope * (t - s) + (bump * (t - s) if s < t else 0)
    return IapInstance.create(
        distance=rng.randint(*params.distance_range),
        demands=items, holding=holding, horizon=params.T,
        capacity=params.capacity if variant.capacitated else None,
        variant=variant,
    )


def make_partition_gadget(S: Iterable[int], w) -> IapInstance:
    """Unsplittable access instance whose optimum is ``2w`` iff ``S`` splits evenly.

    Every element becomes a day-1 demand, the vehicle capacity is half the
    total and holding is free.
    """
    S = [int(a) for a in S]
    if any(a <= 0 for a in S):
        raise ValueError("elements must be positive integers")
    w = _frac(w)
    if w <= 0:
        raise ValueError("distance must be positive")
    U = Fraction(sum(S), 2)
    big = [a for a in S if a > U]
    if big:
        raise ValueError(f"element {big[0]} exceeds half the total {U}")
    return IapInstance.create(
        distance=w,
        demands=[(1, a) for a in S],
        holding={(1, 1): 0},
        horizon=1,
        capacity=U if S else 1,
        variant=Variant.CAP_UNSPLIT,
    )


# --------------------------------------------------------------------------
# text format


def _q(x: Fraction | None) -> str | None:
    return None if x is None else str(x)


def _dump_lines(doc: dict) -> str:
    # one top-level key per line, list entries one per line
    out = ["{"]
    keys = list(doc)
    for i, k in enumerate(keys):
        v = doc[k]
        sep = "," if i < len(keys) - 1 else ""
        if isinstance(v, list) and v:
            out.append(f"  {json.dumps(k)}: [")
            for j, item in enumerate(v):
                comma = "," if j < len(v) - 1 else ""
                out.append(f"    {json.dumps(item)}{comma}")
            out.append(f"  ]{sep}")
        else:
            out.append(f"  {json.dumps(k)}: {json.dumps(v)}{sep}")
    out.append("}")
    return "\n".join(out) + "\n"


def serialize(instance: Instance | IapInstance) -> str:
    if isinstance(instance, IapInstance):
        doc = {
            "kind": "iap",
            "T": instance.horizon,
            "variant": instance.variant.value,
            "capacity": _q(instance.capacity),
            "distance": _q(instance.distance),
            "demands": [{"t": t, "d": _q(d)} for t, d in instance.demands],
            "holding": [{"s": s, "t": t, "h": _q(h)} for (s, t), h in sorted(instance.holding.items())],
        }
        return _dump_lines(doc)
    doc = {
        "n": instance.n,
        "T": instance.horizon,
        "variant": instance.variant.value,
        "capacity": _q(instance.capacity),
        "weights": [[_q(x) for x in row] for row in instance.weights],
        "facility_costs": [_q(f) for f in instance.facility_costs],
        "demands": [{"v": v, "t": t, "d": _q(d)} for (v, t), d in sorted(instance.demands.items())],
        "holding": [{"v": v, "s": s, "t": t, "h": _q(h)}
                    for (v, s, t), h in sorted(instance.holding.items())],
    }
    return _dump_lines(doc)


class _Reader:
    def __init__(self, text: str):
        self.lines = text.splitlines()

    def line_of(self, list_name: str, index: int) -> int | None:
        # locate the index-th entry of a top-level list in the canonical layout
        start = None
        for i, ln in enumerate(self.lines):
            if ln.strip().startswith(f'"{list_name}"'):
                start = i
                break
        if start is None:
            return None
        pos = start + 1 + index
        return pos + 1 if pos < len(self.lines) else None

    def rational(self, x, fld: str, *, nonneg=True, positive=False, line=None) -> Fraction:
        if isinstance(x, bool) or isinstance(x, float) or not isinstance(x, (str, int)):
            raise ParseError(f"expected a rational string, got {x!r}", fld, line)
        try:
            q = Fraction(x)
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"malformed rational {x!r}", fld, line) from None
        if positive and q <= 0:
            raise ParseError(f"must be positive, got {x}", fld, line)
        if nonneg and q < 0:
            raise ParseError(f"must be nonnegative, got {x}", fld, line)
        return q

    def integer(self, x, fld: str, lo: int, hi: int | None = None, line=None) -> int:
        if isinstance(x, bool) or not isinstance(x, int):
            raise ParseError(f"expected an integer, got {x!r}", fld, line)
        if x < lo or (hi is not None and x > hi):
            raise ParseError(f"value {x} outside [{lo}, {hi if hi is not None else 'inf'}]", fld, line)
        return x


def parse(text: str) -> Instance | IapInstance:
    """Parse the JSON instance format; errors name the offending field."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, None, e.lineno) from None
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object")
    r = _Reader(text)

    def need(key):
        if key not in doc:
            raise ParseError("missing field", key)
        return doc[key]

    T = r.integer(need("T"), "T", 1)
    try:
        variant = Variant(need("variant"))
    except ValueError:
        raise ParseError(f"unknown variant {doc['variant']!r}", "variant") from None
    cap = need("capacity")
    capacity = None if cap is None else r.rational(cap, "capacity", positive=True)

    if doc.get("kind") == "iap":
        distance = r.rational(need("distance"), "distance")
        items = []
        for i, e in enumerate(need("demands")):
            ln = r.line_of("demands", i)
            t = r.integer(e.get("t"), f"demands[{i}].t", 1, T, ln)
            d = r.rational(e.get("d"), f"demands[{i}].d", line=ln)
            items.append((t, d))
        holding = {}
        for i, e in enumerate(need("holding")):
            ln = r.line_of("holding", i)
            t = r.integer(e.get("t"), f"holding[{i}].t", 1, T, ln)
            s = r.integer(e.get("s"), f"holding[{i}].s", 1, t, ln)
            holding[(s, t)] = r.rational(e.get("h"), f"holding[{i}].h", line=ln)
        return IapInstance.create(distance=distance, demands=items, holding=holding,
                                  horizon=T, capacity=capacity, variant=variant)

    n = r.integer(need("n"), "n", 1)
    raw_w = need("weights")
    if not isinstance(raw_w, list) or len(raw_w) != n:
        raise ParseError(f"expected {n} rows", "weights")
    weights = []
    for i, row in enumerate(raw_w):
        if not isinstance(row, list) or len(row) != n:
            raise ParseError(f"expected {n} entries", f"weights[{i}]", r.line_of("weights", i))
        weights.append([r.rational(x, f"weights[{i}][{j}]", line=r.line_of("weights", i))
                        for j, x in enumerate(row)])
    raw_f = need("facility_costs")
    if not isinstance(raw_f, list) or len(raw_f) != n:
        raise ParseError(f"expected {n} entries", "facility_costs")
    fac = [r.rational(x, f"facility_costs[{i}]") for i, x in enumerate(raw_f)]
    demands = {}
    for i, e in enumerate(need("demands")):
        ln = r.line_of("demands", i)
        v = r.integer(e.get("v"), f"demands[{i}].v", 0, n - 1, ln)
        t = r.integer(e.get("t"), f"demands[{i}].t", 1, T, ln)
        if (v, t) in demands:
            raise ParseError(f"duplicate demand ({v},{t})", f"demands[{i}]", ln)
        demands[(v, t)] = r.rational(e.get("d"), f"demands[{i}].d", line=ln)
    holding = {}
    for i, e in enumerate(need("holding")):
        ln = r.line_of("holding", i)
        v = r.integer(e.get("v"), f"holding[{i}].v", 0, n - 1, ln)
        t = r.integer(e.get("t"), f"holding[{i}].t", 1, T, ln)
        s = r.integer(e.get("s"), f"holding[{i}].s", 1, t, ln)
        holding[(v, s, t)] = r.rational(e.get("h"), f"holding[{i}].h", line=ln)
    return Instance.create(weights=weights, demands=demands, holding=holding,
                           facility_costs=fac, horizon=T, capacity=capacity, variant=variant)


def load(path) -> Instance | IapInstance:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


def dump(instance: Instance | IapInstance, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize(instance))
