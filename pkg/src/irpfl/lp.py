"""LP relaxations for the star inventory routing problems and their exact solve.

Variables carry semantic tags:

* ``("Z", u)``                 facility opened at ``u``
* ``("Ys", u, v, s)``          trips from facility ``u`` to client ``v`` on day ``s``
* ``("Yst", u, v, s, t)``      share of demand ``(v, t)`` sent from ``u`` on day ``s``
* ``("X", v, s, t)``           share of demand ``(v, t)`` delivered on day ``s``
* ``("Y", s)`` / ``("X", s, t)``  the access-problem trip and delivery variables
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable, Mapping

from .instance import IapInstance, Instance, Variant
from .simplex import Infeasible, LpError, Unbounded, solve_standard

__all__ = [
    "Constraint", "LpModel", "LpSolution", "LpError", "Infeasible", "Unbounded",
    "build_usirpfl_lp", "build_csiap_lp", "build_cssirpfl_lp", "solve_lp", "export_lp",
    "usirpfl_variable_count",
]

COST_FAMILY = {"Z": "facility", "Ys": "routing", "Y": "routing", "X": "holding"}


@dataclass
class Constraint:
    coeffs: dict[int, Fraction]
    relation: str
    rhs: Fraction
    family: str = ""


@dataclass
class LpModel:
    kind: str = "generic"
    variables: list[Hashable] = field(default_factory=list)
    objective: list[Fraction] = field(default_factory=list)
    constraints: list[Constraint] = field(default_factory=list)
    source: Instance | IapInstance | None = None
    index: dict[Hashable, int] = field(default_factory=dict)

    def add_variable(self, tag: Hashable, cost=0) -> int:
        if tag in self.index:
            raise ValueError(f"duplicate variable {tag!r}")
        self.index[tag] = len(self.variables)
        self.variables.append(tag)
        self.objective.append(Fraction(cost))
        return self.index[tag]

    def add_constraint(self, terms: Mapping[Hashable, object] | Iterable[tuple[Hashable, object]],
                       relation: str, rhs=0, family: str = "") -> Constraint:
        """Add ``sum(coef * var) relation rhs``; ``<=`` is stored negated as ``>=``."""
        items = terms.items() if isinstance(terms, Mapping) else terms
        coeffs: dict[int, Fraction] = {}
        for tag, a in items:
            j = self.index[tag]
            coeffs[j] = coeffs.get(j, Fraction(0)) + Fraction(a)
        coeffs = {j: a for j, a in coeffs.items() if a != 0}
        rhs = Fraction(rhs)
        if relation == "<=":
            coeffs = {j: -a for j, a in coeffs.items()}
            rhs, relation = -rhs, ">="
        if relation not in (">=", "="):
            raise ValueError(f"bad relation {relation!r}")
        con = Constraint(coeffs, relation, rhs, family)
        self.constraints.append(con)
        return con

    def family_counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for c in self.constraints:
            out[c.family] = out.get(c.family, 0) + 1
        return out


@dataclass
class LpSolution:
    model: LpModel
    values: dict[Hashable, Fraction]
    objective: Fraction
    facility_cost: Fraction
    routing_cost: Fraction
    holding_cost: Fraction
    iterations: int = 0

    def value(self, tag: Hashable) -> Fraction:
        return self.values.get(tag, Fraction(0))


# --------------------------------------------------------------------------
# builders


def usirpfl_variable_count(instance: Instance) -> int:
    n, T = instance.n, instance.horizon
    st = sum(t for _, t in instance.demands)
    return n + n * n * T + n * st + st


def _star_core(instance: Instance, kind: str, with_intervals: bool) -> LpModel:
    inst = instance
    n, T = inst.n, inst.horizon
    D = sorted(inst.demands)
    m = LpModel(kind=kind, source=inst)
    for u in range(n):
        m.add_variable(("Z", u), inst.facility_costs[u])
    for u in range(n):
        for v in range(n):
            for s in range(1, T + 1):
                m.add_variable(("Ys", u, v, s), inst.w(u, v))
    for v, t in D:
        for u in range(n):
            for s in range(1, t + 1):
                m.add_variable(("Yst", u, v, s, t))
    for v, t in D:
        for s in range(1, t + 1):
            m.add_variable(("X", v, s, t), inst.H(v, s, t))

    for v, t in D:
        m.add_constraint({("X", v, s, t): 1 for s in range(1, t + 1)}, ">=", 1, "service")
    for v, t in D:
        for s in range(1, t + 1):
            terms = [(("Yst", u, v, s, t), 1) for u in range(n)]
            terms.append((("X", v, s, t), -1))
            m.add_constraint(terms, ">=", 0, "connection")
    for v, t in D:
        for u in range(n):
            terms = [(("Z", u), 1)] + [(("Yst", u, v, s, t), -1) for s in range(1, t + 1)]
            m.add_constraint(terms, ">=", 0, "facility_demand")
    for v, t in D:
        for u in range(n):
            for s in range(1, t + 1):
                m.add_constraint({("Ys", u, v, s): 1, ("Yst", u, v, s, t): -1}, ">=", 0, "edge")
    if with_intervals:
        for u in range(n):
            for v in range(n):
                for s in range(1, T + 1):
                    m.add_constraint({("Z", u): 1, ("Ys", u, v, s): -1}, ">=", 0, "facility_edge")
        for v in inst.clients:
            days = inst.demand_days(v)
            for a, t1 in enumerate(days):
                for t2 in days[a + 1:]:
                    for sp in range(1, t1 + 1):
                        terms = [(("Yst", u, v, s, t2), 1) for u in range(n) for s in range(sp, t2 + 1)]
                        terms += [(("Yst", u, v, s, t1), -1) for u in range(n) for s in range(sp, t1 + 1)]
                        m.add_constraint(terms, ">=", 0, "intervals")
    return m


def build_usirpfl_lp(instance: Instance) -> LpModel:
    """Relaxation for the uncapacitated star problem with facility location."""
    if instance.variant is not Variant.UNCAP:
        raise ValueError("build_usirpfl_lp needs an uncapacitated instance")
    return _star_core(instance, "usirpfl", with_intervals=True)


def build_cssirpfl_lp(instance: Instance) -> LpModel:
    """Relaxation for the capacitated splittable star problem.

    Adds two capacity families to the shared service, connection and
    facility rows.  The ordering rows and the ``z_u >= y^{uv}_s`` rows are
    left out: the latter would cap a single facility-client pair at one trip
    per day, which cuts off integral schedules that need several trips.
    """
    if not instance.variant.capacitated or instance.capacity is None:
        raise ValueError("build_cssirpfl_lp needs a capacitated instance")
    m = _star_core(instance, "cssirpfl", with_intervals=False)
    m.kind = "cssirpfl"
    inst = instance
    U = inst.capacity
    n, T = inst.n, inst.horizon
    for v in range(n):
        for s in range(1, T + 1):
            load = [(("X", v, s, t), -inst.demands[(v, t)] / U) for t in inst.demand_days(v) if t >= s]
            if not load:
                continue
            terms = [(("Ys", u, v, s), 1) for u in range(n)] + load
            m.add_constraint(terms, ">=", 0, "client_capacity")
    for u in range(n):
        for v in range(n):
            for s in range(1, T + 1):
                load = [(("Yst", u, v, s, t), -inst.demands[(v, t)] / U)
                        for t in inst.demand_days(v) if t >= s]
                if not load:
                    continue
                m.add_constraint([(("Ys", u, v, s), 1)] + load, ">=", 0, "edge_capacity")
    return m


def build_csiap_lp(iap: IapInstance) -> LpModel:
    """Relaxation for the capacitated access problem (split deliveries allowed).

    Items sharing a deadline are merged into one day demand ``d_t``.
    """
    if iap.capacity is None:
        raise ValueError("build_csiap_lp needs a capacity")
    U, W, T = iap.capacity, iap.distance, iap.horizon
    days = iap.demand_days
    d = {t: iap.day_demand(t) for t in days}
    m = LpModel(kind="csiap", source=iap)
    for s in range(1, T + 1):
        m.add_variable(("Y", s), W)
    for t in days:
        for s in range(1, t + 1):
            m.add_variable(("X", s, t), iap.h(s, t) * d[t])
    for t in days:
        m.add_constraint({("X", s, t): 1 for s in range(1, t + 1)}, ">=", 1, "service")
    for s in range(1, T + 1):
        load = [(("X", s, t), -d[t] / U) for t in days if t >= s]
        m.add_constraint([(("Y", s), 1)] + load, ">=", 0, "capacity")
    for t in days:
        for s in range(1, t + 1):
            m.add_constraint({("Y", s): 1, ("X", s, t): -1}, ">=", 0, "trip")
    return m


# --------------------------------------------------------------------------
# solving


def _family(tag) -> str | None:
    if isinstance(tag, tuple) and tag:
        return COST_FAMILY.get(tag[0])
    return None


def solve_lp(model: LpModel, *, rule: str = "bland", max_iter: int | None = None) -> LpSolution:
    """Exact optimal basic solution of ``model``.

    Every constraint is re-checked by substitution before returning.
    """
    rows = [c.coeffs for c in model.constraints]
    rel = [c.relation for c in model.constraints]
    rhs = [c.rhs for c in model.constraints]
    res = solve_standard(model.objective, rows, rel, rhs, rule=rule, max_iter=max_iter)
    x = res.x
    for k, c in enumerate(model.constraints):
        lhs = sum((a * x[j] for j, a in c.coeffs.items()), Fraction(0))
        ok = lhs == c.rhs if c.relation == "=" else lhs >= c.rhs
        if not ok:
            raise LpError(f"constraint {k} ({c.family}) violated after solve")
    if any(v < 0 for v in x):
        raise LpError("negative variable after solve")
    parts = {"facility": Fraction(0), "routing": Fraction(0), "holding": Fraction(0)}
    obj = Fraction(0)
    for j, tag in enumerate(model.variables):
        term = model.objective[j] * x[j]
        obj += term
        fam = _family(tag)
        if fam is not None:
            parts[fam] += term
    if obj != res.objective:
        raise LpError("objective mismatch after solve")
    values = {tag: x[j] for j, tag in enumerate(model.variables)}
    return LpSolution(model=model, values=values, objective=obj,
                      facility_cost=parts["facility"], routing_cost=parts["routing"],
                      holding_cost=parts["holding"], iterations=res.iterations)


def _name(tag) -> str:
    if isinstance(tag, tuple):
        return "_".join(str(p) for p in tag)
    return str(tag)


def _dec(x: Fraction) -> str:
    return format(float(x), ".15g")


def export_lp(model: LpModel) -> str:
    """Free-format MPS text of ``model``.

    Coefficients are decimal approximations with 15 significant digits, so
    the export is for cross-checking only and a warning is issued.
    """
    warnings.warn("LP export rounds rationals to 15 significant digits", stacklevel=2)
    names = [_name(t) for t in model.variables]
    out = [
        "* approximate export: rationals rounded to 15 significant digits",
        f"NAME {model.kind}",
        "ROWS",
        " N  COST",
    ]
    for i, c in enumerate(model.constraints):
        out.append(f" {'G' if c.relation == '>=' else 'E'}  R{i}")
    cols: dict[int, list[tuple[str, Fraction]]] = {j: [] for j in range(len(names))}
    for j, cst in enumerate(model.objective):
        if cst != 0:
            cols[j].append(("COST", cst))
    for i, c in enumerate(model.constraints):
        for j, a in c.coeffs.items():
            cols[j].append((f"R{i}", a))
    out.append("COLUMNS")
    for j, name in enumerate(names):
        for row, a in cols[j]:
            out.append(f"    {name}  {row}  {_dec(a)}")
    out.append("RHS")
    for i, c in enumerate(model.constraints):
        if c.rhs != 0:
            out.append(f"    RHS  R{i}  {_dec(c.rhs)}")
    out.append("ENDATA")
    return "\n".join(out) + "\n"
