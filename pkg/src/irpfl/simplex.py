"""Two-phase primal simplex over exact rationals.

The tableau is stored row-wise as sparse dicts of ``gmpy2.mpq`` entries.
Pivoting follows Bland's rule by default: the entering column is the lowest
index with negative reduced cost, and ratio-test ties leave by the lowest
basic index.  That rule cannot cycle, so the loop terminates on degenerate
problems.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from gmpy2 import mpq

ZERO = mpq(0)


class LpError(RuntimeError):
    pass


class Infeasible(LpError):
    pass


class Unbounded(LpError):
    pass


class IterationLimit(LpError):
    pass


def to_fraction(q) -> Fraction:
    return Fraction(int(q.numerator), int(q.denominator))


@dataclass
class StandardResult:
    x: list[Fraction]
    objective: Fraction
    basis: list[int]
    iterations: int


class _Tableau:
    def __init__(self, rows: list[dict], rhs: list, basis: list[int]):
        self.rows = rows
        self.rhs = rhs
        self.basis = basis
        self.iterations = 0

    def reduced_costs(self, cost: dict) -> tuple[dict, object]:
        d = {j: c for j, c in cost.items() if c != 0}
        z = ZERO
        for i, b in enumerate(self.basis):
            cb = cost.get(b, ZERO)
            if cb == 0:
                continue
            z += cb * self.rhs[i]
            for j, a in self.rows[i].items():
                v = d.get(j, ZERO) - cb * a
                if v == 0:
                    d.pop(j, None)
                else:
                    d[j] = v
        return d, z

    def pivot(self, r: int, q: int, d: dict) -> object:
        """Pivot on (r, q); updates ``d`` in place and returns the change in z."""
        prow = self.rows[r]
        a = prow[q]
        if a != 1:
            inv = 1 / a
            for j in prow:
                prow[j] *= inv
            self.rhs[r] *= inv
        prow[q] = mpq(1)
        br = self.rhs[r]
        items = list(prow.items())
        for i, row in enumerate(self.rows):
            if i == r:
                continue
            f = row.get(q)
            if f is None:
                continue
            for j, v in items:
                nv = row.get(j, ZERO) - f * v
                if nv == 0:
                    row.pop(j, None)
                else:
                    row[j] = nv
            self.rhs[i] -= f * br
        dz = ZERO
        f = d.get(q)
        if f is not None:
            for j, v in items:
                nv = d.get(j, ZERO) - f * v
                if nv == 0:
                    d.pop(j, None)
                else:
                    d[j] = nv
            dz = f * br
        self.basis[r] = q
        self.iterations += 1
        return dz

    def run(self, d: dict, z, allowed: int, rule: str, max_iter: int | None):
        """Minimise until no column ``j < allowed`` has negative reduced cost."""
        while True:
            cand = [j for j, v in d.items() if v < 0 and j < allowed]
            if not cand:
                return z
            if max_iter is not None and self.iterations >= max_iter:
                raise IterationLimit(f"no optimum after {self.iterations} pivots")
            if rule == "bland":
                q = min(cand)
            else:
                q = min(cand, key=lambda j: (d[j], j))
            r = None
            best = None
            for i, row in enumerate(self.rows):
                a = row.get(q)
                if a is None or a <= 0:
                    continue
                ratio = self.rhs[i] / a
                if r is None or ratio < best or (
                        ratio == best and rule == "bland" and self.basis[i] < self.basis[r]):
                    r, best = i, ratio
            if r is None:
                raise Unbounded(f"column {q} is unbounded")
            z = z + self.pivot(r, q, d)


def solve_standard(
    c: Sequence,
    rows: Sequence[dict],
    relations: Sequence[str],
    rhs: Sequence,
    *,
    rule: str = "bland",
    max_iter: int | None = None,
) -> StandardResult:
    """Minimise ``c x`` subject to ``rows[i] . x (>=|=) rhs[i]`` and ``x >= 0``.

    ``rows`` are sparse dicts ``{column: coefficient}``.  Inputs may be ints,
    Fractions or mpq; the result is in Fractions.  ``rule`` is ``"bland"``
    (default) or ``"dantzig"`` (most negative reduced cost, lowest-row ties,
    which may cycle and exists for comparison only).
    """
    if rule not in ("bland", "dantzig"):
        raise ValueError(f"unknown pivot rule {rule!r}")
    n = len(c)
    m = len(rows)
    trows: list[dict] = []
    trhs: list = []
    basis: list[int] = []
    needs_art: list[int] = []
    next_col = n
    for i in range(m):
        row = {j: mpq(v) for j, v in rows[i].items() if v != 0}
        b = mpq(rhs[i])
        rel = relations[i]
        if rel == ">=":
            s = next_col
            next_col += 1
            if b <= 0:
                # -a x + s = -b with the slack basic
                row = {j: -v for j, v in row.items()}
                row[s] = mpq(1)
                b = -b
                basis.append(s)
            else:
                row[s] = mpq(-1)
                basis.append(-1)
                needs_art.append(i)
        elif rel == "=":
            if b < 0:
                row = {j: -v for j, v in row.items()}
                b = -b
            basis.append(-1)
            needs_art.append(i)
        else:
            raise ValueError(f"relation must be '>=' or '=', got {rel!r}")
        trows.append(row)
        trhs.append(b)
    first_art = next_col
    for i in needs_art:
        trows[i][next_col] = mpq(1)
        basis[i] = next_col
        next_col += 1

    tab = _Tableau(trows, trhs, basis)
    if needs_art:
        phase1 = {j: mpq(1) for j in range(first_art, next_col)}
        d, z = tab.reduced_costs(phase1)
        z = tab.run(d, z, next_col, rule, max_iter)
        if z > 0:
            raise Infeasible(f"phase one ended at {to_fraction(z)}")
        # drive zero-valued artificials out of the basis
        i = 0
        while i < len(tab.rows):
            if tab.basis[i] >= first_art:
                cols = [j for j, v in tab.rows[i].items() if j < first_art and v != 0]
                if cols:
                    tab.pivot(i, min(cols), {})
                else:
                    del tab.rows[i], tab.rhs[i], tab.basis[i]
                    continue
            i += 1
        for row in tab.rows:
            for j in [j for j in row if j >= first_art]:
                del row[j]

    cost = {j: mpq(v) for j, v in enumerate(c) if v != 0}
    d, z = tab.reduced_costs(cost)
    z = tab.run(d, z, first_art, rule, max_iter)

    x = [Fraction(0)] * n
    for i, b in enumerate(tab.basis):
        if b < n:
            x[b] = to_fraction(tab.rhs[i])
    return StandardResult(x=x, objective=to_fraction(z), basis=list(tab.basis),
                          iterations=tab.iterations)
