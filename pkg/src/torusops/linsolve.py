"""Exact sparse linear systems over the Gaussian rationals.

Rows are dicts ``{variable: coefficient}``.  Solving runs unit propagation
(equations with a single unknown left are solved outright) before falling
back to Gauss-Jordan elimination with a shortest-row pivot rule, which keeps
fill-in low for the banded systems produced by operator recurrences.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable

from .gaussian import GaussianRational

__all__ = ["SparseSystem", "Solution", "InconsistentSystem"]


class InconsistentSystem(ValueError):
    def __init__(self, row_label):
        super().__init__(f"inconsistent linear system at equation {row_label!r}")
        self.row_label = row_label


@dataclass
class Solution:
    values: dict
    free: list
    rank: int

    @property
    def unique(self) -> bool:
        return not self.free


class SparseSystem:
    def __init__(self, variables):
        self.variables = list(variables)
        self._index = {v: i for i, v in enumerate(self.variables)}
        self.rows: list[tuple[dict, GaussianRational, Hashable]] = []

    def add_equation(self, coeffs: dict, rhs, label=None) -> None:
        row = {}
        for v, c in coeffs.items():
            if v not in self._index:
                raise KeyError(f"unknown variable {v!r}")
            if c:
                row[v] = row.get(v, GaussianRational(0)) + c
        row = {v: c for v, c in row.items() if c}
        self.rows.append((row, GaussianRational(0) + rhs, label))

    def fix(self, var, value, label=None) -> None:
        self.add_equation({var: GaussianRational(1)}, value, label)

    def solve(self) -> Solution:
        rows = [(dict(r), b, lab) for r, b, lab in self.rows]
        known: dict = {}
        zero = GaussianRational(0)

        # which rows mention each variable
        occurs: dict = {v: set() for v in self.variables}
        for i, (r, _, _) in enumerate(rows):
            for v in r:
                occurs[v].add(i)

        def substitute(var, val):
            touched = occurs.pop(var, ())
            for i in touched:
                r, b, lab = rows[i]
                c = r.pop(var)
                rows[i] = (r, b - c * val, lab)
            return touched

        # unit propagation
        queue = [i for i, (r, _, _) in enumerate(rows) if len(r) == 1]
        while queue:
            i = queue.pop()
            r, b, lab = rows[i]
            if len(r) != 1:
                continue
            ((var, c),) = r.items()
            val = b / c
            known[var] = val
            for j in substitute(var, val):
                if len(rows[j][0]) == 1:
                    queue.append(j)
        # leftover equations
        pivots: dict = {}
        active = [i for i, (r, _, _) in enumerate(rows) if r]
        for i, (r, b, lab) in enumerate(rows):
            if not r and b:
                raise InconsistentSystem(lab)
        live = {i: rows[i] for i in active}
        col_rows: dict = {}
        for i, (r, _, _) in live.items():
            for v in r:
                col_rows.setdefault(v, set()).add(i)
        while live:
            # shortest row, then its first variable in declaration order
            i = min(live, key=lambda j: (len(live[j][0]), j))
            r, b, lab = live.pop(i)
            if not r:
                if b:
                    raise InconsistentSystem(lab)
                continue
            var = min(r, key=self._index.__getitem__)
            c = r[var]
            r = {v: x / c for v, x in r.items()}
            b = b / c
            for v in r:
                col_rows.get(v, set()).discard(i)
            for j in list(col_rows.get(var, ())):
                rj, bj, lj = live[j]
                f = rj[var]
                for v, x in r.items():
                    y = rj.get(v, zero) - f * x
                    if y:
                        if v not in rj:
                            col_rows.setdefault(v, set()).add(j)
                        rj[v] = y
                    else:
                        if v in rj:
                            del rj[v]
                            col_rows[v].discard(j)
                live[j] = (rj, bj - f * b, lj)
                if not rj and live[j][1]:
                    raise InconsistentSystem(lj)
            col_rows.pop(var, None)
            pivots[var] = (r, b)
        # back substitution; unpivoted variables are free and set to zero
        free = [v for v in self.variables if v not in known and v not in pivots]
        values = dict(known)
        for v in free:
            values[v] = zero
        order = list(pivots)
        for var in reversed(order):
            r, b = pivots[var]
            acc = b
            for v, x in r.items():
                if v != var:
                    acc = acc - x * values[v]
            values[var] = acc
        return Solution(values, free, len(known) + len(pivots))
