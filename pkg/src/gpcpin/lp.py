"""Dense two-phase simplex in exact rational arithmetic.

The polytopes handled here are small (d <= 12, a few dozen constraints) and
their data are integers, so every pivot is carried out with
:class:`fractions.Fraction`.  Bland's rule makes the pivot sequence, and with
it the returned vertex, deterministic.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .catalog import Catalog, builtin_pauli_catalog


class LPError(ArithmeticError):
    pass


class LPInfeasible(LPError):
    """No feasible point.

    ``certificate = (u, v)`` with ``u >= 0`` satisfies
    ``u.A_ub + v.A_eq >= 0`` and ``u.b_ub + v.b_eq < 0`` (Farkas).
    """

    def __init__(self, message, certificate):
        super().__init__(message)
        self.certificate = certificate


class LPUnbounded(LPError):
    pass


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    return Fraction(float(x))


@dataclass(frozen=True)
class LPProblem:
    """maximize ``objective . x + constant`` s.t. ``A_ub x <= b_ub``, ``A_eq x = b_eq``, ``x >= 0``."""

    objective: tuple
    a_ub: tuple = ()
    b_ub: tuple = ()
    a_eq: tuple = ()
    b_eq: tuple = ()
    constant: Fraction = Fraction(0)

    def __post_init__(self):
        conv = lambda rows: tuple(tuple(_frac(v) for v in row) for row in rows)
        object.__setattr__(self, "objective", tuple(_frac(v) for v in self.objective))
        object.__setattr__(self, "a_ub", conv(self.a_ub))
        object.__setattr__(self, "a_eq", conv(self.a_eq))
        object.__setattr__(self, "b_ub", tuple(_frac(v) for v in self.b_ub))
        object.__setattr__(self, "b_eq", tuple(_frac(v) for v in self.b_eq))
        object.__setattr__(self, "constant", _frac(self.constant))
        n = len(self.objective)
        for row in self.a_ub + self.a_eq:
            if len(row) != n:
                raise ValueError("constraint row length differs from objective length")
        if len(self.a_ub) != len(self.b_ub) or len(self.a_eq) != len(self.b_eq):
            raise ValueError("row count mismatch between A and b")

    @property
    def n_vars(self) -> int:
        return len(self.objective)


@dataclass(frozen=True)
class LPSolution:
    value: float
    argmax: np.ndarray
    exact_value: Fraction
    exact_argmax: tuple


def _pivot(tab, row, col):
    prow = tab[row]
    pv = prow[col]
    if pv != 1:
        tab[row] = prow = [v / pv for v in prow]
    for i, r in enumerate(tab):
        if i != row:
            f = r[col]
            if f:
                tab[i] = [a - f * b for a, b in zip(r, prow)]


def _run(tab, obj, basis, allowed):
    """Maximize with reduced-cost row ``obj`` (entries c_j - z_j, last entry -z)."""
    ncols = len(obj) - 1
    while True:
        enter = next((j for j in range(ncols) if allowed[j] and obj[j] > 0), None)
        if enter is None:
            return
        best = None
        for i, r in enumerate(tab):
            a = r[enter]
            if a > 0:
                key = (r[-1] / a, basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:
            raise LPUnbounded("objective unbounded above")
        leave = best[1]
        _pivot(tab, leave, enter)
        f = obj[enter]
        obj[:] = [a - f * b for a, b in zip(obj, tab[leave])]
        basis[leave] = enter


def _reduced_costs(tab, basis, cost):
    obj = list(cost) + [Fraction(0)]
    for i, b in enumerate(basis):
        cb = cost[b]
        if cb:
            obj = [o - cb * v for o, v in zip(obj, tab[i])]
    return obj


def lp_max(problem: LPProblem) -> LPSolution:
    """Optimal value and an optimal vertex of ``problem``."""
    n = problem.n_vars
    m_ub, m_eq = len(problem.a_ub), len(problem.b_eq)
    m = m_ub + m_eq
    rows = [list(r) for r in problem.a_ub] + [list(r) for r in problem.a_eq]
    rhs = list(problem.b_ub) + list(problem.b_eq)
    sign = [1 if b >= 0 else -1 for b in rhs]

    # columns: x (n) | slacks (m_ub) | artificials (one per row that needs one)
    needs_art = [i >= m_ub or sign[i] < 0 for i in range(m)]
    art_col = {}
    col = n + m_ub
    for i in range(m):
        if needs_art[i]:
            art_col[i] = col
            col += 1
    ncols = col
    tab = []
    basis = []
    identity_col = []
    for i in range(m):
        row = [Fraction(0)] * (ncols + 1)
        for j, v in enumerate(rows[i]):
            row[j] = sign[i] * v
        if i < m_ub:
            row[n + i] = Fraction(sign[i])
        row[-1] = sign[i] * rhs[i]
        if needs_art[i]:
            row[art_col[i]] = Fraction(1)
            basis.append(art_col[i])
            identity_col.append(art_col[i])
        else:
            basis.append(n + i)
            identity_col.append(n + i)
        tab.append(row)

    is_art = [False] * ncols
    for c in art_col.values():
        is_art[c] = True

    if art_col:
        cost1 = [Fraction(-1) if is_art[j] else Fraction(0) for j in range(ncols)]
        obj = _reduced_costs(tab, basis, cost1)
        _run(tab, obj, basis, [True] * ncols)
        phase1 = -obj[-1]
        if phase1 < 0:
            y = [cost1[identity_col[i]] - obj[identity_col[i]] for i in range(m)]
            w = [sign[i] * y[i] for i in range(m)]
            raise LPInfeasible(
                f"infeasible (phase-1 optimum {float(phase1):.3g})", (tuple(w[:m_ub]), tuple(w[m_ub:]))
            )
        # drive zero-level artificials out of the basis; drop redundant rows
        i = 0
        while i < len(tab):
            if is_art[basis[i]]:
                j = next((j for j in range(ncols) if not is_art[j] and tab[i][j] != 0), None)
                if j is None:
                    del tab[i]
                    del basis[i]
                    continue
                _pivot(tab, i, j)
                basis[i] = j
            i += 1

    cost2 = list(problem.objective) + [Fraction(0)] * (ncols - n)
    obj = _reduced_costs(tab, basis, cost2)
    _run(tab, obj, basis, [not a for a in is_art])
    x = [Fraction(0)] * n
    for i, b in enumerate(basis):
        if b < n:
            x[b] = tab[i][-1]
    value = sum((c * v for c, v in zip(problem.objective, x)), Fraction(0)) + problem.constant
    return LPSolution(float(value), np.array([float(v) for v in x]), value, tuple(x))


def polytope_rows(catalog: Catalog, include_gpcs: bool = True, r: int = 0, s: int = 0):
    """Inequality and equality rows describing the catalog polytope.

    Ordering and Pauli bounds come from :func:`builtin_pauli_catalog`;
    normalization ``sum l = N`` is an equality.  ``r`` leading entries are
    pinned to 1 and ``s`` trailing entries to 0.
    """
    st = catalog.setting
    d = st.dim
    a_ub, b_ub = [], []
    cons = list(builtin_pauli_catalog(st).gpcs)
    if include_gpcs:
        cons += list(catalog.gpcs)
    for c in cons:
        # k0 + k.l >= 0  <=>  -k.l <= k0
        a_ub.append([-k for k in c.kappas])
        b_ub.append(c.kappa0)
    a_eq, b_eq = [[1] * d], [st.n_particles]
    for i in range(r):
        a_eq.append([1 if j == i else 0 for j in range(d)])
        b_eq.append(1)
    for i in range(d - s, d):
        a_eq.append([1 if j == i else 0 for j in range(d)])
        b_eq.append(0)
    return a_ub, b_ub, a_eq, b_eq


def polytope_problem(
    catalog: Catalog, objective: Sequence, constant=0, *, r: int = 0, s: int = 0, include_gpcs: bool = True
) -> LPProblem:
    a_ub, b_ub, a_eq, b_eq = polytope_rows(catalog, include_gpcs, r, s)
    return LPProblem(tuple(objective), tuple(map(tuple, a_ub)), tuple(b_ub), tuple(map(tuple, a_eq)), tuple(b_eq), constant)
