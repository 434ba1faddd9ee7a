"""Linear programming utilities.

Two interchangeable solvers sit behind one model interface: scipy's HiGHS
for the float path, and a dense two-phase simplex over `fractions.Fraction`
(Bland's rule, so it terminates) for the exact rational path.  Polyhedral
norms certify values through this module; the exact path is what makes
"separation exactly 2" claims independent of rounding.

Norm epigraphs are encoded compositionally: an encoder contributes rows
(and auxiliary variables) enforcing norm(x) <= t, where both the
coordinates of x and t are affine expressions in model variables.  That
is enough to express max-type renormings and infimal convolutions as
single LPs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Protocol

import numpy as np
from scipy.optimize import linprog

from .errors import LpInfeasibleError, LpUnboundedError
from .vectors import Scalar


class LinExpr:
    """Affine expression sum_j c_j z_j + const over model variables."""

    __slots__ = ("terms", "const")

    def __init__(self, terms: dict[int, Scalar] | None = None, const: Scalar = 0):
        self.terms = dict(terms or {})
        self.const = const

    @classmethod
    def variable(cls, j: int) -> LinExpr:
        return cls({j: 1})

    @classmethod
    def constant(cls, c: Scalar) -> LinExpr:
        return cls({}, c)

    def scale(self, a: Scalar) -> LinExpr:
        if a == 0:
            return LinExpr()
        return LinExpr({j: a * c for j, c in self.terms.items()}, a * self.const)

    def __add__(self, other: LinExpr) -> LinExpr:
        terms = dict(self.terms)
        for j, c in other.terms.items():
            terms[j] = terms.get(j, 0) + c
        return LinExpr(terms, self.const + other.const)

    def __sub__(self, other: LinExpr) -> LinExpr:
        return self + other.scale(-1)

    def __neg__(self) -> LinExpr:
        return self.scale(-1)


@dataclass
class LpSolution:
    value: Scalar
    point: dict[int, Scalar]
    exact: bool


@dataclass
class LpModel:
    """Collects variables and <=/== rows, then dispatches to a solver."""

    n_vars: int = 0
    nonneg: list[bool] = field(default_factory=list)
    le_rows: list[tuple[dict[int, Scalar], Scalar]] = field(default_factory=list)
    eq_rows: list[tuple[dict[int, Scalar], Scalar]] = field(default_factory=list)

    def new_var(self, nonneg: bool = False) -> int:
        self.n_vars += 1
        self.nonneg.append(nonneg)
        return self.n_vars - 1

    def new_vars(self, count: int, nonneg: bool = False) -> list[int]:
        return [self.new_var(nonneg) for _ in range(count)]

    def add_le(self, lhs: LinExpr, rhs: LinExpr | Scalar) -> None:
        if not isinstance(rhs, LinExpr):
            rhs = LinExpr.constant(rhs)
        diff = lhs - rhs
        self.le_rows.append((diff.terms, -diff.const))

    def add_eq(self, lhs: LinExpr, rhs: LinExpr | Scalar) -> None:
        if not isinstance(rhs, LinExpr):
            rhs = LinExpr.constant(rhs)
        diff = lhs - rhs
        self.eq_rows.append((diff.terms, -diff.const))

    def add_abs_le(self, expr: LinExpr, bound: LinExpr) -> None:
        self.add_le(expr, bound)
        self.add_le(-expr, bound)

    def solve(self, objective: LinExpr, maximize: bool = False,
              exact: bool = False) -> LpSolution:
        if exact:
            return self._solve_exact(objective, maximize)
        return self._solve_float(objective, maximize)

    # -- float path -------------------------------------------------------

    def _solve_float(self, objective: LinExpr, maximize: bool) -> LpSolution:
        n = self.n_vars
        c = np.zeros(n)
        for j, v in objective.terms.items():
            c[j] = float(v)
        if maximize:
            c = -c
        A_ub = np.zeros((len(self.le_rows), n)) if self.le_rows else None
        b_ub = np.zeros(len(self.le_rows)) if self.le_rows else None
        for r, (terms, rhs) in enumerate(self.le_rows):
            for j, v in terms.items():
                A_ub[r, j] = float(v)
            b_ub[r] = float(rhs)
        A_eq = np.zeros((len(self.eq_rows), n)) if self.eq_rows else None
        b_eq = np.zeros(len(self.eq_rows)) if self.eq_rows else None
        for r, (terms, rhs) in enumerate(self.eq_rows):
            for j, v in terms.items():
                A_eq[r, j] = float(v)
            b_eq[r] = float(rhs)
        bounds = [(0, None) if nn else (None, None) for nn in self.nonneg]
        res = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq,
                      bounds=bounds, method="highs")
        if res.status == 2:
            raise LpInfeasibleError("linear program infeasible")
        if res.status == 3:
            raise LpUnboundedError("linear program unbounded")
        if not res.success:
            raise LpInfeasibleError(f"linear program failed: {res.message}")
        value = float(res.fun) + float(objective.const)
        if maximize:
            value = -float(res.fun) + float(objective.const)
        point = {j: float(res.x[j]) for j in range(n)}
        return LpSolution(value, point, exact=False)

    # -- exact rational path ----------------------------------------------

    def _solve_exact(self, objective: LinExpr, maximize: bool) -> LpSolution:
        n = self.n_vars
        # split free variables into differences of nonnegatives
        col_of: list[tuple[int, int | None]] = []
        ncols = 0
        for j in range(n):
            if self.nonneg[j]:
                col_of.append((ncols, None))
                ncols += 1
            else:
                col_of.append((ncols, ncols + 1))
                ncols += 2

        rows: list[list[Fraction]] = []
        rhs: list[Fraction] = []

        def expand(terms: dict[int, Scalar]) -> list[Fraction]:
            row = [Fraction(0)] * ncols
            for j, v in terms.items():
                fv = Fraction(v)
                pos, neg = col_of[j]
                row[pos] += fv
                if neg is not None:
                    row[neg] -= fv
            return row

        # inequality rows get a slack column each
        nslack = len(self.le_rows)
        for k, (terms, b) in enumerate(self.le_rows):
            row = expand(terms) + [Fraction(0)] * nslack
            row[ncols + k] = Fraction(1)
            rows.append(row)
            rhs.append(Fraction(b))
        for terms, b in self.eq_rows:
            rows.append(expand(terms) + [Fraction(0)] * nslack)
            rhs.append(Fraction(b))

        total = ncols + nslack
        cost = [Fraction(0)] * total
        for j, v in objective.terms.items():
            fv = Fraction(v) if not maximize else -Fraction(v)
            pos, neg = col_of[j]
            cost[pos] += fv
            if neg is not None:
                cost[neg] -= fv

        x = _simplex_two_phase(rows, rhs, cost)
        point: dict[int, Scalar] = {}
        for j in range(n):
            pos, neg = col_of[j]
            point[j] = x[pos] - (x[neg] if neg is not None else 0)
        value = sum(Fraction(v) * point[j] for j, v in objective.terms.items())
        value += Fraction(objective.const)
        return LpSolution(value, point, exact=True)


def _simplex_two_phase(rows: list[list[Fraction]], rhs: list[Fraction],
                       cost: list[Fraction]) -> list[Fraction]:
    """Solve min cost.x s.t. rows.x == rhs, x >= 0; returns the optimizer."""
    m = len(rows)
    n = len(cost)
    # normalize rhs >= 0
    A = [list(r) for r in rows]
    b = list(rhs)
    for i in range(m):
        if b[i] < 0:
            A[i] = [-v for v in A[i]]
            b[i] = -b[i]
    # phase 1: artificial variables
    for i in range(m):
        for k in range(m):
            A[i].append(Fraction(1) if k == i else Fraction(0))
    basis = [n + i for i in range(m)]
    phase1_cost = [Fraction(0)] * n + [Fraction(1)] * m
    tab_value = _simplex_iterate(A, b, basis, phase1_cost)
    if tab_value != 0:
        raise LpInfeasibleError("linear program infeasible (phase 1)")
    # drive artificials out of the basis where possible, then drop them
    for i in range(m):
        if basis[i] >= n:
            pivot_col = next((j for j in range(n) if A[i][j] != 0), None)
            if pivot_col is None:
                continue  # redundant row
            _pivot(A, b, basis, i, pivot_col)
    A = [row[:n] for row in A]
    keep = [i for i in range(m) if basis[i] < n]
    A = [A[i] for i in keep]
    b = [b[i] for i in keep]
    basis = [basis[i] for i in keep]
    _simplex_iterate(A, b, basis, list(cost))
    x = [Fraction(0)] * n
    for i, jb in enumerate(basis):
        x[jb] = b[i]
    return x


def _simplex_iterate(A: list[list[Fraction]], b: list[Fraction],
                     basis: list[int], cost: list[Fraction]) -> Fraction:
    """Full-tableau primal simplex with Bland's rule.

    Expects the basis columns of A to already form an identity (true both
    for the artificial start and after earlier pivots).  Mutates A, b and
    basis in place and returns the optimal objective value.
    """
    m = len(A)
    n = len(A[0]) if m else len(cost)
    # reduced-cost row; A is B^-1 A, so c_B B^-1 A = sum_i c_B[i] * row_i
    red = list(cost)
    for i in range(m):
        cb = cost[basis[i]]
        if cb != 0:
            row = A[i]
            for j in range(n):
                if row[j] != 0:
                    red[j] -= cb * row[j]
    while True:
        entering = next((j for j in range(n) if red[j] < 0), None)
        if entering is None:
            return sum(cost[basis[i]] * b[i] for i in range(m))
        leave = None
        best = None
        for i in range(m):
            if A[i][entering] > 0:
                ratio = b[i] / A[i][entering]
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best = ratio
                    leave = i
        if leave is None:
            raise LpUnboundedError("linear program unbounded")
        _pivot(A, b, basis, leave, entering)
        f = red[entering]
        if f != 0:
            prow = A[leave]
            for j in range(n):
                if prow[j] != 0:
                    red[j] -= f * prow[j]


def _pivot(A, b, basis, row, col):
    inv = A[row][col]
    A[row] = [v / inv for v in A[row]]
    b[row] = b[row] / inv
    for i in range(len(A)):
        if i != row and A[i][col] != 0:
            f = A[i][col]
            A[i] = [v - f * w for v, w in zip(A[i], A[row])]
            b[i] = b[i] - f * b[row]
    basis[row] = col


# -- norm epigraph encoders -----------------------------------------------


class NormEncoder(Protocol):
    """Adds rows enforcing norm(x) <= t for affine x-coordinates and t."""

    def epigraph(self, model: LpModel, coords: dict[int, LinExpr],
                 t: LinExpr) -> None: ...


@dataclass(frozen=True)
class WeightedL1Encoder:
    """norm(x) = sum_i w_i |x_i| (w_i > 0); missing weights default to 1."""

    weights: tuple[tuple[int, Scalar], ...] = ()

    def weight(self, i: int) -> Scalar:
        return dict(self.weights).get(i, 1)

    def epigraph(self, model: LpModel, coords: dict[int, LinExpr], t: LinExpr) -> None:
        total = LinExpr()
        w = dict(self.weights)
        for i, expr in coords.items():
            u = LinExpr.variable(model.new_var(nonneg=True))
            model.add_abs_le(expr, u)
            total = total + u.scale(w.get(i, 1))
        model.add_le(total, t)


@dataclass(frozen=True)
class WeightedLinfEncoder:
    """norm(x) = max_i w_i |x_i| (w_i > 0); missing weights default to 1."""

    weights: tuple[tuple[int, Scalar], ...] = ()

    def epigraph(self, model: LpModel, coords: dict[int, LinExpr], t: LinExpr) -> None:
        w = dict(self.weights)
        for i, expr in coords.items():
            model.add_abs_le(expr.scale(w.get(i, 1)), t)


@dataclass(frozen=True)
class GeneratorSetEncoder:
    """norm(x) = max over nonnegative functionals g of sum g_i |x_i|."""

    gens: tuple[tuple[tuple[int, Scalar], ...], ...]

    def epigraph(self, model: LpModel, coords: dict[int, LinExpr], t: LinExpr) -> None:
        absvars: dict[int, LinExpr] = {}
        for i, expr in coords.items():
            u = LinExpr.variable(model.new_var(nonneg=True))
            model.add_abs_le(expr, u)
            absvars[i] = u
        for g in self.gens:
            row = LinExpr()
            for i, coef in g:
                if i in absvars:
                    row = row + absvars[i].scale(coef)
            model.add_le(row, t)
