"""Numerical optimization kernels.

Heuristic searches here return bounds that are valid by construction:
a maximizer reports the objective at a feasible point (a lower bound),
a minimizer reports an upper bound.  The `certified` flag on results is
reserved for exact paths (closed form, eigenproblem, LP); nothing in this
module sets it except `lp_exact` and `infimal_convolution`'s LP path.

Determinism: restart r of a search draws from `default_rng([seed, r])`,
so enlarging the restart budget appends new starts instead of reshuffling
old ones, and the best-over-restarts value is monotone in the budget.
"""

from __future__ import annotations

import math
import os
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from typing import Any

import numpy as np
from scipy.optimize import minimize as _scipy_minimize

from .errors import (BudgetError, NumericError, ParameterError, RankError)
from .lp import LinExpr, LpModel
from .vectors import Scalar, SparseVec

DEFAULT_RESTARTS = 64
DEFAULT_MAX_ITERS = 500
DEFAULT_TOL = 1e-9


def worker_count() -> int:
    """Worker cap from BANACHLAB_THREADS; 1 (serial) when unset."""
    raw = os.environ.get("BANACHLAB_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


@dataclass(frozen=True)
class OptBudget:
    restarts: int = DEFAULT_RESTARTS
    max_iters: int = DEFAULT_MAX_ITERS
    tol: float = DEFAULT_TOL
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1 or self.max_iters < 1:
            raise ParameterError("budget requires restarts >= 1 and max_iters >= 1")
        if not self.tol > 0:
            raise ParameterError("budget tolerance must be positive")


@dataclass(frozen=True)
class OptResult:
    """Value plus the witness that makes it a valid bound."""

    value: Scalar
    argument: Any
    certified: bool


def minimize_1d_convex(g: Callable[[float], float],
                       bracket: tuple[float, float],
                       tol: float = DEFAULT_TOL) -> OptResult:
    """Golden-section minimization of a convex function on a bracket."""
    lo, hi = float(bracket[0]), float(bracket[1])
    if not lo < hi:
        raise ParameterError(f"empty bracket [{lo}, {hi}]")
    if not tol > 0:
        raise ParameterError("tolerance must be positive")

    def ev(t: float) -> float:
        val = float(g(t))
        if not math.isfinite(val):
            raise NumericError(f"objective returned {val} at t = {t}")
        return val

    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = ev(c), ev(d)
    best_t, best_v = (c, fc) if fc <= fd else (d, fd)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = ev(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = ev(d)
        if fc < best_v:
            best_t, best_v = c, fc
        if fd < best_v:
            best_t, best_v = d, fd
    for t in (lo, hi):
        v = ev(t)
        if v < best_v:
            best_t, best_v = t, v
    return OptResult(best_v, best_t, certified=False)


def check_independent(vectors: Sequence[SparseVec], rtol: float = 1e-10) -> None:
    """Raise RankError unless the coordinate matrix has full row rank."""
    if not vectors:
        raise RankError("empty vector list")
    support = sorted(set().union(*(set(v.support) for v in vectors)))
    if not support:
        raise RankError("all vectors are zero")
    col = {i: k for k, i in enumerate(support)}
    mat = np.zeros((len(vectors), len(support)))
    for r, v in enumerate(vectors):
        for i, c in v.items():
            mat[r, col[i]] = float(c)
    sv = np.linalg.svd(mat, compute_uv=False)
    if len(sv) < len(vectors) or sv[-1] <= rtol * sv[0]:
        raise RankError(
            f"vectors are linearly dependent (rank tolerance {rtol})")


def _dense_frame(span_basis: Sequence[SparseVec]) -> tuple[np.ndarray, list[int]]:
    support = sorted(set().union(*(set(v.support) for v in span_basis)))
    col = {i: k for k, i in enumerate(support)}
    mat = np.zeros((len(span_basis), len(support)))
    for r, v in enumerate(span_basis):
        for i, c in v.items():
            mat[r, col[i]] = float(c)
    return mat, support


def combine(span_basis: Sequence[SparseVec], coeffs: np.ndarray) -> SparseVec:
    mat, support = _dense_frame(span_basis)
    coords = coeffs @ mat
    return SparseVec({i: float(c) for i, c in zip(support, coords)})


def sphere_optimize(space, span_basis: Sequence[SparseVec],
                    objective: Callable[[np.ndarray, SparseVec], float],
                    direction: str = "max",
                    budget: OptBudget | None = None) -> OptResult:
    """Optimize a 1-homogeneous objective over the unit sphere of a span.

    Works on the scale-invariant ratio objective(a)/norm(a) with projected
    finite-difference ascent, multistarted from every signed coordinate
    direction and then seeded Gaussian points.  The reported value is the
    ratio at the best feasible point, hence a valid bound in the feasible
    direction; certified is always false on this path.
    """
    from .vecspace import norm  # deferred: vecspace has no optkit dependency

    if direction not in ("max", "min"):
        raise ParameterError(f"direction must be 'max' or 'min', got {direction!r}")
    check_independent(span_basis)
    budget = budget or OptBudget()
    mat, support = _dense_frame(span_basis)
    m = len(span_basis)
    sign = 1.0 if direction == "max" else -1.0

    def assemble(a: np.ndarray) -> SparseVec:
        coords = a @ mat
        return SparseVec({i: float(c) for i, c in zip(support, coords)})

    def ratio(a: np.ndarray) -> tuple[float, SparseVec, float]:
        vec = assemble(a)
        denom = float(norm(space, vec, exact=False))
        if denom <= 0 or not math.isfinite(denom):
            return -math.inf, vec, denom
        val = float(objective(a, vec)) / denom
        if not math.isfinite(val):
            raise NumericError("objective returned a non-finite value")
        return sign * val, vec, denom

    starts: list[np.ndarray] = []
    for k in range(m):
        e = np.zeros(m)
        e[k] = 1.0
        starts.append(e)
        starts.append(-e)
    for r in range(budget.restarts):
        rng = np.random.default_rng([budget.seed, r])
        g = rng.standard_normal(m)
        nrm = np.linalg.norm(g)
        starts.append(g / nrm if nrm > 0 else starts[0])

    best_val = -math.inf
    best_a = starts[0]
    h = 1e-6
    for a0 in starts:
        a = a0.copy()
        val, _, _ = ratio(a)
        stall = 0
        for it in range(budget.max_iters):
            grad = np.zeros(m)
            for k in range(m):
                ap = a.copy(); ap[k] += h
                am = a.copy(); am[k] -= h
                grad[k] = (ratio(ap)[0] - ratio(am)[0]) / (2 * h)
            gn = np.linalg.norm(grad)
            if gn == 0 or not math.isfinite(gn):
                break
            step = 0.5 / math.sqrt(it + 1.0)
            cand = a + step * grad / gn
            cn = np.linalg.norm(cand)
            if cn == 0:
                break
            cand /= cn
            cval, _, _ = ratio(cand)
            if cval > val + budget.tol:
                a, val = cand, cval
                stall = 0
            else:
                stall += 1
                if stall >= 25:
                    break
        if val > best_val:
            best_val, best_a = val, a

    sval, vec, denom = ratio(best_a)
    unit = SparseVec({i: c / denom for i, c in vec.items()})
    return OptResult(sign * best_val, unit, certified=False)


def infimal_convolution(norm_a, map_T: Sequence[SparseVec], norm_b,
                        y: SparseVec, support_budget: int,
                        budget: OptBudget | None = None,
                        exact: bool | None = None) -> OptResult:
    """inf { norm_a(x) + norm_b(y - Tx) : x on the first support_budget coords }.

    Exact LP when both norms have epigraph encoders; otherwise multistart
    subgradient descent whose value is a valid upper bound (x = 0 is always
    feasible, so the result never exceeds norm_b(y)).
    """
    from .vecspace import encoder, norm  # deferred import, same reason as above

    if support_budget < 1:
        raise BudgetError("support budget must be at least 1")
    if support_budget > len(map_T):
        raise BudgetError(
            f"support budget {support_budget} exceeds the {len(map_T)} "
            f"materialized image vectors")
    touched = 0
    ysupp = set(y.support)
    for j, img in enumerate(map_T, start=1):
        if ysupp & set(img.support):
            touched = j
    if touched > support_budget:
        raise BudgetError(
            f"y interacts with image vector {touched}, beyond the support "
            f"budget {support_budget}")

    cols = list(map_T[:support_budget])
    out_support = sorted(ysupp | set().union(*(set(c.support) for c in cols)))

    enc_a = encoder(norm_a, tuple(range(1, support_budget + 1)))
    enc_b = encoder(norm_b, tuple(out_support))
    if enc_a is not None and enc_b is not None:
        return _infconv_lp(enc_a, cols, enc_b, y, out_support, exact)

    budget = budget or OptBudget(restarts=16, max_iters=300)
    mat = np.zeros((support_budget, len(out_support)))
    col_of = {i: k for k, i in enumerate(out_support)}
    for j, img in enumerate(cols):
        for i, c in img.items():
            mat[j, col_of[i]] = float(c)
    ydense = np.zeros(len(out_support))
    for i, c in y.items():
        ydense[col_of[i]] = float(c)

    def F(x: np.ndarray) -> float:
        xv = SparseVec({j + 1: float(c) for j, c in enumerate(x)})
        rdense = ydense - x @ mat
        rv = SparseVec({i: float(c) for i, c in zip(out_support, rdense)})
        return float(norm(norm_a, xv, exact=False)) + float(norm(norm_b, rv, exact=False))

    # F is convex in x, so Powell from a handful of seeded starts is
    # reliable where plain subgradient steps stall on nonsmooth kinks.
    starts = [np.zeros(support_budget)]
    scale = float(norm(norm_b, y, exact=False)) or 1.0
    for r in range(budget.restarts):
        rng = np.random.default_rng([budget.seed, r])
        starts.append(rng.standard_normal(support_budget) * scale * 0.5)
    best_x, best_v = starts[0], F(starts[0])
    for x0 in starts:
        res = _scipy_minimize(F, x0, method="Powell",
                              options={"maxiter": budget.max_iters,
                                       "xtol": budget.tol, "ftol": budget.tol})
        if math.isfinite(res.fun) and res.fun < best_v:
            best_v, best_x = float(res.fun), np.asarray(res.x, dtype=float)
    arg = SparseVec({j + 1: float(c) for j, c in enumerate(best_x)})
    return OptResult(best_v, arg, certified=False)


def _infconv_lp(enc_a, cols: list[SparseVec], enc_b, y: SparseVec,
                out_support: list[int], exact: bool | None) -> OptResult:
    use_exact = bool(exact) if exact is not None else (
        y.is_rational and all(c.is_rational for c in cols))
    model = LpModel()
    xids = {j + 1: model.new_var() for j in range(len(cols))}
    xvars = {j: LinExpr.variable(vid) for j, vid in xids.items()}
    t_a = LinExpr.variable(model.new_var(nonneg=True))
    t_b = LinExpr.variable(model.new_var(nonneg=True))
    enc_a.epigraph(model, xvars, t_a)
    residual: dict[int, LinExpr] = {}
    for i in out_support:
        expr = LinExpr.constant(y.get(i))
        for j, img in enumerate(cols, start=1):
            c = img.get(i)
            if c != 0:
                expr = expr - xvars[j].scale(c)
        residual[i] = expr
    enc_b.epigraph(model, residual, t_b)
    sol = model.solve(t_a + t_b, maximize=False, exact=use_exact)
    arg = SparseVec({j: sol.point[vid] for j, vid in xids.items()})
    return OptResult(sol.value, arg, certified=True)


def lp_exact(objective: LinExpr, model: LpModel,
             maximize: bool = False, exact: bool = True) -> OptResult:
    """Solve an explicitly built LP; exact path certified by construction."""
    sol = model.solve(objective, maximize=maximize, exact=exact)
    return OptResult(sol.value, sol.point, certified=sol.exact)
