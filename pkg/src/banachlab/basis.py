"""Basis-constant analysis of finite basic sequences.

The projection norm ||P_n|| = sup { ||sum_{i<=n} a_i y_i|| : ||sum a_i y_i|| <= 1 }
is computed by the strongest applicable path, in order:

1. structural: 1-unconditional space norm and pairwise disjoint supports
   force ||P_n|| = ||I - P_n|| = 1 exactly (dropping blocks shrinks the
   coordinate moduli, and P_n fixes y_1);
2. l2: generalized eigenproblem on Gram matrices, max a'G_n a / a'G a;
3. polyhedral: the norm of the projected part is a max of finitely many
   linear functionals (dual extreme candidates), so the supremum is an
   exhaustive family of LPs over the unit-ball section; gated by size;
4. heuristic multistart sphere search, reported with certified=false —
   the value is still a valid lower bound (it is attained by a witness).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iter_product

import numpy as np
import scipy.linalg

from .errors import BlockOrderingError, ParameterError
from .lp import LinExpr, LpModel
from .optkit import OptBudget, OptResult, check_independent, sphere_optimize, worker_count
from .tsirelson import generators
from .vectors import Scalar, SparseVec, lincomb
from .vecspace import (Lp, Renormed, SpaceSpec, TsirelsonT, C0, encoder,
                       is_certified_path, is_unconditional, norm)
from .renorm import DiagonalScale

VERTEX_ENUM_MAX_VECTORS = 8
VERTEX_ENUM_MAX_FUNCTIONALS = 4096
MONOTONE_TOL = 1e-7


@dataclass(frozen=True)
class FiniteBasicSequence:
    """Ordered, linearly independent, nonzero vectors in a space."""

    vectors: tuple[SparseVec, ...]
    space: SpaceSpec

    def __post_init__(self):
        if len(self.vectors) < 2:
            raise ParameterError("a basic sequence needs at least 2 vectors")
        for k, v in enumerate(self.vectors, start=1):
            if v.is_zero:
                raise ParameterError(f"vector {k} is zero")
        check_independent(self.vectors)

    def __len__(self) -> int:
        return len(self.vectors)


@dataclass(frozen=True)
class BasisProfile:
    """||P_n|| and ||I-P_n|| for n = 1..m-1, plus the basis constant."""

    proj_norms: tuple[Scalar, ...]
    tail_norms: tuple[Scalar, ...]
    basis_constant: Scalar
    certified: bool
    monotone: bool
    bimonotone: bool


def _disjoint_supports(vectors: tuple[SparseVec, ...]) -> bool:
    seen: set[int] = set()
    for v in vectors:
        s = set(v.support)
        if seen & s:
            return False
        seen |= s
    return True


def _gram(vectors: tuple[SparseVec, ...]) -> np.ndarray:
    support = sorted(set().union(*(set(v.support) for v in vectors)))
    col = {i: k for k, i in enumerate(support)}
    mat = np.zeros((len(vectors), len(support)))
    for r, v in enumerate(vectors):
        for i, c in v.items():
            mat[r, col[i]] = float(c)
    return mat @ mat.T


def _eigen_part_norm(vectors: tuple[SparseVec, ...], part: tuple[int, ...]) -> OptResult:
    """sup ||sum_{i in part} a_i y_i||_2 over the l2 unit sphere of the span."""
    G = _gram(vectors)
    Gp = np.zeros_like(G)
    idx = np.array(part)
    Gp[np.ix_(idx, idx)] = G[np.ix_(idx, idx)]
    vals, vecs = scipy.linalg.eigh(Gp, G)
    lam = float(vals[-1])
    a = vecs[:, -1]
    denom = math.sqrt(float(a @ G @ a))
    witness = tuple(float(c) / denom for c in a)
    return OptResult(math.sqrt(max(lam, 0.0)), witness, certified=True)


def _dual_extreme_candidates(space: SpaceSpec,
                             support: tuple[int, ...]) -> list[dict[int, Scalar]] | None:
    """A finite norming family for the space norm on the support.

    Every candidate lies in the dual ball and the maximum of their
    pairings equals the norm; returns None when the space is not handled
    or the family would exceed the enumeration gate.  Global sign
    symmetry fixes one sign where a full sign pattern is enumerated.
    """
    d = len(support)
    if isinstance(space, Lp) and space.p == 1:
        if 2 ** (d - 1) > VERTEX_ENUM_MAX_FUNCTIONALS:
            return None
        out = []
        for signs in iter_product((1, -1), repeat=d - 1):
            out.append({i: s for i, s in zip(support, (1,) + signs)})
        return out
    if isinstance(space, (C0,)) or (isinstance(space, Lp) and space.p == math.inf):
        return [{i: 1} for i in support]
    if isinstance(space, TsirelsonT):
        gens = generators(support)
        total = sum(2 ** (len(g) - 1) for g in gens)
        if total > VERTEX_ENUM_MAX_FUNCTIONALS:
            return None
        out = []
        for g in gens:
            items = sorted(g.items())
            first, rest = items[0], items[1:]
            for signs in iter_product((1, -1), repeat=len(rest)):
                cand = {first[0]: first[1]}
                for (i, c), s in zip(rest, signs):
                    cand[i] = s * c
                out.append(cand)
        return out
    if isinstance(space, Renormed) and isinstance(space.renorm, DiagonalScale):
        inner = _dual_extreme_candidates(space.base, support)
        if inner is None:
            return None
        w = dict(space.renorm.weights)
        return [{i: c * w.get(i, 1) for i, c in cand.items()} for cand in inner]
    return None


def _polyhedral_part_norm(seq: FiniteBasicSequence,
                          part: tuple[int, ...]) -> OptResult | None:
    vectors = seq.vectors
    full_support = tuple(sorted(set().union(*(set(v.support) for v in vectors))))
    part_support = tuple(sorted(set().union(
        *(set(vectors[i].support) for i in part))))
    enc = encoder(seq.space, full_support)
    if enc is None:
        return None
    cands = _dual_extreme_candidates(seq.space, part_support)
    if cands is None:
        return None

    best = -math.inf
    best_arg: tuple[float, ...] | None = None
    m = len(vectors)
    for cand in cands:
        model = LpModel()
        avars = [LinExpr.variable(model.new_var()) for _ in range(m)]
        coords: dict[int, LinExpr] = {}
        for i in full_support:
            expr = LinExpr()
            for k, v in enumerate(vectors):
                c = v.get(i)
                if c != 0:
                    expr = expr + avars[k].scale(c)
            coords[i] = expr
        enc.epigraph(model, coords, LinExpr.constant(1))
        obj = LinExpr()
        for i, phi in cand.items():
            expr = LinExpr()
            for k in part:
                c = vectors[k].get(i)
                if c != 0:
                    expr = expr + avars[k].scale(c)
            obj = obj + expr.scale(phi)
        sol = model.solve(obj, maximize=True, exact=False)
        if sol.value > best:
            best = sol.value
            best_arg = tuple(sol.point[k] for k in range(m))
    return OptResult(best, best_arg, certified=True)


def _part_norm(seq: FiniteBasicSequence, part: tuple[int, ...],
               budget: OptBudget | None) -> OptResult:
    vectors = seq.vectors
    space = seq.space
    if is_unconditional(space) and _disjoint_supports(vectors):
        # dropping disjoint blocks shrinks coordinate moduli, so the
        # projection is a contraction; it fixes its own blocks, so 1 is hit
        witness = tuple(1 if k == part[0] else 0 for k in range(len(vectors)))
        nv = norm(space, vectors[part[0]])
        witness = tuple(c / nv for c in witness)
        return OptResult(1, witness, certified=True)
    if isinstance(space, Lp) and space.p == 2:
        return _eigen_part_norm(vectors, part)
    if len(vectors) <= VERTEX_ENUM_MAX_VECTORS:
        res = _polyhedral_part_norm(seq, part)
        if res is not None:
            return res

    def objective(a: np.ndarray, vec: SparseVec) -> float:
        partial = lincomb([float(a[k]) for k in part], [vectors[k] for k in part])
        return float(norm(space, partial, exact=False))

    res = sphere_optimize(space, vectors, objective, direction="max",
                          budget=budget or OptBudget(restarts=16, max_iters=200))
    return res


def projection_norm(seq: FiniteBasicSequence, n: int,
                    budget: OptBudget | None = None) -> OptResult:
    """||P_n||: norm of the projection onto the first n basis vectors."""
    m = len(seq)
    if not 1 <= n < m:
        raise ParameterError(f"projection index must satisfy 1 <= n < {m}, got {n}")
    return _part_norm(seq, tuple(range(n)), budget)


def tail_projection_norm(seq: FiniteBasicSequence, n: int,
                         budget: OptBudget | None = None) -> OptResult:
    """||I - P_n||: norm of the projection onto the tail past position n."""
    m = len(seq)
    if not 1 <= n < m:
        raise ParameterError(f"projection index must satisfy 1 <= n < {m}, got {n}")
    return _part_norm(seq, tuple(range(n, m)), budget)


def profile(seq: FiniteBasicSequence, budget: OptBudget | None = None,
            tol: float = MONOTONE_TOL) -> BasisProfile:
    """Assemble ||P_n|| and ||I-P_n|| lists with monotonicity flags."""
    m = len(seq)
    ns = list(range(1, m))

    def one(n: int) -> tuple[OptResult, OptResult]:
        return projection_norm(seq, n, budget), tail_projection_norm(seq, n, budget)

    workers = worker_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, ns))
    else:
        results = [one(n) for n in ns]
    projs = tuple(r[0].value for r in results)
    tails = tuple(r[1].value for r in results)
    certified = all(r[0].certified and r[1].certified for r in results)
    monotone = all(float(p) <= 1 + tol for p in projs)
    bimonotone = monotone and all(float(t) <= 1 + tol for t in tails)
    return BasisProfile(projs, tails, max(projs), certified, monotone, bimonotone)


def block_basis(seq: FiniteBasicSequence,
                blocks: list[tuple[tuple[int, ...], tuple[Scalar, ...]]]) -> FiniteBasicSequence:
    """z_n = sum_{i in E_n} alpha^n_i y_i over strictly increasing blocks.

    Block index sets are 1-based positions into the sequence and must
    satisfy max(E_n) < min(E_{n+1}).
    """
    if not blocks:
        raise ParameterError("empty block list")
    m = len(seq)
    prev_max = 0
    out: list[SparseVec] = []
    for bn, (indices, coeffs) in enumerate(blocks, start=1):
        if not indices:
            raise BlockOrderingError(f"block {bn} is empty")
        if len(indices) != len(coeffs):
            raise ParameterError(
                f"block {bn}: {len(indices)} indices vs {len(coeffs)} coefficients")
        if min(indices) <= prev_max:
            raise BlockOrderingError(
                f"block {bn} starts at {min(indices)}, not past the previous "
                f"block's max {prev_max}")
        if not all(1 <= i <= m for i in indices):
            raise ParameterError(f"block {bn} references positions outside 1..{m}")
        prev_max = max(indices)
        z = lincomb(coeffs, [seq.vectors[i - 1] for i in indices])
        if z.is_zero:
            raise ParameterError(f"block {bn} combination is zero")
        out.append(z)
    return FiniteBasicSequence(tuple(out), seq.space)


def is_seminormalized(seq: FiniteBasicSequence, A: Scalar, B: Scalar) -> bool:
    """True iff every vector's norm lies in [A, B]."""
    if not A > 0:
        raise ParameterError(f"lower bound must be positive, got {A}")
    if B < A:
        raise ParameterError(f"bounds out of order: [{A}, {B}]")
    for v in seq.vectors:
        nv = norm(seq.space, v)
        if nv < A or nv > B:
            return False
    return True
