"""Symmetric separation certificates and Kottman lower-bound search.

A certificate records, for a finite set of (near-)unit vectors, the full
pairwise matrix m_ij = min(||x_i - x_j||, ||x_i + x_j||) together with
how far the vectors are from the unit sphere.  Its separation value is a
lower-bound witness for the symmetric Kottman constant of the truncated
space.

Claims of separation exactly 2 require the exact rational path; on the
float path reported claims are capped at 2 - 1e-9, because a rounding
artifact must never masquerade as the extremal value.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ParameterError
from .optkit import OptBudget, worker_count
from .vectors import Scalar, SparseVec
from .vecspace import SpaceSpec, is_certified_path, norm, space_label, supports_exact

FLOAT_CLAIM_CAP = 2 - 1e-9


@dataclass(frozen=True)
class SeparationCertificate:
    space: SpaceSpec
    vectors: tuple[SparseVec, ...]
    pair_matrix: tuple[tuple[int, int, Scalar], ...]
    separation: Scalar
    unit_residual: Scalar
    certified: bool
    exact: bool
    degenerate_pairs: tuple[tuple[int, int], ...]

    @property
    def claimed_separation(self) -> Scalar:
        """Separation as reportable: float-path values are capped below 2."""
        if self.exact:
            return self.separation
        return min(self.separation, FLOAT_CLAIM_CAP)


def symmetric_separation(space: SpaceSpec, vectors: list[SparseVec] | tuple[SparseVec, ...],
                         *, exact: bool | None = None,
                         cap: int | None = None) -> SeparationCertificate:
    """Full pairwise min(||x-y||, ||x+y||) certificate for a vector set.

    Degenerate pairs (x = +-y) are reported, not rejected: the separation
    then honestly includes their 0 entry.
    """
    vecs = tuple(vectors)
    if len(vecs) < 2:
        raise ParameterError("separation needs at least 2 vectors")
    for k, v in enumerate(vecs, start=1):
        if v.is_zero:
            raise ParameterError(f"vector {k} is zero")
    use_exact = exact if exact is not None else (
        supports_exact(space) and all(v.is_rational for v in vecs))

    pairs_idx = [(a, b) for a in range(len(vecs)) for b in range(a + 1, len(vecs))]

    def entry(ab: tuple[int, int]) -> tuple[int, int, Scalar]:
        a, b = ab
        minus = norm(space, vecs[a] - vecs[b], exact=use_exact, cap=cap)
        plus = norm(space, vecs[a] + vecs[b], exact=use_exact, cap=cap)
        return (a + 1, b + 1, min(minus, plus))

    workers = worker_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            matrix = tuple(pool.map(entry, pairs_idx))
    else:
        matrix = tuple(entry(ab) for ab in pairs_idx)

    degenerate = tuple((a, b) for a, b, m in matrix if m == 0)
    separation = min(m for _, _, m in matrix)
    residuals = [abs(norm(space, v, exact=use_exact, cap=cap) - 1) for v in vecs]
    unit_residual = max(residuals)
    certified = is_certified_path(space)
    return SeparationCertificate(space, vecs, matrix, separation,
                                 unit_residual, certified, bool(use_exact),
                                 degenerate)


def verify_separated(cert: SeparationCertificate, delta: Scalar,
                     tol: Scalar) -> bool:
    """True iff the claimed separation reaches delta - tol and the vectors
    sit on the sphere to within tol.  Exact certificates take tol = 0."""
    if tol < 0:
        raise ParameterError(f"tolerance must be nonnegative, got {tol}")
    return (cert.claimed_separation >= delta - tol
            and cert.unit_residual <= tol)


def _pair_value(space: SpaceSpec, a: SparseVec, b: SparseVec) -> float:
    return min(float(norm(space, a - b, exact=False)),
               float(norm(space, a + b, exact=False)))


def _config_value(space: SpaceSpec, vecs: list[SparseVec]) -> float:
    best = math.inf
    for i in range(len(vecs)):
        for j in range(i + 1, len(vecs)):
            best = min(best, _pair_value(space, vecs[i], vecs[j]))
    return best


def _normalize(space: SpaceSpec, v: SparseVec) -> SparseVec | None:
    if v.is_rational and supports_exact(space):
        nv = norm(space, v, exact=True)
        if nv == 0:
            return None
        return v.scale(Fraction(1) / Fraction(nv))
    nv = float(norm(space, v, exact=False))
    if nv <= 0 or not math.isfinite(nv):
        return None
    return v.scale(1.0 / nv)


def kottman_lower_bound(space: SpaceSpec, k: int, dim: int,
                        budget: OptBudget | None = None,
                        warm_start: list[SparseVec] | None = None) -> SeparationCertificate:
    """Search k unit vectors in the first dim coordinates maximizing the
    symmetric separation; always at least the canonical-basis value.

    Restart r perturbs an l2-orthonormalized random frame with stream
    [seed, r]; coordinate-ascent proposals renormalize to the sphere.
    The canonical basis e_1..e_k and any warm start are always candidate
    configurations, so the result is monotone in the restart budget and,
    through `kottman_dim_sweep`, in the dimension.
    """
    if k < 2:
        raise ParameterError(f"set size must be at least 2, got {k}")
    if dim < k:
        raise ParameterError(f"dimension {dim} below set size {k}")
    budget = budget or OptBudget(restarts=16, max_iters=120)

    configs: list[list[SparseVec]] = []
    canonical = [SparseVec.basis(i) for i in range(1, k + 1)]
    canonical = [_normalize(space, v) for v in canonical]
    if any(v is None for v in canonical):
        raise ParameterError("a canonical basis vector has zero norm")
    configs.append(canonical)
    if warm_start is not None:
        if len(warm_start) != k:
            raise ParameterError(
                f"warm start has {len(warm_start)} vectors, expected {k}")
        ws = [_normalize(space, v) for v in warm_start]
        if all(v is not None for v in ws):
            configs.append(ws)

    def ascend(vecs: list[SparseVec], rng: np.random.Generator) -> list[SparseVec]:
        vecs = list(vecs)
        value = _config_value(space, vecs)
        step = 0.5
        for _ in range(budget.max_iters):
            improved = False
            for i in range(k):
                noise = rng.standard_normal(dim) * step
                cand = vecs[i] + SparseVec(
                    {j + 1: float(c) for j, c in enumerate(noise) if c != 0.0})
                cand = _normalize(space, cand)
                if cand is None:
                    continue
                trial = list(vecs)
                trial[i] = cand
                tval = _config_value(space, trial)
                if tval > value + budget.tol:
                    vecs, value = trial, tval
                    improved = True
            if not improved:
                step *= 0.6
                if step < 1e-4:
                    break
        return vecs

    for r in range(budget.restarts):
        rng = np.random.default_rng([budget.seed, r])
        frame = rng.standard_normal((k, dim))
        q, _ = np.linalg.qr(frame.T)
        frame = q.T[:k]
        start = []
        for row in frame:
            v = _normalize(space, SparseVec(
                {j + 1: float(c) for j, c in enumerate(row) if c != 0.0}))
            if v is None:
                break
            start.append(v)
        if len(start) < k:
            continue
        configs.append(ascend(start, rng))

    best = max(configs, key=lambda vecs: _config_value(space, vecs))
    return symmetric_separation(space, best)


def kottman_dim_sweep(space: SpaceSpec, k: int, dims: list[int],
                      budget: OptBudget | None = None) -> list[SeparationCertificate]:
    """Lower bounds over increasing dimensions, warm-starting each search
    from the previous best so the values are nondecreasing."""
    if any(b <= a for a, b in zip(dims, dims[1:])):
        raise ParameterError("dimensions must be strictly increasing")
    out: list[SeparationCertificate] = []
    warm: list[SparseVec] | None = None
    for d in dims:
        cert = kottman_lower_bound(space, k, d, budget, warm_start=warm)
        out.append(cert)
        warm = list(cert.vectors)
    return out
