"""Asymptotically monotone subsequence selection.

The pipeline realizes the inductive construction behind near-monotone
basic subsequences of a seminormalized weakly null sequence.  Its engine
is the extension step: given a finite-dimensional E and a candidate x_N,
measure

    mu(N) = min { ||e + t x_N|| : e in span(E), ||e|| = 1, t real }

and accept when mu(N) >= 1/(1+delta); accepted steps compose, giving
projection-norm bounds prod(1+delta_i) over everything selected later.
The delta-schedule (1+eps)^{2^-(i+1)} - 1 makes that product at most
sqrt(1+eps).

Weak nullness cannot be decided from finitely many vectors; it is a
declared input contract, and `weak_null_witness` reports max |f(x_N)|
over a user-supplied functional family as a diagnostic instead.

On l2 the step is exact: mu(N) is the sine of the angle between x_N and
span(E).  Elsewhere the outer minimization is heuristic and therefore an
over-estimate of mu, so acceptance tightens to 1/(1 + delta*(1-guard));
the guard factor is recorded in every trace.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import ParameterError, PremiseError, ScanExhaustedError
from .optkit import (OptBudget, check_independent, minimize_1d_convex,
                     sphere_optimize)
from .vectors import Functional, Scalar, SparseVec, pair
from .vecspace import Lp, SpaceSpec, norm

DEFAULT_GUARD = 0.1
DEFAULT_MAX_SCAN = 500
DEFAULT_STAGES = 8
DEFAULT_LENGTH = 12


@dataclass
class SequenceSource:
    """Lazy indexed family of vectors with declared geometry.

    The norm-bound declaration is spot-checked on every fetched vector;
    weak nullness is trusted (see module docstring).
    """

    generator: Callable[[int], SparseVec]
    space: SpaceSpec
    declared_bounds: tuple[Scalar, Scalar]
    weak_null_declared: bool = True
    name: str = "custom"
    _cache: dict[int, SparseVec] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        A, B = self.declared_bounds
        if not (0 < A <= B):
            raise ParameterError(f"declared bounds must satisfy 0 < A <= B, got ({A}, {B})")

    def vector(self, n: int) -> SparseVec:
        if n < 1:
            raise ParameterError(f"sequence indices start at 1, got {n}")
        if n not in self._cache:
            v = self.generator(n)
            A, B = self.declared_bounds
            nv = float(norm(self.space, v, exact=False))
            if not (float(A) * (1 - 1e-9) <= nv <= float(B) * (1 + 1e-9)):
                raise PremiseError(
                    f"source '{self.name}' emitted vector {n} with norm "
                    f"{nv:.12g} outside the declared bounds [{A}, {B}]")
            self._cache[n] = v
        return self._cache[n]


def builtin_source(name: str, p: float | Fraction = 2) -> SequenceSource:
    """Named reproducible sources for desk experiments.

    orthonormal-l2: e_n in l2.  perturbed-l2: e_n + (1/n) e_1 in l2.
    lp-basis: e_n in lp (weakly null only for p > 1).  block-l1:
    normalized disjoint two-coordinate blocks in l1.
    """
    if name == "orthonormal-l2":
        return SequenceSource(lambda n: SparseVec.basis(n), Lp(2), (1, 1),
                              weak_null_declared=True, name=name)
    if name == "perturbed-l2":
        def gen(n: int) -> SparseVec:
            return SparseVec.basis(n) + SparseVec.basis(1).scale(Fraction(1, n))
        return SequenceSource(gen, Lp(2), (1, 2),
                              weak_null_declared=True, name=name)
    if name == "lp-basis":
        return SequenceSource(lambda n: SparseVec.basis(n), Lp(p), (1, 1),
                              weak_null_declared=bool(p > 1), name=name)
    if name == "block-l1":
        def gen_block(n: int) -> SparseVec:
            return (SparseVec.basis(2 * n - 1) + SparseVec.basis(2 * n)).scale(Fraction(1, 2))
        return SequenceSource(gen_block, Lp(1), (1, 1),
                              weak_null_declared=False, name=name)
    raise ParameterError(
        f"unknown source '{name}'; built-ins: orthonormal-l2, perturbed-l2, "
        f"lp-basis, block-l1")


@dataclass(frozen=True)
class DeltaSchedule:
    """Finite prefix of delta_i with prod(1+delta_i) < 1 + epsilon_target."""

    epsilon_target: Scalar
    deltas: tuple[float, ...]

    def __post_init__(self):
        prod = 1.0
        for d in self.deltas:
            prod *= 1.0 + d
        if self.epsilon_target > 0 and not prod < 1 + self.epsilon_target:
            raise ParameterError(
                f"schedule product {prod} is not below 1 + {self.epsilon_target}")

    @property
    def product(self) -> float:
        out = 1.0
        for d in self.deltas:
            out *= 1.0 + d
        return out


def delta_schedule(epsilon: Scalar, length: int) -> DeltaSchedule:
    """delta_i = (1+eps)^(2^-(i+1)) - 1; the infinite product is sqrt(1+eps).

    epsilon = 0 is admitted and gives the all-zero schedule (the product
    degenerates to 1, which forces exact norm preservation at every step).
    """
    if epsilon < 0:
        raise ParameterError(f"epsilon must be nonnegative, got {epsilon}")
    if length < 1:
        raise ParameterError(
            f"length must be at least 1, got {length}: an empty prefix "
            f"cannot witness the product bound")
    base = 1.0 + float(epsilon)
    deltas = tuple(base ** (2.0 ** -(i + 1)) - 1.0 for i in range(1, length + 1))
    return DeltaSchedule(epsilon, deltas)


@dataclass(frozen=True)
class SelectionRow:
    indices: tuple[int, ...]
    margins: tuple[float, ...]
    deltas: tuple[float, ...]


@dataclass(frozen=True)
class SelectionTrace:
    """Per-stage index rows, the diagonal, and measured step margins."""

    rows: tuple[tuple[int, ...], ...]
    diagonal: tuple[int, ...]
    residuals: tuple[tuple[float, ...], ...]
    epsilons: tuple[float, ...]
    guard: float
    source_name: str

    def __post_init__(self):
        for j in range(1, len(self.rows)):
            if self.rows[j][:j] != self.diagonal[:j]:
                raise ParameterError(
                    f"row {j + 1} does not repeat the diagonal prefix")
        if any(b <= a for a, b in zip(self.diagonal, self.diagonal[1:])):
            raise ParameterError("diagonal indices must be strictly increasing")


def _mu_exact_l2(E_vectors: Sequence[SparseVec], x: SparseVec) -> float:
    """sin of the angle between x and span(E): exact minimum of the step."""
    support = sorted(set().union(*(set(v.support) for v in E_vectors)) | set(x.support))
    col = {i: k for k, i in enumerate(support)}
    mat = np.zeros((len(E_vectors), len(support)))
    for r, v in enumerate(E_vectors):
        for i, c in v.items():
            mat[r, col[i]] = float(c)
    xd = np.zeros(len(support))
    for i, c in x.items():
        xd[col[i]] = float(c)
    xn = float(np.linalg.norm(xd))
    if xn == 0:
        return 1.0
    coef, *_ = np.linalg.lstsq(mat.T, xd, rcond=None)
    proj = coef @ mat
    resid = xd - proj
    return float(np.linalg.norm(resid)) / xn


def _mu_heuristic(space: SpaceSpec, E_vectors: Sequence[SparseVec],
                  x: SparseVec, budget: OptBudget) -> float:
    """Upper estimate of mu via heuristic outer minimization over e."""
    xnorm = float(norm(space, x, exact=False))

    def objective(a: np.ndarray, e_vec: SparseVec) -> float:
        # inner minimization over t is convex; beyond |t| = 2/||x|| the
        # value exceeds ||e|| = 1, so the bracket is safe
        r = 2.0 / xnorm if xnorm > 0 else 1.0

        def g(t: float) -> float:
            return float(norm(space, e_vec + x.scale(t), exact=False))

        return minimize_1d_convex(g, (-r, r), tol=1e-7).value

    res = sphere_optimize(space, list(E_vectors), objective, direction="min",
                          budget=budget)
    return float(res.value)


def mazur_step(space: SpaceSpec, E_basis: Sequence[SparseVec],
               source: SequenceSource, start_index: int, delta: float,
               budget: OptBudget | None = None, *,
               guard: float = DEFAULT_GUARD,
               max_scan: int = DEFAULT_MAX_SCAN) -> tuple[int, float]:
    """Smallest index N >= start_index whose mu(N) clears 1/(1+delta).

    On l2 mu is exact and the test is used as stated; elsewhere the
    heuristic estimate is tested against the stricter 1/(1+delta(1-guard)).
    Raises ScanExhaustedError (carrying the best margin seen) after
    max_scan candidates.
    """
    if delta < 0:
        raise ParameterError(f"delta must be nonnegative, got {delta}")
    if not 0 <= guard < 1:
        raise ParameterError(f"guard must lie in [0, 1), got {guard}")
    check_independent(E_basis)
    budget = budget or OptBudget(restarts=8, max_iters=150)
    exact_l2 = isinstance(space, Lp) and space.p == 2
    threshold = 1.0 / (1.0 + delta) if exact_l2 else 1.0 / (1.0 + delta * (1.0 - guard))

    best_index, best_margin = None, -math.inf
    for N in range(start_index, start_index + max_scan):
        x = source.vector(N)
        mu = _mu_exact_l2(E_basis, x) if exact_l2 \
            else _mu_heuristic(space, E_basis, x, budget)
        if mu > best_margin:
            best_index, best_margin = N, mu
        if mu >= threshold:
            return N, mu
    raise ScanExhaustedError(
        f"no index in [{start_index}, {start_index + max_scan}) reached the "
        f"margin {threshold:.9g}; best was {best_margin:.9g} at {best_index}",
        best_index=best_index, best_margin=best_margin)


def pelczynski_select(source: SequenceSource, epsilon: Scalar, length: int,
                      budget: OptBudget | None = None, *,
                      start_index: int = 1,
                      guard: float = DEFAULT_GUARD,
                      max_scan: int = DEFAULT_MAX_SCAN) -> SelectionRow:
    """Select `length` indices whose span system has basic constant < 1+eps.

    The first vector is accepted outright (nothing to preserve); step k
    then guards span of everything chosen so far with delta_{k-1}, so the
    product bound covers every partial projection.
    """
    if length < 1:
        raise ParameterError(f"length must be at least 1, got {length}")
    schedule = delta_schedule(epsilon, length - 1)
    indices = [start_index]
    margins = [1.0]
    chosen = [source.vector(start_index)]
    for k, delta in enumerate(schedule.deltas):
        N, mu = mazur_step(source.space, chosen, source,
                           indices[-1] + 1, delta, budget,
                           guard=guard, max_scan=max_scan)
        indices.append(N)
        margins.append(float(mu))
        chosen.append(source.vector(N))
    return SelectionRow(tuple(indices), tuple(margins), schedule.deltas)


def asymptotic_monotone_select(source: SequenceSource,
                               epsilons: Sequence[Scalar],
                               stages: int = DEFAULT_STAGES,
                               budget: OptBudget | None = None, *,
                               length: int = DEFAULT_LENGTH,
                               guard: float = DEFAULT_GUARD,
                               max_scan: int = DEFAULT_MAX_SCAN) -> SelectionTrace:
    """Diagonal extraction: stage j+1 re-selects past the diagonal prefix.

    Row 1 is a plain (1+eps_1) selection.  Row j+1 fixes the diagonal
    prefix as E and extends it by mazur steps under the eps_{j+1}
    schedule; its (j+1)-th entry joins the diagonal.  Each diagonal
    element was accepted against the span of all previous diagonal
    elements, so the diagonal's ||P_k|| telescopes below prod over
    m > k of (1 + delta^(m)_1) < 1 + eps_k.
    """
    if stages < 1:
        raise ParameterError(f"stages must be at least 1, got {stages}")
    if length < stages:
        raise ParameterError(
            f"row length {length} cannot be below the stage count {stages}")
    eps = [float(e) for e in epsilons[:stages]]
    if len(eps) < stages:
        raise ParameterError(
            f"need {stages} epsilons, got {len(epsilons)}")
    if any(e <= 0 for e in eps):
        raise ParameterError("epsilons must be positive")
    if any(b >= a for a, b in zip(eps, eps[1:])):
        raise ParameterError("epsilons must be strictly decreasing")

    rows: list[tuple[int, ...]] = []
    residuals: list[tuple[float, ...]] = []
    row1 = pelczynski_select(source, eps[0], length, budget,
                             guard=guard, max_scan=max_scan)
    rows.append(row1.indices)
    residuals.append(row1.margins)
    diagonal = [row1.indices[0]]
    diag_vectors = [source.vector(diagonal[0])]

    for j in range(1, stages):
        schedule = delta_schedule(eps[j], length - j)
        indices = list(diagonal)
        margins: list[float] = []
        current = list(diag_vectors)
        for delta in schedule.deltas:
            N, mu = mazur_step(source.space, current, source,
                               indices[-1] + 1, delta, budget,
                               guard=guard, max_scan=max_scan)
            indices.append(N)
            margins.append(float(mu))
            current.append(source.vector(N))
        rows.append(tuple(indices))
        residuals.append(tuple(margins))
        diagonal.append(indices[j])
        diag_vectors.append(source.vector(indices[j]))

    return SelectionTrace(tuple(rows), tuple(diagonal), tuple(residuals),
                          tuple(eps), guard, source.name)


def weak_null_witness(source: SequenceSource, functionals: Sequence[Functional],
                      indices: Sequence[int]) -> dict[int, float]:
    """Diagnostic max |f(x_N)| per index over a user-supplied family."""
    if not functionals:
        raise ParameterError("functional family is empty")
    out: dict[int, float] = {}
    for n in indices:
        x = source.vector(n)
        out[n] = max(abs(float(pair(f, x))) for f in functionals)
    return out
