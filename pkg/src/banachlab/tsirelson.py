"""Tsirelson-space norm kernel.

Figiel-Johnson convention with constant 1/2: the norm is the smallest
solution of

    ||x|| = max( ||x||_inf, 1/2 * sup sum_j ||E_j x|| )

where the sup runs over families of finite sets k <= E_1 < ... < E_k
(E < F meaning max E < min F, and k <= E_1 meaning k <= min E_1).
On a finite support the recursion closes over strictly smaller sets, so
the value is computed exactly by dynamic programming.

Two reductions keep the search polynomial in the support size:

* 1-unconditionality lets every E_j absorb all support points between
  its endpoints, so only contiguous runs of support positions matter;
* the triangle inequality makes refinements weakly better, so for a
  fixed admissible start the finest allowed partition dominates.

Families with a single set contribute ||E_1 x||/2 <= ||x||/2 and are
skipped, which also grounds the recursion.

On a fixed finite support the T-norm is the max of finitely many
nonnegative dyadic-rational functionals.  `tsirelson_witness` returns a
maximizing one alongside the value, which makes the kernel a separation
oracle for linear programs over the T-ball; `generators` enumerates the
whole (domination-pruned) set for epigraph encoders that need every
facet at once, at exponential cost in the support size.

Both paths run unchanged on floats and on `fractions.Fraction`.
"""

from __future__ import annotations

from collections.abc import Iterable
from fractions import Fraction

from .errors import SupportCapError
from .vectors import Scalar, SparseVec

DEFAULT_SUPPORT_CAP = 16
DEFAULT_GENERATOR_CAP = 12


def check_cap(v: SparseVec, cap: int, what: str = "tsirelson norm") -> None:
    if v.max_index > cap:
        raise SupportCapError(
            f"{what}: support reaches index {v.max_index}, above the cap {cap}; "
            f"the admissible-partition enumeration is exponential, raise the cap explicitly"
        )


def tsirelson_witness(v: SparseVec,
                      cap: int = DEFAULT_SUPPORT_CAP) -> tuple[Scalar, dict[int, Scalar]]:
    """T-norm together with a maximizing admissible functional.

    Returns (||v||_T, g) where g is nonnegative with dyadic-rational
    coefficients, sum_i g_i |v_i| = ||v||_T, and sum_i g_i |x_i| <= ||x||_T
    for every x.  The witness makes this kernel a separation oracle for
    linear programs constrained to the T-ball.
    """
    check_cap(v, cap)
    if v.is_zero:
        return 0, {}
    idx = list(v.support)
    vals = [abs(v.get(i)) for i in idx]
    m = len(idx)

    Witness = dict[int, Scalar]
    norm_memo: dict[tuple[int, int], tuple[Scalar, Witness]] = {}
    split_memo: dict[tuple[int, int, int], tuple[Scalar, list[Witness]]] = {}

    def norm(l: int, r: int) -> tuple[Scalar, Witness]:
        key = (l, r)
        if key in norm_memo:
            return norm_memo[key]
        q = max(range(l, r + 1), key=lambda t: vals[t])
        best: Scalar = vals[q]
        wit: Witness = {idx[q]: Fraction(1)}
        for p in range(l, r + 1):
            parts_max = min(idx[p], r - p + 1)
            for j in range(2, parts_max + 1):
                sval, parts = split(p, r, j)
                half = sval / Fraction(2)
                if half > best:
                    merged: Witness = {}
                    for g in parts:
                        for i, val in g.items():
                            merged[i] = merged.get(i, 0) + val
                    best = half
                    wit = {i: val / Fraction(2) for i, val in merged.items()}
        norm_memo[key] = (best, wit)
        return best, wit

    def split(p: int, r: int, j: int) -> tuple[Scalar, list[Witness]]:
        # max of sum of block norms over partitions of positions p..r
        # into exactly j contiguous nonempty blocks
        if j == 1:
            val, wit = norm(p, r)
            return val, [wit]
        key = (p, r, j)
        if key in split_memo:
            return split_memo[key]
        best: Scalar | None = None
        best_parts: list[Witness] = []
        for e in range(p, r - j + 2):
            v1, w1 = norm(p, e)
            v2, w2 = split(e + 1, r, j - 1)
            if best is None or v1 + v2 > best:
                best = v1 + v2
                best_parts = [w1] + w2
        split_memo[key] = (best, best_parts)
        return best, best_parts

    return norm(0, m - 1)


def tsirelson_norm(v: SparseVec, cap: int = DEFAULT_SUPPORT_CAP) -> Scalar:
    """Exact T-norm of a finitely supported vector (float or rational)."""
    return tsirelson_witness(v, cap)[0]


def _dominated(a: tuple[tuple[int, Scalar], ...], b: tuple[tuple[int, Scalar], ...]) -> bool:
    """True if functional a is coordinatewise <= functional b (both >= 0)."""
    bd = dict(b)
    return all(val <= bd.get(i, 0) for i, val in a)


def _prune(funcs: set[tuple[tuple[int, Scalar], ...]]) -> list[tuple[tuple[int, Scalar], ...]]:
    items = sorted(funcs, key=lambda f: (-len(f), f))
    kept: list[tuple[tuple[int, Scalar], ...]] = []
    for f in items:
        if not any(_dominated(f, g) for g in kept):
            kept = [g for g in kept if not _dominated(g, f)]
            kept.append(f)
    return kept


def generators(support: Iterable[int],
               cap: int = DEFAULT_GENERATOR_CAP) -> list[dict[int, Scalar]]:
    """Nonnegative functionals whose max over the set is the T-norm.

    For every x supported on `support`, ||x||_T = max_g sum_i g_i |x_i|.
    Coefficients are exact rationals (dyadic), so linear programs built
    from them stay on the exact path.  The set is pruned by coordinatewise
    domination, leaving the candidate extreme points of the dual ball's
    positive face.
    """
    idx = sorted(set(support))
    if not idx:
        return []
    if len(idx) > cap:
        raise SupportCapError(
            f"tsirelson generators: support size {len(idx)} exceeds cap {cap}; "
            f"the generated-functional set grows exponentially, raise the cap explicitly"
        )
    m = len(idx)

    memo: dict[tuple[int, int], list[tuple[tuple[int, Scalar], ...]]] = {}

    def gen(l: int, r: int) -> list[tuple[tuple[int, Scalar], ...]]:
        key = (l, r)
        if key in memo:
            return memo[key]
        out: set[tuple[tuple[int, Scalar], ...]] = {
            ((idx[q], Fraction(1)),) for q in range(l, r + 1)
        }
        for p in range(l, r + 1):
            parts_max = min(idx[p], r - p + 1)
            for j in range(2, parts_max + 1):
                for combo in _partition_combos(p, r, j, gen):
                    merged: dict[int, Scalar] = {}
                    for g in combo:
                        for i, val in g:
                            merged[i] = merged.get(i, 0) + val
                    out.add(tuple(sorted((i, val / Fraction(2)) for i, val in merged.items())))
        pruned = _prune(out)
        memo[key] = pruned
        return pruned

    def _partition_combos(p, r, j, gen_fn):
        # yield tuples of generators, one per block, over exact-j partitions
        if j == 1:
            for g in gen_fn(p, r):
                yield (g,)
            return
        for e in range(p, r - j + 2):
            for g in gen_fn(p, e):
                for rest in _partition_combos(e + 1, r, j - 1, gen_fn):
                    yield (g,) + rest

    return [dict(g) for g in gen(0, m - 1)]
