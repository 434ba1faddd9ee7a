"""Tsirelson-norm kernel against an independent brute-force oracle.

The production code computes the norm by dynamic programming over
contiguous position runs and finest exact-j partitions.  The oracle here
shares none of those reductions: it enumerates *arbitrary* families of
disjoint finite index sets (not just intervals), including the never-
optimal singleton families, and takes the literal fixed point.  Agreement
on random rational vectors is therefore evidence for the reductions, not
a restatement of them.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

import numpy as np
import pytest

from banachlab import (
    Functional,
    SparseVec,
    SupportCapError,
    TsirelsonT,
    dual_norm,
    generators,
    norm,
    tsirelson_norm,
    tsirelson_witness,
)

from conftest import ev, nonzero_rational_vec


# ---------------------------------------------------------------------------
# independent oracle
# ---------------------------------------------------------------------------

def _families(avail: tuple[int, ...], k: int):
    """All families of exactly k disjoint nonempty subsets of ``avail``
    with max(E_i) < min(E_{i+1}), as tuples of frozensets."""
    if k == 0:
        yield ()
        return
    n = len(avail)
    for mask in range(1, 1 << n):
        first = tuple(avail[i] for i in range(n) if mask >> i & 1)
        rest = tuple(a for a in avail if a > first[-1])
        for tail in _families(rest, k - 1):
            yield (first,) + tail


def brute_tsirelson_norm(v: SparseVec) -> Fraction:
    entries = {i: Fraction(c) for i, c in v.items()}

    @lru_cache(maxsize=None)
    def rec(support: frozenset[int]) -> Fraction:
        if not support:
            return Fraction(0)
        best = max(abs(entries[i]) for i in support)
        idxs = tuple(sorted(support))
        # k = 1 included deliberately: the oracle must not inherit the
        # production code's skip-singleton shortcut.  The one exception is
        # the family whose single set is the whole support: recursing on it
        # is circular, and its value ||x||/2 can never exceed the norm.
        for k in range(1, idxs[-1] + 1):
            avail = tuple(i for i in idxs if i >= k)
            if len(avail) < k:
                break
            for fam in _families(avail, k):
                if len(fam) == 1 and frozenset(fam[0]) == support:
                    continue
                total = sum((rec(frozenset(part)) for part in fam), Fraction(0))
                half = total / 2
                if half > best:
                    best = half
        return best

    return rec(frozenset(entries))


# ---------------------------------------------------------------------------
# oracle agreement
# ---------------------------------------------------------------------------

def test_brute_force_agreement_random_rationals():
    rng = np.random.default_rng(411)
    for _ in range(40):
        v = nonzero_rational_vec(rng, 6, denom=8, lo=-4, hi=4)
        assert tsirelson_norm(v) == brute_tsirelson_norm(v), v.items()


def test_brute_force_agreement_structured():
    cases = [
        SparseVec({i: 1 for i in range(1, 7)}),
        SparseVec({i: Fraction(1, i) for i in range(1, 7)}),
        SparseVec({2: 1, 3: -1, 5: 2, 6: -2}),
        SparseVec({1: 3}),
        SparseVec({4: 1, 5: 1, 6: 1}),
        SparseVec({1: 1, 6: 1}),
    ]
    for v in cases:
        assert tsirelson_norm(v) == brute_tsirelson_norm(v), v.items()


def test_brute_force_agreement_dim_seven_spot():
    rng = np.random.default_rng(77)
    for _ in range(4):
        v = nonzero_rational_vec(rng, 7, denom=4, lo=-3, hi=3)
        assert tsirelson_norm(v) == brute_tsirelson_norm(v)


# ---------------------------------------------------------------------------
# pinned values
# ---------------------------------------------------------------------------

def test_unit_vectors_and_small_sums():
    assert tsirelson_norm(ev(1)) == 1
    assert tsirelson_norm(ev(2) + ev(3)) == 1
    assert tsirelson_norm(SparseVec({4: 1, 5: 1, 6: 1})) == Fraction(3, 2)


def test_partial_sum_norms_frozen():
    # ||e_1 + ... + e_n||_T for n = 1..10
    expected = [1, 1, 1, 1, Fraction(3, 2), Fraction(3, 2), 2, 2,
                Fraction(5, 2), Fraction(5, 2)]
    for n, want in enumerate(expected, start=1):
        x = SparseVec({i: 1 for i in range(1, n + 1)})
        assert tsirelson_norm(x) == want


def test_rational_in_rational_out():
    v = SparseVec({i: 1 for i in range(1, 6)})
    out = tsirelson_norm(v)
    assert isinstance(out, (int, Fraction)) and out == Fraction(3, 2)
    vf = SparseVec({1: 0.5, 2: 1.25})
    assert isinstance(tsirelson_norm(vf), float)


# ---------------------------------------------------------------------------
# witness functional
# ---------------------------------------------------------------------------

def test_witness_attains_norm_and_lies_in_dual_ball():
    rng = np.random.default_rng(99)
    for _ in range(12):
        v = nonzero_rational_vec(rng, 6, denom=8, lo=-4, hi=4)
        val, wit = tsirelson_witness(v)
        attained = sum((c * abs(v.get(i)) for i, c in wit.items()), Fraction(0))
        assert attained == val
        wnorm = dual_norm(TsirelsonT(), Functional(SparseVec(dict(wit))), exact=True)
        assert wnorm <= 1


def test_witness_dominated_by_norm_everywhere():
    # sum_i g_i |x_i| <= ||x||_T for witnesses from unrelated vectors
    rng = np.random.default_rng(7)
    probes = [nonzero_rational_vec(rng, 6, denom=4, lo=-3, hi=3) for _ in range(6)]
    for src in probes:
        _, wit = tsirelson_witness(src)
        for x in probes:
            val = sum((c * abs(x.get(i)) for i, c in wit.items()), Fraction(0))
            assert val <= tsirelson_norm(x)


# ---------------------------------------------------------------------------
# generator enumeration (epigraph-encoder path)
# ---------------------------------------------------------------------------

def test_generators_reproduce_norm():
    rng = np.random.default_rng(13)
    for _ in range(10):
        v = nonzero_rational_vec(rng, 6, denom=8, lo=-4, hi=4)
        gens = generators(v.support)
        gmax = max(
            sum((Fraction(c) * abs(v.get(i)) for i, c in g.items()), Fraction(0))
            for g in gens
        )
        assert gmax == tsirelson_norm(v)


def test_generators_lie_in_dual_ball():
    gens = generators(range(1, 7))
    for g in gens:
        f = Functional(SparseVec(dict(g)))
        assert dual_norm(TsirelsonT(), f, exact=True) <= 1


# ---------------------------------------------------------------------------
# support cap
# ---------------------------------------------------------------------------

def test_support_cap_enforced():
    v = ev(17)
    with pytest.raises(SupportCapError) as exc:
        tsirelson_norm(v)
    assert "16" in str(exc.value)
    assert tsirelson_norm(v, cap=20) == 1


def test_norm_dispatch_honours_cap_override():
    v = SparseVec({i: 1 for i in range(15, 19)})
    with pytest.raises(SupportCapError):
        norm(TsirelsonT(), v)
    assert norm(TsirelsonT(), v, cap=18) == Fraction(2)
