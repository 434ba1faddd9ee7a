"""Shared generators for seeded random test vectors."""

from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from banachlab import SparseVec


def ev(i: int, value=1) -> SparseVec:
    return SparseVec.basis(i, value)


def rational_vec(rng: np.random.Generator, dim: int, denom: int = 16,
                 lo: int = -8, hi: int = 8) -> SparseVec:
    """Random rational vector in the first ``dim`` coordinates (may be zero)."""
    entries = {}
    for i in range(1, dim + 1):
        if rng.random() < 0.6:
            num = int(rng.integers(lo, hi + 1))
            if num:
                entries[i] = Fraction(num, denom)
    return SparseVec(entries)


def nonzero_rational_vec(rng: np.random.Generator, dim: int, **kw) -> SparseVec:
    while True:
        v = rational_vec(rng, dim, **kw)
        if not v.is_zero:
            return v


def float_vec(rng: np.random.Generator, dim: int) -> SparseVec:
    vals = rng.standard_normal(dim)
    return SparseVec({i + 1: float(x) for i, x in enumerate(vals) if x != 0.0})


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260814)
