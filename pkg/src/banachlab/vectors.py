"""Finitely supported coordinate vectors and coordinate functionals.

`SparseVec` is the universal element of every space truncation: a finite
map from 1-based coordinate index to a real scalar.  Scalars may be
floats or `fractions.Fraction`; rational entries are preserved by all
vector arithmetic so exact norm paths stay exact.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping

Scalar = int | float | Fraction


def _is_rational(x: Scalar) -> bool:
    return isinstance(x, (int, Fraction))


class SparseVec:
    """Finitely supported vector in canonical form (no stored zeros)."""

    __slots__ = ("_entries",)

    def __init__(self, entries: Mapping[int, Scalar] | Iterable[tuple[int, Scalar]] = ()):
        items = entries.items() if isinstance(entries, Mapping) else entries
        store: dict[int, Scalar] = {}
        for idx, val in items:
            if not isinstance(idx, int) or idx < 1:
                raise ValueError(f"coordinate index must be a positive integer, got {idx!r}")
            if val == 0:
                continue
            store[idx] = store.get(idx, 0) + val
            if store[idx] == 0:
                del store[idx]
        self._entries = dict(sorted(store.items()))

    @classmethod
    def basis(cls, i: int, value: Scalar = 1) -> SparseVec:
        return cls({i: value})

    def items(self) -> list[tuple[int, Scalar]]:
        return list(self._entries.items())

    def get(self, i: int) -> Scalar:
        return self._entries.get(i, 0)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(self._entries)

    @property
    def max_index(self) -> int:
        return max(self._entries) if self._entries else 0

    @property
    def is_zero(self) -> bool:
        return not self._entries

    @property
    def is_rational(self) -> bool:
        return all(_is_rational(v) for v in self._entries.values())

    def restrict(self, indices: Iterable[int]) -> SparseVec:
        keep = set(indices)
        return SparseVec({i: v for i, v in self._entries.items() if i in keep})

    def scale(self, alpha: Scalar) -> SparseVec:
        if alpha == 0:
            return SparseVec()
        return SparseVec({i: alpha * v for i, v in self._entries.items()})

    def __add__(self, other: SparseVec) -> SparseVec:
        out = dict(self._entries)
        for i, v in other._entries.items():
            out[i] = out.get(i, 0) + v
        return SparseVec(out)

    def __sub__(self, other: SparseVec) -> SparseVec:
        return self + other.scale(-1)

    def __neg__(self) -> SparseVec:
        return self.scale(-1)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SparseVec):
            return NotImplemented
        return self._entries == other._entries

    def __hash__(self) -> int:
        return hash(tuple(self._entries.items()))

    def __bool__(self) -> bool:
        return bool(self._entries)

    def __repr__(self) -> str:
        inside = " + ".join(f"{v}*e{i}" for i, v in self._entries.items())
        return f"SparseVec({inside or '0'})"

    def as_fraction(self) -> SparseVec:
        """Entrywise exact conversion to rationals (floats convert exactly)."""
        return SparseVec({i: v if _is_rational(v) else Fraction(v)
                          for i, v in self._entries.items()})

    def as_float(self) -> SparseVec:
        return SparseVec({i: float(v) for i, v in self._entries.items()})


class Functional:
    """Coordinate-pairing functional f(x) = sum_i f_i x_i."""

    __slots__ = ("coefficients",)

    def __init__(self, coefficients: SparseVec):
        self.coefficients = coefficients

    @classmethod
    def basis(cls, i: int, value: Scalar = 1) -> Functional:
        return cls(SparseVec.basis(i, value))

    def __call__(self, v: SparseVec) -> Scalar:
        return pair(self, v)

    def scale(self, alpha: Scalar) -> Functional:
        return Functional(self.coefficients.scale(alpha))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Functional):
            return NotImplemented
        return self.coefficients == other.coefficients

    def __repr__(self) -> str:
        return f"Functional({self.coefficients!r})"


def pair(f: Functional, v: SparseVec) -> Scalar:
    """Bilinear coordinate pairing over the common support."""
    fe = f.coefficients
    small, large = (fe, v) if len(fe.support) <= len(v.support) else (v, fe)
    return sum(val * large.get(i) for i, val in small.items())


def lincomb(coeffs: Iterable[Scalar], vectors: Iterable[SparseVec]) -> SparseVec:
    out: dict[int, Scalar] = {}
    for a, vec in zip(coeffs, vectors):
        if a == 0:
            continue
        for i, v in vec.items():
            out[i] = out.get(i, 0) + a * v
    return SparseVec(out)
