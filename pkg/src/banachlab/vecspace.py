"""Norm and dual-norm oracles for finite truncations of sequence spaces.

A `SpaceSpec` names a norm evaluable on `SparseVec`: the classical spaces
lp (1 <= p <= inf) and c0, Tsirelson's space T and its dual T*, and
`Renormed` compositions with the renorming constructions.  Truncation is
implicit: a vector's max index defines the dimension it lives in.

Arithmetic follows the input scalars.  Polyhedral norms (l1, sup norms,
T, T*, and compositions built from them) evaluate exactly on rational
input; `exact=True` demands that path and fails loudly when the space or
the input cannot support it, `exact=False` forces floats, and the default
picks the exact path whenever it is available.

Three structural predicates drive certified shortcuts downstream:
`is_unconditional` (sign flips preserve the norm, hence coordinatewise
domination of moduli implies norm domination), `is_certified_path` (norm
values come from closed forms or exact LPs, not heuristic search), and
`supports_exact` (rational-in, rational-out).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import ExactPathError, InvalidSpaceError
from .lp import (LinExpr, LpModel, NormEncoder, GeneratorSetEncoder,
                 WeightedL1Encoder, WeightedLinfEncoder)
from .tsirelson import (DEFAULT_SUPPORT_CAP, generators, tsirelson_norm,
                        tsirelson_witness)
from .vectors import Functional, Scalar, SparseVec, pair

__all__ = [
    "Lp", "C0", "TsirelsonT", "TsirelsonTStar", "Renormed", "SpaceSpec",
    "norm", "dual_norm", "pair", "conjugate_exponent", "is_unconditional",
    "is_certified_path", "supports_exact", "encoder", "ambient_support",
    "space_label",
]


@dataclass(frozen=True)
class Lp:
    """lp norm; p = math.inf gives the sup norm."""

    p: float | Fraction

    def __post_init__(self):
        if self.p != math.inf and not self.p >= 1:
            raise InvalidSpaceError(f"lp requires p >= 1, got p = {self.p}")


@dataclass(frozen=True)
class C0:
    """Finitely supported vectors under the sup norm."""


@dataclass(frozen=True)
class TsirelsonT:
    """Tsirelson's space T (the constant-1/2 recursive norm)."""


@dataclass(frozen=True)
class TsirelsonTStar:
    """Dual of T, the original Tsirelson space; K^s = 2 territory."""


@dataclass(frozen=True)
class Renormed:
    """A base space carrying an equivalent norm.

    The renorm object owns the construction (it also records the base it
    was built over); the two must agree.
    """

    base: "SpaceSpec"
    renorm: object

    def __post_init__(self):
        rbase = getattr(self.renorm, "base", None)
        if rbase is not None and rbase != self.base:
            raise InvalidSpaceError(
                "renorm was constructed over a different base space")

    @classmethod
    def wrap(cls, renorm: object) -> "Renormed":
        return cls(renorm.base, renorm)


SpaceSpec = Lp | C0 | TsirelsonT | TsirelsonTStar | Renormed


def conjugate_exponent(p: float | Fraction) -> float | Fraction:
    if p == math.inf:
        return 1
    if p == 1:
        return math.inf
    return p / (p - 1)


def _as_exact_input(v: SparseVec, exact: bool | None, space: SpaceSpec) -> tuple[SparseVec, bool]:
    """Resolve the exact flag against the space and the input scalars."""
    if exact is False:
        return v.as_float(), False
    can = supports_exact(space) and v.is_rational
    if exact is True:
        if not supports_exact(space):
            raise ExactPathError(
                f"{space_label(space)} has no exact rational path")
        if not v.is_rational:
            raise ExactPathError(
                "exact path requires rational coordinates; got floats")
        return v.as_fraction(), True
    return (v.as_fraction(), True) if can else (v.as_float(), False)


def norm(space: SpaceSpec, v: SparseVec, *, exact: bool | None = None,
         cap: int | None = None) -> Scalar:
    """Norm of v in the given space; exact on rational polyhedral paths."""
    v, use_exact = _as_exact_input(v, exact, space)
    if v.is_zero:
        return Fraction(0) if use_exact else 0.0
    if isinstance(space, Lp):
        return _lp_norm(space.p, v)
    if isinstance(space, C0):
        return max(abs(c) for _, c in v.items())
    if isinstance(space, TsirelsonT):
        return tsirelson_norm(v, cap=cap or DEFAULT_SUPPORT_CAP)
    if isinstance(space, TsirelsonTStar):
        return _tstar_norm(v, use_exact, cap)
    if isinstance(space, Renormed):
        return space.renorm.norm_of(space.base, v, exact=exact, cap=cap)
    raise InvalidSpaceError(f"unknown space {space!r}")


def _lp_norm(p: float | Fraction, v: SparseVec) -> Scalar:
    if p == math.inf:
        return max(abs(c) for _, c in v.items())
    if p == 1:
        return sum(abs(c) for _, c in v.items())
    if p == 2:
        return math.sqrt(sum(float(c) * float(c) for _, c in v.items()))
    pf = float(p)
    return sum(abs(float(c)) ** pf for _, c in v.items()) ** (1.0 / pf)


def _tstar_norm(v: SparseVec, use_exact: bool, cap: int | None) -> Scalar:
    # dual of T: max { sum |v_i| x_i : ||x||_T <= 1, x >= 0 }
    # (1-unconditionality lets both sides go nonnegative).  Cutting planes:
    # solve over the admissible functionals collected so far, then ask the
    # T-norm kernel for a maximizing functional at the optimizer; if the
    # optimizer is in the T-ball it is optimal, else the witness is a new
    # violated facet.  Terminates because the facet set is finite.
    cap_val = cap or DEFAULT_SUPPORT_CAP
    planes: list[dict[int, Scalar]] = [{i: Fraction(1)} for i in v.support]
    seen = {frozenset(g.items()) for g in planes}
    while True:
        model = LpModel()
        xids = {i: model.new_var(nonneg=True) for i in v.support}
        for g in planes:
            row = LinExpr()
            for i, coef in g.items():
                row = row + LinExpr.variable(xids[i]).scale(coef)
            model.add_le(row, 1)
        obj = LinExpr()
        for i, c in v.items():
            obj = obj + LinExpr.variable(xids[i]).scale(abs(c))
        sol = model.solve(obj, maximize=True, exact=use_exact)
        point = SparseVec({i: sol.point.get(j, 0) for i, j in xids.items()})
        t_norm, witness = tsirelson_witness(point, cap_val)
        slack = 0 if use_exact else 1e-9
        if t_norm <= 1 + slack:
            return sol.value
        key = frozenset(witness.items())
        if key in seen:
            return sol.value
        seen.add(key)
        planes.append(witness)


def dual_norm(space: SpaceSpec, f: Functional, *, exact: bool | None = None,
              cap: int | None = None) -> Scalar:
    """Dual norm of a coordinate functional over the given space."""
    v = f.coefficients if isinstance(f, Functional) else f
    if isinstance(space, Lp):
        return norm(Lp(conjugate_exponent(space.p)), v, exact=exact)
    if isinstance(space, C0):
        return norm(Lp(1), v, exact=exact)
    if isinstance(space, TsirelsonT):
        vv, use_exact = _as_exact_input(v, exact, space)
        if vv.is_zero:
            return Fraction(0) if use_exact else 0.0
        return _tstar_norm(vv, use_exact, cap)
    if isinstance(space, TsirelsonTStar):
        vv, use_exact = _as_exact_input(v, exact, space)
        if vv.is_zero:
            return Fraction(0) if use_exact else 0.0
        return tsirelson_norm(vv, cap=cap or DEFAULT_SUPPORT_CAP)
    if isinstance(space, Renormed):
        return _renormed_dual_norm(space, v, exact=exact, cap=cap)
    raise InvalidSpaceError(f"unknown space {space!r}")


def _renormed_dual_norm(space: Renormed, f: SparseVec, *, exact: bool | None,
                        cap: int | None) -> Scalar:
    """max f(x) over the renormed unit ball of the materialized truncation."""
    support = tuple(sorted(set(f.support) | set(ambient_support(space))))
    enc = encoder(space, support)
    if enc is None:
        raise ExactPathError(
            f"{space_label(space)} is not LP-representable; dual norms of "
            f"renormed spaces are computed via their epigraph encoders")
    f, use_exact = _as_exact_input(f, exact, space)
    model = LpModel()
    x = {i: LinExpr.variable(model.new_var()) for i in support}
    enc.epigraph(model, x, LinExpr.constant(1))
    obj = LinExpr()
    for i, c in f.items():
        obj = obj + x[i].scale(c)
    return model.solve(obj, maximize=True, exact=use_exact).value


def is_unconditional(space: SpaceSpec) -> bool:
    """True when coordinate sign flips leave the norm unchanged.

    For a norm this implies 1-unconditionality (coordinatewise |a| <= |b|
    forces norm(a) <= norm(b)), which is what the certified profile and
    Tsirelson reductions rely on.
    """
    if isinstance(space, (Lp, C0, TsirelsonT, TsirelsonTStar)):
        return True
    if isinstance(space, Renormed):
        return space.renorm.unconditional_over(space.base)
    return False


def is_certified_path(space: SpaceSpec) -> bool:
    """True when norm() values come from closed forms or exact LPs."""
    if isinstance(space, (Lp, C0, TsirelsonT, TsirelsonTStar)):
        return True
    if isinstance(space, Renormed):
        return space.renorm.certified_over(space.base)
    return False


def supports_exact(space: SpaceSpec) -> bool:
    """True when rational input yields an exact rational norm value."""
    if isinstance(space, Lp):
        return space.p == 1 or space.p == math.inf
    if isinstance(space, (C0, TsirelsonT, TsirelsonTStar)):
        return True
    if isinstance(space, Renormed):
        return space.renorm.exact_over(space.base)
    return False


def encoder(space: SpaceSpec, support: tuple[int, ...]) -> NormEncoder | None:
    """LP epigraph encoder for the norm on the given support, if polyhedral."""
    if isinstance(space, Lp):
        if space.p == 1:
            return WeightedL1Encoder()
        if space.p == math.inf:
            return WeightedLinfEncoder()
        return None
    if isinstance(space, C0):
        return WeightedLinfEncoder()
    if isinstance(space, TsirelsonT):
        gens = generators(support)
        return GeneratorSetEncoder(
            tuple(tuple(sorted(g.items())) for g in gens))
    if isinstance(space, TsirelsonTStar):
        return None
    if isinstance(space, Renormed):
        return space.renorm.encoder_over(space.base, support)
    return None


def ambient_support(space: SpaceSpec) -> tuple[int, ...]:
    """Indices a renorming construction materializes; empty for base spaces."""
    if isinstance(space, Renormed):
        return space.renorm.touched_support(space.base)
    return ()


def space_label(space: SpaceSpec) -> str:
    if isinstance(space, Lp):
        return "l_inf" if space.p == math.inf else f"l_{space.p}"
    if isinstance(space, C0):
        return "c0"
    if isinstance(space, TsirelsonT):
        return "tsirelson-T"
    if isinstance(space, TsirelsonTStar):
        return "tsirelson-Tstar"
    if isinstance(space, Renormed):
        return f"renormed({space_label(space.base)}, {space.renorm.label()})"
    return repr(space)
