"""Equivalent renormings of the base spaces.

Five constructions, each a frozen spec evaluable through
`vecspace.norm(Renormed(base, spec), v)`:

* `DiagonalScale` — weighted coordinates; the simplest declared-sandwich
  equivalent norm, used as a base for the other constructions.
* `MaxBiortho` — |y| = max( ||y||/(1+eps), sup_{i != j} |f_i(y)| + |f_j(y)| )
  over a biorthogonal functional family; on the associated unit system it
  produces symmetric 2-separation exactly.
* `ICExtension` — extends an inner norm from a subspace to the ambient
  space by infimal convolution with b * base distance; restricted to the
  subspace it reproduces the inner norm, and it is sandwiched between
  base/(1+eps) and b * base.
* `JamesIC` — |y|_Y = inf { ||x||_1 + ||y - Tx||_base } for an embedding
  T given by block images; on the image of the unit vectors it is an
  exact l1 isometry, making those images a normalized bimonotone basis.
* `StrictConvex` — |||x|||^2 = ||x||^2 + delta * sum 2^{-n} f_n(x)^2; an
  arbitrarily small strictly convex perturbation, which kills symmetric
  2-separation.

Every spec answers the structural predicates (`unconditional_over`,
`certified_over`, `exact_over`), exposes an LP epigraph encoder when its
norm is polyhedral over the base, and reports which coordinates its data
touches (for dual-norm truncations).
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.optimize import minimize as _scipy_minimize

from . import vecspace
from .errors import (BudgetError, ParameterError, PremiseError, RankError)
from .lp import LinExpr, LpModel, NormEncoder
from .optkit import OptBudget, OptResult, check_independent, infimal_convolution
from .vectors import Functional, Scalar, SparseVec, lincomb, pair


def _is_rational_scalar(x: Scalar) -> bool:
    return isinstance(x, (int, Fraction))


def _functional_expr(f: Functional, coords: dict[int, LinExpr]) -> LinExpr:
    expr = LinExpr()
    for i, c in f.coefficients.items():
        if i in coords:
            expr = expr + coords[i].scale(c)
    return expr


# -- diagonal scaling -------------------------------------------------------


@dataclass(frozen=True)
class DiagonalScale:
    """norm(v) = base norm of (w_i v_i); weights default to 1."""

    base: object
    weights: tuple[tuple[int, Scalar], ...]

    def __post_init__(self):
        for i, w in self.weights:
            if not w > 0:
                raise ParameterError(f"diagonal weight at {i} must be positive, got {w}")

    def _scaled(self, v: SparseVec) -> SparseVec:
        w = dict(self.weights)
        return SparseVec({i: c * w.get(i, 1) for i, c in v.items()})

    def norm_of(self, base, v: SparseVec, exact: bool | None = None,
                cap: int | None = None) -> Scalar:
        return vecspace.norm(base, self._scaled(v), exact=exact, cap=cap)

    def unconditional_over(self, base) -> bool:
        return vecspace.is_unconditional(base)

    def certified_over(self, base) -> bool:
        return vecspace.is_certified_path(base)

    def exact_over(self, base) -> bool:
        return vecspace.supports_exact(base) and all(
            _is_rational_scalar(w) for _, w in self.weights)

    def encoder_over(self, base, support: tuple[int, ...]) -> NormEncoder | None:
        inner = vecspace.encoder(base, support)
        if inner is None:
            return None
        return _ScaledCoordsEncoder(inner, self.weights)

    def touched_support(self, base) -> tuple[int, ...]:
        return vecspace.ambient_support(base)

    def label(self) -> str:
        return "diagonal"


@dataclass(frozen=True)
class _ScaledCoordsEncoder:
    inner: NormEncoder
    weights: tuple[tuple[int, Scalar], ...]

    def epigraph(self, model: LpModel, coords: dict[int, LinExpr], t: LinExpr) -> None:
        w = dict(self.weights)
        scaled = {i: expr.scale(w.get(i, 1)) for i, expr in coords.items()}
        self.inner.epigraph(model, scaled, t)


# -- max-biorthogonal renorm ------------------------------------------------


@dataclass(frozen=True)
class MaxBiortho:
    """|y| = max( base(y)/(1+eps), top-two sum of |f_i(y)| )."""

    base: object
    epsilon: Scalar
    functionals: tuple[Functional, ...]

    def __post_init__(self):
        if not 0 < self.epsilon < 1:
            raise ParameterError(
                f"max-biortho epsilon must lie in (0,1), got {self.epsilon}")
        if len(self.functionals) < 2:
            raise ParameterError(
                "max-biortho needs at least 2 functionals (the pair sup is empty otherwise)")

    def norm_of(self, base, y: SparseVec, exact: bool | None = None,
                cap: int | None = None) -> Scalar:
        base_val = vecspace.norm(base, y, exact=exact, cap=cap)
        vals = sorted((abs(pair(f, y)) for f in self.functionals), reverse=True)
        return max(base_val / (1 + self.epsilon), vals[0] + vals[1])

    def unconditional_over(self, base) -> bool:
        return vecspace.is_unconditional(base) and all(
            len(f.coefficients.support) <= 1 for f in self.functionals)

    def certified_over(self, base) -> bool:
        return vecspace.is_certified_path(base)

    def exact_over(self, base) -> bool:
        return (vecspace.supports_exact(base)
                and _is_rational_scalar(self.epsilon)
                and all(f.coefficients.is_rational for f in self.functionals))

    def encoder_over(self, base, support: tuple[int, ...]) -> NormEncoder | None:
        inner = vecspace.encoder(base, support)
        if inner is None:
            return None
        return _MaxBiorthoEncoder(inner, self.epsilon, self.functionals)

    def touched_support(self, base) -> tuple[int, ...]:
        touched = set(vecspace.ambient_support(base))
        for f in self.functionals:
            touched.update(f.coefficients.support)
        return tuple(sorted(touched))

    def label(self) -> str:
        return "max-biortho"


@dataclass(frozen=True)
class _MaxBiorthoEncoder:
    inner: NormEncoder
    epsilon: Scalar
    functionals: tuple[Functional, ...]

    def epigraph(self, model: LpModel, coords: dict[int, LinExpr], t: LinExpr) -> None:
        # base(y)/(1+eps) <= t
        self.inner.epigraph(model, coords, t.scale(1 + self.epsilon))
        exprs = [_functional_expr(f, coords) for f in self.functionals]
        for a in range(len(exprs)):
            for b in range(a + 1, len(exprs)):
                for sa in (1, -1):
                    for sb in (1, -1):
                        model.add_le(exprs[a].scale(sa) + exprs[b].scale(sb), t)


def max_biortho_norm(spec: MaxBiortho, y: SparseVec, *,
                     exact: bool | None = None, cap: int | None = None) -> Scalar:
    return spec.norm_of(spec.base, y, exact=exact, cap=cap)


def premise_check(spec: MaxBiortho, samples: int = 1000, seed: int = 0,
                  dim: int | None = None, denominator: int = 64) -> tuple[bool, Scalar]:
    """Sampled check of sup_{i != j}(|f_i(y)| + |f_j(y)|) <= (1+eps) base(y).

    Samples rational vectors, so the comparison is exact when the base
    norm is.  Returns (all passed, worst pair-sum / base ratio seen).
    """
    touched = spec.touched_support(spec.base)
    d = dim or (max(touched) if touched else 4)
    rng = np.random.default_rng([seed])
    worst: Scalar = 0
    ok = True
    for _ in range(samples):
        nums = rng.integers(-denominator, denominator + 1, size=d)
        y = SparseVec({i + 1: Fraction(int(n), denominator)
                       for i, n in enumerate(nums)})
        if y.is_zero:
            continue
        base_val = vecspace.norm(spec.base, y)
        vals = sorted((abs(pair(f, y)) for f in spec.functionals), reverse=True)
        top = vals[0] + vals[1]
        ratio = top / base_val
        if ratio > worst:
            worst = ratio
        if top > (1 + spec.epsilon) * base_val:
            ok = False
    return ok, worst


# -- infimal-convolution extension (subspace norm to ambient space) ---------


@dataclass(frozen=True)
class ICExtension:
    """|||x||| = inf { inner(y) + b * base(x - y) : y in the subspace span }."""

    base: object
    subspace_basis: tuple[SparseVec, ...]
    inner: object
    b: Scalar = 1
    support_budget: int = 0

    def __post_init__(self):
        if not self.subspace_basis:
            raise ParameterError("extension requires a nonempty subspace basis")
        if not self.b >= 1:
            raise ParameterError(f"extension constant b must be >= 1, got {self.b}")
        check_independent(self.subspace_basis)
        budget = self.support_budget or len(self.subspace_basis)
        if not 1 <= budget <= len(self.subspace_basis):
            raise BudgetError(
                f"support budget {budget} outside 1..{len(self.subspace_basis)}")
        object.__setattr__(self, "support_budget", budget)

    def _inner_space(self):
        return self.inner if not hasattr(self.inner, "norm_of") \
            else vecspace.Renormed(self.inner.base, self.inner)

    def norm_of(self, base, x: SparseVec, exact: bool | None = None,
                cap: int | None = None) -> Scalar:
        return ic_extension_norm(self, x, exact=exact).value

    def unconditional_over(self, base) -> bool:
        return (vecspace.is_unconditional(base)
                and vecspace.is_unconditional(self._inner_space())
                and all(len(v.support) == 1 for v in self.subspace_basis))

    def certified_over(self, base) -> bool:
        return self.encoder_over(base, self.touched_support(base) or (1,)) is not None

    def exact_over(self, base) -> bool:
        return (vecspace.supports_exact(base)
                and vecspace.supports_exact(self._inner_space())
                and _is_rational_scalar(self.b)
                and all(v.is_rational for v in self.subspace_basis))

    def encoder_over(self, base, support: tuple[int, ...]) -> NormEncoder | None:
        cols = self.subspace_basis[:self.support_budget]
        span_support = set().union(*(set(v.support) for v in cols))
        full = tuple(sorted(set(support) | span_support))
        enc_base = vecspace.encoder(base, full)
        enc_inner = vecspace.encoder(self._inner_space(), full)
        if enc_base is None or enc_inner is None:
            return None
        return _InfConvEncoder(cols, enc_inner, enc_base, self.b,
                               coeff_space=False)

    def touched_support(self, base) -> tuple[int, ...]:
        touched = set(vecspace.ambient_support(base))
        touched.update(vecspace.ambient_support(self._inner_space()))
        for v in self.subspace_basis:
            touched.update(v.support)
        return tuple(sorted(touched))

    def label(self) -> str:
        return "ic-extension"


@dataclass(frozen=True)
class _InfConvEncoder:
    """Existential epigraph: exists y with term1(y) + term2(residual) <= t.

    coeff_space selects whether term1 applies to the coefficient vector
    (JamesIC's l1 over x) or to the assembled span element (ICExtension's
    inner norm over y).
    """

    cols: tuple[SparseVec, ...]
    enc1: NormEncoder
    enc2: NormEncoder
    b: Scalar
    coeff_space: bool

    def epigraph(self, model: LpModel, coords: dict[int, LinExpr], t: LinExpr) -> None:
        cvars = {j: LinExpr.variable(model.new_var())
                 for j in range(1, len(self.cols) + 1)}
        t1 = LinExpr.variable(model.new_var(nonneg=True))
        t2 = LinExpr.variable(model.new_var(nonneg=True))
        span_support = sorted(set().union(*(set(v.support) for v in self.cols)))
        assembled: dict[int, LinExpr] = {}
        for i in sorted(set(coords) | set(span_support)):
            expr = LinExpr()
            for j, img in enumerate(self.cols, start=1):
                c = img.get(i)
                if c != 0:
                    expr = expr + cvars[j].scale(c)
            assembled[i] = expr
        if self.coeff_space:
            self.enc1.epigraph(model, cvars, t1)
        else:
            self.enc1.epigraph(model, assembled, t1)
        residual = {}
        for i in assembled:
            xi = coords.get(i, LinExpr())
            residual[i] = xi - assembled[i]
        for i in coords:
            if i not in residual:
                residual[i] = coords[i]
        inv_b = Fraction(1, 1) / Fraction(self.b) if _is_rational_scalar(self.b) \
            else 1.0 / self.b
        self.enc2.epigraph(model, residual, t2.scale(inv_b))
        model.add_le(t1 + t2, t)


def ic_extension_norm(spec: ICExtension, x: SparseVec, *,
                      exact: bool | None = None,
                      budget: OptBudget | None = None) -> OptResult:
    """Extension norm value with the witnessing subspace element."""
    cols = spec.subspace_basis[:spec.support_budget]
    support = tuple(sorted(set(x.support) | set(spec.touched_support(spec.base))))
    enc = spec.encoder_over(spec.base, support)
    if enc is not None:
        use_exact = bool(exact) if exact is not None else (
            spec.exact_over(spec.base) and x.is_rational)
        model = LpModel()
        coords = {i: LinExpr.constant(x.get(i)) for i in support}
        t = LinExpr.variable(model.new_var(nonneg=True))
        enc.epigraph(model, coords, t)
        sol = model.solve(t, maximize=False, exact=use_exact)
        return OptResult(sol.value, None, certified=True)
    return _ic_extension_descent(spec, cols, x, budget)


def _ic_extension_descent(spec: ICExtension, cols, x: SparseVec,
                          budget: OptBudget | None) -> OptResult:
    inner_space = spec._inner_space()
    budget = budget or OptBudget(restarts=16, max_iters=300)
    m = len(cols)
    bval = float(spec.b)

    def objective(c: np.ndarray) -> float:
        yv = lincomb(c.tolist(), cols)
        r = x - yv
        return (float(vecspace.norm(inner_space, yv, exact=False))
                + bval * float(vecspace.norm(spec.base, r, exact=False)))

    # convex in c, so Powell from a handful of starts is reliable
    starts = [np.zeros(m)]
    scale = float(vecspace.norm(spec.base, x, exact=False)) or 1.0
    for r in range(budget.restarts):
        rng = np.random.default_rng([budget.seed, r])
        starts.append(rng.standard_normal(m) * scale * 0.5)
    best_c, best_v = starts[0], objective(starts[0])
    for c0 in starts:
        res = _scipy_minimize(objective, c0, method="Powell",
                              options={"maxiter": budget.max_iters,
                                       "xtol": budget.tol, "ftol": budget.tol})
        if math.isfinite(res.fun) and res.fun < best_v:
            best_v, best_c = float(res.fun), np.asarray(res.x, dtype=float)
    witness = lincomb(best_c.tolist(), cols)
    return OptResult(best_v, witness, certified=False)


# -- James infimal-convolution norm -----------------------------------------


@dataclass(frozen=True)
class JamesIC:
    """|y|_Y = inf { ||x||_1 + base(y - Tx) } for T e_j = blocks[j]."""

    base: object
    blocks: tuple[SparseVec, ...]
    support_budget: int = 0

    def __post_init__(self):
        if not self.blocks:
            raise ParameterError("embedding requires a nonempty block list")
        for j, blk in enumerate(self.blocks, start=1):
            if blk.is_zero:
                raise ParameterError(f"block {j} is zero; the embedding is not injective")
        check_independent(self.blocks)
        budget = self.support_budget or len(self.blocks)
        if not 1 <= budget <= len(self.blocks):
            raise BudgetError(
                f"support budget {budget} outside 1..{len(self.blocks)}")
        object.__setattr__(self, "support_budget", budget)

    def image(self, coeffs: Sequence[Scalar]) -> SparseVec:
        """T applied to a coefficient vector."""
        if len(coeffs) > len(self.blocks):
            raise BudgetError(
                f"{len(coeffs)} coefficients but only {len(self.blocks)} blocks")
        return lincomb(coeffs, self.blocks[:len(coeffs)])

    def norm_of(self, base, y: SparseVec, exact: bool | None = None,
                cap: int | None = None) -> Scalar:
        return james_ic_norm(self, y, exact=exact).value

    def unconditional_over(self, base) -> bool:
        return vecspace.is_unconditional(base) and all(
            len(blk.support) == 1 for blk in self.blocks)

    def certified_over(self, base) -> bool:
        return self.encoder_over(base, self.touched_support(base) or (1,)) is not None

    def exact_over(self, base) -> bool:
        return vecspace.supports_exact(base) and all(
            blk.is_rational for blk in self.blocks)

    def encoder_over(self, base, support: tuple[int, ...]) -> NormEncoder | None:
        from .lp import WeightedL1Encoder
        cols = self.blocks[:self.support_budget]
        span_support = set().union(*(set(v.support) for v in cols))
        full = tuple(sorted(set(support) | span_support))
        enc_base = vecspace.encoder(base, full)
        if enc_base is None:
            return None
        return _InfConvEncoder(cols, WeightedL1Encoder(), enc_base, 1,
                               coeff_space=True)

    def touched_support(self, base) -> tuple[int, ...]:
        touched = set(vecspace.ambient_support(base))
        for blk in self.blocks:
            touched.update(blk.support)
        return tuple(sorted(touched))

    def label(self) -> str:
        return "james-ic"


def james_ic_norm(spec: JamesIC, y: SparseVec, *,
                  exact: bool | None = None,
                  budget: OptBudget | None = None) -> OptResult:
    """Infimal-convolution norm |y|_Y; exact LP when the base is polyhedral."""
    return infimal_convolution(
        vecspace.Lp(1), list(spec.blocks), spec.base, y,
        support_budget=spec.support_budget, budget=budget, exact=exact)


# -- strictly convex quadratic renorm ----------------------------------------


@dataclass(frozen=True)
class StrictConvex:
    """|||x|||^2 = base(x)^2 + delta * sum_n 2^{-n} f_n(x)^2.

    Requires 0 < delta < sqrt(1+epsilon) - 1 (open interval) and every
    functional inside the dual unit ball of the base, which pins the
    sandwich base <= ||| . ||| <= sqrt(1+delta) * base.
    """

    base: object
    epsilon: Scalar
    delta: Scalar
    functionals: tuple[Functional, ...]

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ParameterError(f"epsilon must be positive, got {self.epsilon}")
        bound = math.sqrt(1 + float(self.epsilon)) - 1
        if not 0 < float(self.delta) < bound:
            raise ParameterError(
                f"delta must lie in the open interval (0, sqrt(1+eps)-1) = "
                f"(0, {bound:.6g}), got {self.delta}")
        if not self.functionals:
            raise ParameterError("strictly convex renorm needs at least one functional")
        for n, f in enumerate(self.functionals, start=1):
            dn = vecspace.dual_norm(self.base, f)
            if float(dn) > 1 + 1e-9:
                raise PremiseError(
                    f"functional {n} has dual norm {float(dn):.12g} > 1; "
                    f"all f_n must lie in the dual unit ball")

    def norm_of(self, base, x: SparseVec, exact: bool | None = None,
                cap: int | None = None) -> float:
        if x.is_zero:
            return 0.0
        base_val = float(vecspace.norm(base, x, exact=exact, cap=cap))
        acc = base_val * base_val
        d = float(self.delta)
        for n, f in enumerate(self.functionals, start=1):
            fx = float(pair(f, x))
            acc += d * (2.0 ** -n) * fx * fx
        return math.sqrt(acc)

    def unconditional_over(self, base) -> bool:
        return vecspace.is_unconditional(base) and all(
            len(f.coefficients.support) <= 1 for f in self.functionals)

    def certified_over(self, base) -> bool:
        return vecspace.is_certified_path(base)

    def exact_over(self, base) -> bool:
        return False  # the square root leaves the rationals

    def encoder_over(self, base, support: tuple[int, ...]) -> NormEncoder | None:
        return None  # quadratic, not polyhedral

    def touched_support(self, base) -> tuple[int, ...]:
        touched = set(vecspace.ambient_support(base))
        for f in self.functionals:
            touched.update(f.coefficients.support)
        return tuple(sorted(touched))

    def label(self) -> str:
        return "strict-convex"


def strictly_convex_norm(spec: StrictConvex, x: SparseVec) -> float:
    return spec.norm_of(spec.base, x)


def strict_convex_family(base, dim: int, seed: int = 0,
                         extras: int = 32) -> tuple[Functional, ...]:
    """Norming family: +/- coordinate functionals on 1..dim, normalized to
    the dual sphere, plus seeded random dual-sphere functionals."""
    if dim < 1:
        raise ParameterError("dimension must be at least 1")
    fam: list[Functional] = []
    for i in range(1, dim + 1):
        f = Functional.basis(i)
        dn = vecspace.dual_norm(base, f)
        fam.append(f.scale(1 / dn))
        fam.append(f.scale(-1 / dn))
    rng = np.random.default_rng([seed])
    for _ in range(extras):
        coords = rng.standard_normal(dim)
        f = Functional(SparseVec({i + 1: float(c) for i, c in enumerate(coords)
                                  if c != 0.0}))
        dn = float(vecspace.dual_norm(base, f))
        if dn > 0:
            fam.append(f.scale(1.0 / dn))
    return tuple(fam)


RenormSpec = DiagonalScale | MaxBiortho | ICExtension | JamesIC | StrictConvex


# -- equivalence estimation and block search ---------------------------------


def equivalence_constants(space_a, space_b, samples: int = 100, seed: int = 0,
                          dim: int = 8) -> tuple[float, float]:
    """Sampled (min, max) of norm_b / norm_a over random nonzero vectors.

    An inner estimate of the true equivalence interval: the reported range
    is always contained in it.
    """
    if samples < 1:
        raise ParameterError("need at least one sample")
    rng = np.random.default_rng([seed])
    lo, hi = math.inf, 0.0
    for _ in range(samples):
        coords = rng.standard_normal(dim)
        v = SparseVec({i + 1: float(c) for i, c in enumerate(coords) if c != 0.0})
        if v.is_zero:
            continue
        na = float(vecspace.norm(space_a, v, exact=False))
        nb = float(vecspace.norm(space_b, v, exact=False))
        ratio = nb / na
        lo = min(lo, ratio)
        hi = max(hi, ratio)
    return lo, hi


def james_block_search(space, candidate_basis: Sequence[SparseVec],
                       epsilon: float, budget: OptBudget | None = None) -> list[SparseVec]:
    """Heuristic block extraction toward a (1+eps)-isometric l1 copy.

    Scores a block family by the minimum over sign patterns of
    norm(sum sigma_k u_k) / k (a necessary witness for the lower l1
    constant); while the score is below 1/(1+eps), merges consecutive
    block pairs with the signs of the worst pattern, halving the family.
    """
    if not candidate_basis:
        raise ParameterError("empty candidate basis")
    if not epsilon > 0:
        raise ParameterError("epsilon must be positive")
    budget = budget or OptBudget()
    target = 1.0 / (1.0 + epsilon)

    def normalize(v: SparseVec) -> SparseVec:
        nv = float(vecspace.norm(space, v, exact=False))
        if nv == 0:
            raise RankError("zero block produced during merging")
        return v.scale(1.0 / nv)

    def score(blocks: list[SparseVec]) -> tuple[float, tuple[int, ...]]:
        k = len(blocks)
        patterns: list[tuple[int, ...]]
        if k <= 12:
            # global sign symmetry: the last block's sign can be fixed
            patterns = [tuple(1 if (m >> j) & 1 else -1 for j in range(k))
                        for m in range(2 ** (k - 1))]
        else:
            rng = np.random.default_rng([budget.seed, k])
            patterns = [tuple(int(s) for s in rng.choice((-1, 1), size=k))
                        for _ in range(4096)]
        worst, worst_pat = math.inf, patterns[0]
        for pat in patterns:
            v = lincomb([float(s) for s in pat], blocks)
            val = float(vecspace.norm(space, v, exact=False)) / k
            if val < worst:
                worst, worst_pat = val, pat
        return worst, worst_pat

    blocks = [normalize(v) for v in candidate_basis]
    best_blocks, best_score = list(blocks), score(blocks)[0]
    for _ in range(budget.max_iters):
        sc, pat = score(blocks)
        if sc > best_score:
            best_score, best_blocks = sc, list(blocks)
        if sc >= target:
            return blocks
        if len(blocks) < 2:
            break
        merged: list[SparseVec] = []
        it = iter(range(0, len(blocks) - 1, 2))
        for a in it:
            merged.append(normalize(
                blocks[a].scale(pat[a]) + blocks[a + 1].scale(pat[a + 1])))
        if len(blocks) % 2 == 1:
            merged.append(blocks[-1])
        blocks = merged
    err = BudgetError(
        f"block search exhausted its budget at constant {best_score:.6g} "
        f"< target {target:.6g}")
    err.best_constant = best_score
    err.best_blocks = best_blocks
    raise err
