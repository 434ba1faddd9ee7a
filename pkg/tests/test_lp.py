"""Exact rational simplex against scipy's float solver, plus the norm encoders."""

from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from scipy.optimize import linprog

from banachlab import Lp, LpInfeasibleError, LpUnboundedError, SparseVec, lp_exact, norm
from banachlab.lp import (
    GeneratorSetEncoder,
    LinExpr,
    LpModel,
    WeightedL1Encoder,
    WeightedLinfEncoder,
)
from banachlab import generators


def _box_lp(rng: np.random.Generator, n: int, m: int):
    """Random bounded-feasible LP: max c.x s.t. A x <= b, -3 <= x_j <= 3."""
    a = rng.integers(-4, 5, size=(m, n))
    b = rng.integers(1, 8, size=m)  # b > 0 keeps x = 0 feasible
    c = rng.integers(-5, 6, size=n)
    return a, b, c


def _solve_both(a, b, c):
    model = LpModel()
    xs = model.new_vars(len(c))
    for row, rhs in zip(a, b):
        expr = LinExpr({x: int(coef) for x, coef in zip(xs, row)})
        model.add_le(expr, int(rhs))
    for x in xs:
        model.add_abs_le(LinExpr.variable(x), LinExpr.constant(3))
    obj = LinExpr({x: int(coef) for x, coef in zip(xs, c)})
    got = model.solve(obj, maximize=True, exact=True)

    res = linprog(-np.asarray(c, dtype=float), A_ub=np.asarray(a, dtype=float),
                  b_ub=np.asarray(b, dtype=float), bounds=[(-3, 3)] * len(c),
                  method="highs")
    assert res.status == 0
    return got, -res.fun


def test_exact_simplex_matches_scipy_on_random_instances():
    rng = np.random.default_rng(101)
    for _ in range(25):
        a, b, c = _box_lp(rng, int(rng.integers(2, 5)), int(rng.integers(2, 6)))
        got, want = _solve_both(a, b, c)
        assert got.exact
        assert isinstance(got.value, (int, Fraction))
        assert float(got.value) == pytest.approx(want, abs=1e-7)


def test_float_and_exact_paths_agree():
    rng = np.random.default_rng(103)
    for _ in range(10):
        a, b, c = _box_lp(rng, 3, 4)
        model = LpModel()
        xs = model.new_vars(3)
        for row, rhs in zip(a, b):
            model.add_le(LinExpr({x: int(k) for x, k in zip(xs, row)}), int(rhs))
        for x in xs:
            model.add_abs_le(LinExpr.variable(x), LinExpr.constant(3))
        obj = LinExpr({x: int(k) for x, k in zip(xs, c)})
        ex = model.solve(obj, maximize=True, exact=True)
        fl = model.solve(obj, maximize=True, exact=False)
        assert float(ex.value) == pytest.approx(float(fl.value), abs=1e-7)


def test_solution_point_is_feasible_and_attains_value():
    model = LpModel()
    x, y = model.new_vars(2)
    model.add_le(LinExpr({x: 1, y: 2}), 4)
    model.add_le(LinExpr({x: 3, y: 1}), 6)
    model.add_abs_le(LinExpr.variable(x), LinExpr.constant(10))
    model.add_abs_le(LinExpr.variable(y), LinExpr.constant(10))
    sol = model.solve(LinExpr({x: 1, y: 1}), maximize=True, exact=True)
    px, py = sol.point.get(x, 0), sol.point.get(y, 0)
    assert px + 2 * py <= 4 and 3 * px + py <= 6
    assert px + py == sol.value == Fraction(14, 5)


def test_equality_rows():
    model = LpModel()
    x, y = model.new_vars(2, nonneg=True)
    model.add_eq(LinExpr({x: 1, y: 1}), 1)
    sol = model.solve(LinExpr({x: 2, y: 1}), maximize=True, exact=True)
    assert sol.value == 2 and sol.point.get(x) == 1


def test_infeasible_and_unbounded_signalled():
    model = LpModel()
    x = model.new_var(nonneg=True)
    model.add_le(LinExpr.variable(x), -1)
    with pytest.raises(LpInfeasibleError):
        model.solve(LinExpr.variable(x), maximize=True, exact=True)

    free = LpModel()
    z = free.new_var(nonneg=True)
    with pytest.raises(LpUnboundedError):
        free.solve(LinExpr.variable(z), maximize=True, exact=True)


def test_lp_exact_wrapper_simple_values():
    model = LpModel()
    x = model.new_var()
    model.add_abs_le(LinExpr.variable(x), LinExpr.constant(1))
    res = lp_exact(LinExpr.variable(x), model, maximize=True)
    assert res.value == 1 and res.certified

    model2 = LpModel()
    xs = model2.new_vars(2)
    for x in xs:
        model2.add_abs_le(LinExpr.variable(x), LinExpr.constant(1))
    res2 = lp_exact(LinExpr({xs[0]: 1, xs[1]: 1}), model2, maximize=True)
    assert res2.value == 2


def test_pairing_over_t_ball_on_support():
    # max <e2* + e3*, x> over the T ball restricted to coordinates {2, 3}
    model = LpModel()
    coords = {i: LinExpr.variable(model.new_var()) for i in (2, 3)}
    enc = GeneratorSetEncoder(tuple(tuple(sorted(g.items())) for g in generators((2, 3))))
    enc.epigraph(model, coords, LinExpr.constant(1))
    res = lp_exact(coords[2] + coords[3], model, maximize=True)
    assert res.value == 2


# ---------------------------------------------------------------------------
# encoders reproduce the norms they claim
# ---------------------------------------------------------------------------

def _encoder_norm(encoder, v: SparseVec) -> Fraction:
    """min t s.t. encoder-epigraph(x = v, t) — must equal the norm of v."""
    model = LpModel()
    t = LinExpr.variable(model.new_var(nonneg=True))
    coords = {i: LinExpr.constant(c) for i, c in v.items()}
    encoder.epigraph(model, coords, t)
    return lp_exact(t, model, maximize=False).value


def test_weighted_l1_encoder():
    v = SparseVec({1: Fraction(-1, 2), 3: 2})
    assert _encoder_norm(WeightedL1Encoder(), v) == norm(Lp(1), v)
    weighted = WeightedL1Encoder(weights=((1, 2), (3, Fraction(1, 2))))
    assert _encoder_norm(weighted, v) == 2


def test_weighted_linf_encoder():
    v = SparseVec({1: Fraction(-1, 2), 3: 2})
    assert _encoder_norm(WeightedLinfEncoder(), v) == 2
    weighted = WeightedLinfEncoder(weights=((3, Fraction(1, 4)),))
    assert _encoder_norm(weighted, v) == Fraction(1, 2)


def test_generator_set_encoder_matches_tsirelson_norm():
    rng = np.random.default_rng(107)
    from banachlab import tsirelson_norm
    from conftest import nonzero_rational_vec
    for _ in range(6):
        v = nonzero_rational_vec(rng, 6, denom=4, lo=-3, hi=3)
        enc = GeneratorSetEncoder(
            tuple(tuple(sorted(g.items())) for g in generators(v.support)))
        assert _encoder_norm(enc, v) == tsirelson_norm(v)
