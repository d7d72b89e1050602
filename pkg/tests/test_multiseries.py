import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from asympint.multiseries import (TruncatedSeries as TS, compose, compose_map,
                                  invert_map, max_abs_diff, reciprocal,
                                  sqrt_series)


def S(dim, order, coeffs):
    return TS(dim, order, coeffs)


# ---------- constructors and accessors ----------

def test_absent_key_is_zero():
    f = S(2, 3, {(1, 0): 2.0})
    assert f.coefficient((0, 1)) == 0
    assert f.coefficient((1, 0)) == 2.0


def test_key_validation():
    with pytest.raises(ValueError):
        S(2, 2, {(1, 1, 1): 1.0})
    with pytest.raises(ValueError):
        S(2, 2, {(2, 1): 1.0})
    with pytest.raises(ValueError):
        S(1, 2, {(-1,): 1.0})


# ---------- add ----------

def test_add_cancellation():
    x = TS.variable(1, 2, 0)
    f = (1 + x) + (2 - x)
    assert sorted(f.items()) == [((0,), 3 + 0j)]


def test_add_identity():
    f = S(2, 3, {(1, 2): 1j, (0, 0): 2.0})
    assert max_abs_diff(f + TS.zero(2, 3), f) == 0


def test_add_disjoint_supports():
    f = S(2, 2, {(2, 0): 1.0}) + S(2, 2, {(0, 2): 1j})
    assert f.coefficient((2, 0)) == 1.0
    assert f.coefficient((0, 2)) == 1j


def test_add_dimension_mismatch():
    with pytest.raises(ValueError):
        S(1, 2, {}) + S(2, 2, {})


def test_order_is_min_of_operands():
    a = S(1, 5, {(5,): 1.0})
    b = S(1, 3, {(1,): 1.0})
    assert (a + b).order == 3
    assert (a + b).coefficient((5,)) == 0
    assert (a * b).order == 3


# ---------- mul ----------

def test_mul_difference_of_squares():
    x = TS.variable(1, 2, 0)
    f = (1 + x) * (1 - x * 1.0)
    assert sorted(f.items()) == [((0,), 1 + 0j), ((2,), -1 + 0j)]


def test_mul_truncates_away():
    x = TS.variable(1, 1, 0)
    assert len(x * x) == 0


def test_mul_complex_square():
    # (1+ix)^2 = 1 + 2ix - x^2
    x = TS.variable(1, 2, 0)
    f = (1 + x.scale(1j)) * (1 + x.scale(1j))
    assert f.coefficient((0,)) == 1
    assert f.coefficient((1,)) == 2j
    assert f.coefficient((2,)) == -1


def test_mul_packed_path_matches_dict_path():
    rng = np.random.default_rng(7)
    d, N = 3, 8
    keys = [k for k in _all_keys(d, N)]
    a = TS(d, N, {k: complex(*rng.standard_normal(2)) for k in keys})
    b = TS(d, N, {k: complex(*rng.standard_normal(2)) for k in keys})
    via_packed = a._mul_packed(b, N)
    via_dict = a._mul_dict(b, N)
    assert max_abs_diff(via_packed, via_dict) < 1e-12 * a.max_abs() * b.max_abs() * len(keys)


def _all_keys(d, N):
    if d == 1:
        return [(e,) for e in range(N + 1)]
    out = []
    for e in range(N + 1):
        for rest in _all_keys(d - 1, N - e):
            out.append((e,) + rest)
    return out


# ---------- compose ----------

def test_compose_square_of_sum():
    x, y = TS.variable(2, 2, 0), TS.variable(2, 2, 1)
    f = compose(S(2, 2, {(2, 0): 1.0}), [x + y, y])
    assert f.coefficient((2, 0)) == 1
    assert f.coefficient((1, 1)) == 2
    assert f.coefficient((0, 2)) == 1


def test_compose_projection_is_identity():
    g = S(1, 4, {(1,): 2.0, (3,): 1j})
    x = TS.variable(1, 4, 0)
    assert max_abs_diff(compose(x, [g]), g) == 0


def test_compose_exp_series_with_x_squared():
    # exp series through N=4 composed with x^2 -> 1 + x^2 + x^4/2
    e = S(1, 4, {(k,): 1.0 / math.factorial(k) for k in range(5)})
    f = compose(e, [S(1, 4, {(2,): 1.0})])
    assert abs(f.coefficient((0,)) - 1) < 1e-15
    assert abs(f.coefficient((2,)) - 1) < 1e-15
    assert abs(f.coefficient((4,)) - 0.5) < 1e-15
    assert f.coefficient((1,)) == 0 and f.coefficient((3,)) == 0


def test_compose_rejects_nonzero_constant():
    x = TS.variable(1, 3, 0)
    with pytest.raises(ValueError):
        compose(x, [1 + x])


# ---------- invert_map ----------

def test_invert_linear():
    x = TS.variable(1, 3, 0)
    g = invert_map([x.scale(2.0)])
    assert max_abs_diff(g[0], x.scale(0.5)) < 1e-15


def test_invert_x_plus_x_squared():
    # Lagrange inversion: x - x^2 + 2x^3
    x = TS.variable(1, 3, 0)
    g = invert_map([x + x * x])[0]
    assert abs(g.coefficient((1,)) - 1) < 1e-12
    assert abs(g.coefficient((2,)) + 1) < 1e-12
    assert abs(g.coefficient((3,)) - 2) < 1e-12


def test_invert_unipotent():
    x, y = TS.variable(2, 2, 0), TS.variable(2, 2, 1)
    g = invert_map([x + y, y])
    assert max_abs_diff(g[0], x - y) < 1e-15
    assert max_abs_diff(g[1], y) < 1e-15


def test_invert_singular_rejected():
    x, y = TS.variable(2, 2, 0), TS.variable(2, 2, 1)
    with pytest.raises(ValueError):
        invert_map([x + y, x + y])


# ---------- sqrt ----------

def test_sqrt_perfect_square():
    x = TS.variable(1, 2, 0)
    f = sqrt_series(1 + 2.0 * x + x * x, 1.0)
    assert max_abs_diff(f, 1 + x) < 1e-14


def test_sqrt_branch_respected():
    f = sqrt_series(TS.constant(1, 2, 4.0), -2.0)
    assert f.constant_term == -2.0


def test_sqrt_binomial_series():
    x = TS.variable(1, 3, 0)
    f = sqrt_series(1 + x, 1.0)
    assert abs(f.coefficient((1,)) - 0.5) < 1e-15
    assert abs(f.coefficient((2,)) + 0.125) < 1e-15
    assert abs(f.coefficient((3,)) - 0.0625) < 1e-15


def test_sqrt_rejects_zero_constant():
    x = TS.variable(1, 2, 0)
    with pytest.raises(ValueError):
        sqrt_series(x)
    with pytest.raises(ValueError):
        sqrt_series(1 + x, 2.0)   # 2^2 != 1


# ---------- diff / eval ----------

def test_diff_examples():
    f = S(2, 3, {(2, 1): 1.0})
    assert sorted(f.diff(0).items()) == [((1, 1), 2 + 0j)]
    assert len(S(2, 3, {(2, 0): 1.0}).diff(1)) == 0
    assert S(1, 3, {(3,): 1j}).diff(0).coefficient((2,)) == 3j


def test_eval_examples():
    f = S(1, 2, {(0,): 1.0, (1,): 1.0, (2,): 1.0})
    assert abs(f.eval([1.0]) - 3) < 1e-15
    assert S(2, 2, {(1, 1): 5.0}).eval([0, 0]) == 0
    g = S(1, 4, {(0,): 2.5, (3,): 1j})
    assert g.eval([0.0]) == 2.5


def test_eval_complex_square():
    # (x+iy)^2 at (1,1) = (1+i)^2 = 2i
    x, y = TS.variable(2, 2, 0), TS.variable(2, 2, 1)
    f = (x + y.scale(1j)) * (x + y.scale(1j))
    assert abs(f.eval([1.0, 1.0]) - 2j) < 1e-14


# ---------- property tests ----------

def _series_strategy(dim, order, integer=True):
    keys = _all_keys(dim, order)
    if integer:
        coeff = st.integers(min_value=-3, max_value=3)
    else:
        coeff = st.floats(-2, 2, allow_nan=False)
    return st.lists(
        st.tuples(st.sampled_from(keys), coeff),
        max_size=8,
    ).map(lambda items: TS(dim, order, {k: complex(v) for k, v in items if v}))


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_ring_axioms_exact_on_integer_series(data):
    dim = data.draw(st.integers(1, 3))
    order = data.draw(st.integers(1, 5))
    strat = _series_strategy(dim, order)
    a, b, c = data.draw(strat), data.draw(strat), data.draw(strat)
    assert max_abs_diff((a + b) + c, a + (b + c)) == 0
    assert max_abs_diff(a * b, b * a) == 0
    assert max_abs_diff(a * (b + c), a * b + a * c) == 0


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_compose_after_invert_is_identity(data):
    dim = data.draw(st.integers(1, 3))
    order = data.draw(st.integers(2, 5))
    rng = np.random.default_rng(data.draw(st.integers(0, 10**6)))
    fs = []
    # diagonally dominant -> always invertible
    L = rng.integers(-2, 3, size=(dim, dim)).astype(float)
    L += np.eye(dim) * 8.0
    for i in range(dim):
        coeffs = {}
        for j in range(dim):
            if L[i, j]:
                coeffs[tuple(1 if a == j else 0 for a in range(dim))] = L[i, j]
        for k in _all_keys(dim, order):
            if 2 <= sum(k):
                v = rng.integers(-2, 3)
                if v:
                    coeffs[k] = float(v)
        fs.append(TS(dim, order, coeffs))
    g = invert_map(fs)
    fg = compose_map(fs, g)
    ident = TS.identity_map(dim, order)
    scale = max(f.max_abs() for f in fs) + 1
    for i in range(dim):
        assert max_abs_diff(fg[i], ident[i]) < 1e-10 * scale**order


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_sqrt_squared_recovers_series(data):
    dim = data.draw(st.integers(1, 2))
    order = data.draw(st.integers(1, 5))
    f = data.draw(_series_strategy(dim, order))
    f = f + TS.constant(dim, order, 4.0 + data.draw(st.integers(0, 2)))
    s = sqrt_series(f)
    assert max_abs_diff(s * s, f) < 1e-10 * max(1.0, f.max_abs()) ** order


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_diff_commutes(data):
    f = data.draw(_series_strategy(3, 5))
    d01 = f.diff(0).diff(1)
    d10 = f.diff(1).diff(0)
    assert max_abs_diff(d01, d10) == 0


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_eval_of_product_is_product_of_evals(data):
    dim = data.draw(st.integers(1, 2))
    half = data.draw(st.integers(1, 2))
    a = data.draw(_series_strategy(dim, half))
    b = data.draw(_series_strategy(dim, half))
    # promote orders so the product is not truncated
    a2 = TS(dim, 2 * half, dict(a.items()))
    b2 = TS(dim, 2 * half, dict(b.items()))
    z = [complex(0.3, 0.1 * j) for j in range(dim)]
    lhs = (a2 * b2).eval(z)
    rhs = a2.eval(z) * b2.eval(z)
    assert abs(lhs - rhs) <= 1e-12 * (1 + abs(rhs))


def test_reciprocal_roundtrip():
    x = TS.variable(1, 6, 0)
    f = 2 + x + x * x * 1j
    r = reciprocal(f)
    assert max_abs_diff((r * f).clean(), TS.constant(1, 6, 1.0)) < 1e-12


def test_clean_drops_noise():
    f = S(1, 2, {(0,): 1.0, (1,): 1e-16})
    assert len(f.clean()) == 1
