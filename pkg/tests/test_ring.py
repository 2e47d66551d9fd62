from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from weilkit.ring import (
    BadRational, Poly, QMatrix, TruncSeries, kernel_basis, parse_rational, rank,
    render_rational, sparse_kernel, sparse_rank, taylor_coeffs,
)

F = Fraction
rationals = st.builds(Fraction, st.integers(-20, 20), st.integers(1, 12))
VARS = ("x", "y", "z")


@st.composite
def polys(draw, max_terms=4):
    terms = draw(st.dictionaries(
        st.tuples(*[st.integers(0, 2)] * 3), rationals, max_size=max_terms))
    return Poly(VARS, terms)


@st.composite
def series(draw, order=5):
    return TruncSeries(draw(st.lists(rationals, min_size=order + 1, max_size=order + 1)), order)


@st.composite
def matrices(draw):
    r = draw(st.integers(1, 4))
    c = draw(st.integers(1, 5))
    rows = draw(st.lists(st.lists(st.integers(-3, 3), min_size=c, max_size=c), min_size=r, max_size=r))
    return QMatrix([[F(x) for x in row] for row in rows], c)


def test_rational_round_trip():
    assert parse_rational("3/6") == F(1, 2)
    assert render_rational(F(1, 2)) == "1/2"
    assert render_rational(F(-4, 2)) == "-2"
    assert parse_rational(" -7 ") == -7


@pytest.mark.parametrize("bad", ["1/0", "1/-2", "a", "1.5", ""])
def test_bad_rationals(bad):
    with pytest.raises(BadRational):
        parse_rational(bad)


@given(rationals)
def test_render_parse_inverse(q):
    assert parse_rational(render_rational(q)) == q


@given(polys(), polys(), polys())
def test_poly_ring_axioms(p, q, r):
    assert (p * q) * r == p * (q * r)
    assert p * (q + r) == p * q + p * r
    assert p * q == q * p
    assert p - p == Poly(VARS)


def test_poly_no_zero_coefficients():
    x = Poly.var(VARS, 0)
    p = (x + 1) * (x - 1) - x * x + 1
    assert p.terms == {}
    assert repr(Poly.var(VARS, 0) - Poly.var(VARS, 1)) == "x - y"


@given(series(), series(), series())
def test_series_ring_axioms(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a


def test_taylor_examples():
    assert taylor_coeffs("f_dyn", 3).coeffs == (0, F(-1, 12), 0, F(1, 720))
    assert taylor_coeffs("log_g", 3).coeffs == (0, F(-1, 2), F(1, 24), 0)
    assert taylor_coeffs("exp", 2).coeffs == (1, 1, F(1, 2))
    with pytest.raises(ValueError):
        taylor_coeffs("tan", 3)


def test_f_dyn_matches_bernoulli_oracle():
    # (s/2) coth(s/2) = sum B_2k s^2k / (2k)!, so f(s) = -sum_{k>=1} B_2k s^(2k-1) / (2k)!
    N = 15
    oracle = [F(0)] * (N + 1)
    for k in range(1, (N + 1) // 2 + 1):
        if 2 * k - 1 <= N:
            b = sympy.bernoulli(2 * k)
            oracle[2 * k - 1] = -F(int(b.p), int(b.q)) / sympy.factorial(2 * k)
    assert list(taylor_coeffs("f_dyn", N).coeffs) == oracle


@pytest.mark.parametrize("name,expr", [
    ("log_g", "log((1 - exp(-s))/s)"),
    ("ratio_sinh", "sinh(s/2)/(s/2)"),
    ("cosh", "cosh(s)"),
    ("g", "(1 - exp(-s))/s"),
])
def test_series_match_sympy(name, expr):
    s = sympy.Symbol("s")
    N = 10
    ser = sympy.series(sympy.sympify(expr), s, 0, N + 1).removeO()
    oracle = [sympy.Rational(ser.coeff(s, k)) for k in range(N + 1)]
    got = taylor_coeffs(name, N).coeffs
    assert [F(int(c.p), int(c.q)) for c in oracle] == list(got)


def test_f_dyn_is_odd():
    assert all(c == 0 for c in taylor_coeffs("f_dyn", 20).coeffs[0::2])


def test_exp_of_log_g_is_g():
    N = 12
    assert taylor_coeffs("log_g", N).exp() == taylor_coeffs("g", N)


@given(series())
def test_exp_log_inverse(a):
    a = TruncSeries([0] + list(a.coeffs[1:]), a.order)
    assert a.exp().log() == a


def test_truncation_order_is_recorded():
    a = TruncSeries([1, 1], 3)
    b = TruncSeries([1, 1], 5)
    assert (a * b).order == 3


def test_kernel_examples():
    assert kernel_basis(QMatrix([[1, 0], [0, 1]])) == []
    assert len(kernel_basis(QMatrix([[0, 0]]))) == 2
    (v,) = kernel_basis(QMatrix([[1, 2], [2, 4]]))
    assert v[0] * -1 == v[1] * 2
    assert rank(QMatrix.identity(3)) == 3
    assert rank(QMatrix.zeros(2, 5)) == 0
    assert rank(QMatrix([[1, 2], [2, 4]])) == 1


@given(matrices())
def test_rank_nullity(M):
    K = kernel_basis(M)
    assert rank(M) + len(K) == M.cols
    for v in K:
        assert all(sum(M[i, j] * v[j] for j in range(M.cols)) == 0 for i in range(M.rows))


@given(matrices())
def test_kernel_is_deterministic(M):
    assert kernel_basis(M) == kernel_basis(QMatrix([list(r) for r in M.entries]))


@given(matrices())
def test_sparse_agrees_with_dense(M):
    cols = [{i: M[i, j] for i in range(M.rows) if M[i, j]} for j in range(M.cols)]
    assert sparse_rank(cols) == rank(M)
    K = sparse_kernel(cols)
    assert len(K) == M.cols - rank(M)
    for combo in K:
        assert all(sum(M[i, j] * combo.get(j, 0) for j in range(M.cols)) == 0 for i in range(M.rows))
