import itertools
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from weilkit.duflo import (
    DufloContext, NotInvariant, TruncationTooLow, casimir, cdyb_check, cdyb_residuals,
    chain_check, dlogj_check, duflo_map, duflo_ring_check, is_invariant, q_triangular_check,
    quantize,
)
from weilkit.liedata import catalog, mu_vars, structure_series
from weilkit.multivec import ENV, NCW, SYM, W, GradedElement, basis_keys, contract, lie_deriv
from weilkit.pbw import gr, sym_map, u
from weilkit.ring import Poly

F = Fraction
SU2 = catalog("su2")


@pytest.fixture(scope="module")
def ctx6():
    return DufloContext.build(SU2, 6)


def v(i, alg=SU2, tag=SYM):
    return GradedElement.even_gen(tag, alg, i)


def y(*idx, alg=SU2, tag=W):
    return GradedElement.monomial(tag, alg, None, sum(1 << (i - 1) for i in idx))


def test_duflo_examples(ctx6):
    assert duflo_map(ctx6, GradedElement.one(SYM, SU2)) == 1
    assert duflo_map(ctx6, v(0)) == u(SU2, 0)
    lam = casimir(SU2, SYM)
    assert duflo_map(ctx6, lam) == casimir(SU2, ENV) - F(1, 4)


def _oracle_duflo(p, max_deg):
    """Duflo map of an su2 polynomial by explicit calculus with J^1/2 = sin(r/2)/(r/2).

    A polynomial q(v) pairs with a test function phi(mu) as q(d/dmu) phi at 0.
    Multiplying the distribution p by J^1/2 gives the functional
    phi -> p(d/dmu)(J^1/2 phi)(0); reading it off on monomials recovers q.
    """
    m = sympy.symbols("m1:4")
    r2 = sum(x**2 for x in m)
    z = sympy.Symbol("z")
    series = sympy.series(sympy.sin(sympy.sqrt(z) / 2) / (sympy.sqrt(z) / 2), z, 0, max_deg // 2 + 2).removeO()
    jhalf = sympy.expand(series.subs(z, r2))

    def apply(poly_terms, phi):
        # q(d/dmu) F at 0 = sum_alpha q_alpha alpha! [mu^alpha] F
        P = sympy.Poly(phi, *m)
        total = 0
        for (sym, _), c in poly_terms:
            mono = sympy.prod([x**k for x, k in zip(m, sym)])
            weight = sympy.prod([sympy.factorial(k) for k in sym])
            total += sympy.Rational(c.numerator, c.denominator) * weight * P.coeff_monomial(mono)
        return total

    q = {}
    for deg in range(max_deg + 1):
        for beta in itertools.product(range(deg + 1), repeat=3):
            if sum(beta) != deg:
                continue
            phi = sympy.prod([x**k for x, k in zip(m, beta)])
            val = apply(p.terms.items(), sympy.expand(jhalf * phi))
            if val:
                norm = sympy.prod([sympy.factorial(k) for k in beta])
                c = sympy.Rational(val) / norm
                q[(beta, 0)] = F(int(c.p), int(c.q))
    return sym_map(GradedElement(SYM, SU2, q))


def test_duflo_matches_calculus_oracle(ctx6):
    lam = casimir(SU2, SYM)
    for p in (lam, lam * lam, v(0) * v(0), v(0) * v(1) * lam, lam * lam * lam):
        assert duflo_map(ctx6, p) == _oracle_duflo(p, p.degree() // 2)


def test_duflo_constant_is_shifted_dirac_square(ctx6):
    # 2 D^2 = u.u + 2 gamma^2 = u.u - 1/4
    from weilkit.weil import dirac
    D = dirac(SU2)
    two_d2 = (D * D).scale(2)
    assert duflo_map(ctx6, casimir(SU2)).retag(NCW) == two_d2


@given(st.lists(st.integers(0, 2), min_size=3, max_size=3))
def test_duflo_filtration(alpha):
    ctx = DufloContext.build(SU2, 6)
    p = GradedElement.monomial(SYM, SU2, tuple(alpha))
    out = duflo_map(ctx, p)
    assert gr(out) == p


def test_truncation_guard():
    ctx = DufloContext.build(SU2, 2)
    with pytest.raises(TruncationTooLow):
        duflo_map(ctx, casimir(SU2) ** 2)
    with pytest.raises(TruncationTooLow):
        chain_check(ctx, 6)
    with pytest.raises(TypeError):
        duflo_map(ctx, GradedElement.one(ENV, SU2))


def test_quantize_examples(ctx6):
    assert quantize(ctx6, y(1)) == GradedElement.odd_gen(NCW, SU2, 0)
    assert quantize(ctx6, GradedElement.one(W, SU2)) == 1
    w = v(0, tag=W) - y(2, 3)
    x1 = GradedElement.odd_gen(NCW, SU2, 0)
    q = quantize(ctx6, w)
    assert q == GradedElement.even_gen(NCW, SU2, 0) - GradedElement.monomial(NCW, SU2, None, 0b110)
    from weilkit.weil import nc_weil_d
    assert q == nc_weil_d(x1)


def test_quantize_restrictions(ctx6):
    lam = casimir(SU2, SYM)
    assert quantize(ctx6, lam.retag(W)) == duflo_map(ctx6, lam).retag(NCW)
    for k in basis_keys("EXT", SU2, 3):
        e = GradedElement("W", SU2, {k: F(1)})
        assert quantize(ctx6, e) == e.retag(NCW)


@pytest.mark.parametrize("name,order,deg", [("su2", 6, 6), ("so4", 4, 4), ("abelian(2)", 6, 6)])
def test_chain_map(name, order, deg):
    ctx = DufloContext.build(catalog(name), order)
    assert chain_check(ctx, deg)
    assert q_triangular_check(ctx, deg)


def test_flipped_T_breaks_chain_map(ctx6):
    assert not chain_check(ctx6.with_flipped_T(), 4)
    assert not cdyb_check(SU2, 6, -ctx6.T)


@pytest.mark.parametrize("name,order", [("su2", 6), ("so4", 4), ("so5", 4), ("abelian(3)", 4)])
def test_cdyb(name, order):
    assert cdyb_check(catalog(name), order)


def test_cdyb_leading_term():
    # order 2: only the derivative of the linear part of T survives
    T = structure_series(SU2, 2).T
    vs = mu_vars(3)
    cyc = T[1, 2].diff(0) + T[2, 0].diff(1) + T[0, 1].diff(2)
    assert cyc == Poly.const(vs, F(1, 4))
    assert cdyb_residuals(SU2, 2) == {}


def test_dlogj_as_printed_fails():
    v_ = dlogj_check(SU2, 6)
    assert not v_
    assert v_.residual.startswith("-1/3·mu1")


@pytest.mark.parametrize("name,order", [("su2", 6), ("so4", 4), ("so5", 4), ("abelian(2)", 4)])
def test_dlogj_with_opposite_sign(name, order):
    assert dlogj_check(catalog(name), order, sign=-1)


def test_dlogj_leading_terms():
    # d lnJ/d mu_1 = -mu_1/6 while f_1bc T_bc = +mu_1/6
    b = structure_series(SU2, 2)
    vs = mu_vars(3)
    mu1 = Poly.var(vs, 0)
    assert b.logJ.diff(0) == mu1 * F(-1, 6)
    assert sum((b.T[bb, c] * f for bb, c, f in SU2.bracket(0)), Poly(vs)) == mu1 * F(1, 6)


def test_ring_property(ctx6):
    lam = casimir(SU2, SYM)
    assert duflo_ring_check(ctx6, lam, lam)
    assert duflo_ring_check(ctx6, lam * lam, lam)
    assert duflo_ring_check(ctx6, GradedElement.one(SYM, SU2), lam)
    with pytest.raises(NotInvariant):
        duflo_ring_check(ctx6, v(0), v(1))


def test_duflo_not_multiplicative_off_invariants(ctx6):
    p = v(0)
    assert duflo_map(ctx6, p * p) == u(SU2, 0) ** 2 - F(1, 12)
    assert duflo_map(ctx6, p * p) != duflo_map(ctx6, p) * duflo_map(ctx6, p)


def test_invariance_helpers():
    assert is_invariant(casimir(SU2))
    assert not is_invariant(v(0))
    for a in range(3):
        assert not lie_deriv(a, casimir(SU2, ENV))


@given(st.lists(st.integers(0, 2), min_size=3, max_size=3), st.integers(0, 7))
def test_quantize_commutes_with_contraction(alpha, bits):
    ctx = DufloContext.build(SU2, 4)
    e = GradedElement.monomial(W, SU2, tuple(alpha), bits)
    if sum(alpha) > 4:
        return
    q = quantize(ctx, e)
    for a in range(3):
        assert quantize(ctx, contract(a, e)) == contract(a, q)
