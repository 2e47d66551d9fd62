import itertools
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from weilkit.cartan import (
    COMM, NC, ExteriorGDA, NCWeilGDA, SphereGDA, TrivialGDA, WeilGDA, b_odot, cartan_d,
    cartan_elem, cartan_invariants, cartan_product, d_squared_check, equivariant_cohomology,
    gda_axiom_suite, graded_invariants, invariants, is_invariant, odot, q_cartan,
    q_cartan_chain_check, sphere_exact_term, sphere_normal, sphere_omega, sphere_suite,
    twisted_d_check, weil_vs_cartan_check,
)
from weilkit.clifford import cl_mul
from weilkit.duflo import DufloContext, NotInvariant, TruncationTooLow, casimir, duflo_map
from weilkit.liedata import catalog
from weilkit.multivec import ENV, EXT, SPH, SYM, GradedElement

F = Fraction
SU2 = catalog("su2")


@pytest.fixture(scope="module")
def ctx():
    return DufloContext.build(SU2, 6)


@pytest.fixture(scope="module")
def sphere3():
    return SphereGDA(SU2, weight=3)


@pytest.fixture(scope="module")
def report(ctx):
    return sphere_suite(ctx)


# ---------------------------------------------------------------------------
# sphere normal form

coef = st.builds(F, st.integers(-3, 3), st.integers(1, 2))
ambient_keys = st.tuples(st.tuples(*[st.integers(0, 2)] * 3), st.integers(0, 7))


def ambient(max_terms=3):
    return st.dictionaries(ambient_keys, coef, max_size=max_terms).map(
        lambda t: GradedElement(SPH, SU2, t))


def sph(terms):
    return GradedElement(SPH, SU2, terms)


NORM2_MINUS_1 = sph({((2, 0, 0), 0): 1, ((0, 2, 0), 0): 1, ((0, 0, 2), 0): 1, ((0, 0, 0), 0): -1})
N_DOT_DN = sph({((1, 0, 0), 1): 1, ((0, 1, 0), 2): 1, ((0, 0, 1), 4): 1})

_s, _t = sympy.symbols("s t")
_den = 1 + _s**2 + _t**2
_N = [2 * _s / _den, 2 * _t / _den, (_s**2 + _t**2 - 1) / _den]
_dN = [(sympy.diff(x, _s), sympy.diff(x, _t)) for x in _N]


def pullback(w):
    """Stereographic pullback: (function, ds/dt components, ds dt component)."""
    parts = [0, [0, 0], 0]
    for (sym, bits), c in w.terms.items():
        f = sympy.Rational(c.numerator, c.denominator) * sympy.prod([x**k for x, k in zip(_N, sym)])
        idx = [i for i in range(3) if bits >> i & 1]
        if not idx:
            parts[0] += f
        elif len(idx) == 1:
            parts[1][0] += f * _dN[idx[0]][0]
            parts[1][1] += f * _dN[idx[0]][1]
        elif len(idx) == 2:
            a, b = idx
            parts[2] += f * (_dN[a][0] * _dN[b][1] - _dN[a][1] * _dN[b][0])
    return [sympy.cancel(parts[0]), [sympy.cancel(x) for x in parts[1]], sympy.cancel(parts[2])]


@given(ambient())
def test_normal_form_matches_stereographic_oracle(w):
    assert pullback(sphere_normal(w)) == pullback(w)


@given(ambient())
def test_normal_form_vanishes_exactly_on_the_ideal(w):
    nf = sphere_normal(w)
    zero = pullback(w) == [0, [0, 0], 0]
    assert (not nf) == zero


@given(ambient())
def test_normal_form_is_idempotent(w):
    nf = sphere_normal(w)
    assert sphere_normal(nf) == nf


@given(ambient(2))
def test_relations_reduce_to_zero(w):
    assert not sphere_normal(NORM2_MINUS_1 * w)
    assert not sphere_normal(N_DOT_DN * w)


def test_counterexample_to_rewriting_is_zero():
    # n3 (n . dn) is irreducible under the two rewrite rules but lies in the ideal
    w = sph({((1, 0, 1), 1): 1, ((0, 1, 1), 2): 1, ((0, 0, 2), 4): 1})
    assert not sphere_normal(w)


@given(ambient(2))
def test_structure_maps_are_well_defined(w):
    S = SphereGDA(SU2)
    nf = sphere_normal(w)
    assert S.d(w) == S.d(nf)
    for a in range(3):
        assert S.iota(a, w) == S.iota(a, nf)
        assert S.lie(a, w) == S.lie(a, nf)


@given(ambient(2), ambient(2), ambient(2))
def test_sphere_product_associative(a, b, c):
    assert (a * b) * c == a * (b * c)


def test_sphere_axioms_small():
    S = SphereGDA(SU2)
    for a in range(3):
        assert not S.lie(a, NORM2_MINUS_1)
        assert not S.d(NORM2_MINUS_1)
        for e in S.basis(2):
            assert not S.iota(a, S.iota(a, e))
    assert not S.graded_basis(3)


def test_sphere_rejects_other_algebras():
    with pytest.raises(ValueError):
        SphereGDA(catalog("so4"))


# ---------------------------------------------------------------------------
# GDA instances

@pytest.mark.parametrize("B,deg,pair", [
    (TrivialGDA(SU2), 3, None),
    (ExteriorGDA(SU2), 3, None),
    (WeilGDA(SU2), 4, 2),
    (NCWeilGDA(SU2), 3, 2),
    (SphereGDA(SU2, weight=3), 2, 1),
])
def test_gda_axioms(B, deg, pair):
    results = gda_axiom_suite(B, deg, pair)
    assert all(results), [r.record() for r in results if not r]


def test_invariants_examples():
    ext = invariants(ExteriorGDA(SU2), 3)
    assert [e.degree() for e in ext] == [0, 3]
    assert invariants(TrivialGDA(SU2), 3) == [TrivialGDA(SU2).unit()]
    W = WeilGDA(SU2)
    assert [len(graded_invariants(W, k)) for k in range(5)] == [1, 0, 0, 2, 2]
    lam = casimir(SU2, SYM).retag("W")
    span = graded_invariants(W, 4)
    from weilkit.ring import sparse_rank
    assert sparse_rank([x.terms for x in span]) == sparse_rank([x.terms for x in span + [lam]])


# ---------------------------------------------------------------------------
# Cartan models

def test_cartan_d_examples(sphere3):
    B = ExteriorGDA(SU2)
    one = cartan_elem(COMM, B, [(GradedElement.one(SYM, SU2), B.unit())])
    assert not cartan_d(one)
    assert not cartan_d(sphere_omega(sphere3))
    with pytest.raises(NotInvariant):
        cartan_d(cartan_elem(COMM, B, [(GradedElement.one(SYM, SU2), B.unit()), (GradedElement.even_gen(SYM, SU2, 0), B.unit())]))


def test_nc_cartan_d_on_top_form():
    B = ExteriorGDA(SU2)
    top = GradedElement.monomial(EXT, SU2, None, 0b111)
    t = cartan_elem(NC, B, [(GradedElement.one(ENV, SU2), top)])
    dt = cartan_d(t)
    # iota_1 iota_2 iota_3 y1y2y3 = -1, so the cubic term gives 6 * (-1) / 24
    assert dt.terms[((0, 0, 0), 0)] == B.unit().scale(F(-1, 4))
    assert is_invariant(dt)


@pytest.mark.parametrize("model", [COMM, NC])
@pytest.mark.parametrize("make", [TrivialGDA, ExteriorGDA])
def test_weil_vs_cartan(model, make):
    assert weil_vs_cartan_check(model, make(SU2), 5)
    assert d_squared_check(model, make(SU2), 5)


def test_weil_vs_cartan_sphere(sphere3):
    assert weil_vs_cartan_check(COMM, sphere3, 3)


def _nc_invariants(B, k):
    return cartan_invariants(NC, B, k)


def test_odot_examples():
    B = ExteriorGDA(SU2)
    cas = casimir(SU2, ENV)
    one = cartan_elem(NC, B, [(GradedElement.one(ENV, SU2), B.unit())])
    top = GradedElement.monomial(EXT, SU2, None, 0b111)
    xi = cartan_elem(NC, B, [(GradedElement.one(ENV, SU2), top)])
    assert odot(one, xi) == xi
    lhs = odot(cartan_elem(NC, B, [(cas, B.unit())]), xi)
    assert lhs == cartan_elem(NC, B, [(cas, top)])
    with pytest.raises(TypeError):
        odot(cartan_elem(COMM, B, [(GradedElement.one(SYM, SU2), B.unit())]), xi)


def test_odot_on_exterior_is_clifford_product():
    B = ExteriorGDA(SU2)
    for i, j in itertools.product(range(8), repeat=2):
        a = GradedElement.monomial(EXT, SU2, None, i)
        b = GradedElement.monomial(EXT, SU2, None, j)
        assert b_odot(B, a, b).terms == cl_mul(a.retag("CL"), b.retag("CL")).terms
    top = GradedElement.monomial(EXT, SU2, None, 0b111)
    assert b_odot(B, top, top) == B.unit().scale(F(-1, 8))


@pytest.mark.parametrize("make,k", [(ExteriorGDA, 4), (WeilGDA, 3)])
def test_odot_associative_and_derivation(make, k):
    B = make(SU2)
    inv = _nc_invariants(B, k)
    sample = inv[:: max(1, len(inv) // 5)][:5]
    for a, b, c in itertools.product(sample, repeat=3):
        assert odot(odot(a, b), c) == odot(a, odot(b, c))
    for a, b in itertools.product(sample, repeat=2):
        sign = -1 if _odd(a) else 1
        assert cartan_d(odot(a, b)) == odot(cartan_d(a), b) + odot(a, cartan_d(b)).scale(sign)


def _odd(t):
    return any(b.degree() % 2 for b in t.terms.values()) if t.B.name != "weil" else t.degree() % 2 == 1


def test_cartan_product_commutative_model():
    B = ExteriorGDA(SU2)
    lam = cartan_elem(COMM, B, [(casimir(SU2, SYM), B.unit())])
    assert cartan_product(lam, lam) == cartan_elem(COMM, B, [(casimir(SU2, SYM) ** 2, B.unit())])


def test_equivariant_cohomology_trivial():
    assert equivariant_cohomology(COMM, TrivialGDA(SU2), 8).interior() == [1, 0, 0, 0, 1, 0, 0, 0]
    assert equivariant_cohomology(NC, TrivialGDA(SU2), 6).interior() == [1, 0, 0, 0, 1, 0]


def test_equivariant_cohomology_exterior_and_weil():
    assert equivariant_cohomology(COMM, ExteriorGDA(SU2), 6).interior() == [1, 0, 0, 0, 0, 0]
    assert equivariant_cohomology(NC, ExteriorGDA(SU2), 5).interior() == [1, 0, 0, 0, 0]
    # the Weil algebra is acyclic, so its equivariant cohomology is that of a point
    assert equivariant_cohomology(COMM, WeilGDA(SU2), 5).interior() == [1, 0, 0, 0, 1]


@pytest.mark.parametrize("model", [COMM, NC])
def test_equivariant_cohomology_sphere(model, sphere3):
    bt = equivariant_cohomology(model, sphere3, 6)
    assert bt.betti == [1, 0, 1, 0, 1, 0, 1]
    assert bt.record()["boundary_degree"] == 6


def test_sphere_cohomology_stable_in_weight():
    a = equivariant_cohomology(COMM, SphereGDA(SU2, weight=3), 5).interior()
    b = equivariant_cohomology(COMM, SphereGDA(SU2, weight=4), 5).interior()
    assert a == b == [1, 0, 1, 0, 1]


@pytest.mark.parametrize("B,deg", [(TrivialGDA(SU2), 4), (ExteriorGDA(SU2), 3), (SphereGDA(SU2, weight=3), 2)])
def test_twisted_differential(B, deg):
    assert twisted_d_check(B, deg)


# ---------------------------------------------------------------------------
# quantization of the Cartan model

def test_q_cartan_examples(ctx):
    B = ExteriorGDA(SU2)
    lam = cartan_elem(COMM, B, [(casimir(SU2, SYM), B.unit())])
    assert q_cartan(ctx, lam) == cartan_elem(NC, B, [(duflo_map(ctx, casimir(SU2, SYM)), B.unit())])
    top = GradedElement.monomial(EXT, SU2, None, 0b111)
    t = cartan_elem(COMM, B, [(GradedElement.one(SYM, SU2), top)])
    assert q_cartan(ctx, t) == cartan_elem(NC, B, [(GradedElement.one(ENV, SU2), top)])
    with pytest.raises(TruncationTooLow):
        q_cartan(DufloContext.build(SU2, 2), cartan_elem(COMM, B, [(casimir(SU2, SYM) ** 2, B.unit())]))


def test_q_cartan_chain(ctx, sphere3):
    assert q_cartan_chain_check(ctx, ExteriorGDA(SU2), 5)
    assert q_cartan_chain_check(ctx, sphere3, 4)


# ---------------------------------------------------------------------------
# the sphere computation

def test_sphere_suite_steps(report):
    assert report.passed, [s.record() for s in report.steps if not s]
    assert len(report.steps) == 7


def test_sphere_constants(report):
    assert report.duflo_constant == F(-1, 4)
    assert report.omega_exact_coeff == -1
    assert report.odot_exact_coeff == -1
    rec = report.record()
    assert rec["duflo_constant"] == "-1/4"


def test_sphere_step_values(ctx, sphere3):
    S = sphere3
    omega = sphere_omega(S)
    lam = cartan_elem(COMM, S, [(casimir(SU2, SYM), S.unit())])
    E = cartan_d(sphere_exact_term(S, COMM))
    assert cartan_product(omega, omega) == lam - E
    q = q_cartan(ctx, omega)
    assert q == sphere_omega(S, NC)
    duf = cartan_elem(NC, S, [(duflo_map(ctx, casimir(SU2, SYM)), S.unit())])
    assert odot(q, q) == duf - cartan_d(sphere_exact_term(S, NC))


def test_sphere_odot_correction(ctx, sphere3):
    # Q(omega) . Q(omega) differs from the naive componentwise square by exactly -1/4
    S = sphere3
    q = q_cartan(ctx, sphere_omega(S))
    naive = cartan_elem(NC, S, [])
    for l1, b1 in q.components():
        for l2, b2 in q.components():
            naive = naive + cartan_elem(NC, S, [(l1 * l2, S.product(b1, b2))])
    diff = odot(q, q) - naive
    assert diff == cartan_elem(NC, S, [(GradedElement.one(ENV, SU2), S.unit().scale(F(-1, 4)))])


def test_rejected_sign_gives_non_invariant_cocycle():
    S = SphereGDA(SU2, sign=-1, weight=3)
    printed = sphere_omega(S, area_coeff=1)
    assert not cartan_d(printed, check=False)
    with pytest.raises(NotInvariant):
        cartan_d(printed)


def test_printed_cocycle_is_not_closed(sphere3):
    S = sphere3
    printed = sphere_omega(S, area_coeff=1)
    assert is_invariant(printed)
    expect = cartan_elem(COMM, S, [(GradedElement.even_gen(SYM, SU2, a).scale(2), S.dn(a)) for a in range(3)])
    assert cartan_d(printed) == expect


def test_sphere_suite_needs_order(ctx):
    with pytest.raises(TruncationTooLow):
        sphere_suite(DufloContext.build(SU2, 2))
