import itertools
import json
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from weilkit.duflo import t_invariance_check
from weilkit.liedata import (
    BadIndex, JacobiViolation, LieDataError, NotTotallyAntisymmetric, ad_matrix, catalog,
    check_invariants, load_lie, mu_vars, poly_exp, structure_series,
)
from weilkit.ring import BadRational, Poly

F = Fraction
SU2_JSON = json.dumps({"name": "su2", "dim": 3, "f": [[1, 2, 3, 1], [2, 3, 1, 1], [3, 1, 2, 1]]})
SU2_TOML = 'name = "su2"\ndim = 3\nf = [[1, 2, 3, "1"], [2, 3, 1, "1"]]\n'


def test_load_json_and_toml(su2):
    assert load_lie(SU2_JSON) == su2
    assert load_lie(SU2_TOML) == su2


def test_load_from_file(tmp_path, su2):
    p = tmp_path / "su2.toml"
    p.write_text(SU2_TOML)
    assert load_lie(p) == su2


def test_inconsistent_duplicate_rejected():
    doc = {"dim": 3, "f": [[1, 2, 3, 1], [2, 3, 1, 2]]}
    with pytest.raises(NotTotallyAntisymmetric):
        load_lie(doc)


def test_repeated_index_rejected():
    with pytest.raises(NotTotallyAntisymmetric):
        load_lie({"dim": 3, "f": [[1, 1, 2, 1]]})


def test_jacobi_violation_quotes_quadruple():
    with pytest.raises(JacobiViolation, match=r"\(a,b,c,d\) = \(\d,\d,\d,\d\)"):
        load_lie({"name": "bad", "dim": 5, "f": [[1, 2, 3, 1], [1, 4, 5, 1]]})


def test_dimension_four_has_no_jacobi_counterexample():
    # f_123 = f_124 = 1 is Hodge-dual to a vector, hence a Lie algebra
    alg = load_lie({"dim": 4, "f": [[1, 2, 3, 1], [1, 2, 4, 1]]})
    assert alg.dim == 4


@given(st.lists(st.integers(-3, 3), min_size=4, max_size=4))
def test_every_antisymmetric_dim4_bracket_is_jacobi(vals):
    triples = list(itertools.combinations(range(1, 5), 3))
    alg = load_lie({"dim": 4, "f": [[*t, v] for t, v in zip(triples, vals)]})
    assert check_invariants(4, alg.dense())["jacobi"] is None


@pytest.mark.parametrize("doc,err", [
    ({"dim": 3, "f": [[1, 2, 4, 1]]}, BadIndex),
    ({"dim": 3, "f": [[1, 2, 3, "1/0"]]}, BadRational),
    ({"dim": 3, "f": [[1, 2, 3]]}, LieDataError),
    ({"f": []}, LieDataError),
    ("not json = [", LieDataError),
])
def test_load_errors(doc, err):
    with pytest.raises(err):
        load_lie(doc)


def test_catalog_values():
    su2, so4, so5 = catalog("su2"), catalog("so4"), catalog("so5")
    assert su2.f(0, 1, 2) == 1 and su2.fdot() == 6
    assert so4.fdot() == 12
    assert catalog("abelian(2)").is_abelian()
    assert so5.dim == 10 and set(so5.entries.values()) <= {-1, 1}
    with pytest.raises(LieDataError):
        catalog("su3")


def test_so5_against_matrix_oracle():
    # brackets of L_ij = E_ij - E_ji computed with sympy matrices
    pairs = [(i, j) for i in range(5) for j in range(i + 1, 5)]
    L = []
    for i, j in pairs:
        M = sympy.zeros(5)
        M[i, j], M[j, i] = 1, -1
        L.append(M)
    so5 = catalog("so5")
    for a, b in itertools.product(range(10), repeat=2):
        C = L[a] * L[b] - L[b] * L[a]
        rebuilt = sum((L[c] * int(so5.f(a, b, c)) for c in range(10)), sympy.zeros(5))
        assert C == rebuilt


@pytest.mark.parametrize("name", ["su2", "so4", "so5", "abelian(4)"])
def test_catalog_invariants(name):
    report = check_invariants(catalog(name).dim, catalog(name).dense())
    assert report == {"antisymmetric": None, "totally_antisymmetric": None, "jacobi": None}


@given(st.sampled_from(["su2", "so4", "so5"]), st.data())
def test_jacobi_random_quadruples(name, data):
    alg = catalog(name)
    f = alg.f
    a, b, c, d = (data.draw(st.integers(0, alg.dim - 1)) for _ in range(4))
    s = sum(f(a, b, r) * f(r, c, d) + f(b, c, r) * f(r, a, d) + f(c, a, r) * f(r, b, d)
            for r in range(alg.dim))
    assert s == 0


def test_mutated_su2_fails_jacobi(su2):
    f = su2.dense()
    f[0][1][2] = F(2)
    report = check_invariants(3, f)
    assert report["jacobi"] is not None


def test_ad_matrix_convention(su2):
    A = ad_matrix(su2)
    vs = mu_vars(3)
    assert A[1, 0] == Poly.var(vs, 2)
    assert A[0, 1] == -Poly.var(vs, 2)
    assert A.is_antisymmetric()
    e3 = A.map(lambda p: p.evaluate((0, 0, 1)))
    assert [[e3[i, j] for j in range(3)] for i in range(3)] == [[0, -1, 0], [1, 0, 0], [0, 0, 0]]
    assert all(p == 0 for row in ad_matrix(catalog("abelian(3)")).entries for p in row)


def test_structure_series_su2(su2):
    b = structure_series(su2, 2)
    vs = mu_vars(3)
    mu = [Poly.var(vs, i) for i in range(3)]
    assert b.logJ == (mu[0] ** 2 + mu[1] ** 2 + mu[2] ** 2) * F(-1, 12)
    # T = -1/12 ad_mu, i.e. T_ab = 1/12 sum_c mu_c f_cab
    for a, b_ in itertools.product(range(3), repeat=2):
        expect = sum((mu[c] * su2.f(c, a, b_) for c in range(3)), Poly(vs)) * F(1, 12)
        assert b.T[a, b_] == expect


def test_structure_series_abelian():
    b = structure_series(catalog("abelian(3)"), 4)
    assert not b.logJ and b.Jhalf == 1
    assert all(not p for row in b.T.entries for p in row)


def _sympy_J(alg, mu, order):
    # det g(ad_{t mu}) with g(s) = (1 - e^-s)/s, expanded in t
    t = sympy.Symbol("t")
    n = alg.dim
    A = sympy.zeros(n)
    for a, b, c in itertools.product(range(n), repeat=3):
        A[a, b] += mu[c] * int(alg.f(c, b, a))
    g = sympy.zeros(n)
    power = sympy.eye(n)
    for k in range(order + 1):
        g += power * sympy.Rational((-1) ** k, sympy.factorial(k + 1)) * t**k
        power = power * A
    return sympy.expand(g.det()), t


@pytest.mark.parametrize("name,mu,order", [
    ("su2", (1, 2, -1), 6), ("su2", (0, 0, 1), 8), ("so4", (1, 0, 2, -1, 1, 1), 4),
])
def test_J_against_determinant_oracle(name, mu, order):
    alg = catalog(name)
    det, t = _sympy_J(alg, mu, order)
    b = structure_series(alg, order)
    J = poly_exp(b.logJ, order)
    for k in range(order + 1):
        ours = J.homogeneous(k).evaluate(mu)
        assert sympy.Rational(ours.numerator, ours.denominator) == det.coeff(t, k)


def test_J_closed_form_su2():
    # along a unit direction J = (sin(t/2) / (t/2))^2
    t = sympy.Symbol("t")
    N = 10
    closed = sympy.series((sympy.sin(t / 2) / (t / 2)) ** 2, t, 0, N + 1).removeO()
    J = poly_exp(structure_series(catalog("su2"), N).logJ, N)
    for k in range(N + 1):
        c = J.homogeneous(k).evaluate((0, 1, 0))
        assert sympy.Rational(c.numerator, c.denominator) == closed.coeff(t, k)


@pytest.mark.parametrize("name,order", [("su2", 6), ("so4", 4), ("so5", 3)])
def test_series_bundle_invariants(name, order):
    alg = catalog(name)
    b = structure_series(alg, order)
    assert b.T.is_antisymmetric()
    assert all(p.degree() <= order for row in b.T.entries for p in row)
    assert (b.Jhalf * b.Jhalf).truncate(order) == poly_exp(b.logJ, order)
    assert all(sum(e) % 2 == 0 for e in b.logJ.terms)


@pytest.mark.parametrize("name,order", [("su2", 6), ("so4", 4), ("so5", 3)])
def test_T_invariance(name, order):
    assert t_invariance_check(catalog(name), order)
