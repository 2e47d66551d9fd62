"""Clifford algebra Cl(g) in the symbol picture.

Elements are stored as exterior monomials (the symbol of the ascending
Clifford word).  Multiplication is Kostant's formula: apply
exp(-1/2 sum_a iota_a^1 iota_a^2) to the tensor square and wedge.  A naive
word-rewriting product is kept alongside as an independent oracle.
"""

from fractions import Fraction
from functools import lru_cache
from itertools import combinations, permutations

from .liedata import catalog
from .multivec import (
    CL, EXT, GradedElement, bits_of, below, contract, ext_left, popcount,
    register_product, wedge_sign,
)
from .ring import QMatrix, TruncSeries, taylor_coeffs


class SingularS(ValueError):
    pass


# ---------------------------------------------------------------------------
# products on bitsets

@lru_cache(maxsize=None)
def kostant_bits(I, J, mask=-1):
    """Symbol of x_I x_J as {bits: coeff}; only generators in ``mask`` square to 1/2.

    Generators outside the mask are Grassmann (they anticommute and square to 0).
    """
    terms = {(I, J): Fraction(1)}
    for a in bits_of(I & J & mask):
        bit = 1 << a
        new = dict(terms)
        for (P, R), c in terms.items():
            if P & bit and R & bit:
                # iota_a on the second factor picks up (-1)^{|P|}; on the first
                # factor the usual position sign
                s = below(R, a) + popcount(P) + below(P, a)
                k = (P ^ bit, R ^ bit)
                v = c * Fraction(-1, 2) * (-1 if s & 1 else 1)
                new[k] = new.get(k, 0) + v
        terms = new
    out = {}
    for (P, R), c in terms.items():
        s = wedge_sign(P, R)
        if s:
            out[P | R] = out.get(P | R, 0) + c * s
    return {k: v for k, v in out.items() if v}


def _cl_product(alg, k1, k2):
    return {(k1[0], b): c for b, c in kostant_bits(k1[1], k2[1]).items()}


register_product(CL, _cl_product)


def cl_mul(a, b):
    if a.tag != CL or b.tag != CL:
        raise TypeError("cl_mul expects Clifford elements")
    if a.n != b.n:
        raise ValueError("dimension mismatch")
    return a * b


def _normal_order(word):
    """Rewrite a Clifford word into ascending distinct words: {tuple: coeff}."""
    todo = [(tuple(word), Fraction(1))]
    out = {}
    while todo:
        w, c = todo.pop()
        for i in range(len(w) - 1):
            if w[i] > w[i + 1]:
                swapped = w[:i] + (w[i + 1], w[i]) + w[i + 2:]
                todo.append((swapped, -c))
                break
            if w[i] == w[i + 1]:
                todo.append((w[:i] + w[i + 2:], c / 2))
                break
        else:
            out[w] = out.get(w, 0) + c
    return out


def cl_mul_oracle(a, b):
    """Clifford product by concatenating generator words and rewriting."""
    if a.n != b.n:
        raise ValueError("dimension mismatch")
    out = {}
    for (s1, I), c1 in a.terms.items():
        for (_, J), c2 in b.terms.items():
            for w, c in _normal_order(bits_of(I) + bits_of(J)).items():
                k = (s1, sum(1 << i for i in w))
                out[k] = out.get(k, 0) + c1 * c2 * c
    return a.like(out)


# ---------------------------------------------------------------------------
# g_a, gamma and ad(gamma)

def x(alg, i):
    return GradedElement.odd_gen(CL, alg, i)


def g_and_gamma(alg):
    n = alg.dim
    zero = (0,) * n
    gs = []
    for a in range(n):
        t = {}
        for r, s, f in alg.bracket(a):
            if r < s:
                k = (zero, (1 << r) | (1 << s))
                t[k] = t.get(k, 0) - f
        gs.append(GradedElement(CL, alg, t))
    gamma = {}
    for (a, b, c), f in alg.entries.items():
        if a < b < c:
            gamma[(zero, (1 << a) | (1 << b) | (1 << c))] = -f
    return gs, GradedElement(CL, alg, gamma)


def _ext_pair_left(b, c, w):
    return ext_left(b, ext_left(c, w))


def ad_gamma(w):
    """ad(gamma) by the closed contraction formula."""
    alg = w.alg
    out = w.like({})
    for a in range(alg.dim):
        ia = contract(a, w)
        if not ia:
            continue
        for b, c, f in alg.bracket(a):
            if b < c:
                out = out - _ext_pair_left(b, c, ia).scale(f)
    for (a, b, c), f in alg.entries.items():
        if a < b < c:
            # the 3! orderings of f_abc iota_a iota_b iota_c coincide
            out = out - contract(a, contract(b, contract(c, w))).scale(f * 6 / Fraction(24))
    return out


def ad_gamma_commutator(w):
    """gamma w - (-1)^{|w|} w gamma computed with the Clifford product."""
    _, gamma = g_and_gamma(w.alg)
    out = w.like({})
    for k, c in w.terms.items():
        m = w.like({k: c})
        if popcount(k[1]) & 1:
            out = out + gamma * m + m * gamma
        else:
            out = out + gamma * m - m * gamma
    return out


def left_mult_op(a, w):
    """x_a^L = y_a + 1/2 iota_a."""
    return ext_left(a, w) + contract(a, w).scale(Fraction(1, 2))


def right_mult_op(a, w):
    """x_a^R = y_a - 1/2 iota_a, i.e. w -> (-1)^{|w|} w x_a."""
    return ext_left(a, w) - contract(a, w).scale(Fraction(1, 2))


def homotopy(alg):
    """H = -24/(f.f) gamma with [ad(gamma), H^L] = id."""
    ff = alg.fdot()
    if not ff:
        raise ValueError("homotopy needs a non-abelian algebra")
    _, gamma = g_and_gamma(alg)
    return gamma.scale(Fraction(-24) / ff)


# ---------------------------------------------------------------------------
# Pfaffians and quadratic exponentials

def _entries(S):
    return S.entries if isinstance(S, QMatrix) else [list(r) for r in S]


def pfaffian(S):
    A = _entries(S)
    n = len(A)
    if n % 2:
        raise ValueError("Pfaffian needs an even dimension")
    if n == 0:
        return Fraction(1)

    def pf(idx):
        if not idx:
            return Fraction(1)
        i = idx[0]
        total = 0
        for pos in range(1, len(idx)):
            j = idx[pos]
            if A[i][j]:
                rest = idx[1:pos] + idx[pos + 1:]
                sign = 1 if pos % 2 else -1
                total = total + A[i][j] * pf(rest) * sign
        return total

    return pf(tuple(range(n)))


def _quadratic(S, tag, alg):
    """1/2 S_ab e_a e_b as an element (for a != b this is sum_{a<b} S_ab e_a e_b)."""
    A = _entries(S)
    n = len(A)
    zero = (0,) * alg.dim
    t = {}
    for i in range(n):
        for j in range(i + 1, n):
            if A[i][j]:
                t[(zero, (1 << i) | (1 << j))] = A[i][j]
    return GradedElement(tag, alg, t)


class SeriesElem:
    """Element-valued truncated series in t: coeffs[k] multiplies t^k."""

    def __init__(self, coeffs, order):
        self.order = order
        c = list(coeffs)[: order + 1]
        while len(c) < order + 1:
            c.append(c[0].like({}))
        self.coeffs = c

    def __add__(self, other):
        return SeriesElem([a + b for a, b in zip(self.coeffs, other.coeffs)], self.order)

    def __sub__(self, other):
        return SeriesElem([a - b for a, b in zip(self.coeffs, other.coeffs)], self.order)

    def scale(self, s):
        """Multiply by a scalar or a TruncSeries in t."""
        if isinstance(s, TruncSeries):
            out = [c.like({}) for c in self.coeffs]
            for i, a in enumerate(s.coeffs[: self.order + 1]):
                if a:
                    for j in range(self.order + 1 - i):
                        out[i + j] = out[i + j] + self.coeffs[j].scale(a)
            return SeriesElem(out, self.order)
        return SeriesElem([c.scale(s) for c in self.coeffs], self.order)

    def mul(self, other, prod):
        out = [c.like({}) for c in self.coeffs]
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j in range(self.order + 1 - i):
                b = other.coeffs[j]
                if b:
                    out[i + j] = out[i + j] + prod(a, b)
        return SeriesElem(out, self.order)

    def apply(self, fn):
        return SeriesElem([fn(c) for c in self.coeffs], self.order)

    def __eq__(self, other):
        return self.order == other.order and all(a == b for a, b in zip(self.coeffs, other.coeffs))

    def __repr__(self):
        return " + ".join(f"t^{k}·({c!r})" for k, c in enumerate(self.coeffs) if c) or "0"


def series_exp(X, prod):
    """exp of a series with vanishing t^0 coefficient."""
    if X.coeffs[0]:
        raise ValueError("series exponential needs a vanishing constant term")
    one = X.coeffs[0].like({}) + 1
    out = SeriesElem([one], X.order)
    power = SeriesElem([one], X.order)
    for k in range(1, X.order + 1):
        power = power.mul(X, prod).scale(Fraction(1, k))
        out = out + power
    return out


def exp_quadratic(S, mode="exact", order=None, alg=None):
    """exp(1/2 S_ab e_a e_b).

    ``exact`` works in the exterior algebra (the sum stops at n/2 terms).
    ``series`` works in the Clifford algebra with S replaced by t S and
    returns a SeriesElem truncated at t^order.
    """
    n = len(_entries(S))
    alg = alg or catalog(f"abelian({n})")
    if mode == "exact":
        X = _quadratic(S, EXT, alg)
        out = GradedElement.one(EXT, alg)
        power = GradedElement.one(EXT, alg)
        for k in range(1, n // 2 + 1):
            power = (power * X).scale(Fraction(1, k))
            out = out + power
        return out
    if mode == "series":
        if order is None:
            raise ValueError("series mode needs an order")
        X = _quadratic(S, CL, alg)
        zero = X.like({})
        return series_exp(SeriesElem([zero, X], order), lambda a, b: a * b)
    if mode == "clifford":
        raise ValueError("exact mode is only available for exterior exponentials")
    raise ValueError(f"unknown mode {mode!r}")


# ---------------------------------------------------------------------------
# Berezin-type identity

def inverse(S):
    A = [[Fraction(v) for v in r] for r in _entries(S)]
    n = len(A)
    M = [r + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(A)]
    for c in range(n):
        p = next((i for i in range(c, n) if M[i][c]), None)
        if p is None:
            raise SingularS("matrix is singular")
        M[c], M[p] = M[p], M[c]
        piv = M[c][c]
        M[c] = [v / piv for v in M[c]]
        for i in range(n):
            if i != c and M[i][c]:
                k = M[i][c]
                M[i] = [a - k * b for a, b in zip(M[i], M[c])]
    return [r[n:] for r in M]


def contraction_exp(C, w, reverse=False):
    """exp(1/2 C_ab iota_a iota_b) w for antisymmetric C.

    With ``reverse`` the pair acts as iota_b iota_a, which flips the sign.
    """
    n = len(C)

    def step(v):
        out = v.like({})
        for a in range(n):
            for b in range(n):
                if a != b and C[a][b]:
                    if reverse:
                        out = out + contract(b, contract(a, v)).scale(Fraction(C[a][b], 2))
                    else:
                        out = out + contract(a, contract(b, v)).scale(Fraction(C[a][b], 2))
        return out

    total = w
    term = w
    for k in range(1, n // 2 + 1):
        term = step(term).scale(Fraction(1, k))
        total = total + term
    return total


def berezin_check(S, reverse=True):
    """Pf(S)^{-1} exp(1/2 (S^-1)_ab iota iota) exp(1/2 S e e) equals the volume form.

    The contraction pair is read in pairing order (iota_b after iota_a), which
    is the reading under which the two-dimensional case gives
    (1/s)(1 + (1/s) iota_1 iota_2)(1 + s y1 y2) = y1 y2.
    """
    from .multivec import Verdict

    A = _entries(S)
    n = len(A)
    if n % 2:
        raise ValueError("Berezin identity needs an even dimension")
    Sinv = inverse(A)
    alg = catalog(f"abelian({n})")
    E = exp_quadratic(A, "exact", alg=alg)
    lhs = contraction_exp(Sinv, E, reverse=reverse).scale(1 / Fraction(pfaffian(A)))
    vol = GradedElement.monomial(EXT, alg, None, (1 << n) - 1)
    diff = lhs - vol
    if diff:
        return Verdict("berezin", "FAIL", n, None, None, repr(diff))
    return Verdict("berezin", "PASS", n)


# ---------------------------------------------------------------------------
# Clifford exponential lemma with Grassmann coefficients

def _mat_series(S, fn, order):
    """Coefficients (as matrices) of fn(tS) = sum_k c_k t^k S^k."""
    n = len(S)
    cs = fn.coeffs
    mats = []
    P = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for k in range(order + 1):
        if k:
            P = [[sum(P[i][r] * S[r][j] for r in range(n)) for j in range(n)] for i in range(n)]
        mats.append([[cs[k] * v for v in row] for row in P])
    return mats


def di_check(S, order):
    """exp(-iota_a k_a) exp(1/2 S x x) = exp(w2) exp(-x_r g_r) exp(1/2 S x x).

    Works in Cl(V) tensor a Grassmann algebra on kappa_1..kappa_m, with S
    scaled by t and everything truncated at t^order.  Here
    g_r = (1 - e^{tS})_{rs} kappa_s and w2 = 1/2 sinh(tS)_{ab} kappa_a kappa_b.
    """
    from .multivec import Verdict

    S = [[Fraction(v) for v in r] for r in _entries(S)]
    m = len(S)
    alg = catalog(f"abelian({2 * m})")
    mask = (1 << m) - 1
    zero = (0,) * (2 * m)

    def prod(a, b):
        out = {}
        for (s, I), c1 in a.terms.items():
            for (_, J), c2 in b.terms.items():
                for k, c in kostant_bits(I, J, mask).items():
                    key = (s, k)
                    out[key] = out.get(key, 0) + c1 * c2 * c
        return a.like(out)

    def el(t):
        return GradedElement(CL, alg, t)

    quad = el({(zero, (1 << i) | (1 << j)): S[i][j] for i in range(m) for j in range(i + 1, m) if S[i][j]})
    E = series_exp(SeriesElem([el({}), quad], order), prod)

    # left side: prod_a (1 + kappa_a iota_a)
    def kappa_iota(a, w):
        return ext_left(m + a, contract(a, w))

    lhs = E
    for a in range(m):
        lhs = lhs + lhs.apply(lambda w, a=a: kappa_iota(a, w))

    # right side
    exp_s = taylor_coeffs("exp", order)
    sinh_s = TruncSeries([c if k % 2 else 0 for k, c in enumerate(exp_s.coeffs)], order)
    one_minus_exp = [[-v for v in row] for row in [[0] * m] * m]
    eS = _mat_series(S, exp_s, order)
    shS = _mat_series(S, sinh_s, order)
    X = [el({}) for _ in range(order + 1)]
    W2 = [el({}) for _ in range(order + 1)]
    for k in range(1, order + 1):
        for r in range(m):
            for s in range(m):
                # -x_r (1 - e^{tS})_{rs} kappa_s at order k: + x_r (S^k/k!)_{rs} kappa_s
                v = eS[k][r][s]
                if v:
                    X[k] = X[k] + el({(zero, (1 << r) | (1 << (m + s))): v})
        for a in range(m):
            for b in range(a + 1, m):
                v = shS[k][a][b]
                if v:
                    W2[k] = W2[k] + el({(zero, (1 << (m + a)) | (1 << (m + b))): v})
    del one_minus_exp
    rhs = series_exp(SeriesElem(W2, order), prod).mul(
        series_exp(SeriesElem(X, order), prod), prod).mul(E, prod)
    diff = lhs - rhs
    if any(diff.coeffs):
        return Verdict("di_lemma", "FAIL", order, None, None, repr(diff))
    return Verdict("di_lemma", "PASS", order)


# ---------------------------------------------------------------------------
# symbol of tau

def tau_symbol_check(alg, mu, order, sign=-1):
    """Compare exp_Cl(-1/2 f_abc t mu_a x_b x_c) with its closed symbol.

    The closed form is det^{1/2}(cosh(t ad_mu / 2)) exp(-sign M_ab y_a y_b) in
    the exterior algebra, M = tanh(t ad_mu / 2) = (Ad_g - 1)/(Ad_g + 1).
    With (ad_mu)_{ab} = sum_c mu_c f_cba the identity holds for sign = -1.
    """
    from .multivec import Verdict

    n = alg.dim
    mu = [Fraction(v) for v in mu]
    A = [[sum((mu[c] * alg.f(c, b, a) for c in range(n)), Fraction(0)) for b in range(n)] for a in range(n)]
    zero = (0,) * n
    # left: Clifford exponential of -1/2 f_abc mu_a x_b x_c = -sum_{b<c} (mu.f)_bc x_b x_c
    quad = {}
    for (a, b, c), f in alg.entries.items():
        if b < c and mu[a]:
            k = (zero, (1 << b) | (1 << c))
            quad[k] = quad.get(k, 0) - mu[a] * f
    Xl = GradedElement(CL, alg, quad)
    lhs = series_exp(SeriesElem([Xl.like({}), Xl], order), lambda p, q: p * q)

    # right: Ad_g = exp(t A); tanh(tA/2) via (Ad - 1)(Ad + 1)^{-1} as matrix series
    exp_s = taylor_coeffs("exp", order)
    eA = _mat_series(A, exp_s, order)  # coefficient matrices of e^{tA}

    def mmul(P, R):
        return [[sum(P[i][r] * R[r][j] for r in range(n)) for j in range(n)] for i in range(n)]

    def smul(Ps, Rs):
        out = [[[Fraction(0)] * n for _ in range(n)] for _ in range(order + 1)]
        for i in range(order + 1):
            for j in range(order + 1 - i):
                M = mmul(Ps[i], Rs[j])
                out[i + j] = [[x + y for x, y in zip(r1, r2)] for r1, r2 in zip(out[i + j], M)]
        return out

    ident = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    num = [[[v - (ident[i][j] if k == 0 else 0) for j, v in enumerate(r)] for i, r in enumerate(eA[k])] for k in range(order + 1)]
    den = [[[v + (ident[i][j] if k == 0 else 0) for j, v in enumerate(r)] for i, r in enumerate(eA[k])] for k in range(order + 1)]
    # invert den = 2 I + O(t): den^{-1} = sum (-1)^j (1/2)^{j+1} (den - 2I)^j
    D0 = [[[Fraction(0)] * n for _ in range(n)]] + den[1:]
    inv = [[[Fraction(0)] * n for _ in range(n)] for _ in range(order + 1)]
    inv[0] = [[v / 2 for v in r] for r in ident]
    power = [ident] + [[[Fraction(0)] * n for _ in range(n)] for _ in range(order)]
    for j in range(1, order + 1):
        power = smul(power, D0)
        c = Fraction((-1) ** j, 2 ** (j + 1))
        inv = [[[x + c * y for x, y in zip(r1, r2)] for r1, r2 in zip(inv[k], power[k])] for k in range(order + 1)]
    M = smul(num, inv)
    Y = []
    for k in range(order + 1):
        t = {}
        for a in range(n):
            for b in range(a + 1, n):
                v = M[k][a][b]
                if v:
                    t[(zero, (1 << a) | (1 << b))] = -sign * 2 * v
        Y.append(GradedElement(EXT, alg, t))
    expY = series_exp(SeriesElem(Y, order), lambda p, q: p * q)
    # det^{1/2} cosh(tA/2) = exp(1/2 tr log cosh(tA/2))
    logcosh = taylor_coeffs("cosh", order).scale(Fraction(1, 2)).log()
    tr = [Fraction(0)] * (order + 1)
    P = ident
    for k in range(order + 1):
        if k:
            P = mmul(P, A)
        tr[k] = logcosh.coeffs[k] * sum(P[i][i] for i in range(n))
    det_half = (TruncSeries(tr, order) * Fraction(1, 2)).exp()
    rhs = expY.scale(det_half)
    lhs_sym = lhs.apply(lambda e: e.retag(EXT))
    diff = lhs_sym - rhs
    if any(diff.coeffs):
        return Verdict("tau_symbol", "FAIL", order, alg.name, None, repr(diff))
    return Verdict("tau_symbol", "PASS", order, alg.name)
