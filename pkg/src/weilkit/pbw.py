"""Symmetric and enveloping algebras: PBW normal ordering and symmetrization.

Elements of U(g) are kept as sums of ascending words u_1^k1 ... u_n^kn.
Products are normal-ordered by commuting letters past each other with
[u_a, u_b] = f_abc u_c.
"""

from fractions import Fraction
from functools import lru_cache
from itertools import permutations
from math import factorial

from .multivec import ENV, NCW, SYM, GradedElement, register_product


@lru_cache(maxsize=None)
def _times_gen(alg, alpha, c):
    """Normal form of u^alpha u_c as a tuple of (exponent, coeff)."""
    j = max((i for i, e in enumerate(alpha) if e), default=-1)
    if j <= c:
        beta = list(alpha)
        beta[c] += 1
        return ((tuple(beta), Fraction(1)),)
    head = list(alpha)
    head[j] -= 1
    head = tuple(head)
    out = {}
    # u^head u_j u_c = (u^head u_c) u_j + u^head [u_j, u_c]
    for gamma, k in _times_gen(alg, head, c):
        for delta, k2 in _times_gen(alg, gamma, j):
            out[delta] = out.get(delta, 0) + k * k2
    for b, d, f in alg.bracket(j):
        if b == c:
            for delta, k2 in _times_gen(alg, head, d):
                out[delta] = out.get(delta, 0) + f * k2
    return tuple((e, v) for e, v in out.items() if v)


@lru_cache(maxsize=None)
def pbw_mono(alg, alpha, beta):
    """u^alpha u^beta in normal order, as a dict."""
    terms = {alpha: Fraction(1)}
    for c, e in enumerate(beta):
        for _ in range(e):
            new = {}
            for g, k in terms.items():
                for d, k2 in _times_gen(alg, g, c):
                    new[d] = new.get(d, 0) + k * k2
            terms = {g: k for g, k in new.items() if k}
    return terms


def _env_product(alg, k1, k2):
    return {(s, 0): c for s, c in pbw_mono(alg, k1[0], k2[0]).items()}


register_product(ENV, _env_product)


def u(alg, i):
    return GradedElement.even_gen(ENV, alg, i)


def v(alg, i):
    return GradedElement.even_gen(SYM, alg, i)


def u_mul(a, b):
    if a.tag != ENV or b.tag != ENV:
        raise TypeError("u_mul expects enveloping-algebra elements")
    return a * b


def _unit_vec(n, a):
    e = [0] * n
    e[a] = 1
    return tuple(e)


def u_left(a, w):
    """u_a w on the enveloping part (odd part untouched)."""
    ea = _unit_vec(w.n, a)
    out = {}
    for (s, bits), c in w.terms.items():
        for g, k in pbw_mono(w.alg, ea, s).items():
            key = (g, bits)
            out[key] = out.get(key, 0) + c * k
    return w.like(out)


def u_right(a, w):
    """w u_a on the enveloping part (u is even, so no sign)."""
    out = {}
    for (s, bits), c in w.terms.items():
        for g, k in _times_gen(w.alg, s, a):
            key = (g, bits)
            out[key] = out.get(key, 0) + c * k
    return w.like(out)


def ad_u(a, w):
    """ad(u_a) on the enveloping factor; this is L_a on U(g)."""
    return u_left(a, w) - u_right(a, w)


@lru_cache(maxsize=None)
def _sym_mono(alg, alpha):
    word = [i for i, e in enumerate(alpha) for _ in range(e)]
    n = alg.dim
    words = set(permutations(word))
    acc = {}
    for w in words:
        terms = {(0,) * n: Fraction(1)}
        for c in w:
            new = {}
            for g, k in terms.items():
                for d, k2 in _times_gen(alg, g, c):
                    new[d] = new.get(d, 0) + k * k2
            terms = new
        for g, k in terms.items():
            acc[g] = acc.get(g, 0) + k
    weight = Fraction(1, len(words))
    return tuple((g, k * weight) for g, k in acc.items() if k)


def sym_map(p):
    """Symmetrization S(g) -> U(g); works on the even part of SYM or W elements."""
    tag = {SYM: ENV}.get(p.tag)
    if p.tag == "W":
        tag = NCW
    if tag is None:
        raise TypeError("sym_map expects a symmetric-algebra element")
    out = {}
    for (s, bits), c in p.terms.items():
        for g, k in _sym_mono(p.alg, s):
            key = (g, bits)
            out[key] = out.get(key, 0) + c * k
    return GradedElement(tag, p.alg, out)


def is_central(w):
    """True iff w commutes with every u_a."""
    return all(not ad_u(a, w) for a in range(w.n))


def gr(w):
    """Leading filtration part, read as a symmetric-algebra element."""
    top = w.top()
    tag = {ENV: SYM, NCW: "W", "CL": "EXT"}.get(w.tag, w.tag)
    return top.retag(tag)


def multinomial(alpha):
    out = factorial(sum(alpha))
    for e in alpha:
        out //= factorial(e)
    return out
