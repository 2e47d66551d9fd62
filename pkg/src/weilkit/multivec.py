"""Sparse graded super-elements and the derivations shared by every picture.

One element type serves the exterior, Clifford, symmetric, enveloping and both
Weil algebras.  A basis monomial is a pair ``(sym, bits)``: ``sym`` is the
exponent vector of the even generators (v, u, or the sphere coordinates n) and
``bits`` is the set of odd generators (y, x, or dn) in ascending order.  The
algebra tag decides which product applies and how generators are named.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product as iproduct

from .ring import render_rational

EXT, CL, SYM, ENV, W, NCW, SPH, TRIV = "EXT", "CL", "SYM", "ENV", "W", "NCW", "SPH", "TRIV"
TAGS = (EXT, CL, SYM, ENV, W, NCW, SPH, TRIV)

# generator letters (even, odd) per tag
NAMES = {
    EXT: (None, "y"), CL: (None, "x"), SYM: ("v", None), ENV: ("u", None),
    W: ("v", "y"), NCW: ("u", "x"), SPH: ("n", "dn"), TRIV: (None, None),
}
EVEN_WEIGHT = {SPH: 0, TRIV: 0}

_PRODUCTS = {}
_POST = {}


def register_product(tag, fn, post=None):
    """fn(alg, key1, key2) -> dict of key -> coefficient for two basis monomials.

    ``post`` (if given) is applied once to the assembled product, e.g. a normal form.
    """
    _PRODUCTS[tag] = lru_cache(maxsize=None)(fn)
    if post is not None:
        _POST[tag] = post


def _product_for(tag):
    if tag not in _PRODUCTS:
        # the non-commutative products live in later modules
        from . import clifford, pbw, weil  # noqa: F401
        from . import cartan  # noqa: F401
    return _PRODUCTS[tag]


# ---------------------------------------------------------------------------
# sign helpers on bitsets

def popcount(x):
    return bin(x).count("1")


def bits_of(x):
    out, i = [], 0
    while x:
        if x & 1:
            out.append(i)
        x >>= 1
        i += 1
    return out


def wedge_sign(I, J):
    """Sign of y_I y_J -> y_{I|J}; 0 if they overlap."""
    if I & J:
        return 0
    swaps = 0
    for j in bits_of(J):
        swaps += popcount(I >> (j + 1))
    return -1 if swaps & 1 else 1


def below(I, a):
    return popcount(I & ((1 << a) - 1))


def wdegree(tag, key):
    sym, bits = key
    return EVEN_WEIGHT.get(tag, 2) * sum(sym) + popcount(bits)


# ---------------------------------------------------------------------------
# the element type

class GradedElement:
    __slots__ = ("tag", "alg", "terms")

    def __init__(self, tag, alg, terms=None):
        self.tag = tag
        self.alg = alg
        t = {}
        if terms:
            for k, c in terms.items():
                if c:
                    t[k] = c
        self.terms = t

    # constructors
    @property
    def n(self):
        return self.alg.dim

    @classmethod
    def zero(cls, tag, alg):
        return cls(tag, alg)

    @classmethod
    def scalar(cls, tag, alg, c=1):
        return cls(tag, alg, {(_zero_sym(tag, alg), 0): Fraction(c)})

    @classmethod
    def one(cls, tag, alg):
        return cls.scalar(tag, alg, 1)

    @classmethod
    def monomial(cls, tag, alg, sym=None, bits=0, c=1):
        if sym is None:
            sym = _zero_sym(tag, alg)
        return cls(tag, alg, {(tuple(sym), bits): Fraction(c)})

    @classmethod
    def even_gen(cls, tag, alg, i, power=1):
        sym = [0] * _sym_len(tag, alg)
        sym[i] = power
        return cls.monomial(tag, alg, sym)

    @classmethod
    def odd_gen(cls, tag, alg, i):
        return cls.monomial(tag, alg, None, 1 << i)

    def like(self, terms):
        return GradedElement(self.tag, self.alg, terms)

    # vector space structure
    def _check(self, other):
        if not isinstance(other, GradedElement):
            raise TypeError(f"cannot combine element with {type(other).__name__}")
        if other.tag != self.tag:
            raise TypeError(f"tag mismatch: {self.tag} vs {other.tag}")

    def __add__(self, other):
        if not isinstance(other, GradedElement):
            if other == 0:
                return self
            other = GradedElement.scalar(self.tag, self.alg, other)
        self._check(other)
        t = dict(self.terms)
        for k, c in other.terms.items():
            t[k] = t.get(k, 0) + c
        return self.like(t)

    __radd__ = __add__

    def __neg__(self):
        return self.like({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        return self.like({k: v * c for k, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, GradedElement):
            return multiply(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __truediv__(self, c):
        return self.scale(1 / Fraction(c))

    def __pow__(self, k):
        out = GradedElement.one(self.tag, self.alg)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, GradedElement):
            return self.tag == other.tag and self.terms == other.terms
        if other == 0:
            return not self.terms
        return self == GradedElement.scalar(self.tag, self.alg, other)

    def __hash__(self):
        return hash((self.tag, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def __iter__(self):
        return iter(self.terms.items())

    def __len__(self):
        return len(self.terms)

    # grading
    def degree(self):
        return max((wdegree(self.tag, k) for k in self.terms), default=-1)

    def parity(self):
        ps = {popcount(b) & 1 for _, b in self.terms}
        if len(ps) > 1:
            return None
        return ps.pop() if ps else 0

    def part(self, degree):
        return self.like({k: c for k, c in self.terms.items() if wdegree(self.tag, k) == degree})

    def top(self):
        d = self.degree()
        return self.part(d) if d >= 0 else self

    def odd_degree_part(self, k):
        return self.like({key: c for key, c in self.terms.items() if popcount(key[1]) == k})

    def scalar_part(self):
        return self.terms.get((_zero_sym(self.tag, self.alg), 0), Fraction(0))

    def is_scalar(self):
        return all(not any(s) and not b for s, b in self.terms)

    def map_monomials(self, fn, tag=None):
        """Apply a linear map given on basis monomials: fn(key) -> dict."""
        out = {}
        for k, c in self.terms.items():
            for k2, c2 in fn(k).items():
                out[k2] = out.get(k2, 0) + c * c2
        return GradedElement(tag or self.tag, self.alg, out)

    def retag(self, tag):
        return GradedElement(tag, self.alg, self.terms)

    def __repr__(self):
        return render(self)

    def to_expr(self):
        return render(self, dsl=True)


def _sym_len(tag, alg):
    return 3 if tag == SPH else (0 if tag == TRIV else alg.dim)


def _zero_sym(tag, alg):
    return (0,) * _sym_len(tag, alg)


def multiply(a, b):
    a._check(b)
    fn = _product_for(a.tag)
    out = {}
    for k1, c1 in a.terms.items():
        for k2, c2 in b.terms.items():
            for k, c in fn(a.alg, k1, k2).items():
                out[k] = out.get(k, 0) + c1 * c2 * c
    post = _POST.get(a.tag)
    return post(a.like(out)) if post else a.like(out)


def _supercomm_product(alg, k1, k2):
    """Product of the super-commutative tags: symmetric part adds, odd part wedges."""
    s = wedge_sign(k1[1], k2[1])
    if not s:
        return {}
    return {(tuple(x + y for x, y in zip(k1[0], k2[0])), k1[1] | k2[1]): s}


for _t in (EXT, SYM, W, TRIV):
    register_product(_t, _supercomm_product)


def wedge(a, b):
    if a.tag != EXT or b.tag != EXT:
        raise TypeError("wedge expects exterior elements")
    if a.n != b.n:
        raise TypeError("dimension mismatch")
    return multiply(a, b)


# ---------------------------------------------------------------------------
# rendering

def _mono_str(tag, key, dsl):
    even, odd = NAMES[tag]
    sym, bits = key
    parts = []
    for i, e in enumerate(sym):
        if e:
            parts.append(f"{even}{i + 1}" + (f"^{e}" if e > 1 else ""))
    for i in bits_of(bits):
        parts.append(f"{odd}{i + 1}")
    return ("*" if dsl else " ").join(parts)


def sort_key(tag, key):
    sym, bits = key
    return (-wdegree(tag, key), tuple(-e for e in sym), bits_of(bits))


def render(el, dsl=False):
    if not el.terms:
        return "0"
    out = []
    for key in sorted(el.terms, key=lambda k: sort_key(el.tag, k)):
        c = el.terms[key]
        mono = _mono_str(el.tag, key, dsl)
        neg = c < 0
        a = -c if neg else c
        if not mono:
            body = render_rational(a)
        elif a == 1:
            body = mono
        else:
            body = render_rational(a) + ("*" if dsl else "·") + mono
        if not out:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out)


# ---------------------------------------------------------------------------
# derivations on the odd (exterior/Clifford symbol) part

def _check_index(alg, a):
    if not 0 <= a < alg.dim:
        raise IndexError(f"index {a + 1} outside 1..{alg.dim}")


def contract(a, w):
    """Odd derivation iota_a: removes y_a (or x_a in the symbol picture)."""
    _check_index(w.alg, a)
    bit = 1 << a
    out = {}
    for (sym, bits), c in w.terms.items():
        if bits & bit:
            k = (sym, bits ^ bit)
            out[k] = out.get(k, 0) + (-c if below(bits, a) & 1 else c)
    return w.like(out)


def ext_left(a, w):
    """Exterior left multiplication by the odd generator a (y_a wedge -)."""
    _check_index(w.alg, a)
    bit = 1 << a
    out = {}
    for (sym, bits), c in w.terms.items():
        if not bits & bit:
            k = (sym, bits | bit)
            out[k] = out.get(k, 0) + (-c if below(bits, a) & 1 else c)
    return w.like(out)


def even_left(a, w, power=1):
    """Commutative multiplication by an even generator (v_a); not for ENV."""
    out = {}
    for (sym, bits), c in w.terms.items():
        s = list(sym)
        s[a] += power
        out[(tuple(s), bits)] = c
    return w.like(out)


def even_diff(a, w):
    """d/dv_a on the even part (the operator realising mu_a)."""
    out = {}
    for (sym, bits), c in w.terms.items():
        if sym[a]:
            s = list(sym)
            s[a] -= 1
            k = (tuple(s), bits)
            out[k] = out.get(k, 0) + c * sym[a]
    return w.like(out)


def lie_odd(a, w):
    """L_a on the odd part: y^c -> -f_abc y^b, extended as an even derivation."""
    out = {}
    for b, c, f in w.alg.bracket(a):
        cbit, bbit = 1 << c, 1 << b
        for (sym, bits), coef in w.terms.items():
            if not bits & cbit:
                continue
            rest = bits ^ cbit
            if rest & bbit:
                continue
            s = below(bits, c) + below(rest, b)
            k = (sym, rest | bbit)
            out[k] = out.get(k, 0) + (coef * -f if not s & 1 else coef * f)
    return w.like(out)


def lie_even_comm(a, w):
    """L_a on the commutative even part: v^c -> -f_abc v^b."""
    out = {}
    for b, c, f in w.alg.bracket(a):
        for (sym, bits), coef in w.terms.items():
            if sym[c]:
                s = list(sym)
                s[c] -= 1
                s[b] += 1
                k = (tuple(s), bits)
                out[k] = out.get(k, 0) - coef * f * sym[c]
    return w.like(out)


def lie_deriv(a, w):
    """Lie derivative L_a; on ENV/NCW the enveloping part uses ad(u_a)."""
    _check_index(w.alg, a)
    if w.tag in (ENV, NCW):
        from .pbw import ad_u
        out = ad_u(a, w)
        return out + lie_odd(a, w) if w.tag == NCW else out
    if w.tag == SPH:
        from .cartan import sphere_lie
        return sphere_lie(a, w)
    if w.tag == TRIV:
        return w.like({})
    out = lie_odd(a, w)
    if w.tag in (SYM, W):
        out = out + lie_even_comm(a, w)
    return out


def koszul_d(w):
    """d = -1/2 f_abc y^b y^c iota_a on the exterior algebra."""
    if w.tag != EXT:
        raise TypeError("koszul_d expects an exterior element")
    out = w.like({})
    for a in range(w.n):
        ia = contract(a, w)
        if not ia:
            continue
        for b, c, f in w.alg.bracket(a):
            if b < c:
                # f_abc y^b y^c appears twice (b<c and c<b) with equal value
                out = out - ext_left(b, ext_left(c, ia)).scale(f)
    return out


def koszul_d_lie(w):
    """The same differential written as 1/2 y^a L_a."""
    out = w.like({})
    for a in range(w.n):
        out = out + ext_left(a, lie_deriv(a, w)).scale(Fraction(1, 2))
    return out


# ---------------------------------------------------------------------------
# basis enumeration

def sym_monomials(n, total):
    """All exponent vectors of length n with the given total degree, lexicographic."""
    if n == 0:
        return [()] if total == 0 else []
    out = []

    def rec(prefix, left, slots):
        if slots == 1:
            out.append(tuple(prefix + [left]))
            return
        for e in range(left, -1, -1):
            rec(prefix + [e], left - e, slots - 1)

    rec([], total, n)
    return out


def bitsets(n, k):
    return [sum(1 << i for i in combo) for combo in combinations(range(n), k)]


def basis_keys(tag, alg, max_degree, min_degree=0):
    """Basis monomials of W-degree in [min_degree, max_degree], deterministic order."""
    n = alg.dim
    has_even = NAMES[tag][0] is not None and tag != SPH
    has_odd = NAMES[tag][1] is not None
    keys = []
    for deg in range(min_degree, max_degree + 1):
        for k in range(deg // 2 + 1 if has_even else 1):
            j = deg - 2 * k
            if j < 0 or j > (n if has_odd else 0):
                continue
            for sym in sym_monomials(n, k) if has_even else [(0,) * _sym_len(tag, alg)]:
                for bits in bitsets(n, j):
                    keys.append((sym, bits))
    return keys


def basis(tag, alg, max_degree, min_degree=0):
    return [GradedElement(tag, alg, {k: Fraction(1)}) for k in basis_keys(tag, alg, max_degree, min_degree)]


# ---------------------------------------------------------------------------
# linear operators

class LinOperator:
    """A linear map on elements with a declared parity."""

    __slots__ = ("fn", "parity", "name")

    def __init__(self, fn, parity=0, name="op"):
        self.fn = fn
        self.parity = parity
        self.name = name

    def __call__(self, w):
        return self.fn(w)

    def __matmul__(self, other):
        return LinOperator(lambda w: self.fn(other.fn(w)), (self.parity + other.parity) % 2,
                           f"{self.name}∘{other.name}")

    def __add__(self, other):
        return LinOperator(lambda w: self.fn(w) + other.fn(w), self.parity, f"({self.name}+{other.name})")

    def __sub__(self, other):
        return LinOperator(lambda w: self.fn(w) - other.fn(w), self.parity, f"({self.name}-{other.name})")

    def __neg__(self):
        return LinOperator(lambda w: -self.fn(w), self.parity, f"-{self.name}")

    def scale(self, c):
        return LinOperator(lambda w: self.fn(w).scale(c), self.parity, f"{c}·{self.name}")

    def __repr__(self):
        return f"LinOperator({self.name}, parity={self.parity})"


def supercomm(A, B):
    """[A, B] = AB - (-1)^{|A||B|} BA."""
    sign = -1 if A.parity * B.parity % 2 else 1
    if sign == 1:
        fn = lambda w: A.fn(B.fn(w)) - B.fn(A.fn(w))
    else:
        fn = lambda w: A.fn(B.fn(w)) + B.fn(A.fn(w))
    return LinOperator(fn, (A.parity + B.parity) % 2, f"[{A.name},{B.name}]")


def zero_op(parity=0):
    return LinOperator(lambda w: w.scale(0), parity, "0")


def identity_op():
    return LinOperator(lambda w: w, 0, "id")


@dataclass
class Verdict:
    identity: str
    status: str
    degree: int = None
    algebra: str = None
    counterexample: str = None
    residual: str = None

    @property
    def passed(self):
        return self.status == "PASS"

    def __bool__(self):
        return self.passed

    def record(self):
        out = {"id": self.identity, "status": self.status}
        if self.algebra is not None:
            out["algebra"] = self.algebra
        if self.degree is not None:
            out["degree"] = self.degree
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample
        if self.residual is not None:
            out["residual"] = self.residual
        return out


def op_equal(A, B, max_degree=None, tag=None, alg=None, elements=None, identity="op_equal"):
    """Compare two operators on every basis monomial up to ``max_degree``.

    Either pass ``tag`` and ``alg`` (standard monomial basis) or an explicit
    list of basis ``elements``.  The first failing monomial in enumeration
    order is reported.
    """
    if elements is None:
        elements = basis(tag, alg, max_degree)
    for e in elements:
        diff = A(e) - B(e)
        if diff:
            return Verdict(identity, "FAIL", max_degree, getattr(alg, "name", None), repr(e), repr(diff))
    return Verdict(identity, "PASS", max_degree, getattr(alg, "name", None))


def iota_op(a):
    return LinOperator(lambda w: contract(a, w), 1, f"ι{a + 1}")


def lie_op(a):
    return LinOperator(lambda w: lie_deriv(a, w), 0, f"L{a + 1}")


def koszul_op():
    return LinOperator(koszul_d, 1, "d")
