"""Exact coefficient arithmetic over the rationals.

Rationals are plain ``fractions.Fraction`` values.  On top of them this module
provides sparse multivariate polynomials, truncated univariate power series and
a small dense matrix type with deterministic row reduction.
"""

from fractions import Fraction
from math import factorial


Q = Fraction


class BadRational(ValueError):
    pass


def parse_rational(text):
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int) and not isinstance(text, bool):
        return Fraction(text)
    if not isinstance(text, str):
        raise BadRational(f"not a rational: {text!r}")
    s = text.strip()
    num, sep, den = s.partition("/")
    try:
        p = int(num)
        q = int(den) if sep else 1
    except ValueError:
        raise BadRational(f"not a rational: {text!r}") from None
    if q <= 0:
        raise BadRational(f"denominator must be positive: {text!r}")
    return Fraction(p, q)


def render_rational(x):
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------------------
# multivariate polynomials

class Poly:
    """Sparse polynomial: exponent tuple -> Fraction."""

    __slots__ = ("variables", "terms")

    def __init__(self, variables, terms=None):
        self.variables = tuple(variables)
        clean = {}
        if terms:
            for e, c in terms.items():
                if c:
                    clean[tuple(e)] = Fraction(c)
        self.terms = clean

    @classmethod
    def const(cls, variables, c):
        n = len(variables)
        return cls(variables, {(0,) * n: c})

    @classmethod
    def var(cls, variables, i):
        e = [0] * len(variables)
        e[i] = 1
        return cls(variables, {tuple(e): 1})

    def _coerce(self, other):
        if isinstance(other, Poly):
            if other.variables != self.variables:
                raise ValueError("variable lists differ")
            return other
        return Poly.const(self.variables, other)

    def __add__(self, other):
        other = self._coerce(other)
        t = dict(self.terms)
        for e, c in other.terms.items():
            t[e] = t.get(e, 0) + c
        return Poly(self.variables, t)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.variables, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            other = Fraction(other)
            return Poly(self.variables, {e: c * other for e, c in self.terms.items()})
        other = self._coerce(other)
        t = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                t[e] = t.get(e, 0) + c1 * c2
        return Poly(self.variables, t)

    __rmul__ = __mul__

    def __pow__(self, k):
        out = Poly.const(self.variables, 1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.variables == other.variables and self.terms == other.terms
        try:
            return self.terms == Poly.const(self.variables, other).terms
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash((self.variables, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def degree(self):
        return max((sum(e) for e in self.terms), default=-1)

    def truncate(self, max_degree):
        return Poly(self.variables, {e: c for e, c in self.terms.items() if sum(e) <= max_degree})

    def homogeneous(self, k):
        return Poly(self.variables, {e: c for e, c in self.terms.items() if sum(e) == k})

    def diff(self, i):
        t = {}
        for e, c in self.terms.items():
            if e[i]:
                f = list(e)
                f[i] -= 1
                t[tuple(f)] = c * e[i]
        return Poly(self.variables, t)

    def coeff(self, exps):
        return self.terms.get(tuple(exps), Fraction(0))

    def constant(self):
        return self.coeff((0,) * len(self.variables))

    def evaluate(self, point):
        total = Fraction(0)
        for e, c in self.terms.items():
            term = c
            for x, k in zip(point, e):
                if k:
                    term *= Fraction(x) ** k
            total += term
        return total

    def substitute(self, images):
        """Replace variable i by the polynomial images[i]."""
        target = images[0].variables if images else self.variables
        out = Poly(target)
        for e, c in self.terms.items():
            term = Poly.const(target, c)
            for img, k in zip(images, e):
                if k:
                    term = term * img ** k
            out = out + term
        return out

    def __repr__(self):
        if not self.terms:
            return "0"
        out = ""
        for e in sorted(self.terms, key=lambda e: (sum(e), tuple(-x for x in e))):
            mono = " ".join(
                v if k == 1 else f"{v}^{k}" for v, k in zip(self.variables, e) if k
            )
            c = self.terms[e]
            a = render_rational(abs(c))
            body = (mono if a == "1" else f"{a}·{mono}") if mono else a
            if not out:
                out = ("-" if c < 0 else "") + body
            else:
                out += (" - " if c < 0 else " + ") + body
        return out


# ---------------------------------------------------------------------------
# truncated univariate series

class TruncSeries:
    """Power series in one variable, exact modulo var^(order+1)."""

    __slots__ = ("var", "order", "coeffs")

    def __init__(self, coeffs, order, var="s"):
        cs = [Fraction(c) for c in coeffs][: order + 1]
        cs += [Fraction(0)] * (order + 1 - len(cs))
        self.var = var
        self.order = order
        self.coeffs = tuple(cs)

    def _coerce(self, other):
        if isinstance(other, TruncSeries):
            return other
        return TruncSeries([other], self.order, self.var)

    def _order_with(self, other):
        return min(self.order, other.order)

    def __add__(self, other):
        other = self._coerce(other)
        n = self._order_with(other)
        return TruncSeries([a + b for a, b in zip(self.coeffs, other.coeffs)][: n + 1], n, self.var)

    __radd__ = __add__

    def __neg__(self):
        return TruncSeries([-c for c in self.coeffs], self.order, self.var)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, TruncSeries):
            return TruncSeries([c * Fraction(other) for c in self.coeffs], self.order, self.var)
        n = self._order_with(other)
        out = [Fraction(0)] * (n + 1)
        for i, a in enumerate(self.coeffs[: n + 1]):
            if a:
                for j, b in enumerate(other.coeffs[: n + 1 - i]):
                    out[i + j] += a * b
        return TruncSeries(out, n, self.var)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, TruncSeries):
            other = self._coerce(other)
        return self.order == other.order and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.order, self.coeffs))

    def __getitem__(self, k):
        return self.coeffs[k]

    def __len__(self):
        return len(self.coeffs)

    def __repr__(self):
        cs = ", ".join(render_rational(c) for c in self.coeffs)
        return f"TruncSeries({self.var}; {cs}; O({self.var}^{self.order + 1}))"

    def scale(self, a):
        """Series of s -> f(a*s)."""
        a = Fraction(a)
        return TruncSeries([c * a**k for k, c in enumerate(self.coeffs)], self.order, self.var)

    def shift_down(self):
        """Divide by the variable; requires a zero constant term. Loses one order."""
        if self.coeffs[0]:
            raise ZeroDivisionError("series has a nonzero constant term")
        return TruncSeries(self.coeffs[1:], self.order - 1, self.var)

    def inverse(self):
        c0 = self.coeffs[0]
        if not c0:
            raise ZeroDivisionError("series is not invertible")
        out = [1 / c0]
        for k in range(1, self.order + 1):
            acc = sum((self.coeffs[j] * out[k - j] for j in range(1, k + 1)), Fraction(0))
            out.append(-acc / c0)
        return TruncSeries(out, self.order, self.var)

    def __truediv__(self, other):
        if isinstance(other, TruncSeries):
            return self * other.inverse()
        return self * (1 / Fraction(other))

    def derivative(self):
        return TruncSeries([k * c for k, c in enumerate(self.coeffs)][1:], self.order - 1, self.var)

    def compose(self, inner):
        """self(inner(s)); inner must have zero constant term."""
        if inner.coeffs[0]:
            raise ValueError("inner series must vanish at 0")
        n = self._order_with(inner)
        out = TruncSeries([0], n, self.var)
        power = TruncSeries([1], n, self.var)
        for c in self.coeffs[: n + 1]:
            out = out + power * c
            power = power * inner
        return out

    def exp(self):
        if self.coeffs[0]:
            raise ValueError("exp needs a zero constant term to stay rational")
        return taylor_coeffs("exp", self.order).compose(self)

    def log(self):
        if self.coeffs[0] != 1:
            raise ValueError("log needs constant term 1")
        x = self - 1
        n = self.order
        log1p = TruncSeries([0] + [Fraction((-1) ** (k + 1), k) for k in range(1, n + 1)], n, self.var)
        return log1p.compose(x)


def _exp_series(order):
    return TruncSeries([Fraction(1, factorial(k)) for k in range(order + 1)], order)


def _sinh_half_ratio(order):
    # sinh(s/2)/(s/2) = sum (s/2)^(2k) / (2k+1)!
    cs = []
    for k in range(order + 1):
        cs.append(Fraction(1, 2**k * factorial(k + 1)) if k % 2 == 0 else Fraction(0))
    return TruncSeries(cs, order)


def _cosh_series(order):
    return TruncSeries(
        [Fraction(1, factorial(k)) if k % 2 == 0 else 0 for k in range(order + 1)], order
    )


def _g_series(order):
    # g(s) = (1 - e^{-s}) / s
    return TruncSeries([Fraction((-1) ** k, factorial(k + 1)) for k in range(order + 1)], order)


def _f_dyn(order):
    # f(s) = 1/s - (1/2) coth(s/2) = (1 - h(s)) / s  with  h(s) = (s/2) coth(s/2)
    n = order + 1
    h = _cosh_series(n).scale(Fraction(1, 2)) / _sinh_half_ratio(n)
    return (1 - h).shift_down()


TAYLOR = {
    "exp": _exp_series,
    "f_dyn": _f_dyn,
    "log_g": lambda order: _g_series(order).log(),
    "ratio_sinh": _sinh_half_ratio,
    "cosh": _cosh_series,
    "g": _g_series,
}


def taylor_coeffs(fn, order):
    """Exact Taylor coefficients at 0 of a named scalar function.

    ``ratio_sinh`` is sinh(s/2)/(s/2); ``log_g`` is the logarithm of
    g(s) = (1 - e^{-s})/s; ``f_dyn`` is 1/s - coth(s/2)/2.
    """
    if order < 0:
        raise ValueError("order must be non-negative")
    try:
        builder = TAYLOR[fn]
    except KeyError:
        raise ValueError(f"unknown series {fn!r}") from None
    return builder(order)


# ---------------------------------------------------------------------------
# matrices

class QMatrix:
    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries, cols=None):
        entries = [list(r) for r in entries]
        self.rows = len(entries)
        self.cols = len(entries[0]) if entries else (cols or 0)
        if any(len(r) != self.cols for r in entries):
            raise ValueError("ragged matrix")
        self.entries = entries

    @classmethod
    def zeros(cls, rows, cols, zero=Fraction(0)):
        return cls([[zero] * cols for _ in range(rows)], cols)

    @classmethod
    def identity(cls, n, one=Fraction(1), zero=Fraction(0)):
        return cls([[one if i == j else zero for j in range(n)] for i in range(n)], n)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __eq__(self, other):
        return isinstance(other, QMatrix) and self.entries == other.entries

    def __add__(self, other):
        return QMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)], self.cols)

    def __sub__(self, other):
        return QMatrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)], self.cols)

    def __neg__(self):
        return QMatrix([[-a for a in r] for r in self.entries], self.cols)

    def scale(self, c):
        return QMatrix([[a * c for a in r] for r in self.entries], self.cols)

    def __matmul__(self, other):
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        cols = list(zip(*other.entries)) if other.rows else [()] * other.cols
        out = []
        for r in self.entries:
            row = []
            for c in cols:
                acc = None
                for a, b in zip(r, c):
                    if a and b:
                        acc = a * b if acc is None else acc + a * b
                row.append(acc if acc is not None else r[0] * 0 if r else Fraction(0))
            out.append(row)
        return QMatrix(out, other.cols)

    def transpose(self):
        return QMatrix([list(c) for c in zip(*self.entries)], self.rows)

    def trace(self):
        acc = self.entries[0][0] * 0 if self.rows else Fraction(0)
        for i in range(min(self.rows, self.cols)):
            acc = acc + self.entries[i][i]
        return acc

    def map(self, fn):
        return QMatrix([[fn(a) for a in r] for r in self.entries], self.cols)

    def is_antisymmetric(self):
        return all(
            self.entries[i][j] == -self.entries[j][i]
            for i in range(self.rows)
            for j in range(self.cols)
        )

    def __repr__(self):
        return f"QMatrix({self.entries!r})"


def rref(M):
    """Reduced row echelon form with first-pivot selection; returns (rows, pivots)."""
    A = [[Fraction(x) for x in r] for r in (M.entries if isinstance(M, QMatrix) else M)]
    ncols = M.cols if isinstance(M, QMatrix) else (len(A[0]) if A else 0)
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(A)) if A[i][c]), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        piv = A[r][c]
        A[r] = [x / piv for x in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c]:
                k = A[i][c]
                A[i] = [x - k * y for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == len(A):
            break
    return A[:r], pivots


def rank(M):
    return len(rref(M)[1])


def kernel_basis(M):
    """Basis of the null space; one vector per free column, free entry set to 1."""
    ncols = M.cols if isinstance(M, QMatrix) else (len(M[0]) if M else 0)
    R, pivots = rref(M)
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for row, pc in zip(R, pivots):
            v[pc] = -row[fc]
        basis.append(v)
    return basis


# sparse elimination over dict vectors (key -> Fraction); keys must be mutually comparable

class SparseEchelon:
    """Incremental echelon form that remembers how each pivot row was combined."""

    def __init__(self):
        self.pivots = {}

    def reduce(self, vec, combo=None):
        v = {k: Fraction(c) for k, c in vec.items() if c}
        combo = dict(combo or {})
        while v:
            pk = min(v)
            if pk not in self.pivots:
                return v, combo, pk
            pv, pc = self.pivots[pk]
            f = v[pk] / pv[pk]
            for k, c in pv.items():
                x = v.get(k, 0) - f * c
                if x:
                    v[k] = x
                else:
                    v.pop(k, None)
            for k, c in pc.items():
                x = combo.get(k, 0) - f * c
                if x:
                    combo[k] = x
                else:
                    combo.pop(k, None)
        return v, combo, None

    def add(self, vec, combo=None):
        """Insert a vector; returns the combination if it reduced to zero, else None."""
        v, combo, pk = self.reduce(vec, combo)
        if pk is None:
            return combo
        self.pivots[pk] = (v, combo)
        return None

    def __len__(self):
        return len(self.pivots)


def sparse_kernel(vectors):
    """Kernel of the map e_i -> vectors[i], as dicts index -> coefficient."""
    ech = SparseEchelon()
    out = []
    for i, vec in enumerate(vectors):
        combo = ech.add(vec, {i: Fraction(1)})
        if combo is not None:
            out.append(combo)
    return out


def sparse_rank(vectors):
    ech = SparseEchelon()
    for vec in vectors:
        ech.add(vec)
    return len(ech)


def sparse_independent(vectors):
    """Indices of a greedy maximal independent subset, in input order."""
    ech = SparseEchelon()
    return [i for i, vec in enumerate(vectors) if ech.add(vec) is None]
