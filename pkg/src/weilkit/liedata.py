"""Lie algebra data in an orthonormal basis.

A ``LieAlgebra`` holds totally antisymmetric rational structure constants
f[a][b][c] with [e_a, e_b] = f_abc e_c.  Indices are 0-based in code and
1-based in files and rendered output.
"""

import itertools
import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .ring import BadRational, Poly, QMatrix, parse_rational, taylor_coeffs

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib


class LieDataError(ValueError):
    pass


class JacobiViolation(LieDataError):
    pass


class NotTotallyAntisymmetric(LieDataError):
    pass


class BadIndex(LieDataError):
    pass


__all__ = [
    "LieAlgebra", "LieDataError", "JacobiViolation", "NotTotallyAntisymmetric",
    "BadIndex", "BadRational", "load_lie", "catalog", "check_invariants",
    "ad_matrix", "structure_series", "AdSeriesBundle", "mu_vars",
]


def _perm_sign(p):
    sign = 1
    p = list(p)
    for i in range(len(p)):
        for j in range(i + 1, len(p)):
            if p[i] > p[j]:
                sign = -sign
    return sign


def _dense(dim, entries):
    f = [[[Fraction(0)] * dim for _ in range(dim)] for _ in range(dim)]
    for (a, b, c), v in entries.items():
        f[a][b][c] = Fraction(v)
    return f


def check_invariants(dim, f):
    """Run the three structural checks on a dense 3-index array.

    Returns a dict mapping check name to None (pass) or a witness tuple.
    The checks are independent, so a corrupted array can fail several.
    """
    rng = range(dim)
    report = {"antisymmetric": None, "totally_antisymmetric": None, "jacobi": None}
    for a, b, c in itertools.product(rng, rng, rng):
        if report["antisymmetric"] is None and f[a][b][c] != -f[b][a][c]:
            report["antisymmetric"] = (a, b, c)
        if report["totally_antisymmetric"] is None and (
            f[a][b][c] != -f[a][c][b] or f[a][b][c] != f[b][c][a]
        ):
            report["totally_antisymmetric"] = (a, b, c)
    # sparse rows: nz[a][b] lists the r with f_abr != 0
    nz = [[[(r, f[a][b][r]) for r in rng if f[a][b][r]] for b in rng] for a in rng]
    for a, b, c, d in itertools.product(rng, rng, rng, rng):
        s = 0
        for x, y, z in ((a, b, c), (b, c, a), (c, a, b)):
            for r, v in nz[x][y]:
                w = f[r][z][d]
                if w:
                    s += v * w
        if s:
            report["jacobi"] = (a, b, c, d, s)
            break
    return report


@dataclass(frozen=True, eq=False)
class LieAlgebra:
    name: str
    dim: int
    entries: dict = field(repr=False)  # (a, b, c) -> Fraction, nonzero only

    def __post_init__(self):
        table = [[] for _ in range(self.dim)]
        for (a, b, c), v in sorted(self.entries.items()):
            table[a].append((b, c, v))
        object.__setattr__(self, "_table", table)

    def f(self, a, b, c):
        return self.entries.get((a, b, c), Fraction(0))

    def dense(self):
        return _dense(self.dim, self.entries)

    def bracket(self, a):
        """Nonzero (b, c, f_abc) for fixed a."""
        return self._table[a]

    def fdot(self):
        return sum((v * v for v in self.entries.values()), Fraction(0))

    def is_abelian(self):
        return not self.entries

    def __eq__(self, other):
        return isinstance(other, LieAlgebra) and self.dim == other.dim and self.entries == other.entries

    def __hash__(self):
        return hash((self.dim, frozenset(self.entries.items())))

    def validate(self):
        report = check_invariants(self.dim, self.dense())
        _raise_on(report)
        return self


def _raise_on(report):
    if report["totally_antisymmetric"] is not None or report["antisymmetric"] is not None:
        w = report["antisymmetric"] or report["totally_antisymmetric"]
        raise NotTotallyAntisymmetric(f"entries at f{tuple(i + 1 for i in w)} break total antisymmetry")
    if report["jacobi"] is not None:
        a, b, c, d, s = report["jacobi"]
        raise JacobiViolation(
            f"Jacobi identity fails for (a,b,c,d) = ({a + 1},{b + 1},{c + 1},{d + 1}): sum = {s}"
        )


def _from_entries(name, dim, listed):
    """Complete listed entries under total antisymmetry, rejecting conflicts."""
    full = {}
    for (a, b, c), v in listed:
        for idx in (a, b, c):
            if not 0 <= idx < dim:
                raise BadIndex(f"index {idx + 1} outside 1..{dim}")
        if len({a, b, c}) < 3:
            if v:
                raise NotTotallyAntisymmetric(f"f{(a + 1, b + 1, c + 1)} has a repeated index but is nonzero")
            continue
        for p in itertools.permutations(range(3)):
            key = tuple((a, b, c)[i] for i in p)
            val = v * _perm_sign(p)
            if key in full and full[key] != val:
                raise NotTotallyAntisymmetric(
                    f"f{tuple(i + 1 for i in key)} listed inconsistently ({full[key]} vs {val})"
                )
            full[key] = val
    entries = {k: v for k, v in full.items() if v}
    alg = LieAlgebra(name, dim, entries)
    return alg.validate()


def load_lie(doc):
    """Load Lie data from a path, JSON/TOML text or an already parsed mapping."""
    if isinstance(doc, Path) or (isinstance(doc, str) and "\n" not in doc and Path(doc).is_file()):
        path = Path(doc)
        text = path.read_text()
        data = _parse_text(text, prefer_toml=path.suffix.lower() == ".toml")
    elif isinstance(doc, str):
        data = _parse_text(doc)
    else:
        data = doc
    try:
        name = str(data.get("name", "custom"))
        dim = int(data["dim"])
        rows = data.get("f", [])
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise LieDataError(f"malformed Lie data: {exc}") from None
    if dim < 0:
        raise BadIndex("dimension must be non-negative")
    listed = []
    for row in rows:
        if not isinstance(row, (list, tuple)) or len(row) != 4:
            raise LieDataError(f"entry {row!r} is not [a, b, c, value]")
        try:
            a, b, c = (int(i) - 1 for i in row[:3])
        except (TypeError, ValueError):
            raise BadIndex(f"non-integer index in {row!r}") from None
        listed.append(((a, b, c), parse_rational(row[3])))
    return _from_entries(name, dim, listed)


def _parse_text(text, prefer_toml=False):
    parsers = [tomllib.loads, json.loads] if prefer_toml else [json.loads, tomllib.loads]
    err = None
    for p in parsers:
        try:
            return p(text)
        except Exception as exc:  # noqa: BLE001 - try the other format
            err = exc
    raise LieDataError(f"cannot parse Lie data: {err}")


# ---------------------------------------------------------------------------
# catalog

def _su2_entries(offset=0):
    out = {}
    for p in itertools.permutations(range(3)):
        out[tuple(offset + i for i in p)] = Fraction(_perm_sign(p))
    return out


def _so_entries(m):
    pairs = [(i, j) for i in range(m) for j in range(i + 1, m)]
    index = {p: k for k, p in enumerate(pairs)}

    def basis(i, j):
        M = [[0] * m for _ in range(m)]
        M[i][j], M[j][i] = 1, -1
        return M

    def mul(A, B):
        return [[sum(A[i][k] * B[k][j] for k in range(m)) for j in range(m)] for i in range(m)]

    out = {}
    for a, (i, j) in enumerate(pairs):
        for b, (k, l) in enumerate(pairs):
            A, B = basis(i, j), basis(k, l)
            AB, BA = mul(A, B), mul(B, A)
            C = [[AB[r][s] - BA[r][s] for s in range(m)] for r in range(m)]
            for (r, s), c in index.items():
                if C[r][s]:
                    out[(a, b, c)] = Fraction(C[r][s])
    return out


def catalog(name):
    key = name.strip().lower().replace(" ", "")
    m = re.fullmatch(r"abelian\(?(\d+)\)?", key)
    if m:
        k = int(m.group(1))
        return LieAlgebra(f"abelian({k})", k, {})
    if key in ("su2", "su(2)"):
        return LieAlgebra("su2", 3, _su2_entries())
    if key in ("so4", "so(4)"):
        ent = _su2_entries()
        ent.update(_su2_entries(3))
        return LieAlgebra("so4", 6, ent)
    if key in ("so5", "so(5)"):
        return LieAlgebra("so5", 10, _so_entries(5))
    raise LieDataError(f"unknown algebra {name!r}")


CATALOG_NAMES = ("su2", "so4", "so5", "abelian(4)")


def resolve(source):
    """A catalog name or a path to a Lie data file."""
    try:
        return catalog(source)
    except LieDataError:
        if Path(source).is_file():
            return load_lie(Path(source))
        raise


# ---------------------------------------------------------------------------
# ad_mu and the series built from it

def mu_vars(n):
    return tuple(f"mu{i + 1}" for i in range(n))


def ad_matrix(alg):
    """(ad_mu)_{ab} = sum_c mu_c f_{cba}: the e_a component of [mu, e_b]."""
    n = alg.dim
    vs = mu_vars(n)
    M = [[Poly(vs) for _ in range(n)] for _ in range(n)]
    for (c, b, a), v in alg.entries.items():
        M[a][b] = M[a][b] + Poly.var(vs, c) * v
    return QMatrix(M, n)


@dataclass(frozen=True)
class AdSeriesBundle:
    order: int
    T: QMatrix
    logJ: Poly
    Jhalf: Poly


def matrix_series(A, coeffs, n):
    """sum_k coeffs[k] A^k for a square matrix of polynomials; returns the matrix."""
    vs = A.entries[0][0].variables if n else ()
    zero = Poly(vs)
    one = Poly.const(vs, 1)
    out = QMatrix([[zero] * n for _ in range(n)], n)
    power = QMatrix([[one if i == j else zero for j in range(n)] for i in range(n)], n)
    for k, c in enumerate(coeffs):
        if k:
            power = power @ A
        if c:
            out = out + power.scale(c)
    return out


def poly_exp(p, order):
    """exp(p) truncated at total degree ``order``; p must have zero constant term."""
    if p.constant():
        raise ValueError("exp argument must vanish at the origin")
    out = Poly.const(p.variables, 1)
    term = Poly.const(p.variables, 1)
    for k in range(1, order + 1):
        term = (term * p).truncate(order) * Fraction(1, k)
        if not term:
            break
        out = out + term
    return out


def structure_series(alg, order):
    if order < 1:
        raise ValueError("order must be at least 1")
    n = alg.dim
    vs = mu_vars(n)
    A = ad_matrix(alg)
    if n and A.trace():
        raise LieDataError("ad_mu has nonzero trace; algebra is not unimodular")
    fc = taylor_coeffs("f_dyn", order).coeffs
    T = matrix_series(A, fc, n) if n else QMatrix([], 0)
    lg = taylor_coeffs("log_g", order).coeffs
    logJ = Poly(vs)
    power = None
    for k in range(1, order + 1):
        power = A if power is None else power @ A
        if lg[k] and n:
            logJ = logJ + power.trace() * lg[k]
    Jhalf = poly_exp(logJ * Fraction(1, 2), order)
    return AdSeriesBundle(order, T, logJ, Jhalf)
