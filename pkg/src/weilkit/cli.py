"""The ``weil`` command: Lie-data validation, an element expression language,
verification suites and small computations, with optional JSON reports.

Exit codes: 0 when every check passes, 1 when a check fails, 2 for usage or
input errors (unknown algebra, malformed Lie data, bad expressions).
"""

import argparse
import json
import random
import re
import sys
import time
from fractions import Fraction

from . import __version__
from .liedata import LieDataError, check_invariants, load_lie, resolve
from .multivec import (
    CL, ENV, EXT, NAMES, NCW, SPH, SYM, W, GradedElement, Verdict, basis,
)
from .ring import BadRational, QMatrix

SCHEMA = "weilkit-report/1"


class ParseError(ValueError):
    def __init__(self, message, position):
        super().__init__(f"{message} at position {position}")
        self.position = position


class IndexOutOfRange(ValueError):
    pass


class TagMismatch(ValueError):
    pass


# ---------------------------------------------------------------------------
# expressions
#
#   expr   := term (('+'|'-') term)*        a leading '-' is accepted too
#   term   := factor ('*' factor)*
#   factor := atom ('^' nat)?
#   atom   := rational | generator | '(' expr ')'

TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<gen>dn|[vyuxn])(?P<idx>\d+)|(?P<op>[-+*/^()]))")


def tokenize(text):
    toks, pos = [], 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = TOKEN.match(text, pos)
        if not m:
            start = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[start]!r}", start)
        start = m.start(m.lastgroup if m.lastgroup != "idx" else "gen")
        if m.group("num") is not None:
            toks.append(("num", int(m.group("num")), start))
        elif m.group("gen") is not None:
            toks.append(("gen", (m.group("gen"), int(m.group("idx"))), start))
        else:
            toks.append(("op", m.group("op"), start))
        pos = m.end()
    toks.append(("end", None, len(text)))
    return toks


class _Parser:
    def __init__(self, text, tag, alg):
        self.toks = tokenize(text)
        self.i = 0
        self.tag = tag
        self.alg = alg

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, op):
        t = self.take()
        if t[0] != "op" or t[1] != op:
            raise ParseError(f"expected {op!r}", t[2])

    def parse(self):
        e = self.expr()
        t = self.peek()
        if t[0] != "end":
            raise ParseError("unexpected trailing input", t[2])
        return e

    def expr(self):
        neg = False
        if self.peek()[:2] == ("op", "-"):
            self.take()
            neg = True
        out = self.term()
        if neg:
            out = -out
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            rhs = self.term()
            out = out + rhs if op == "+" else out - rhs
        return out

    def term(self):
        out = self.factor()
        while self.peek()[:2] == ("op", "*"):
            self.take()
            out = out * self.factor()
        return out

    def factor(self):
        base = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            t = self.take()
            if t[0] != "num":
                raise ParseError("expected a natural exponent", t[2])
            return base ** t[1]
        return base

    def atom(self):
        t = self.take()
        kind, val, pos = t
        if kind == "num":
            num = val
            if self.peek()[:2] == ("op", "/"):
                self.take()
                d = self.take()
                if d[0] != "num" or d[1] == 0:
                    raise ParseError("expected a positive denominator", d[2])
                return GradedElement.scalar(self.tag, self.alg, Fraction(num, d[1]))
            return GradedElement.scalar(self.tag, self.alg, num)
        if kind == "gen":
            return self.generator(val, pos)
        if kind == "op" and val == "(":
            e = self.expr()
            self.expect(")")
            return e
        raise ParseError("expected a number, generator or '('", pos)

    def generator(self, val, pos):
        letter, idx = val
        even, odd = NAMES[self.tag]
        bound = 3 if self.tag == SPH else self.alg.dim
        if letter not in (even, odd):
            raise TagMismatch(f"generator {letter}{idx} does not belong to {self.tag} (position {pos})")
        if not 1 <= idx <= bound:
            raise IndexOutOfRange(f"{letter}{idx}: index must be between 1 and {bound}")
        if letter == even:
            return GradedElement.even_gen(self.tag, self.alg, idx - 1)
        return GradedElement.odd_gen(self.tag, self.alg, idx - 1)


def parse_expr(text, tag, alg):
    """Parse an expression into an element of the algebra with the given tag."""
    out = _Parser(text, tag, alg).parse()
    if tag == SPH:
        from .cartan import sphere_normal
        out = sphere_normal(out)
    return out


def infer_tag(text):
    letters = {m.group(1) for m in re.finditer(r"(dn|[vyuxn])\d", text)}
    for tag in (SYM, EXT, W, ENV, CL, NCW, SPH):
        if letters <= {l for l in NAMES[tag] if l}:
            return tag
    raise TagMismatch(f"generators {sorted(letters)} do not fit one algebra")


# ---------------------------------------------------------------------------
# suites

def _default_degree(alg):
    return 6 if alg.name == "su2" else 4


def _clifford_samples(alg, count, seed):
    """Random pairs of Clifford elements with small rational coefficients."""
    rng = random.Random(seed)
    keys = [e for e in basis(CL, alg, alg.dim)]

    def rand():
        out = GradedElement.zero(CL, alg)
        for e in rng.sample(keys, min(3, len(keys))):
            out = out + e.scale(Fraction(rng.randint(-3, 3), rng.randint(1, 3)))
        return out
    return [(rand(), rand()) for _ in range(count)]


def random_skew(n, rng):
    while True:
        M = [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                x = Fraction(rng.randint(-4, 4), rng.randint(1, 3))
                M[i][j], M[j][i] = x, -x
        S = QMatrix(M, n)
        from .clifford import pfaffian
        if pfaffian(S):
            return S


def suite_core(alg, deg):
    from .clifford import cl_mul, cl_mul_oracle, g_and_gamma
    from .pbw import is_central
    from .weil import dirac, dirac_square_formula, ghat_suite, homology, nc_weil_d, nc_weil_d_formula
    out = []
    for tag in (EXT, W, NCW):
        d = deg if tag != NCW or alg.dim <= 3 else min(deg, 4)
        out.extend(ghat_suite(tag, alg, d))
    if alg.dim <= 4:
        pairs = [(a, b) for a in basis(CL, alg, alg.dim) for b in basis(CL, alg, alg.dim)]
    else:
        pairs = _clifford_samples(alg, 200, 7)
    bad = next(((a, b) for a, b in pairs if cl_mul(a, b) != cl_mul_oracle(a, b)), None)
    out.append(Verdict("kostant=oracle", "FAIL" if bad else "PASS", None, alg.name,
                       None if bad is None else f"{bad[0]!r} , {bad[1]!r}"))
    _, gamma = g_and_gamma(alg)
    ff = sum(f * f for f in alg.entries.values())
    g2 = cl_mul(gamma, gamma)
    ok = g2 == GradedElement.scalar(CL, alg, Fraction(-ff, 48))
    out.append(Verdict("gamma^2=-ff/48", "PASS" if ok else "FAIL", None, alg.name, None, None if ok else repr(g2)))
    D = dirac(alg)
    D2 = D * D
    ok = D2 == dirac_square_formula(alg)
    out.append(Verdict("D^2 two routes", "PASS" if ok else "FAIL", None, alg.name, None, None if ok else repr(D2)))
    out.append(Verdict("D^2 central", "PASS" if is_central(D2) else "FAIL", None, alg.name))
    nd = min(deg, 6) if alg.dim <= 3 else min(deg, 3)
    for e in basis(NCW, alg, nd):
        r = nc_weil_d(e) - nc_weil_d_formula(e)
        if r:
            out.append(Verdict("ncweil_d two routes", "FAIL", nd, alg.name, repr(e), repr(r)))
            break
    else:
        out.append(Verdict("ncweil_d two routes", "PASS", nd, alg.name))
    if alg.dim <= 6:
        h = homology("EXT_koszul", alg)
        out.append(Verdict(f"H(ext)={tuple(h)}", "PASS" if h[0] == 1 else "FAIL", None, alg.name))
        h = homology("W_full", alg, min(deg, 5))
        ok = h[0] == 1 and not any(h[1:])
        out.append(Verdict(f"H(weil)={tuple(h)}", "PASS" if ok else "FAIL", min(deg, 5), alg.name))
        h = homology("CL_adgamma", alg)
        ok = not any(h) or alg.is_abelian()
        out.append(Verdict(f"H(cl,ad gamma)={tuple(h)}", "PASS" if ok else "FAIL", None, alg.name))
    return out


def suite_duflo(alg, deg, order):
    from .duflo import (
        DufloContext, casimir, cdyb_check, chain_check, dlogj_check, duflo_ring_check,
        q_triangular_check,
    )
    ctx = DufloContext.build(alg, order)
    out = [chain_check(ctx, deg), q_triangular_check(ctx, deg)]
    if not alg.is_abelian():
        # flipping the sign of T must break the chain map
        lock = chain_check(ctx.with_flipped_T(), deg)
        out.append(Verdict("T sign lock", "FAIL" if lock else "PASS", deg, alg.name))
    if order >= 2:
        out.append(cdyb_check(alg, order))
        out.append(dlogj_check(alg, order))
    lam = casimir(alg, SYM)
    for k in (2, 3):
        if 2 * k <= order:
            out.append(duflo_ring_check(ctx, lam ** (k - 1), lam))
    return out


def suite_cartan(alg, deg):
    from .cartan import (
        COMM, NC, ExteriorGDA, TrivialGDA, WeilGDA, d_squared_check, gda_axiom_suite,
        twisted_d_check, weil_vs_cartan_check,
    )
    d = min(deg, 5)
    out = []
    for B in (TrivialGDA(alg), ExteriorGDA(alg)):
        for m in (COMM, NC):
            out.append(weil_vs_cartan_check(m, B, d if alg.dim <= 3 else min(d, 3)))
            out.append(d_squared_check(m, B, d if alg.dim <= 3 else min(d, 3)))
        out.append(twisted_d_check(B, alg.dim))
        out.extend(gda_axiom_suite(B, min(d, 3), 2))
    out.extend(gda_axiom_suite(WeilGDA(alg), min(d, 3), 2))
    return out


def suite_sphere(alg, deg, order):
    from .cartan import COMM, SphereGDA, equivariant_cohomology, sphere_suite, twisted_d_check
    from .duflo import DufloContext
    if alg.name != "su2":
        raise LieDataError("the sphere suite runs on su2 only")
    rep = sphere_suite(DufloContext.build(alg, max(order, 4)))
    out = list(rep.steps)
    out.append(Verdict(f"sphere: Duf(lambda) constant = {rep.duflo_constant}", "PASS", None, alg.name))
    S = SphereGDA(alg, weight=3)
    out.append(twisted_d_check(S, 2))
    bt = equivariant_cohomology(COMM, S, min(deg, 6))
    ok = all(b == (1 if k % 2 == 0 else 0) for k, b in enumerate(bt.interior()))
    out.append(Verdict(f"H_G(S2)={tuple(bt.betti)}", "PASS" if ok else "FAIL", min(deg, 6), alg.name))
    return out


def suite_clifford(alg, deg):
    from .clifford import berezin_check, di_check, tau_symbol_check
    rng = random.Random(2024)
    out = []
    for n in (4, 6):
        for _ in range(10):
            v = berezin_check(random_skew(n, rng))
            if not v:
                out.append(v)
                break
        else:
            out.append(Verdict(f"berezin {n}x{n} x10", "PASS", None, None))
    block2 = QMatrix([[0, 1], [-1, 0]], 2)
    block4 = QMatrix([[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 2], [0, 0, -2, 0]], 4)
    out.append(di_check(block2, 6))
    out.append(di_check(block4, 6))
    if alg.name == "su2":
        out.append(tau_symbol_check(alg, [0, 0, 1], 6))
        out.append(tau_symbol_check(alg, [1, 1, 0], 6))
    return out


SUITES = ("core", "duflo", "cartan", "sphere", "clifford")


def run_suite(name, alg, deg, order):
    if name == "core":
        return suite_core(alg, deg)
    if name == "duflo":
        return suite_duflo(alg, deg, order)
    if name == "cartan":
        return suite_cartan(alg, deg)
    if name == "sphere":
        return suite_sphere(alg, deg, order)
    if name == "clifford":
        return suite_clifford(alg, deg)
    raise ValueError(name)


# ---------------------------------------------------------------------------
# reports

def report(command, alg, params, checks, timing=None):
    rep = {
        "schema": SCHEMA,
        "version": __version__,
        "command": command,
        "algebra": alg.name if alg is not None else None,
        "parameters": params,
        "checks": [c.record() if isinstance(c, Verdict) else c for c in checks],
    }
    if timing is not None:
        rep["seconds"] = round(timing, 3)
    return rep


def _emit(args, rep, lines):
    for line in lines:
        print(line)
    if getattr(args, "json", None):
        text = json.dumps(rep, indent=2, sort_keys=False) + "\n"
        if args.json == "-":
            sys.stdout.write(text)
        else:
            with open(args.json, "w", encoding="utf-8") as fh:
                fh.write(text)


def _status_lines(checks):
    out = []
    for c in checks:
        line = f"{c.status:4}  {c.identity}"
        if c.degree is not None:
            line += f"  (deg {c.degree})"
        if not c.passed and c.residual:
            line += f"\n      residual: {c.residual[:400]}"
        if not c.passed and c.counterexample:
            line += f"\n      at: {c.counterexample[:200]}"
        out.append(line)
    return out


# ---------------------------------------------------------------------------
# commands

def cmd_validate(args):
    try:
        alg = resolve(args.source)
    except LieDataError as exc:
        print(f"INVALID  {type(exc).__name__}: {exc}")
        _emit(args, report("validate", None, {"source": args.source},
                           [{"id": "load", "status": "FAIL", "error": type(exc).__name__, "message": str(exc)}]), [])
        return 1
    rep = check_invariants(alg.dim, alg.dense())
    checks = [Verdict(k, "PASS" if v is None else "FAIL", None, alg.name, None if v is None else str(v))
              for k, v in rep.items()]
    _emit(args, report("validate", alg, {"source": args.source}, checks),
          [f"{alg.name}: dim {alg.dim}, f.f = {alg.fdot()}"] + _status_lines(checks))
    return 0 if all(checks) else 1


def cmd_verify(args):
    alg = resolve(args.alg)
    deg = args.deg if args.deg is not None else _default_degree(alg)
    order = args.order if args.order is not None else max(deg, 2)
    t0 = time.perf_counter()
    checks = []
    for s in args.suite:
        checks.extend(run_suite(s, alg, deg, order))
    elapsed = time.perf_counter() - t0 if args.timing else None
    params = {"suites": args.suite, "degree": deg, "order": order}
    _emit(args, report("verify", alg, params, checks, elapsed), _status_lines(checks))
    return 0 if all(checks) else 1


def _context(alg, order, needed):
    from .duflo import DufloContext
    return DufloContext.build(alg, order if order is not None else max(needed, 2))


def cmd_duflo(args):
    from .duflo import _v_degree, duflo_map
    alg = resolve(args.alg)
    p = parse_expr(args.expr, SYM, alg)
    out = duflo_map(_context(alg, args.order, _v_degree(p)), p)
    print(out.to_expr())
    _emit(args, report("duflo", alg, {"expr": args.expr, "order": args.order},
                       [{"id": "duflo", "status": "PASS", "value": out.to_expr()}]), [])
    return 0


def cmd_quantize(args):
    from .duflo import _v_degree, quantize
    alg = resolve(args.alg)
    w = parse_expr(args.expr, W, alg)
    out = quantize(_context(alg, args.order, _v_degree(w)), w)
    print(out.to_expr())
    _emit(args, report("quantize", alg, {"expr": args.expr, "order": args.order},
                       [{"id": "quantize", "status": "PASS", "value": out.to_expr()}]), [])
    return 0


def cmd_cohomology(args):
    from .weil import homology
    alg = resolve(args.alg)
    deg = args.deg if args.deg is not None else _default_degree(alg)
    if args.space == "ext":
        betti, note = homology("EXT_koszul", alg), "exterior algebra, Koszul differential"
    elif args.space == "cl":
        betti, note = homology("CL_adgamma", alg), "Clifford algebra, ad(gamma), by filtration degree"
    elif args.space == "weil":
        betti, note = homology("W_full", alg, deg), f"Weil algebra truncated at degree {deg} (top degree dropped)"
    else:
        from .cartan import COMM, NC, SphereGDA, equivariant_cohomology
        if alg.name != "su2":
            raise LieDataError("the sphere model needs su2")
        bt = equivariant_cohomology(NC if args.model == "NC" else COMM, SphereGDA(alg, weight=args.weight), deg)
        betti, note = bt.betti, f"equivariant, {args.model} Cartan model, degree {deg} is the truncation boundary"
    rec = {"id": f"betti[{args.space}]", "status": "PASS", "betti": list(betti), "note": note}
    _emit(args, report("cohomology", alg, {"space": args.space, "degree": deg}, [rec]),
          [f"{args.space}: {' '.join(str(b) for b in betti)}   ({note})"])
    return 0


def cmd_casimir(args):
    from .duflo import DufloContext, casimir, duflo_map
    from .pbw import is_central, sym_map
    from .weil import dirac
    alg = resolve(args.alg)
    lam = casimir(alg, SYM)
    ctx = DufloContext.build(alg, 2)
    duf = duflo_map(ctx, lam)
    D = dirac(alg)
    lines = [
        f"lambda      = {lam.to_expr()}",
        f"sym(lambda) = {sym_map(lam).to_expr()}",
        f"Duf(lambda) = {duf.to_expr()}",
        f"central     = {is_central(duf)}",
        f"D^2         = {(D * D).to_expr()}",
    ]
    _emit(args, report("casimir", alg, {}, [{"id": "casimir", "status": "PASS", "duflo": duf.to_expr()}]), lines)
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="weil", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"weil {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--json", metavar="FILE", help="write a JSON report ('-' for stdout)")

    sp = sub.add_parser("validate", help="check Lie data (file path or catalog name)")
    sp.add_argument("source")
    common(sp)
    sp.set_defaults(fn=cmd_validate)

    sp = sub.add_parser("verify", help="run verification suites")
    sp.add_argument("--alg", required=True)
    sp.add_argument("--suite", action="append", choices=SUITES, required=True)
    sp.add_argument("--deg", type=int)
    sp.add_argument("--order", type=int)
    sp.add_argument("--timing", action="store_true", help="record wall time in the report")
    common(sp)
    sp.set_defaults(fn=cmd_verify)

    for name, fn, helptext in (("duflo", cmd_duflo, "apply the Duflo map to a polynomial in v"),
                               ("quantize", cmd_quantize, "apply the quantization map to a Weil element")):
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("--alg", required=True)
        sp.add_argument("--expr", required=True)
        sp.add_argument("--order", type=int)
        common(sp)
        sp.set_defaults(fn=fn)

    sp = sub.add_parser("cohomology", help="Betti numbers of a truncated complex")
    sp.add_argument("--alg", required=True)
    sp.add_argument("--space", choices=("ext", "cl", "weil", "sphere"), required=True)
    sp.add_argument("--deg", type=int)
    sp.add_argument("--model", choices=("COMM", "NC"), default="COMM")
    sp.add_argument("--weight", type=int, default=3, help="sphere polynomial weight cap")
    common(sp)
    sp.set_defaults(fn=cmd_cohomology)

    sp = sub.add_parser("casimir", help="quadratic Casimir, its Duflo image and the Dirac square")
    sp.add_argument("--alg", required=True)
    common(sp)
    sp.set_defaults(fn=cmd_casimir)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        return args.fn(args)
    except (LieDataError, ParseError, IndexOutOfRange, TagMismatch, BadRational, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # truncation and invariance errors are input errors too
        from .duflo import NotInvariant, TruncationTooLow
        if isinstance(exc, (NotInvariant, TruncationTooLow)):
            print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
            return 2
        raise


if __name__ == "__main__":
    sys.exit(main())
