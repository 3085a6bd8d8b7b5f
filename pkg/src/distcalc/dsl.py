"""Expression language for distributions, test functions and catalog functions.

Grammar (``^`` binds tighter than application, ``*``/``/`` tighter than ``+``/``-``)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | primary
    primary := NUMBER ['i'] | NAME ['^' INT] ['(' groups ')'] | '(' expr ')'
    groups  := args (';' args)*
    args    := expr (',' expr)*

Parsing returns the canonical tree: numeric subtrees are folded into a
single literal and subtraction becomes addition of a negation.  ``format_expr``
prints numbers with 17 significant digits, so ``parse_expr(format_expr(e))``
reproduces ``canonical(e)`` exactly.
"""

from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass
from typing import Union

from . import catalog as cat
from . import schwartz as sw
from .distribution import core as dist
from .errors import DSLSyntaxError, TypeMismatch, UnknownName


# --- syntax tree ---------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: complex


@dataclass(frozen=True)
class Call:
    name: str
    power: int | None = None
    groups: tuple[tuple, ...] | None = None  # None: bare name, no parentheses


@dataclass(frozen=True)
class Bin:
    op: str  # '+', '-', '*', '/'
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Neg:
    operand: Expr


Expr = Union[Num, Call, Bin, Neg]

OPERATORS = {"D", "FT", "FTW", "translate", "reflect", "xmul", "modulate", "regular", "delta",
             "mollify"}
CATALOG_NAMES = {"H", "sign", "abs", "chi", "mono", "poly", "expabs", "gaussfn", "sinfn", "cosfn",
                 "spiky", "cauchy", "boxft", "expmono", "const", "warp", "one"}
TESTFN_NAMES = {"gauss", "polygauss", "bump"}
NUMERIC_NAMES = {"pi", "i", "sqrt", "exp"}
KNOWN = OPERATORS | CATALOG_NAMES | TESTFN_NAMES | NUMERIC_NAMES


# --- tokenizer -----------------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?i?)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*/^(),;])
""", re.VERBOSE)


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    offset: int


def _tokenize(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise DSLSyntaxError(_byte_offset(text, pos), "token", text)
        kind = m.lastgroup
        if kind != "ws":
            toks.append(_Tok(kind, m.group(), _byte_offset(text, pos)))
        pos = m.end()
    toks.append(_Tok("end", "", _byte_offset(text, len(text))))
    return toks


def _byte_offset(text: str, pos: int) -> int:
    return len(text[:pos].encode("utf-8"))


# --- parser --------------------------------------------------------------------

class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def fail(self, expected: str):
        raise DSLSyntaxError(self.tok.offset, expected, self.text)

    def accept(self, text: str) -> bool:
        if self.tok.kind == "op" and self.tok.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text: str):
        if not self.accept(text):
            self.fail(f"'{text}'")

    def parse(self) -> Expr:
        e = self.expr()
        if self.tok.kind != "end":
            self.fail("operator or end of input")
        return e

    def expr(self) -> Expr:
        e = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.tok.text
            self.i += 1
            e = Bin(op, e, self.term())
        return e

    def term(self) -> Expr:
        e = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.tok.text
            self.i += 1
            e = Bin(op, e, self.unary())
        return e

    def unary(self) -> Expr:
        if self.accept("-"):
            return Neg(self.unary())
        return self.primary()

    def primary(self) -> Expr:
        t = self.tok
        if t.kind == "num":
            self.i += 1
            if t.text.endswith("i"):
                return Num(complex(0.0, float(t.text[:-1])))
            return Num(complex(float(t.text), 0.0))
        if t.kind == "name":
            if t.text not in KNOWN:
                raise UnknownName(t.text)
            self.i += 1
            power = None
            if self.accept("^"):
                if self.tok.kind != "num" or not self.tok.text.isdigit():
                    self.fail("integer exponent")
                power = int(self.tok.text)
                self.i += 1
            groups = None
            if self.accept("("):
                groups = self.groups()
                self.expect(")")
            return Call(t.text, power, groups)
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        self.fail("expression")

    def groups(self) -> tuple:
        out = [self.args()]
        while self.accept(";"):
            out.append(self.args())
        return tuple(out)

    def args(self) -> tuple:
        out = [self.expr()]
        while self.accept(","):
            out.append(self.expr())
        return tuple(out)


def parse_raw(text: str) -> Expr:
    """Parse without canonicalization."""
    return _Parser(text).parse()


def parse_expr(text: str) -> Expr:
    return canonical(parse_raw(text))


# --- canonical form ------------------------------------------------------------

def _numeric_call(e: Call) -> complex | None:
    if e.power is not None:
        return None
    if e.groups is None:
        if e.name == "pi":
            return complex(math.pi)
        if e.name == "i":
            return 1j
        return None
    if e.name in ("sqrt", "exp") and len(e.groups) == 1 and len(e.groups[0]) == 1:
        a = e.groups[0][0]
        if isinstance(a, Num):
            v = a.value
            if e.name == "sqrt":
                return complex(math.sqrt(v.real)) if v.imag == 0 and v.real >= 0 else cmath.sqrt(v)
            return complex(math.exp(v.real)) if v.imag == 0 else cmath.exp(v)
    return None


def _fold(op: str, a: complex, b: complex) -> complex | None:
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if b == 0:
        return None
    return a / b


def _lit(v: complex) -> Num:
    # signed zeros would change branch cuts (sqrt) after a print/parse cycle
    v = complex(v)
    return Num(complex(v.real + 0.0, v.imag + 0.0))


def canonical(e: Expr) -> Expr:
    """Fold numeric subtrees, turn ``a - b`` into ``a + (-b)``, cancel double negation."""
    if isinstance(e, Num):
        return _lit(e.value)
    if isinstance(e, Neg):
        x = canonical(e.operand)
        if isinstance(x, Num):
            return _lit(-x.value)
        if isinstance(x, Neg):
            return x.operand
        return Neg(x)
    if isinstance(e, Call):
        groups = None if e.groups is None else tuple(tuple(canonical(a) for a in g) for g in e.groups)
        c = Call(e.name, e.power, groups)
        v = _numeric_call(c)
        return _lit(v) if v is not None else c
    left, right = canonical(e.left), canonical(e.right)
    if isinstance(left, Num) and isinstance(right, Num):
        v = _fold(e.op, left.value, right.value)
        if v is not None:
            return _lit(v)
    if e.op == "-":
        return canonical(Bin("+", left, Neg(right)))
    return Bin(e.op, left, right)


# --- formatting ----------------------------------------------------------------

def _fmt_real(v: float) -> str:
    return format(v, ".17g")


def format_number(z: complex) -> str:
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError("non-finite literal")
    if z.imag == 0:
        return _fmt_real(z.real)
    im = _fmt_real(abs(z.imag)) + "i"
    if z.real == 0:
        return ("-" if z.imag < 0 else "") + im
    return f"({_fmt_real(z.real)}{'-' if z.imag < 0 else '+'}{im})"


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def _prec(e: Expr) -> int:
    if isinstance(e, Bin):
        return _PREC[e.op]
    if isinstance(e, Neg):
        return 3
    if isinstance(e, Num):
        z = e.value
        return 3 if (z.imag != 0 and z.real == 0) or (z.imag == 0 and z.real < 0) else 4
    return 4


def format_expr(e: Expr) -> str:
    if isinstance(e, Num):
        return format_number(e.value)
    if isinstance(e, Call):
        s = e.name + (f"^{e.power}" if e.power is not None else "")
        if e.groups is not None:
            s += "(" + ";".join(",".join(format_expr(a) for a in g) for g in e.groups) + ")"
        return s
    if isinstance(e, Neg):
        inner = format_expr(e.operand)
        if _prec(e.operand) < 3 or (isinstance(e.operand, Num) and format_expr(e.operand).startswith("-")):
            inner = f"({inner})"
        return "-" + inner
    p = _PREC[e.op]
    left = format_expr(e.left)
    if _prec(e.left) < p:
        left = f"({left})"
    right = format_expr(e.right)
    if _prec(e.right) <= p and _prec(e.right) < 3:
        right = f"({right})"
    return f"{left} {e.op} {right}"


# --- elaboration ---------------------------------------------------------------

def _num_arg(v, what: str) -> complex:
    if not isinstance(v, complex):
        raise TypeMismatch(f"{what} must be a number")
    return v


def _real(v, what: str) -> float:
    v = _num_arg(v, what)
    if v.imag != 0:
        raise TypeMismatch(f"{what} must be real")
    return v.real


def _int(v, what: str) -> int:
    r = _real(v, what)
    if r != int(r) or r < 0:
        raise TypeMismatch(f"{what} must be a nonnegative integer")
    return int(r)


def _as_dist(v) -> dist.Distribution:
    if isinstance(v, dist.Distribution):
        return v
    if isinstance(v, cat.CatalogFunction):
        return dist.regular(v)
    if isinstance(v, _Weighted):
        return dist.Distribution(tuple(dist.RegularAtom(c, 0, f) for c, f in v.terms))
    raise TypeMismatch(f"expected a distribution, got {_kind(v)}")


@dataclass(frozen=True)
class _Weighted:
    """A linear combination of catalog functions (from ``poly``)."""

    terms: tuple


def _kind(v) -> str:
    if isinstance(v, complex):
        return "number"
    if isinstance(v, sw.TestFunction):
        return "test function"
    if isinstance(v, (cat.CatalogFunction, _Weighted)):
        return "catalog function"
    return "distribution"


def _flat(e: Call) -> list:
    if e.groups is None:
        return []
    return [a for g in e.groups for a in g]


def _call(e: Call):
    name = e.name
    if name in NUMERIC_NAMES:
        v = _numeric_call(e)
        if v is None:
            args = [evaluate(a) for a in _flat(e)]
            if len(args) != 1:
                raise TypeMismatch(f"{name} takes one numeric argument")
            z = _num_arg(args[0], name)
            v = cmath.sqrt(z) if name == "sqrt" else cmath.exp(z)
        return complex(v)
    if name == "D":
        args = _flat(e)
        if len(args) != 1:
            raise TypeMismatch("D takes one argument")
        n = 1 if e.power is None else e.power
        v = evaluate(args[0])
        if isinstance(v, sw.TestFunction):
            return v.derivative(n)
        return dist.derivative(_as_dist(v), n)
    if e.power is not None:
        raise TypeMismatch(f"only D takes an exponent, not {name}")
    if name == "warp":
        if e.groups is None or len(e.groups) != 2 or len(e.groups[0]) != 5 or len(e.groups[1]) != 1:
            raise TypeMismatch("warp(k, nu, sigma, shift, offset; base)")
        k, nu, sg, sh, off = (evaluate(a) for a in e.groups[0])
        base = evaluate(e.groups[1][0])
        if not isinstance(base, cat.CatalogFunction) or not base.is_plain:
            raise TypeMismatch("warp needs a plain catalog function")
        from dataclasses import replace
        return replace(base, xpow=_int(k, "k"), freq=_real(nu, "nu"), sigma=int(_real(sg, "sigma")),
                       shift=_real(sh, "shift"), offset=_real(off, "offset"))
    if name == "polygauss":
        if e.groups is None or not 1 <= len(e.groups) <= 4:
            raise TypeMismatch("polygauss(c0,...,cn; omega; alpha; center)")
        coeffs = [_num_arg(evaluate(a), "coefficient") for a in e.groups[0]]
        rest = [_real(evaluate(g[0]), "parameter") for g in e.groups[1:] if len(g) == 1]
        if len(rest) != len(e.groups) - 1:
            raise TypeMismatch("polygauss parameters are single numbers")
        omega, alpha, center = (rest + [0.0, 1.0, 0.0][len(rest):])[:3]
        return sw.polygauss(coeffs, omega, alpha, center)
    args = [evaluate(a) for a in _flat(e)]
    if name == "FT" or name == "FTW":
        if len(args) != 1:
            raise TypeMismatch(f"{name} takes one argument")
        if isinstance(args[0], sw.TestFunction):
            if name == "FTW":
                raise TypeMismatch("FTW applies to distributions")
            return sw.fourier_testfn(args[0])
        return dist.fourier(_as_dist(args[0]), rewrite=(name == "FT"))
    if name in ("translate", "modulate"):
        if len(args) != 2:
            raise TypeMismatch(f"{name}(e, c)")
        c = _real(args[1], "shift")
        if isinstance(args[0], sw.TestFunction) and name == "translate":
            return sw.scale_translate(args[0], 1.0, c)
        L = _as_dist(args[0])
        return dist.translate(L, c) if name == "translate" else dist.modulate(L, c)
    if name in ("reflect", "xmul"):
        if len(args) != 1:
            raise TypeMismatch(f"{name} takes one argument")
        if isinstance(args[0], sw.TestFunction) and name == "reflect":
            return sw.reflect(args[0])
        L = _as_dist(args[0])
        return dist.reflect(L) if name == "reflect" else dist.multiply_x(L)
    if name == "regular":
        if len(args) != 1:
            raise TypeMismatch("regular takes one catalog function")
        if not isinstance(args[0], (cat.CatalogFunction, _Weighted)):
            raise TypeMismatch("regular(...) needs a catalog function")
        return _as_dist(args[0])
    if name == "delta":
        a = _real(args[0], "location") if args else 0.0
        if len(args) > 1:
            raise TypeMismatch("delta takes one location")
        return dist.delta(a)
    if name == "mollify":
        if len(args) != 3 or not isinstance(args[0], sw.TestFunction):
            raise TypeMismatch("mollify(phi, k, c)")
        return sw.scale_translate(args[0], _real(args[1], "k"), _real(args[2], "c"))
    if name == "gauss":
        return sw.gauss(_real(args[0], "omega") if args else 0.0)
    if name == "bump":
        if len(args) not in (0, 2):
            raise TypeMismatch("bump(a, b)")
        return sw.bump(*(_real(a, "endpoint") for a in args)) if args else sw.bump()
    if name == "poly":
        return _Weighted(tuple(cat.polynomial([_num_arg(a, "coefficient") for a in args])))
    if name in ("mono", "spiky"):
        if len(args) != 1 and not (name == "spiky" and not args):
            raise TypeMismatch(f"{name}(n)")
        return cat.lookup(name, *(_int(a, "n") for a in args))
    if name == "expmono":
        if len(args) != 2:
            raise TypeMismatch("expmono(n, a)")
        return cat.lookup(name, _int(args[0], "n"), _real(args[1], "a"))
    if name == "const":
        if len(args) != 1:
            raise TypeMismatch("const(c)")
        return _Weighted(((_num_arg(args[0], "constant"), cat.lookup("const")),))
    try:
        return cat.lookup(name, *(_real(a, "parameter") for a in args))
    except (ValueError, KeyError) as exc:
        raise TypeMismatch(f"{name}: {exc}") from None


def _binary(op: str, a, b):
    if isinstance(a, complex) and isinstance(b, complex):
        v = _fold(op, a, b)
        if v is None:
            raise TypeMismatch("division by zero")
        return v
    if op in "+-":
        if isinstance(a, complex) or isinstance(b, complex):
            raise TypeMismatch(f"cannot add a number and a {_kind(b if isinstance(a, complex) else a)}")
        if isinstance(a, sw.TestFunction) or isinstance(b, sw.TestFunction):
            if not (isinstance(a, sw.TestFunction) and isinstance(b, sw.TestFunction)):
                raise TypeMismatch("cannot add a test function and a distribution")
            return a + b if op == "+" else a - b
        a, b = _as_dist(a), _as_dist(b)
        return a + b if op == "+" else a - b
    if op == "*":
        if isinstance(b, complex):
            a, b = b, a
        if not isinstance(a, complex):
            raise TypeMismatch("products need a numeric factor")
        if isinstance(b, sw.TestFunction):
            return b * a
        return _as_dist(b) * a
    if not isinstance(b, complex):
        raise TypeMismatch("can only divide by a number")
    if b == 0:
        raise TypeMismatch("division by zero")
    if isinstance(a, sw.TestFunction):
        return a / b
    return _as_dist(a) / b


def evaluate(e: Expr):
    """Evaluate a tree to a number, test function, catalog function or distribution."""
    if isinstance(e, Num):
        return complex(e.value)
    if isinstance(e, Neg):
        v = evaluate(e.operand)
        if isinstance(v, complex):
            return -v
        if isinstance(v, sw.TestFunction):
            return -v
        return -_as_dist(v)
    if isinstance(e, Call):
        return _call(e)
    return _binary(e.op, evaluate(e.left), evaluate(e.right))


def elaborate(e: Expr | str) -> dist.Distribution:
    if isinstance(e, str):
        e = parse_expr(e)
    return _as_dist(evaluate(e))


def testfn(e: Expr | str) -> sw.TestFunction:
    if isinstance(e, str):
        e = parse_expr(e)
    v = evaluate(e)
    if not isinstance(v, sw.TestFunction):
        raise TypeMismatch(f"expected a test function, got {_kind(v)}")
    return v


def catalog_function(e: Expr | str) -> cat.CatalogFunction:
    if isinstance(e, str):
        e = parse_expr(e)
    v = evaluate(e)
    if not isinstance(v, cat.CatalogFunction):
        raise TypeMismatch(f"expected a single catalog function, got {_kind(v)}")
    return v


# --- printing distributions ----------------------------------------------------

def _atom_expr(a) -> Expr:
    if isinstance(a, dist.PointAtom):
        leaf = Call("delta", None, ((Num(complex(float(a.location))),),))
    elif isinstance(a, dist.RegularAtom):
        leaf = Call("regular", None, ((Call(a.f.name),),))
    else:
        leaf = Call("FTW", None, ((distribution_expr(a.inner),),))
    if a.order:
        leaf = Call("D", a.order if a.order > 1 else None, ((leaf,),))
    return leaf


def distribution_expr(L: dist.Distribution) -> Expr:
    """A canonical tree that elaborates back to ``L``."""
    if not L.atoms:
        return Bin("*", Num(0j), Call("delta", None, ((Num(0j),),)))
    out = None
    for a in L.atoms:
        t = _atom_expr(a)
        if a.coeff != 1:
            t = Bin("*", Num(complex(a.coeff)), t)
        out = t if out is None else Bin("+", out, t)
    return out


def format_distribution(L: dist.Distribution) -> str:
    return format_expr(distribution_expr(L))
