"""Exact rational-function expressions over jet coordinates.

An :class:`Expr` is a single fraction ``num/den`` of integer-coefficient
polynomials in the variables ``x``, ``y<i>_<r>`` and free auxiliary symbols.
Fractions are kept fully reduced with a positive leading denominator
coefficient, so equal rational functions have identical representations.

Monomials are packed into Python integers (16 bits of exponent per variable),
which turns monomial multiplication into integer addition.
"""

from __future__ import annotations

import contextvars
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import flint

__all__ = [
    "VarId",
    "X",
    "jet",
    "aux",
    "Poly",
    "Expr",
    "ParseError",
    "SyntacticOnlyError",
    "ExpansionLimitError",
    "parse",
    "partial",
    "is_zero",
    "max_degree",
    "ZERO",
    "ONE",
]

_BITS = 16
_MASK = (1 << _BITS) - 1

#: Optional cap on the total degree of any polynomial produced by a product.
max_degree: contextvars.ContextVar[int | None] = contextvars.ContextVar(
    "odeinv_max_degree", default=None
)


class ExpansionLimitError(ArithmeticError):
    """A product exceeded the configured total-degree cap."""


class SyntacticOnlyError(ValueError):
    """Zero test requested on an expression that still carries auxiliary symbols."""


class ParseError(ValueError):
    def __init__(self, message: str, pos: int, text: str = ""):
        self.pos = pos
        self.text = text
        super().__init__(f"{message} at position {pos}")

    def annotated(self) -> str:
        if not self.text:
            return str(self)
        return f"{self}\n  {self.text}\n  {' ' * self.pos}^"


@dataclass(frozen=True)
class VarId:
    """A coordinate: ``x``, the jet variable ``y<i>_<r>``, or an auxiliary symbol."""

    kind: str  # "x" | "jet" | "aux"
    i: int = 0
    r: int = 0
    name: str = ""

    @property
    def sort_key(self) -> tuple:
        return ({"x": 0, "jet": 1, "aux": 2}[self.kind], self.i, self.r, self.name)

    def __lt__(self, other: VarId) -> bool:
        return self.sort_key < other.sort_key

    def __str__(self) -> str:
        if self.kind == "x":
            return "x"
        if self.kind == "jet":
            return f"y{self.i}_{self.r}"
        return self.name


X = VarId("x")


def jet(i: int, r: int) -> VarId:
    return VarId("jet", i, r)


_JET_RE = re.compile(r"y(\d+)_(\d+)\Z")


def aux(name: str) -> VarId:
    if name == "x" or _JET_RE.match(name):
        raise ValueError(f"auxiliary name {name!r} collides with jet syntax")
    return VarId("aux", name=name)


# Append-only interning table; indices only affect the packed encoding, never
# printed output or canonical forms.
_index: dict[VarId, int] = {}
_vars: list[VarId] = []


def _var_index(v: VarId) -> int:
    idx = _index.get(v)
    if idx is None:
        idx = _index.setdefault(v, len(_vars))
        if idx == len(_vars):
            _vars.append(v)
    return idx


def _unpack(mono: int) -> dict[int, int]:
    out = {}
    idx = 0
    while mono:
        e = mono & _MASK
        if e:
            out[idx] = e
        mono >>= _BITS
        idx += 1
    return out


def _mono_degree(mono: int) -> int:
    d = 0
    while mono:
        d += mono & _MASK
        mono >>= _BITS
    return d


def _divides(a: int, b: int) -> bool:
    """True if monomial ``a`` divides ``b``."""
    while a:
        if (a & _MASK) > (b & _MASK):
            return False
        a >>= _BITS
        b >>= _BITS
    return True


def _mono_gcd(a: int, b: int) -> int:
    g = 0
    shift = 0
    while a and b:
        g |= min(a & _MASK, b & _MASK) << shift
        a >>= _BITS
        b >>= _BITS
        shift += _BITS
    return g


def _mono_key(mono: int) -> tuple:
    """Graded order key with the global variable order (x < y1_0 < ... < aux)."""
    exps = sorted(((_vars[i], e) for i, e in _unpack(mono).items()), reverse=True)
    return (sum(e for _, e in exps), tuple((v.sort_key, e) for v, e in exps))


class Poly:
    """Sparse integer polynomial: ``{packed monomial: coefficient}``."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict[int, int] | None = None):
        self.terms = terms if terms is not None else {}

    @classmethod
    def const(cls, c: int) -> Poly:
        return cls({0: c} if c else {})

    @classmethod
    def var(cls, v: VarId) -> Poly:
        return cls({1 << (_BITS * _var_index(v)): 1})

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        return isinstance(other, Poly) and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def is_const(self) -> bool:
        t = self.terms
        return not t or (len(t) == 1 and 0 in t)

    def const_value(self) -> int:
        return self.terms.get(0, 0)

    def __add__(self, other: Poly) -> Poly:
        if len(self.terms) < len(other.terms):
            self, other = other, self
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return Poly(out)

    def __neg__(self) -> Poly:
        return Poly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other: Poly) -> Poly:
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m, 0) - c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return Poly(out)

    def scale(self, c: int) -> Poly:
        if not c:
            return Poly()
        return Poly({m: c * v for m, v in self.terms.items()})

    def __mul__(self, other: Poly) -> Poly:
        a, b = self.terms, other.terms
        if not a or not b:
            return Poly()
        if len(a) < len(b):
            a, b = b, a
        if len(b) == 1:
            (mb, cb), = b.items()
            out = {ma + mb: ca * cb for ma, ca in a.items()}
        else:
            out = {}
            get = out.get
            for mb, cb in b.items():
                for ma, ca in a.items():
                    m = ma + mb
                    out[m] = get(m, 0) + ca * cb
            out = {m: c for m, c in out.items() if c}
        cap = max_degree.get()
        if cap is not None and out and max(map(_mono_degree, out)) > cap:
            raise ExpansionLimitError(f"polynomial degree exceeds cap {cap}")
        return Poly(out)

    def __pow__(self, n: int) -> Poly:
        if n < 0:
            raise ValueError("negative polynomial power")
        result = Poly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def diff(self, idx: int) -> Poly:
        shift = _BITS * idx
        unit = 1 << shift
        out = {}
        for m, c in self.terms.items():
            e = (m >> shift) & _MASK
            if e:
                out[m - unit] = c * e
        return Poly(out)

    def content(self) -> int:
        g = 0
        for c in self.terms.values():
            g = math.gcd(g, c)
            if g == 1:
                break
        return g

    def exact_div_int(self, c: int) -> Poly:
        return Poly({m: v // c for m, v in self.terms.items()})

    def exact_div_mono(self, mono: int) -> Poly:
        return Poly({m - mono: v for m, v in self.terms.items()})

    def var_indices(self) -> set[int]:
        out: set[int] = set()
        for m in self.terms:
            out.update(_unpack(m))
        return out

    def variables(self) -> set[VarId]:
        return {_vars[i] for i in self.var_indices()}

    def total_degree(self) -> int:
        return max((_mono_degree(m) for m in self.terms), default=0)

    def degree_in(self, v: VarId) -> int:
        idx = _index.get(v)
        if idx is None:
            return 0
        shift = _BITS * idx
        return max(((m >> shift) & _MASK for m in self.terms), default=0)

    def leading_coeff(self) -> int:
        if len(self.terms) == 1:
            return next(iter(self.terms.values()))
        m = max(self.terms, key=_mono_key)
        return self.terms[m]

    def sorted_terms(self) -> list[tuple[int, int]]:
        return sorted(self.terms.items(), key=lambda t: _mono_key(t[0]), reverse=True)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for mono, c in self.sorted_terms():
            factors = []
            for v, e in sorted(((_vars[i], e) for i, e in _unpack(mono).items())):
                factors.append(str(v) if e == 1 else f"{v}^{e}")
            mag = abs(c)
            if factors:
                body = "*".join(factors)
                text = body if mag == 1 else f"{mag}*{body}"
            else:
                text = str(mag)
            if not parts:
                parts.append(text if c > 0 else f"-{text}")
            else:
                parts.append(f"+ {text}" if c > 0 else f"- {text}")
        return " ".join(parts)

    __repr__ = __str__


@lru_cache(maxsize=None)
def _flint_ctx(n: int):
    return flint.fmpz_mpoly_ctx.get(("v", n), "lex")


def _to_flint(p: Poly, ctx, idxs: list[int]):
    shifts = [_BITS * i for i in idxs]
    return ctx.from_dict(
        {tuple((m >> s) & _MASK for s in shifts): c for m, c in p.terms.items()}
    )


def _from_flint(q, idxs: list[int]) -> Poly:
    shifts = [_BITS * i for i in idxs]
    out = {}
    for exps, c in q.to_dict().items():
        m = 0
        for e, s in zip(exps, shifts):
            m |= int(e) << s
        out[m] = int(c)
    return Poly(out)


def _reduce(num: Poly, den: Poly) -> tuple[Poly, Poly]:
    """Cancel the polynomial gcd of ``num`` and ``den`` (``num`` nonzero)."""
    if den.is_const():
        d = den.const_value()
        g = math.gcd(num.content(), d)
        if d < 0:
            g = -g
        if g == 1:
            return num, den
        return num.exact_div_int(g), Poly.const(d // g)
    if len(den.terms) == 1:
        (dm, dc), = den.terms.items()
        mg = dm
        for m in num.terms:
            mg = _mono_gcd(mg, m)
            if not mg:
                break
        g = math.gcd(num.content(), dc)
        if mg:
            num, den = num.exact_div_mono(mg), den.exact_div_mono(mg)
        if g != 1:
            num, den = num.exact_div_int(g), den.exact_div_int(g)
        return num, den
    idxs = sorted(num.var_indices() | den.var_indices())
    ctx = _flint_ctx(len(idxs))
    a, b = _to_flint(num, ctx, idxs), _to_flint(den, ctx, idxs)
    g = a.gcd(b)
    if g.is_one():
        return num, den
    return _from_flint(a / g, idxs), _from_flint(b / g, idxs)


def _simple(p: Poly) -> bool:
    return len(p.terms) == 1


def _is_unit(p: Poly) -> bool:
    return p.is_const() and abs(p.const_value()) == 1


def _pgcd(p: Poly, q: Poly) -> Poly:
    idxs = sorted(p.var_indices() | q.var_indices())
    ctx = _flint_ctx(len(idxs))
    return _from_flint(_to_flint(p, ctx, idxs).gcd(_to_flint(q, ctx, idxs)), idxs)


def _pdiv(p: Poly, q: Poly) -> Poly:
    """Exact quotient ``p / q``."""
    if q.is_const():
        return p.exact_div_int(q.const_value())
    idxs = sorted(p.var_indices() | q.var_indices())
    ctx = _flint_ctx(len(idxs))
    return _from_flint(_to_flint(p, ctx, idxs) / _to_flint(q, ctx, idxs), idxs)


class Expr:
    """Canonical reduced fraction of integer polynomials.

    Supports ``+ - * /`` and integer powers with ints, Fractions and other
    Exprs. Instances are treated as immutable.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly | None = None, *, _canonical: bool = False):
        if den is None:
            den = _ONE_POLY
        if not _canonical:
            if not den:
                raise ZeroDivisionError("denominator is identically zero")
            if not num:
                num, den = _ZERO_POLY, _ONE_POLY
            else:
                num, den = _reduce(num, den)
                if den.is_const():
                    if den.const_value() < 0:
                        num, den = -num, -den
                elif den.leading_coeff() < 0:
                    num, den = -num, -den
        self.num = num
        self.den = den

    @classmethod
    def _coprime(cls, num: Poly, den: Poly) -> Expr:
        """Build from a fraction already known to be in lowest terms."""
        if den.leading_coeff() < 0:
            num, den = -num, -den
        return cls(num, den, _canonical=True)

    @classmethod
    def const(cls, c: int | Fraction) -> Expr:
        c = Fraction(c)
        return cls(Poly.const(c.numerator), Poly.const(c.denominator))

    @classmethod
    def var(cls, v: VarId) -> Expr:
        return cls(Poly.var(v), _ONE_POLY, _canonical=True)

    @staticmethod
    def coerce(value) -> Expr:
        if isinstance(value, Expr):
            return value
        if isinstance(value, (int, Fraction)):
            return Expr.const(value)
        if isinstance(value, VarId):
            return Expr.var(value)
        if isinstance(value, str):
            return parse(value)
        raise TypeError(f"cannot convert {type(value).__name__} to Expr")

    # -- predicates -------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.num

    def is_polynomial(self) -> bool:
        return self.den.is_const() and self.den.const_value() == 1

    def is_constant(self) -> bool:
        return self.num.is_const() and self.den.is_const()

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return Fraction(self.num.const_value(), self.den.const_value())

    def variables(self) -> set[VarId]:
        return self.num.variables() | self.den.variables()

    def has_aux(self) -> bool:
        return any(v.kind == "aux" for v in self.variables())

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other) -> Expr:
        other = Expr.coerce(other)
        if not other.num:
            return self
        if not self.num:
            return other
        if self.den == other.den:
            num = self.num + other.num
            if self.den.is_const() and self.den.const_value() == 1:
                return Expr(num, _ONE_POLY, _canonical=True)
            return Expr(num, self.den)
        b, d = self.den, other.den
        if _simple(b) or _simple(d):
            return Expr(self.num * d + other.num * b, b * d)
        # gcds of denominators only: the inputs are already reduced
        g = _pgcd(b, d)
        if _is_unit(g):
            return Expr._coprime(self.num * d + other.num * b, b * d)
        b1, d1 = _pdiv(b, g), _pdiv(d, g)
        num = self.num * d1 + other.num * b1
        if not num:
            return ZERO
        h = _pgcd(num, g)
        if _is_unit(h):
            return Expr._coprime(num, b * d1)
        return Expr._coprime(_pdiv(num, h), _pdiv(b * d1, h))

    __radd__ = __add__

    def __neg__(self) -> Expr:
        return Expr(-self.num, self.den, _canonical=True)

    def __sub__(self, other) -> Expr:
        return self + (-Expr.coerce(other))

    def __rsub__(self, other) -> Expr:
        return Expr.coerce(other) + (-self)

    def __mul__(self, other) -> Expr:
        other = Expr.coerce(other)
        if not self.num or not other.num:
            return ZERO
        if self.is_polynomial() and other.is_polynomial():
            return Expr(self.num * other.num, _ONE_POLY, _canonical=True)
        a, b, c, d = self.num, self.den, other.num, other.den
        if (_simple(b) or b.is_const()) and (_simple(d) or d.is_const()):
            return Expr(a * c, b * d)
        g1 = d if d.is_const() or _simple(d) else _pgcd(a, d)
        g2 = b if b.is_const() or _simple(b) else _pgcd(c, b)
        if _simple(g1) or _simple(g2):
            return Expr(a * c, b * d)
        a, d = _pdiv(a, g1), _pdiv(d, g1)
        c, b = _pdiv(c, g2), _pdiv(b, g2)
        return Expr._coprime(a * c, b * d)

    __rmul__ = __mul__

    def __truediv__(self, other) -> Expr:
        other = Expr.coerce(other)
        if not other.num:
            raise ZeroDivisionError("division by an identically zero expression")
        return Expr(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other) -> Expr:
        return Expr.coerce(other) / self

    def __pow__(self, n: int) -> Expr:
        if not isinstance(n, int):
            raise TypeError("only integer powers are supported")
        if n < 0:
            if not self.num:
                raise ZeroDivisionError("zero to a negative power")
            return Expr(self.den ** (-n), self.num ** (-n))
        # powers of coprime polynomials stay coprime
        return Expr(self.num**n, self.den**n, _canonical=True)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, VarId)):
            other = Expr.coerce(other)
        if not isinstance(other, Expr):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        return hash((self.num, self.den))

    # -- calculus ---------------------------------------------------------

    def diff(self, v: VarId) -> Expr:
        idx = _index.get(v)
        if idx is None:
            return ZERO
        dn = self.num.diff(idx)
        if self.den.is_const():
            if self.den.const_value() == 1:
                return Expr(dn, _ONE_POLY, _canonical=True)
            return Expr(dn, self.den)
        dd = self.den.diff(idx)
        if not dd:
            return Expr(dn, self.den)
        return Expr(dn * self.den - self.num * dd, self.den * self.den)

    def subs(self, mapping: dict[VarId, Expr]) -> Expr:
        """Substitute expressions for variables (simultaneously)."""
        return _eval_poly(self.num, mapping) / _eval_poly(self.den, mapping)

    def __str__(self) -> str:
        if self.is_polynomial():
            return str(self.num)
        if self.den.is_const():
            return f"({self.num})/{self.den}"
        return f"({self.num})/({self.den})"

    def __repr__(self) -> str:
        return f"Expr({self})"


def _eval_poly(p: Poly, mapping: dict[VarId, Expr]) -> Expr:
    subs_idx = {_index[v]: Expr.coerce(e) for v, e in mapping.items() if v in _index}
    keep_terms: dict[int, int] = {}
    groups: dict[tuple, dict[int, int]] = {}
    for mono, c in p.terms.items():
        exps = _unpack(mono)
        key = tuple(sorted((i, e) for i, e in exps.items() if i in subs_idx))
        if not key:
            keep_terms[mono] = c
            continue
        rest = mono
        for i, e in key:
            rest -= e << (_BITS * i)
        groups.setdefault(key, {})[rest] = c
    total = Expr(Poly(keep_terms))
    powers: dict[tuple[int, int], Expr] = {}
    for key, rest_terms in groups.items():
        factor = ONE
        for i, e in key:
            pw = powers.get((i, e))
            if pw is None:
                pw = powers[(i, e)] = subs_idx[i] ** e
            factor = factor * pw
        total = total + factor * Expr(Poly(rest_terms))
    return total


_ZERO_POLY = Poly()
_ONE_POLY = Poly.const(1)
ZERO = Expr(_ZERO_POLY, _ONE_POLY, _canonical=True)
ONE = Expr(_ONE_POLY, _ONE_POLY, _canonical=True)


def partial(e: Expr, v: VarId) -> Expr:
    return e.diff(v)


def is_zero(e: Expr, *, syntactic_ok: bool = False) -> bool:
    """Exact zero test for rational functions of ``x`` and jet variables.

    Expressions that still contain auxiliary symbols are only zero-tested as
    formal polynomials in those symbols; that requires ``syntactic_ok=True``.
    """
    if not syntactic_ok and e.has_aux():
        raise SyntacticOnlyError(f"auxiliary symbols remain in {e}")
    return e.is_zero()


# -- parser -------------------------------------------------------------------

_TOKEN_RE = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\*\*|[-+*/^()]))")


class _Parser:
    def __init__(self, text: str, m: int | None, order: int | None):
        self.text = text
        self.m = m
        self.order = order
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            if text[pos:].strip() == "":
                break
            mt = _TOKEN_RE.match(text, pos)
            if not mt:
                start = pos + len(text[pos:]) - len(text[pos:].lstrip())
                raise ParseError(f"unexpected character {text[start]!r}", start, text)
            start = mt.start(mt.lastindex)
            kind = ("int", "name", "op")[mt.lastindex - 1]
            tok = mt.group(mt.lastindex)
            self.tokens.append((kind, "^" if tok == "**" else tok, start))
            pos = mt.end()
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else ("end", "", len(self.text))

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, tok, pos = self.take()
        if tok != value:
            raise ParseError(f"expected {value!r}, found {tok or 'end of input'!r}", pos, self.text)

    def parse(self) -> Expr:
        e = self.expr()
        kind, tok, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected token {tok!r}", pos, self.text)
        return e

    def expr(self) -> Expr:
        e = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            rhs = self.term()
            e = e + rhs if op == "+" else e - rhs
        return e

    def term(self) -> Expr:
        e = self.factor()
        while self.peek()[1] in ("*", "/"):
            op, pos = self.take()[1:]
            rhs = self.factor()
            if op == "*":
                e = e * rhs
            else:
                if rhs.is_zero():
                    raise ParseError("division by zero", pos, self.text)
                e = e / rhs
        return e

    def factor(self) -> Expr:
        kind, tok, pos = self.peek()
        if tok in ("-", "+"):
            self.take()
            e = self.factor()
            return -e if tok == "-" else e
        base = self.base()
        if self.peek()[1] == "^":
            self.take()
            sign = 1
            if self.peek()[1] in ("-", "+"):
                sign = -1 if self.take()[1] == "-" else 1
            kind, tok, pos = self.take()
            if kind != "int":
                raise ParseError("expected integer exponent", pos, self.text)
            n = sign * int(tok)
            if n < 0 and base.is_zero():
                raise ParseError("zero to a negative power", pos, self.text)
            base = base**n
        return base

    def base(self) -> Expr:
        kind, tok, pos = self.take()
        if kind == "int":
            return Expr.const(int(tok))
        if kind == "name":
            return Expr.var(self.variable(tok, pos))
        if tok == "(":
            e = self.expr()
            self.expect(")")
            return e
        raise ParseError(f"unexpected {tok or 'end of input'!r}", pos, self.text)

    def variable(self, name: str, pos: int) -> VarId:
        if name == "x":
            return X
        mt = _JET_RE.match(name)
        if mt:
            i, r = int(mt.group(1)), int(mt.group(2))
            if i < 1 or (self.m is not None and i > self.m):
                raise ParseError(f"jet index {name} out of range (m={self.m})", pos, self.text)
            if self.order is not None and r > self.order:
                raise ParseError(
                    f"jet order {name} out of range (order={self.order})", pos, self.text
                )
            return jet(i, r)
        if name.startswith("y") and re.fullmatch(r"y\d.*", name):
            raise ParseError(f"malformed jet variable {name!r}", pos, self.text)
        return aux(name)


def parse(text: str, ctx: tuple[int, int] | None = None) -> Expr:
    """Parse ``text`` into a canonical Expr.

    ``ctx`` is ``(m, order)``; jet variables ``yI_R`` must satisfy
    ``1 <= I <= m`` and ``0 <= R <= order``.
    """
    m, order = ctx if ctx is not None else (None, None)
    return _Parser(text, m, order).parse()
