"""A small module-definition DSL with a recursive-descent parser.

A document is a header line followed, for custom modules, by three rule
lines::

    family principal l=3 k=0

    custom range=-5..5 k=0 l=3
    E(p) = (1/2 - p)*t - l/2
    F(p) = (p + 1/2)*t - l/2
    H(p) = -2*p

Headers name either a built-in family (principal, discrete, rees_lambda0,
minimal_ktype, finite_dim) with its parameters, or a custom module over a
declared index range.  Rule expressions use the symbols p, t, l, i with
integer literals and + - * / ( ); ``E(p)`` is the coefficient toward p-1,
``F(p)`` the coefficient toward p+1 and ``H(p)`` the (t-free) weight.
``#`` starts a comment.

Ranges are written ``lo..hi`` with ``*`` for an unbounded side, e.g.
``-5..5``, ``0..*``, ``*..*``.

Division is checked at load time: a rule's denominator may not vanish
identically at any index of the declared range, so every loaded rule is a
total function on its range.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .exactnum import GaussRational, I, Scalar, TPoly, gauss
from .families import FamilySpec, build_family
from .ladder import DomainError, IndexSet, LadderFamily

_COMMENT = re.compile(r"#.*$")


class DslError(ValueError):
    """A diagnostic with a document position."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, col {col}: {message}")
        self.line = line
        self.col = col


class DslSyntaxError(DslError):
    pass


class DslSemanticError(DslError):
    pass


# --- expression AST ---------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: int


@dataclass(frozen=True)
class Sym:
    name: str  # one of p, t, l, i


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class Bin:
    op: str  # + - * /
    lhs: "Expr"
    rhs: "Expr"


Expr = Num | Sym | Neg | Bin

_PRECEDENCE = {"+": 1, "-": 1, "*": 2, "/": 2}


def pretty_expr(e: Expr, parent_prec: int = 0, right_side: bool = False) -> str:
    if isinstance(e, Num):
        return str(e.value)
    if isinstance(e, Sym):
        return e.name
    if isinstance(e, Neg):
        inner = pretty_expr(e.operand, 3)
        s = f"-{inner}"
        return f"({s})" if parent_prec > 1 else s
    prec = _PRECEDENCE[e.op]
    s = (
        f"{pretty_expr(e.lhs, prec)} {e.op} "
        f"{pretty_expr(e.rhs, prec, right_side=True)}"
    )
    # subtraction and division do not associate on the right
    if prec < parent_prec or (prec == parent_prec and right_side):
        return f"({s})"
    return s


# --- tokenizer --------------------------------------------------------------


@dataclass(frozen=True)
class Token:
    kind: str  # NUM SYM OP LPAREN RPAREN END
    text: str
    line: int
    col: int


def _tokenize_expr(text: str, line: int, col0: int) -> list[Token]:
    tokens = []
    i = 0
    while i < len(text):
        ch = text[i]
        col = col0 + i
        if ch.isspace():
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            tokens.append(Token("NUM", text[i:j], line, col))
            i = j
        elif ch.isalpha():
            j = i
            while j < len(text) and text[j].isalnum():
                j += 1
            name = text[i:j]
            if name not in ("p", "t", "l", "i"):
                raise DslSyntaxError(f"unknown symbol {name!r}", line, col)
            tokens.append(Token("SYM", name, line, col))
            i = j
        elif ch in "+-*/":
            tokens.append(Token("OP", ch, line, col))
            i += 1
        elif ch == "(":
            tokens.append(Token("LPAREN", ch, line, col))
            i += 1
        elif ch == ")":
            tokens.append(Token("RPAREN", ch, line, col))
            i += 1
        else:
            raise DslSyntaxError(f"unexpected character {ch!r}", line, col)
    tokens.append(Token("END", "", line, col0 + len(text)))
    return tokens


class _ExprParser:
    """expr := term ((+|-) term)*; term := factor ((*|/) factor)*;
    factor := (+|-) factor | NUM | SYM | ( expr )"""

    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def take(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def parse(self) -> Expr:
        e = self.expr()
        tok = self.peek()
        if tok.kind != "END":
            raise DslSyntaxError(f"unexpected {tok.text!r}", tok.line, tok.col)
        return e

    def expr(self) -> Expr:
        e = self.term()
        while self.peek().kind == "OP" and self.peek().text in "+-":
            op = self.take().text
            e = Bin(op, e, self.term())
        return e

    def term(self) -> Expr:
        e = self.factor()
        while self.peek().kind == "OP" and self.peek().text in "*/":
            op = self.take().text
            e = Bin(op, e, self.factor())
        return e

    def factor(self) -> Expr:
        tok = self.peek()
        if tok.kind == "OP" and tok.text in "+-":
            self.take()
            inner = self.factor()
            return Neg(inner) if tok.text == "-" else inner
        if tok.kind == "NUM":
            self.take()
            return Num(int(tok.text))
        if tok.kind == "SYM":
            self.take()
            return Sym(tok.text)
        if tok.kind == "LPAREN":
            self.take()
            e = self.expr()
            closing = self.take()
            if closing.kind != "RPAREN":
                raise DslSyntaxError("expected ')'", closing.line, closing.col)
            return e
        raise DslSyntaxError(
            f"expected a number, symbol or '(', got {tok.text or 'end of line'!r}",
            tok.line,
            tok.col,
        )


def _mentions(e: Expr, name: str) -> bool:
    if isinstance(e, Sym):
        return e.name == name
    if isinstance(e, Neg):
        return _mentions(e.operand, name)
    if isinstance(e, Bin):
        return _mentions(e.lhs, name) or _mentions(e.rhs, name)
    return False


# --- exact bivariate arithmetic for the load-time totality check ------------


class _BiPoly:
    """Polynomial in (p, t) over the Gaussian rationals, as a sparse dict."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict[tuple[int, int], GaussRational] | None = None):
        clean = {k: v for k, v in (terms or {}).items() if v}
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):  # pragma: no cover - guard only
        raise AttributeError("_BiPoly is immutable")

    @classmethod
    def const(cls, c) -> "_BiPoly":
        return cls({(0, 0): gauss(c)})

    @classmethod
    def sym(cls, name: str) -> "_BiPoly":
        return cls({((1, 0) if name == "p" else (0, 1)): gauss(1)})

    def is_zero(self) -> bool:
        return not self.terms

    def add(self, other: "_BiPoly") -> "_BiPoly":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, gauss(0)) + v
        return _BiPoly(out)

    def neg(self) -> "_BiPoly":
        return _BiPoly({k: -v for k, v in self.terms.items()})

    def mul(self, other: "_BiPoly") -> "_BiPoly":
        out: dict[tuple[int, int], GaussRational] = {}
        for (a, b), v in self.terms.items():
            for (c, d), w in other.terms.items():
                k = (a + c, b + d)
                out[k] = out.get(k, gauss(0)) + v * w
        return _BiPoly(out)

    def t_slices(self) -> dict[int, dict[int, GaussRational]]:
        """Per t-degree polynomials in p, as {t_deg: {p_deg: coeff}}."""
        out: dict[int, dict[int, GaussRational]] = {}
        for (a, b), v in self.terms.items():
            out.setdefault(b, {})[a] = v
        return out

    def at_p(self, p0: int) -> TPoly:
        by_t: dict[int, GaussRational] = {}
        for (a, b), v in self.terms.items():
            by_t[b] = by_t.get(b, gauss(0)) + v * (p0 ** a)
        if not by_t:
            return TPoly.zero()
        return TPoly([by_t.get(d, gauss(0)) for d in range(max(by_t) + 1)])


@dataclass(frozen=True)
class _BiRat:
    num: _BiPoly
    den: _BiPoly


def _to_birat(e: Expr, l: GaussRational | None, line: int) -> _BiRat:
    one = _BiPoly.const(1)
    if isinstance(e, Num):
        return _BiRat(_BiPoly.const(e.value), one)
    if isinstance(e, Sym):
        if e.name == "i":
            return _BiRat(_BiPoly.const(I), one)
        if e.name == "l":
            if l is None:
                raise DslSemanticError("expression uses l but the header binds no l", line, 1)
            return _BiRat(_BiPoly.const(l), one)
        return _BiRat(_BiPoly.sym(e.name), one)
    if isinstance(e, Neg):
        inner = _to_birat(e.operand, l, line)
        return _BiRat(inner.num.neg(), inner.den)
    lhs = _to_birat(e.lhs, l, line)
    rhs = _to_birat(e.rhs, l, line)
    if e.op == "+":
        return _BiRat(lhs.num.mul(rhs.den).add(rhs.num.mul(lhs.den)), lhs.den.mul(rhs.den))
    if e.op == "-":
        return _BiRat(lhs.num.mul(rhs.den).add(rhs.num.mul(lhs.den).neg()), lhs.den.mul(rhs.den))
    if e.op == "*":
        return _BiRat(lhs.num.mul(rhs.num), lhs.den.mul(rhs.den))
    if rhs.num.is_zero():
        raise DslSemanticError("division by the zero expression", line, 1)
    return _BiRat(lhs.num.mul(rhs.den), lhs.den.mul(rhs.num))


def _weight(c: GaussRational) -> Fraction:
    return abs(c.re) + abs(c.im)


def _integer_roots(poly: dict[int, GaussRational]) -> list[int]:
    """All integer roots of a nonzero polynomial in p over the Gaussian
    rationals, found exactly by scanning a Cauchy-style root bound."""
    deg = max(d for d, c in poly.items() if c)
    if deg == 0:
        return []
    lead = poly[deg]
    low = max(abs(lead.re), abs(lead.im))
    lower_weights = [_weight(c) for d, c in poly.items() if d < deg and c]
    bound = 1 + (max(lower_weights) / low if lower_weights else 0)
    limit = int(bound) + 1
    roots = []
    for p0 in range(-limit, limit + 1):
        acc = gauss(0)
        pk = gauss(1)
        for d in range(deg + 1):
            c = poly.get(d)
            if c:
                acc = acc + c * pk
            pk = pk * p0
        if not acc:
            roots.append(p0)
    return roots


def _check_total(den: _BiPoly, lo: int | None, hi: int | None, name: str, line: int):
    """Reject denominators vanishing identically at some index of the range."""
    if den.is_zero():
        raise DslSemanticError(f"{name}(p) divides by the zero expression", line, 1)
    slices = den.t_slices()
    pivot = next(iter(slices.values()))
    if max(d for d, c in pivot.items() if c) == 0 and len(slices) == 1:
        return  # constant denominator
    candidates = set()
    for sl in slices.values():
        if any(c for c in sl.values()):
            candidates = set(_integer_roots(sl))
            break
    for p0 in sorted(candidates):
        if lo is not None and p0 < lo:
            continue
        if hi is not None and p0 > hi:
            continue
        if den.at_p(p0).is_zero():
            raise DslSemanticError(
                f"{name}(p) divides by an expression vanishing at p = {p0}, "
                "inside the declared range",
                line,
                1,
            )


# --- rules built from expressions -------------------------------------------


class ExprRule:
    """Coefficient rule evaluating a parsed expression at each integer p."""

    __slots__ = ("ast", "l", "name")

    def __init__(self, ast: Expr, l: GaussRational | None, name: str):
        self.ast = ast
        self.l = l
        self.name = name

    def _eval(self, e: Expr, p: int) -> Scalar:
        if isinstance(e, Num):
            return Scalar.const(e.value)
        if isinstance(e, Sym):
            if e.name == "p":
                return Scalar.const(p)
            if e.name == "t":
                return Scalar.t()
            if e.name == "i":
                return Scalar.const(I)
            return Scalar.const(self.l)
        if isinstance(e, Neg):
            return -self._eval(e.operand, p)
        a = self._eval(e.lhs, p)
        b = self._eval(e.rhs, p)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return a * b
        return a / b

    def value_at(self, p: int) -> Scalar:
        return self._eval(self.ast, p)

    def text(self) -> str:
        return pretty_expr(self.ast)


class ExprWeight:
    """Weight rule from a t-free expression."""

    __slots__ = ("rule",)

    def __init__(self, rule: ExprRule):
        self.rule = rule

    def value_at(self, p: int) -> GaussRational:
        return self.rule.value_at(p).as_gauss()

    def text(self) -> str:
        return self.rule.text()


# --- documents ---------------------------------------------------------------


@dataclass(frozen=True)
class CustomHeader:
    lo: int | None
    hi: int | None
    k: int
    l: GaussRational | None

    def range_text(self) -> str:
        lo = "*" if self.lo is None else str(self.lo)
        hi = "*" if self.hi is None else str(self.hi)
        return f"{lo}..{hi}"


@dataclass(frozen=True)
class ModuleDoc:
    header: FamilySpec | CustomHeader
    rules: tuple[tuple[str, Expr], ...]  # (("E", ast), ("F", ast), ("H", ast)) or ()

    def is_custom(self) -> bool:
        return isinstance(self.header, CustomHeader)

    def pretty(self) -> str:
        if not self.is_custom():
            spec = self.header
            parts = [f"family {spec.kind}"]
            if spec.kind == "discrete":
                parts.append(f"n={spec.n}")
                parts.append(f"sign={spec.sign}")
            else:
                if spec.kind != "rees_lambda0":
                    parts.append(f"l={spec.l}")
                parts.append(f"k={spec.k}")
            return " ".join(parts) + "\n"
        h = self.header
        head = f"custom range={h.range_text()} k={h.k}"
        if h.l is not None:
            head += f" l={h.l}"
        lines = [head]
        for gen, ast in self.rules:
            lines.append(f"{gen}(p) = {pretty_expr(ast)}")
        return "\n".join(lines) + "\n"

    def build(self) -> tuple[LadderFamily, frozenset[int] | None]:
        if not self.is_custom():
            return build_family(self.header)
        h = self.header
        by_gen = dict(self.rules)
        lower = ExprRule(by_gen["E"], h.l, "E")
        upper = ExprRule(by_gen["F"], h.l, "F")
        weight = ExprWeight(ExprRule(by_gen["H"], h.l, "H"))
        if h.lo is None and h.hi is None:
            indices = IndexSet.full_line()
        elif h.lo is None:
            indices = IndexSet.at_most(h.hi)
        elif h.hi is None:
            indices = IndexSet.at_least(h.lo)
        else:
            indices = IndexSet.interval(h.lo, h.hi)
        label = f"custom(range={h.range_text()},k={h.k}"
        if h.l is not None:
            label += f",l={h.l}"
        label += ")"
        try:
            fam = LadderFamily(
                indices=indices,
                k=h.k,
                raise_rule=upper,
                lower_rule=lower,
                weight_rule=weight,
                up="F",
                label=label,
            )
        except DomainError as exc:
            raise DslSemanticError(str(exc), 1, 1) from exc
        return fam, None


_RANGE = re.compile(r"(\*|-?\d+)\.\.(\*|-?\d+)$")
_RULE_HEAD = re.compile(r"([EFH])\(p\)\s*=")


def _parse_kvpairs(words: list[str], line: int, text: str) -> dict[str, str]:
    out = {}
    for w in words:
        if "=" not in w:
            raise DslSyntaxError(f"expected key=value, got {w!r}", line, text.find(w) + 1)
        key, _, value = w.partition("=")
        if not key or not value:
            raise DslSyntaxError(f"malformed key=value pair {w!r}", line, text.find(w) + 1)
        if key in out:
            raise DslSyntaxError(f"duplicate key {key!r}", line, text.find(w) + 1)
        out[key] = value
    return out


def _parse_header(text: str, line: int) -> FamilySpec | CustomHeader:
    words = text.split()
    head = words[0]
    if head == "family":
        if len(words) < 2:
            raise DslSyntaxError("family header needs a family kind", line, len(text))
        kind = words[1]
        kv = _parse_kvpairs(words[2:], line, text)
        try:
            spec_args: dict = {"kind": kind}
            if "l" in kv:
                spec_args["l"] = gauss(kv.pop("l"))
            if "k" in kv:
                spec_args["k"] = int(kv.pop("k"))
            if "n" in kv:
                spec_args["n"] = int(kv.pop("n"))
            if "sign" in kv:
                spec_args["sign"] = kv.pop("sign")
            if kv:
                raise DslSyntaxError(
                    f"unknown header keys {sorted(kv)}", line, 1
                )
            return FamilySpec(**spec_args)
        except DslError:
            raise
        except (DomainError, ValueError) as exc:
            raise DslSemanticError(str(exc), line, 1) from exc
    if head == "custom":
        kv = _parse_kvpairs(words[1:], line, text)
        if "range" not in kv:
            raise DslSemanticError("custom header needs range=lo..hi", line, 1)
        m = _RANGE.match(kv.pop("range"))
        if m is None:
            raise DslSyntaxError("range must look like -5..5, 0..* or *..*", line, 1)
        lo = None if m.group(1) == "*" else int(m.group(1))
        hi = None if m.group(2) == "*" else int(m.group(2))
        if lo is not None and hi is not None and lo > hi:
            raise DslSemanticError(f"empty range {lo}..{hi}", line, 1)
        try:
            k = int(kv.pop("k", "0"))
            l = gauss(kv.pop("l")) if "l" in kv else None
        except ValueError as exc:
            raise DslSemanticError(str(exc), line, 1) from exc
        if kv:
            raise DslSyntaxError(f"unknown header keys {sorted(kv)}", line, 1)
        if k not in (0, 1):
            raise DslSemanticError("k must be 0 or 1", line, 1)
        return CustomHeader(lo, hi, k, l)
    raise DslSyntaxError(
        f"expected 'family' or 'custom' at the start of the document, got {head!r}",
        line,
        1,
    )


def parse_module_doc(text: str) -> ModuleDoc:
    """Parse a document; raises a position-bearing DslError on bad input."""
    header = None
    header_line = 0
    rules: list[tuple[str, Expr, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = _COMMENT.sub("", raw).strip()
        if not stripped:
            continue
        if header is None:
            header = _parse_header(stripped, lineno)
            header_line = lineno
            continue
        m = _RULE_HEAD.match(stripped)
        if m is None:
            raise DslSyntaxError(
                "expected a rule line 'E(p) = ...', 'F(p) = ...' or 'H(p) = ...'",
                lineno,
                1,
            )
        gen = m.group(1)
        if any(g == gen for g, _, _ in rules):
            raise DslSyntaxError(f"duplicate rule for {gen}", lineno, 1)
        expr_text = stripped[m.end():]
        col0 = raw.index(stripped) + m.end() + 1
        ast = _ExprParser(_tokenize_expr(expr_text, lineno, col0)).parse()
        rules.append((gen, ast, lineno))
    if header is None:
        raise DslSyntaxError("empty document", 1, 1)
    if isinstance(header, FamilySpec):
        if rules:
            gen, _, lineno = rules[0]
            raise DslSyntaxError(
                f"rule line {gen}(p) is only allowed after a custom header", lineno, 1
            )
        return ModuleDoc(header, ())
    missing = {"E", "F", "H"} - {g for g, _, _ in rules}
    if missing:
        raise DslSyntaxError(
            f"custom module is missing rule lines for {sorted(missing)}",
            header_line,
            1,
        )
    # semantic checks: total division on the range, t-free weights
    for gen, ast, lineno in rules:
        birat = _to_birat(ast, header.l, lineno)
        _check_total(birat.den, header.lo, header.hi, gen, lineno)
        if gen == "H" and _mentions(ast, "t"):
            raise DslSemanticError("H(p) must not involve t", lineno, 1)
    ordered = tuple(
        (g, ast) for g, ast, _ in sorted(rules, key=lambda r: "EFH".index(r[0]))
    )
    return ModuleDoc(header, ordered)
