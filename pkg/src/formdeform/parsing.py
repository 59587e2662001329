"""Text syntax for forms, fields, vector-valued forms and operators.

Grammar (juxtaposition, ``*`` and ``^`` all multiply; ``^`` followed by an
integer is a power)::

    sum     := ('+'|'-')? term (('+'|'-') term)*
    term    := product ('@' product)?
    product := factor (('*' | '^' | <juxtaposition>) factor)*
    factor  := '-' factor | atom ('^' INT)* ('/' INT)*
    atom    := NUMBER | xI | dxI | d/dxI | Id | '(' sum ')'

Operators: ``L[vv] + i[vv] + lm[form]``, ``d``, ``deg`` or
``idop(q=.., a=.., w1=.., w2=.., mu=..)``; the bare keyword list
``q=2,a=2,w1=...`` is accepted as an ``idop`` body.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple, Union

from .exterior import HomogeneousField, HomogeneousForm, StructuralError, wedge
from .operators import DiffOperator, d_op, form_degree_op, from_id_family
from .vvforms import VectorValuedForm, render_vv


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.message, self.line, self.column = message, line, column
        super().__init__(message)

    def __str__(self) -> str:
        where = f"line {self.line}, column {self.column}: " if self.line else ""
        return where + self.message

    def relocated(self, line: int, column: int) -> "ParseError":
        """Shift a position found in a substring starting at ``(line, column)``."""
        if self.line:
            if self.line == 1:
                self.column += column - 1
            self.line += line - 1
        else:
            self.line, self.column = line, column
        return self


class InhomogeneousError(ParseError):
    def __init__(self, bidegrees, line: int = 0, column: int = 0):
        self.bidegrees = sorted(bidegrees, reverse=True)
        listed = ", ".join(f"(r={r}, b={b})" for r, b in self.bidegrees)
        super().__init__(f"inhomogeneous expression with terms of bidegree {listed}", line, column)


# --------------------------------------------------------------------------
# tokens

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+|\n)
  | (?P<field>d/dx(?P<fi>\d+))
  | (?P<dx>dx(?P<di>\d+))
  | (?P<var>x(?P<vi>\d+))
  | (?P<num>\d+)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*^/@()\[\],=])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int
    index: int = 0


def tokenize(text: str) -> List[Token]:
    out = []
    pos, line, col = 0, 1, 1
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        if kind in ("fi", "di", "vi"):
            kind = {"fi": "field", "di": "dx", "vi": "var"}[kind]
        tok = m.group(0)
        if kind == "ws":
            if tok == "\n":
                line, col = line + 1, 1
            else:
                col += len(tok)
        else:
            index = int(m.group({"field": "fi", "dx": "di", "var": "vi"}[kind])) if kind in ("field", "dx", "var") else 0
            if kind in ("field", "dx", "var") and index < 1:
                raise ParseError(f"variable indices start at 1, got {tok!r}", line, col)
            out.append(Token(kind if kind != "op" else tok, tok, line, col, index))
            col += len(tok)
        pos = m.end()
    out.append(Token("eof", "", line, col))
    return out


# --------------------------------------------------------------------------
# syntax tree


@dataclass(frozen=True)
class Node:
    kind: str            # num, var, dx, field, id, sum, neg, prod, pow, at
    token: Token
    value: object = None
    children: Tuple["Node", ...] = ()


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.pos = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, k: int = 1) -> Token:
        return self.tokens[min(self.pos + k, len(self.tokens) - 1)]

    def take(self, kind: str | None = None) -> Token:
        t = self.tok
        if kind is not None and t.kind != kind:
            found = "end of input" if t.kind == "eof" else repr(t.text)
            raise ParseError(f"expected {kind!r}, found {found}", t.line, t.column)
        self.pos += 1
        return t

    def at(self, *kinds: str) -> bool:
        return self.tok.kind in kinds

    def fail(self, message: str):
        t = self.tok
        raise ParseError(message, t.line, t.column)

    def end(self):
        if not self.at("eof"):
            self.fail(f"unexpected {self.tok.text!r}")

    # expressions

    def sum(self) -> Node:
        start = self.tok
        terms = []
        sign = 1
        if self.at("+", "-"):
            sign = -1 if self.take().kind == "-" else 1
        node = self.term()
        terms.append(node if sign > 0 else Node("neg", start, children=(node,)))
        while self.at("+", "-"):
            op = self.take()
            node = self.term()
            terms.append(node if op.kind == "+" else Node("neg", op, children=(node,)))
        return terms[0] if len(terms) == 1 else Node("sum", start, children=tuple(terms))

    def term(self) -> Node:
        left = self.product()
        if self.at("@"):
            op = self.take("@")
            right = self.product()
            return Node("at", op, children=(left, right))
        return left

    _STARTS = ("num", "var", "dx", "field", "(")

    def product(self) -> Node:
        start = self.tok
        factors = [self.factor()]
        while True:
            if self.at("*", "^"):
                self.take()
                factors.append(self.factor())
            elif self.at(*self._STARTS) or (self.at("name") and self.tok.text == "Id"):
                factors.append(self.factor())
            else:
                break
        return factors[0] if len(factors) == 1 else Node("prod", start, children=tuple(factors))

    def factor(self) -> Node:
        if self.at("-"):
            op = self.take()
            return Node("neg", op, children=(self.factor(),))
        node = self.atom()
        while True:
            if self.at("^") and self.peek().kind == "num":
                op = self.take()
                node = Node("pow", op, int(self.take().text), (node,))
            elif self.at("/") and self.peek().kind == "num":
                op = self.take()
                den = int(self.take().text)
                if den == 0:
                    raise ParseError("division by zero", op.line, op.column)
                node = Node("prod", op, children=(node, Node("num", op, Fraction(1, den))))
            else:
                return node

    def atom(self) -> Node:
        t = self.tok
        if t.kind == "num":
            self.take()
            return Node("num", t, Fraction(int(t.text)))
        if t.kind in ("var", "dx", "field"):
            self.take()
            return Node(t.kind, t, t.index - 1)
        if t.kind == "name" and t.text == "Id":
            self.take()
            return Node("id", t)
        if t.kind == "(":
            self.take()
            inner = self.sum()
            self.take(")")
            return inner
        if t.kind == "eof":
            self.fail("unexpected end of input")
        self.fail(f"unexpected {t.text!r}")


def parse_ast(text: str) -> Node:
    p = _Parser(text)
    node = p.sum()
    p.end()
    return node


def max_index(node: Node) -> int:
    own = node.value + 1 if node.kind in ("var", "dx", "field") else 0
    return max([own] + [max_index(c) for c in node.children])


# --------------------------------------------------------------------------
# evaluation to graded pieces

# A value maps (form degree, weight of the form part, direction or None) to a form;
# a direction i marks the piece ``form (x) d/dx_i``.
Key = Tuple[int, int, Optional[int]]
Value = Dict[Key, HomogeneousForm]


def _uses_id(node: Node) -> bool:
    return node.kind == "id" or any(_uses_id(c) for c in node.children)


class _Evaluator:
    def __init__(self, n: int):
        self.n = n

    def const(self, v: Fraction) -> Value:
        return {(0, 0, None): HomogeneousForm.constant(self.n, v)}

    def add(self, u: Value, v: Value) -> Value:
        out = dict(u)
        for k, f in v.items():
            out[k] = out[k] + f if k in out else f
        return out

    def mul(self, u: Value, v: Value, tok: Token) -> Value:
        out: Value = {}
        for (r1, b1, d1), f in u.items():
            for (r2, b2, d2), g in v.items():
                if d1 is not None and d2 is not None:
                    raise ParseError("product of two vector fields", tok.line, tok.column)
                key = (r1 + r2, b1 + b2, d1 if d1 is not None else d2)
                prod = wedge(f, g)
                out[key] = out[key] + prod if key in out else prod
        return out

    def eval(self, node: Node) -> Value:
        n, t = self.n, node.token
        k = node.kind
        if k in ("var", "dx", "field") and node.value >= n:
            raise ParseError(f"{t.text} exceeds the variable count n={n}", t.line, t.column)
        if k == "num":
            return self.const(node.value)
        if k == "var":
            return {(0, 1, None): HomogeneousForm.x(n, node.value)}
        if k == "dx":
            return {(1, 1, None): HomogeneousForm.dx(n, node.value)}
        if k == "field":
            return {(0, 0, node.value): HomogeneousForm.constant(n)}
        if k == "id":
            return {(1, 1, i): HomogeneousForm.dx(n, i) for i in range(n)}
        if k == "neg":
            return {key: f.scale(-1) for key, f in self.eval(node.children[0]).items()}
        if k == "sum":
            out: Value = {}
            for c in node.children:
                out = self.add(out, self.eval(c))
            return out
        if k == "prod":
            out = self.eval(node.children[0])
            for c in node.children[1:]:
                out = self.mul(out, self.eval(c), c.token)
            return out
        if k == "pow":
            base = self.eval(node.children[0])
            if any(r or d is not None for r, _, d in base):
                raise ParseError("powers apply to functions only", t.line, t.column)
            out = self.const(Fraction(1))
            for _ in range(node.value):
                out = self.mul(out, base, t)
            return out
        if k == "at":
            left, right = (self.eval(c) for c in node.children)
            if any(d is not None for _, _, d in left):
                raise ParseError("left of '@' must be a form", t.line, t.column)
            if any(d is None for _, _, d in right):
                raise ParseError("right of '@' must be a vector field", t.line, t.column)
            return self.mul(left, right, t)
        raise AssertionError(k)


def _single(value: Value, token: Token) -> Tuple[Key, ...]:
    live = {k for k, f in value.items() if not f.is_zero()}
    if len({d is None for _, _, d in live}) > 1:
        raise ParseError("expression mixes plain and vector-valued terms", token.line, token.column)
    # a piece form (x) d/dx_i has weight one less than its form part
    grades = {(r, b if d is None else b - 1) for r, b, d in live}
    if len(grades) > 1:
        raise InhomogeneousError(grades, token.line, token.column)
    return tuple(sorted(live, key=lambda k: (k[2] is None, k[2] or 0)))


def _resolve_n(node: Node, n: Optional[int]) -> int:
    found = max_index(node)
    if n is None:
        if not found:
            if _uses_id(node):
                raise ParseError("cannot infer n for Id; pass the variable count")
            return 1
        return found
    if n < 1:
        raise ParseError("n must be positive")
    return n


def evaluate(text: str, n: int | None = None) -> Tuple[Value, int, Token]:
    node = parse_ast(text)
    n = _resolve_n(node, n)
    return _Evaluator(n).eval(node), n, node.token


def _zero_grade(value: Value) -> Tuple[int, int]:
    if len({(r, b) for r, b, _ in value}) == 1:
        r, b, _ = next(iter(value))
        return r, b
    return 0, 0


def parse_form(text: str, n: int | None = None, expect: Tuple[int, int] | None = None) -> HomogeneousForm:
    """Parse a homogeneous form; ``expect`` fixes the bidegree of a zero result."""
    value, n, tok = evaluate(text, n)
    if any(d is not None and not f.is_zero() for (_, _, d), f in value.items()):
        raise ParseError("expected a form, found a vector-valued expression", tok.line, tok.column)
    live = _single(value, tok)
    if not live:
        r, b = expect if expect is not None else _zero_grade(value)
        return HomogeneousForm.zero(n, r, b)
    form = value[live[0]]
    if expect is not None and (form.r, form.b) != tuple(expect):
        raise ParseError(f"expected bidegree {tuple(expect)}, found ({form.r}, {form.b})", tok.line, tok.column)
    return form


def parse_field(text: str, n: int | None = None) -> HomogeneousField:
    vv = parse_vv(text, n)
    if vv.degree != 0:
        raise ParseError(f"expected a vector field, found form degree {vv.degree}")
    return vv.to_field()


def parse_vv(text: str, n: int | None = None, expect: Tuple[int, int] | None = None) -> VectorValuedForm:
    """Parse ``sum form @ d/dxi``; ``expect`` is ``(degree, weight)`` for a zero result."""
    value, n, tok = evaluate(text, n)
    live = _single(value, tok)
    if any(d is None for _, _, d in live):
        raise ParseError("expected a vector-valued form, found a plain form term", tok.line, tok.column)
    if not live:
        if expect is None:
            raise ParseError("cannot determine the type of a zero vector-valued form", tok.line, tok.column)
        return VectorValuedForm.zero(n, *expect)
    r, b, _ = live[0]
    comps = [value.get((r, b, i), HomogeneousForm.zero(n, r, b)) for i in range(n)]
    return VectorValuedForm(n, r, b - 1, comps)


# --------------------------------------------------------------------------
# operators

_IDOP_KEYS = ("q", "a", "w1", "w2", "mu")


def _split_top(text: str, sep: str) -> List[Tuple[str, int]]:
    """Split on ``sep`` outside brackets, returning pieces with their offsets."""
    pieces, depth, start = [], 0, 0
    for i, ch in enumerate(text):
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        elif ch == sep and depth == 0:
            pieces.append((text[start:i], start))
            start = i + 1
    pieces.append((text[start:], start))
    return pieces


def _line_col(text: str, offset: int) -> Tuple[int, int]:
    line = text.count("\n", 0, offset) + 1
    return line, offset - (text.rfind("\n", 0, offset) + 1) + 1


def _shift_error(exc: ParseError, text: str, offset: int) -> ParseError:
    return exc.relocated(*_line_col(text, offset))


def _located_index(text: str, body: str, offset: int) -> int:
    try:
        return max_index(parse_ast(body))
    except ParseError as exc:
        raise _shift_error(exc, text, offset) from None


def parse_idop(text: str, n: int | None = None) -> DiffOperator:
    """``q=2,a=2,w1=...,w2=...,mu=...`` (the ``idop(...)`` wrapper is optional)."""
    body, base = text, 0
    m = re.match(r"\s*idop\s*\(", text)
    if m:
        end = text.rstrip()
        if not end.endswith(")"):
            raise ParseError("unterminated idop(", *_line_col(text, len(text)))
        body, base = text[m.end():len(end) - 1], m.end()
    args: Dict[str, Tuple[str, int]] = {}
    for piece, off in _split_top(body, ","):
        if not piece.strip():
            continue
        key, eq, val = piece.partition("=")
        key = key.strip()
        if not eq or key not in _IDOP_KEYS:
            raise ParseError(f"expected one of {', '.join(_IDOP_KEYS)} as key=value", *_line_col(text, base + off))
        if key in args:
            raise ParseError(f"duplicate key {key!r}", *_line_col(text, base + off))
        args[key] = (val, base + off + len(piece.partition("=")[0]) + 1)
    for key in ("q", "a"):
        if key not in args:
            raise ParseError(f"idop needs {key}=", *_line_col(text, base))
    try:
        q, a = (int(args[k][0]) for k in ("q", "a"))
    except ValueError:
        raise ParseError("q and a must be integers", *_line_col(text, base)) from None
    if n is None:
        n = max([_located_index(text, *args[k]) for k in ("w1", "w2", "mu") if k in args] + [1])
    forms = {}
    for key, grade in (("w1", (q - 1, a)), ("w2", (q, a)), ("mu", (q, a))):
        if key not in args:
            forms[key] = HomogeneousForm.zero(n, *grade)
            continue
        src, off = args[key]
        try:
            forms[key] = parse_form(src, n, expect=grade)
        except ParseError as exc:
            raise _shift_error(exc, text, off) from None
    try:
        return from_id_family(forms["w1"], forms["w2"], forms["mu"], q=q, a=a)
    except StructuralError as exc:
        raise ParseError(str(exc)) from None


def parse_operator(text: str, n: int | None = None) -> DiffOperator:
    """``L[...] + i[...] + lm[...]``, ``d``, ``deg`` or an ``idop`` body."""
    stripped = text.strip()
    if stripped.startswith("idop") or re.match(r"q\s*=", stripped):
        return parse_idop(text, n)
    parts = []
    for piece, off in _split_top(text, "+"):
        m = re.fullmatch(r"\s*(L|i|lm)\s*\[(.*)\]\s*", piece, re.S)
        word = piece.strip()
        if word in ("d", "deg"):
            parts.append((word, None, off))
        elif m:
            parts.append((m.group(1), m.group(2), off + m.start(2)))
        else:
            raise ParseError("expected L[...], i[...], lm[...], d or deg", *_line_col(text, off + len(piece) - len(piece.lstrip())))
    if n is None:
        n = max([_located_index(text, body, off) for _, body, off in parts if body is not None] + [1])
    total = None
    for kind, body, off in parts:
        try:
            if body is not None and all(f.is_zero() for f in evaluate(body, n)[0].values()):
                continue  # zero parts carry no bidegree
            if kind == "d":
                op = d_op(n)
            elif kind == "deg":
                op = form_degree_op(n)
            elif kind == "lm":
                mu = parse_form(body, n)
                op = DiffOperator(n, mu.r, mu.b, mu=mu)
            elif kind == "L":
                K = parse_vv(body, n)
                op = DiffOperator(n, K.degree, K.weight, K=K)
            else:
                L = parse_vv(body, n)
                op = DiffOperator(n, L.degree - 1, L.weight, L=L)
        except ParseError as exc:
            raise _shift_error(exc, text, off) from None
        if total is None:
            total = op
        elif (op.q, op.a) != (total.q, total.a):
            raise ParseError(f"operator parts of bidegree ({total.q}, {total.a}) and ({op.q}, {op.a})",
                             *_line_col(text, off))
        else:
            total = total + op
    return total if total is not None else DiffOperator(n, 0, 0)


def render_operator(D: DiffOperator) -> str:
    parts = []
    if not D.K.is_zero():
        parts.append(f"L[{render_vv(D.K)}]")
    if not D.L.is_zero():
        parts.append(f"i[{render_vv(D.L)}]")
    if not D.mu.is_zero() or not parts:
        parts.append(f"lm[{D.mu}]")
    return " + ".join(parts)


Parsed = Union[HomogeneousForm, HomogeneousField, VectorValuedForm, DiffOperator]
