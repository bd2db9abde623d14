"""Expression language for user-defined implicit surfaces.

Grammar (``^`` is right-associative and binds tighter than unary minus)::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := '-' factor | power
    power  := atom ('^' factor)?
    atom   := number | ident | ident '(' expr (',' expr)* ')' | '(' expr ')'

Identifiers are the variables ``x``, ``y``, ``z``, the constants ``pi`` and
``tau_golden`` (the golden ratio) and the functions ``sqrt``, ``abs``,
``sin``, ``cos``, ``min`` and ``max``.

Evaluation is generic: the same tree evaluates on floats, numpy arrays or
:class:`~mathprint.dual.Dual` numbers, which is how gradients are obtained.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from mathprint import dual

__all__ = [
    "ExprError",
    "ExprSyntaxError",
    "UnknownIdentifierError",
    "Node",
    "Const",
    "Var",
    "NamedConst",
    "Neg",
    "BinOp",
    "Func",
    "parse_expr",
    "TAU_GOLDEN",
]

TAU_GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0

NAMED_CONSTANTS = {"pi": math.pi, "tau_golden": TAU_GOLDEN}
VARIABLES = ("x", "y", "z")
UNARY_FUNCS = {
    "sqrt": dual.dsqrt,
    "abs": dual.dabs,
    "sin": dual.dsin,
    "cos": dual.dcos,
}
BINARY_FUNCS = {"min": dual.dmin, "max": dual.dmax}


class ExprError(ValueError):
    pass


class ExprSyntaxError(ExprError):
    """Malformed expression; ``offset`` is a byte offset into the UTF-8 source."""

    def __init__(self, offset: int, expected, found: str):
        self.offset = offset
        self.expected = frozenset(expected)
        self.found = found
        exp = ", ".join(sorted(self.expected))
        super().__init__(f"syntax error at byte {offset}: expected one of {{{exp}}}, found {found}")


class UnknownIdentifierError(ExprError):
    def __init__(self, name: str, offset: int):
        self.name = name
        self.offset = offset
        super().__init__(f"unknown identifier {name!r} at byte {offset}")


# --------------------------------------------------------------------- nodes


class Node:
    def evaluate(self, x, y, z):
        raise NotImplementedError

    def to_source(self) -> str:
        raise NotImplementedError

    def __str__(self):
        return self.to_source()


@dataclass(frozen=True)
class Const(Node):
    value: float

    def evaluate(self, x, y, z):
        return np.float64(self.value)

    def to_source(self):
        return repr(float(self.value))


@dataclass(frozen=True)
class Var(Node):
    name: str

    def evaluate(self, x, y, z):
        return {"x": x, "y": y, "z": z}[self.name]

    def to_source(self):
        return self.name


@dataclass(frozen=True)
class NamedConst(Node):
    name: str

    def evaluate(self, x, y, z):
        return np.float64(NAMED_CONSTANTS[self.name])

    def to_source(self):
        return self.name


@dataclass(frozen=True)
class Neg(Node):
    arg: Node

    def evaluate(self, x, y, z):
        return -self.arg.evaluate(x, y, z)

    def to_source(self):
        return f"(-{self.arg.to_source()})"


@dataclass(frozen=True)
class BinOp(Node):
    op: str
    left: Node
    right: Node

    def evaluate(self, x, y, z):
        a = self.left.evaluate(x, y, z)
        b = self.right.evaluate(x, y, z)
        if self.op == "+":
            return a + b
        if self.op == "-":
            return a - b
        if self.op == "*":
            return a * b
        if self.op == "/":
            return a / b
        return dual.dpow(a, b)

    def to_source(self):
        return f"({self.left.to_source()} {self.op} {self.right.to_source()})"


@dataclass(frozen=True)
class Func(Node):
    name: str
    args: tuple

    def evaluate(self, x, y, z):
        vals = [a.evaluate(x, y, z) for a in self.args]
        if self.name in UNARY_FUNCS:
            return UNARY_FUNCS[self.name](vals[0])
        return BINARY_FUNCS[self.name](vals[0], vals[1])

    def to_source(self):
        return f"{self.name}({', '.join(a.to_source() for a in self.args)})"


# ------------------------------------------------------------------- lexing

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^(),])
    """,
    re.VERBOSE,
)

_ATOM_START = {"number", "identifier", "'('", "'-'"}


@dataclass(frozen=True)
class _Tok:
    kind: str  # number | ident | op | end
    text: str
    offset: int


def _tokenize(source: str) -> list[_Tok]:
    toks = []
    pos = 0
    byte = 0
    while pos < len(source):
        m = _TOKEN.match(source, pos)
        if m is None:
            raise ExprSyntaxError(byte, _ATOM_START | {"operator"}, repr(source[pos]))
        text = m.group()
        if m.lastgroup != "ws":
            toks.append(_Tok(m.lastgroup, text, byte))
        byte += len(text.encode("utf-8"))
        pos = m.end()
    toks.append(_Tok("end", "", byte))
    return toks


# ------------------------------------------------------------------ parsing


class _Parser:
    def __init__(self, source: str):
        self.toks = _tokenize(source)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def _is(self, text: str) -> bool:
        return self.tok.kind == "op" and self.tok.text == text

    def _fail(self, expected):
        t = self.tok
        found = "end of input" if t.kind == "end" else repr(t.text)
        raise ExprSyntaxError(t.offset, expected, found)

    def _expect(self, text: str):
        if not self._is(text):
            self._fail({f"'{text}'"})
        self.i += 1

    def parse(self) -> Node:
        node = self.expr()
        if self.tok.kind != "end":
            self._fail({"'+'", "'-'", "'*'", "'/'", "'^'", "end of input"})
        return node

    def expr(self) -> Node:
        node = self.term()
        while self._is("+") or self._is("-"):
            op = self.tok.text
            self.i += 1
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.factor()
        while self._is("*") or self._is("/"):
            op = self.tok.text
            self.i += 1
            node = BinOp(op, node, self.factor())
        return node

    def factor(self) -> Node:
        if self._is("-"):
            self.i += 1
            return Neg(self.factor())
        base = self.atom()
        if self._is("^"):
            self.i += 1
            return BinOp("^", base, self.factor())
        return base

    def atom(self) -> Node:
        t = self.tok
        if t.kind == "number":
            self.i += 1
            return Const(float(t.text))
        if t.kind == "ident":
            self.i += 1
            if self._is("("):
                return self.call(t)
            if t.text in VARIABLES:
                return Var(t.text)
            if t.text in NAMED_CONSTANTS:
                return NamedConst(t.text)
            raise UnknownIdentifierError(t.text, t.offset)
        if self._is("("):
            self.i += 1
            node = self.expr()
            self._expect(")")
            return node
        self._fail(_ATOM_START)

    def call(self, name_tok: _Tok) -> Node:
        name = name_tok.text
        if name not in UNARY_FUNCS and name not in BINARY_FUNCS:
            raise UnknownIdentifierError(name, name_tok.offset)
        self._expect("(")
        args = [self.expr()]
        while self._is(","):
            self.i += 1
            args.append(self.expr())
        close = self.tok
        self._expect(")")
        if name in UNARY_FUNCS:
            if len(args) != 1:
                raise ExprSyntaxError(close.offset, {"')'"}, f"{len(args)} arguments to {name}")
            return Func(name, tuple(args))
        if len(args) < 2:
            raise ExprSyntaxError(close.offset, {"','"}, f"1 argument to {name}")
        node = Func(name, (args[0], args[1]))
        for extra in args[2:]:
            node = Func(name, (node, extra))
        return node


def parse_expr(source: str) -> Node:
    """Parse ``source`` into an expression tree.

    >>> parse_expr("x^2+y^2+z^2-1").evaluate(1.0, 0.0, 0.0)
    0.0
    """
    return _Parser(source).parse()


def evaluate_array(node: Node, x, y, z) -> np.ndarray:
    """Evaluate on broadcastable arrays with floating point warnings silenced."""
    with np.errstate(all="ignore"):
        out = node.evaluate(x, y, z)
    return np.broadcast_to(np.asarray(out, dtype=float), np.broadcast(x, y, z).shape)
