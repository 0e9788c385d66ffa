"""Entry-formula mini-language for defining matrices in JSON files.

Grammar, lowest to highest precedence:

    comparison   ==        (non-associative)
    additive     + -       (left)
    multiplicative * /     (left)
    unary minus
    power        ^         (right, binds tighter than unary minus)
    atoms: number literals, variables i j k, parentheses, calls

Calls: ``if(c, t, e)`` (t when c != 0), ``delta(a, b)`` (1 when a == b),
``fact(n)`` (n! for integer n >= 0), ``exp``, ``ln``, ``abs``,
``min``, ``max``.  Comparisons yield the scalars 0/1; there is no
boolean type.
"""

import math
import re
from dataclasses import dataclass

from .errors import InfmatError


class ParseError(InfmatError):
    """Malformed expression text; carries the byte offset of the problem."""

    def __init__(self, position: int, expected: str, found: str):
        super().__init__(f"at offset {position}: expected {expected}, found {found!r}")
        self.position = position
        self.expected = expected
        self.found = found


class EvalError(InfmatError):
    """Arithmetic or binding failure while evaluating an expression."""


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: object


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple


ExprAst = Num | Var | Neg | BinOp | Call

_ARITY = {"if": 3, "delta": 2, "fact": 1, "exp": 1, "ln": 1,
          "abs": 1, "min": 2, "max": 2}
_VARS = ("i", "j", "k")

_BP = {"==": 10, "+": 20, "-": 20, "*": 30, "/": 30, "^": 50}
_UNARY_BP = 40

_TOKEN = re.compile(
    r"(?P<num>\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>==|[+\-*/^(),])")


def _tokenize(src: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    n = len(src)
    while pos < n:
        if src[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(src, pos)
        if m is None:
            raise ParseError(pos, "a token", src[pos])
        kind = m.lastgroup
        tokens.append((kind, m.group(), pos))
        pos = m.end()
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, src: str):
        self.tokens = _tokenize(src)
        self.idx = 0

    def peek(self):
        return self.tokens[self.idx]

    def advance(self):
        tok = self.tokens[self.idx]
        self.idx += 1
        return tok

    def expect_op(self, op):
        kind, text, pos = self.peek()
        if kind != "op" or text != op:
            raise ParseError(pos, f"'{op}'", text or "end of input")
        return self.advance()

    def parse(self):
        node = self.expression(0)
        kind, text, pos = self.peek()
        if kind != "end":
            raise ParseError(pos, "end of input", text)
        return node

    def expression(self, rbp):
        node = self.prefix()
        while True:
            kind, text, pos = self.peek()
            if kind != "op" or text not in _BP or _BP[text] <= rbp:
                return node
            self.advance()
            node = self.infix(text, node, pos)

    def prefix(self):
        kind, text, pos = self.advance()
        if kind == "num":
            return Num(float(text))
        if kind == "name":
            if text in _ARITY:
                self.expect_op("(")
                args = [self.expression(0)]
                while True:
                    k2, t2, p2 = self.peek()
                    if k2 == "op" and t2 == ",":
                        self.advance()
                        args.append(self.expression(0))
                    else:
                        break
                self.expect_op(")")
                if len(args) != _ARITY[text]:
                    raise ParseError(pos, f"{_ARITY[text]} argument(s) to {text}",
                                     f"{len(args)} argument(s)")
                return Call(text, tuple(args))
            if text in _VARS:
                return Var(text)
            raise ParseError(pos, "a variable (i, j, k) or function", text)
        if kind == "op" and text == "(":
            node = self.expression(0)
            self.expect_op(")")
            return node
        if kind == "op" and text == "-":
            return Neg(self.expression(_UNARY_BP))
        raise ParseError(pos, "a value", text or "end of input")

    def infix(self, op, left, pos):
        if op == "==":
            right = self.expression(_BP[op])
            kind, text, next_pos = self.peek()
            if kind == "op" and text == "==":
                raise ParseError(next_pos, "a non-chained comparison", text)
            return BinOp(op, left, right)
        if op == "^":
            # right-associative
            right = self.expression(_BP[op] - 1)
            return BinOp(op, left, right)
        right = self.expression(_BP[op])
        return BinOp(op, left, right)


def parse(src: str) -> ExprAst:
    """Parse expression text; raises :class:`ParseError` with a position."""
    return _Parser(src).parse()


def _as_float(x) -> float:
    try:
        return float(x)
    except OverflowError:
        return math.inf


def eval_ast(node: ExprAst, i: int | None = None, j: int | None = None,
             k: int | None = None) -> float:
    """Evaluate an expression with the given variable bindings.

    Unbound variables, division by zero, ``ln`` of a non-positive value
    and ``fact`` of a negative or non-integer all raise
    :class:`EvalError`.  Overflow saturates to ``inf``, which downstream
    convergence checks treat as divergence.
    """
    env = {}
    if i is not None:
        env["i"] = float(i)
    if j is not None:
        env["j"] = float(j)
    if k is not None:
        env["k"] = float(k)
    return _eval(node, env)


def _eval(node, env) -> float:
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        if node.name not in env:
            raise EvalError(f"unbound variable {node.name!r}")
        return env[node.name]
    if isinstance(node, Neg):
        return -_eval(node.operand, env)
    if isinstance(node, BinOp):
        a = _eval(node.left, env)
        if node.op == "==":
            return 1.0 if a == _eval(node.right, env) else 0.0
        b = _eval(node.right, env)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if node.op == "/":
            if b == 0.0:
                raise EvalError("division by zero")
            return a / b
        if node.op == "^":
            try:
                return math.pow(a, b)
            except OverflowError:
                return math.inf
            except ValueError as exc:
                raise EvalError(f"domain error in {a} ^ {b}") from exc
        raise EvalError(f"unknown operator {node.op!r}")
    if isinstance(node, Call):
        if node.func == "if":
            cond = _eval(node.args[0], env)
            return _eval(node.args[1] if cond != 0.0 else node.args[2], env)
        args = [_eval(a, env) for a in node.args]
        if node.func == "delta":
            return 1.0 if args[0] == args[1] else 0.0
        if node.func == "fact":
            x = args[0]
            nearest = round(x)
            if abs(x - nearest) > 1e-9 or nearest < 0:
                raise EvalError(f"fact requires a non-negative integer, got {x}")
            return _as_float(math.factorial(int(nearest)))
        if node.func == "exp":
            try:
                return math.exp(args[0])
            except OverflowError:
                return math.inf
        if node.func == "ln":
            if args[0] <= 0.0:
                raise EvalError(f"ln of non-positive value {args[0]}")
            return math.log(args[0])
        if node.func == "abs":
            return abs(args[0])
        if node.func == "min":
            return min(args)
        if node.func == "max":
            return max(args)
    raise EvalError(f"cannot evaluate node {node!r}")


def _num_text(value: float) -> str:
    if value.is_integer() and abs(value) < 1e16:
        return str(int(value))
    return repr(value)


def pretty(node: ExprAst) -> str:
    """Render an AST back to source; reparses to an identical tree."""
    return _pretty(node, 0)


def _pretty(node, context_bp) -> str:
    if isinstance(node, Num):
        return _num_text(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Call):
        return f"{node.func}({', '.join(_pretty(a, 0) for a in node.args)})"
    if isinstance(node, Neg):
        text = "-" + _pretty(node.operand, _UNARY_BP)
        return f"({text})" if context_bp >= _UNARY_BP else text
    if isinstance(node, BinOp):
        bp = _BP[node.op]
        if node.op == "^":
            left = _pretty(node.left, bp)
            right = _pretty(node.right, bp - 1)
        elif node.op == "==":
            # non-associative: nested comparisons always need parentheses
            left = _pretty(node.left, bp)
            right = _pretty(node.right, bp)
        else:
            left = _pretty(node.left, bp - 1)
            right = _pretty(node.right, bp)
        text = f"{left} {node.op} {right}" if node.op == "==" else f"{left}{node.op}{right}"
        return f"({text})" if bp <= context_bp else text
    raise TypeError(f"not an AST node: {node!r}")


def compile_entry(src: str):
    """Parse once, return a fast ``(i, j) -> float`` oracle."""
    ast = parse(src)

    def oracle(i, j, _ast=ast):
        return eval_ast(_ast, i=i, j=j)

    return oracle


def compile_index(src: str):
    """Parse once, return a fast ``(i) -> float`` oracle for vectors."""
    ast = parse(src)

    def oracle(i, _ast=ast):
        return eval_ast(_ast, i=i)

    return oracle
