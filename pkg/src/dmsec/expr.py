"""Small integer/boolean expression language for guards, updates and predicates.

Grammar, loosest binding first::

    expr    := or (('=>' | '->') expr)?
    or      := and (('or' | '||') and)*
    and     := not (('and' | '&&') not)*
    not     := ('not' | '!') not | cmp
    cmp     := sum (('=' | '==' | '!=' | '<' | '<=' | '>' | '>=') sum)?
    sum     := term (('+' | '-') term)*
    term    := unary (('mod' | '%') unary)*
    unary   := '-' unary | atom
    atom    := INT | 'true' | 'false' | NAME | '(' expr ')'

Unicode spellings (≠ ≤ ≥ ∧ ∨ ¬ ⟹) are accepted too.
"""
from __future__ import annotations

import operator
import re
from typing import Any, Callable, Mapping

__all__ = ["Expr", "parse_expr", "ExprError", "PredicateParseError", "EvalError"]


class ExprError(ValueError):
    pass


class PredicateParseError(ExprError):
    pass


class EvalError(ExprError):
    pass


_TOKEN = re.compile(r"""
    \s*(?:
      (?P<int>\d+)
    | (?P<op>==|!=|<=|>=|=>|->|&&|\|\||[=<>+\-%()!]|≠|≤|≥|∧|∨|¬|⟹)
    | (?P<name>[^\W\d]\w*)
    )""", re.VERBOSE)

_ALIASES = {
    "==": "=", "≠": "!=", "≤": "<=", "≥": ">=", "∧": "and", "&&": "and",
    "∨": "or", "||": "or", "¬": "not", "!": "not", "⟹": "=>", "->": "=>",
    "%": "mod",
}
_KEYWORDS = {"and", "or", "not", "mod", "true", "false"}


def _tokenize(src: str) -> list[tuple[str, Any]]:
    toks = []
    pos = 0
    src = src.rstrip()
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if not m or m.end() == pos:
            raise PredicateParseError(f"unexpected character at {pos} in {src!r}")
        pos = m.end()
        if m.group("int") is not None:
            toks.append(("int", int(m.group("int"))))
        elif m.group("op") is not None:
            op = m.group("op")
            toks.append(("op", _ALIASES.get(op, op)))
        else:
            name = m.group("name")
            if name in _KEYWORDS:
                toks.append(("op", name))
            else:
                toks.append(("name", name))
    toks.append(("end", None))
    return toks


class _Parser:
    def __init__(self, src: str):
        self.src = src
        self.toks = _tokenize(src)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def accept(self, *ops):
        kind, val = self.toks[self.i]
        if kind == "op" and val in ops:
            self.i += 1
            return val
        return None

    def fail(self, what):
        kind, val = self.peek()
        got = "end of input" if kind == "end" else repr(val)
        raise PredicateParseError(f"expected {what}, got {got} in {self.src!r}")

    def parse(self):
        node = self.expr()
        if self.peek()[0] != "end":
            self.fail("end of input")
        return node

    def expr(self):
        left = self.or_()
        if self.accept("=>"):
            return ("=>", left, self.expr())
        return left

    def or_(self):
        node = self.and_()
        while self.accept("or"):
            node = ("or", node, self.and_())
        return node

    def and_(self):
        node = self.not_()
        while self.accept("and"):
            node = ("and", node, self.not_())
        return node

    def not_(self):
        if self.accept("not"):
            return ("not", self.not_())
        return self.cmp()

    def cmp(self):
        left = self.sum()
        op = self.accept("=", "!=", "<", "<=", ">", ">=")
        if op:
            return (op, left, self.sum())
        return left

    def sum(self):
        node = self.term()
        while True:
            op = self.accept("+", "-")
            if not op:
                return node
            node = (op, node, self.term())

    def term(self):
        node = self.unary()
        while self.accept("mod"):
            node = ("mod", node, self.unary())
        return node

    def unary(self):
        if self.accept("-"):
            return ("neg", self.unary())
        return self.atom()

    def atom(self):
        kind, val = self.peek()
        if kind == "int":
            self.i += 1
            return ("lit", val)
        if kind == "name":
            self.i += 1
            return ("var", val)
        if self.accept("true"):
            return ("lit", True)
        if self.accept("false"):
            return ("lit", False)
        if self.accept("("):
            node = self.expr()
            if not self.accept(")"):
                self.fail("')'")
            return node
        self.fail("an operand")


def _int(v):
    if isinstance(v, bool) or not isinstance(v, int):
        raise EvalError(f"expected an integer, got {v!r}")
    return v


def _bool(v):
    if not isinstance(v, bool):
        raise EvalError(f"expected a boolean, got {v!r}")
    return v


_ARITH = {"+": operator.add, "-": operator.sub}
_ORDER = {"<": operator.lt, "<=": operator.le, ">": operator.gt, ">=": operator.ge}


def _compile(node, lookup):
    tag = node[0]
    if tag == "lit":
        v = node[1]
        return lambda env: v
    if tag == "var":
        return lookup(node[1])
    if tag == "neg":
        f = _compile(node[1], lookup)
        return lambda env: -_int(f(env))
    if tag == "not":
        f = _compile(node[1], lookup)
        return lambda env: not _bool(f(env))
    a = _compile(node[1], lookup)
    b = _compile(node[2], lookup)
    if tag == "and":
        return lambda env: _bool(a(env)) and _bool(b(env))
    if tag == "or":
        return lambda env: _bool(a(env)) or _bool(b(env))
    if tag == "=>":
        return lambda env: (not _bool(a(env))) or _bool(b(env))
    if tag == "=":
        return lambda env: a(env) == b(env)
    if tag == "!=":
        return lambda env: a(env) != b(env)
    if tag in _ORDER:
        op = _ORDER[tag]
        return lambda env: op(_int(a(env)), _int(b(env)))
    if tag in _ARITH:
        op = _ARITH[tag]
        return lambda env: op(_int(a(env)), _int(b(env)))
    if tag == "mod":
        def mod(env):
            d = _int(b(env))
            if d == 0:
                raise EvalError("modulo by zero")
            return _int(a(env)) % d
        return mod
    raise AssertionError(tag)


def _names(node, out):
    if node[0] == "var":
        out.add(node[1])
    elif node[0] != "lit":
        for child in node[1:]:
            _names(child, out)
    return out


class Expr:
    """A parsed expression; equality is by source text."""

    __slots__ = ("source", "tree", "names")

    def __init__(self, source: str):
        self.source = source.strip()
        self.tree = _Parser(self.source).parse()
        self.names = frozenset(_names(self.tree, set()))

    def __eq__(self, other):
        return isinstance(other, Expr) and self.source == other.source

    def __hash__(self):
        return hash(self.source)

    def __repr__(self):
        return f"Expr({self.source!r})"

    def __str__(self):
        return self.source

    def compile_indexed(self, slots: Mapping[str, int]) -> Callable[[tuple], Any]:
        """Compile against a tuple of values, ``slots`` naming each position."""
        def lookup(name):
            if name not in slots:
                raise ExprError(f"unknown register {name!r} in {self.source!r}")
            idx = slots[name]
            return lambda env: env[idx]
        return _compile(self.tree, lookup)

    def compile_env(self) -> Callable[[Mapping[str, Any]], Any]:
        """Compile against a name->value mapping; unbound names denote themselves."""
        def lookup(name):
            return lambda env: env.get(name, name)
        return _compile(self.tree, lookup)

    def evaluate(self, env: Mapping[str, Any]) -> Any:
        return self.compile_env()(env)


def parse_expr(source: str) -> Expr:
    return Expr(source)
