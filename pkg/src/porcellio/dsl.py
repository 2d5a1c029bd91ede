"""A small text format for constrained problems (``.cop`` files).

Example::

    # pressure vessel
    name pressure_vessel
    dimension 4
    minimize 0.6224*x1*x3*x4 + 1.7781*x2*x3^2
    -x1 + 0.0193*x3 <= 0
    90 <= 80.5 + 0.007*x2*x4 <= 110
    x1 in {1..99} * 0.0625
    x3 in [10, 200]

Expressions use ``+ - * / ^``, unary minus, parentheses, numeric literals,
the constant ``pi`` and variables ``x1``..``xd``. ``^`` binds tightest and is
right-associative, then unary minus, then ``* /``, then ``+ -``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .problem import (Clause, Continuous, EvaluationError, Grid, Problem,
                      split_double_sided)


class DSLError(ValueError):
    pass


class DSLSyntaxError(DSLError):
    def __init__(self, message, line=0, column=0):
        self.line, self.column = line, column
        super().__init__(f"line {line}, column {column}: {message}")


class ValidationError(DSLError):
    """One or more semantic problems; ``issues`` holds ``(line, message)`` pairs."""

    def __init__(self, issues):
        self.issues = list(issues)
        super().__init__("; ".join(f"line {ln}: {msg}" for ln, msg in self.issues))


class DSLEvaluationError(EvaluationError):
    pass


# -- AST


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    index: int  # 1-based, as written


@dataclass(frozen=True)
class Pi:
    pass


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


Expr = Union[Num, Var, Pi, Neg, BinOp]


def variables(expr) -> set:
    if isinstance(expr, Var):
        return {expr.index}
    if isinstance(expr, Neg):
        return variables(expr.operand)
    if isinstance(expr, BinOp):
        return variables(expr.left) | variables(expr.right)
    return set()


def to_text(expr) -> str:
    """Fully parenthesized source text that parses back to ``expr``."""
    if isinstance(expr, Num):
        return repr(float(expr.value))
    if isinstance(expr, Var):
        return f"x{expr.index}"
    if isinstance(expr, Pi):
        return "pi"
    if isinstance(expr, Neg):
        return f"(-{to_text(expr.operand)})"
    return f"({to_text(expr.left)} {expr.op} {to_text(expr.right)})"


# -- evaluation


def _fail(msg):
    raise DSLEvaluationError(msg)


def evaluate(expr, x):
    """Evaluate at a point ``(d,)`` or a batch ``(n, d)``.

    Division by zero, zero to a negative power and any other non-finite
    intermediate raise :class:`DSLEvaluationError`.
    """
    x = np.asarray(x, dtype=float)
    with np.errstate(all="ignore"):
        out = _eval(expr, x)
    if np.ndim(out) == 0 and x.ndim > 1:
        out = np.full(x.shape[:-1], out)
    return float(out) if np.ndim(out) == 0 else out


def _eval(e, x):
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Pi):
        return math.pi
    if isinstance(e, Var):
        if e.index > x.shape[-1]:
            _fail(f"x{e.index} out of range for dimension {x.shape[-1]}")
        return x[..., e.index - 1]
    if isinstance(e, Neg):
        return -_eval(e.operand, x)
    a, b = _eval(e.left, x), _eval(e.right, x)
    if e.op == "+":
        r = a + b
    elif e.op == "-":
        r = a - b
    elif e.op == "*":
        r = a * b
    elif e.op == "/":
        if np.any(np.asarray(b) == 0):
            _fail("division by zero")
        r = a / b
    else:
        if np.any((np.asarray(a) == 0) & (np.asarray(b) < 0)):
            _fail("zero raised to a negative power")
        r = np.power(a, b)
    if not np.all(np.isfinite(r)):
        _fail(f"non-finite result in '{to_text(e)}'")
    return r


class CompiledExpr:
    """Picklable callable wrapper so compiled problems can cross processes."""

    def __init__(self, expr, offset: float = 0.0, sign: float = 1.0):
        self.expr, self.offset, self.sign = expr, offset, sign

    def __call__(self, x):
        v = evaluate(self.expr, x)
        return v if self.sign == 1.0 and self.offset == 0.0 \
            else self.sign * v + self.offset

    def __repr__(self):
        return f"CompiledExpr({to_text(self.expr)})"


# -- tokenizer and expression parser

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<num>(?:\d+\.(?!\.)\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>\.\.|<=|[-+*/^(){}\[\],])
""", re.VERBOSE)


@dataclass
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str, line: int = 1) -> list:
    tokens, pos = [], 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise DSLSyntaxError(f"unexpected character {text[pos]!r}", line, pos + 1)
        if m.lastgroup != "ws":
            tokens.append(Token(m.lastgroup, m.group(), line, pos + 1))
        pos = m.end()
    tokens.append(Token("end", "", line, len(text) + 1))
    return tokens


_VAR = re.compile(r"x([1-9]\d*)\Z")


class _Parser:
    def __init__(self, tokens):
        self.toks, self.i = tokens, 0

    @property
    def tok(self):
        return self.toks[self.i]

    def advance(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg, tok=None):
        tok = tok or self.tok
        raise DSLSyntaxError(msg, tok.line, tok.col)

    def expect(self, text):
        if self.tok.text != text:
            self.error(f"expected {text!r}, found {self.tok.text or 'end of line'!r}")
        return self.advance()

    def at(self, *texts):
        return self.tok.kind == "op" and self.tok.text in texts

    def expression(self):
        node = self.term()
        while self.at("+", "-"):
            op = self.advance().text
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.at("*", "/"):
            op = self.advance().text
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        if self.at("-"):
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.at("^"):
            self.advance()
            return BinOp("^", base, self.unary())
        return base

    def atom(self):
        t = self.tok
        if t.kind == "num":
            self.advance()
            return Num(float(t.text))
        if t.kind == "name":
            self.advance()
            if t.text == "pi":
                return Pi()
            m = _VAR.match(t.text)
            if m is None:
                self.error(f"unknown name {t.text!r}", t)
            return Var(int(m.group(1)))
        if self.at("("):
            self.advance()
            node = self.expression()
            self.expect(")")
            return node
        self.error(f"expected an expression, found {t.text or 'end of line'!r}")

    def integer(self):
        neg = self.at("-") and bool(self.advance())
        t = self.tok
        if t.kind != "num" or not t.text.isdigit():
            self.error("expected an integer")
        self.advance()
        return -int(t.text) if neg else int(t.text)

    def done(self):
        if self.tok.kind != "end":
            self.error(f"unexpected {self.tok.text!r}")


def parse_expr(text: str) -> Expr:
    p = _Parser(tokenize(text))
    node = p.expression()
    p.done()
    return node


# -- problem files


@dataclass(frozen=True)
class ConstraintClause:
    """``lower <= expr <= upper``; ``lower`` is None for single-sided clauses."""

    expr: Expr
    upper: float
    lower: Optional[float] = None
    line: int = field(default=0, compare=False)


@dataclass
class ProblemSpecFile:
    dimension: int
    objective: Expr
    constraints: list
    domains: dict  # 1-based variable index -> VariableDomain
    name: str = "custom"
    lines: dict = field(default_factory=dict, compare=False)


def _constant(p: _Parser, what: str) -> float:
    start = p.tok
    node = p.expression()
    if variables(node):
        p.error(f"{what} must not depend on variables", start)
    try:
        return evaluate(node, np.zeros(0))
    except DSLEvaluationError as exc:
        p.error(str(exc), start)


def _domain(p: _Parser, var_tok: Token):
    if p.at("["):
        p.advance()
        lo = _constant(p, "lower bound")
        p.expect(",")
        hi = _constant(p, "upper bound")
        p.expect("]")
        p.done()
        if lo > hi:
            p.error(f"empty interval [{lo}, {hi}]", var_tok)
        return Continuous(lo, hi)
    if p.at("{"):
        p.advance()
        a = p.integer()
        p.expect("..")
        b = p.integer()
        p.expect("}")
        p.expect("*")
        step = _constant(p, "grid step")
        p.done()
        if a > b or step <= 0:
            p.error("empty grid or non-positive step", var_tok)
        return Grid(step, a, b)
    p.error("expected '[lo, hi]' or '{a..b} * step'")


def parse(source: str) -> ProblemSpecFile:
    """Parse and validate ``.cop`` source text."""
    dimension = None
    objective = None
    name = "custom"
    constraints, domains, lines, issues = [], {}, {}, []
    for ln, raw in enumerate(source.splitlines(), start=1):
        text = raw.split("#", 1)[0]
        if not text.strip():
            continue
        p = _Parser(tokenize(text, ln))
        head = p.tok
        if head.kind == "name" and head.text in ("dimension", "name", "minimize"):
            p.advance()
            if head.text == "dimension":
                if dimension is not None:
                    issues.append((ln, "dimension declared twice"))
                dimension = p.integer()
                p.done()
                if dimension < 1:
                    issues.append((ln, "dimension must be positive"))
                lines["dimension"] = ln
            elif head.text == "name":
                t = p.advance()
                if t.kind != "name":
                    p.error("expected an identifier", t)
                p.done()
                name = t.text
            else:
                if objective is not None:
                    issues.append((ln, "objective declared twice"))
                objective = p.expression()
                p.done()
                lines["objective"] = ln
            continue
        nxt = p.toks[1]
        if (head.kind == "name" and _VAR.match(head.text)
                and nxt.kind == "name" and nxt.text == "in"):
            p.advance()
            p.advance()
            index = int(_VAR.match(head.text).group(1))
            dom = _domain(p, head)
            if index in domains:
                issues.append((ln, f"duplicate domain for {head.text}"))
            else:
                domains[index] = dom
                lines[index] = ln
            continue
        first = p.expression()
        p.expect("<=")
        second = p.expression()
        if p.at("<="):
            p.advance()
            third_tok = p.tok
            third = p.expression()
            p.done()
            for node, tok, what in ((first, head, "lower bound"),
                                    (third, third_tok, "upper bound")):
                if variables(node):
                    p.error(f"{what} must not depend on variables", tok)
            lo, hi = evaluate(first, np.zeros(0)), evaluate(third, np.zeros(0))
            if lo > hi:
                issues.append((ln, f"lower bound {lo} exceeds upper bound {hi}"))
            constraints.append(ConstraintClause(second, hi, lo, ln))
        else:
            p.done()
            if variables(second):
                p.error("right-hand side must be a constant", head)
            constraints.append(ConstraintClause(first, evaluate(second, np.zeros(0)),
                                                None, ln))

    if dimension is None:
        issues.append((0, "missing 'dimension' declaration"))
    if objective is None:
        issues.append((0, "missing 'minimize' objective"))
    if dimension is not None:
        for index, ln in sorted((k, v) for k, v in lines.items() if isinstance(k, int)):
            if index > dimension:
                issues.append((ln, f"x{index} exceeds declared dimension {dimension}"))
        for i in range(1, dimension + 1):
            if i not in domains:
                issues.append((0, f"x{i} has no domain declaration"))
        used = [(lines.get("objective", 0), objective)] if objective else []
        used += [(c.line, c.expr) for c in constraints]
        for ln, expr in used:
            for i in sorted(variables(expr)):
                if i > dimension:
                    issues.append((ln, f"undeclared variable x{i}"))
    if issues:
        raise ValidationError(issues)
    return ProblemSpecFile(dimension, objective, constraints, domains, name, lines)


def to_source(spec: ProblemSpecFile) -> str:
    """Render a spec back to ``.cop`` text."""
    out = [f"name {spec.name}", f"dimension {spec.dimension}",
           f"minimize {to_text(spec.objective)}"]
    for c in spec.constraints:
        if c.lower is None:
            out.append(f"{to_text(c.expr)} <= {c.upper!r}")
        else:
            out.append(f"{c.lower!r} <= {to_text(c.expr)} <= {c.upper!r}")
    for i in sorted(spec.domains):
        dom = spec.domains[i]
        if isinstance(dom, Grid):
            out.append(f"x{i} in {{{dom.min_multiple}..{dom.max_multiple}}} * {dom.step!r}")
        else:
            out.append(f"x{i} in [{dom.lower!r}, {dom.upper!r}]")
    return "\n".join(out) + "\n"


def compile_spec(spec: ProblemSpecFile) -> Problem:
    constraints, clauses = [], []
    for k, c in enumerate(spec.constraints, start=1):
        g = CompiledExpr(c.expr)
        if c.lower is None:
            constraints.append(CompiledExpr(c.expr, offset=-c.upper))
            clauses.append(Clause(f"g{k}", g, -np.inf, c.upper))
        else:
            constraints.extend(split_double_sided(g, c.lower, c.upper))
            clauses.append(Clause(f"g{k}", g, c.lower, c.upper))
    return Problem(
        objective=CompiledExpr(spec.objective),
        constraints=tuple(constraints),
        domains=tuple(spec.domains[i] for i in range(1, spec.dimension + 1)),
        name=spec.name,
        clauses=tuple(clauses),
    )


def load(path) -> Problem:
    return compile_spec(parse(Path(path).read_text(encoding="utf-8")))


def load_shipped(name: str) -> Problem:
    """Compile one of the bundled ``.cop`` files by stem."""
    from importlib import resources

    text = resources.files("porcellio").joinpath(f"data/{name}.cop").read_text(
        encoding="utf-8")
    return compile_spec(parse(text))
