"""A small piecewise expression language.

Expressions define shape functions, custom fusion operations and survival
functions inside scenario files.  Grammar (see README for the full write-up):

    expr      := term (('+'|'-') term)*
    term      := unary (('*'|'/') unary)*
    unary     := '-' unary | power
    power     := atom ('^' unary)?          # right-associative
    atom      := NUMBER | 'inf' | NAME | call | '(' expr ')'
               | indicator | piecewise
    call      := ('sqrt'|'abs'|'pos') '(' expr ')'
               | ('min'|'max') '(' expr ',' expr ')'
    indicator := 'ind' interval '(' expr ')'
    piecewise := 'piecewise' NAME? '{' piece (';' piece)* '}'
    piece     := interval ':' expr
    interval  := ('['|'(') bound ',' bound (']'|')')
    bound     := '-'? (NUMBER | 'inf')

Evaluation is plain IEEE binary64 with infinity propagated by extended-real
rules and the multiplicative convention 0*inf = 0.  A negative *final* value
is a domain error; negative intermediates are fine (clamp explicitly with
``pos``).
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .extreal import INF, as_scalar, xmul


class ExprError(Exception):
    pass


class ParseError(ExprError):
    def __init__(self, message, line, col):
        super().__init__(f"{message} (line {line}, column {col})")
        self.line = line
        self.col = col


class EvalError(ExprError):
    pass


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------


def _fmt_num(v: float) -> str:
    if v == INF:
        return "inf"
    if v == int(v) and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float
    closed_lo: bool
    closed_hi: bool

    def contains(self, x):
        lo_ok = (x >= self.lo) if self.closed_lo else (x > self.lo)
        hi_ok = (x <= self.hi) if self.closed_hi else (x < self.hi)
        return lo_ok & hi_ok

    def __str__(self):
        left = "[" if self.closed_lo else "("
        right = "]" if self.closed_hi else ")"
        return f"{left}{_fmt_num(self.lo)},{_fmt_num(self.hi)}{right}"


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Bin:
    op: str  # one of + - * / ^
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class Call:
    fn: str  # sqrt | abs | pos | min | max
    args: tuple


@dataclass(frozen=True)
class Ind:
    interval: Interval
    arg: "Expr"


@dataclass(frozen=True)
class Piecewise:
    pieces: tuple  # of (Interval, Expr)
    var: str | None = None


Expr = Num | Var | Bin | Neg | Call | Ind | Piecewise

UNARY_FNS = ("sqrt", "abs", "pos")
BINARY_FNS = ("min", "max")
KEYWORDS = UNARY_FNS + BINARY_FNS + ("ind", "piecewise", "inf")


# ---------------------------------------------------------------------------
# Tokenizer / parser
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>\d+(\.\d*)?([eE][+-]?\d+)?|\.\d+([eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<sym>[-+*/^()\[\]{},;:])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str  # number | name | sym | eof
    text: str
    line: int
    col: int


def _tokenize(source: str):
    tokens = []
    line, col, pos = 1, 1, 0
    while pos < len(source):
        mo = _TOKEN_RE.match(source, pos)
        if mo is None:
            raise ParseError(f"unexpected character {source[pos]!r}", line, col)
        text = mo.group(0)
        kind = mo.lastgroup
        if kind != "ws":
            tokens.append(_Token(kind, text, line, col))
        newlines = text.count("\n")
        if newlines:
            line += newlines
            col = len(text) - text.rfind("\n")
        else:
            col += len(text)
        pos = mo.end()
    tokens.append(_Token("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, source: str):
        self.tokens = _tokenize(source)
        self.i = 0

    @property
    def cur(self) -> _Token:
        return self.tokens[self.i]

    def error(self, message):
        raise ParseError(message, self.cur.line, self.cur.col)

    def advance(self) -> _Token:
        tok = self.cur
        self.i += 1
        return tok

    def accept(self, text) -> bool:
        if self.cur.kind == "sym" and self.cur.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text) -> None:
        if not self.accept(text):
            self.error(f"expected {text!r}, found {self.cur.text!r}")

    def parse(self) -> Expr:
        e = self.expr()
        if self.cur.kind != "eof":
            self.error(f"unexpected trailing input {self.cur.text!r}")
        return e

    def expr(self) -> Expr:
        e = self.term()
        while self.cur.kind == "sym" and self.cur.text in "+-":
            op = self.advance().text
            e = Bin(op, e, self.term())
        return e

    def term(self) -> Expr:
        e = self.unary()
        while self.cur.kind == "sym" and self.cur.text in "*/":
            op = self.advance().text
            e = Bin(op, e, self.unary())
        return e

    def unary(self) -> Expr:
        if self.accept("-"):
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        e = self.atom()
        if self.cur.kind == "sym" and self.cur.text == "^":
            self.advance()
            e = Bin("^", e, self.unary())
        return e

    def atom(self) -> Expr:
        tok = self.cur
        if tok.kind == "number":
            self.advance()
            return Num(float(tok.text))
        if tok.kind == "name":
            name = tok.text
            if name == "inf":
                self.advance()
                return Num(INF)
            if name in UNARY_FNS:
                self.advance()
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(name, (arg,))
            if name in BINARY_FNS:
                self.advance()
                self.expect("(")
                a = self.expr()
                self.expect(",")
                b = self.expr()
                self.expect(")")
                return Call(name, (a, b))
            if name == "ind":
                self.advance()
                interval = self.interval()
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Ind(interval, arg)
            if name == "piecewise":
                self.advance()
                return self.piecewise()
            self.advance()
            return Var(name)
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        self.error(f"unexpected token {tok.text!r}")

    def piecewise(self) -> Expr:
        var = None
        if self.cur.kind == "name" and self.cur.text not in KEYWORDS:
            var = self.advance().text
        self.expect("{")
        pieces = [self.piece()]
        while self.accept(";"):
            pieces.append(self.piece())
        self.expect("}")
        self._check_disjoint(pieces)
        return Piecewise(tuple(pieces), var)

    def piece(self):
        interval = self.interval()
        self.expect(":")
        return (interval, self.expr())

    def interval(self) -> Interval:
        if self.accept("["):
            closed_lo = True
        elif self.accept("("):
            closed_lo = False
        else:
            self.error("expected '[' or '(' starting an interval")
        lo = self.bound()
        self.expect(",")
        hi = self.bound()
        if self.accept("]"):
            closed_hi = True
        elif self.accept(")"):
            closed_hi = False
        else:
            self.error("expected ']' or ')' closing an interval")
        if not lo <= hi:
            self.error(f"empty interval: {lo} > {hi}")
        return Interval(lo, hi, closed_lo, closed_hi)

    def bound(self) -> float:
        sign = -1.0 if self.accept("-") else 1.0
        tok = self.cur
        if tok.kind == "number":
            self.advance()
            return sign * float(tok.text)
        if tok.kind == "name" and tok.text == "inf":
            self.advance()
            return sign * INF
        self.error("expected a numeric interval bound")

    def _check_disjoint(self, pieces):
        ordered = sorted(pieces, key=lambda p: (p[0].lo, not p[0].closed_lo))
        for (a, _), (b, _) in zip(ordered, ordered[1:]):
            if a.hi > b.lo or (a.hi == b.lo and a.closed_hi and b.closed_lo):
                self.error(f"overlapping piecewise intervals {a} and {b}")


def parse(source: str) -> Expr:
    """Parse a source string into an AST; raises ParseError with location."""
    return _Parser(source).parse()


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


def free_vars(e: Expr) -> frozenset:
    if isinstance(e, Num):
        return frozenset()
    if isinstance(e, Var):
        return frozenset((e.name,))
    if isinstance(e, Bin):
        return free_vars(e.left) | free_vars(e.right)
    if isinstance(e, Neg):
        return free_vars(e.arg)
    if isinstance(e, Call):
        out = frozenset()
        for a in e.args:
            out |= free_vars(a)
        return out
    if isinstance(e, Ind):
        return free_vars(e.arg)
    if isinstance(e, Piecewise):
        out = frozenset((e.var,)) if e.var else frozenset()
        for _, sub in e.pieces:
            out |= free_vars(sub)
        return out
    raise TypeError(f"not an Expr: {e!r}")


def _ev(e: Expr, bindings: dict):
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Var):
        try:
            return bindings[e.name]
        except KeyError:
            raise EvalError(f"unbound variable {e.name!r}") from None
    if isinstance(e, Neg):
        return -_ev(e.arg, bindings)
    if isinstance(e, Bin):
        left = _ev(e.left, bindings)
        right = _ev(e.right, bindings)
        if e.op == "+":
            return left + right
        if e.op == "-":
            with np.errstate(invalid="ignore"):
                return left - right
        if e.op == "*":
            return xmul(left, right)
        if e.op == "/":
            if np.any(np.asarray(right) == 0.0):
                raise EvalError("division by zero")
            return left / right
        if e.op == "^":
            with np.errstate(invalid="ignore"):
                return np.power(left, right) if not (np.isscalar(left) and np.isscalar(right)) else left**right
        raise EvalError(f"unknown operator {e.op!r}")
    if isinstance(e, Call):
        vals = [_ev(a, bindings) for a in e.args]
        if e.fn == "sqrt":
            if np.any(np.asarray(vals[0]) < 0):
                raise EvalError("sqrt of a negative value")
            return np.sqrt(vals[0]) if not np.isscalar(vals[0]) else vals[0] ** 0.5
        if e.fn == "abs":
            return np.abs(vals[0]) if not np.isscalar(vals[0]) else abs(vals[0])
        if e.fn == "pos":
            return np.maximum(vals[0], 0.0) if not np.isscalar(vals[0]) else max(vals[0], 0.0)
        if e.fn == "min":
            return np.minimum(vals[0], vals[1]) if not (np.isscalar(vals[0]) and np.isscalar(vals[1])) else min(vals)
        if e.fn == "max":
            return np.maximum(vals[0], vals[1]) if not (np.isscalar(vals[0]) and np.isscalar(vals[1])) else max(vals)
        raise EvalError(f"unknown function {e.fn!r}")
    if isinstance(e, Ind):
        v = _ev(e.arg, bindings)
        hit = e.interval.contains(v)
        if np.isscalar(hit) or isinstance(hit, (bool, np.bool_)):
            return 1.0 if hit else 0.0
        return np.where(hit, 1.0, 0.0)
    if isinstance(e, Piecewise):
        var = e.var
        if var is None:
            if len(bindings) != 1:
                raise EvalError(
                    "piecewise without an explicit guard variable needs exactly one bound variable"
                )
            var = next(iter(bindings))
        if var not in bindings:
            raise EvalError(f"unbound variable {var!r}")
        x = bindings[var]
        if np.isscalar(x):
            for interval, sub in e.pieces:
                if interval.contains(x):
                    return _ev(sub, bindings)
            raise EvalError(f"point {x} outside all piecewise intervals")
        x = np.asarray(x, dtype=float)
        result = np.zeros_like(x)
        covered = np.zeros(x.shape, dtype=bool)
        for interval, sub in e.pieces:
            hit = interval.contains(x) & ~covered
            if np.any(hit):
                sub_val = _ev(sub, bindings)
                result = np.where(hit, sub_val, result)
            covered |= hit
        if not np.all(covered):
            bad = float(x[~covered].flat[0])
            raise EvalError(f"point {bad} outside all piecewise intervals")
        return result
    raise TypeError(f"not an Expr: {e!r}")


def eval_expr(e: Expr, bindings: dict):
    """Evaluate an AST.  Bindings may be floats or numpy arrays.

    Raises EvalError on unbound variables, indeterminate forms and negative
    final values.
    """
    val = _ev(e, bindings)
    arr = np.asarray(val, dtype=float)
    if np.any(np.isnan(arr)):
        raise EvalError("indeterminate form in evaluation")
    if np.any(arr < 0.0):
        bad = float(arr[arr < 0.0].flat[0]) if arr.ndim else float(arr)
        raise EvalError(f"negative final value {bad}")
    return as_scalar(val)


# ---------------------------------------------------------------------------
# Pretty printer
# ---------------------------------------------------------------------------


def pretty(e: Expr) -> str:
    """Canonical text form; ``parse(pretty(e))`` is structurally equal to e."""
    if isinstance(e, Num):
        return _fmt_num(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Bin):
        return f"({pretty(e.left)} {e.op} {pretty(e.right)})"
    if isinstance(e, Neg):
        return f"(-{pretty(e.arg)})"
    if isinstance(e, Call):
        return f"{e.fn}({', '.join(pretty(a) for a in e.args)})"
    if isinstance(e, Ind):
        return f"ind{e.interval}({pretty(e.arg)})"
    if isinstance(e, Piecewise):
        head = f"piecewise {e.var} " if e.var else "piecewise"
        body = "; ".join(f"{iv}: {pretty(sub)}" for iv, sub in e.pieces)
        return f"{head}{{ {body} }}"
    raise TypeError(f"not an Expr: {e!r}")


# ---------------------------------------------------------------------------
# Grid monotonicity evidence
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MonotoneVerdict:
    holds: bool
    witness: tuple | None  # ((x1, v1), (x2, v2)) on failure
    direction: str
    step: float
    note: str = "grid evidence, not a proof"


def check_monotone(e, var, lo, hi, direction="nondecreasing", grid_step=0.01):
    """Sample e on a grid over [lo, hi]; report monotonicity in `direction`.

    direction is one of nondecreasing | increasing | nonincreasing |
    decreasing.  The result is labelled grid evidence, never a proof.
    """
    if grid_step <= 0:
        raise ValueError("grid_step must be positive")
    count = max(int(round((hi - lo) / grid_step)), 1) + 1
    xs = np.linspace(lo, hi, count)
    vals = np.asarray(eval_expr(e, {var: xs}), dtype=float)
    diffs = np.diff(vals)
    tol = 1e-12
    if direction == "nondecreasing":
        bad = diffs < -tol
    elif direction == "increasing":
        bad = diffs <= tol
    elif direction == "nonincreasing":
        bad = diffs > tol
    elif direction == "decreasing":
        bad = diffs >= -tol
    else:
        raise ValueError(f"unknown direction {direction!r}")
    idx = np.flatnonzero(bad)
    if idx.size:
        i = int(idx[0])
        witness = ((float(xs[i]), float(vals[i])), (float(xs[i + 1]), float(vals[i + 1])))
        return MonotoneVerdict(False, witness, direction, grid_step)
    return MonotoneVerdict(True, None, direction, grid_step)
