"""Finite measurable spaces, monotone measures and survival scenarios."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exprlang import EvalError, Expr, Interval, eval_expr, parse


class MeasureError(Exception):
    pass


MAX_ATOMS = 24
MAX_SCAN_ATOMS = 12  # exhaustive pair scans are 4^n; refuse beyond this
_EQ_TOL = 1e-12


@dataclass(frozen=True)
class FiniteSpace:
    labels: tuple

    def __post_init__(self):
        if not 1 <= len(self.labels) <= MAX_ATOMS:
            raise MeasureError(f"atom count must be in 1..{MAX_ATOMS}")
        if len(set(self.labels)) != len(self.labels):
            raise MeasureError("atom labels must be unique")

    @property
    def n(self):
        return len(self.labels)

    @property
    def full_mask(self):
        return (1 << self.n) - 1

    def mask_of(self, labels) -> int:
        mask = 0
        for lab in labels:
            try:
                mask |= 1 << self.labels.index(lab)
            except ValueError:
                raise MeasureError(f"unknown atom label {lab!r}") from None
        return mask

    def atoms_of(self, mask):
        return [i for i in range(self.n) if mask & (1 << i)]

    def labels_of(self, mask):
        return tuple(self.labels[i] for i in self.atoms_of(mask))


def space(*labels) -> FiniteSpace:
    return FiniteSpace(tuple(labels))


@dataclass(frozen=True)
class MonotoneMeasure:
    space: FiniteSpace
    table: tuple  # 2^n values indexed by mask

    def __call__(self, mask: int) -> float:
        return self.table[mask]

    @property
    def is_capacity(self):
        return abs(self.table[self.space.full_mask] - 1.0) <= _EQ_TOL

    def value_range(self):
        """Sorted distinct values of the measure (1e-12 dedup tolerance)."""
        vals = sorted(self.table)
        out = [vals[0]]
        for v in vals[1:]:
            if v - out[-1] > _EQ_TOL:
                out.append(v)
        return tuple(out)


def from_table(sp: FiniteSpace, entries) -> MonotoneMeasure:
    """Build a monotone measure from a full mask->value assignment.

    entries is a sequence of 2^n values indexed by mask, or a dict keyed by
    mask.  Monotonicity and the boundary conditions are checked exhaustively.
    """
    size = 1 << sp.n
    if isinstance(entries, dict):
        missing = [m for m in range(size) if m not in entries]
        if missing:
            raise MeasureError(f"missing mask {missing[0]} in measure table")
        table = [float(entries[m]) for m in range(size)]
    else:
        table = [float(v) for v in entries]
        if len(table) != size:
            raise MeasureError(f"measure table needs {size} entries, got {len(table)}")
    if table[0] != 0.0:
        raise MeasureError(f"m(empty set) must be 0, got {table[0]}")
    if not table[size - 1] > 0.0:
        raise MeasureError("m(X) must be positive")
    if any(v < 0.0 for v in table):
        raise MeasureError("measure values must be nonnegative")
    arr = np.asarray(table)
    masks = np.arange(size)
    for bit in range(sp.n):
        sup = masks | (1 << bit)
        bad = arr[masks] > arr[sup] + _EQ_TOL
        if np.any(bad):
            a = int(masks[bad][0])
            raise MeasureError(
                f"monotonicity violation: m({sp.labels_of(a)})={arr[a]} > "
                f"m({sp.labels_of(a | (1 << bit))})={arr[a | (1 << bit)]}"
            )
    return MonotoneMeasure(sp, tuple(table))


def necessity_from_possibility(sp: FiniteSpace, pi) -> MonotoneMeasure:
    """Necessity measure of a normalized possibility distribution.

    m(A) = 1 - max_{x not in A} pi(x); the result is minitive.
    """
    pi = [float(v) for v in pi]
    if len(pi) != sp.n:
        raise MeasureError("possibility vector length must match atom count")
    if any(not 0.0 <= v <= 1.0 for v in pi):
        raise MeasureError("possibility values must lie in [0,1]")
    if abs(max(pi) - 1.0) > _EQ_TOL:
        raise MeasureError("possibility distribution must be normalized (max = 1)")
    size = 1 << sp.n
    table = []
    for mask in range(size):
        outside = [pi[i] for i in range(sp.n) if not mask & (1 << i)]
        table.append(1.0 - (max(outside) if outside else 0.0))
    m = from_table(sp, table)
    if sp.n <= 10 and not is_minitive(m):
        raise MeasureError("internal error: necessity measure failed minitivity check")
    return m


def distorted_probability(sp: FiniteSpace, p, h) -> MonotoneMeasure:
    """Distorted probability m(B) = h(P(B)) for increasing convex h.

    h is an Expr (or source string) in one variable with h(0)=0, h(1)=1;
    convexity and monotonicity are grid-checked, supermodularity is then
    verified exhaustively for small spaces.
    """
    p = [float(v) for v in p]
    if len(p) != sp.n:
        raise MeasureError("probability vector length must match atom count")
    if any(v < 0 for v in p) or abs(sum(p) - 1.0) > 1e-9:
        raise MeasureError("p must be a probability vector")
    expr = parse(h) if isinstance(h, str) else h
    var = _sole_var(expr)
    xs = np.linspace(0.0, 1.0, 101)
    hv = np.asarray(eval_expr(expr, {var: xs}), dtype=float)
    if abs(hv[0]) > 1e-9 or abs(hv[-1] - 1.0) > 1e-9:
        raise MeasureError("h must satisfy h(0)=0 and h(1)=1")
    if np.any(np.diff(hv) <= -1e-12):
        raise MeasureError("h must be increasing (grid check failed)")
    if np.any(np.diff(hv, n=2) < -1e-9):
        raise MeasureError("h must be convex (grid check failed)")
    size = 1 << sp.n
    table = []
    for mask in range(size):
        prob = sum(p[i] for i in range(sp.n) if mask & (1 << i))
        table.append(float(eval_expr(expr, {var: min(prob, 1.0)})))
    m = from_table(sp, table)
    if sp.n <= 10 and not is_supermodular(m):
        raise MeasureError("distorted probability failed the supermodularity check")
    return m


def dual(m: MonotoneMeasure) -> MonotoneMeasure:
    """Dual capacity m^d(C) = 1 - m(complement of C)."""
    if not m.is_capacity:
        raise MeasureError("dual is defined for capacities (m(X)=1)")
    full = m.space.full_mask
    table = [1.0 - m.table[full ^ mask] for mask in range(full + 1)]
    return from_table(m.space, table)


def _sole_var(expr: Expr):
    from .exprlang import free_vars

    names = free_vars(expr)
    if len(names) != 1:
        raise MeasureError("expected an expression in exactly one variable")
    return next(iter(names))


# ---------------------------------------------------------------------------
# Structural predicates (exhaustive over all set pairs)
# ---------------------------------------------------------------------------


def _pair_scan_tables(m: MonotoneMeasure):
    if m.space.n > MAX_SCAN_ATOMS:
        raise MeasureError(
            f"exhaustive pair scan refused for n > {MAX_SCAN_ATOMS} atoms"
        )
    masks = np.arange(1 << m.space.n)
    tab = np.asarray(m.table)
    inter = masks[:, None] & masks[None, :]
    union = masks[:, None] | masks[None, :]
    return tab, inter, union


def is_minitive(m: MonotoneMeasure) -> bool:
    """m(C & D) == min(m(C), m(D)) for all set pairs."""
    tab, inter, _ = _pair_scan_tables(m)
    return bool(np.all(np.abs(tab[inter] - np.minimum(tab[:, None], tab[None, :])) <= _EQ_TOL))


def is_subadditive(m: MonotoneMeasure) -> bool:
    """m(C | D) <= m(C) + m(D) for all set pairs."""
    tab, _, union = _pair_scan_tables(m)
    return bool(np.all(tab[union] <= tab[:, None] + tab[None, :] + _EQ_TOL))


def is_supermodular(m: MonotoneMeasure) -> bool:
    """m(C | D) + m(C & D) >= m(C) + m(D) for all set pairs."""
    tab, inter, union = _pair_scan_tables(m)
    return bool(np.all(tab[union] + tab[inter] >= tab[:, None] + tab[None, :] - _EQ_TOL))


# ---------------------------------------------------------------------------
# Survival scenarios for continuum examples
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SurvivalScenario:
    """The level function G(t) = m(D & {f >= t}) given in closed form.

    Segments are (interval, expression in ``var``) pairs partitioning
    [0, y_bar]; G must be nonincreasing (grid-validated) and nonnegative.
    """

    y_bar: float
    segments: tuple  # of (Interval, Expr)
    var: str = "t"

    def __post_init__(self):
        if not self.y_bar > 0:
            raise MeasureError("y_bar must be positive")
        segs = sorted(self.segments, key=lambda s: s[0].lo)
        if not segs:
            raise MeasureError("survival scenario needs at least one segment")
        first = segs[0][0]
        if first.lo != 0.0 or not first.closed_lo:
            raise MeasureError("segments must start at [0, ...")
        for (a, _), (b, _) in zip(segs, segs[1:]):
            if a.hi != b.lo or a.closed_hi == b.closed_lo:
                raise MeasureError(
                    f"segments {a} and {b} do not partition the domain"
                )
        last = segs[-1][0]
        if last.hi != self.y_bar or not last.closed_hi:
            raise MeasureError(f"segments must end at ..., {self.y_bar}]")
        object.__setattr__(self, "segments", tuple(segs))

    def g_value(self, t: float) -> float:
        for interval, expr in self.segments:
            if interval.contains(t):
                return float(eval_expr(expr, {self.var: t}))
        raise MeasureError(f"level {t} outside the scenario domain")

    def validate(self, grid_step=1e-3):
        """Grid check that G is nonnegative and nonincreasing on [0, y_bar]."""
        prev = None
        for interval, expr in self.segments:
            count = max(int(round((interval.hi - interval.lo) / grid_step)), 2) + 1
            ts = np.linspace(interval.lo, interval.hi, count)
            try:
                vals = np.asarray(eval_expr(expr, {self.var: ts}), dtype=float)
            except EvalError as exc:
                raise MeasureError(f"survival segment on {interval}: {exc}") from exc
            if vals.ndim == 0:  # constant segment expression
                vals = np.full_like(ts, float(vals))
            if np.any(vals < -1e-12):
                bad = float(ts[vals < -1e-12][0])
                raise MeasureError(f"survival function negative at t={bad}")
            if np.any(np.diff(vals) > 1e-9):
                i = int(np.flatnonzero(np.diff(vals) > 1e-9)[0])
                raise MeasureError(
                    f"survival function increases between t={ts[i]} and t={ts[i + 1]}"
                )
            if prev is not None and vals[0] > prev + 1e-9:
                raise MeasureError(
                    f"survival function jumps upward at segment boundary t={interval.lo}"
                )
            prev = float(vals[-1])
        return True


def survival_scenario(y_bar, segments, var="t") -> SurvivalScenario:
    """Build a SurvivalScenario from (interval-text, expr-text) pairs."""
    parsed = []
    for interval, source in segments:
        iv = interval if isinstance(interval, Interval) else _parse_interval(interval)
        expr = parse(source) if isinstance(source, str) else source
        parsed.append((iv, expr))
    scenario = SurvivalScenario(float(y_bar), tuple(parsed), var)
    scenario.validate()
    return scenario


def _parse_interval(text) -> Interval:
    from .exprlang import _Parser

    return _Parser(text).interval()
