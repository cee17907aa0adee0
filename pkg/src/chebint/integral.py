"""Generalized upper Sugeno integrals.

Exact candidate-set evaluation for simple functions on finite spaces,
bisection/grid evaluation for survival scenarios, plus the named special
cases (Sugeno, Shilkret, opposite-Sugeno, seminormed, q-integral).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .extreal import INF
from .fusion import FusionOp, apply_op, builtin, eval_op
from .measure import FiniteSpace, MeasureError, MonotoneMeasure, SurvivalScenario


class IntegralError(Exception):
    pass


_INF_CAP = 1e6
_BISECT_TOL = 1e-10
_FALLBACK_STEP = 1e-4


@dataclass(frozen=True)
class SimpleFunction:
    """Atom-indexed values in [0, bound]; the f, g of the finite examples."""

    space: FiniteSpace
    values: tuple
    bound: float

    def __post_init__(self):
        if len(self.values) != self.space.n:
            raise IntegralError("one value per atom required")
        if not self.bound > 0:
            raise IntegralError("bound k must be positive")
        if any(not 0.0 <= v <= self.bound for v in self.values):
            raise IntegralError(f"values must lie in [0, {self.bound}]")

    def level_mask(self, t: float) -> int:
        mask = 0
        for i, v in enumerate(self.values):
            if v >= t:
                mask |= 1 << i
        return mask

    def transform(self, fn) -> "SimpleFunction":
        """Apply a pointwise map; the bound becomes the max transformed value."""
        vals = tuple(float(fn(v)) for v in self.values)
        bound = max(max(vals), 1e-300) if max(vals) > 0 else 1.0
        return SimpleFunction(self.space, vals, bound)

    def combine(self, other: "SimpleFunction", op: FusionOp) -> "SimpleFunction":
        if other.space != self.space:
            raise IntegralError("functions live on different spaces")
        vals = tuple(eval_op(op, a, b) for a, b in zip(self.values, other.values))
        bound = max(max(vals), 1e-300) if max(vals) > 0 else 1.0
        return SimpleFunction(self.space, vals, bound)


def simple_function(space, values, bound=None) -> SimpleFunction:
    vals = tuple(float(v) for v in values)
    if bound is None:
        bound = max(vals) if vals and max(vals) > 0 else 1.0
    return SimpleFunction(space, vals, float(bound))


@dataclass(frozen=True)
class IntegralResult:
    value: float
    method: str  # exact-candidate-set | grid(step) | bisection(tol) [+ warnings]
    candidates: tuple  # (t, level measure, term) triples examined

    def __float__(self):
        return self.value


def _max_term(entries):
    """Max over (t, level, term) with ties broken toward smaller t."""
    best = None
    for entry in entries:
        if best is None or entry[2] > best[2]:
            best = entry
    return best


def integrate_simple(op: FusionOp, m: MonotoneMeasure, D: int, f: SimpleFunction) -> IntegralResult:
    """sup over t of op(t, m(D & {f >= t})) for a simple function f.

    Exact via the finite candidate set {distinct values of f on D, 0, y_bar}
    when op is declared non-decreasing and left-continuous in its first
    coordinate; otherwise a grid fallback runs with a warning in `method`.
    """
    if f.space != m.space:
        raise IntegralError("function and measure live on different spaces")
    if not 0 <= D <= m.space.full_mask:
        raise IntegralError(f"invalid subset mask {D}")
    if not op.non_decreasing:
        raise IntegralError(f"operation {op.name!r} must be declared non-decreasing")
    if f.bound > op.y_bar + 1e-12:
        raise IntegralError("function bound exceeds the operation's y_bar")

    if op.left_continuous_in_first:
        levels = sorted({0.0} | {f.values[i] for i in m.space.atoms_of(D)})
        cands = []
        for t in levels:
            mask = f.level_mask(t) & D
            level = m(mask)
            cands.append((t, level, eval_op(op, t, level)))
        cands.append((op.y_bar, 0.0, eval_op(op, op.y_bar, 0.0)))
        best = _max_term(cands)
        return IntegralResult(best[2], "exact-candidate-set", tuple(cands))

    # grid fallback: evidence only, left-continuity not declared
    top = min(op.y_bar, _INF_CAP)
    ts = np.arange(0.0, top + _FALLBACK_STEP / 2, _FALLBACK_STEP)
    atoms = m.space.atoms_of(D)
    vals = np.asarray([f.values[i] for i in atoms])
    bits = np.asarray([1 << i for i in atoms], dtype=np.int64)
    if atoms:
        masks = ((ts[:, None] <= vals[None, :]) * bits[None, :]).sum(axis=1)
    else:
        masks = np.zeros(ts.shape, dtype=np.int64)
    tab = np.asarray(m.table)
    levels = tab[masks]
    terms = np.asarray(apply_op(op, ts, levels), dtype=float)
    i = int(np.argmax(terms))
    cands = ((float(ts[i]), float(levels[i]), float(terms[i])),)
    method = f"grid({_FALLBACK_STEP});warning:left-continuity-not-declared"
    return IntegralResult(float(terms[i]), method, cands)


def oracle_grid_integral(op: FusionOp, m: MonotoneMeasure, D: int, f: SimpleFunction,
                         grid_step: float) -> float:
    """Brute-force sup over the t-grid of op(t, m(D & {f >= t}))."""
    if grid_step <= 0:
        raise IntegralError("grid_step must be positive")
    top = min(op.y_bar, _INF_CAP)
    count = int(round(top / grid_step)) + 1
    ts = np.linspace(0.0, top, count)
    atoms = m.space.atoms_of(D)
    tab = np.asarray(m.table)
    if atoms:
        vals = np.asarray([f.values[i] for i in atoms])
        bits = np.asarray([1 << i for i in atoms], dtype=np.int64)
        masks = ((ts[:, None] <= vals[None, :]) * bits[None, :]).sum(axis=1)
    else:
        masks = np.zeros(ts.shape, dtype=np.int64)
    terms = np.asarray(apply_op(op, ts, tab[masks]), dtype=float)
    return float(np.max(terms))


def q_integral(conj: FusionOp, m: MonotoneMeasure, f: SimpleFunction) -> IntegralResult:
    """q-integral sup over t of conj(m({f >= t}), t), measure slot first.

    conj must be a declared fuzzy conjunction, left-continuous in its second
    coordinate (the level slot); m must be a capacity and f bounded by 1.
    The t=1 candidate is always included (with level m({f >= 1})).
    """
    if not conj.fuzzy_conjunction:
        raise IntegralError(f"operation {conj.name!r} lacks the fuzzy_conjunction flag")
    if not conj.left_continuous_in_second:
        raise IntegralError(
            f"operation {conj.name!r} must be left-continuous in its second coordinate"
        )
    if not m.is_capacity:
        raise IntegralError("q-integral requires a capacity (m(X)=1)")
    if f.bound > 1.0 + 1e-12:
        raise IntegralError("q-integral requires f bounded by 1")
    levels = sorted({0.0, 1.0} | set(f.values))
    cands = []
    for t in levels:
        level = m(f.level_mask(t))
        cands.append((t, level, eval_op(conj, level, t)))
    best = _max_term(cands)
    return IntegralResult(best[2], "exact-candidate-set", tuple(cands))


# ---------------------------------------------------------------------------
# Named wrappers
# ---------------------------------------------------------------------------


def sugeno(m, D, f) -> IntegralResult:
    return integrate_simple(builtin("min"), m, D, f)


def shilkret(m, D, f) -> IntegralResult:
    return integrate_simple(builtin("prod"), m, D, f)


def opposite_sugeno(m, D, f) -> IntegralResult:
    return integrate_simple(builtin("lukasiewicz"), m, D, f)


def seminormed(S: FusionOp, m, D, f) -> IntegralResult:
    return integrate_simple(S, m, D, f)


# ---------------------------------------------------------------------------
# Survival scenarios
# ---------------------------------------------------------------------------


def integrate_survival(op: FusionOp, scenario: SurvivalScenario, grid_step=1e-4) -> IntegralResult:
    """sup over t in [0, y_bar] of op(t, G(t)) for a closed-form level function.

    With op = min each segment is solved by bisection for the crossing of t
    and the nonincreasing G (tolerance 1e-10); other operations get a dense
    grid with local refinement around the best grid point.
    """
    if not op.non_decreasing:
        raise IntegralError(f"operation {op.name!r} must be declared non-decreasing")
    scenario.validate(max(grid_step, 1e-4))
    if op.kind == "min":
        return _survival_min(scenario)
    return _survival_grid(op, scenario, grid_step)


def _seg_eval(scenario, expr, ts):
    from .exprlang import eval_expr

    ts = np.asarray(ts, dtype=float)
    vals = np.asarray(eval_expr(expr, {scenario.var: ts}), dtype=float)
    if vals.ndim == 0:  # constant segment expression
        vals = np.full_like(ts, float(vals))
    return np.maximum(vals, 0.0)


def _survival_min(scenario: SurvivalScenario) -> IntegralResult:
    best = 0.0
    cands = []
    for interval, expr in scenario.segments:
        lo, hi = interval.lo, interval.hi
        g_lo, g_hi = (float(v) for v in _seg_eval(scenario, expr, [lo, hi]))
        cands.append((lo, g_lo, min(lo, g_lo)))
        cands.append((hi, g_hi, min(hi, g_hi)))
        if lo >= g_lo:
            seg_best = (lo, g_lo, min(lo, g_lo))
        elif hi <= g_hi:
            seg_best = (hi, g_hi, min(hi, g_hi))
        else:
            a, b = lo, hi
            for _ in range(200):
                if b - a <= _BISECT_TOL:
                    break
                mid = 0.5 * (a + b)
                g_mid = float(_seg_eval(scenario, expr, [mid])[0])
                if mid < g_mid:
                    a = mid
                else:
                    b = mid
            g_a = float(_seg_eval(scenario, expr, [a])[0])
            g_b = float(_seg_eval(scenario, expr, [b])[0])
            seg_best = max(((a, g_a, min(a, g_a)), (b, g_b, min(b, g_b))),
                           key=lambda c: c[2])
            cands.append(seg_best)
        best = max(best, seg_best[2])
    value = max(best, 0.0)
    return IntegralResult(value, f"bisection({_BISECT_TOL})", tuple(cands))


def _survival_grid(op: FusionOp, scenario: SurvivalScenario, grid_step: float) -> IntegralResult:
    best = (0.0, 0.0, -np.inf)
    for interval, expr in scenario.segments:
        lo, hi = interval.lo, interval.hi
        count = max(int(round((hi - lo) / grid_step)), 8) + 1
        ts = np.linspace(lo, hi, min(count, 200001))
        for _ in range(3):
            gs = _seg_eval(scenario, expr, ts)
            terms = np.asarray(apply_op(op, ts, gs), dtype=float)
            i = int(np.argmax(terms))
            if terms[i] > best[2]:
                best = (float(ts[i]), float(gs[i]), float(terms[i]))
            a = ts[max(i - 1, 0)]
            b = ts[min(i + 1, len(ts) - 1)]
            ts = np.linspace(a, b, 101)
    return IntegralResult(best[2], f"grid({grid_step})+refinement", (best,))
