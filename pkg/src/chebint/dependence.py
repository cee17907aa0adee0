"""Comonotonicity, m-positive dependence and related measure-level conditions.

All decision procedures are exact for simple functions: the continuum of
levels collapses to the finite set of function values because the level-set
maps are step functions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fusion import FusionOp, apply_op, eval_op
from .integral import SimpleFunction
from .measure import MAX_SCAN_ATOMS, MeasureError, MonotoneMeasure

_TOL = 1e-9


class DependenceError(Exception):
    pass


class RangeEscapeError(DependenceError):
    """The triangle operation leaves the measure's range on range(m)^2."""


@dataclass(frozen=True)
class DependenceVerdict:
    holds: bool
    witness: tuple | None = None
    warnings: tuple = ()
    detail: str = ""


@dataclass(frozen=True)
class DependenceQuery:
    m: MonotoneMeasure
    f: SimpleFunction
    g: SimpleFunction
    A: int
    B: int
    triangle: FusionOp
    k: float
    allow_range_escape: bool = False

    def __post_init__(self):
        if self.f.space != self.m.space or self.g.space != self.m.space:
            raise DependenceError("functions and measure must share a space")
        if self.f.bound > self.k + 1e-12 or self.g.bound > self.k + 1e-12:
            raise DependenceError("f and g must be bounded by k")


def is_comonotone(f: SimpleFunction, g: SimpleFunction, D: int) -> DependenceVerdict:
    """Exhaustive pairwise check of (f(x)-f(y))(g(x)-g(y)) >= 0 on D."""
    atoms = f.space.atoms_of(D)
    for i in atoms:
        for j in atoms:
            if (f.values[i] - f.values[j]) * (g.values[i] - g.values[j]) < 0:
                return DependenceVerdict(False, (f.space.labels[i], f.space.labels[j]))
    return DependenceVerdict(True)


def triangle_range_escapes(m: MonotoneMeasure, tri: FusionOp):
    """Pairs (c, d) in range(m)^2 whose triangle value leaves range(m)."""
    rng = m.value_range()
    escapes = []
    for c in rng:
        for d in rng:
            out = eval_op(tri, c, d)
            if not any(abs(out - r) <= _TOL for r in rng):
                escapes.append((c, d, out))
    return escapes


def _level_grid(f: SimpleFunction, k: float):
    """Representative levels: 0, the distinct values, and k when k > max f."""
    levels = sorted({0.0} | set(f.values))
    if k > max(f.values) + 1e-12:
        levels.append(k)
    return levels


def is_m_positively_dependent(q: DependenceQuery) -> DependenceVerdict:
    """Decide m-positive dependence of f|_A and g|_B w.r.t. the triangle op.

    Exact: levels alpha (beta) range over {0} + distinct values of f (g),
    plus k when it exceeds the max value (the empty-level case).  The
    lexicographically first violating (alpha, beta) is the witness.
    """
    warnings = []
    escapes = triangle_range_escapes(q.m, q.triangle)
    if escapes:
        msg = (f"triangle {q.triangle.name!r} leaves range(m) at "
               f"(c,d)={escapes[0][:2]} with value {escapes[0][2]}")
        if not q.allow_range_escape:
            raise RangeEscapeError(msg)
        warnings.append(msg)
    m, f, g = q.m, q.f, q.g
    for alpha in _level_grid(f, q.k):
        f_mask = f.level_mask(alpha) & q.A
        for beta in _level_grid(g, q.k):
            g_mask = g.level_mask(beta) & q.B
            lhs = m(f_mask & g_mask)
            rhs = eval_op(q.triangle, m(f_mask), m(g_mask))
            if lhs < rhs - _TOL:
                return DependenceVerdict(False, (alpha, beta), tuple(warnings),
                                         f"m(...)={lhs} < {rhs}")
    return DependenceVerdict(True, None, tuple(warnings))


def measure_supports_all_pairs(m: MonotoneMeasure, tri: FusionOp,
                               allow_range_escape: bool = False) -> DependenceVerdict:
    """Exhaustive check of m(C & D) >= tri(m(C), m(D)) over all set pairs."""
    if m.space.n > MAX_SCAN_ATOMS:
        raise MeasureError(f"exhaustive pair scan refused for n > {MAX_SCAN_ATOMS} atoms")
    warnings = []
    escapes = triangle_range_escapes(m, tri)
    if escapes:
        msg = (f"triangle {tri.name!r} leaves range(m) at (c,d)={escapes[0][:2]}")
        if not allow_range_escape:
            raise RangeEscapeError(msg)
        warnings.append(msg)
    masks = np.arange(1 << m.space.n)
    tab = np.asarray(m.table)
    inter = tab[masks[:, None] & masks[None, :]]
    combo = np.asarray(apply_op(tri, tab[:, None], tab[None, :]), dtype=float)
    viol = inter < combo - _TOL
    idx = np.argwhere(viol)
    if idx.size:
        i, j = (int(v) for v in idx[0])
        witness = (m.space.labels_of(i), m.space.labels_of(j))
        return DependenceVerdict(False, witness, tuple(warnings),
                                 f"m(C&D)={inter[i, j]} < {combo[i, j]}")
    return DependenceVerdict(True, None, tuple(warnings))


def condition_Z1(m: MonotoneMeasure, tri: FusionOp,
                 allow_range_escape: bool = False) -> DependenceVerdict:
    """Condition (Z1): every (c, d) in range(m)^2 is realized by sets C, D
    with m(C)=c, m(D)=d and m(C & D) = tri(c, d)."""
    if m.space.n > MAX_SCAN_ATOMS:
        raise MeasureError(f"exhaustive realization search refused for n > {MAX_SCAN_ATOMS}")
    warnings = []
    escapes = triangle_range_escapes(m, tri)
    if escapes:
        msg = f"triangle {tri.name!r} leaves range(m) at (c,d)={escapes[0][:2]}"
        if not allow_range_escape:
            raise RangeEscapeError(msg)
        warnings.append(msg)
    rng = m.value_range()
    tab = np.asarray(m.table)
    by_value = {c: np.flatnonzero(np.abs(tab - c) <= 1e-12) for c in rng}
    for c in rng:
        cs = by_value[c]
        for d in rng:
            ds = by_value[d]
            target = eval_op(tri, c, d)
            inter = tab[cs[:, None] & ds[None, :]]
            if not np.any(np.abs(inter - target) <= _TOL):
                return DependenceVerdict(False, (c, d), tuple(warnings),
                                         f"no sets realize m(C&D)={target}")
    return DependenceVerdict(True, None, tuple(warnings))
