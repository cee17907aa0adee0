"""Scalar and integral Chebyshev-type inequality checks and counterexample search.

The scalar condition couples two fusion operations, three integral operations,
a triangle operation and six shape functions; the integral inequality compares
transformed generalized Sugeno integrals.  Grid verdicts are evidence; a
Violated verdict carries a witness re-checked by direct evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .dependence import (DependenceQuery, is_comonotone,
                         is_m_positively_dependent, measure_supports_all_pairs)
from .exprlang import Expr, eval_expr, parse
from .extreal import INF
from .fusion import FusionOp, apply_op, eval_op, leq_min, min_op
from .integral import SimpleFunction, integrate_simple, simple_function
from .measure import MonotoneMeasure

_TOL = 1e-9
_INF_CAP = 1e6


class HypothesisError(Exception):
    pass


class ShapeDomainError(HypothesisError):
    def __init__(self, name, value, domain):
        super().__init__(
            f"the value {name}({value}) is not defined (domain [{domain[0]}, {domain[1]}])"
        )
        self.value = value


# ---------------------------------------------------------------------------
# Shape functions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ShapeFunction:
    """A one-variable transform on [domain[0], domain[1]] with declared flags."""

    name: str
    expr: Expr
    var: str = "x"
    domain: tuple = (0.0, 1.0)
    non_decreasing: bool = True
    increasing: bool = False
    left_continuous: bool = False
    right_continuous: bool = False
    inverse: Expr | None = None
    inverse_domain: tuple | None = None

    def apply(self, x):
        lo, hi = self.domain
        arr = np.asarray(x, dtype=float)
        if np.any(arr < lo - _TOL) or np.any(arr > hi + _TOL):
            bad = arr[(arr < lo - _TOL) | (arr > hi + _TOL)].flat[0]
            raise ShapeDomainError(self.name, float(bad), self.domain)
        clipped = np.clip(arr, lo, hi)
        out = eval_expr(self.expr, {self.var: clipped if arr.ndim else float(clipped)})
        return out

    def apply_inverse(self, y):
        if self.inverse is None:
            raise HypothesisError(f"no inverse declared for shape function {self.name!r}")
        lo, hi = self.inverse_domain if self.inverse_domain else (
            float(self.apply(self.domain[0])), float(self.apply(self.domain[1])))
        arr = np.asarray(y, dtype=float)
        if np.any(arr < lo - _TOL) or np.any(arr > hi + _TOL):
            bad = arr[(arr < lo - _TOL) | (arr > hi + _TOL)].flat[0]
            raise ShapeDomainError(f"{self.name}^-1", float(bad), (lo, hi))
        clipped = np.clip(arr, lo, hi)
        return eval_expr(self.inverse, {self.var: clipped if arr.ndim else float(clipped)})

    def validate_inverse(self, grid_step=0.01, tol=1e-9):
        """Round-trip check body(inverse(y)) = y and inverse(body(x)) = x."""
        if self.inverse is None:
            return True
        xs = np.linspace(self.domain[0], self.domain[1], max(int(round(
            (self.domain[1] - self.domain[0]) / grid_step)), 2) + 1)
        ys = np.asarray(self.apply(xs), dtype=float)
        back = np.asarray(self.apply_inverse(ys), dtype=float)
        if np.max(np.abs(back - xs)) > tol:
            return False
        lo, hi = self.inverse_domain if self.inverse_domain else (float(ys[0]), float(ys[-1]))
        zs = np.linspace(lo, hi, len(xs))
        fwd = np.asarray(self.apply(np.asarray(self.apply_inverse(zs), dtype=float)), dtype=float)
        return bool(np.max(np.abs(fwd - zs)) <= tol)


def shape(name, source, inverse=None, var="x", domain=(0.0, 1.0),
          inverse_domain=None, **flags) -> ShapeFunction:
    body = parse(source) if isinstance(source, str) else source
    inv = parse(inverse) if isinstance(inverse, str) else inverse
    return ShapeFunction(name, body, var, tuple(domain), inverse=inv,
                         inverse_domain=tuple(inverse_domain) if inverse_domain else None,
                         **flags)


def identity_shape(y_bar=1.0) -> ShapeFunction:
    return shape("id", "x", inverse="x", domain=(0.0, y_bar),
                 non_decreasing=True, increasing=True,
                 left_continuous=True, right_continuous=True)


def power_shape(p, y_bar=1.0) -> ShapeFunction:
    if p <= 0:
        raise ValueError("exponent must be positive")
    return shape(f"x^{p}", f"x^{p}", inverse=f"x^{1.0 / p}", domain=(0.0, y_bar),
                 non_decreasing=True, increasing=True,
                 left_continuous=True, right_continuous=True)


# ---------------------------------------------------------------------------
# Configuration and verdicts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CdDomain:
    """Finite value set (a measure range) or an interval [lo, hi]."""

    values: tuple | None = None
    interval: tuple | None = None

    def __post_init__(self):
        if (self.values is None) == (self.interval is None):
            raise ValueError("exactly one of values/interval must be given")

    @property
    def exact(self):
        return self.values is not None

    @property
    def sup(self):
        return max(self.values) if self.values else self.interval[1]

    def sample(self, grid_step):
        if self.values is not None:
            return np.asarray(sorted(self.values), dtype=float)
        lo, hi = self.interval
        hi = min(hi, _INF_CAP)
        count = max(int(round((hi - lo) / grid_step)), 1) + 1
        return np.linspace(lo, hi, count)

    def describe(self, grid_step):
        if self.values is not None:
            return "exact finite domain"
        return f"grid({grid_step})"


def cd_values(values) -> CdDomain:
    return CdDomain(values=tuple(float(v) for v in values))


def cd_interval(lo, hi) -> CdDomain:
    return CdDomain(interval=(float(lo), float(hi)))


@dataclass(frozen=True)
class InequalityConfig:
    inner: FusionOp  # the * combining f and g
    outer: FusionOp  # the star combining the right-hand integrals
    circ1: FusionOp
    circ2: FusionOp
    circ3: FusionOp
    triangle: FusionOp
    phi1: ShapeFunction
    phi2: ShapeFunction
    phi3: ShapeFunction
    psi1: ShapeFunction
    psi2: ShapeFunction
    psi3: ShapeFunction
    k: float = 1.0
    y_bar: float = 1.0
    cd_domain: CdDomain = None

    @property
    def phis(self):
        return (self.phi1, self.phi2, self.phi3)

    @property
    def psis(self):
        return (self.psi1, self.psi2, self.psi3)

    @property
    def circs(self):
        return (self.circ1, self.circ2, self.circ3)

    def validate(self):
        """Construction-time hypothesis bundle; raises HypothesisError."""
        if not 0 < self.k <= self.y_bar + _TOL:
            raise HypothesisError(f"k={self.k} must lie in (0, y_bar={self.y_bar}]")
        top = min(self.cd_domain.sup, _INF_CAP)
        for i, (phi, circ) in enumerate(zip(self.phis, self.circs), start=1):
            phi_top = float(phi.apply(min(self.y_bar, phi.domain[1])))
            val = eval_op(circ, phi_top, top)
            if val > phi_top + _TOL:
                raise HypothesisError(
                    f"phi{i}(y_bar) circ{i} sup(cd) = {val} exceeds phi{i}(y_bar) = {phi_top}"
                )
        for j, circ in ((2, self.circ2), (3, self.circ3)):
            val = eval_op(circ, min(self.y_bar, circ.y_bar), 0.0)
            if val > _TOL:
                raise HypothesisError(f"y_bar circ{j} 0 = {val}, expected 0")
        for name, op in (("inner", self.inner), ("outer", self.outer),
                         ("triangle", self.triangle)) + tuple(
                             (f"circ{i}", c) for i, c in enumerate(self.circs, start=1)):
            if not op.non_decreasing:
                raise HypothesisError(f"{name} operation {op.name!r} is not declared non-decreasing")


def config(inner, outer, circs, triangle, phis, psis, k=1.0, y_bar=1.0,
           cd_domain=None) -> InequalityConfig:
    c1, c2, c3 = circs
    p1, p2, p3 = phis
    s1, s2, s3 = psis
    return InequalityConfig(inner, outer, c1, c2, c3, triangle,
                            p1, p2, p3, s1, s2, s3, k, y_bar, cd_domain)


@dataclass(frozen=True)
class Verdict:
    status: str  # holds-on-grid | violated | hypothesis-failed
    witness: tuple | None = None
    lhs: float | None = None
    rhs: float | None = None
    detail: str = ""
    evidence: str = ""

    @property
    def holds(self):
        return self.status == "holds-on-grid"


# ---------------------------------------------------------------------------
# Scalar conditions
# ---------------------------------------------------------------------------


def _k_grid(cfg, grid_step):
    count = max(int(round(cfg.k / grid_step)), 1) + 1
    return np.linspace(0.0, cfg.k, count)


def scalar_condition_at(cfg: InequalityConfig, a, b, c, d):
    """Direct (lhs, rhs) evaluation of the four-variable scalar condition."""
    lhs = cfg.psi1.apply(eval_op(cfg.circ1, float(cfg.phi1.apply(eval_op(cfg.inner, a, b))),
                                 eval_op(cfg.triangle, c, d)))
    r2 = cfg.psi2.apply(eval_op(cfg.circ2, float(cfg.phi2.apply(a)), c))
    r3 = cfg.psi3.apply(eval_op(cfg.circ3, float(cfg.phi3.apply(b)), d))
    rhs = eval_op(cfg.outer, float(r2), float(r3))
    return float(lhs), float(rhs)


def check_scalar_condition(cfg: InequalityConfig, grid_step=0.01) -> Verdict:
    """Scan a, b over [0, k] and c, d over the c/d-domain.

    Deterministic lexicographic first witness; Violated witnesses are
    re-checked by direct evaluation before being reported.
    """
    try:
        cfg.validate()
        ab = _k_grid(cfg, grid_step)
        cd = cfg.cd_domain.sample(grid_step)
        evidence = f"a,b grid({grid_step}) x c,d {cfg.cd_domain.describe(grid_step)}"
        tri_cd = np.asarray(apply_op(cfg.triangle, cd[:, None], cd[None, :]), dtype=float)
        phi2_a = np.asarray(cfg.phi2.apply(ab), dtype=float)
        phi3_b = np.asarray(cfg.phi3.apply(ab), dtype=float)
        psi2_ac = np.asarray(cfg.psi2.apply(
            np.asarray(apply_op(cfg.circ2, phi2_a[:, None], cd[None, :]), dtype=float)), dtype=float)
        psi3_bd = np.asarray(cfg.psi3.apply(
            np.asarray(apply_op(cfg.circ3, phi3_b[:, None], cd[None, :]), dtype=float)), dtype=float)
        for i, a in enumerate(ab):
            sab = np.asarray(apply_op(cfg.inner, a, ab), dtype=float)  # over b
            phi1_sab = np.asarray(cfg.phi1.apply(sab), dtype=float)
            lhs = np.asarray(cfg.psi1.apply(np.asarray(
                apply_op(cfg.circ1, phi1_sab[:, None, None], tri_cd[None, :, :]),
                dtype=float)), dtype=float)
            rhs = np.asarray(apply_op(cfg.outer, psi2_ac[i][None, :, None],
                                      psi3_bd[:, None, :]), dtype=float)
            viol = lhs < rhs - _TOL
            if np.any(viol):
                j, p, q = (int(v) for v in np.argwhere(viol)[0])
                witness = (float(a), float(ab[j]), float(cd[p]), float(cd[q]))
                wl, wr = scalar_condition_at(cfg, *witness)
                if wl < wr - _TOL:
                    return Verdict("violated", witness, wl, wr, evidence=evidence)
        return Verdict("holds-on-grid", evidence=evidence)
    except HypothesisError as exc:
        return Verdict("hypothesis-failed", detail=str(exc))


def c2_condition_at(cfg: InequalityConfig, a, b, c):
    dbar = min(cfg.cd_domain.sup, _INF_CAP)
    lhs = cfg.psi1.apply(eval_op(cfg.circ1, float(cfg.phi1.apply(eval_op(cfg.inner, a, b))), c))
    t1 = eval_op(cfg.outer,
                 float(cfg.psi2.apply(eval_op(cfg.circ2, float(cfg.phi2.apply(a)), c))),
                 float(cfg.psi3.apply(eval_op(cfg.circ3, float(cfg.phi3.apply(b)), dbar))))
    t2 = eval_op(cfg.outer,
                 float(cfg.psi2.apply(eval_op(cfg.circ2, float(cfg.phi2.apply(a)), dbar))),
                 float(cfg.psi3.apply(eval_op(cfg.circ3, float(cfg.phi3.apply(b)), c))))
    return float(lhs), max(float(t1), float(t2))


def check_condition_C2(cfg: InequalityConfig, grid_step=0.01) -> Verdict:
    """One-variable-c form with the domain supremum substituted for d."""
    try:
        cfg.validate()
        ab = _k_grid(cfg, grid_step)
        cd = cfg.cd_domain.sample(grid_step)
        dbar = min(cfg.cd_domain.sup, _INF_CAP)
        evidence = f"a,b grid({grid_step}) x c {cfg.cd_domain.describe(grid_step)}"
        phi2_a = np.asarray(cfg.phi2.apply(ab), dtype=float)
        phi3_b = np.asarray(cfg.phi3.apply(ab), dtype=float)
        psi2_ac = np.asarray(cfg.psi2.apply(np.asarray(
            apply_op(cfg.circ2, phi2_a[:, None], cd[None, :]), dtype=float)), dtype=float)
        psi3_bc = np.asarray(cfg.psi3.apply(np.asarray(
            apply_op(cfg.circ3, phi3_b[:, None], cd[None, :]), dtype=float)), dtype=float)
        psi2_adbar = np.asarray(cfg.psi2.apply(np.asarray(
            apply_op(cfg.circ2, phi2_a, dbar), dtype=float)), dtype=float)
        psi3_bdbar = np.asarray(cfg.psi3.apply(np.asarray(
            apply_op(cfg.circ3, phi3_b, dbar), dtype=float)), dtype=float)
        for i, a in enumerate(ab):
            sab = np.asarray(apply_op(cfg.inner, a, ab), dtype=float)
            phi1_sab = np.asarray(cfg.phi1.apply(sab), dtype=float)
            lhs = np.asarray(cfg.psi1.apply(np.asarray(
                apply_op(cfg.circ1, phi1_sab[:, None], cd[None, :]), dtype=float)), dtype=float)
            t1 = np.asarray(apply_op(cfg.outer, psi2_ac[i][None, :],
                                     psi3_bdbar[:, None]), dtype=float)
            t2 = np.asarray(apply_op(cfg.outer, psi2_adbar[i], psi3_bc), dtype=float)
            rhs = np.maximum(t1, t2)
            viol = lhs < rhs - _TOL
            if np.any(viol):
                j, p = (int(v) for v in np.argwhere(viol)[0])
                witness = (float(a), float(ab[j]), float(cd[p]))
                wl, wr = c2_condition_at(cfg, *witness)
                if wl < wr - _TOL:
                    return Verdict("violated", witness, wl, wr, evidence=evidence)
        return Verdict("holds-on-grid", evidence=evidence)
    except HypothesisError as exc:
        return Verdict("hypothesis-failed", detail=str(exc))


@dataclass(frozen=True)
class EquivalenceReport:
    c1: Verdict
    c2: Verdict

    @property
    def agree(self):
        return self.c1.status == self.c2.status

    @property
    def disagreement_is_bug(self):
        # the two conditions are provably equivalent under the hypothesis
        # bundle, so diverging verdicts at equal resolution flag a defect
        return (not self.agree
                and "hypothesis-failed" not in (self.c1.status, self.c2.status))


def c1_iff_c2(cfg: InequalityConfig, grid_step=0.01) -> EquivalenceReport:
    return EquivalenceReport(check_scalar_condition(cfg, grid_step),
                             check_condition_C2(cfg, grid_step))


# ---------------------------------------------------------------------------
# Integral inequality
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InequalityOutcome:
    lhs: float
    rhs: float
    holds: bool
    trace: dict


def check_integral_inequality(cfg: InequalityConfig, m: MonotoneMeasure,
                              f: SimpleFunction, g: SimpleFunction,
                              A: int, B: int) -> InequalityOutcome:
    """Compare psi1(I(phi1(f*g), A&B)) against psi2(I(phi2 f, A)) outer psi3(I(phi3 g, B))."""
    fg = f.combine(g, cfg.inner)
    i1 = integrate_simple(cfg.circ1, m, A & B, fg.transform(lambda v: float(cfg.phi1.apply(v))))
    i2 = integrate_simple(cfg.circ2, m, A, f.transform(lambda v: float(cfg.phi2.apply(v))))
    i3 = integrate_simple(cfg.circ3, m, B, g.transform(lambda v: float(cfg.phi3.apply(v))))
    lhs = float(cfg.psi1.apply(i1.value))
    rhs = eval_op(cfg.outer, float(cfg.psi2.apply(i2.value)), float(cfg.psi3.apply(i3.value)))
    trace = {
        "integral_product": {"value": i1.value, "method": i1.method, "candidates": i1.candidates},
        "integral_f": {"value": i2.value, "method": i2.method, "candidates": i2.candidates},
        "integral_g": {"value": i3.value, "method": i3.method, "candidates": i3.candidates},
    }
    return InequalityOutcome(lhs, float(rhs), lhs >= rhs - _TOL, trace)


# ---------------------------------------------------------------------------
# Pipelines
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Stage:
    name: str
    status: str  # pass | fail | hypothesis-failed
    detail: str = ""


@dataclass(frozen=True)
class PipelineReport:
    stages: tuple
    outcome: InequalityOutcome | None = None

    @property
    def ok(self):
        return all(s.status == "pass" for s in self.stages)

    @property
    def status(self):
        if any(s.status == "hypothesis-failed" for s in self.stages):
            return "hypothesis-failed"
        if any(s.status == "fail" for s in self.stages):
            return "violated"
        return "holds"

    @property
    def contradiction(self):
        """All hypothesis stages pass yet the final inequality fails."""
        if not self.stages or self.stages[-1].status != "fail":
            return False
        return all(s.status == "pass" for s in self.stages[:-1])


def theorem1_forward(cfg: InequalityConfig, m: MonotoneMeasure,
                     f: SimpleFunction, g: SimpleFunction, A: int, B: int,
                     grid_step=0.01) -> PipelineReport:
    """Hypotheses -> dependence -> scalar condition -> integral inequality.

    All failures are report entries; a failing final inequality after fully
    passing hypothesis stages is a contradiction event (bug or misdeclared
    flag), surfaced via `contradiction`.
    """
    stages = []
    cfg = replace(cfg, cd_domain=cd_values(m.value_range()))
    try:
        cfg.validate()
        if not cfg.outer.left_continuous_in_first or not cfg.outer.left_continuous_in_second:
            raise HypothesisError(f"outer operation {cfg.outer.name!r} must be declared left-continuous")
        stages.append(Stage("config-hypotheses", "pass"))
    except HypothesisError as exc:
        stages.append(Stage("config-hypotheses", "hypothesis-failed", str(exc)))
    try:
        query = DependenceQuery(m, f, g, A, B, cfg.triangle, cfg.k, allow_range_escape=True)
        dep = is_m_positively_dependent(query)
        stages.append(Stage("m-positive-dependence", "pass" if dep.holds else "fail",
                            f"witness {dep.witness}" if dep.witness else "; ".join(dep.warnings)))
    except Exception as exc:  # noqa: BLE001 - reported, not raised
        stages.append(Stage("m-positive-dependence", "hypothesis-failed", str(exc)))
    scal = check_scalar_condition(cfg, grid_step)
    stages.append(Stage("scalar-condition",
                        {"holds-on-grid": "pass", "violated": "fail"}.get(scal.status, "hypothesis-failed"),
                        f"witness {scal.witness}" if scal.witness else scal.detail))
    outcome = None
    try:
        outcome = check_integral_inequality(cfg, m, f, g, A, B)
        stages.append(Stage("integral-inequality", "pass" if outcome.holds else "fail",
                            f"lhs={outcome.lhs} rhs={outcome.rhs}"))
    except HypothesisError as exc:
        stages.append(Stage("integral-inequality", "hypothesis-failed", str(exc)))
    return PipelineReport(tuple(stages), outcome)


def sugeno_chebyshev(m: MonotoneMeasure, f: SimpleFunction, g: SimpleFunction, A: int,
                     phis, psis, star: FusionOp, grid_step=0.01, y_bar=1.0) -> PipelineReport:
    """Comonotone Chebyshev inequality for the Sugeno integral.

    Checks star <= min, matching phi tops, psi1 >= psi_j, the sandwich
    psi_j(phi_j(x)) <= x <= psi1(phi1(x)), and comonotonicity; then asserts
    the integral inequality with circ_i = min, outer = star, B = A.
    """
    phi1, phi2, phi3 = phis
    psi1, psi2, psi3 = psis
    stages = []
    lm = leq_min(star, grid_step)
    stages.append(Stage("star-leq-min", "pass" if lm.holds else "hypothesis-failed",
                        f"witness {lm.witness}" if lm.witness else ""))
    try:
        tops = [float(p.apply(min(y_bar, p.domain[1]))) for p in phis]
        if abs(tops[0] - tops[1]) > _TOL or abs(tops[0] - tops[2]) > _TOL:
            raise HypothesisError(f"phi tops differ: {tops}")
        stages.append(Stage("phi-tops-equal", "pass"))
    except HypothesisError as exc:
        stages.append(Stage("phi-tops-equal", "hypothesis-failed", str(exc)))
    try:
        for j, psij in ((2, psi2), (3, psi3)):
            lo = max(psi1.domain[0], psij.domain[0])
            hi = min(psi1.domain[1], psij.domain[1])
            xs = np.linspace(lo, hi, max(int(round((hi - lo) / grid_step)), 1) + 1)
            v1 = np.asarray(psi1.apply(xs), dtype=float)
            vj = np.asarray(psij.apply(xs), dtype=float)
            if np.any(v1 < vj - _TOL):
                bad = float(xs[v1 < vj - _TOL][0])
                raise HypothesisError(f"psi1 < psi{j} at x={bad}")
        stages.append(Stage("psi1-dominates", "pass"))
    except HypothesisError as exc:
        stages.append(Stage("psi1-dominates", "hypothesis-failed", str(exc)))
    try:
        xs = np.linspace(0.0, y_bar, max(int(round(y_bar / grid_step)), 1) + 1)
        upper = np.asarray(psi1.apply(np.asarray(phi1.apply(xs), dtype=float)), dtype=float)
        if np.any(upper < xs - _TOL):
            bad = float(xs[upper < xs - _TOL][0])
            raise HypothesisError(f"psi1(phi1(x)) < x at x={bad}")
        for j, phij, psij in ((2, phi2, psi2), (3, phi3, psi3)):
            lower = np.asarray(psij.apply(np.asarray(phij.apply(xs), dtype=float)), dtype=float)
            if np.any(lower > xs + _TOL):
                bad = float(xs[lower > xs + _TOL][0])
                raise HypothesisError(f"psi{j}(phi{j}(x)) > x at x={bad}")
        stages.append(Stage("sandwich", "pass"))
    except HypothesisError as exc:
        stages.append(Stage("sandwich", "hypothesis-failed", str(exc)))
    como = is_comonotone(f, g, A)
    stages.append(Stage("comonotonicity", "pass" if como.holds else "fail",
                        f"witness {como.witness}" if como.witness else ""))
    outcome = None
    try:
        mn = min_op(y_bar=y_bar)
        cfg = config(star, star, (mn, mn, mn), mn, phis, psis,
                     k=y_bar, y_bar=y_bar, cd_domain=cd_values(m.value_range()))
        outcome = check_integral_inequality(cfg, m, f, g, A, A)
        stages.append(Stage("integral-inequality", "pass" if outcome.holds else "fail",
                            f"lhs={outcome.lhs} rhs={outcome.rhs}"))
    except HypothesisError as exc:
        stages.append(Stage("integral-inequality", "hypothesis-failed", str(exc)))
    return PipelineReport(tuple(stages), outcome)


def liapunov_check(m: MonotoneMeasure, f: SimpleFunction, A: int,
                   phi1, phi2, psi1, psi2, grid_step=0.01, y_bar=1.0) -> PipelineReport:
    """Liapunov-type inequality psi1(I_min(phi1 f)) >= psi2(I_min(phi2 f)).

    Reduction to the comonotone pipeline with star = min and g = f.
    """
    return sugeno_chebyshev(m, f, f, A, (phi1, phi2, phi2), (psi1, psi2, psi2),
                            min_op(y_bar=y_bar), grid_step, y_bar)


def any_functions_check(cfg: InequalityConfig, m: MonotoneMeasure, trials=200,
                        seed=0, grid_step=0.01) -> PipelineReport:
    """Chebyshev inequality for arbitrary (not necessarily comonotone) pairs.

    Requires outer = inner; checks the measure-level condition
    m(C&D) >= triangle(m(C), m(D)), the scalar condition, then `trials`
    random function pairs.
    """
    stages = []
    if cfg.outer is not cfg.inner and cfg.outer.name != cfg.inner.name:
        stages.append(Stage("outer-equals-inner", "hypothesis-failed",
                            "this pipeline requires outer = inner"))
    else:
        stages.append(Stage("outer-equals-inner", "pass"))
    try:
        sup = measure_supports_all_pairs(m, cfg.triangle, allow_range_escape=True)
        stages.append(Stage("measure-supports-all-pairs", "pass" if sup.holds else "fail",
                            f"witness {sup.witness}" if sup.witness else ""))
    except Exception as exc:  # noqa: BLE001
        stages.append(Stage("measure-supports-all-pairs", "hypothesis-failed", str(exc)))
    scal = check_scalar_condition(replace(cfg, cd_domain=cd_values(m.value_range())), grid_step)
    stages.append(Stage("scalar-condition",
                        {"holds-on-grid": "pass", "violated": "fail"}.get(scal.status, "hypothesis-failed"),
                        f"witness {scal.witness}" if scal.witness else scal.detail))
    rng = np.random.default_rng(seed)
    n = m.space.n
    failures = 0
    first = None
    outcome = None
    for _ in range(trials):
        f = simple_function(m.space, rng.uniform(0.0, cfg.k, n), bound=cfg.k)
        g = simple_function(m.space, rng.uniform(0.0, cfg.k, n), bound=cfg.k)
        A = int(rng.integers(1, m.space.full_mask + 1))
        B = int(rng.integers(1, m.space.full_mask + 1))
        outcome = check_integral_inequality(cfg, m, f, g, A, B)
        if not outcome.holds:
            failures += 1
            if first is None:
                first = (f.values, g.values, A, B, outcome.lhs, outcome.rhs)
    stages.append(Stage("random-trials", "pass" if failures == 0 else "fail",
                        f"{trials} trials, {failures} violations, seed {seed}"
                        + (f", first {first}" if first else "")))
    return PipelineReport(tuple(stages), outcome)


# ---------------------------------------------------------------------------
# q-integral corollary condition
# ---------------------------------------------------------------------------


def q_condition_at(conj: FusionOp, phis, star: FusionOp, a, b, c):
    phi1, phi2, phi3 = phis
    lhs = phi1.apply_inverse(eval_op(conj, a, float(phi1.apply(eval_op(star, b, c)))))
    r1 = eval_op(star,
                 float(phi2.apply_inverse(eval_op(conj, a, float(phi2.apply(b))))),
                 float(phi3.apply_inverse(eval_op(conj, 1.0, float(phi3.apply(c))))))
    r2 = eval_op(star,
                 float(phi2.apply_inverse(eval_op(conj, 1.0, float(phi2.apply(b))))),
                 float(phi3.apply_inverse(eval_op(conj, a, float(phi3.apply(c))))))
    return float(lhs), max(float(r1), float(r2))


def q_corollary_condition(conj: FusionOp, phis, star: FusionOp, grid_step=0.01) -> Verdict:
    """Three-variable scalar condition for the q-integral Chebyshev inequality.

    The boundary slice b = 1 is scanned first (it is where degenerate
    conjunction behaviour shows up), then the full (a, b, c) grid; the first
    witness in that scan order is re-checked and reported.
    """
    phi1, phi2, phi3 = phis
    try:
        if not conj.fuzzy_conjunction:
            raise HypothesisError(f"{conj.name!r} lacks the fuzzy_conjunction flag")
        for i, phi in enumerate(phis, start=1):
            if phi.inverse is None:
                raise HypothesisError(f"phi{i} needs a declared inverse")
            if abs(float(phi.apply(0.0))) > 1e-12:
                raise HypothesisError(f"phi{i}(0) = {float(phi.apply(0.0))}, expected 0")
            top = float(phi.apply(1.0))
            if eval_op(conj, 1.0, top) > top + _TOL:
                raise HypothesisError(f"1 conj phi{i}(1) exceeds phi{i}(1)")
    except HypothesisError as exc:
        return Verdict("hypothesis-failed", detail=str(exc))
    count = int(round(1.0 / grid_step)) + 1
    xs = np.linspace(0.0, 1.0, count)
    evidence = f"grid({grid_step}), boundary slice b=1 scanned first"

    def scan(b_values):
        phi2_b = np.asarray(phi2.apply(b_values), dtype=float)
        inv2_1b = np.asarray(phi2.apply_inverse(
            np.asarray(apply_op(conj, 1.0, phi2_b), dtype=float)), dtype=float)
        phi3_c = np.asarray(phi3.apply(xs), dtype=float)
        inv3_1c = np.asarray(phi3.apply_inverse(
            np.asarray(apply_op(conj, 1.0, phi3_c), dtype=float)), dtype=float)
        for a in xs:
            phi1_bc = np.asarray(phi1.apply(np.asarray(
                apply_op(star, b_values[:, None], xs[None, :]), dtype=float)), dtype=float)
            lhs = np.asarray(phi1.apply_inverse(np.asarray(
                apply_op(conj, a, phi1_bc), dtype=float)), dtype=float)
            inv2_ab = np.asarray(phi2.apply_inverse(np.asarray(
                apply_op(conj, a, phi2_b), dtype=float)), dtype=float)
            inv3_ac = np.asarray(phi3.apply_inverse(np.asarray(
                apply_op(conj, a, phi3_c), dtype=float)), dtype=float)
            r1 = np.asarray(apply_op(star, inv2_ab[:, None], inv3_1c[None, :]), dtype=float)
            r2 = np.asarray(apply_op(star, inv2_1b[:, None], inv3_ac[None, :]), dtype=float)
            rhs = np.maximum(r1, r2)
            viol = lhs < rhs - _TOL
            if np.any(viol):
                j, p = (int(v) for v in np.argwhere(viol)[0])
                witness = (float(a), float(b_values[j]), float(xs[p]))
                wl, wr = q_condition_at(conj, phis, star, *witness)
                if wl < wr - _TOL:
                    return Verdict("violated", witness, wl, wr, evidence=evidence)
        return None

    found = scan(np.asarray([1.0]))
    if found is None:
        found = scan(xs)
    return found if found is not None else Verdict("holds-on-grid", evidence=evidence)


# ---------------------------------------------------------------------------
# Counterexample search
# ---------------------------------------------------------------------------


def search_counterexample(cfg: InequalityConfig, grid_step=0.01, budget=5_000_000):
    """Coarse-to-fine scan for a scalar-condition witness within a point budget.

    Returns the first (lexicographic) witness found on the finest grid the
    budget allowed, or None.
    """
    if budget <= 0:
        raise ValueError("budget must be positive")
    steps = [s for s in (0.25, 0.1, 0.05, 0.02) if s > grid_step] + [grid_step]
    spent = 0
    for step in steps:
        n_ab = int(round(cfg.k / step)) + 1
        n_cd = len(cfg.cd_domain.sample(step))
        cost = (n_ab ** 2) * (n_cd ** 2)
        if spent + cost > budget and spent > 0:
            break
        spent += cost
        verdict = check_scalar_condition(cfg, step)
        if verdict.status == "violated":
            return verdict.witness
        if verdict.status == "hypothesis-failed":
            raise HypothesisError(verdict.detail)
    return None


def search_commutativity_gap(S: FusionOp, star: FusionOp | None = None, grid_step=0.01):
    """Find (a, b, c) where the two argument-order variants of the scalar
    condition for a seminormed integral disagree; None for commutative S."""
    from .fusion import prod_op

    star = star or prod_op()
    count = int(round(1.0 / grid_step)) + 1
    xs = np.linspace(0.0, 1.0, count)
    S_ac = np.asarray(apply_op(S, xs[:, None], xs[None, :]), dtype=float)  # S(x, y)
    for a in xs:
        ab = np.asarray(apply_op(star, a, xs), dtype=float)  # over b
        # variant 1: S(a*b, c) >= (S(a,c)*b) v (a*S(b,c))
        lhs1 = np.asarray(apply_op(S, ab[:, None], xs[None, :]), dtype=float)
        i = int(round(a / grid_step))
        t1 = np.asarray(apply_op(star, S_ac[i][None, :], xs[:, None]), dtype=float)
        t2 = np.asarray(apply_op(star, a, S_ac), dtype=float)
        ok1 = lhs1 >= np.maximum(t1, t2) - _TOL
        # variant 2: S(c, a*b) >= (S(c,a)*b) v (a*S(c,b))
        lhs2 = np.asarray(apply_op(S, xs[None, :], ab[:, None]), dtype=float)
        u1 = np.asarray(apply_op(star, S_ac[:, i][None, :], xs[:, None]), dtype=float)
        u2 = np.asarray(apply_op(star, a, S_ac.T), dtype=float)
        ok2 = lhs2 >= np.maximum(u1, u2) - _TOL
        differ = ok1 != ok2
        if np.any(differ):
            j, p = (int(v) for v in np.argwhere(differ)[0])
            return (float(a), float(xs[j]), float(xs[p]))
    return None
