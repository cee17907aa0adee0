"""Scenario files: a JSON data model describing measures, functions, fusion
operations and shape functions, plus runners producing versioned reports.

A scenario is a JSON object with a "kind" selecting the check to run
(integrate | dependence | condition | inequality | search | property-run).
One file may hold a single scenario object or a list of them.  Bundled
scenarios live in the package's scenarios/ directory.
"""

from __future__ import annotations

import json
from importlib import resources

from . import chebyshev as cheb
from . import fusion
from .dependence import (DependenceQuery, is_m_positively_dependent)
from .integral import (integrate_simple, integrate_survival, q_integral,
                       simple_function)
from .measure import (FiniteSpace, MonotoneMeasure, distorted_probability,
                      from_table, necessity_from_possibility,
                      survival_scenario)
from .exprlang import eval_expr, parse

REPORT_VERSION = 1


class ScenarioError(Exception):
    pass


# ---------------------------------------------------------------------------
# Builders: JSON blocks -> library objects
# ---------------------------------------------------------------------------


def build_space(block) -> FiniteSpace:
    return FiniteSpace(tuple(block))


def build_measure(block, sp: FiniteSpace) -> MonotoneMeasure:
    kind = block.get("type", "table")
    if kind == "table":
        entries = {sp.mask_of(key.split()): v for key, v in block["table"].items()}
        return from_table(sp, entries)
    if kind == "necessity":
        pi = [block["possibility"][lab] for lab in sp.labels]
        return necessity_from_possibility(sp, pi)
    if kind == "distorted":
        p = [block["probability"][lab] for lab in sp.labels]
        return distorted_probability(sp, p, block["distortion"])
    raise ScenarioError(f"unknown measure type {kind!r}")


def build_op(block) -> fusion.FusionOp:
    if isinstance(block, str):
        block = {"builtin": block}
    if "builtin" in block:
        return fusion.builtin(block["builtin"], block.get("y_bar", 1.0))
    flags = block.get("flags", {})
    return fusion.expr_op(block.get("name", "custom"), block["expr"],
                          y_bar=block.get("y_bar", 1.0),
                          arg_names=tuple(block.get("args", ("a", "b"))), **flags)


_SHAPE_DEFAULTS = {"non_decreasing": True, "increasing": True,
                   "left_continuous": True, "right_continuous": True}


def build_shape(block) -> cheb.ShapeFunction:
    if isinstance(block, str):
        block = {"expr": block}
    flags = dict(_SHAPE_DEFAULTS)
    flags.update(block.get("flags", {}))
    return cheb.shape(block.get("name", block["expr"]), block["expr"],
                      inverse=block.get("inverse"),
                      var=block.get("var", "x"),
                      domain=tuple(block.get("domain", (0.0, 1.0))),
                      inverse_domain=block.get("inverse_domain"), **flags)


def _triple(block, build):
    if isinstance(block, list):
        if len(block) != 3:
            raise ScenarioError("expected exactly three entries")
        return tuple(build(b) for b in block)
    built = build(block)
    return (built, built, built)


def build_function(block, sp: FiniteSpace, bound=None):
    if isinstance(block, dict) and "values" in block:
        bound = block.get("bound", bound)
        block = block["values"]
    values = [block[lab] for lab in sp.labels] if isinstance(block, dict) else list(block)
    return simple_function(sp, values, bound=bound)


def build_mask(block, sp: FiniteSpace) -> int:
    return sp.mask_of(block)


def build_cd(block) -> cheb.CdDomain:
    if "values" in block:
        return cheb.cd_values(block["values"])
    return cheb.cd_interval(*block["interval"])


def build_config(block) -> cheb.InequalityConfig:
    return cheb.config(
        inner=build_op(block["inner"]),
        outer=build_op(block["outer"]),
        circs=_triple(block["circ"], build_op),
        triangle=build_op(block.get("triangle", "min")),
        phis=_triple(block.get("phi", "x"), build_shape),
        psis=_triple(block.get("psi", "x"), build_shape),
        k=block.get("k", 1.0),
        y_bar=block.get("y_bar", 1.0),
        cd_domain=build_cd(block["cd"]) if "cd" in block else None,
    )


def build_survival(block):
    return survival_scenario(block.get("y_bar", 1.0),
                             [(seg[0], seg[1]) for seg in block["segments"]],
                             var=block.get("var", "t"))


# ---------------------------------------------------------------------------
# Runners
# ---------------------------------------------------------------------------


def _verdict_dict(v: cheb.Verdict):
    return {"status": v.status, "witness": list(v.witness) if v.witness else None,
            "lhs": v.lhs, "rhs": v.rhs, "detail": v.detail, "evidence": v.evidence}


def _exit_for_status(status):
    return {"holds-on-grid": 0, "holds": 0, "violated": 1}.get(status, 2)


def _run_integrate(data, grid_step, seed, budget):
    results = {}
    bindings = {}
    for item in data["integrals"]:
        op = build_op(item.get("op", "min"))
        if "survival" in item:
            sv = build_survival(item["survival"])
            res = integrate_survival(op, sv, grid_step=grid_step or 1e-4)
        else:
            sp = build_space(item["space"])
            m = build_measure(item["measure"], sp)
            f = build_function(item["f"], sp, bound=item.get("bound"))
            D = build_mask(item.get("set", list(sp.labels)), sp)
            if item.get("integral") == "q":
                res = q_integral(op, m, f)
            else:
                res = integrate_simple(op, m, D, f)
        results[item["name"]] = {"value": res.value, "method": res.method}
        bindings[item["name"]] = res.value
    report = {"integrals": results, "verdict": "computed"}
    exit_code = 0
    if "equality" in data:
        eq = data["equality"]
        lhs = float(eval_expr(parse(eq["lhs"]), bindings))
        rhs = float(eval_expr(parse(eq["rhs"]), bindings))
        holds = abs(lhs - rhs) <= eq.get("tol", 1e-9)
        report["equality"] = {"lhs": lhs, "rhs": rhs, "holds": holds}
        report["verdict"] = "equality-holds" if holds else "equality-violated"
        exit_code = 0 if holds else 1
    return exit_code, report


def _run_dependence(data, grid_step, seed, budget):
    sp = build_space(data["space"])
    m = build_measure(data["measure"], sp)
    k = data.get("k", 1.0)
    f = build_function(data["f"], sp, bound=k)
    g = build_function(data["g"], sp, bound=k)
    A = build_mask(data.get("A", list(sp.labels)), sp)
    B = build_mask(data.get("B", list(sp.labels)), sp)
    tri = build_op(data["triangle"])
    query = DependenceQuery(m, f, g, A, B, tri, k,
                            allow_range_escape=data.get("allow_range_escape", False))
    verdict = is_m_positively_dependent(query)
    report = {"holds": verdict.holds,
              "witness": list(verdict.witness) if verdict.witness else None,
              "warnings": list(verdict.warnings),
              "detail": verdict.detail,
              "evidence": "exact"}
    report["verdict"] = "dependent" if verdict.holds else "not-dependent"
    return (0 if verdict.holds else 1), report


def _run_condition(data, grid_step, seed, budget):
    step = grid_step or data.get("grid", 0.01)
    variant = data.get("variant", "c1")
    if variant == "q":
        conj = build_op(data["conj"])
        star = build_op(data["star"])
        phis = _triple(data.get("phi", {"expr": "x", "inverse": "x"}), build_shape)
        verdict = cheb.q_corollary_condition(conj, phis, star, grid_step=step)
    else:
        cfg = build_config(data["config"])
        check = cheb.check_condition_C2 if variant == "c2" else cheb.check_scalar_condition
        verdict = check(cfg, grid_step=step)
    report = _verdict_dict(verdict)
    report["verdict"] = verdict.status
    if "recheck" in data and variant == "c1":
        point = data["recheck"]["point"]
        lhs, rhs = cheb.scalar_condition_at(build_config(data["config"]), *point)
        report["recheck"] = {"point": point, "lhs": lhs, "rhs": rhs,
                             "violated": lhs < rhs - 1e-9}
    return _exit_for_status(verdict.status), report


def _pipeline_dict(rep: cheb.PipelineReport):
    out = {"stages": [{"name": s.name, "status": s.status, "detail": s.detail}
                      for s in rep.stages],
           "status": rep.status, "contradiction": rep.contradiction}
    if rep.outcome is not None:
        out["lhs"] = rep.outcome.lhs
        out["rhs"] = rep.outcome.rhs
        out["holds"] = rep.outcome.holds
    return out


def _run_inequality(data, grid_step, seed, budget):
    step = grid_step or data.get("grid", 0.01)
    sp = build_space(data["space"])
    m = build_measure(data["measure"], sp)
    pipeline = data.get("pipeline")
    if pipeline == "sugeno":
        k = data.get("y_bar", 1.0)
        f = build_function(data["f"], sp, bound=k)
        g = build_function(data["g"], sp, bound=k)
        A = build_mask(data.get("A", list(sp.labels)), sp)
        rep = cheb.sugeno_chebyshev(m, f, g, A,
                                    _triple(data.get("phi", "x"), build_shape),
                                    _triple(data.get("psi", "x"), build_shape),
                                    build_op(data["star"]), grid_step=step, y_bar=k)
        report = _pipeline_dict(rep)
        report["verdict"] = rep.status
        report["evidence"] = f"grid({step})"
        return _exit_for_status(rep.status), report
    cfg = build_config(data["config"])
    f = build_function(data["f"], sp, bound=cfg.k)
    g = build_function(data["g"], sp, bound=cfg.k)
    A = build_mask(data.get("A", list(sp.labels)), sp)
    B = build_mask(data.get("B", list(sp.labels)), sp)
    if pipeline == "theorem-forward":
        rep = cheb.theorem1_forward(cfg, m, f, g, A, B, grid_step=step)
        report = _pipeline_dict(rep)
        report["verdict"] = rep.status
        report["evidence"] = f"grid({step})"
        return _exit_for_status(rep.status), report
    if pipeline == "any-functions":
        rep = cheb.any_functions_check(cfg, m, trials=data.get("trials", 200),
                                       seed=seed if seed is not None else data.get("seed", 0),
                                       grid_step=step)
        report = _pipeline_dict(rep)
        report["verdict"] = rep.status
        report["evidence"] = (f"random-trials({data.get('trials', 200)}, "
                              f"seed {seed if seed is not None else data.get('seed', 0)})")
        return _exit_for_status(rep.status), report
    try:
        outcome = cheb.check_integral_inequality(cfg, m, f, g, A, B)
    except cheb.HypothesisError as exc:
        return 2, {"verdict": "hypothesis-failed", "detail": str(exc), "evidence": "exact"}
    report = {"lhs": outcome.lhs, "rhs": outcome.rhs, "holds": outcome.holds,
              "trace": outcome.trace, "evidence": "exact"}
    if data.get("expect_equality"):
        equal = abs(outcome.lhs - outcome.rhs) <= 1e-9
        report["equality"] = equal
        report["verdict"] = "equality-holds" if equal else "equality-violated"
        return (0 if equal else 1), report
    report["verdict"] = "holds" if outcome.holds else "violated"
    return (0 if outcome.holds else 1), report


def _run_search(data, grid_step, seed, budget):
    step = grid_step or data.get("grid", 0.01)
    cfg = build_config(data["config"])
    try:
        witness = cheb.search_counterexample(cfg, grid_step=step,
                                             budget=budget or data.get("budget", 5_000_000))
    except cheb.HypothesisError as exc:
        return 2, {"verdict": "hypothesis-failed", "detail": str(exc)}
    report = {"witness": list(witness) if witness else None,
              "verdict": "witness-found" if witness else "no-witness",
              "evidence": f"coarse-to-fine grid down to {step}"}
    return (1 if witness else 0), report


def _run_property(data, grid_step, seed, budget):
    step = grid_step or data.get("grid", 0.01)
    prop = data["property"]
    if prop == "dominates":
        outer = build_op(data["outer"])
        inner = build_op(data["inner"])
        verdict = fusion.dominates(outer, inner, grid_step=step)
        report = {"holds": verdict.holds,
                  "witness": list(verdict.witness) if verdict.witness else None,
                  "verdict": "holds-on-grid" if verdict.holds else "violated",
                  "evidence": f"grid({step})"}
        return (0 if verdict.holds else 1), report
    if prop == "commutativity-gap":
        witness = cheb.search_commutativity_gap(build_op(data["op"]),
                                                build_op(data.get("star", "prod")),
                                                grid_step=step)
        report = {"witness": list(witness) if witness else None,
                  "verdict": "gap-found" if witness else "no-gap",
                  "evidence": f"grid({step})"}
        return (1 if witness else 0), report
    raise ScenarioError(f"unknown property {prop!r}")


_RUNNERS = {
    "integrate": _run_integrate,
    "dependence": _run_dependence,
    "condition": _run_condition,
    "inequality": _run_inequality,
    "search": _run_search,
    "property-run": _run_property,
}


def run_scenario(data, grid_step=None, seed=None, budget=None):
    """Run one scenario dict; returns (exit_code, report dict)."""
    kind = data.get("kind")
    if kind not in _RUNNERS:
        raise ScenarioError(f"unknown scenario kind {kind!r}")
    exit_code, report = _RUNNERS[kind](data, grid_step, seed, budget)
    report["report_version"] = REPORT_VERSION
    report["scenario"] = data.get("name", "<inline>")
    report["kind"] = kind
    return exit_code, report


# ---------------------------------------------------------------------------
# Bundled registry
# ---------------------------------------------------------------------------


def _bundle_dir():
    return resources.files("chebint") / "scenarios"


def list_scenarios():
    names = []
    for entry in _bundle_dir().iterdir():
        if entry.name.endswith(".json"):
            for block in _load_blocks(entry.read_text()):
                names.append(block["name"])
    return sorted(names)


def _load_blocks(text):
    data = json.loads(text)
    return data if isinstance(data, list) else [data]


def load_scenario(name):
    for entry in _bundle_dir().iterdir():
        if entry.name.endswith(".json"):
            for block in _load_blocks(entry.read_text()):
                if block.get("name") == name:
                    return block
    raise ScenarioError(f"unknown scenario {name!r}")


def load_scenario_file(path):
    with open(path, encoding="utf-8") as fh:
        return _load_blocks(fh.read())
