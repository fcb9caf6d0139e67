"""Config-driven experiments and the built-in verification suite."""
from __future__ import annotations

import csv
import difflib
import inspect
import io
import json
import math
import os
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import diagnostics as dg
from .iteration import SCHEMES, IterationTrace, mann_step, mvm_step, run
from .mappings import (MAPPING_SPACES, MAPPINGS, MappingSpec, MeanNonexpConstants, apply,
                       make_mapping, verify_mean_nonexpansive)
from . import mappings as mp
from .schedules import Constant, Geometric, Harmonic, Schedule, rule_from_config
from .spaces import Euclidean, Point, SpaceModel, make_space, verify_axioms

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "ComparisonRow",
    "OUTPUT_ROOT_ENV",
    "parse_config",
    "run_experiment",
    "diagnose",
    "center_inputs",
    "builtin_roster",
    "schedule_cells",
    "PropertyResult",
    "verify_suite",
    "format_table",
]

OUTPUT_ROOT_ENV = "MVMANN_OUTPUT_ROOT"
MAX_TAIL = 500
MAX_CENTER_CANDIDATES = 100


class ConfigError(ValueError):
    """Invalid experiment configuration."""


SECTIONS = {
    "space": {"kind", "dim"},
    "mapping": {"name"},  # plus the mapping's own parameters
    "schedule": {"alpha", "r"},
    "run": {"schemes", "x0", "residual_tol", "max_iters", "seed"},
    "output": {"dir", "csv", "json", "svg"},
}
RULE_KEYS = {"kind", "value", "base", "list"}


@dataclass
class ExperimentConfig:
    space: SpaceModel
    mapping: MappingSpec
    schemes: list
    schedule: Schedule
    x0: Point
    seed: int
    residual_tol: float = 1e-8
    max_iters: int = 100_000
    output_dir: Path = Path("out")
    emit: dict = field(default_factory=lambda: {"csv": True, "json": True, "svg": True})


@dataclass
class ComparisonRow:
    scheme: str
    iterations_to_tol: int | None
    final_residual: float
    final_dist_to_ref: float | None
    stop_reason: str
    wall_time: float = 0.0


def _unknown(key: str, valid, where: str):
    close = difflib.get_close_matches(key, sorted(valid), n=1)
    hint = f"; did you mean {close[0]!r}?" if close else f"; valid keys: {', '.join(sorted(valid))}"
    return ConfigError(f"{where}: unknown key {key!r}{hint}")


def _mapping_params(name: str) -> set:
    sig = inspect.signature(MAPPINGS[name])
    return {p for p in sig.parameters if p != "name"}


def parse_config(source) -> ExperimentConfig:
    """Parse a TOML config from a path, TOML text, or an already-loaded dict."""
    if isinstance(source, dict):
        raw = source
    else:
        text = source
        if isinstance(source, Path) or (isinstance(source, str) and "\n" not in source
                                        and Path(source).is_file()):
            text = Path(source).read_text()
        try:
            raw = tomllib.loads(text)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"malformed config: {exc}") from None

    for sec in raw:
        if sec not in SECTIONS:
            raise _unknown(sec, SECTIONS, "config")
    space_t = raw.get("space", {})
    map_t = raw.get("mapping", {})
    sched_t = raw.get("schedule", {})
    run_t = raw.get("run", {})
    out_t = raw.get("output", {})
    for sec, table in (("space", space_t), ("schedule", sched_t), ("run", run_t), ("output", out_t)):
        for key in table:
            if key not in SECTIONS[sec]:
                raise _unknown(key, SECTIONS[sec], sec)

    # mapping
    name = map_t.get("name")
    if name is None:
        raise ConfigError("mapping.name: required")
    if name not in MAPPINGS:
        raise _unknown(name, MAPPINGS, "mapping.name")
    params = {k: v for k, v in map_t.items() if k != "name"}
    allowed = _mapping_params(name)
    for key in params:
        if key not in allowed:
            raise _unknown(key, allowed | {"name"}, f"mapping ({name})")

    # space
    kind = space_t.get("kind", MAPPING_SPACES[name])
    try:
        space = make_space(kind, space_t.get("dim"))
    except ValueError as exc:
        raise ConfigError(f"space.kind: {exc}") from None
    actual = "euclidean" if isinstance(space, Euclidean) else space.kind
    if actual != MAPPING_SPACES[name]:
        raise ConfigError(f"space.kind: mapping {name!r} lives on {MAPPING_SPACES[name]}, not {kind}")
    if "dim" in allowed and "dim" not in params and space.id.startswith("euclidean"):
        params["dim"] = space.dimension
    try:
        mapping = make_mapping(name, **params)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"mapping: {exc}") from None
    if mapping.space != space:
        raise ConfigError(f"space: mapping {name!r} lives on {mapping.space.id}, config says {space.id}")

    # schedule
    rules = {}
    for which, default in (("alpha", Constant(0.5)), ("r", Constant(1.0))):
        spec = sched_t.get(which)
        if spec is None:
            rules[which] = default
            continue
        if not isinstance(spec, dict):
            spec = {"kind": "constant", "value": spec}
        for key in spec:
            if key not in RULE_KEYS:
                raise _unknown(key, RULE_KEYS, f"schedule.{which}")
        try:
            rules[which] = rule_from_config(spec, which)
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"schedule.{which}: {exc}") from None
    try:
        schedule = Schedule(rules["alpha"], rules["r"])
    except ValueError as exc:
        raise ConfigError(f"schedule: {exc}") from None

    # run
    schemes = run_t.get("schemes", ["mvm"])
    if isinstance(schemes, str):
        schemes = [schemes]
    for s in schemes:
        if s not in SCHEMES:
            raise _unknown(s, SCHEMES, "run.schemes")
    if "seed" not in run_t:
        raise ConfigError("run.seed: required (runs must be reproducible)")
    if "x0" not in run_t:
        raise ConfigError("run.x0: required")
    try:
        x0 = space.point(run_t["x0"])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"run.x0: {exc}") from None
    if not mapping.contains(x0):
        raise ConfigError(f"run.x0: {list(x0.coords)} is outside the domain of {name!r}")
    tol = float(run_t.get("residual_tol", 1e-8))
    max_iters = int(run_t.get("max_iters", 100_000))
    if tol <= 0:
        raise ConfigError("run.residual_tol: must be positive")
    if max_iters < 1:
        raise ConfigError("run.max_iters: must be >= 1")

    emit = {k: bool(out_t.get(k, True)) for k in ("csv", "json", "svg")}
    return ExperimentConfig(space, mapping, list(schemes), schedule, x0, int(run_t["seed"]),
                            tol, max_iters, Path(out_t.get("dir", "out")), emit)


# ---------------------------------------------------------------------------
# experiment runner

def _fmt(v) -> str:
    if v is None:
        return ""
    return repr(float(v))


def _json_safe(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    if isinstance(obj, dict):
        return {str(k): _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def trace_csv(trace: IterationTrace) -> str:
    dim = trace.space.dimension
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", *[f"x{i}" for i in range(dim)], "residual", "dist_to_ref"])
    dist = trace.dist_to_ref
    for i, s in enumerate(trace.states):
        w.writerow([s.n, *[_fmt(c) for c in s.x.coords], _fmt(s.residual),
                    _fmt(dist[i]) if dist is not None else ""])
    return buf.getvalue()


def center_inputs(trace: IterationTrace, extra: list = ()) -> tuple[list, list, int]:
    """Tail and candidate set used for the asymptotic-center report.

    The tail is the last half of the trace, capped at ``MAX_TAIL`` iterates;
    candidates are at most ``MAX_CENTER_CANDIDATES`` evenly spaced tail points
    followed by ``extra``.
    """
    pts = trace.points
    tail_start = max(len(pts) // 2, len(pts) - MAX_TAIL)
    tail = pts[tail_start:] or pts[-1:]
    step = max(1, math.ceil(len(tail) / MAX_CENTER_CANDIDATES))
    return tail, list(tail[::step]) + list(extra), tail_start


def diagnose(trace: IterationTrace, mapping: MappingSpec, seed: int = 0) -> dict:
    """All diagnostic reports for one trace, as a JSON-ready dict."""
    fixed = list(mapping.known_fixed_points)
    tail, candidates, tail_start = center_inputs(trace, fixed)
    center = dg.asymptotic_center(tail, candidates, trace.space, tail_start)
    sub_tail = IterationTrace(trace.scheme, trace.mapping, trace.space, trace.states[tail_start:])
    agreement = dg.subsequence_agreement(sub_tail, extra=fixed, tail_start=0)

    report = {
        "scheme": trace.scheme,
        "mapping": trace.mapping,
        "space": trace.space.id,
        "stop_reason": trace.stop_reason,
        "iterations": trace.final.n,
        "iterations_to_tol": trace.iterations_to_tol,
        "r_saturated": trace.r_saturated,
        "clamped_steps": trace.clamped_steps,
        "alpha_boundary_steps": trace.alpha_boundary_steps,
        "residual_profile": dg.residual_profile(trace).to_dict(),
        "asymptotic_center": center.to_dict(),
        "subsequence_agreement": agreement.to_dict(),
    }
    if trace.ref_fixed_point is not None:
        z = trace.ref_fixed_point
        report["fejer"] = dg.fejer_check(trace, z).to_dict()
        report["bounded_limits"] = dg.bounded_limits_check(trace, z, fixed).to_dict()
        report["strong_convergence"] = dg.strong_convergence_check(trace, fixed, 1e-6).to_dict()
    c = mapping.claimed_constants or MeanNonexpConstants(1.0, 0.0)
    report["mean_nonexpansive_check"] = verify_mean_nonexpansive(mapping, c, 1000, seed).to_dict()
    return report


def run_experiment(cfg: ExperimentConfig) -> dict:
    """Run every configured scheme and write the output files.

    Returns ``{"files": [...], "rows": [ComparisonRow, ...]}``.  Wall times
    go to ``timings.json`` only, so ``comparison.csv`` and the per-scheme
    CSV/JSON files are byte-reproducible.
    """
    out = cfg.output_dir
    root = os.environ.get(OUTPUT_ROOT_ENV)
    if root and not out.is_absolute():
        out = Path(root) / out
    out.mkdir(parents=True, exist_ok=True)
    files, rows, timings = [], [], {}
    for scheme in cfg.schemes:
        t0 = time.perf_counter()
        trace = run(scheme, cfg.mapping, cfg.x0, cfg.schedule, cfg.residual_tol, cfg.max_iters)
        wall = time.perf_counter() - t0
        timings[scheme] = wall
        dist = trace.dist_to_ref[-1] if trace.dist_to_ref else None
        rows.append(ComparisonRow(scheme, trace.iterations_to_tol, trace.final.residual, dist,
                                  trace.stop_reason, wall))
        if cfg.emit["csv"]:
            p = out / f"{scheme}_trace.csv"
            p.write_text(trace_csv(trace))
            files.append(p)
        if cfg.emit["json"]:
            p = out / f"{scheme}_diag.json"
            p.write_text(json.dumps(_json_safe(diagnose(trace, cfg.mapping, cfg.seed)),
                                    indent=2, sort_keys=True) + "\n")
            files.append(p)
        if cfg.emit["svg"]:
            from .svg import log_line_chart

            ns = [s.n for s in trace.states]
            series = {"residual": (ns, trace.residuals)}
            if trace.dist_to_ref is not None:
                series["dist_to_ref"] = (ns, trace.dist_to_ref)
            p = out / f"{scheme}_conv.svg"
            p.write_text(log_line_chart(series, f"{scheme} on {cfg.mapping.name}"))
            files.append(p)

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["scheme", "iterations_to_tol", "final_residual", "final_dist_to_ref", "stop_reason"])
    for r in rows:
        w.writerow([r.scheme, "not reached" if r.iterations_to_tol is None else r.iterations_to_tol,
                    _fmt(r.final_residual), _fmt(r.final_dist_to_ref), r.stop_reason])
    p = out / "comparison.csv"
    p.write_text(buf.getvalue())
    files.append(p)
    p = out / "timings.json"
    p.write_text(json.dumps(timings, indent=2) + "\n")
    files.append(p)
    return {"files": files, "rows": rows, "output_dir": out}


# ---------------------------------------------------------------------------
# verification suite

def builtin_roster(include_negative_control: bool = False) -> list:
    """``(mapping, x0)`` pairs for the mean nonexpansive built-ins with known fixed points."""
    cells = [
        (mp.halving(1), (1.0,)),
        (mp.halving(3), (0.6, -0.5, 0.3)),
        (mp.affine(), (0.8, -0.5)),
        (mp.disk_rotation(), (0.7, 0.3)),
        (mp.tripod_retraction(), (1, 4.0)),
        (mp.reflection(1), (0.8,)),
    ]
    if include_negative_control:
        cells.append((mp.doubling(1), (1.0,)))
    return [(m, m.space.point(x0)) for m, x0 in cells]


def is_contraction(m: MappingSpec) -> bool:
    c = m.claimed_constants
    return c is not None and c.a + c.b < 1


def schedule_cells() -> list:
    """``alpha in {0.1, 0.5, 0.9}`` crossed with ``r in {0, 1, 2^n (saturating), 1/(n+1)}``."""
    return [(f"alpha={a},r={rn}", Schedule(Constant(a), rule))
            for a in (0.1, 0.5, 0.9)
            for rn, rule in (("0", Constant(0.0)), ("1", Constant(1.0)),
                             ("2^n", Geometric(2.0)), ("1/(n+1)", Harmonic()))]


@dataclass
class PropertyResult:
    name: str
    passed: bool
    detail: str = ""


def _check_reduction_picard(m, rng) -> tuple[bool, str]:
    worst = 0.0
    for _ in range(100):
        x = m.sample(rng)
        got, _ = mvm_step(m, x, 1.0, 0.0)
        want = apply(m, apply(m, x))
        worst = max(worst, m.space.distance(got, want))
    return worst <= 1e-12, f"max deviation {worst:.3g}"


def _check_reduction_ishikawa(m, x0) -> tuple[bool, str]:
    sched = Schedule(Constant(0.5), Constant(1.0))
    a = run("mvm", m, x0, sched, 1e-300, 200)
    b = run("ishikawa", m, x0, sched, 1e-300, 200)
    if len(a) != len(b):
        return False, f"trace lengths differ ({len(a)} vs {len(b)})"
    worst = max(m.space.distance(p, q) for p, q in zip(a.points, b.points))
    return worst <= 1e-12, f"max deviation {worst:.3g} over {len(a)} states"


def _check_reduction_mann(m, rng, n_points: int = 20) -> tuple[bool, str]:
    rs = [10.0 ** k for k in range(9)]
    worst_final, monotone = 0.0, True
    for _ in range(n_points):
        x = m.sample(rng)
        alpha = 0.5
        target = mann_step(m, x, alpha)
        devs = [m.space.distance(mvm_step(m, x, alpha, r)[0], target) for r in rs]
        monotone &= all(b <= a for a, b in zip(devs, devs[1:]))
        worst_final = max(worst_final, devs[-1])
    return monotone and worst_final <= 1e-6, f"monotone={monotone}, deviation at r=1e8: {worst_final:.3g}"


def verify_suite(seed: int = 0, spaces: list | None = None,
                 include_negative_control: bool = False, fejer_iters: int = 10_000) -> list:
    """Run the invariant matrix and return one :class:`PropertyResult` per check."""
    rng = np.random.default_rng(seed)
    results = []
    all_spaces = [make_space("euclidean", 3), make_space("poincare"), make_space("tripod")]
    if spaces:
        all_spaces = [s for s in all_spaces
                      if ("euclidean" if isinstance(s, Euclidean) else s.kind) in spaces]
    space_ids = {"euclidean" if isinstance(s, Euclidean) else s.kind for s in all_spaces}

    for s in all_spaces:
        rep = verify_axioms(s, 1000, seed)
        bad = [k for k, ok in rep.passed.items() if not ok]
        worst = max(rep.worst.values())
        results.append(PropertyResult(f"axioms[{s.id}]", rep.all_passed,
                                      f"failed {bad}" if bad else f"worst {worst:.3g} (tol {rep.tol:g})"))

    roster = [(m, x0) for m, x0 in builtin_roster(include_negative_control)
              if MAPPING_SPACES[m.name] in space_ids]
    for m, x0 in roster:
        tag = f"{m.name}[{m.space.id}]"
        d = m.space.distance
        fp = max(d(z, apply(m, z)) for z in m.known_fixed_points)
        results.append(PropertyResult(f"fixed_points:{tag}", fp <= 1e-10, f"max d(z,Tz) {fp:.3g}"))
        escapes = sum(not m.contains(apply(m, m.sample(rng))) for _ in range(1000))
        results.append(PropertyResult(f"self_map:{tag}", escapes == 0, f"{escapes} escapes / 1000"))
        c = m.claimed_constants or MeanNonexpConstants(1.0, 0.0)
        vr = verify_mean_nonexpansive(m, c, 1000, seed)
        detail = f"(a,b)=({c.a:g},{c.b:g}) worst margin {vr.worst_margin:.3g}"
        if vr.witness:
            detail += f" witness {[list(p.coords) for p in vr.witness]}"
        results.append(PropertyResult(f"mean_nonexpansive:{tag}", vr.passed, detail))
        results.append(PropertyResult(f"reduction_two_step_picard:{tag}",
                                      *_check_reduction_picard(m, rng)))
        results.append(PropertyResult(f"reduction_ishikawa:{tag}", *_check_reduction_ishikawa(m, x0)))
        results.append(PropertyResult(f"reduction_mann_limit:{tag}", *_check_reduction_mann(m, rng)))

        fejer_bad, res_bad, strong_bad, center_bad = [], [], [], []
        for label, sched in schedule_cells():
            tr = run("mvm", m, x0, sched, 1e-8, fejer_iters)
            fr = dg.fejer_check(tr, tr.ref_fixed_point)
            if not fr.passed:
                fejer_bad.append(f"{label} (+{fr.max_increase:.3g})")
            if is_contraction(m):
                if tr.stop_reason != "residual_tol":
                    tr = run("mvm", m, x0, sched, 1e-8, 100_000)
                if tr.final.residual > 1e-8:
                    res_bad.append(f"{label} ({tr.final.residual:.3g})")
                sc = dg.strong_convergence_check(tr, list(m.known_fixed_points), 1e-6)
                if not sc or d(tr.final.x, tr.ref_fixed_point) > 1e-6:
                    strong_bad.append(label)
            center = dg.trace_center(tr, list(m.known_fixed_points),
                                     tail_start=max(0, len(tr) - 200))
            tail = tr.points[center.tail_start:]
            cands = list(tail) + list(m.known_fixed_points)
            objs = [max(d(x, c) for x in tail) for c in cands]
            if objs[center.center_index] != min(objs) or objs.index(min(objs)) != center.center_index:
                center_bad.append(label)
        results.append(PropertyResult(f"fejer_monotone:{tag}", not fejer_bad,
                                      "; ".join(fejer_bad) or "all schedule cells"))
        if is_contraction(m):
            results.append(PropertyResult(f"residual_below_tol:{tag}", not res_bad,
                                          "; ".join(res_bad) or "all cells below 1e-8"))
            results.append(PropertyResult(f"strong_convergence:{tag}", not strong_bad,
                                          "; ".join(strong_bad) or "all cells within 1e-6"))
        results.append(PropertyResult(f"asymptotic_center_argmin:{tag}", not center_bad,
                                      "; ".join(center_bad) or "exact finite argmin"))
    return results


def format_table(results: list) -> str:
    width = max(len(r.name) for r in results) if results else 10
    lines = [f"{'property':<{width}}  result  detail", "-" * (width + 40)]
    for r in results:
        lines.append(f"{r.name:<{width}}  {'PASS' if r.passed else 'FAIL':<6}  {r.detail}")
    n_fail = sum(not r.passed for r in results)
    lines.append(f"{len(results) - n_fail}/{len(results)} properties passed")
    return "\n".join(lines)
