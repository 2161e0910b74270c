"""
Run orchestration: dispatch a RunConfig to its module, collect a RunReport,
and map the outcome to an exit status.

    0  every requested enclosure certified
    2  Halted; the report holds the partial (still rigorous) results
    1  any other error
"""

import logging
import math
import time
import uuid
from dataclasses import dataclass, field
from decimal import ROUND_FLOOR, Decimal, localcontext
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

from rich.console import Console
from rich.markup import escape

from src.cli.config_file import load_run_config
from src.cli.emit import effort_table, emit_results
from src.core.config import get_settings
from src.core.errors import ConfigError, EncloseError, Halted
from src.core.models import EffortReport, HaltInfo, RunConfig, RunReport, StageRecord
from src.forms.chain import FormChain, chain_eigen_lists
from src.forms.system import SystemFixture, system_fixture_lists, system_form_chain
from src.graphenclose.chain import DEFAULT_TOL as GRAPH_TOL
from src.graphenclose.chain import congestion_order, edge_chain_enclose
from src.graphenclose.graph import (Graph, grid_graph, parse_edge_list, parse_edge_pairs, parse_vertex_groups,
                                    staircase_graph, triangle_graphs)
from src.graphenclose.homotopy import HomotopySchedule, homotopy_sweep, run_homotopy
from src.graphenclose.partition import PartitionEncloser, balanced_tree, ceiling_for, partition_enclose
from src.graphenclose.poincare import (degenerate_profile, oracle_mu1, poincare_certificate, staircase_experiment,
                                       staircase_paths)
from src.ival import rounding as rd
from src.ival.array import IntervalMatrix
from src.ival.interval import Interval
from src.memory.report_store import ReportStore
from src.observability.logger import get_logger, set_level_for_all, set_trace_id_for_all
from src.observability.metrics import get_metrics
from src.observability.tracer import trace_operation
from src.slenclose.coefficients import parse_coefficient
from src.slenclose.driver import DriverConfig, effort_report, run_hierarchical
from src.slenclose.partition import DEFAULT_MAX_LEVEL
from src.slenclose.problem import BC, BoundaryCondition, SLProblem, Unit

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_HALTED = 2

SL_TOL = 1e-6
BASIS_DEGREES = (16, 24, 32)


@dataclass
class Outcome:
    stages: List[StageRecord]
    effort: Optional[EffortReport] = None
    notes: Dict[str, Any] = field(default_factory=dict)
    halted: Optional[HaltInfo] = None


def _fraction(text: str, field: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"not a rational number: {text!r}", field=field) from exc


def _fractions(text: str, field: str) -> List[Fraction]:
    return [_fraction(part, field) for part in text.split(",") if part.strip()]


def _range(text: str, field: str) -> List[Fraction]:
    """start:step:stop, inclusive"""
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"range must read start:step:stop, got {text!r}", field=field)
    start, step, stop = (_fraction(p, field) for p in parts)
    if step <= 0:
        raise ConfigError("range step must be positive", field=field)
    out = []
    value = start
    while value <= stop:
        out.append(value)
        value += step
    return out


def _s_label(s: Fraction) -> str:
    return format(float(s), "g")


def _scaled(values, scale: Interval) -> List[Interval]:
    return [v * scale for v in values]


def _scaled_ceiling(ceiling: float, scale: Interval) -> float:
    return ceiling if ceiling == float("inf") else rd.mul_down(ceiling, scale.lo)


def _degrees(first: Optional[int]) -> tuple:
    if first is None:
        return BASIS_DEGREES
    return (first,) + tuple(d for d in BASIS_DEGREES if d > first)


# builders


def build_problem(cfg: RunConfig) -> SLProblem:
    s = cfg.sl
    lo, hi = _fraction(s.lo, "sl.lo"), _fraction(s.hi, "sl.hi")
    unit = Unit(s.unit)
    try:
        bc = BoundaryCondition(BC.parse(s.left), BC.parse(s.right))
    except EncloseError as exc:
        raise ConfigError(exc.message, field="sl.left/right") from exc
    return SLProblem(lo, hi, parse_coefficient(s.a, lo, hi, field="sl.a"),
                     parse_coefficient(s.V, lo, hi, field="sl.V"), bc, unit, cfg.run.name)


def build_graph(section) -> Graph:
    if section.builder == "grid":
        return grid_graph(section.k)
    if section.builder == "staircase":
        return staircase_graph([int(v) for v in section.profile.split(",")])
    return parse_edge_list(section.edges, section.edges_line)


# handlers


def _run_sl(cfg: RunConfig) -> Outcome:
    problem = build_problem(cfg)
    config = DriverConfig(
        E_prime=cfg.sl.E_prime,
        strategy=cfg.sl.strategy,
        max_level=cfg.run.max_level if cfg.run.max_level is not None else DEFAULT_MAX_LEVEL,
        basis_degrees=_degrees(cfg.run.basis_degree),
        tol=cfg.tol_or(SL_TOL),
    )
    halted = None
    try:
        run = run_hierarchical(problem, cfg.run.E, config)
    except Halted as exc:
        run, halted = exc.partial, HaltInfo.from_error(exc)
    if run is None:
        return Outcome([], halted=halted)

    stages = []
    for depth in sorted(run.nodes, reverse=True):
        for node in run.level(depth):
            label = "H" if depth == 0 else f"L{depth} {problem.restrict(node.cell.lo, node.cell.hi).describe()}"
            stages.append(StageRecord.of(label, node.enclosures, node.enclosures.ceiling))
    notes = {"partition_level": run.partition.level, "ceilings": list(run.schedule.levels)}
    return Outcome(stages, effort_report(run), notes, halted)


def _run_graph_chain(cfg: RunConfig) -> Outcome:
    gs = cfg.graph
    g = build_graph(gs)
    edges = parse_edge_pairs(gs.remove, field="graph.remove")
    if gs.order == "congestion":
        edges = congestion_order(g, edges)
    scale = Interval.exact(_fraction(gs.scale, "graph.scale"))
    halted = None
    try:
        lists = edge_chain_enclose(g, edges, gs.count, cfg.tol_or(GRAPH_TOL))
    except Halted as exc:
        lists, halted = exc.partial or [], HaltInfo.from_error(exc)

    stages = []
    for i, lst in enumerate(lists):
        shown = lst.truncated(min(gs.count, len(lst)))
        stages.append(StageRecord.of("A" if i == 0 else f"A_{i}", _scaled(shown, scale),
                                     _scaled_ceiling(lst.ceiling, scale)))
    return Outcome(stages, notes={"removed": [str(e) for e in edges], "scale": gs.scale}, halted=halted)


def _run_graph_homotopy(cfg: RunConfig) -> Outcome:
    hs = cfg.homotopy
    gY, gZ, bridges = triangle_graphs(hs.h)
    schedule = HomotopySchedule.of(_fractions(hs.schedule, "homotopy.schedule"))
    wanted = _fractions(hs.report, "homotopy.report") or list(schedule.s_values)
    scale = Interval.exact(_fraction(hs.scale, "homotopy.scale"))
    tol = cfg.tol_or(GRAPH_TOL)
    halted = None
    try:
        run = run_homotopy(gY, gZ, bridges, schedule, hs.count, tol)
    except Halted as exc:
        run, halted = exc.partial, HaltInfo.from_error(exc)

    stages = []
    reached = {stage.s for stage in run.stages} if run is not None else set()
    for s in wanted:
        if s in reached:
            lst = run.at(s)
            shown = lst.truncated(min(hs.count, len(lst)))
            stages.append(StageRecord.of(f"A_{_s_label(s)}", _scaled(shown, scale),
                                         _scaled_ceiling(lst.ceiling, scale)))
    notes: Dict[str, Any] = {"bisections": run.bisections if run is not None else 0}
    if run is not None:
        notes["schedule"] = [str(s) for s in run.schedule.s_values]

    if hs.sweep and halted is None:
        try:
            sweep = homotopy_sweep(gY, gZ, bridges, _range(hs.sweep, "homotopy.sweep"), hs.sweep_index, tol)
        except Halted as exc:
            halted = HaltInfo.from_error(exc)
        else:
            for s, value in sweep:
                stages.append(StageRecord.of(f"sweep s={_s_label(s)}", [value * scale], start=hs.sweep_index))
    return Outcome(stages, notes=notes, halted=halted)


def _below_label(ceiling: float) -> str:
    """Stage label naming the certified ceiling, rounded down to six digits"""
    if math.isinf(ceiling):
        return "below inf"
    with localcontext() as ctx:
        ctx.prec = 6
        ctx.rounding = ROUND_FLOOR
        return f"below {+Decimal(ceiling)}"


def _run_graph_partition(cfg: RunConfig) -> Outcome:
    ps = cfg.partition
    g = build_graph(ps.graph)
    leaves = parse_vertex_groups(ps.parts, field="partition.parts")
    tol = cfg.tol_or(GRAPH_TOL)
    if len(leaves) == 1:
        result = partition_enclose(g, leaves[0], ps.a, ps.b, tol)
        notes = {"E": ceiling_for(g, ps.a, ps.b), "ceiling": result.ceiling}
        return Outcome([StageRecord.of(_below_label(result.ceiling), result, result.ceiling)], notes=notes)

    encloser = PartitionEncloser(g, balanced_tree(leaves), ps.a, ps.b, tol)
    notes: Dict[str, Any] = {"E": encloser.E}
    try:
        result = encloser.run()
    except Halted as exc:
        return Outcome([], notes=notes, halted=HaltInfo.from_error(exc))
    notes["ceiling"] = result.ceiling
    notes["parts"] = [{"size": len(c.vertices), "method": c.method, "mu1_lower": c.mu1_lower,
                       "required": c.required} for c in encloser.certificates]
    return Outcome([StageRecord.of(_below_label(result.ceiling), result, result.ceiling)], notes=notes)


def _run_poincare(cfg: RunConfig) -> Outcome:
    ps = cfg.poincare
    if ps.profile == "degenerate":
        profile = degenerate_profile(ps.n)
    else:
        profile = [int(v) for v in ps.profile.split(",")]
    n = len(profile)
    g = staircase_graph(profile)
    cert = poincare_certificate(g, staircase_paths(n, profile))
    stages = [StageRecord.of(f"poincare {name}", [value], start=1) for name, value in cert.variants.items()]
    notes: Dict[str, Any] = {"n": n, "profile": profile, "best": cert.best_variant, "oracle_mu1": oracle_mu1(g)}
    if ps.samples:
        rows = staircase_experiment(ps.n_max, ps.samples, ps.seed)
        notes["experiment"] = {
            "samples": len(rows),
            "min_ratio": min(r.ratio for r in rows),
            "max_ratio": max(r.ratio for r in rows),
            "min_c": min(r.implied_c for r in rows),
            "violations": sum(1 for r in rows if r.ratio > 1.0),
        }
    return Outcome(stages, notes=notes)


def _run_system(cfg: RunConfig) -> Outcome:
    ss = cfg.system
    try:
        fx = SystemFixture.of(ss.alpha, ss.beta, ss.u, ss.v, cfg.run.E)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"bad fixture value: {exc}", field="system") from exc
    lists = system_fixture_lists(fx)
    stages = [StageRecord.of(name, lst, lst.ceiling) for name, lst in lists.as_dict().items()]
    if ss.galerkin_degree:
        levels = chain_eigen_lists(system_form_chain(fx, ss.galerkin_degree))
        for name, lst, shown in zip(("galerkin A1", "galerkin K", "galerkin H"), levels,
                                    (len(lists.A1), len(lists.K), len(lists.H))):
            stages.append(StageRecord.of(name, lst.truncated(shown)))
    return Outcome(stages)


def _matrix_rows(text: str, field: str) -> List[List[Interval]]:
    rows = [row for row in text.split(";") if row.strip()]
    return [[Interval.exact(_fraction(x, field)) for x in row.split(",")] for row in rows]


def _run_forms(cfg: RunConfig) -> Outcome:
    fs = cfg.forms
    ambient = IntervalMatrix.from_intervals(_matrix_rows(fs.matrix, "forms.matrix"))
    chain = FormChain.of(ambient, _matrix_rows(fs.constraints, "forms.constraints"))
    lists = chain_eigen_lists(chain)
    return Outcome([StageRecord.of(f"level {i}", lst) for i, lst in enumerate(lists)])


HANDLERS: Dict[str, Callable[[RunConfig], Outcome]] = {
    "sl": _run_sl,
    "graph-chain": _run_graph_chain,
    "graph-homotopy": _run_graph_homotopy,
    "graph-partition": _run_graph_partition,
    "poincare": _run_poincare,
    "system-fixture": _run_system,
    "forms-demo": _run_forms,
}


@trace_operation("run")
def run(config: RunConfig, store: Optional[ReportStore] = None, use_cache: bool = True) -> RunReport:
    """Dispatch one configuration; Halted becomes a report with `halted` set"""
    if store is not None and use_cache:
        cached = store.get(config)
        if cached is not None:
            return cached

    trace_id = uuid.uuid4().hex[:12]
    set_trace_id_for_all(trace_id)
    metrics = get_metrics()
    metrics.reset()
    logger.info("🚀 run started", kind=config.run.kind, name=config.run.name)

    start = time.perf_counter()
    outcome = HANDLERS[config.run.kind](config)
    report = RunReport(
        kind=config.run.kind,
        name=config.run.name,
        stages=outcome.stages,
        effort=outcome.effort,
        metrics=metrics.get_metrics(),
        notes={"trace_id": trace_id, **outcome.notes},
        wall_seconds=time.perf_counter() - start,
        halted=outcome.halted,
    )
    if report.halted is not None:
        logger.warning("run halted with partial results", reason=report.halted.message,
                       details=report.halted.details)
    else:
        logger.info("✅ run certified", stages=len(report.stages), seconds=report.wall_seconds)
    if store is not None:
        store.store(config, report)
    return report


def exit_code(report: RunReport) -> int:
    return EXIT_OK if report.certified else EXIT_HALTED


@dataclass
class RunOptions:
    config: Optional[str] = None
    preset: Optional[str] = None
    format: str = "table"
    out: Optional[str] = None
    max_level: Optional[int] = None
    basis_degree: Optional[int] = None
    effort: bool = False
    verbose: bool = False
    archive: Optional[str] = None
    no_cache: bool = False


def execute(options: RunOptions, console: Optional[Console] = None, errors: Optional[Console] = None) -> int:
    """Everything `main.py run` does; returns the exit status"""
    console = console or Console()
    errors = errors or Console(stderr=True)
    if options.verbose:
        set_level_for_all(logging.INFO)

    try:
        config = load_run_config(options.config, options.preset,
                                 overrides={"max_level": options.max_level, "basis_degree": options.basis_degree})
        archive = options.archive or get_settings().archive
        store = ReportStore(archive) if archive else None
        report = run(config, store, use_cache=not options.no_cache)
    except ConfigError as exc:
        where = ", ".join(f"{k} {v}" for k, v in (("line", exc.line), ("field", exc.field)) if v is not None)
        errors.print(f"[bold red]config error[/bold red]{f' ({where})' if where else ''}: {escape(exc.message)}")
        return EXIT_ERROR
    except EncloseError as exc:
        logger.error("❌ run failed", error=type(exc).__name__, reason=str(exc))
        errors.print(f"[bold red]{type(exc).__name__}[/bold red]: {escape(str(exc))}")
        return EXIT_ERROR

    text = emit_results(report, options.format)
    if options.out:
        Path(options.out).write_text(text)
        console.print(f"[green]wrote {options.out}[/green]")
    else:
        console.out(text, end="")
    if options.effort:
        console.print(effort_table(report))
    if report.halted is not None:
        halt = f"{report.halted.message} {report.halted.details}"
        errors.print(f"[bold yellow]halted[/bold yellow]: {escape(halt)}")
    return exit_code(report)
