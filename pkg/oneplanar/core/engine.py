import json
import math
import time
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from oneplanar.core.cotree import pipeline_cograph
from oneplanar.core.embedding import verify_witness
from oneplanar.core.graph import Graph, blocks, cyclomatic_number
from oneplanar.core.kernel_cyclomatic import cyclo_kernelize, pipeline_cyclo
from oneplanar.core.kernel_treedepth import normalize_forest, pipeline_td, td_kernelize, tree_depth
from oneplanar.core.kernel_vc import pipeline_vc, vc_kernelize, vertex_cover
from oneplanar.core.solver import ConstraintSet, SolveOutcome, decide
from oneplanar.utils import logger
from oneplanar.utils.types import OutputFormat, Report, RunConfig, Strategy, Verdict

# ties go to the earlier entry
_PREFERENCE = (Strategy.VC, Strategy.CYCLOMATIC, Strategy.TREEDEPTH)


def vc_size_prediction(k: int) -> int:
    return k + 6 * k * math.comb(k, 3) + 5 * k * max(1, 2 * k - 3)


def cyclo_size_prediction(k: int) -> int:
    paths = max(0, 3 * k - 3)
    return paths * (2 * math.factorial(paths) + 1)


@dataclass
class EngineStatus:
    """Tracks what the engine did on its last run."""
    runs: int = 0
    last_strategy: Optional[str] = None
    last_error: Optional[str] = None
    predictions: Dict[str, Optional[int]] = field(default_factory=dict)
    # strategies whose prediction is only a lower bound
    lower_bounds: List[str] = field(default_factory=list)
    # per-block k_vc, d and k_cyclo behind the predictions; None past a cap
    block_parameters: Dict[str, List[Optional[int]]] = field(default_factory=dict)


@dataclass
class KernelView:
    """Kernel pieces and reduction records, for inspection."""
    strategy: Strategy
    pieces: List[Graph]
    records: List[str]
    early_verdict: Optional[str] = None


class OnePlanarEngine:
    """Picks a strategy, runs its pipeline and turns the outcome into a Report."""

    def __init__(self, config: Optional[RunConfig] = None):
        self.config = config or RunConfig()
        self.status = EngineStatus()
        logger.debug("engine_initialized", strategy=self.config.strategy.value, budget=self.config.budget)

    def _td_size_lower_bound(self, bg: Graph, d: int) -> int:
        """Smallest tree-depth kernel size the block bg of tree-depth d can produce.

        Splitting drops no vertex, so a kernel that is not rejected keeps all of
        bg. A rejection needs more than c1 * 2^depth child subtrees under a node
        with three attachments, hence depth at least 4 and more than 16 * c1
        vertices besides the three.
        """
        if not self.config.paranoid and d >= 4 and bg.n > 16 * self.config.c1 + 3:
            return 0
        return bg.n

    def predict(self, g: Graph) -> Dict[str, Optional[int]]:
        """Predicted kernel size per kernel strategy; None when a parameter exceeds its cap.

        The tree-depth kernel is only built when its lower bound leaves it a
        chance against the vc and cyclomatic formulas. Otherwise the bound stands
        in and the strategy is listed in `status.lower_bounds`.
        """
        cfg = self.config
        parts = [block.graph for block in blocks(g)]
        covers = [vertex_cover(bg, cfg.max_vc) for bg in parts]
        cyclos = [cyclomatic_number(bg) for bg in parts]
        depths = [tree_depth(bg, cfg.max_td) for bg in parts]
        self.status.block_parameters = {
            "k_vc": [None if cover is None else len(cover) for cover in covers],
            "d": [None if found is None else found[0] for found in depths],
            "k_cyclo": [k if k <= cfg.max_cyclo else None for k in cyclos],
        }
        self.status.lower_bounds = []

        vc = None
        if all(cover is not None for cover in covers):
            vc = sum(vc_size_prediction(len(cover)) for cover in covers)
        cyclo = None
        if all(k <= cfg.max_cyclo for k in cyclos):
            cyclo = sum(cyclo_size_prediction(k) for k in cyclos)
        td = None
        if all(found is not None for found in depths):
            rivals = [size for size in (vc, cyclo) if size is not None]
            bound = sum(self._td_size_lower_bound(bg, found[0]) for bg, found in zip(parts, depths))
            if rivals and bound >= min(rivals):
                td = bound
                self.status.lower_bounds.append(Strategy.TREEDEPTH.value)
            else:
                td = 0
                for bg, found in zip(parts, depths):
                    ko = td_kernelize(bg, normalize_forest(bg, found[1]), cfg.c1, not cfg.paranoid)
                    td += 0 if ko.rejected else ko.kernel_size
        return {Strategy.VC.value: vc, Strategy.CYCLOMATIC.value: cyclo, Strategy.TREEDEPTH.value: td}

    def choose_strategy(self, g: Graph, constraints: Optional[ConstraintSet]) -> Strategy:
        requested = self.config.strategy
        if requested != Strategy.AUTO:
            return requested
        if constraints is not None and not constraints.is_empty:
            return Strategy.EXACT
        predictions = self.predict(g)
        self.status.predictions = predictions
        eligible = [s for s in _PREFERENCE if predictions[s.value] is not None]
        if not eligible:
            logger.info("strategy_fallback", reason="parameter caps exceeded")
            return Strategy.EXACT
        return min(eligible, key=lambda s: (predictions[s.value], _PREFERENCE.index(s)))

    def _solve(self, strategy: Strategy, g: Graph, constraints: Optional[ConstraintSet]) -> SolveOutcome:
        cfg = self.config
        if strategy != Strategy.EXACT and constraints is not None and not constraints.is_empty:
            raise ValueError("constraints are only supported by the exact strategy")
        if strategy == Strategy.EXACT:
            return decide(g, constraints, budget=cfg.budget, workers=cfg.workers, seed=cfg.seed)
        if strategy == Strategy.VC:
            return pipeline_vc(g, cfg.budget, max_k=cfg.max_vc, workers=cfg.workers, seed=cfg.seed)
        if strategy == Strategy.TREEDEPTH:
            return pipeline_td(g, cfg.budget, c1=cfg.c1, reject=not cfg.paranoid, max_d=cfg.max_td,
                               workers=cfg.workers, seed=cfg.seed)
        if strategy == Strategy.CYCLOMATIC:
            return pipeline_cyclo(g, cfg.budget, workers=cfg.workers, seed=cfg.seed)
        return pipeline_cograph(g, cfg.budget, c1=cfg.c1, reject=not cfg.paranoid, workers=cfg.workers, seed=cfg.seed)

    def run(self, g: Graph, constraints: Optional[ConstraintSet] = None) -> Report:
        """Decide 1-planarity of g under the configured strategy."""
        started = time.perf_counter()
        self.status.runs += 1
        try:
            strategy = self.choose_strategy(g, constraints)
            self.status.last_strategy = strategy.value
            outcome = self._solve(strategy, g, constraints)
        except Exception as e:
            self.status.last_error = str(e)
            logger.error("run_failed", strategy=self.config.strategy.value, error=str(e))
            raise

        parameters = dict(outcome.parameters)
        if self.config.strategy == Strategy.AUTO and self.status.predictions:
            parameters["predicted_kernel"] = dict(self.status.predictions)
            parameters["block_parameters"] = dict(self.status.block_parameters)
            if self.status.lower_bounds:
                parameters["prediction_lower_bounds"] = list(self.status.lower_bounds)
        crossings = None
        witness = None
        if outcome.is_one_planar:
            if not verify_witness(g, outcome.witness, constraints):
                raise RuntimeError("final witness does not verify")
            crossings = len(outcome.witness)
            if self.config.emit_witness:
                witness = outcome.witness.quadruples()

        report = Report(
            verdict=outcome.verdict,
            strategy=strategy.value,
            reason=outcome.reason,
            parameters=parameters,
            kernel=dict(outcome.kernel),
            search=outcome.stats,
            witness=witness,
            millis=int((time.perf_counter() - started) * 1000) if self.config.report_timing else None,
            crossings=crossings,
        )
        logger.info("run_complete", strategy=strategy.value, verdict=report.verdict.value,
                    reason=report.reason, nodes=report.search.nodes)
        return report

    def kernelize(self, g: Graph, strategy: Optional[Strategy] = None) -> KernelView:
        """Kernel of g under one kernel strategy, without solving it."""
        strategy = Strategy(strategy or self.config.strategy)
        if strategy == Strategy.AUTO:
            strategy = self.choose_strategy(g, None)
        cfg = self.config
        pieces: List[Graph] = []
        records: List[str] = []
        if strategy == Strategy.VC:
            for block in blocks(g):
                cover = vertex_cover(block.graph, cfg.max_vc)
                if cover is None:
                    raise ValueError(f"a block has no vertex cover of size <= {cfg.max_vc}")
                ck = vc_kernelize(block.graph, cover)
                if ck.early_verdict is not None:
                    return KernelView(strategy, [], [], ck.early_verdict)
                pieces.append(ck.kernel)
                records.extend(repr(r) for r in ck.plan.records)
        elif strategy == Strategy.CYCLOMATIC:
            ko = cyclo_kernelize(g)
            pieces = [p.graph for p in ko.pieces]
            records = [repr(r) for r in ko.plan.records] + [repr(r) for p in ko.pieces for r in p.plan.records]
        elif strategy == Strategy.TREEDEPTH:
            for block in blocks(g):
                found = tree_depth(block.graph, cfg.max_td)
                if found is None:
                    raise ValueError(f"a block has tree-depth above {cfg.max_td}")
                ko = td_kernelize(block.graph, normalize_forest(block.graph, found[1]), cfg.c1, not cfg.paranoid)
                if ko.rejected:
                    return KernelView(strategy, [], [], ko.early_verdict)
                pieces.extend(p.graph for p in ko.pieces)
                records.extend(repr(r) for r in ko.plan.records)
        else:
            pieces = [g]
        return KernelView(strategy, pieces, records)


def run(config: RunConfig, graph: Graph, constraints: Optional[ConstraintSet] = None) -> Report:
    return OnePlanarEngine(config).run(graph, constraints)


def _format_value(value: Any) -> str:
    return json.dumps(value, sort_keys=True) if isinstance(value, (dict, list)) else str(value)


def emit_report(report: Report, fmt: OutputFormat = OutputFormat.TEXT) -> str:
    """Render a report as `key: value` lines or as one JSON record."""
    fmt = OutputFormat(fmt)
    if fmt == OutputFormat.RECORD:
        return json.dumps(report.to_dict(), sort_keys=True)

    lines: List[Tuple[str, Any]] = [("verdict", report.verdict.value), ("strategy", report.strategy)]
    if report.reason is not None:
        lines.append(("reason", report.reason))
    if report.verdict == Verdict.ONE_PLANAR and report.crossings is not None:
        lines.append(("crossings", report.crossings))
    lines.extend(sorted(report.parameters.items()))
    lines.extend((f"kernel_{k}", v) for k, v in sorted(report.kernel.items()))
    lines.extend(sorted(report.search.to_dict().items()))
    if report.millis is not None:
        lines.append(("millis", report.millis))
    text = [f"{key}: {_format_value(value)}" for key, value in lines]
    for q in report.witness or []:
        text.append("cross " + " ".join(map(str, q)))
    return "\n".join(text)
