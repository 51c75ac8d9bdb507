import os
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple
from enum import Enum

from dotenv import load_dotenv


class Verdict(str, Enum):
    """Outcome of a 1-planarity decision."""
    ONE_PLANAR = "one-planar"
    NOT_ONE_PLANAR = "not-one-planar"
    UNKNOWN = "unknown"


class Reason(str, Enum):
    """Why a NotOnePlanar verdict was reached."""
    EDGE_DENSITY = "edgeDensity"
    EXHAUSTED_SEARCH = "exhaustedSearch"
    BIPARTITE_TABLE = "bipartiteTable"
    KERNEL_REJECTION = "kernelRejection"


def kernel_rejection(rule: str) -> str:
    return f"{Reason.KERNEL_REJECTION.value}({rule})"


class Strategy(str, Enum):
    AUTO = "auto"
    EXACT = "exact"
    VC = "vc"
    TREEDEPTH = "treedepth"
    CYCLOMATIC = "cyclomatic"
    COGRAPH = "cograph"


class OutputFormat(str, Enum):
    TEXT = "text"
    RECORD = "record"


class GraphFormatError(ValueError):
    """Malformed graph, constraints or witness text."""

    def __init__(self, message: str, line_number: Optional[int] = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class InvalidWitnessError(ValueError):
    """A crossing witness is not a valid matching for its host graph."""


class NotACographError(ValueError):
    pass


class NotSplitGraphError(ValueError):
    pass


@dataclass
class SearchStats:
    """Counters collected by the matching search."""
    nodes: int = 0
    prunes: int = 0
    planarity_checks: int = 0

    def absorb(self, other: "SearchStats") -> None:
        self.nodes += other.nodes
        self.prunes += other.prunes
        self.planarity_checks += other.planarity_checks

    def to_dict(self) -> Dict[str, Any]:
        return {
            "nodes": self.nodes,
            "prunes": self.prunes,
            "planarity_checks": self.planarity_checks,
        }


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"{name} must be an integer, got {raw!r}")


@dataclass
class RunConfig:
    """Settings for one `decide` run."""
    strategy: Strategy = Strategy.AUTO
    budget: int = 1_000_000           # search nodes, never wall time
    c1: int = 20                      # tree-depth |S| >= 3 rejection constant
    paranoid: bool = False            # replace td rejection by direct solving
    seed: int = 0
    workers: int = 1
    output: OutputFormat = OutputFormat.TEXT
    emit_witness: bool = False
    report_timing: bool = False
    max_vc: int = 10
    max_td: int = 6
    max_cyclo: int = 6

    def __post_init__(self):
        self.strategy = Strategy(self.strategy)
        self.output = OutputFormat(self.output)
        if self.budget <= 0:
            raise ValueError(f"budget must be positive, got {self.budget}")
        if self.c1 < 1:
            raise ValueError(f"c1 must be at least 1, got {self.c1}")
        if self.workers < 1:
            raise ValueError(f"workers must be at least 1, got {self.workers}")

    @classmethod
    def from_env(cls, **overrides: Any) -> "RunConfig":
        """Build a config from the environment (and a .env file), then apply overrides."""
        load_dotenv()
        values: Dict[str, Any] = {
            "strategy": os.getenv("ONEPLANAR_STRATEGY", Strategy.AUTO.value),
            "budget": _env_int("ONEPLANAR_BUDGET", 1_000_000),
            "c1": _env_int("ONEPLANAR_C1", 20),
            "seed": _env_int("ONEPLANAR_SEED", 0),
            "workers": _env_int("ONEPLANAR_WORKERS", 1),
            "output": os.getenv("ONEPLANAR_OUTPUT", OutputFormat.TEXT.value),
            "max_vc": _env_int("ONEPLANAR_MAX_VC", 10),
            "max_td": _env_int("ONEPLANAR_MAX_TD", 6),
            "max_cyclo": _env_int("ONEPLANAR_MAX_CYCLO", 6),
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


Quadruple = Tuple[int, int, int, int]


@dataclass
class Report:
    """Machine-readable result of a run."""
    verdict: Verdict = Verdict.UNKNOWN
    strategy: str = Strategy.EXACT.value
    reason: Optional[str] = None
    parameters: Dict[str, Any] = field(default_factory=dict)
    kernel: Dict[str, Any] = field(default_factory=dict)
    search: SearchStats = field(default_factory=SearchStats)
    witness: Optional[List[Quadruple]] = None
    millis: Optional[int] = None
    crossings: Optional[int] = None   # witness size, known even when the witness is not emitted

    def __post_init__(self):
        if self.witness is not None and self.verdict != Verdict.ONE_PLANAR:
            raise ValueError("a witness can only accompany a one-planar verdict")

    @property
    def exit_code(self) -> int:
        return 2 if self.verdict == Verdict.UNKNOWN else 0

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for JSON serialization."""
        return {
            "verdict": self.verdict.value,
            "strategy": self.strategy,
            "parameters": self.parameters,
            "kernel": self.kernel,
            "search": {**self.search.to_dict(), "reason": self.reason, "crossings": self.crossings},
            "witness": [list(q) for q in self.witness] if self.witness is not None else None,
            "millis": self.millis,
        }
