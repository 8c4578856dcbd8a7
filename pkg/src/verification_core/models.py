from dataclasses import dataclass, field
from typing import Any

from cube_core.cube_config import DEFAULT_TOLERANCE

JSON = "json"
CSV = "csv"
OUTPUT_FORMATS = (JSON, CSV)

Params = dict[str, Any]


@dataclass(frozen=True)
class RunConfig:
    """
    One CLI invocation after flags, .env and defaults are merged.

    Exactly one function source is named; ``zoo`` is the only command that takes none.
    """

    command: str
    theorem: str | None = None
    source_kind: str | None = None  # "generator" | "truth_table" | "product" | "poly"
    source: str | None = None  # generator spec or file path
    params: Params = field(default_factory=dict)  # checker parameters from the command line
    sweep: dict[str, list[Any]] = field(default_factory=dict)
    output_format: str = JSON
    output: str | None = None  # None writes to stdout
    seed: int = 0
    n_cap: int | None = None
    tolerance: float = DEFAULT_TOLERANCE
    timings: bool = False

    def __post_init__(self):
        if self.output_format not in OUTPUT_FORMATS:
            raise ValueError(f"Unknown output format {self.output_format!r}; use one of {OUTPUT_FORMATS}.")
        if (self.source_kind is None) != (self.source is None):
            raise ValueError("A function source needs both a kind and a spec or path.")
        if not self.tolerance > 0:
            raise ValueError(f"The tolerance must be positive, got {self.tolerance}.")
        if self.n_cap is not None and self.n_cap < 1:
            raise ValueError(f"The dimension cap must be at least 1, got {self.n_cap}.")
        if self.seed < 0:
            raise ValueError(f"The seed must be non-negative, got {self.seed}.")
        for key, values in self.sweep.items():
            if not values:
                raise ValueError(f"The sweep over {key!r} has no values.")


@dataclass
class Instance:
    """A loaded function together with how it was obtained."""

    id: str  # e.g. "antitribes:s=2,w=3" or a file name
    function: Any  # CubeFunction, ProductFunction or MultilinearPoly
    meta: Params = field(default_factory=dict)  # generator kind and parameters, when generated


@dataclass(frozen=True)
class CheckResult:
    """One inequality as a checker reports it, before it is tied to an instance."""

    theorem: str
    lhs: float
    rhs: float
    passed: bool
    asserted: bool = True  # False when a hypothesis fails or the form is only reported

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs


@dataclass
class CheckOutcome:
    rows: list[dict] = field(default_factory=list)  # table data, when the command produces one
    results: list[CheckResult] = field(default_factory=list)


@dataclass
class VerdictRow:
    instance: str
    theorem: str
    params: Params
    lhs: float
    rhs: float
    margin: float
    passed: bool
    asserted: bool = True
    runtime_ms: float | None = None  # only with --timings

    def to_dict(self) -> dict:
        out = {
            "instance": self.instance,
            "theorem": self.theorem,
            "params": self.params,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "pass": self.passed,
            "asserted": self.asserted,
        }
        if self.runtime_ms is not None:
            out["runtime_ms"] = self.runtime_ms
        return out


@dataclass
class Report:
    command: str
    rows: list[dict] = field(default_factory=list)
    verdicts: list[VerdictRow] = field(default_factory=list)

    @property
    def failures(self) -> list[VerdictRow]:
        """Asserted verdicts that did not pass."""
        return [v for v in self.verdicts if v.asserted and not v.passed]

    @property
    def exit_status(self) -> int:
        return 1 if self.failures else 0
