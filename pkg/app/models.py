import os
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import yaml

from app.rauzy import RauzyTrajectory
from app.scalar import Scalar

Interval = Tuple[Scalar, Scalar]

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


def intervals_to_json(intervals: Sequence[Interval]) -> list:
    return [[left.to_json(), right.to_json()] for left, right in intervals]


# ---------------------------------------------------------------------------
# Classification results
# ---------------------------------------------------------------------------


@dataclass
class Component:
    """One invariant component of an IET."""

    kind: str  # "periodic" or "minimal"
    support: List[Interval]
    witness: Scalar

    # Periodic components only
    period: Optional[int] = None
    cycle_length: Optional[int] = None
    flipped: Optional[bool] = None

    @property
    def is_periodic(self) -> bool:
        return self.kind == "periodic"

    def to_dict(self) -> dict:
        data = {
            "kind": self.kind,
            "support": intervals_to_json(self.support),
            "witness": self.witness.to_json(),
        }
        if self.is_periodic:
            data.update(
                period=self.period,
                cycle_length=self.cycle_length,
                flipped=self.flipped,
            )
        return data


@dataclass
class ComponentReport:
    """Periodic and minimal components of an n-IET, ordered by support."""

    n: int
    components: List[Component] = field(default_factory=list)
    provenance: Tuple[RauzyTrajectory, ...] = ()

    @property
    def n_per(self) -> int:
        return sum(1 for c in self.components if c.is_periodic)

    @property
    def n_min(self) -> int:
        return sum(1 for c in self.components if not c.is_periodic)

    @property
    def periodic(self) -> List[Component]:
        return [c for c in self.components if c.is_periodic]

    @property
    def periods(self) -> List[int]:
        return sorted(c.period for c in self.periodic)

    @property
    def summary(self) -> str:
        return f"n_per={self.n_per} n_min={self.n_min} bound={self.n}"

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "n_per": self.n_per,
            "n_min": self.n_min,
            "summary": self.summary,
            "components": [c.to_dict() for c in self.components],
            "provenance": [t.to_dict() for t in self.provenance],
        }


# ---------------------------------------------------------------------------
# Harness results
# ---------------------------------------------------------------------------


@dataclass
class TrialResult:
    """Outcome of classifying one sampled IET."""

    index: int
    perm: List[int]
    success: bool = True
    n_per: int = 0
    n_min: int = 0
    flipped_periodic: int = 0
    error: Optional[str] = None
    error_message: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "perm": self.perm,
            "success": self.success,
            "n_per": self.n_per,
            "n_min": self.n_min,
            "flipped_periodic": self.flipped_periodic,
            "error": self.error,
            "error_message": self.error_message,
        }


def _error_counts(trials: Sequence[TrialResult]) -> Counter:
    return Counter(t.error for t in trials if not t.success)


@dataclass
class HarnessReport:
    """Aggregate of a bound-checking sweep over random flipped IETs."""

    n: int
    trials: List[TrialResult] = field(default_factory=list)

    @property
    def samples(self) -> int:
        return len(self.trials)

    @property
    def terminated(self) -> List[TrialResult]:
        return [t for t in self.trials if t.success]

    @property
    def bound_violations(self) -> int:
        return sum(1 for t in self.terminated if t.n_per + 2 * t.n_min > self.n)

    @property
    def nper_zero_with_flips(self) -> int:
        return sum(1 for t in self.terminated if t.n_per == 0 or t.flipped_periodic == 0)

    @property
    def full_periodic_violations(self) -> int:
        return sum(1 for t in self.terminated if t.n_min == 0 and t.n_per != self.n)

    @property
    def tie_count(self) -> int:
        return _error_counts(self.trials)["TieEncountered"]

    @property
    def cap_count(self) -> int:
        return _error_counts(self.trials)["CapExceeded"]

    @property
    def degenerate_count(self) -> int:
        return _error_counts(self.trials)["DegenerateBlock"]

    @property
    def violations(self) -> int:
        return self.bound_violations + self.nper_zero_with_flips + self.full_periodic_violations

    def profiles(self) -> Dict[str, int]:
        counts = Counter(f"{t.n_per},{t.n_min}" for t in self.terminated)
        return dict(sorted(counts.items()))

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "samples": self.samples,
            "terminated": len(self.terminated),
            "bound_violations": self.bound_violations,
            "nper_zero_with_flips": self.nper_zero_with_flips,
            "full_periodic_violations": self.full_periodic_violations,
            "tie_count": self.tie_count,
            "cap_count": self.cap_count,
            "degenerate_count": self.degenerate_count,
            "profiles": self.profiles(),
        }


@dataclass
class PerturbationReport:
    """Component profiles of randomly perturbed copies of one IET."""

    base_n_per: int
    base_n_min: int
    magnitude: Fraction
    total: Scalar
    trials: List[TrialResult] = field(default_factory=list)
    max_rho: Optional[Scalar] = None

    @property
    def preserved(self) -> int:
        return sum(
            1
            for t in self.trials
            if t.success and (t.n_per, t.n_min) == (self.base_n_per, self.base_n_min)
        )

    @property
    def tie_count(self) -> int:
        return _error_counts(self.trials)["TieEncountered"]

    @property
    def cap_count(self) -> int:
        return _error_counts(self.trials)["CapExceeded"]

    @property
    def max_rho_ratio(self) -> Optional[float]:
        if self.max_rho is None:
            return None
        return float(self.max_rho) / float(self.total)

    def to_dict(self) -> dict:
        return {
            "base": {"n_per": self.base_n_per, "n_min": self.base_n_min},
            "magnitude": str(self.magnitude),
            "trials": len(self.trials),
            "preserved": self.preserved,
            "tie_count": self.tie_count,
            "cap_count": self.cap_count,
            "max_rho": self.max_rho.to_json() if self.max_rho is not None else None,
            "max_rho_ratio": self.max_rho_ratio,
            "profiles": dict(
                sorted(Counter(f"{t.n_per},{t.n_min}" for t in self.trials if t.success).items())
            ),
        }


# ---------------------------------------------------------------------------
# Configuration dataclasses
# ---------------------------------------------------------------------------


@dataclass
class CapsConfig:
    rauzy_cap: int = 1000
    recursion_cap: int = 32
    orbit_cap: int = 5000
    keane_depth: int = 100
    partition_depth: int = 8


@dataclass
class HarnessConfig:
    n: int = 4
    sample_count: int = 100
    seed: int = 0
    rauzy_cap: int = 1000
    orbit_cap: int = 5000
    perturbation_magnitude: Fraction = Fraction(1, 1000)
    trials: int = 50
    exhaustive: bool = False
    workers: int = 1

    def __post_init__(self) -> None:
        self.perturbation_magnitude = Fraction(str(self.perturbation_magnitude))


@dataclass
class LoggingConfig:
    level: str = "INFO"


@dataclass
class Config:
    """Main configuration model."""

    caps: CapsConfig = field(default_factory=CapsConfig)
    harness: HarnessConfig = field(default_factory=HarnessConfig)
    logging: LoggingConfig = field(default_factory=LoggingConfig)

    @classmethod
    def default(cls) -> "Config":
        return cls()

    @classmethod
    def from_env(cls) -> "Config":
        """Load configuration from environment variables."""

        def _bool(val: str) -> bool:
            return val.strip().lower() in ("1", "true", "yes")

        rauzy_cap = int(os.environ.get("IET_RAUZY_CAP", "1000"))
        orbit_cap = int(os.environ.get("IET_ORBIT_CAP", "5000"))
        return cls(
            caps=CapsConfig(
                rauzy_cap=rauzy_cap,
                recursion_cap=int(os.environ.get("IET_RECURSION_CAP", "32")),
                orbit_cap=orbit_cap,
                keane_depth=int(os.environ.get("IET_KEANE_DEPTH", "100")),
                partition_depth=int(os.environ.get("IET_PARTITION_DEPTH", "8")),
            ),
            harness=HarnessConfig(
                n=int(os.environ.get("IET_HARNESS_N", "4")),
                sample_count=int(os.environ.get("IET_SAMPLE_COUNT", "100")),
                seed=int(os.environ.get("IET_SEED", "0")),
                rauzy_cap=rauzy_cap,
                orbit_cap=orbit_cap,
                perturbation_magnitude=Fraction(os.environ.get("IET_PERTURBATION_MAGNITUDE", "1/1000")),
                trials=int(os.environ.get("IET_TRIALS", "50")),
                exhaustive=_bool(os.environ.get("IET_EXHAUSTIVE", "false")),
                workers=int(os.environ.get("IET_WORKERS", "1")),
            ),
            logging=LoggingConfig(
                level=os.environ.get("LOG_LEVEL", "INFO"),
            ),
        )

    @classmethod
    def load(cls, path: str) -> "Config":
        """Load configuration from YAML file, applying defaults for missing fields."""
        with open(path, "r") as f:
            data = yaml.safe_load(f) or {}

        caps_data = data.get("caps", {}) or {}
        harness_data = data.get("harness", {}) or {}
        logging_data = data.get("logging", {}) or {}

        return cls(
            caps=CapsConfig(**{k: v for k, v in caps_data.items() if k in CapsConfig.__dataclass_fields__}),
            harness=HarnessConfig(**{k: v for k, v in harness_data.items() if k in HarnessConfig.__dataclass_fields__}),
            logging=LoggingConfig(**{k: v for k, v in logging_data.items() if k in LoggingConfig.__dataclass_fields__}),
        )

    def validate(self) -> List[str]:
        """Validate configuration, returning a list of error messages."""
        errors: List[str] = []

        for name in ("rauzy_cap", "recursion_cap", "orbit_cap", "keane_depth"):
            if getattr(self.caps, name) < 1:
                errors.append(f"{name} must be at least 1")
        if self.caps.partition_depth < 0:
            errors.append("partition_depth must be non-negative")

        h = self.harness
        if h.n < 1:
            errors.append(f"Invalid harness size n: {h.n}")
        if h.sample_count < 0:
            errors.append("sample_count must be non-negative")
        if h.rauzy_cap < 1 or h.orbit_cap < 1:
            errors.append("harness caps must be at least 1")
        if not (0 <= h.perturbation_magnitude < 1):
            errors.append(f"perturbation_magnitude must lie in [0, 1): {h.perturbation_magnitude}")
        if h.trials < 0:
            errors.append("trials must be non-negative")
        if h.workers < 1:
            errors.append(f"Invalid worker count: {h.workers}")

        if self.logging.level.upper() not in LOG_LEVELS:
            errors.append(f"Invalid log level: {self.logging.level}")

        return errors

    def to_dict(self) -> dict:
        """Serialise to a plain dict (YAML-compatible)."""
        return {
            "caps": {
                "rauzy_cap": self.caps.rauzy_cap,
                "recursion_cap": self.caps.recursion_cap,
                "orbit_cap": self.caps.orbit_cap,
                "keane_depth": self.caps.keane_depth,
                "partition_depth": self.caps.partition_depth,
            },
            "harness": {
                "n": self.harness.n,
                "sample_count": self.harness.sample_count,
                "seed": self.harness.seed,
                "rauzy_cap": self.harness.rauzy_cap,
                "orbit_cap": self.harness.orbit_cap,
                "perturbation_magnitude": str(self.harness.perturbation_magnitude),
                "trials": self.harness.trials,
                "exhaustive": self.harness.exhaustive,
                "workers": self.harness.workers,
            },
            "logging": {"level": self.logging.level},
        }
