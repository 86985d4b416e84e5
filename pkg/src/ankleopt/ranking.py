"""Cross-population ranking by weighted normalized metrics.

Every candidate (any architecture, any actuator, plus injected baselines)
is normalized per metric over the whole pool with min-max scaling, oriented
so that 0 is always the preferred end:

  higher-better:  m~ = (max - m) / (max - m_min)
  lower-better:   m~ = (m - min) / (max - m_min)

and scored by the scalar cost xi = sum_j eta_j m~_j with the weights summing
to one. Lowest xi wins. Because normalization is a pure function of the
stored raw metrics, pools can be re-ranked under new weights without
re-running any optimization.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import BadWeights
from .metrics import METRIC_NAMES

WEIGHT_SUM_TOL = 1e-9

# preferred direction per metric: fast and strong ankles score well, as do
# easily backdrivable, isotropic, compact, light, high-CoM ones
DEFAULT_HIGHER_BETTER: Mapping[str, bool] = {
    "speed": True,
    "torque": True,
    "backdriving_torque": False,
    "manipulability": False,
    "compactness": False,
    "actuation_mass": False,
    "com_height": True,
}


@dataclass(frozen=True)
class MetricDirections:
    higher_better: tuple[bool, ...]

    def __post_init__(self):
        if len(self.higher_better) != len(METRIC_NAMES):
            raise ValueError(f"need one direction per metric "
                             f"({len(METRIC_NAMES)} expected)")

    @classmethod
    def default(cls) -> "MetricDirections":
        return cls(tuple(DEFAULT_HIGHER_BETTER[m] for m in METRIC_NAMES))

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, bool]) -> "MetricDirections":
        merged = dict(DEFAULT_HIGHER_BETTER)
        for key, val in mapping.items():
            if key not in merged:
                raise ValueError(f"unknown metric {key!r}")
            merged[key] = bool(val)
        return cls(tuple(merged[m] for m in METRIC_NAMES))

    def to_mapping(self) -> dict[str, bool]:
        return dict(zip(METRIC_NAMES, self.higher_better))


@dataclass(frozen=True)
class CandidateMetrics:
    """Raw ranking inputs for one candidate."""

    candidate_id: str
    architecture: str
    actuator: str
    raw: np.ndarray  # (7,) metric values in METRIC_NAMES order
    is_baseline: bool = False

    def __post_init__(self):
        raw = np.asarray(self.raw, dtype=float).reshape(len(METRIC_NAMES))
        if not np.all(np.isfinite(raw)):
            raise ValueError(f"candidate {self.candidate_id!r}: metrics must be finite")
        object.__setattr__(self, "raw", raw)


@dataclass(frozen=True)
class RankedCandidate:
    candidate_id: str
    architecture: str
    actuator: str
    raw: np.ndarray
    normalized: np.ndarray
    xi: float
    is_baseline: bool = False


def uniform_weights() -> np.ndarray:
    return np.full(len(METRIC_NAMES), 1.0 / len(METRIC_NAMES))


def validate_weights(weights) -> np.ndarray:
    w = np.asarray(weights, dtype=float)
    if w.shape != (len(METRIC_NAMES),):
        raise BadWeights(f"expected {len(METRIC_NAMES)} weights, got shape {w.shape}")
    if not np.all(np.isfinite(w)) or np.any(w < 0.0):
        raise BadWeights("weights must be finite and non-negative")
    if abs(float(w.sum()) - 1.0) > WEIGHT_SUM_TOL:
        raise BadWeights(f"weights must sum to 1 (got {w.sum():.12f})")
    return w


def normalize(raw: np.ndarray, directions: MetricDirections) -> np.ndarray:
    """Min-max normalization over the population, 0 = best, per metric.

    Degenerate metrics (max equals min across the pool) map to 0 for every
    candidate, contributing nothing to any cost.
    """
    raw = np.asarray(raw, dtype=float)
    if raw.ndim != 2 or raw.shape[1] != len(METRIC_NAMES):
        raise ValueError(f"expected (n, {len(METRIC_NAMES)}) raw metrics")
    lo = raw.min(axis=0)
    hi = raw.max(axis=0)
    span = hi - lo
    out = np.zeros_like(raw)
    for j, higher in enumerate(directions.higher_better):
        if span[j] <= 0.0:
            continue
        if higher:
            out[:, j] = (hi[j] - raw[:, j]) / span[j]
        else:
            out[:, j] = (raw[:, j] - lo[j]) / span[j]
    return out


def cost(normalized, weights) -> float:
    w = validate_weights(weights)
    m = np.asarray(normalized, dtype=float).reshape(len(METRIC_NAMES))
    return float(w @ m)


def rank_population(candidates: Iterable[CandidateMetrics], weights,
                    directions: MetricDirections | None = None
                    ) -> list[RankedCandidate]:
    """Normalize the whole pool together, score, and sort ascending by cost
    (ties broken by candidate id)."""
    pool: Sequence[CandidateMetrics] = list(candidates)
    if not pool:
        raise ValueError("cannot rank an empty population")
    w = validate_weights(weights)
    dirs = directions if directions is not None else MetricDirections.default()
    raw = np.stack([c.raw for c in pool])
    normed = normalize(raw, dirs)
    xis = normed @ w
    ranked = [
        RankedCandidate(c.candidate_id, c.architecture, c.actuator,
                        c.raw, normed[i], float(xis[i]), c.is_baseline)
        for i, c in enumerate(pool)
    ]
    ranked.sort(key=lambda r: (r.xi, r.candidate_id))
    return ranked
