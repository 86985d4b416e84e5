"""Rectangular roll/pitch regions and their scan grids.

The operational region is the rectangle of foot orientations a mechanism must
reach; extrema and metric aggregations are evaluated on a uniform grid over
it. Grids always include the rectangle corners; the realized step never
exceeds the nominal one. Reductions over grids flatten row-major (roll-major)
so tie-breaking is deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

DEFAULT_GRID_STEP = math.radians(2.0)


@dataclass(frozen=True)
class OperationalRegion:
    """Closed rectangle [roll_lo, roll_hi] x [pitch_lo, pitch_hi], radians."""

    roll_lo: float
    roll_hi: float
    pitch_lo: float
    pitch_hi: float
    grid_step: float = DEFAULT_GRID_STEP

    def __post_init__(self):
        for name in ("roll_lo", "roll_hi", "pitch_lo", "pitch_hi", "grid_step"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.roll_hi < self.roll_lo or self.pitch_hi < self.pitch_lo:
            raise ValueError("region intervals must be nonempty")
        if self.grid_step <= 0.0:
            raise ValueError("grid step must be positive")

    @classmethod
    def from_degrees(cls, roll: tuple[float, float], pitch: tuple[float, float],
                     grid_step_deg: float = 2.0) -> "OperationalRegion":
        return cls(
            math.radians(roll[0]), math.radians(roll[1]),
            math.radians(pitch[0]), math.radians(pitch[1]),
            math.radians(grid_step_deg),
        )

    @classmethod
    def symmetric_deg(cls, half_width_deg: float,
                      grid_step_deg: float = 2.0) -> "OperationalRegion":
        """Square region [-w, w] x [-w, w], degrees."""
        return cls.from_degrees((-half_width_deg, half_width_deg),
                                (-half_width_deg, half_width_deg), grid_step_deg)

    @property
    def roll_width(self) -> float:
        return self.roll_hi - self.roll_lo

    @property
    def pitch_width(self) -> float:
        return self.pitch_hi - self.pitch_lo

    def with_step(self, grid_step: float) -> "OperationalRegion":
        return replace(self, grid_step=grid_step)

    def _axis(self, lo: float, hi: float) -> np.ndarray:
        width = hi - lo
        if width == 0.0:
            return np.array([lo])
        n = int(math.ceil(width / self.grid_step - 1e-9)) + 1
        return np.linspace(lo, hi, max(n, 2))

    def roll_axis(self) -> np.ndarray:
        return self._axis(self.roll_lo, self.roll_hi)

    def pitch_axis(self) -> np.ndarray:
        return self._axis(self.pitch_lo, self.pitch_hi)

    def grid(self) -> tuple[np.ndarray, np.ndarray]:
        """Meshgrid (roll, pitch) of shape (n_roll, n_pitch), roll-major."""
        return np.meshgrid(self.roll_axis(), self.pitch_axis(), indexing="ij")

    def grid_flat(self) -> tuple[np.ndarray, np.ndarray]:
        phi, theta = self.grid()
        return phi.ravel(), theta.ravel()

    def contains_point(self, roll: float, pitch: float, tol: float = 0.0) -> bool:
        return (self.roll_lo - tol <= roll <= self.roll_hi + tol
                and self.pitch_lo - tol <= pitch <= self.pitch_hi + tol)

    def contains_region(self, other: "OperationalRegion", tol: float = 1e-12) -> bool:
        return (self.roll_lo <= other.roll_lo + tol and other.roll_hi <= self.roll_hi + tol
                and self.pitch_lo <= other.pitch_lo + tol
                and other.pitch_hi <= self.pitch_hi + tol)

    def to_dict_deg(self) -> dict:
        return {
            "roll_deg": [math.degrees(self.roll_lo), math.degrees(self.roll_hi)],
            "pitch_deg": [math.degrees(self.pitch_lo), math.degrees(self.pitch_hi)],
            "grid_step_deg": math.degrees(self.grid_step),
        }

    @classmethod
    def from_dict_deg(cls, data: dict) -> "OperationalRegion":
        return cls.from_degrees(
            tuple(data["roll_deg"]), tuple(data["pitch_deg"]),
            float(data.get("grid_step_deg", 2.0)),
        )
