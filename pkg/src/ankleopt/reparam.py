"""Feasibility-guaranteeing reparameterization of the RSU mechanism.

Arbitrary crank/rod lengths give no guarantee that the RSU existence
condition |r^2 - c^2 - ||d||^2| <= 2 c ||d|| rho holds across the requested
operational region. This module replaces (c_i, r_i) with bounded variables
(gamma_i, delta_i) in [0,1) x [0,1]:

  c_i(gamma_i) = c_i_min / (1 - gamma_i),
  r_i(delta_i) = (1 - delta_i) r_i_min + delta_i r_i_max,

where c_i_min, r_i_min, r_i_max are extrema of closed-form expressions over
the region grid. Any (gamma, delta) then yields a mechanism whose inverse
kinematics is solvable at every grid point of the region, by construction.

All region extrema use the uniform grid of the OperationalRegion (the
continuous extrema are approximated; tests verify stability under grid
refinement). Scans are vectorized and bit-reproducible.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DegenerateGeometry, EmptyInterval, RealizationInfeasible
from .mechkin import RsuParams, rsu_polar_terms, rsu_ratio_grid, _vec3
from .regions import OperationalRegion

# below these, the actuator axis effectively passes through the U-R line and
# no finite crank satisfies the existence condition
ND_TOL = 1e-9   # mm
RHO_TOL = 1e-9  # dimensionless


@dataclass(frozen=True)
class RsuFreeParams:
    """RSU geometry with crank/rod replaced by the bounded (gamma, delta)."""

    a1: np.ndarray
    a2: np.ndarray
    b1: np.ndarray
    b2: np.ndarray
    psi: tuple[float, float]
    gamma: tuple[float, float] = (0.0, 0.0)
    delta: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        for name in ("a1", "a2", "b1", "b2"):
            object.__setattr__(self, name, _vec3(getattr(self, name)))
        for i in range(2):
            if not 0.0 <= self.gamma[i] < 1.0:
                raise ValueError("gamma must lie in [0, 1)")
            if not 0.0 <= self.delta[i] <= 1.0:
                raise ValueError("delta must lie in [0, 1]")

    @property
    def a(self) -> np.ndarray:
        return np.stack([self.a1, self.a2])

    @property
    def b(self) -> np.ndarray:
        return np.stack([self.b1, self.b2])


GeomLike = Union[RsuFreeParams, RsuParams]


@dataclass(frozen=True)
class CrankBound:
    """Minimum admissible crank length and the ||d|| extrema behind it."""

    c_min: float
    d_min: float
    d_max: float


def _leg_scan(geom: GeomLike, leg: int, region: OperationalRegion):
    phi, theta = region.grid_flat()
    nd, rho, _ = rsu_polar_terms(geom.a[leg], geom.b[leg], geom.psi[leg], phi, theta)
    if np.any(nd < ND_TOL):
        raise DegenerateGeometry(leg + 1, "||d|| vanishes on the region grid")
    if np.any(rho < RHO_TOL):
        raise DegenerateGeometry(
            leg + 1, "actuator axis passes through the U-R line on the region grid")
    return nd, rho


def crank_min(geom: GeomLike, region: OperationalRegion, leg: int) -> CrankBound:
    """Smallest crank for which a rod interval can exist over the region.

    c_min = max over the grid of |d*_max d*_min - ||d||^2| / (2 ||d|| rho),
    with d*_min/d*_max the grid extrema of ||d||.
    """
    nd, rho = _leg_scan(geom, leg, region)
    d_min = float(nd.min())
    d_max = float(nd.max())
    c = float(np.max(np.abs(d_max * d_min - nd * nd) / (2.0 * nd * rho)))
    return CrankBound(c_min=c, d_min=d_min, d_max=d_max)


def rod_bounds(geom: GeomLike, crank: float, region: OperationalRegion,
               leg: int) -> tuple[float, float]:
    """Interval [r_min, r_max] of rod lengths compatible with the whole region.

    Raises EmptyInterval when the crank is below the true continuous-domain
    minimum (grid coarseness); refine the grid or increase the crank.
    """
    nd, rho = _leg_scan(geom, leg, region)
    lo = crank * crank + nd * nd - 2.0 * crank * nd * rho
    hi = crank * crank + nd * nd + 2.0 * crank * nd * rho
    r_min_sq = float(lo.max())
    r_max_sq = float(hi.min())
    if r_min_sq > r_max_sq:
        raise EmptyInterval(leg + 1, math.sqrt(max(r_min_sq, 0.0)),
                            math.sqrt(max(r_max_sq, 0.0)))
    r_min = math.sqrt(max(r_min_sq, 0.0))
    r_max = math.sqrt(max(r_max_sq, 0.0))
    return r_min, r_max


def realize(free: RsuFreeParams, region: OperationalRegion,
            safety: float = 0.0) -> RsuParams:
    """Map (gamma, delta) to concrete crank/rod lengths over the region.

    ``safety`` optionally inflates c_min by (1 + safety) to absorb grid
    discretization error (0 by default). Designs whose realized rod is not
    longer than the crank are rejected (RealizationInfeasible), never
    clamped.
    """
    cranks = []
    rods = []
    for leg in range(2):
        bound = crank_min(free, region, leg)
        c = bound.c_min * (1.0 + safety) / (1.0 - free.gamma[leg])
        r_min, r_max = rod_bounds(free, c, region, leg)
        r = (1.0 - free.delta[leg]) * r_min + free.delta[leg] * r_max
        if not c > 0.0:
            raise DegenerateGeometry(leg + 1, "realized crank length is zero "
                                              "(degenerate single-point region)")
        if not r > c:
            raise RealizationInfeasible(leg + 1, c, r)
        cranks.append(c)
        rods.append(r)
    return RsuParams(free.a1, free.a2, free.b1, free.b2, free.psi,
                     (cranks[0], cranks[1]), (rods[0], rods[1]))


@dataclass(frozen=True)
class SolvabilityMap:
    """IK solvability of an RSU design over a scan window.

    Margins are 1 - |k/rho| per leg (negative = unsolvable); the zero-margin
    contour is the crank-rod alignment locus.
    """

    roll: np.ndarray    # (n_roll,)
    pitch: np.ndarray   # (n_pitch,)
    margin: np.ndarray  # (n_roll, n_pitch, 2)

    @property
    def solvable(self) -> np.ndarray:
        return self.margin >= 0.0

    def contained(self, region: OperationalRegion,
                  tol: float = 1e-9) -> tuple[bool, tuple[float, float] | None]:
        """Whether every window grid point inside ``region`` is solvable for
        both legs; returns the first violating (roll, pitch) otherwise."""
        in_region = ((self.roll[:, None] >= region.roll_lo - 1e-12)
                     & (self.roll[:, None] <= region.roll_hi + 1e-12)
                     & (self.pitch[None, :] >= region.pitch_lo - 1e-12)
                     & (self.pitch[None, :] <= region.pitch_hi + 1e-12))
        bad = in_region[..., None] & (self.margin < -tol)
        if not bad.any():
            return True, None
        i, j, _ = np.argwhere(bad)[0]
        return False, (float(self.roll[i]), float(self.pitch[j]))

    def alignment_loci(self, leg: int) -> np.ndarray:
        """Approximate crank-rod alignment locus: centers of grid cells where
        the leg margin changes sign. Returns an (n, 2) array of (roll, pitch)."""
        m = self.margin[..., leg]
        pts = []
        sign = np.signbit(m)
        flips_r = sign[:-1, :] != sign[1:, :]
        flips_p = sign[:, :-1] != sign[:, 1:]
        for i, j in np.argwhere(flips_r):
            pts.append(((self.roll[i] + self.roll[i + 1]) / 2.0, self.pitch[j]))
        for i, j in np.argwhere(flips_p):
            pts.append((self.roll[i], (self.pitch[j] + self.pitch[j + 1]) / 2.0))
        return np.asarray(pts) if pts else np.empty((0, 2))

    def to_csv(self, path) -> None:
        """Grid export (degrees) for external plotting."""
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["roll_deg", "pitch_deg", "solvable_leg1",
                             "solvable_leg2", "margin_leg1", "margin_leg2"])
            for i, r in enumerate(self.roll):
                for j, p in enumerate(self.pitch):
                    m1, m2 = self.margin[i, j]
                    writer.writerow([
                        f"{math.degrees(r):.6f}", f"{math.degrees(p):.6f}",
                        int(m1 >= 0.0), int(m2 >= 0.0),
                        f"{m1:.9f}", f"{m2:.9f}",
                    ])


def configuration_space_scan(params: RsuParams,
                             window: OperationalRegion) -> SolvabilityMap:
    """Solvability margins of a realized design over a scan window."""
    roll = window.roll_axis()
    pitch = window.pitch_axis()
    phi, theta = np.meshgrid(roll, pitch, indexing="ij")
    ratio = rsu_ratio_grid(params, phi, theta)
    with np.errstate(invalid="ignore"):
        margin = 1.0 - np.abs(ratio)
    margin = np.where(np.isfinite(margin), margin, -np.inf)
    return SolvabilityMap(roll=roll, pitch=pitch, margin=margin)
