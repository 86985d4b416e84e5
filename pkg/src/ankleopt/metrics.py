"""Performance metrics for candidate ankle designs.

Seven metrics describe a design: four are aggregated over the operational
region with a raised-cosine weight map (speed, torque, backdriving torque,
manipulability ratio) and three are evaluated at the neutral pose
(compactness, actuation mass, CoM height).

Region weighting: weights are 1 on an inner core rectangle (where reference
tasks live), decay as 0.5 (1 + cos(pi s)) with the normalized outward
distance s, and reach 0 on the boundary of the extended region. Aggregation
reports the weighted mean and weighted variance of each per-pose value.

Axis scalarization at a pose: speed and torque take the worse (minimum) of
the roll/pitch capabilities; backdriving torque takes the larger axis value.
Per-axis arrays are kept on the sweep object for diagnostics.

Units: ankle rates rad/s, ankle torques Nm (prismatic gradients carry mm/rad
because anchors are millimeters, so SPU ankle torques are converted from
N mm), compactness mm, mass kg, CoM height mm above the ground plane.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import AllZeroWeights, InvalidRegions, MissingSpec
from .mechkin import (
    Architecture,
    BranchChoice,
    DET_TOL,
    MechanismParams,
    RsuParams,
    actuation_gradient,
    characteristic_points,
    det2,
    inv2,
    manipulability_ratio_grid,
    spu_leg_lengths,
)
from .mincircle import min_enclosing_circle
from .regions import OperationalRegion

METRIC_NAMES = (
    "speed",
    "torque",
    "backdriving_torque",
    "manipulability",
    "compactness",
    "actuation_mass",
    "com_height",
)

# anchors are millimeters: prismatic ankle torques come out in N mm
_EFFORT_TO_NM = {"spu": 1e-3, "rsu": 1.0}


@dataclass(frozen=True)
class ActuatorSpec:
    """Catalog entry for one actuator model.

    Linear actuators (SPU) use mm/s and N; rotary actuators (RSU) use rad/s
    and Nm. ``linkage_density`` [kg/mm] sizes the RSU crank+rod mass.
    """

    name: str
    kind: str  # "linear" | "rotary"
    nominal_speed: float
    nominal_effort: float
    peak_speed: float
    peak_effort: float
    static_friction: float
    mass: float
    stroke: Optional[float] = None
    gear_ratio: Optional[float] = None
    linkage_density: Optional[float] = None

    def __post_init__(self):
        if self.kind not in ("linear", "rotary"):
            raise ValueError(f"unknown actuator kind {self.kind!r}")
        for name in ("nominal_speed", "nominal_effort", "peak_speed",
                     "peak_effort", "mass"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be positive")
        # frictionless or massless-linkage idealizations are allowed
        if self.static_friction < 0.0:
            raise ValueError("static_friction must be non-negative")
        if self.peak_speed < self.nominal_speed:
            raise ValueError("peak_speed must be at least nominal_speed")
        if self.peak_effort < self.nominal_effort:
            raise ValueError("peak_effort must be at least nominal_effort")
        if self.kind == "linear":
            if self.stroke is None or not self.stroke > 0.0:
                raise ValueError("linear actuators require a positive stroke")
        else:
            if self.gear_ratio is not None and not self.gear_ratio > 0.0:
                raise ValueError("gear_ratio must be positive when given")
            if self.linkage_density is not None and self.linkage_density < 0.0:
                raise ValueError("linkage_density must be non-negative")

    @property
    def compatible_arch(self) -> Architecture:
        return "spu" if self.kind == "linear" else "rsu"


@dataclass(frozen=True)
class WeightMap:
    """Raised-cosine weights over the extended region's grid."""

    core: OperationalRegion
    extended: OperationalRegion
    weights: np.ndarray  # (n_roll, n_pitch)

    def grid(self):
        return self.extended.grid()


@dataclass(frozen=True)
class MetricSummary:
    """Weighted mean / variance of a per-pose metric over the region."""

    mu: float
    var: float
    values: Optional[np.ndarray] = None

    @property
    def std(self) -> float:
        return math.sqrt(max(self.var, 0.0))


@dataclass(frozen=True)
class AnkleMetrics:
    speed: MetricSummary            # rad/s, min over axes
    torque: MetricSummary           # Nm, min over axes
    backdriving_torque: MetricSummary  # Nm, max over axes
    manipulability: MetricSummary   # dimensionless, >= 1
    compactness: float              # mm, enclosing-cylinder radius at neutral
    actuation_mass: float           # kg
    com_height: float               # mm above ground
    singular_poses: int = 0

    def value(self, name: str) -> float:
        """Scalar used for ranking: mu for region metrics, raw otherwise."""
        attr = getattr(self, name)
        return attr.mu if isinstance(attr, MetricSummary) else float(attr)

    def values_vector(self) -> np.ndarray:
        return np.array([self.value(n) for n in METRIC_NAMES])


def _axis_distance(x: np.ndarray, core_lo: float, core_hi: float,
                   ext_lo: float, ext_hi: float) -> np.ndarray:
    """Normalized outward distance along one axis: 0 inside the core,
    1 at the extended boundary."""
    lo_span = core_lo - ext_lo
    hi_span = ext_hi - core_hi
    below = np.where(x < core_lo,
                     np.where(lo_span > 0.0, (core_lo - x) / max(lo_span, 1e-300), 1.0),
                     0.0)
    above = np.where(x > core_hi,
                     np.where(hi_span > 0.0, (x - core_hi) / max(hi_span, 1e-300), 1.0),
                     0.0)
    return np.maximum(below, above)


def build_weight_map(core: OperationalRegion,
                     extended: OperationalRegion) -> WeightMap:
    """Raised-cosine taper from the core rectangle to the extended boundary.

    Per-axis normalized distances combine by max, so w = 1 exactly on the
    core rectangle and w = 0 exactly on the extended boundary.
    """
    if not extended.contains_region(core):
        raise InvalidRegions("core region must lie within the extended region")
    phi, theta = extended.grid()
    s_roll = _axis_distance(phi, core.roll_lo, core.roll_hi,
                            extended.roll_lo, extended.roll_hi)
    s_pitch = _axis_distance(theta, core.pitch_lo, core.pitch_hi,
                             extended.pitch_lo, extended.pitch_hi)
    s = np.clip(np.maximum(s_roll, s_pitch), 0.0, 1.0)
    w = 0.5 * (1.0 + np.cos(math.pi * s))
    w = np.where(s <= 0.0, 1.0, np.where(s >= 1.0, 0.0, w))
    return WeightMap(core=core, extended=extended, weights=w)


def weighted_summary(values, weights, keep_values: bool = False) -> MetricSummary:
    """Weighted mean and variance; NaN values are excluded with their weights."""
    if isinstance(weights, WeightMap):
        weights = weights.weights
    m = np.asarray(values, dtype=float).ravel()
    w = np.asarray(weights, dtype=float).ravel()
    if m.shape != w.shape:
        raise ValueError("values and weights must have matching shapes")
    valid = np.isfinite(m)
    m, w = m[valid], w[valid]
    total = float(w.sum())
    if total <= 0.0:
        raise AllZeroWeights("weight map sums to zero over valid poses")
    mu = float((w * m).sum() / total)
    var = float((w * (m - mu) ** 2).sum() / total)
    return MetricSummary(mu=mu, var=var, values=m.copy() if keep_values else None)


@dataclass(frozen=True)
class PoseSweep:
    """Per-pose quantities over the weight-map grid (diagnostic export)."""

    speed_axes: np.ndarray      # (..., 2) achievable |roll|, |pitch| rates
    torque_axes: np.ndarray     # (..., 2) achievable ankle torques
    backdrive_axes: np.ndarray  # (..., 2) friction-reflected ankle torques
    kappa: np.ndarray           # (...)
    singular: np.ndarray        # (...) bool

    @property
    def speed(self) -> np.ndarray:
        return np.where(self.singular, np.nan, self.speed_axes.min(axis=-1))

    @property
    def torque(self) -> np.ndarray:
        return np.where(self.singular, np.nan, self.torque_axes.min(axis=-1))

    @property
    def backdrive(self) -> np.ndarray:
        return np.where(self.singular, np.nan, self.backdrive_axes.max(axis=-1))


def nominal_rate_vector(actuator: ActuatorSpec) -> np.ndarray:
    return np.full(2, actuator.nominal_speed)


def pose_sweep(arch: Architecture, params: MechanismParams,
               actuator: ActuatorSpec, wmap: WeightMap,
               branch: BranchChoice = "primary") -> PoseSweep:
    """Evaluate the four per-pose metrics across the weight-map grid.

    Sign-symmetric actuators make the per-axis extrema over actuation signs
    equal to absolute row/column sums, so no sign enumeration is needed.
    """
    if actuator.compatible_arch != arch:
        raise MissingSpec(f"actuator {actuator.name!r} is {actuator.kind}, "
                          f"incompatible with the {arch} architecture")
    phi, theta = wmap.grid()
    G = actuation_gradient(arch, params, phi, theta, branch=branch)
    if arch == "spu":
        # row scale for the singularity check is the leg length at the pose
        zet = spu_leg_lengths(params.a, params.b, phi, theta)
        Gn = G / np.maximum(zet, 1e-9)[..., None]
    else:
        Gn = G
    det_n = det2(Gn)
    singular = ~np.isfinite(det_n) | (np.abs(det_n) < DET_TOL)
    safe_G = np.where(singular[..., None, None], np.eye(2), G)
    J = inv2(safe_G)

    effort_scale = _EFFORT_TO_NM[arch]
    qdot = np.full(2, actuator.nominal_speed)
    tau_nom = np.full(2, actuator.nominal_effort)
    tau_fric = np.full(2, actuator.static_friction)

    # max over actuation signs of |J qdot| per axis = |J| qdot
    speed_axes = np.abs(J) @ qdot
    torque_axes = (np.abs(np.swapaxes(G, -1, -2)) @ tau_nom) * effort_scale
    backdrive_axes = (np.abs(np.swapaxes(G, -1, -2)) @ tau_fric) * effort_scale
    kappa = manipulability_ratio_grid(J)

    nanpair = np.full(2, np.nan)
    speed_axes = np.where(singular[..., None], nanpair, speed_axes)
    torque_axes = np.where(singular[..., None], nanpair, torque_axes)
    backdrive_axes = np.where(singular[..., None], nanpair, backdrive_axes)
    kappa = np.where(singular, np.nan, kappa)
    return PoseSweep(speed_axes=speed_axes, torque_axes=torque_axes,
                     backdrive_axes=backdrive_axes, kappa=kappa, singular=singular)


def metric_speed(arch, params, actuator, wmap, branch="primary") -> MetricSummary:
    return weighted_summary(pose_sweep(arch, params, actuator, wmap, branch).speed, wmap)


def metric_torque(arch, params, actuator, wmap, branch="primary") -> MetricSummary:
    return weighted_summary(pose_sweep(arch, params, actuator, wmap, branch).torque, wmap)


def metric_backdrive(arch, params, actuator, wmap, branch="primary") -> MetricSummary:
    return weighted_summary(pose_sweep(arch, params, actuator, wmap, branch).backdrive,
                            wmap)


def metric_manip(arch, params, wmap, branch="primary") -> MetricSummary:
    phi, theta = wmap.grid()
    G = actuation_gradient(arch, params, phi, theta, branch=branch)
    kappa = manipulability_ratio_grid(inv2(G))
    return weighted_summary(kappa, wmap)


def metric_compactness(arch: Architecture, params: MechanismParams,
                       branch: BranchChoice = "primary") -> float:
    """Radius of the smallest vertical cylinder enclosing the mechanism's
    characteristic points at the neutral pose."""
    pts = characteristic_points(arch, params, branch=branch)
    horizontal = [(float(p[0]), float(p[1])) for p in pts.values()]
    _, _, radius = min_enclosing_circle(horizontal)
    return radius


def metric_mass_and_com(arch: Architecture, params: MechanismParams,
                        actuator: ActuatorSpec,
                        ground_offset: float) -> tuple[float, float]:
    """Actuation mass [kg] and its CoM height [mm] above the ground plane.

    The ground plane sits ``ground_offset`` mm below the ankle joint U0.
    Rotary actuators weigh in at R_i; linear actuators at the midpoint of
    their leg segment at neutral. RSU linkage mass (density x length) is
    lumped at each link's midpoint.
    """
    if actuator.compatible_arch != arch:
        raise MissingSpec(f"actuator {actuator.name!r} is {actuator.kind}, "
                          f"incompatible with the {arch} architecture")
    if ground_offset is None or not math.isfinite(ground_offset) or ground_offset < 0:
        raise MissingSpec("ground_offset (mm below the ankle joint) is required")
    pts = characteristic_points(arch, params)
    masses = []
    heights = []
    for i in range(2):
        if arch == "spu":
            z = 0.5 * (pts[f"S{i + 1}"][2] + pts[f"U{i + 1}"][2])
        else:
            z = pts[f"R{i + 1}"][2]
        masses.append(actuator.mass)
        heights.append(z)
    if isinstance(params, RsuParams) and actuator.linkage_density:
        rho = actuator.linkage_density
        for i in range(2):
            r_pt, s_pt, u_pt = pts[f"R{i + 1}"], pts[f"S{i + 1}"], pts[f"U{i + 1}"]
            masses.append(rho * params.crank[i])
            heights.append(0.5 * (r_pt[2] + s_pt[2]))
            masses.append(rho * params.rod[i])
            heights.append(0.5 * (s_pt[2] + u_pt[2]))
    total = sum(masses)
    com_z = sum(m * z for m, z in zip(masses, heights)) / total
    return total, com_z + ground_offset


def ankle_metrics(arch: Architecture, params: MechanismParams,
                  actuator: ActuatorSpec, wmap: WeightMap,
                  ground_offset: float,
                  branch: BranchChoice = "primary") -> AnkleMetrics:
    """All seven metrics for one candidate design."""
    sweep = pose_sweep(arch, params, actuator, wmap, branch)
    mass, com = metric_mass_and_com(arch, params, actuator, ground_offset)
    return AnkleMetrics(
        speed=weighted_summary(sweep.speed, wmap),
        torque=weighted_summary(sweep.torque, wmap),
        backdriving_torque=weighted_summary(sweep.backdrive, wmap),
        manipulability=weighted_summary(sweep.kappa, wmap),
        compactness=metric_compactness(arch, params, branch),
        actuation_mass=mass,
        com_height=com,
        singular_poses=int(sweep.singular.sum()),
    )
