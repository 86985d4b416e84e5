"""File formats: actuator catalogs, task trajectories, region configs,
design files, and result bundles.

Unit policy at file boundaries: angles are degrees, angular rates deg/s,
lengths mm, forces N, torques Nm, masses kg. Everything is converted to the
internal radian/mm/N/Nm convention on load and back on save.

A result bundle is a self-contained JSON document: candidate metrics plus
the metric directions, so any consumer can re-rank the pool under new
weights without touching the kinematics. An sha256 over the canonicalized
candidate list guards against silent truncation or editing.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # pragma: no cover - py310 fallback
    import tomli as tomllib

from . import BUNDLE_SCHEMA_VERSION
from .errors import (
    CorruptBundle,
    IncompatibleBundles,
    MissingColumn,
    NonMonotoneTime,
    SchemaError,
    VersionMismatch,
)
from .mechkin import MechanismParams, RsuParams, SpuParams
from .metrics import METRIC_NAMES, ActuatorSpec
from .optimizer import TaskTrajectory
from .ranking import CandidateMetrics, MetricDirections, rank_population
from .regions import OperationalRegion
from .reparam import RsuFreeParams, realize

TASK_COLUMNS = ("t", "roll", "pitch", "roll_rate", "pitch_rate",
                "tau_roll", "tau_pitch")

_ANGLE_COLUMNS = {"roll", "pitch", "roll_rate", "pitch_rate"}


# ---------------------------------------------------------------------------
# actuator catalogs
# ---------------------------------------------------------------------------

_LINEAR_FIELDS = {
    "nominal_speed_mm_s": "nominal_speed",
    "peak_speed_mm_s": "peak_speed",
    "nominal_force_n": "nominal_effort",
    "peak_force_n": "peak_effort",
    "static_friction_n": "static_friction",
    "mass_kg": "mass",
    "stroke_mm": "stroke",
}
_ROTARY_FIELDS = {
    "nominal_speed_deg_s": "nominal_speed",
    "peak_speed_deg_s": "peak_speed",
    "nominal_torque_nm": "nominal_effort",
    "peak_torque_nm": "peak_effort",
    "static_friction_nm": "static_friction",
    "mass_kg": "mass",
}
_ROTARY_OPTIONAL = {
    "gear_ratio": "gear_ratio",
    "linkage_density_kg_mm": "linkage_density",
}


def _require(entry: dict, key: str, where: str):
    if key not in entry:
        raise SchemaError(f"{where}.{key}", "required field is missing")
    return entry[key]


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(where, f"expected a number, got {value!r}")
    if not math.isfinite(float(value)):
        raise SchemaError(where, "value must be finite")
    return float(value)


def load_catalog(path) -> dict[str, ActuatorSpec]:
    """Read an actuator catalog (JSON). Rotary speeds are given in deg/s in
    the file and converted to rad/s here."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise SchemaError(str(path), f"not valid JSON: {e}") from e
    entries = doc.get("actuators") if isinstance(doc, dict) else None
    if not isinstance(entries, list) or not entries:
        raise SchemaError(f"{path}:actuators", "expected a non-empty list")

    catalog: dict[str, ActuatorSpec] = {}
    for i, entry in enumerate(entries):
        where = f"{path}:actuators[{i}]"
        if not isinstance(entry, dict):
            raise SchemaError(where, "expected an object")
        name = _require(entry, "name", where)
        kind = _require(entry, "kind", where)
        if kind not in ("linear", "rotary"):
            raise SchemaError(f"{where}.kind", f"unknown kind {kind!r}")
        kwargs = {"name": name, "kind": kind}
        fields = _LINEAR_FIELDS if kind == "linear" else _ROTARY_FIELDS
        for file_key, attr in fields.items():
            kwargs[attr] = _number(_require(entry, file_key, where),
                                   f"{where}.{file_key}")
        if kind == "rotary":
            for speed in ("nominal_speed", "peak_speed"):
                kwargs[speed] = math.radians(kwargs[speed])
            for file_key, attr in _ROTARY_OPTIONAL.items():
                if file_key in entry:
                    kwargs[attr] = _number(entry[file_key], f"{where}.{file_key}")
        try:
            spec = ActuatorSpec(**kwargs)
        except ValueError as e:
            raise SchemaError(where, str(e)) from e
        if spec.name in catalog:
            raise SchemaError(f"{where}.name", f"duplicate actuator {spec.name!r}")
        catalog[spec.name] = spec
    return catalog


# ---------------------------------------------------------------------------
# task trajectories
# ---------------------------------------------------------------------------

def load_task_csv(path) -> TaskTrajectory:
    """One task per CSV file; angles and rates in degrees, torques in Nm.
    The task id is the file stem."""
    path = Path(path)
    with path.open(newline="") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames is None:
            raise SchemaError(str(path), "empty file")
        header = [h.strip() for h in reader.fieldnames]
        for col in TASK_COLUMNS:
            if col not in header:
                raise MissingColumn(str(path), col)
        rows = list(reader)
    if not rows:
        raise SchemaError(str(path), "no data rows")

    cols = {name: [] for name in TASK_COLUMNS}
    for i, row in enumerate(rows):
        for name in TASK_COLUMNS:
            raw = (row.get(name) or "").strip()
            try:
                value = float(raw)
            except ValueError:
                raise SchemaError(f"{path}:{name}",
                                  f"row {i}: not a number: {raw!r}") from None
            cols[name].append(value)
    t = np.asarray(cols["t"])
    bad = np.flatnonzero(np.diff(t) <= 0.0)
    if len(bad):
        raise NonMonotoneTime(str(path), int(bad[0]) + 1)
    data = {name: (np.radians(cols[name]) if name in _ANGLE_COLUMNS
                   else np.asarray(cols[name]))
            for name in TASK_COLUMNS if name != "t"}
    return TaskTrajectory(task_id=path.stem, t=t, **data)


def load_tasks(path) -> tuple[TaskTrajectory, ...]:
    """A directory of ``*.csv`` files (sorted by name) or a single file."""
    path = Path(path)
    if path.is_dir():
        files = sorted(path.glob("*.csv"))
        if not files:
            raise SchemaError(str(path), "directory contains no .csv task files")
        return tuple(load_task_csv(f) for f in files)
    return (load_task_csv(path),)


def write_task_csv(task: TaskTrajectory, path) -> None:
    path = Path(path)
    with path.open("w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(TASK_COLUMNS)
        for k in range(task.n_samples):
            writer.writerow([
                repr(float(task.t[k])),
                repr(math.degrees(task.roll[k])),
                repr(math.degrees(task.pitch[k])),
                repr(math.degrees(task.roll_rate[k])),
                repr(math.degrees(task.pitch_rate[k])),
                repr(float(task.tau_roll[k])),
                repr(float(task.tau_pitch[k])),
            ])


# ---------------------------------------------------------------------------
# region / mechanism configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RegionConfig:
    """Scan regions plus the mechanism-level scalars that travel with them."""

    core: OperationalRegion
    operational: OperationalRegion
    ground_offset: float  # mm from ground plane up to the ankle joint
    min_clearance: float  # mm between characteristic points of the two legs

    def __post_init__(self):
        if not self.operational.contains_region(self.core):
            raise SchemaError("core", "core region must lie within the "
                                       "operational region")


def _region_from_table(table: dict, where: str, step_deg: float) -> OperationalRegion:
    roll = _require(table, "roll_deg", where)
    pitch = _require(table, "pitch_deg", where)
    for name, pair in (("roll_deg", roll), ("pitch_deg", pitch)):
        if (not isinstance(pair, (list, tuple)) or len(pair) != 2
                or not all(isinstance(v, (int, float)) for v in pair)):
            raise SchemaError(f"{where}.{name}", "expected [lo, hi] in degrees")
    try:
        return OperationalRegion.from_degrees(tuple(roll), tuple(pitch), step_deg)
    except ValueError as e:
        raise SchemaError(where, str(e)) from e


def load_regions(path) -> RegionConfig:
    """TOML config with [core] and [operational] tables (degrees) and a
    [mechanism] table for ground offset and leg clearance (mm)."""
    path = Path(path)
    try:
        doc = tomllib.loads(path.read_text())
    except tomllib.TOMLDecodeError as e:
        raise SchemaError(str(path), f"not valid TOML: {e}") from e
    step = _number(doc.get("grid_step_deg", 2.0), f"{path}:grid_step_deg")
    if step <= 0.0:
        raise SchemaError(f"{path}:grid_step_deg", "grid step must be positive")
    core = _region_from_table(_require(doc, "core", str(path)),
                              f"{path}:core", step)
    operational = _region_from_table(_require(doc, "operational", str(path)),
                                     f"{path}:operational", step)
    mech = doc.get("mechanism", {})
    offset = _number(mech.get("ground_offset_mm", 0.0),
                     f"{path}:mechanism.ground_offset_mm")
    clearance = _number(mech.get("min_clearance_mm", 20.0),
                        f"{path}:mechanism.min_clearance_mm")
    return RegionConfig(core, operational, offset, clearance)


# ---------------------------------------------------------------------------
# design files
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DesignFile:
    """A mechanism geometry on disk.

    Either fully realized (SPU always; RSU with explicit crank and rod) or,
    for RSU, in free form (gamma/delta) together with the region the
    realization must cover.
    """

    design_id: str
    arch: str
    params: Optional[MechanismParams] = None
    free: Optional[RsuFreeParams] = None
    realization: Optional[OperationalRegion] = None

    def mechanism(self) -> MechanismParams:
        if self.params is not None:
            return self.params
        return realize(self.free, self.realization)


def _vec3(entry, where: str) -> np.ndarray:
    if (not isinstance(entry, (list, tuple)) or len(entry) != 3
            or not all(isinstance(v, (int, float)) for v in entry)):
        raise SchemaError(where, "expected a 3-vector in mm")
    return np.asarray(entry, dtype=float)


def _pair(entry, where: str) -> tuple[float, float]:
    if (not isinstance(entry, (list, tuple)) or len(entry) != 2
            or not all(isinstance(v, (int, float)) for v in entry)):
        raise SchemaError(where, "expected a pair [leg1, leg2]")
    return (float(entry[0]), float(entry[1]))


def load_design(path) -> DesignFile:
    """Read one geometry description (JSON)."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise SchemaError(str(path), f"not valid JSON: {e}") from e
    if not isinstance(doc, dict):
        raise SchemaError(str(path), "expected a JSON object")
    where = str(path)
    arch = _require(doc, "arch", where)
    if arch not in ("spu", "rsu"):
        raise SchemaError(f"{where}.arch", f"unknown architecture {arch!r}")
    anchors = _require(doc, "anchors", where)
    a1 = _vec3(_require(anchors, "a1", f"{where}.anchors"), f"{where}.anchors.a1")
    a2 = _vec3(_require(anchors, "a2", f"{where}.anchors"), f"{where}.anchors.a2")
    b1 = _vec3(_require(anchors, "b1", f"{where}.anchors"), f"{where}.anchors.b1")
    b2 = _vec3(_require(anchors, "b2", f"{where}.anchors"), f"{where}.anchors.b2")
    design_id = str(doc.get("id", path.stem))

    try:
        if arch == "spu":
            limits = doc.get("stroke_limits_mm")
            if limits is not None:
                zeta_min = _pair(_require(limits, "min", f"{where}.stroke_limits_mm"),
                                 f"{where}.stroke_limits_mm.min")
                zeta_max = _pair(_require(limits, "max", f"{where}.stroke_limits_mm"),
                                 f"{where}.stroke_limits_mm.max")
                params = SpuParams(a1, a2, b1, b2, zeta_min, zeta_max)
            else:
                params = SpuParams(a1, a2, b1, b2)
            return DesignFile(design_id, "spu", params=params)

        psi_deg = _pair(_require(doc, "psi_deg", where), f"{where}.psi_deg")
        psi = (math.radians(psi_deg[0]), math.radians(psi_deg[1]))
        if "gamma" in doc or "delta" in doc:
            gamma = _pair(_require(doc, "gamma", where), f"{where}.gamma")
            delta = _pair(_require(doc, "delta", where), f"{where}.delta")
            region_doc = _require(doc, "realization", where)
            region = _region_from_table(
                region_doc, f"{where}.realization",
                _number(region_doc.get("grid_step_deg", 2.0),
                        f"{where}.realization.grid_step_deg"))
            free = RsuFreeParams(a1, a2, b1, b2, psi, gamma, delta)
            return DesignFile(design_id, "rsu", free=free, realization=region)
        crank = _pair(_require(doc, "crank_mm", where), f"{where}.crank_mm")
        rod = _pair(_require(doc, "rod_mm", where), f"{where}.rod_mm")
        params = RsuParams(a1, a2, b1, b2, psi, crank, rod)
        return DesignFile(design_id, "rsu", params=params)
    except ValueError as e:
        raise SchemaError(where, str(e)) from e


# ---------------------------------------------------------------------------
# result bundles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BundleCandidate:
    """One scored design inside a bundle.

    Baselines carry metrics only (no genes, no search objectives) and join
    the normalization pool like any other candidate.
    """

    candidate_id: str
    arch: str
    actuator: str
    metrics: dict[str, float]
    genes: tuple[float, ...] = ()
    objectives: Optional[tuple[float, float]] = None
    metric_vars: dict[str, float] = field(default_factory=dict)
    singular_poses: int = 0
    is_baseline: bool = False

    def __post_init__(self):
        missing = [m for m in METRIC_NAMES if m not in self.metrics]
        if missing:
            raise ValueError(f"candidate {self.candidate_id!r}: missing metrics "
                             f"{missing}")
        object.__setattr__(self, "genes", tuple(float(g) for g in self.genes))
        if self.objectives is not None:
            object.__setattr__(self, "objectives",
                               (float(self.objectives[0]), float(self.objectives[1])))

    def to_ranking(self) -> CandidateMetrics:
        raw = np.array([float(self.metrics[m]) for m in METRIC_NAMES])
        return CandidateMetrics(self.candidate_id, self.arch, self.actuator,
                                raw, self.is_baseline)

    def to_dict(self) -> dict:
        return {
            "id": self.candidate_id,
            "arch": self.arch,
            "actuator": self.actuator,
            "genes": list(self.genes),
            "objectives": list(self.objectives) if self.objectives else None,
            "metrics": {m: float(self.metrics[m]) for m in METRIC_NAMES},
            "metric_vars": {k: float(v) for k, v in sorted(self.metric_vars.items())},
            "singular_poses": int(self.singular_poses),
            "is_baseline": bool(self.is_baseline),
        }

    @classmethod
    def from_dict(cls, d: dict, where: str) -> "BundleCandidate":
        try:
            objectives = d.get("objectives")
            return cls(
                candidate_id=str(d["id"]),
                arch=str(d["arch"]),
                actuator=str(d["actuator"]),
                metrics={k: float(v) for k, v in d["metrics"].items()},
                genes=tuple(d.get("genes", ())),
                objectives=tuple(objectives) if objectives else None,
                metric_vars={k: float(v) for k, v in d.get("metric_vars", {}).items()},
                singular_poses=int(d.get("singular_poses", 0)),
                is_baseline=bool(d.get("is_baseline", False)),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise CorruptBundle(f"{where}: bad candidate record: {e}") from e


def _canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


@dataclass(frozen=True)
class ResultBundle:
    """Self-contained, re-rankable result set."""

    candidates: tuple[BundleCandidate, ...]
    directions: MetricDirections
    region: dict
    provenance: dict = field(default_factory=dict)
    schema_version: int = BUNDLE_SCHEMA_VERSION

    def __post_init__(self):
        object.__setattr__(self, "candidates", tuple(self.candidates))
        if not self.candidates:
            raise ValueError("a bundle needs at least one candidate")
        ids = [c.candidate_id for c in self.candidates]
        if len(set(ids)) != len(ids):
            raise ValueError("candidate ids must be unique")

    def rank(self, weights):
        return rank_population([c.to_ranking() for c in self.candidates],
                               weights, self.directions)

    def pool_hash(self) -> str:
        pool = [c.to_dict() for c in
                sorted(self.candidates, key=lambda c: c.candidate_id)]
        return hashlib.sha256(_canonical(pool).encode()).hexdigest()

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "metric_names": list(METRIC_NAMES),
            "directions": self.directions.to_mapping(),
            "region": self.region,
            "provenance": self.provenance,
            "candidates": [c.to_dict() for c in self.candidates],
            "pool_sha256": self.pool_hash(),
        }


def save_bundle(bundle: ResultBundle, path) -> None:
    Path(path).write_text(json.dumps(bundle.to_dict(), indent=2) + "\n")


def load_bundle(path) -> ResultBundle:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise CorruptBundle(f"{path}: {e}") from e
    if not isinstance(doc, dict) or "schema_version" not in doc:
        raise CorruptBundle(f"{path}: missing schema_version")
    version = doc["schema_version"]
    if version != BUNDLE_SCHEMA_VERSION:
        raise VersionMismatch(f"{path}: bundle schema {version!r}, this tool "
                              f"supports {BUNDLE_SCHEMA_VERSION}")
    try:
        directions = MetricDirections.from_mapping(doc["directions"])
        candidates = tuple(
            BundleCandidate.from_dict(c, f"{path}:candidates[{i}]")
            for i, c in enumerate(doc["candidates"]))
        bundle = ResultBundle(candidates, directions, doc.get("region", {}),
                              doc.get("provenance", {}), int(version))
    except CorruptBundle:
        raise
    except (KeyError, TypeError, ValueError) as e:
        raise CorruptBundle(f"{path}: {e}") from e
    stored = doc.get("pool_sha256")
    if stored != bundle.pool_hash():
        raise CorruptBundle(f"{path}: pool hash mismatch (bundle edited or "
                            "truncated)")
    return bundle


def merge_bundles(bundles: Sequence[ResultBundle]) -> ResultBundle:
    """Concatenate candidate pools produced under the same configuration."""
    if not bundles:
        raise ValueError("nothing to merge")
    first = bundles[0]
    for other in bundles[1:]:
        if other.directions != first.directions:
            raise IncompatibleBundles("metric directions differ")
        if other.region != first.region:
            raise IncompatibleBundles("scan regions differ")
    merged: list[BundleCandidate] = []
    seen: set[str] = set()
    for b in bundles:
        for c in b.candidates:
            if c.candidate_id in seen:
                raise IncompatibleBundles(f"duplicate candidate id "
                                          f"{c.candidate_id!r}")
            seen.add(c.candidate_id)
            merged.append(c)
    provenance = {"merged_from": [b.provenance for b in bundles]}
    return ResultBundle(tuple(merged), first.directions, first.region,
                        provenance)


def load_baseline(path) -> BundleCandidate:
    """A baseline candidate: precomputed metrics, no searchable geometry."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise SchemaError(str(path), f"not valid JSON: {e}") from e
    where = str(path)
    metrics = _require(doc, "metrics", where)
    if not isinstance(metrics, dict):
        raise SchemaError(f"{where}.metrics", "expected an object")
    for name in METRIC_NAMES:
        if name not in metrics:
            raise SchemaError(f"{where}.metrics.{name}", "required metric missing")
        _number(metrics[name], f"{where}.metrics.{name}")
    unknown = set(metrics) - set(METRIC_NAMES)
    if unknown:
        raise SchemaError(f"{where}.metrics", f"unknown metrics {sorted(unknown)}")
    return BundleCandidate(
        candidate_id=str(_require(doc, "id", where)),
        arch=str(doc.get("arch", "baseline")),
        actuator=str(doc.get("actuator", "unspecified")),
        metrics={k: float(metrics[k]) for k in METRIC_NAMES},
        is_baseline=True,
    )
