"""Task-driven two-objective design search (NSGA-II).

A design vector encodes one mechanism's geometry (anchors, plus yaw and the
bounded crank/rod parameters for RSU). Candidates are scored against a set
of reference task trajectories: f1 is the peak actuator effort needed to
deliver the task torques, f2 the peak actuator rate needed to follow the
task velocities. Both are minimized subject to feasibility (region-wide IK
solvability, stroke and rating limits, minimum clearance between the legs).

Search is a standard NSGA-II: fast nondominated sorting with constrained
dominance (feasible beats infeasible, lower violation beats higher), binary
tournament selection, simulated binary crossover, polynomial mutation, and
crowding-distance truncation.

Determinism contract: every random draw comes from a counter-based stream
keyed by (seed, generation, slot), so results are bit-identical across runs
and immune to evaluation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Protocol, Sequence

import numpy as np

from .errors import NoFeasibleFound
from .mechkin import (
    Architecture,
    MechanismParams,
    SpuParams,
    actuation_gradient,
    characteristic_points,
    det2,
    spu_leg_lengths,
)
from .metrics import ActuatorSpec
from .regions import OperationalRegion
from .reparam import RsuFreeParams, realize

_MIRROR = np.array([1.0, -1.0, 1.0])

# violation assigned when geometry cannot even be constructed (dominates any
# finite constraint excess)
_HARD_VIOLATION = 100.0


@dataclass(frozen=True)
class OptimizerConfig:
    pop_size: int = 100
    generations: int = 200
    seed: int = 0
    sbx_eta: float = 15.0
    mut_eta: float = 20.0
    crossover_prob: float = 0.9
    mutation_prob: Optional[float] = None  # default 1 / n_genes

    def __post_init__(self):
        if self.pop_size < 4 or self.pop_size % 2 != 0:
            raise ValueError("pop_size must be even and at least 4")
        if self.generations < 1:
            raise ValueError("generations must be positive")


@dataclass(frozen=True)
class Evaluation:
    """Objectives and feasibility of one candidate."""

    f1: float  # peak actuator effort [N or Nm]
    f2: float  # peak actuator rate [mm/s or rad/s]
    feasible: bool
    violation: float = 0.0

    def __post_init__(self):
        if not self.feasible and not self.violation > 0.0:
            raise ValueError("infeasible evaluations must carry a positive violation")

    @property
    def objectives(self) -> tuple[float, float]:
        return (self.f1, self.f2)


@dataclass(frozen=True)
class DesignVector:
    arch: Architecture
    genes: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "genes", np.asarray(self.genes, dtype=float))


@dataclass(frozen=True)
class TaskTrajectory:
    """Reference ankle motion: poses, rates and torques over time."""

    task_id: str
    t: np.ndarray
    roll: np.ndarray
    pitch: np.ndarray
    roll_rate: np.ndarray
    pitch_rate: np.ndarray
    tau_roll: np.ndarray
    tau_pitch: np.ndarray

    def __post_init__(self):
        for name in ("t", "roll", "pitch", "roll_rate", "pitch_rate",
                     "tau_roll", "tau_pitch"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        n = len(self.t)
        if n == 0:
            raise ValueError(f"task {self.task_id!r} has no samples")
        for name in ("roll", "pitch", "roll_rate", "pitch_rate", "tau_roll", "tau_pitch"):
            if len(getattr(self, name)) != n:
                raise ValueError(f"task {self.task_id!r}: column {name} length mismatch")
            if not np.all(np.isfinite(getattr(self, name))):
                raise ValueError(f"task {self.task_id!r}: column {name} must be finite")
        if np.any(np.diff(self.t) <= 0.0):
            raise ValueError(f"task {self.task_id!r}: time must be strictly increasing")

    @property
    def n_samples(self) -> int:
        return len(self.t)

    def samples_outside(self, region: OperationalRegion, tol: float = 1e-9) -> np.ndarray:
        bad = ~((self.roll >= region.roll_lo - tol) & (self.roll <= region.roll_hi + tol)
                & (self.pitch >= region.pitch_lo - tol)
                & (self.pitch <= region.pitch_hi + tol))
        return np.flatnonzero(bad)


@dataclass(frozen=True)
class DesignSpace:
    """Gene layout and box bounds for one architecture.

    Symmetric mode (the default) encodes leg 1 only; leg 2 mirrors through
    the sagittal plane (y-flip, yaw negated).
    """

    arch: Architecture
    lo: np.ndarray
    hi: np.ndarray
    symmetric: bool = True

    def __post_init__(self):
        object.__setattr__(self, "lo", np.asarray(self.lo, dtype=float))
        object.__setattr__(self, "hi", np.asarray(self.hi, dtype=float))
        if self.lo.shape != self.hi.shape or np.any(self.hi <= self.lo):
            raise ValueError("bounds must satisfy lo < hi per gene")
        want = self.n_genes_for(self.arch, self.symmetric)
        if len(self.lo) != want:
            raise ValueError(f"{self.arch} {'symmetric' if self.symmetric else 'full'} "
                             f"layout needs {want} genes, got {len(self.lo)}")

    @staticmethod
    def n_genes_for(arch: Architecture, symmetric: bool) -> int:
        if arch == "spu":
            return 6 if symmetric else 12
        return 9 if symmetric else 18

    @property
    def n_genes(self) -> int:
        return len(self.lo)

    @classmethod
    def default(cls, arch: Architecture, symmetric: bool = True) -> "DesignSpace":
        a_lo, a_hi = [-140.0, 20.0, 160.0], [-30.0, 90.0, 300.0]
        b_lo, b_hi = [-70.0, 15.0, 10.0], [-5.0, 70.0, 70.0]
        if arch == "spu":
            if symmetric:
                return cls("spu", a_lo + b_lo, a_hi + b_hi, True)
            mirror_a = [a_lo[0], -a_hi[1], a_lo[2]], [a_hi[0], -a_lo[1], a_hi[2]]
            mirror_b = [b_lo[0], -b_hi[1], b_lo[2]], [b_hi[0], -b_lo[1], b_hi[2]]
            return cls("spu", a_lo + mirror_a[0] + b_lo + mirror_b[0],
                       a_hi + mirror_a[1] + b_hi + mirror_b[1], False)
        psi_lo, psi_hi = -math.pi, 0.0
        gd_lo, gd_hi = [0.0, 0.0], [0.9, 1.0]
        if symmetric:
            return cls("rsu", a_lo + b_lo + [psi_lo] + gd_lo,
                       a_hi + b_hi + [psi_hi] + gd_hi, True)
        mirror_a = [a_lo[0], -a_hi[1], a_lo[2]], [a_hi[0], -a_lo[1], a_hi[2]]
        mirror_b = [b_lo[0], -b_hi[1], b_lo[2]], [b_hi[0], -b_lo[1], b_hi[2]]
        return cls("rsu",
                   a_lo + mirror_a[0] + b_lo + mirror_b[0] + [psi_lo, 0.0]
                   + gd_lo + gd_lo,
                   a_hi + mirror_a[1] + b_hi + mirror_b[1] + [psi_hi, math.pi]
                   + gd_hi + gd_hi, False)

    def decode(self, genes: np.ndarray):
        """Genes to geometry: SpuParams (no stroke limits) or RsuFreeParams."""
        g = np.asarray(genes, dtype=float)
        if self.arch == "spu":
            if self.symmetric:
                a1, b1 = g[0:3], g[3:6]
                return SpuParams(a1, a1 * _MIRROR, b1, b1 * _MIRROR)
            return SpuParams(g[0:3], g[3:6], g[6:9], g[9:12])
        if self.symmetric:
            a1, b1 = g[0:3], g[3:6]
            psi, gamma, delta = g[6], g[7], g[8]
            return RsuFreeParams(a1, a1 * _MIRROR, b1, b1 * _MIRROR,
                                 (psi, -psi), (gamma, gamma), (delta, delta))
        return RsuFreeParams(g[0:3], g[3:6], g[6:9], g[9:12],
                             (g[12], g[13]), (g[14], g[15]), (g[16], g[17]))


class Problem(Protocol):
    lo: np.ndarray
    hi: np.ndarray
    arch: Architecture

    def evaluate(self, genes: np.ndarray) -> Evaluation: ...


@dataclass(frozen=True)
class AnkleProblem:
    """Mechanism design problem over a task set for one actuator."""

    space: DesignSpace
    tasks: tuple[TaskTrajectory, ...]
    actuator: ActuatorSpec
    region: OperationalRegion
    min_clearance: float = 20.0  # mm between points of different legs

    def __post_init__(self):
        object.__setattr__(self, "tasks", tuple(self.tasks))
        if not self.tasks:
            raise ValueError("at least one task trajectory is required")
        if self.actuator.compatible_arch != self.space.arch:
            raise ValueError(f"actuator {self.actuator.name!r} is incompatible "
                             f"with the {self.space.arch} architecture")
        for task in self.tasks:
            outside = task.samples_outside(self.region)
            if len(outside):
                raise ValueError(
                    f"task {task.task_id!r}: {len(outside)} samples fall outside "
                    "the operational region")

    @property
    def lo(self) -> np.ndarray:
        return self.space.lo

    @property
    def hi(self) -> np.ndarray:
        return self.space.hi

    @property
    def arch(self) -> Architecture:
        return self.space.arch

    def realized(self, genes: np.ndarray) -> MechanismParams:
        """Concrete mechanism for a gene vector (raises on infeasible RSU)."""
        decoded = self.space.decode(genes)
        if self.space.arch == "spu":
            return self._with_stroke_limits(decoded)
        return realize(decoded, self.region)

    def _with_stroke_limits(self, params: SpuParams) -> SpuParams:
        half = self.actuator.stroke / 2.0
        neutral = spu_leg_lengths(params.a, params.b, 0.0, 0.0)
        return SpuParams(params.a1, params.a2, params.b1, params.b2,
                         zeta_min=(max(neutral[0] - half, 1e-6),
                                   max(neutral[1] - half, 1e-6)),
                         zeta_max=(neutral[0] + half, neutral[1] + half))

    def evaluate(self, genes: np.ndarray) -> Evaluation:
        try:
            params = self.realized(genes)
        except Exception:
            # unrealizable geometry: no objectives to speak of
            return Evaluation(math.inf, math.inf, feasible=False,
                              violation=_HARD_VIOLATION)
        violation = 0.0

        if self.space.arch == "spu":
            phi, theta = self.region.grid_flat()
            zeta = spu_leg_lengths(params.a, params.b, phi, theta)
            for i in range(2):
                over = float(np.max(zeta[:, i]) - params.zeta_max[i])
                under = float(params.zeta_min[i] - np.min(zeta[:, i]))
                violation += max(over, 0.0) / self.actuator.stroke
                violation += max(under, 0.0) / self.actuator.stroke

        violation += self._clearance_violation(params)

        f1, f2, singular = self._task_peaks(params)
        if singular:
            violation += 1.0
        else:
            if f1 > self.actuator.peak_effort:
                violation += (f1 - self.actuator.peak_effort) / self.actuator.peak_effort
            if f2 > self.actuator.peak_speed:
                violation += (f2 - self.actuator.peak_speed) / self.actuator.peak_speed
        return Evaluation(f1, f2, feasible=violation == 0.0, violation=violation)

    def _clearance_violation(self, params: MechanismParams) -> float:
        pts = characteristic_points(self.space.arch, params)
        leg1 = [v for k, v in pts.items() if k.endswith("1") and k != "U0"]
        leg2 = [v for k, v in pts.items() if k.endswith("2")]
        worst = 0.0
        for p in leg1:
            for q in leg2:
                deficit = self.min_clearance - float(np.linalg.norm(p - q))
                worst = max(worst, deficit)
        return worst / self.min_clearance if worst > 0.0 else 0.0

    def _task_peaks(self, params: MechanismParams) -> tuple[float, float, bool]:
        """Peak |actuator effort| and |actuator rate| over all task samples."""
        arch = self.space.arch
        # task torques are Nm; prismatic gradients carry mm/rad, so convert
        # the wrench to N mm to get actuator forces in N
        wrench_scale = 1000.0 if arch == "spu" else 1.0
        f1 = 0.0
        f2 = 0.0
        for task in self.tasks:
            G = actuation_gradient(arch, params, task.roll, task.pitch)
            d = det2(G)
            if not np.all(np.isfinite(G)) or np.any(np.abs(d) < 1e-12):
                return math.inf, math.inf, True
            wrench = wrench_scale * np.stack([task.tau_roll, task.tau_pitch], axis=-1)
            rates = np.stack([task.roll_rate, task.pitch_rate], axis=-1)
            # tau_act = G^-T f ; qdot = G v
            efforts = np.linalg.solve(np.swapaxes(G, -1, -2), wrench[..., None])[..., 0]
            qdots = (G @ rates[..., None])[..., 0]
            f1 = max(f1, float(np.max(np.abs(efforts))))
            f2 = max(f2, float(np.max(np.abs(qdots))))
        return f1, f2, False


@dataclass(frozen=True)
class ParetoFront:
    designs: tuple[DesignVector, ...]
    evaluations: tuple[Evaluation, ...]
    seed: int
    generations: int
    pop_size: int

    def __post_init__(self):
        object.__setattr__(self, "designs", tuple(self.designs))
        object.__setattr__(self, "evaluations", tuple(self.evaluations))

    def __len__(self) -> int:
        return len(self.designs)


# ---------------------------------------------------------------------------
# NSGA-II machinery
# ---------------------------------------------------------------------------

def _dominates(ea: Evaluation, eb: Evaluation) -> bool:
    """Constrained dominance."""
    if ea.feasible and not eb.feasible:
        return True
    if not ea.feasible and eb.feasible:
        return False
    if not ea.feasible:
        return ea.violation < eb.violation
    return (ea.f1 <= eb.f1 and ea.f2 <= eb.f2
            and (ea.f1 < eb.f1 or ea.f2 < eb.f2))


def nondominated_sort(evals: Sequence[Evaluation]) -> list[np.ndarray]:
    """Fronts of indices, rank 0 first (fast nondominated sort)."""
    n = len(evals)
    dominated_by: list[list[int]] = [[] for _ in range(n)]
    domination_count = np.zeros(n, dtype=int)
    for i in range(n):
        for j in range(i + 1, n):
            if _dominates(evals[i], evals[j]):
                dominated_by[i].append(j)
                domination_count[j] += 1
            elif _dominates(evals[j], evals[i]):
                dominated_by[j].append(i)
                domination_count[i] += 1
    fronts = []
    current = np.flatnonzero(domination_count == 0)
    while len(current):
        fronts.append(current)
        nxt = []
        for i in current:
            for j in dominated_by[i]:
                domination_count[j] -= 1
                if domination_count[j] == 0:
                    nxt.append(j)
        current = np.array(sorted(nxt), dtype=int)
    return fronts


def crowding_distance(objectives: np.ndarray) -> np.ndarray:
    """Crowding distances for one front, boundary points infinite."""
    objs = np.asarray(objectives, dtype=float)
    n, m = objs.shape
    if n <= 2:
        return np.full(n, math.inf)
    dist = np.zeros(n)
    for k in range(m):
        order = np.argsort(objs[:, k], kind="stable")
        span = objs[order[-1], k] - objs[order[0], k]
        dist[order[0]] = math.inf
        dist[order[-1]] = math.inf
        if span <= 0.0:
            continue
        gaps = (objs[order[2:], k] - objs[order[:-2], k]) / span
        dist[order[1:-1]] += gaps
    return dist


def _rank_and_crowding(evals: Sequence[Evaluation]) -> tuple[np.ndarray, np.ndarray]:
    ranks = np.empty(len(evals), dtype=int)
    crowd = np.empty(len(evals), dtype=float)
    objs = np.array([[e.f1 if math.isfinite(e.f1) else 1e300,
                      e.f2 if math.isfinite(e.f2) else 1e300] for e in evals])
    for rank, front in enumerate(nondominated_sort(evals)):
        ranks[front] = rank
        crowd[front] = crowding_distance(objs[front])
    return ranks, crowd


def _tournament(rng: np.random.Generator, ranks, crowd, n: int) -> int:
    i, j = int(rng.integers(n)), int(rng.integers(n))
    if ranks[i] != ranks[j]:
        return i if ranks[i] < ranks[j] else j
    if crowd[i] != crowd[j]:
        return i if crowd[i] > crowd[j] else j
    return i


def _sbx_pair(rng: np.random.Generator, p1, p2, lo, hi, eta: float,
              crossover_prob: float) -> tuple[np.ndarray, np.ndarray]:
    c1, c2 = p1.copy(), p2.copy()
    if rng.random() > crossover_prob:
        return c1, c2
    for k in range(len(p1)):
        if rng.random() > 0.5 or abs(p1[k] - p2[k]) < 1e-14:
            continue
        x1, x2 = sorted((p1[k], p2[k]))
        u = rng.random()
        beta = 1.0 + 2.0 * (x1 - lo[k]) / (x2 - x1)
        alpha = 2.0 - beta ** -(eta + 1.0)
        betaq = (u * alpha) ** (1.0 / (eta + 1.0)) if u <= 1.0 / alpha \
            else (1.0 / (2.0 - u * alpha)) ** (1.0 / (eta + 1.0))
        child1 = 0.5 * ((x1 + x2) - betaq * (x2 - x1))
        beta = 1.0 + 2.0 * (hi[k] - x2) / (x2 - x1)
        alpha = 2.0 - beta ** -(eta + 1.0)
        betaq = (u * alpha) ** (1.0 / (eta + 1.0)) if u <= 1.0 / alpha \
            else (1.0 / (2.0 - u * alpha)) ** (1.0 / (eta + 1.0))
        child2 = 0.5 * ((x1 + x2) + betaq * (x2 - x1))
        if rng.random() < 0.5:
            child1, child2 = child2, child1
        c1[k] = min(max(child1, lo[k]), hi[k])
        c2[k] = min(max(child2, lo[k]), hi[k])
    return c1, c2


def _polynomial_mutation(rng: np.random.Generator, genes, lo, hi, eta: float,
                         p_mut: float) -> np.ndarray:
    out = genes.copy()
    for k in range(len(genes)):
        if rng.random() > p_mut:
            continue
        x = out[k]
        span = hi[k] - lo[k]
        u = rng.random()
        if u < 0.5:
            delta = (2.0 * u + (1.0 - 2.0 * u)
                     * (1.0 - (x - lo[k]) / span) ** (eta + 1.0)) ** (1.0 / (eta + 1.0)) - 1.0
        else:
            delta = 1.0 - (2.0 * (1.0 - u) + 2.0 * (u - 0.5)
                           * (1.0 - (hi[k] - x) / span) ** (eta + 1.0)) ** (1.0 / (eta + 1.0))
        out[k] = min(max(x + delta * span, lo[k]), hi[k])
    return out


def _stream(seed: int, generation: int, slot: int) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence(entropy=seed, spawn_key=(generation, slot)))


ProgressFn = Callable[[int, float, float, int], None]


def nsga2(problem: Problem, config: OptimizerConfig,
          progress: Optional[ProgressFn] = None) -> ParetoFront:
    """Run the search; returns the feasible rank-0 designs of the final
    population. Raises NoFeasibleFound (with the least-violating candidates
    attached) when no feasible individual survived."""
    lo = np.asarray(problem.lo, dtype=float)
    hi = np.asarray(problem.hi, dtype=float)
    n_genes = len(lo)
    n = config.pop_size
    p_mut = config.mutation_prob if config.mutation_prob is not None else 1.0 / n_genes

    pop = [lo + _stream(config.seed, 0, i).random(n_genes) * (hi - lo)
           for i in range(n)]
    evals = [problem.evaluate(g) for g in pop]

    for gen in range(1, config.generations + 1):
        ranks, crowd = _rank_and_crowding(evals)
        offspring = []
        for pair in range(n // 2):
            rng = _stream(config.seed, gen, pair)
            i = _tournament(rng, ranks, crowd, n)
            j = _tournament(rng, ranks, crowd, n)
            c1, c2 = _sbx_pair(rng, pop[i], pop[j], lo, hi,
                               config.sbx_eta, config.crossover_prob)
            offspring.append(_polynomial_mutation(rng, c1, lo, hi,
                                                  config.mut_eta, p_mut))
            offspring.append(_polynomial_mutation(rng, c2, lo, hi,
                                                  config.mut_eta, p_mut))
        off_evals = [problem.evaluate(g) for g in offspring]

        merged = pop + offspring
        merged_evals = evals + off_evals
        fronts = nondominated_sort(merged_evals)
        next_pop: list[np.ndarray] = []
        next_evals: list[Evaluation] = []
        for front in fronts:
            if len(next_pop) + len(front) <= n:
                chosen = front
            else:
                objs = np.array([[merged_evals[i].f1, merged_evals[i].f2]
                                 for i in front])
                objs[~np.isfinite(objs)] = 1e300
                dist = crowding_distance(objs)
                order = np.argsort(-dist, kind="stable")
                chosen = front[order[: n - len(next_pop)]]
            next_pop.extend(merged[i] for i in chosen)
            next_evals.extend(merged_evals[i] for i in chosen)
            if len(next_pop) >= n:
                break
        pop, evals = next_pop, next_evals

        if progress is not None:
            feas = [e for e in evals if e.feasible]
            best_f1 = min((e.f1 for e in feas), default=math.inf)
            best_f2 = min((e.f2 for e in feas), default=math.inf)
            progress(gen, best_f1, best_f2, len(feas))

    feasible_idx = [i for i, e in enumerate(evals) if e.feasible]
    if not feasible_idx:
        order = np.argsort([e.violation for e in evals], kind="stable")[:5]
        raise NoFeasibleFound(best_infeasible=[
            (pop[i].copy(), evals[i]) for i in order])
    front0 = nondominated_sort([evals[i] for i in feasible_idx])[0]
    picked = [feasible_idx[i] for i in front0]
    # stable candidate order for byte-identical bundles
    picked.sort(key=lambda i: (evals[i].f1, evals[i].f2, tuple(pop[i])))
    arch = getattr(problem, "arch", "spu")
    return ParetoFront(
        designs=tuple(DesignVector(arch, pop[i].copy()) for i in picked),
        evaluations=tuple(evals[i] for i in picked),
        seed=config.seed,
        generations=config.generations,
        pop_size=config.pop_size,
    )
