"""Evolutionary search: sorting/crowding machinery, the ankle design problem,
and full NSGA-II runs on an analytic benchmark."""

import math

import numpy as np
import pytest

from ankleopt.errors import NoFeasibleFound
from ankleopt.mechkin import actuation_gradient, spu_leg_lengths
from ankleopt.metrics import ActuatorSpec
from ankleopt.optimizer import (
    AnkleProblem,
    DesignSpace,
    DesignVector,
    Evaluation,
    OptimizerConfig,
    TaskTrajectory,
    crowding_distance,
    nondominated_sort,
    nsga2,
)
from ankleopt.regions import OperationalRegion
from ankleopt.reparam import configuration_space_scan

from conftest import A1, B1, PSI

LIN = ActuatorSpec(name="lin", kind="linear", nominal_speed=120.0,
                   nominal_effort=900.0, peak_speed=200.0, peak_effort=1500.0,
                   static_friction=4.0, mass=0.85, stroke=160.0)
ROT = ActuatorSpec(name="rot", kind="rotary", nominal_speed=6.0,
                   nominal_effort=40.0, peak_speed=12.0, peak_effort=90.0,
                   static_friction=0.3, mass=0.7, gear_ratio=9.0,
                   linkage_density=2.4e-3)

REGION = OperationalRegion.from_degrees((-35.0, 35.0), (-70.0, 30.0))


def make_task(task_id="walk", n=9, roll_amp_deg=8.0, pitch_amp_deg=14.0,
              tau_scale=1.0):
    # pitch stays in plantarflexion territory; large dorsiflexion plus high
    # torque is exactly where prismatic designs go singular
    t = np.linspace(0.0, 1.0, n)
    roll = np.radians(roll_amp_deg) * np.sin(2.0 * np.pi * t)
    pitch = np.radians(-6.0) + np.radians(pitch_amp_deg) * np.sin(4.0 * np.pi * t + 0.3)
    roll_rate = np.radians(roll_amp_deg) * 2.0 * np.pi * np.cos(2.0 * np.pi * t)
    pitch_rate = np.radians(pitch_amp_deg) * 4.0 * np.pi * np.cos(4.0 * np.pi * t + 0.3)
    tau_roll = tau_scale * 10.0 * np.cos(2.0 * np.pi * t)
    tau_pitch = tau_scale * 25.0 * np.sin(2.0 * np.pi * t + 1.1)
    return TaskTrajectory(task_id, t, roll, pitch, roll_rate, pitch_rate,
                          tau_roll, tau_pitch)


# ---------------------------------------------------------------------------
# config / data validation
# ---------------------------------------------------------------------------

def test_config_rejects_odd_or_tiny_population():
    with pytest.raises(ValueError):
        OptimizerConfig(pop_size=7)
    with pytest.raises(ValueError):
        OptimizerConfig(pop_size=2)
    with pytest.raises(ValueError):
        OptimizerConfig(generations=0)


def test_infeasible_evaluation_requires_violation():
    with pytest.raises(ValueError):
        Evaluation(1.0, 1.0, feasible=False, violation=0.0)
    e = Evaluation(1.0, 2.0, feasible=True)
    assert e.objectives == (1.0, 2.0)


def test_task_trajectory_validation():
    t = np.array([0.0, 0.1, 0.2])
    z = np.zeros(3)
    with pytest.raises(ValueError):
        TaskTrajectory("empty", [], [], [], [], [], [], [])
    with pytest.raises(ValueError):
        TaskTrajectory("short", t, z[:2], z, z, z, z, z)
    with pytest.raises(ValueError):
        TaskTrajectory("nan", t, [0, np.nan, 0], z, z, z, z, z)
    with pytest.raises(ValueError):
        TaskTrajectory("backwards", [0.0, 0.2, 0.1], z, z, z, z, z, z)
    with pytest.raises(ValueError):
        TaskTrajectory("repeat", [0.0, 0.1, 0.1], z, z, z, z, z, z)


def test_samples_outside_region():
    t = np.array([0.0, 1.0, 2.0])
    roll = np.radians([0.0, 34.0, 36.0])
    pitch = np.radians([0.0, -69.0, 0.0])
    z = np.zeros(3)
    task = TaskTrajectory("edge", t, roll, pitch, z, z, z, z)
    assert list(task.samples_outside(REGION)) == [2]
    assert task.n_samples == 3


# ---------------------------------------------------------------------------
# design space
# ---------------------------------------------------------------------------

def test_gene_counts_per_layout():
    assert DesignSpace.default("spu").n_genes == 6
    assert DesignSpace.default("spu", symmetric=False).n_genes == 12
    assert DesignSpace.default("rsu").n_genes == 9
    assert DesignSpace.default("rsu", symmetric=False).n_genes == 18


def test_design_space_bound_validation():
    with pytest.raises(ValueError):
        DesignSpace("spu", np.zeros(6), np.zeros(6))  # hi == lo
    with pytest.raises(ValueError):
        DesignSpace("spu", np.zeros(5), np.ones(5))  # wrong gene count


def test_symmetric_spu_decode_mirrors_leg_one():
    space = DesignSpace.default("spu")
    genes = np.array([-86.0, 40.0, 235.0, -34.0, 36.0, 36.0])
    p = space.decode(genes)
    assert np.array_equal(p.a1, genes[:3])
    assert np.array_equal(p.a2, genes[:3] * [1, -1, 1])
    assert np.array_equal(p.b2, genes[3:] * [1, -1, 1])


def test_symmetric_rsu_decode_negates_yaw():
    space = DesignSpace.default("rsu")
    genes = np.array([-86.0, 40.0, 235.0, -34.0, 36.0, 36.0,
                      -math.pi / 2, 0.3, 0.6])
    free = space.decode(genes)
    assert free.psi[0] == -math.pi / 2
    assert free.psi[1] == math.pi / 2
    assert free.gamma == (0.3, 0.3) and free.delta == (0.6, 0.6)
    assert np.array_equal(free.a2, genes[:3] * [1, -1, 1])


def test_full_rsu_decode_uses_all_genes():
    space = DesignSpace.default("rsu", symmetric=False)
    rng = np.random.default_rng(1)
    genes = space.lo + rng.random(18) * (space.hi - space.lo)
    free = space.decode(genes)
    assert np.array_equal(free.a1, genes[0:3])
    assert np.array_equal(free.b2, genes[9:12])
    assert free.psi == (genes[12], genes[13])


def test_design_vector_coerces_genes():
    v = DesignVector("spu", [1, 2, 3])
    assert v.genes.dtype == float


# ---------------------------------------------------------------------------
# dominance and sorting
# ---------------------------------------------------------------------------

def oracle_dominates(a: Evaluation, b: Evaluation) -> bool:
    # independent restatement of constrained dominance
    if a.feasible != b.feasible:
        return a.feasible
    if not a.feasible:
        return a.violation < b.violation
    if a.f1 > b.f1 or a.f2 > b.f2:
        return False
    return a.f1 < b.f1 or a.f2 < b.f2


def test_sort_hand_case():
    evals = [Evaluation(1.0, 2.0, True), Evaluation(2.0, 1.0, True),
             Evaluation(3.0, 3.0, True)]
    fronts = nondominated_sort(evals)
    assert [list(f) for f in fronts] == [[0, 1], [2]]


def test_sort_identical_points_single_front():
    evals = [Evaluation(1.0, 1.0, True)] * 4
    fronts = nondominated_sort(evals)
    assert len(fronts) == 1 and len(fronts[0]) == 4


def test_feasible_always_beats_infeasible():
    good = Evaluation(100.0, 100.0, True)
    bad = Evaluation(0.0, 0.0, False, violation=1e-6)
    fronts = nondominated_sort([good, bad])
    assert list(fronts[0]) == [0] and list(fronts[1]) == [1]


def test_infeasible_ordered_by_violation():
    a = Evaluation(5.0, 5.0, False, violation=2.0)
    b = Evaluation(9.0, 9.0, False, violation=1.0)
    fronts = nondominated_sort([a, b])
    assert list(fronts[0]) == [1]


def test_sort_matches_peeling_oracle():
    rng = np.random.default_rng(7)
    evals = []
    for _ in range(120):
        if rng.random() < 0.25:
            evals.append(Evaluation(rng.random(), rng.random(), False,
                                    violation=float(rng.random()) + 1e-3))
        else:
            evals.append(Evaluation(float(rng.integers(10)),
                                    float(rng.integers(10)), True))
    fronts = nondominated_sort(evals)

    remaining = set(range(len(evals)))
    for front in fronts:
        expected = {i for i in remaining
                    if not any(oracle_dominates(evals[j], evals[i])
                               for j in remaining if j != i)}
        assert set(front) == expected
        remaining -= expected
    assert not remaining


def test_crowding_small_fronts_all_infinite():
    assert np.all(np.isinf(crowding_distance(np.array([[1.0, 2.0]]))))
    assert np.all(np.isinf(crowding_distance(np.array([[1.0, 2.0], [2.0, 1.0]]))))


def test_crowding_collinear_three_points():
    objs = np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]])
    d = crowding_distance(objs)
    assert math.isinf(d[0]) and math.isinf(d[2])
    # middle point: normalized gap (2-0)/2 per objective, summed over both
    assert d[1] == pytest.approx(2.0, abs=1e-12)


def test_crowding_degenerate_axis_contributes_nothing():
    objs = np.array([[0.0, 5.0], [1.0, 5.0], [2.0, 5.0]])
    d = crowding_distance(objs)
    assert d[1] == pytest.approx(1.0, abs=1e-12)


# ---------------------------------------------------------------------------
# the ankle design problem
# ---------------------------------------------------------------------------

def spu_problem(tasks=None, actuator=LIN, region=REGION):
    return AnkleProblem(space=DesignSpace.default("spu"),
                        tasks=tasks or (make_task(),),
                        actuator=actuator, region=region)


def rsu_problem(tasks=None, actuator=ROT, region=REGION):
    return AnkleProblem(space=DesignSpace.default("rsu"),
                        tasks=tasks or (make_task(),),
                        actuator=actuator, region=region)


REF_SPU_GENES = np.concatenate([A1, B1])
REF_RSU_GENES = np.concatenate([A1, B1, [PSI[0], 0.2, 0.5]])


def test_problem_rejects_bad_inputs():
    with pytest.raises(ValueError):
        AnkleProblem(space=DesignSpace.default("spu"), tasks=(),
                     actuator=LIN, region=REGION)
    with pytest.raises(ValueError):
        AnkleProblem(space=DesignSpace.default("spu"), tasks=(make_task(),),
                     actuator=ROT, region=REGION)
    wide = make_task(roll_amp_deg=50.0)
    with pytest.raises(ValueError):
        spu_problem(tasks=(wide,))


@pytest.mark.parametrize("maker,genes", [
    (spu_problem, REF_SPU_GENES),
    (rsu_problem, REF_RSU_GENES),
], ids=["spu", "rsu"])
def test_objectives_match_per_sample_oracle(maker, genes):
    problem = maker()
    ev = problem.evaluate(genes)
    params = problem.realized(genes)
    scale = 1000.0 if problem.arch == "spu" else 1.0

    worst_effort = 0.0
    worst_rate = 0.0
    for task in problem.tasks:
        for k in range(task.n_samples):
            G = actuation_gradient(problem.arch, params,
                                   task.roll[k], task.pitch[k])
            tau = np.linalg.solve(G.T, scale * np.array([task.tau_roll[k],
                                                         task.tau_pitch[k]]))
            qdot = G @ np.array([task.roll_rate[k], task.pitch_rate[k]])
            worst_effort = max(worst_effort, float(np.max(np.abs(tau))))
            worst_rate = max(worst_rate, float(np.max(np.abs(qdot))))
    assert ev.f1 == pytest.approx(worst_effort, rel=1e-12)
    assert ev.f2 == pytest.approx(worst_rate, rel=1e-12)
    assert ev.feasible


def test_reference_geometry_is_feasible_for_both_architectures():
    assert spu_problem().evaluate(REF_SPU_GENES).violation == 0.0
    assert rsu_problem().evaluate(REF_RSU_GENES).violation == 0.0


def test_task_order_and_splitting_do_not_change_objectives():
    t1 = make_task("a", tau_scale=1.0)
    t2 = make_task("b", n=7, roll_amp_deg=6.0, tau_scale=1.4)
    ev_ab = spu_problem(tasks=(t1, t2)).evaluate(REF_SPU_GENES)
    ev_ba = spu_problem(tasks=(t2, t1)).evaluate(REF_SPU_GENES)
    assert ev_ab == ev_ba

    whole = make_task("w", n=13)
    half1 = TaskTrajectory("h1", whole.t[:7], whole.roll[:7], whole.pitch[:7],
                           whole.roll_rate[:7], whole.pitch_rate[:7],
                           whole.tau_roll[:7], whole.tau_pitch[:7])
    half2 = TaskTrajectory("h2", whole.t[7:], whole.roll[7:], whole.pitch[7:],
                           whole.roll_rate[7:], whole.pitch_rate[7:],
                           whole.tau_roll[7:], whole.tau_pitch[7:])
    ev_whole = spu_problem(tasks=(whole,)).evaluate(REF_SPU_GENES)
    ev_split = spu_problem(tasks=(half1, half2)).evaluate(REF_SPU_GENES)
    assert ev_whole.f1 == ev_split.f1 and ev_whole.f2 == ev_split.f2


def test_static_task_has_zero_objectives():
    t = np.array([0.0, 1.0])
    z = np.zeros(2)
    static = TaskTrajectory("hold", t, z, z, z, z, z, z)
    ev = spu_problem(tasks=(static,)).evaluate(REF_SPU_GENES)
    assert ev.f1 == 0.0 and ev.f2 == 0.0 and ev.feasible


def test_stroke_shortfall_is_penalized():
    cramped = ActuatorSpec(name="tiny", kind="linear", nominal_speed=120.0,
                           nominal_effort=900.0, peak_speed=200.0,
                           peak_effort=1500.0, static_friction=4.0,
                           mass=0.85, stroke=5.0)
    ev = spu_problem(actuator=cramped).evaluate(REF_SPU_GENES)
    assert not ev.feasible and ev.violation > 0.0

    zeta = spu_leg_lengths(spu_problem().realized(REF_SPU_GENES).a,
                           spu_problem().realized(REF_SPU_GENES).b,
                           *REGION.grid_flat())
    swing = float(zeta.max() - zeta.min())
    assert swing > 5.0  # confirms the premise


def test_leg_collision_is_penalized():
    lo = DesignSpace.default("spu").lo.copy()
    hi = DesignSpace.default("spu").hi.copy()
    lo[4] = 5.0  # allow platform anchors close to the sagittal plane
    space = DesignSpace("spu", lo, hi)
    problem = AnkleProblem(space=space, tasks=(make_task(),),
                           actuator=LIN, region=REGION)
    genes = REF_SPU_GENES.copy()
    genes[4] = 6.0  # anchors 12 mm apart, under the 20 mm clearance floor
    ev = problem.evaluate(genes)
    assert not ev.feasible
    assert ev.violation >= (20.0 - 12.0) / 20.0 - 1e-12


def test_unrealizable_geometry_gets_hard_violation():
    problem = rsu_problem()
    genes = REF_RSU_GENES.copy()
    genes[7:9] = [0.85, 0.0]  # big crank, shortest rod: rod ends up < crank
    ev = problem.evaluate(genes)
    assert not ev.feasible
    assert math.isinf(ev.f1) and math.isinf(ev.f2)
    assert ev.violation >= 100.0


def test_effort_rating_excess_is_penalized():
    weak = ActuatorSpec(name="weak", kind="linear", nominal_speed=120.0,
                        nominal_effort=10.0, peak_speed=200.0,
                        peak_effort=20.0, static_friction=4.0,
                        mass=0.85, stroke=120.0)
    ev = spu_problem(actuator=weak).evaluate(REF_SPU_GENES)
    assert not ev.feasible
    assert ev.f1 > 20.0
    assert ev.violation >= (ev.f1 - 20.0) / 20.0 - 1e-12


# ---------------------------------------------------------------------------
# full NSGA-II runs
# ---------------------------------------------------------------------------

class Diagonal:
    """Analytic benchmark: minimize (x, 1-x) over x in [0, 1]. The true
    Pareto front is the whole segment, so coverage is easy to score."""

    lo = np.array([0.0])
    hi = np.array([1.0])
    arch = "spu"

    def evaluate(self, genes) -> Evaluation:
        x = float(genes[0])
        return Evaluation(x, 1.0 - x, feasible=True)


def hypervolume(points, ref=(1.1, 1.1)):
    pts = sorted(set(map(tuple, points)))
    nd = []
    best = math.inf
    for f1, f2 in pts:
        if f2 < best:
            nd.append((f1, f2))
            best = f2
    hv = 0.0
    for i, (f1, f2) in enumerate(nd):
        nxt = nd[i + 1][0] if i + 1 < len(nd) else ref[0]
        hv += (nxt - f1) * (ref[1] - f2)
    return hv


IDEAL_DIAGONAL_HV = 0.71  # continuous front f2 = 1 - f1 against ref (1.1, 1.1)


def test_diagonal_front_coverage():
    front = nsga2(Diagonal(), OptimizerConfig(pop_size=100, generations=100,
                                              seed=3))
    pts = [e.objectives for e in front.evaluations]
    assert hypervolume(pts) / IDEAL_DIAGONAL_HV >= 0.99
    f1s = [p[0] for p in pts]
    assert min(f1s) < 0.01 and max(f1s) > 0.99
    assert f1s == sorted(f1s)  # front is returned in ascending f1 order


def test_front_is_mutually_nondominated():
    front = nsga2(Diagonal(), OptimizerConfig(pop_size=20, generations=20,
                                              seed=11))
    evs = front.evaluations
    for i in range(len(evs)):
        for j in range(len(evs)):
            if i != j:
                assert not oracle_dominates(evs[i], evs[j])


def test_seeded_runs_are_bit_identical():
    cfg = OptimizerConfig(pop_size=20, generations=12, seed=5)
    a = nsga2(Diagonal(), cfg)
    b = nsga2(Diagonal(), cfg)
    assert len(a) == len(b)
    for da, db in zip(a.designs, b.designs):
        assert np.array_equal(da.genes, db.genes)
    assert a.evaluations == b.evaluations


def test_elitism_keeps_best_objectives_monotone():
    history = []
    nsga2(Diagonal(), OptimizerConfig(pop_size=16, generations=30, seed=2),
          progress=lambda gen, f1, f2, nf: history.append((f1, f2, nf)))
    assert len(history) == 30
    f1s = [h[0] for h in history]
    f2s = [h[1] for h in history]
    assert all(b <= a + 1e-15 for a, b in zip(f1s, f1s[1:]))
    assert all(b <= a + 1e-15 for a, b in zip(f2s, f2s[1:]))
    assert all(h[2] == 16 for h in history)


class Hopeless:
    """Every candidate infeasible; violation shrinks with the gene."""

    lo = np.array([0.1])
    hi = np.array([1.0])
    arch = "spu"

    def evaluate(self, genes) -> Evaluation:
        x = float(genes[0])
        return Evaluation(x, x, feasible=False, violation=x)


def test_no_feasible_design_raises_with_diagnostics():
    with pytest.raises(NoFeasibleFound) as info:
        nsga2(Hopeless(), OptimizerConfig(pop_size=8, generations=4, seed=0))
    best = info.value.best_infeasible
    assert 0 < len(best) <= 5
    violations = [ev.violation for _, ev in best]
    assert violations == sorted(violations)
    assert all(v > 0.0 for v in violations)


def test_constant_objective_still_returns_front():
    class Flat:
        lo = np.array([0.0])
        hi = np.array([1.0])
        arch = "spu"

        def evaluate(self, genes) -> Evaluation:
            return Evaluation(float(genes[0]), 7.0, feasible=True)

    front = nsga2(Flat(), OptimizerConfig(pop_size=8, generations=6, seed=1))
    # with f2 constant the front collapses to the single best f1
    assert len(front) >= 1
    assert all(e.f2 == 7.0 for e in front.evaluations)
    best_f1 = front.evaluations[0].f1
    assert all(e.f1 == best_f1 for e in front.evaluations)


def test_spu_search_smoke():
    front = nsga2(spu_problem(),
                  OptimizerConfig(pop_size=8, generations=5, seed=0))
    assert len(front) >= 1
    assert all(e.feasible for e in front.evaluations)
    assert all(e.f1 <= LIN.peak_effort for e in front.evaluations)
    assert all(e.f2 <= LIN.peak_speed for e in front.evaluations)
    assert all(d.arch == "spu" and d.genes.shape == (6,) for d in front.designs)


def test_rsu_search_smoke_and_region_guarantee():
    problem = rsu_problem()
    front = nsga2(problem, OptimizerConfig(pop_size=8, generations=5, seed=0))
    assert len(front) >= 1
    assert all(e.feasible for e in front.evaluations)
    # every surviving design must solve the IK everywhere on the region grid
    for design in front.designs:
        params = problem.realized(design.genes)
        ok, witness = configuration_space_scan(params, REGION).contained(REGION)
        assert ok, f"IK hole at {witness}"
