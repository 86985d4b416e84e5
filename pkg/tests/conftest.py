import math

import numpy as np
import pytest

from ankleopt.mechkin import RsuParams, SpuParams
from ankleopt.regions import OperationalRegion
from ankleopt.reparam import RsuFreeParams, realize

# Reference symmetric geometry used across the suite (anchors in mm).
A1 = np.array([-86.0, 40.0, 235.0])
A2 = np.array([-86.0, -40.0, 235.0])
B1 = np.array([-34.0, 36.0, 36.0])
B2 = np.array([-34.0, -36.0, 36.0])
PSI = (math.radians(-90.0), math.radians(90.0))


@pytest.fixture
def ref_spu() -> SpuParams:
    return SpuParams(A1, A2, B1, B2)


@pytest.fixture
def ref_rsu() -> RsuParams:
    """Realized over +/-30 deg with mid-range gamma/delta, so every test pose
    inside that region is comfortably reachable."""
    free = RsuFreeParams(A1, A2, B1, B2, PSI, gamma=(0.2, 0.2), delta=(0.5, 0.5))
    return realize(free, OperationalRegion.symmetric_deg(30.0, grid_step_deg=2.0))


def random_spu(rng: np.random.Generator) -> SpuParams:
    """Random well-separated SPU geometry in the reference size envelope."""
    a_base = np.array([rng.uniform(-120, -40), rng.uniform(20, 80), rng.uniform(180, 280)])
    b_base = np.array([rng.uniform(-60, -10), rng.uniform(15, 60), rng.uniform(15, 60)])
    mirror = np.array([1.0, -1.0, 1.0])
    return SpuParams(a_base, a_base * mirror, b_base, b_base * mirror)


def random_rsu(rng: np.random.Generator, region: OperationalRegion,
               gamma_range=(0.15, 0.6), delta_range=(0.0, 1.0)) -> RsuParams:
    """Random RSU geometry realized over ``region`` (feasible by construction)."""
    a_base = np.array([rng.uniform(-120, -40), rng.uniform(25, 80), rng.uniform(180, 280)])
    b_base = np.array([rng.uniform(-60, -10), rng.uniform(20, 60), rng.uniform(15, 60)])
    mirror = np.array([1.0, -1.0, 1.0])
    psi = rng.uniform(-math.pi / 2 - 0.4, -math.pi / 2 + 0.4)
    g = rng.uniform(*gamma_range)
    d = rng.uniform(*delta_range)
    free = RsuFreeParams(a_base, a_base * mirror, b_base, b_base * mirror,
                         (psi, -psi), gamma=(g, g), delta=(d, d))
    return realize(free, region)
