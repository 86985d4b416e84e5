"""Design-optimization toolkit for two-DoF parallel ankle mechanisms.

Synthesizes and ranks SPU (spherical-prismatic-universal) and RSU
(revolute-spherical-universal) ankle mechanisms: closed-form inverse
kinematics, a feasibility-guaranteeing crank/rod reparameterization,
task-driven multi-objective geometry search, and a region-weighted scalar
cost for cross-architecture comparison.
"""

__version__ = "0.1.0"

BUNDLE_SCHEMA_VERSION = 1
