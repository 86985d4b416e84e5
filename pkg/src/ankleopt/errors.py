"""Exception types shared across the toolkit.

Every domain failure raises a subclass of :class:`AnkleOptError`; callers
that must traverse infeasible space (the optimizer) encode infeasibility in
values instead of catching broad exceptions.
"""

from __future__ import annotations


class AnkleOptError(Exception):
    """Base class for all toolkit errors."""


class Unreachable(AnkleOptError):
    """RSU existence condition violated: the leg cannot close at this pose.

    ``excess`` is |k/rho| - 1, the magnitude of the violation.
    """

    def __init__(self, leg: int, excess: float):
        self.leg = leg
        self.excess = excess
        super().__init__(f"leg {leg} cannot close: |k/rho| exceeds 1 by {excess:.3e}")


class Singular(AnkleOptError):
    """Kinematic singularity: the actuator-to-ankle map is rank deficient."""

    def __init__(self, det: float, message: str = "singular configuration"):
        self.det = det
        super().__init__(f"{message} (normalized |det| = {abs(det):.3e})")


class NoConvergence(AnkleOptError):
    """Iterative forward kinematics failed to converge."""

    def __init__(self, iterations: int, residual: float):
        self.iterations = iterations
        self.residual = residual
        super().__init__(
            f"no convergence after {iterations} iterations (residual {residual:.3e})"
        )


class DegenerateGeometry(AnkleOptError):
    """No finite crank can work: ||d|| or rho vanishes somewhere on the grid."""

    def __init__(self, leg: int, message: str):
        self.leg = leg
        super().__init__(f"leg {leg}: {message}")


class EmptyInterval(AnkleOptError):
    """Rod-length interval is empty; the crank violates its lower bound."""

    def __init__(self, leg: int, r_min: float, r_max: float):
        self.leg = leg
        self.r_min = r_min
        self.r_max = r_max
        super().__init__(
            f"leg {leg}: rod interval empty (r_min {r_min:.6g} > r_max {r_max:.6g}); "
            "crank below its admissible minimum, refine the grid"
        )


class RealizationInfeasible(AnkleOptError):
    """Realized crank/rod pair violates the rod-longer-than-crank invariant."""

    def __init__(self, leg: int, crank: float, rod: float):
        self.leg = leg
        self.crank = crank
        self.rod = rod
        super().__init__(
            f"leg {leg}: realized rod {rod:.6g} mm not longer than crank {crank:.6g} mm"
        )


class InvalidRegions(AnkleOptError):
    """Core region is not contained in the extended region."""


class AllZeroWeights(AnkleOptError):
    """Weighted aggregation received a weight field summing to zero."""


class MissingSpec(AnkleOptError):
    """An actuator specification required by a metric is absent."""


class BadWeights(AnkleOptError):
    """Cost weights are negative or do not sum to one."""


class NoFeasibleFound(AnkleOptError):
    """Optimizer finished with zero feasible individuals.

    Carries the lowest-violation individuals for diagnosis.
    """

    def __init__(self, best_infeasible):
        self.best_infeasible = best_infeasible
        super().__init__(
            f"no feasible design found; best violation "
            f"{best_infeasible[0][1].violation:.4g}" if best_infeasible else
            "no feasible design found"
        )


class SchemaError(AnkleOptError):
    """A loaded file violates its schema; message carries the field path."""

    def __init__(self, path: str, message: str):
        self.field_path = path
        super().__init__(f"{path}: {message}")


class NonMonotoneTime(SchemaError):
    def __init__(self, path: str, index: int):
        self.index = index
        super().__init__(path, f"time not strictly increasing at row {index}")


class MissingColumn(SchemaError):
    def __init__(self, path: str, column: str):
        self.column = column
        super().__init__(path, f"missing required column '{column}'")


class VersionMismatch(AnkleOptError):
    """Bundle schema version is not supported by this tool."""


class CorruptBundle(AnkleOptError):
    """Bundle file is truncated or not valid JSON."""


class IncompatibleBundles(AnkleOptError):
    """Bundles to be merged were produced under different configurations."""
