"""Elementary rotations and the ankle orientation convention.

Conventions used throughout the toolkit:
  - world frame W on the shin, foot frame F on the foot;
  - foot orientation given by roll/pitch (phi, theta), with the world-from-foot
    rotation R(phi, theta) = Ry(theta) @ Rx(phi);
  - millimeters and radians everywhere inside the library (degrees only at
    file and CLI boundaries).

Rotation builders broadcast over numpy arrays of angles, returning stacked
(..., 3, 3) matrices, so grid scans stay vectorized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

ORTHONORMAL_TOL = 1e-12


def _stack33(shape, entries):
    out = np.empty(shape + (3, 3))
    for (i, j), value in entries.items():
        out[..., i, j] = value
    return out


def rot_x(angle):
    """Rotation about x. Accepts scalars or arrays, returns (..., 3, 3)."""
    angle = np.asarray(angle, dtype=float)
    c, s = np.cos(angle), np.sin(angle)
    return _stack33(angle.shape, {
        (0, 0): 1.0, (0, 1): 0.0, (0, 2): 0.0,
        (1, 0): 0.0, (1, 1): c, (1, 2): -s,
        (2, 0): 0.0, (2, 1): s, (2, 2): c,
    })


def rot_y(angle):
    angle = np.asarray(angle, dtype=float)
    c, s = np.cos(angle), np.sin(angle)
    return _stack33(angle.shape, {
        (0, 0): c, (0, 1): 0.0, (0, 2): s,
        (1, 0): 0.0, (1, 1): 1.0, (1, 2): 0.0,
        (2, 0): -s, (2, 1): 0.0, (2, 2): c,
    })


def rot_z(angle):
    angle = np.asarray(angle, dtype=float)
    c, s = np.cos(angle), np.sin(angle)
    return _stack33(angle.shape, {
        (0, 0): c, (0, 1): -s, (0, 2): 0.0,
        (1, 0): s, (1, 1): c, (1, 2): 0.0,
        (2, 0): 0.0, (2, 1): 0.0, (2, 2): 1.0,
    })


def foot_rotation(phi, theta):
    """World-from-foot rotation Ry(theta) @ Rx(phi), broadcasting over angles."""
    phi, theta = np.broadcast_arrays(np.asarray(phi, float), np.asarray(theta, float))
    cp, sp = np.cos(phi), np.sin(phi)
    ct, st = np.cos(theta), np.sin(theta)
    return _stack33(phi.shape, {
        (0, 0): ct, (0, 1): st * sp, (0, 2): st * cp,
        (1, 0): 0.0, (1, 1): cp, (1, 2): -sp,
        (2, 0): -st, (2, 1): ct * sp, (2, 2): ct * cp,
    })


def foot_rotation_dphi(phi, theta):
    """d/dphi of foot_rotation."""
    phi, theta = np.broadcast_arrays(np.asarray(phi, float), np.asarray(theta, float))
    cp, sp = np.cos(phi), np.sin(phi)
    ct, st = np.cos(theta), np.sin(theta)
    return _stack33(phi.shape, {
        (0, 0): 0.0, (0, 1): st * cp, (0, 2): -st * sp,
        (1, 0): 0.0, (1, 1): -sp, (1, 2): -cp,
        (2, 0): 0.0, (2, 1): ct * cp, (2, 2): -ct * sp,
    })


def foot_rotation_dtheta(phi, theta):
    """d/dtheta of foot_rotation."""
    phi, theta = np.broadcast_arrays(np.asarray(phi, float), np.asarray(theta, float))
    cp, sp = np.cos(phi), np.sin(phi)
    ct, st = np.cos(theta), np.sin(theta)
    return _stack33(phi.shape, {
        (0, 0): -st, (0, 1): ct * sp, (0, 2): ct * cp,
        (1, 0): 0.0, (1, 1): 0.0, (1, 2): 0.0,
        (2, 0): -ct, (2, 1): -st * sp, (2, 2): -st * cp,
    })


def is_rotation(matrix, tol: float = ORTHONORMAL_TOL) -> bool:
    """True when matrix is orthonormal with determinant +1 within tol."""
    matrix = np.asarray(matrix, dtype=float)
    if matrix.shape != (3, 3):
        return False
    if not np.allclose(matrix.T @ matrix, np.eye(3), atol=tol, rtol=0.0):
        return False
    return abs(np.linalg.det(matrix) - 1.0) <= tol


def wrap_angle(angle: float) -> float:
    """Wrap an angle to the half-open interval (-pi, pi]."""
    a = math.fmod(angle + math.pi, 2.0 * math.pi)
    if a <= 0.0:
        a += 2.0 * math.pi
    return a - math.pi


@dataclass(frozen=True)
class FootOrientation:
    """Roll/pitch pair defining the foot pose relative to the shin.

    Single-cover convention: |roll|, |pitch| < pi.
    """

    roll: float
    pitch: float

    def __post_init__(self):
        if not (math.isfinite(self.roll) and math.isfinite(self.pitch)):
            raise ValueError("foot orientation angles must be finite")
        if abs(self.roll) >= math.pi or abs(self.pitch) >= math.pi:
            raise ValueError("foot orientation angles must satisfy |angle| < pi")

    @classmethod
    def from_degrees(cls, roll_deg: float, pitch_deg: float) -> "FootOrientation":
        return cls(math.radians(roll_deg), math.radians(pitch_deg))

    def rotation(self) -> np.ndarray:
        return foot_rotation(self.roll, self.pitch)

    def as_tuple(self) -> tuple[float, float]:
        return (self.roll, self.pitch)
