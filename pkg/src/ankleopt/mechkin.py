"""Kinematics of the SPU and RSU two-DoF parallel ankle mechanisms.

Both mechanisms connect shin (world frame W) and foot (frame F) through a
central universal joint U0 plus two actuated legs i = 1, 2:

  SPU leg: spherical joint S_i on the shin, prismatic actuator (elongation
           zeta_i), universal joint U_i on the foot;
  RSU leg: revolute actuator R_i on the shin (angle alpha_i, axis yawed by
           psi_i about world z), crank of length c_i, spherical joint S_i,
           rod of length r_i, universal joint U_i on the foot.

Constant geometry: a_i locates the shin-side joint (S_i for SPU, R_i for RSU)
in world coordinates; b_i locates U_i in foot coordinates. The leg vector
d_i(phi, theta) = a_i - R(phi, theta) b_i drives every closed form here.

Closed-form inverse kinematics:
  SPU:  zeta_i = +sqrt(||a_i||^2 + ||b_i||^2 - 2 a_i^T R b_i)   (positive
        branch; the negative one would elongate into the foot);
  RSU:  rho_i sin(alpha_i + phi_i) = k_i with
        k_i   = (r_i^2 - c_i^2 - ||d_i||^2) / (2 c_i ||d_i||),
        dtilde= Rz(psi_i)^T dhat_i,  rho_i = hypot(dtilde_y, dtilde_z),
        phi_i = atan2(dtilde_y, dtilde_z),
        solvable iff |k_i / rho_i| <= 1 (equivalently
        |r^2 - c^2 - ||d||^2| <= 2 c ||d|| rho), two branches:
        alpha = -phi_i + asin(k/rho)  or  alpha = -phi_i + pi - asin(k/rho).

All heavy paths are vectorized over arrays of (phi, theta); scalar wrappers
implement the documented error contracts. Units: mm and radians.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Optional, Union

import numpy as np

from .errors import NoConvergence, Singular, Unreachable
from .geometry import (
    FootOrientation,
    foot_rotation,
    foot_rotation_dphi,
    foot_rotation_dtheta,
    wrap_angle,
)

Architecture = Literal["spu", "rsu"]
BranchChoice = Literal["primary", "secondary"]

BRANCHES: tuple[BranchChoice, ...] = ("primary", "secondary")

# |k/rho| may exceed 1 by floating-point dust exactly at the reachability
# boundary (reparameterized designs are built to touch it); clamp within this.
RATIO_CLAMP_TOL = 1e-9

DET_TOL = 1e-12


def _vec3(v) -> np.ndarray:
    arr = np.asarray(v, dtype=float).reshape(3)
    if not np.all(np.isfinite(arr)):
        raise ValueError("geometry vectors must be finite")
    return arr


@dataclass(frozen=True)
class SpuParams:
    """SPU geometry: shin anchors a_i (world), foot anchors b_i (foot frame),
    and per-leg prismatic stroke limits [mm]."""

    a1: np.ndarray
    a2: np.ndarray
    b1: np.ndarray
    b2: np.ndarray
    zeta_min: tuple[float, float] = (0.0, 0.0)
    zeta_max: tuple[float, float] = (math.inf, math.inf)

    def __post_init__(self):
        for name in ("a1", "a2", "b1", "b2"):
            object.__setattr__(self, name, _vec3(getattr(self, name)))
        for i, (a, b) in enumerate(((self.a1, self.b1), (self.a2, self.b2)), start=1):
            if np.linalg.norm(a - b) <= 0.0:
                raise ValueError(f"leg {i}: coincident anchors give zero neutral length")
        for i in range(2):
            if self.zeta_min[i] < 0.0:
                raise ValueError("stroke lower limit must be non-negative")
            if not self.zeta_max[i] > self.zeta_min[i]:
                raise ValueError("stroke upper limit must exceed lower limit")

    @property
    def a(self) -> np.ndarray:
        return np.stack([self.a1, self.a2])

    @property
    def b(self) -> np.ndarray:
        return np.stack([self.b1, self.b2])


@dataclass(frozen=True)
class RsuParams:
    """RSU geometry: anchors as in SPU plus actuator-axis yaw psi_i [rad],
    crank length c_i [mm] and rod length r_i [mm] per leg."""

    a1: np.ndarray
    a2: np.ndarray
    b1: np.ndarray
    b2: np.ndarray
    psi: tuple[float, float] = (0.0, 0.0)
    crank: tuple[float, float] = (1.0, 1.0)
    rod: tuple[float, float] = (2.0, 2.0)

    def __post_init__(self):
        for name in ("a1", "a2", "b1", "b2"):
            object.__setattr__(self, name, _vec3(getattr(self, name)))
        for i in range(2):
            c, r = self.crank[i], self.rod[i]
            if not (c > 0.0 and r > 0.0):
                raise ValueError(f"leg {i + 1}: crank and rod lengths must be positive")
            if not r > c:
                raise ValueError(
                    f"leg {i + 1}: rod ({r:.6g}) must exceed crank ({c:.6g}) so the "
                    "closed leg cannot collapse to a point"
                )

    @property
    def a(self) -> np.ndarray:
        return np.stack([self.a1, self.a2])

    @property
    def b(self) -> np.ndarray:
        return np.stack([self.b1, self.b2])


MechanismParams = Union[SpuParams, RsuParams]


@dataclass(frozen=True)
class JointSolution:
    """Actuator coordinates: zeta_i [mm] for SPU, alpha_i [rad] for RSU."""

    q: np.ndarray
    branch: tuple[BranchChoice, BranchChoice] = ("primary", "primary")

    def __post_init__(self):
        object.__setattr__(self, "q", np.asarray(self.q, dtype=float).reshape(2))


@dataclass(frozen=True)
class AnkleJacobian:
    """2x2 map from actuator rates to ankle Euler-angle rates (phi_dot, theta_dot).

    Rates are Euler-angle rates of the roll/pitch parameterization, not body
    angular velocity; the two differ away from the neutral pose. Also carries
    the normalized determinant of the inverse map for diagnostics.
    """

    J: np.ndarray
    config: FootOrientation
    det_normalized: float = field(default=float("nan"))

    def __post_init__(self):
        object.__setattr__(self, "J", np.asarray(self.J, dtype=float).reshape(2, 2))


# ---------------------------------------------------------------------------
# vectorized kernels (broadcast over arrays of phi / theta)
# ---------------------------------------------------------------------------

def leg_vector(a: np.ndarray, b: np.ndarray, phi, theta) -> np.ndarray:
    """d = a - R(phi, theta) b in world coordinates, shape (..., 3)."""
    R = foot_rotation(phi, theta)
    return a - R @ b


def spu_leg_lengths(a_legs: np.ndarray, b_legs: np.ndarray, phi, theta) -> np.ndarray:
    """Closed-form zeta for each leg, shape (..., 2). Total for finite inputs."""
    R = foot_rotation(phi, theta)
    # a^T R b per leg; radicand equals ||d||^2 >= 0, clamp fp dust.
    aRb = np.einsum("li,...ij,lj->...l", a_legs, R, b_legs)
    rad = (np.einsum("li,li->l", a_legs, a_legs)
           + np.einsum("li,li->l", b_legs, b_legs) - 2.0 * aRb)
    return np.sqrt(np.maximum(rad, 0.0))


def rsu_polar_terms(a: np.ndarray, b: np.ndarray, psi: float, phi, theta):
    """Per-leg ingredients of the polar-form equation.

    Returns (nd, rho, phi_pol) where nd = ||d||, rho and phi_pol come from
    dtilde = Rz(psi)^T dhat. Shapes broadcast over (phi, theta).
    """
    d = leg_vector(a, b, phi, theta)
    nd = np.linalg.norm(d, axis=-1)
    safe_nd = np.where(nd > 0.0, nd, 1.0)
    dhat = d / safe_nd[..., None]
    cpsi, spsi = math.cos(psi), math.sin(psi)
    ty = -spsi * dhat[..., 0] + cpsi * dhat[..., 1]
    tz = dhat[..., 2]
    rho = np.hypot(ty, tz)
    phi_pol = np.arctan2(ty, tz)
    return nd, rho, phi_pol


def rsu_ratio_grid(params: RsuParams, phi, theta) -> np.ndarray:
    """Existence ratio k_i / rho_i per leg, shape (..., 2).

    |ratio| <= 1 means the leg can close; 1 - |ratio| is the solvability
    margin reported by configuration-space scans.
    """
    out = []
    for i in range(2):
        nd, rho, _ = rsu_polar_terms(params.a[i], params.b[i], params.psi[i], phi, theta)
        c, r = params.crank[i], params.rod[i]
        k = (r * r - c * c - nd * nd) / (2.0 * c * np.where(nd > 0.0, nd, np.nan))
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = k / np.where(rho > 0.0, rho, np.nan)
        out.append(ratio)
    return np.stack(out, axis=-1)


def rsu_angles_grid(params: RsuParams, phi, theta,
                    branch: BranchChoice = "primary"):
    """Vectorized RSU IK. Returns (alpha, ratio) with alpha NaN where the
    existence condition fails beyond RATIO_CLAMP_TOL."""
    alphas = []
    ratios = []
    for i in range(2):
        nd, rho, phi_pol = rsu_polar_terms(params.a[i], params.b[i], params.psi[i],
                                           phi, theta)
        c, r = params.crank[i], params.rod[i]
        k = (r * r - c * c - nd * nd) / (2.0 * c * np.where(nd > 0.0, nd, np.nan))
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = k / np.where(rho > 0.0, rho, np.nan)
        clamped = np.clip(ratio, -1.0, 1.0)
        ok = np.abs(ratio) <= 1.0 + RATIO_CLAMP_TOL
        asin = np.arcsin(np.where(ok, clamped, np.nan))
        if branch == "primary":
            alpha = -phi_pol + asin
        elif branch == "secondary":
            alpha = -phi_pol + math.pi - asin
        else:
            raise ValueError(f"unknown branch {branch!r}")
        alpha = np.where(ok, alpha, np.nan)
        # normalize to (-pi, pi]
        alpha = np.mod(alpha + math.pi, 2.0 * math.pi)
        alpha = np.where(alpha <= 0.0, alpha + 2.0 * math.pi, alpha) - math.pi
        alphas.append(alpha)
        ratios.append(ratio)
    return np.stack(alphas, axis=-1), np.stack(ratios, axis=-1)


def rsu_crank_vector(psi: float, crank: float, alpha) -> np.ndarray:
    """World crank vector Rz(psi) Rx(alpha) [0, c, 0]^T, broadcasting over alpha."""
    alpha = np.asarray(alpha, dtype=float)
    ca, sa = np.cos(alpha), np.sin(alpha)
    cpsi, spsi = math.cos(psi), math.sin(psi)
    return np.stack([-spsi * crank * ca, cpsi * crank * ca, crank * sa], axis=-1)


def _rsu_crank_vector_dalpha(psi: float, crank: float, alpha) -> np.ndarray:
    alpha = np.asarray(alpha, dtype=float)
    ca, sa = np.cos(alpha), np.sin(alpha)
    cpsi, spsi = math.cos(psi), math.sin(psi)
    return np.stack([spsi * crank * sa, -cpsi * crank * sa, crank * ca], axis=-1)


def actuation_gradient(arch: Architecture, params: MechanismParams, phi, theta,
                       q=None, branch: BranchChoice = "primary") -> np.ndarray:
    """G = d q / d(phi, theta), shape (..., 2, 2), by implicit differentiation
    of the squared loop-closure equations.

    For RSU, ``q`` (the actuator angles at the poses, shape (..., 2)) may be
    supplied to pin the branch; otherwise it is recomputed with ``branch``.
    Entries are NaN where the pose is unreachable or exactly degenerate.
    """
    Rp = foot_rotation_dphi(phi, theta)
    Rt = foot_rotation_dtheta(phi, theta)
    if arch == "spu":
        zet = spu_leg_lengths(params.a, params.b, phi, theta) if q is None \
            else np.asarray(q, dtype=float)
        rows = []
        for i in range(2):
            a, b = params.a[i], params.b[i]
            # 2 zeta dzeta = -2 a^T dR b  =>  dzeta/dx = -(a^T dR b) / zeta
            gphi = -np.einsum("i,...ij,j->...", a, Rp, b)
            gtheta = -np.einsum("i,...ij,j->...", a, Rt, b)
            with np.errstate(divide="ignore", invalid="ignore"):
                z = zet[..., i]
                rows.append(np.stack([gphi / z, gtheta / z], axis=-1))
        return np.stack(rows, axis=-2)
    if arch == "rsu":
        if q is None:
            alpha, _ = rsu_angles_grid(params, phi, theta, branch)
        else:
            alpha = np.asarray(q, dtype=float)
        rows = []
        for i in range(2):
            a, b = params.a[i], params.b[i]
            d = leg_vector(a, b, phi, theta)
            cv = rsu_crank_vector(params.psi[i], params.crank[i], alpha[..., i])
            cvp = _rsu_crank_vector_dalpha(params.psi[i], params.crank[i], alpha[..., i])
            rod_vec = d + cv
            ddphi = -(Rp @ b)
            ddtheta = -(Rt @ b)
            denom = np.einsum("...i,...i->...", d, cvp)
            gphi = -np.einsum("...i,...i->...", rod_vec, ddphi)
            gtheta = -np.einsum("...i,...i->...", rod_vec, ddtheta)
            with np.errstate(divide="ignore", invalid="ignore"):
                rows.append(np.stack([gphi / denom, gtheta / denom], axis=-1))
        return np.stack(rows, axis=-2)
    raise ValueError(f"unknown architecture {arch!r}")


def gradient_row_scales(arch: Architecture, params: MechanismParams, q) -> np.ndarray:
    """Row normalization for the singularity test: SPU rows carry mm/rad and
    are scaled by the leg length; RSU rows are already dimensionless."""
    q = np.asarray(q, dtype=float)
    if arch == "spu":
        return np.maximum(q, 1e-9)
    return np.ones_like(q)


def det2(m: np.ndarray) -> np.ndarray:
    return m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]


def inv2(m: np.ndarray) -> np.ndarray:
    """Inverse of stacked 2x2 matrices (no singularity guard)."""
    d = det2(m)
    out = np.empty_like(m)
    out[..., 0, 0] = m[..., 1, 1]
    out[..., 0, 1] = -m[..., 0, 1]
    out[..., 1, 0] = -m[..., 1, 0]
    out[..., 1, 1] = m[..., 0, 0]
    with np.errstate(divide="ignore", invalid="ignore"):
        return out / d[..., None, None]


# ---------------------------------------------------------------------------
# scalar operations
# ---------------------------------------------------------------------------

def ik_spu(params: SpuParams, pose: FootOrientation) -> JointSolution:
    """Closed-form SPU inverse kinematics (positive-elongation branch).

    Total for finite inputs; stroke limits are deliberately not enforced here
    (feasibility checks compare against them separately).
    """
    zeta = spu_leg_lengths(params.a, params.b, pose.roll, pose.pitch)
    return JointSolution(q=zeta, branch=("primary", "primary"))


def ik_rsu(params: RsuParams, pose: FootOrientation,
           branch: BranchChoice = "primary") -> JointSolution:
    """Closed-form RSU inverse kinematics on the requested branch.

    Raises Unreachable (with the violation magnitude) when the existence
    condition |k/rho| <= 1 fails for either leg.
    """
    alpha, ratio = rsu_angles_grid(params, pose.roll, pose.pitch, branch)
    for i in range(2):
        if not np.isfinite(ratio[..., i]):
            raise Unreachable(leg=i + 1, excess=math.inf)
        excess = abs(float(ratio[..., i])) - 1.0
        if excess > RATIO_CLAMP_TOL:
            raise Unreachable(leg=i + 1, excess=excess)
    return JointSolution(q=np.array([float(alpha[..., 0]), float(alpha[..., 1])]),
                         branch=(branch, branch))


def loop_closure_residual(arch: Architecture, params: MechanismParams,
                          q: JointSolution, pose: FootOrientation) -> np.ndarray:
    """Relative residual of the squared loop-closure equation per leg.

    SPU: |zeta^2 - ||d||^2| / max(zeta, L)^2;  RSU:
    |r^2 - c^2 - ||d||^2 - 2 d . c(alpha)| / r^2. Near zero for valid joint
    solutions.
    """
    out = np.empty(2)
    for i in range(2):
        d = leg_vector(params.a[i], params.b[i], pose.roll, pose.pitch)
        if arch == "spu":
            zeta = q.q[i]
            scale = max(zeta, 0.5 * (np.linalg.norm(params.a[i])
                                     + np.linalg.norm(params.b[i])), 1e-9)
            out[i] = abs(zeta * zeta - float(d @ d)) / (scale * scale)
        elif arch == "rsu":
            c, r = params.crank[i], params.rod[i]
            cv = rsu_crank_vector(params.psi[i], c, q.q[i])
            out[i] = abs(r * r - c * c - float(d @ d) - 2.0 * float(d @ cv)) / (r * r)
        else:
            raise ValueError(f"unknown architecture {arch!r}")
    return out


def fk_numeric(arch: Architecture, params: MechanismParams, q: JointSolution,
               seed: FootOrientation, max_iter: int = 100,
               tol: float = 1e-10) -> FootOrientation:
    """Numerical forward kinematics: damped Newton on the two squared
    loop-closure residuals, normalized by the leg-length scale.

    Raises NoConvergence when the residual norm does not fall below ``tol``
    within ``max_iter`` iterations (bad seed or infeasible q).
    """
    qv = q.q
    if arch == "spu":
        scale = np.array([
            max(qv[i], 0.5 * (np.linalg.norm(params.a[i]) + np.linalg.norm(params.b[i])),
                1e-9) ** 2
            for i in range(2)
        ])
    elif arch == "rsu":
        scale = np.array([params.rod[i] ** 2 for i in range(2)])
    else:
        raise ValueError(f"unknown architecture {arch!r}")

    def residual(x):
        out = np.empty(2)
        for i in range(2):
            d = leg_vector(params.a[i], params.b[i], x[0], x[1])
            if arch == "spu":
                out[i] = (qv[i] * qv[i] - float(d @ d)) / scale[i]
            else:
                c, r = params.crank[i], params.rod[i]
                cv = rsu_crank_vector(params.psi[i], c, qv[i])
                out[i] = (r * r - c * c - float(d @ d) - 2.0 * float(d @ cv)) / scale[i]
        return out

    def residual_jacobian(x):
        Rp = foot_rotation_dphi(x[0], x[1])
        Rt = foot_rotation_dtheta(x[0], x[1])
        Jf = np.empty((2, 2))
        for i in range(2):
            a, b = params.a[i], params.b[i]
            if arch == "spu":
                Jf[i, 0] = 2.0 * float(a @ (Rp @ b)) / scale[i]
                Jf[i, 1] = 2.0 * float(a @ (Rt @ b)) / scale[i]
            else:
                d = leg_vector(a, b, x[0], x[1])
                cv = rsu_crank_vector(params.psi[i], params.crank[i], qv[i])
                rod_vec = d + cv
                # dF/dx = -2 (d + c) . dd/dx with dd/dx = -(dR/dx) b
                Jf[i, 0] = 2.0 * float(rod_vec @ (Rp @ b)) / scale[i]
                Jf[i, 1] = 2.0 * float(rod_vec @ (Rt @ b)) / scale[i]
        return Jf

    x = np.array([seed.roll, seed.pitch], dtype=float)
    f = residual(x)
    fnorm = np.linalg.norm(f)
    for iteration in range(max_iter):
        if fnorm < tol:
            return FootOrientation(wrap_angle(x[0]), wrap_angle(x[1]))
        try:
            step = np.linalg.solve(residual_jacobian(x), -f)
        except np.linalg.LinAlgError:
            raise NoConvergence(iteration, float(fnorm)) from None
        t = 1.0
        for _ in range(20):
            trial = x + t * step
            f_trial = residual(trial)
            if np.linalg.norm(f_trial) < fnorm:
                break
            t *= 0.5
        else:
            raise NoConvergence(iteration, float(fnorm))
        x = x + t * step
        f = f_trial
        fnorm = np.linalg.norm(f_trial)
    if fnorm < tol:
        return FootOrientation(wrap_angle(x[0]), wrap_angle(x[1]))
    raise NoConvergence(max_iter, float(fnorm))


def jacobian(arch: Architecture, params: MechanismParams, pose: FootOrientation,
             q: Optional[JointSolution] = None,
             branch: BranchChoice = "primary") -> AnkleJacobian:
    """Ankle Jacobian J mapping actuator rates to (roll, pitch) rates.

    Built as the inverse of G = dq/d(phi, theta) from the closed-form IK.
    Raises Singular when |det G| (after row normalization by the leg-length
    scale) falls below DET_TOL.
    """
    if q is None:
        q = ik_spu(params, pose) if arch == "spu" else ik_rsu(params, pose, branch)
    G = actuation_gradient(arch, params, pose.roll, pose.pitch, q=q.q)
    scales = gradient_row_scales(arch, params, q.q)
    Gn = G / scales[:, None]
    det_n = float(det2(Gn))
    if not math.isfinite(det_n) or abs(det_n) < DET_TOL:
        raise Singular(det_n)
    return AnkleJacobian(J=inv2(G), config=pose, det_normalized=det_n)


def manipulability_ratio(J) -> float:
    """kappa = sqrt(lambda_max / lambda_min) of M = J J^T (>= 1).

    Accepts an AnkleJacobian or a bare 2x2 array. Raises Singular when
    lambda_min < 1e-15 lambda_max.
    """
    m = J.J if isinstance(J, AnkleJacobian) else np.asarray(J, dtype=float)
    if m.shape != (2, 2) or not np.all(np.isfinite(m)):
        raise ValueError("expected a finite 2x2 Jacobian")
    lam_max, lam_min = _sym2x2_eigvals(m @ m.T)
    if lam_min < 1e-15 * lam_max:
        raise Singular(lam_min / lam_max if lam_max > 0 else 0.0,
                       "manipulability undefined at singularity")
    return math.sqrt(lam_max / lam_min)


def manipulability_ratio_grid(J: np.ndarray) -> np.ndarray:
    """Vectorized kappa over stacked 2x2 Jacobians; NaN where degenerate."""
    M = J @ np.swapaxes(J, -1, -2)
    p = M[..., 0, 0]
    s = M[..., 1, 1]
    off = M[..., 0, 1]
    mean = 0.5 * (p + s)
    dev = np.sqrt(np.maximum(0.25 * (p - s) ** 2 + off ** 2, 0.0))
    lam_max = mean + dev
    lam_min = np.maximum(mean - dev, 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        kappa = np.sqrt(lam_max / lam_min)
    return np.where(lam_min < 1e-15 * lam_max, np.nan, kappa)


def _sym2x2_eigvals(M: np.ndarray) -> tuple[float, float]:
    p, s, off = float(M[0, 0]), float(M[1, 1]), float(M[0, 1])
    mean = 0.5 * (p + s)
    dev = math.sqrt(max(0.25 * (p - s) ** 2 + off * off, 0.0))
    return mean + dev, max(mean - dev, 0.0)


def characteristic_points(arch: Architecture, params: MechanismParams,
                          pose: FootOrientation = FootOrientation(0.0, 0.0),
                          q: Optional[JointSolution] = None,
                          branch: BranchChoice = "primary") -> dict[str, np.ndarray]:
    """World coordinates of the mechanism's characteristic points at a pose.

    U0 is the ankle universal joint (origin); U_i the foot-side anchors; S_i
    the spherical joints; RSU adds the actuator joints R_i.
    """
    R = foot_rotation(pose.roll, pose.pitch)
    pts: dict[str, np.ndarray] = {"U0": np.zeros(3)}
    for i in range(2):
        pts[f"U{i + 1}"] = R @ params.b[i]
    if arch == "spu":
        for i in range(2):
            pts[f"S{i + 1}"] = params.a[i].copy()
    elif arch == "rsu":
        if q is None:
            q = ik_rsu(params, pose, branch)
        for i in range(2):
            pts[f"R{i + 1}"] = params.a[i].copy()
            pts[f"S{i + 1}"] = params.a[i] + rsu_crank_vector(
                params.psi[i], params.crank[i], q.q[i])
    else:
        raise ValueError(f"unknown architecture {arch!r}")
    return pts
