"""Classical limit of the kicked top: the kick-to-kick map on the unit sphere.

Points are normalized mean-spin vectors (x, y, z) = <J>/j. One period first
rotates the vector about y by the kick angle p, then twists it about x by an
angle proportional to the post-kick x component. The map preserves the norm
exactly in exact arithmetic.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .spin import Spin, as_spin

logger = logging.getLogger(__name__)

NORM_DRIFT_TOL = 1e-12


@dataclass(frozen=True)
class TopParams:
    """Kicked-top parameters: spin magnitude, twist strength, kick angle.

    The kick period tau is fixed to 1; all rates are quoted in units of
    1/tau.
    """

    spin: Spin
    kappa: float
    p: float
    tau: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "spin", as_spin(self.spin))
        if self.kappa < 0:
            raise ValueError("kappa must be non-negative")
        if self.tau != 1.0:
            raise ValueError("the kick period is fixed to tau = 1")


def sphere_point(theta, phi) -> np.ndarray:
    """Unit vector(s) (x, y, z) for polar angle theta and azimuth phi."""
    theta, phi = np.broadcast_arrays(
        np.asarray(theta, dtype=float), np.asarray(phi, dtype=float)
    )
    st = np.sin(theta)
    return np.stack([st * np.cos(phi), st * np.sin(phi), np.cos(theta)], axis=-1)


def point_angles(points) -> tuple[np.ndarray, np.ndarray]:
    """(theta, phi) chart of unit vectors, with phi wrapped into [0, 2pi)."""
    pts = np.asarray(points, dtype=float)
    theta = np.arccos(np.clip(pts[..., 2], -1.0, 1.0))
    phi = np.mod(np.arctan2(pts[..., 1], pts[..., 0]), 2.0 * np.pi)
    return theta, phi


def classical_step(point, params: TopParams) -> np.ndarray:
    """One kick period of the classical map, broadcast over leading axes.

    Kick: (x, z) -> (x cos p + z sin p, z cos p - x sin p), y unchanged.
    Twist: rotate (y, z) about x by the angle kappa * x_kicked.
    No renormalization is applied unless the norm drifts beyond 1e-12, in
    which case the drift is logged and divided out.
    """
    pt = np.asarray(point, dtype=float)
    x, y, z = pt[..., 0], pt[..., 1], pt[..., 2]
    cp, sp = np.cos(params.p), np.sin(params.p)
    xk = x * cp + z * sp
    zk = z * cp - x * sp
    ang = params.kappa * xk
    ca, sa = np.cos(ang), np.sin(ang)
    out = np.stack([xk, y * ca - zk * sa, zk * ca + y * sa], axis=-1)
    norms = np.linalg.norm(out, axis=-1)
    drift = float(np.max(np.abs(norms - 1.0)))
    if drift > NORM_DRIFT_TOL:
        logger.debug("classical_step renormalized a norm drift of %.3e", drift)
        out = out / norms[..., np.newaxis]
    return out


def trajectory(point0, params: TopParams, n_kicks: int) -> np.ndarray:
    """Stroboscopic orbit [pt0, M(pt0), ..., M^n(pt0)], shape (n+1, ..., 3)."""
    if n_kicks < 0:
        raise ValueError("n_kicks must be non-negative")
    pt = np.asarray(point0, dtype=float)
    out = np.empty((n_kicks + 1,) + pt.shape, dtype=float)
    out[0] = pt
    for k in range(n_kicks):
        pt = classical_step(pt, params)
        out[k + 1] = pt
    return out


def phase_portrait(ics, params: TopParams, n_kicks: int) -> np.ndarray:
    """Stroboscopic (theta, phi) records for a set of initial conditions.

    ``ics`` is an (n, 2) array of (theta, phi) pairs. Returns rows
    (ic_index, kick, theta, phi), ordered by initial condition and then by
    kick, with phi reported in [0, 2pi).
    """
    ics = np.asarray(ics, dtype=float)
    if ics.ndim != 2 or ics.shape[0] == 0 or ics.shape[1] != 2:
        raise ValueError("ics must be a non-empty (n, 2) array of (theta, phi)")
    pts0 = sphere_point(ics[:, 0], ics[:, 1])
    orbit = trajectory(pts0, params, n_kicks)  # (n_kicks+1, n_ic, 3)
    theta, phi = point_angles(orbit)
    n_ic = ics.shape[0]
    rows = np.empty((n_ic * (n_kicks + 1), 4), dtype=float)
    rows[:, 0] = np.repeat(np.arange(n_ic, dtype=float), n_kicks + 1)
    rows[:, 1] = np.tile(np.arange(n_kicks + 1, dtype=float), n_ic)
    rows[:, 2] = theta.T.reshape(-1)
    rows[:, 3] = phi.T.reshape(-1)
    return rows


def uniform_sphere_grid(n_bands: int, n_phi: int) -> np.ndarray:
    """(theta, phi) grid uniform in (cos theta, phi), midpoint sampled.

    Midpoint sampling keeps the grid away from the poles and from phi = 0,
    and uniform spacing in cos(theta) gives equal-area coverage.
    """
    if n_bands < 1 or n_phi < 1:
        raise ValueError("grid dimensions must be positive")
    cos_t = -1.0 + (np.arange(n_bands) + 0.5) * (2.0 / n_bands)
    phis = (np.arange(n_phi) + 0.5) * (2.0 * np.pi / n_phi)
    tt, pp = np.meshgrid(np.arccos(cos_t), phis, indexing="ij")
    return np.column_stack([tt.reshape(-1), pp.reshape(-1)])
