"""Floquet analysis of the quantum kicked top.

One period applies the kick rotation exp(-i p jy) first and the twist
exp(-i kappa jx^2 / (2j)) second, so the one-period unitary is
U = twist @ kick. Eigenphases live on the branch (-pi, pi].
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .classical import TopParams
from .errors import NumericalInvariantError
from .spin import (
    Spin,
    SpinOperators,
    coherent_family,
    freeze_array,
    spin_operators,
)

UNITARITY_TOL = 1e-12
EIGENPHASE_CLUSTER_GAP = 1e-8
EIGENPAIR_RESIDUAL_TOL = 1e-8


@dataclass(frozen=True)
class FloquetOperator:
    """One-period unitary of the kicked top together with its parameters."""

    matrix: np.ndarray
    params: TopParams

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def kick_operator(ops: SpinOperators, p: float) -> np.ndarray:
    """Kick unitary exp(-i p jy), built in the jy eigenbasis."""
    w, v = np.linalg.eigh(ops.jy)
    return (v * np.exp(-1j * p * w)) @ v.conj().T


def twist_operator(ops: SpinOperators, kappa: float) -> np.ndarray:
    """Twist unitary exp(-i kappa jx^2 / (2j)), built in the jx eigenbasis."""
    if ops.spin.j == 0:
        return np.eye(1, dtype=complex)
    w, v = np.linalg.eigh(ops.jx)
    phases = np.exp(-1j * kappa * w**2 / (2.0 * ops.spin.j))
    return (v * phases) @ v.conj().T


def twist_hamiltonian(ops: SpinOperators, kappa: float, tau: float = 1.0) -> np.ndarray:
    """kappa / (2 j tau) * jx^2, the Hamiltonian acting between kicks."""
    if ops.spin.j == 0:
        return np.zeros((1, 1), dtype=complex)
    return (kappa / (2.0 * ops.spin.j * tau)) * (ops.jx @ ops.jx)


def floquet_operator(params: TopParams, ops: SpinOperators | None = None) -> FloquetOperator:
    """Build the one-period unitary and verify it is unitary to 1e-12."""
    if ops is None:
        ops = spin_operators(params.spin)
    u = twist_operator(ops, params.kappa) @ kick_operator(ops, params.p)
    dev = float(np.max(np.abs(u.conj().T @ u - np.eye(ops.dim))))
    if dev > UNITARITY_TOL:
        raise NumericalInvariantError(f"Floquet operator unitarity deviation {dev:.3e}")
    return FloquetOperator(freeze_array(u), params)


def evolve(state, flo: FloquetOperator, n_kicks: int) -> np.ndarray:
    """Stack [psi, U psi, ..., U^n psi]; every row must stay unit norm."""
    if n_kicks < 0:
        raise ValueError("n_kicks must be non-negative")
    psi = np.asarray(state, dtype=complex)
    if psi.shape[0] != flo.dim:
        raise ValueError("state dimension does not match the Floquet operator")
    out = np.empty((n_kicks + 1, flo.dim), dtype=complex)
    out[0] = psi
    u = flo.matrix
    for k in range(n_kicks):
        psi = u @ psi
        out[k + 1] = psi
    drift = float(np.max(np.abs(np.linalg.norm(out, axis=1) - 1.0)))
    if drift > 1e-9:
        raise NumericalInvariantError(f"evolution norm drift {drift:.3e}")
    return out


@dataclass(frozen=True)
class FloquetSpectrum:
    """Eigenphases in (-pi, pi] (ascending) with orthonormal eigenvectors.

    Column n of ``vectors`` satisfies U|u_n> = exp(1j * omegas[n]) |u_n>.
    """

    omegas: np.ndarray
    vectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.omegas.shape[0]


def floquet_spectrum(flo: FloquetOperator) -> FloquetSpectrum:
    """Full eigendecomposition of the one-period unitary.

    A unitary matrix is normal, so eigenvectors of distinct eigenphases come
    out orthogonal; numerically degenerate clusters (circular eigenphase gap
    below 1e-8) are re-orthonormalized with a QR pass. Each eigenvector's
    largest-magnitude component is rotated to be real and positive so that
    emitted files are reproducible.
    """
    u = flo.matrix
    lam, vecs = np.linalg.eig(u)
    omega = np.angle(lam)
    order = np.argsort(omega, kind="stable")
    omega = omega[order]
    vecs = vecs[:, order]
    dim = omega.shape[0]

    breaks = np.nonzero(np.diff(omega) > EIGENPHASE_CLUSTER_GAP)[0]
    clusters = [np.asarray(c) for c in np.split(np.arange(dim), breaks + 1)]
    wrap_gap = omega[0] + 2.0 * np.pi - omega[-1]
    if len(clusters) > 1 and wrap_gap < EIGENPHASE_CLUSTER_GAP:
        clusters[0] = np.concatenate([clusters[-1], clusters[0]])
        clusters.pop()
    for idx in clusters:
        if idx.size > 1:
            q, _ = np.linalg.qr(vecs[:, idx])
            vecs[:, idx] = q

    lead = np.argmax(np.abs(vecs), axis=0)
    lead_vals = vecs[lead, np.arange(dim)]
    vecs = vecs * (np.abs(lead_vals) / lead_vals)[np.newaxis, :]

    residual = np.linalg.norm(u @ vecs - vecs * np.exp(1j * omega)[np.newaxis, :], axis=0)
    worst = float(np.max(residual))
    if worst > EIGENPAIR_RESIDUAL_TOL:
        raise NumericalInvariantError(f"Floquet eigenpair residual {worst:.3e}")
    gram_dev = float(np.max(np.abs(vecs.conj().T @ vecs - np.eye(dim))))
    if gram_dev > 1e-9:
        raise NumericalInvariantError(f"Floquet eigenvector Gram deviation {gram_dev:.3e}")
    return FloquetSpectrum(freeze_array(omega), freeze_array(vecs))


def overlap_distribution(state, spectrum: FloquetSpectrum) -> np.ndarray:
    """Probabilities f_n = |<u_n|psi>|^2, aligned with ``spectrum.omegas``."""
    state = np.asarray(state, dtype=complex)
    if state.shape[0] != spectrum.dim:
        raise ValueError("state dimension does not match the spectrum")
    f = np.abs(spectrum.vectors.conj().T @ state) ** 2
    total = float(f.sum())
    if abs(total - 1.0) > 1e-10:
        raise NumericalInvariantError(f"overlap probabilities sum to {total!r}")
    return f


class SupportMeasure(NamedTuple):
    total: float
    normalized: float


def support_measure(state, spectrum: FloquetSpectrum) -> SupportMeasure:
    """Absolute-overlap sum over Floquet eigenstates, plus its normalized form.

    ``total`` is sum_n |<u_n|psi>|, a rough count of the eigenstates the
    state occupies; ``normalized`` divides by sqrt(dim), the value attained
    by equal support over all eigenstates.
    """
    state = np.asarray(state, dtype=complex)
    if state.shape[0] != spectrum.dim:
        raise ValueError("state dimension does not match the spectrum")
    s = float(np.sum(np.abs(spectrum.vectors.conj().T @ state)))
    return SupportMeasure(s, s / float(np.sqrt(spectrum.dim)))


@dataclass(frozen=True)
class HusimiGrid:
    """Husimi distribution sampled on a uniform (theta, phi) grid.

    ``values[i, k]`` is the probability density per steradian at
    (thetas[i], phis[k]). thetas span [0, pi] inclusive; phis cover
    [0, 2pi) without the duplicate endpoint.
    """

    thetas: np.ndarray
    phis: np.ndarray
    values: np.ndarray

    def integral(self) -> float:
        """Quadrature over the sphere: trapezoid in theta, periodic rectangle in phi.

        At the default 101 x 201 grid this reproduces 1 for physical states
        to well within 1e-3.
        """
        dphi = 2.0 * np.pi / self.phis.shape[0]
        w = np.full(self.thetas.shape[0], self.thetas[1] - self.thetas[0])
        w[0] *= 0.5
        w[-1] *= 0.5
        return float(np.sum(self.values.sum(axis=1) * dphi * np.sin(self.thetas) * w))


def husimi(state, n_theta: int = 101, n_phi: int = 201) -> HusimiGrid:
    """Husimi distribution (2j+1)/(4 pi) |<theta,phi|state>|^2 on a grid.

    Accepts a pure state vector or a density matrix; for a density matrix
    the sampled value is (2j+1)/(4 pi) <theta,phi|rho|theta,phi>.
    """
    if n_theta < 2 or n_phi < 2:
        raise ValueError("grid must have at least 2 points per axis")
    arr = np.asarray(state, dtype=complex)
    dim = arr.shape[0]
    ops = spin_operators(Spin((dim - 1) / 2.0))
    thetas = np.linspace(0.0, np.pi, n_theta)
    phis = np.arange(n_phi) * (2.0 * np.pi / n_phi)
    values = np.empty((n_theta, n_phi))
    prefac = dim / (4.0 * np.pi)
    for k, phi in enumerate(phis):
        fam = coherent_family(ops, thetas, float(phi))
        if arr.ndim == 1:
            values[:, k] = prefac * np.abs(fam.conj().T @ arr) ** 2
        else:
            quad = np.einsum("it,ij,jt->t", fam.conj(), arr, fam).real
            values[:, k] = prefac * np.maximum(quad, 0.0)
    return HusimiGrid(freeze_array(thetas), freeze_array(phis), freeze_array(values))
