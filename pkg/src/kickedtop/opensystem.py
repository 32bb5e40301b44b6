"""Photon-scattering decoherence for the kicked top.

Between kicks the density matrix evolves under the twist Hamiltonian plus a
dissipator in Lindblad form,

    d rho / dt = -i [H, rho] + sum_q (D_q rho D_q^+ - 1/2 {D_q^+ D_q, rho}).

The default jump model is the isotropic set L_a = sqrt(gamma_s / (j(j+1))) j_a
for a in {x, y, z}: a trace-preserving stand-in for the full atomic
spontaneous-emission cascade, normalized so the total jump rate equals the
photon scattering rate gamma_s in every state. Alternative jump models can be
registered in JUMP_MODELS. Kicks are treated as instantaneous
decoherence-free unitaries.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .classical import TopParams
from .errors import NumericalInvariantError
from .floquet import kick_operator, twist_hamiltonian
from .spin import SpinOperators, as_spin, freeze_array, spin_operators

logger = logging.getLogger(__name__)

TRACE_ROW_TOL = 1e-10
TRACE_DRIFT_ABORT = 1e-6


def gamma_from_kappa(kappa: float, f, beta: float, tau: float = 1.0) -> float:
    """Scattering rate implied by a twist strength: gamma_s = kappa / (2 F tau beta).

    ``f`` is the spin (hyperfine) magnitude, as a number or a Spin.
    """
    f_val = as_spin(f).j
    if kappa < 0:
        raise ValueError("kappa must be non-negative")
    if f_val <= 0 or beta <= 0 or tau <= 0:
        raise ValueError("spin magnitude, beta, and tau must be positive")
    return kappa / (2.0 * f_val * tau * beta)


def kick_angle(omega_larmor: float, duration: float) -> float:
    """Turn angle per kick, p = Omega_L * T, for a pulse of the given duration."""
    if duration < 0:
        raise ValueError("pulse duration must be non-negative")
    return omega_larmor * duration


@dataclass(frozen=True)
class DecoherenceParams:
    """Scattering rate, optional figure of merit beta, and jump-model name."""

    gamma_s: float
    beta: float | None = None
    model: str = "isotropic"

    def __post_init__(self):
        if self.gamma_s < 0:
            raise ValueError("gamma_s must be non-negative")
        if self.beta is not None and self.beta <= 0:
            raise ValueError("beta must be positive")
        if self.model not in JUMP_MODELS:
            raise ValueError(
                f"unknown jump model {self.model!r}; known: {sorted(JUMP_MODELS)}"
            )


@dataclass(frozen=True)
class JumpSet:
    """Collection of jump operators D_q, each in units of sqrt(rate)."""

    operators: tuple[np.ndarray, ...]

    def total_rate_matrix(self) -> np.ndarray:
        """sum_q D_q^+ D_q (zero matrix for an empty set is not defined here)."""
        if not self.operators:
            raise ValueError("empty jump set has no defined dimension")
        acc = np.zeros_like(self.operators[0])
        for d in self.operators:
            acc = acc + d.conj().T @ d
        return acc


def isotropic_jump_set(gamma_s: float, ops: SpinOperators) -> JumpSet:
    """Jump operators sqrt(gamma_s / (j(j+1))) * j_a for a in {x, y, z}.

    The Casimir identity makes sum_a L_a^+ L_a = gamma_s * identity exactly
    on the fixed-j manifold, so the total jump rate is gamma_s in every
    state.
    """
    if gamma_s < 0:
        raise ValueError("gamma_s must be non-negative")
    j = ops.spin.j
    if gamma_s > 0 and j == 0:
        raise ValueError("cannot scatter on a spin-0 manifold")
    scale = np.sqrt(gamma_s / (j * (j + 1.0))) if gamma_s > 0 else 0.0
    jumps = JumpSet(tuple(freeze_array(scale * op) for op in ops.as_tuple()))
    dev = float(
        np.max(np.abs(jumps.total_rate_matrix() - gamma_s * np.eye(ops.dim)))
    )
    if dev > 1e-10:
        raise NumericalInvariantError(f"jump-set rate identity deviation {dev:.3e}")
    return jumps


JUMP_MODELS = {"isotropic": isotropic_jump_set}


class Superoperator:
    """Generator acting on column-stacked density matrices.

    ``matrix`` is dim^2 x dim^2. Propagators exp(duration * matrix) are
    computed once per duration and cached on the instance; the matrix itself
    is immutable. Construction verifies the trace-preservation row condition
    vec(I)^T L = 0.
    """

    def __init__(self, matrix: np.ndarray):
        matrix = np.asarray(matrix, dtype=complex)
        d2 = matrix.shape[0]
        dim = int(round(np.sqrt(d2)))
        if matrix.shape != (d2, d2) or dim * dim != d2:
            raise ValueError("superoperator matrix must be dim^2 x dim^2")
        vec_id = np.eye(dim, dtype=complex).flatten(order="F")
        dev = float(np.max(np.abs(vec_id @ matrix)))
        if dev > TRACE_ROW_TOL:
            raise NumericalInvariantError(
                f"generator does not preserve trace (row deviation {dev:.3e})"
            )
        self.matrix = freeze_array(matrix)
        self.dim = dim
        self._propagators: dict[float, np.ndarray] = {}

    def apply(self, rho: np.ndarray) -> np.ndarray:
        """Action of the generator itself, L[rho]."""
        vec = np.asarray(rho, dtype=complex).flatten(order="F")
        return (self.matrix @ vec).reshape((self.dim, self.dim), order="F")

    def propagator(self, duration: float) -> np.ndarray:
        """Dense matrix exponential exp(duration * L), cached per duration."""
        if duration < 0:
            raise ValueError("duration must be non-negative")
        cached = self._propagators.get(duration)
        if cached is None:
            cached = freeze_array(expm(duration * self.matrix))
            self._propagators[duration] = cached
        return cached


def lindblad_superoperator(h: np.ndarray, jumps: JumpSet) -> Superoperator:
    """Vectorized generator of -i [H, rho] plus the jump dissipator.

    Column-stacking conventions: vec(A X B) = (B^T kron A) vec(X).
    """
    h = np.asarray(h, dtype=complex)
    dim = h.shape[0]
    eye = np.eye(dim, dtype=complex)
    gen = -1j * (np.kron(eye, h) - np.kron(h.T, eye))
    for d in jumps.operators:
        if d.shape != (dim, dim):
            raise ValueError("jump operator dimension does not match the Hamiltonian")
        dd = d.conj().T @ d
        gen += np.kron(d.conj(), d) - 0.5 * np.kron(eye, dd) - 0.5 * np.kron(dd.T, eye)
    return Superoperator(gen)


def propagate_interval(rho: np.ndarray, gen: Superoperator, duration: float) -> np.ndarray:
    """Evolve rho by exp(duration * L); Hermitize the result, monitor the trace."""
    rho = np.asarray(rho, dtype=complex)
    if duration < 0:
        raise ValueError("duration must be non-negative")
    if duration == 0:
        return rho.copy()
    out = (gen.propagator(duration) @ rho.flatten(order="F")).reshape(
        (gen.dim, gen.dim), order="F"
    )
    herm_dev = float(np.max(np.abs(out - out.conj().T)))
    if herm_dev > 1e-12:
        logger.debug("interval propagation Hermiticity deviation %.3e", herm_dev)
    out = 0.5 * (out + out.conj().T)
    drift = abs(float(np.trace(out).real) - 1.0)
    if drift > TRACE_DRIFT_ABORT:
        raise NumericalInvariantError(
            f"trace drift {drift:.3e} exceeds {TRACE_DRIFT_ABORT:g} during interval propagation"
        )
    return out


def open_kicked_top(
    rho0: np.ndarray,
    params: TopParams,
    dec: DecoherenceParams,
    n_kicks: int,
    jumps: JumpSet | None = None,
) -> np.ndarray:
    """Kicked-top density-matrix evolution with photon scattering.

    Each period applies the instantaneous kick unitary by conjugation and
    then integrates the twist-plus-dissipator master equation over one kick
    period, using one cached propagator for the whole run. Returns the stack
    [rho0, rho1, ...] with one entry per completed period. Pass ``jumps`` to
    override the jump model named in ``dec``.
    """
    if n_kicks < 0:
        raise ValueError("n_kicks must be non-negative")
    ops = spin_operators(params.spin)
    rho = np.asarray(rho0, dtype=complex)
    if rho.shape != (ops.dim, ops.dim):
        raise ValueError("rho0 dimension does not match params.spin")
    kick = kick_operator(ops, params.p)
    h = twist_hamiltonian(ops, params.kappa, params.tau)
    if jumps is None:
        jumps = JUMP_MODELS[dec.model](dec.gamma_s, ops)
    gen = lindblad_superoperator(h, jumps)
    out = np.empty((n_kicks + 1, ops.dim, ops.dim), dtype=complex)
    out[0] = rho
    for k in range(n_kicks):
        rho = kick @ rho @ kick.conj().T
        rho = propagate_interval(rho, gen, params.tau)
        out[k + 1] = rho
    return out
