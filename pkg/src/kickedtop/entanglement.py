"""Entanglement diagnostics across the one-qubit : rest split.

A spin j is the symmetric sector of N = 2j qubits, so the reduced state of
any single qubit follows from the collective means alone. The qubit : rest
split embeds exactly into C^2 (x) C^(2j) because the remaining N - 1 qubits
stay symmetric (a spin j - 1/2 irrep); the Clebsch-Gordan branch amplitudes

    <1/2, +1/2; j-1/2, m-1/2 | j, m> = sqrt((j + m) / (2j))
    <1/2, -1/2; j-1/2, m+1/2 | j, m> = sqrt((j - m) / (2j))

define that isometry. Negativity is evaluated on the embedded state after
partially transposing the qubit factor.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import NumericalInvariantError
from .spin import SpinOperators, as_spin, freeze_array, mean_spin

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)

MEAN_SPIN_SLACK = 1e-9
NEGATIVITY_FLOOR = -1e-10


@dataclass(frozen=True)
class QubitState:
    """Single-qubit reduced state: 2x2 matrix plus its Bloch mean spin."""

    matrix: np.ndarray
    mean_spin: np.ndarray

    def purity(self) -> float:
        return float(np.trace(self.matrix @ self.matrix).real)


def reduced_qubit(state, ops: SpinOperators) -> QubitState:
    """Reduced state of one qubit from the collective means.

    The qubit mean spin is <J>/(2j) and the 2x2 state is
    1/2 * identity + s . sigma. A mean spin longer than 1/2 (beyond 1e-9)
    means the input was not a valid symmetric state.
    """
    j = ops.spin.j
    s = mean_spin(ops, state) / (2.0 * j)
    slen = float(np.linalg.norm(s))
    if slen > 0.5 + MEAN_SPIN_SLACK:
        raise NumericalInvariantError(
            f"reduced qubit is not positive semidefinite (|s| = {slen!r} > 1/2)"
        )
    rho2 = 0.5 * np.eye(2, dtype=complex) + s[0] * PAULI_X + s[1] * PAULI_Y + s[2] * PAULI_Z
    return QubitState(freeze_array(rho2), freeze_array(s))


def linear_entropy(mean_j, spin) -> float | np.ndarray:
    """Linear entropy of the reduced qubit from the collective means.

    S = (1 - |<J>|^2 / j^2) / 2, which ranges from 0 for separable
    (coherent) states to 1/2 at maximal 1:rest entanglement. Accepts a
    single mean vector or an (..., 3) stack; results within numerical slack
    of the range edges are clipped into [0, 1/2].
    """
    s = as_spin(spin)
    means = np.asarray(mean_j, dtype=float)
    norm2 = np.sum(means**2, axis=-1)
    if float(np.max(norm2)) > (s.j + MEAN_SPIN_SLACK) ** 2:
        raise ValueError("mean spin vector is longer than j")
    out = np.clip(0.5 * (1.0 - norm2 / s.j**2), 0.0, 0.5)
    return float(out) if out.ndim == 0 else out


@lru_cache(maxsize=None)
def _embedding(two_j: int) -> np.ndarray:
    j = two_j / 2.0
    dim = two_j + 1
    rest = two_j
    v = np.zeros((2 * rest, dim), dtype=complex)
    for i in range(dim):
        m = -j + i
        up = np.sqrt((j + m) / two_j)
        down = np.sqrt((j - m) / two_j)
        if i >= 1:
            v[i - 1, i] = up  # qubit up, rest index i-1
        if i <= dim - 2:
            v[rest + i, i] = down  # qubit down, rest index i
    dev = float(np.max(np.abs(v.conj().T @ v - np.eye(dim))))
    if dev > 1e-12:
        raise NumericalInvariantError(f"embedding isometry deviation {dev:.3e}")
    return freeze_array(v)


def qubit_embedding(spin) -> np.ndarray:
    """Isometry V from the spin-j space into C^2 (x) C^(2j).

    Rows are ordered qubit-major: index q * 2j + r addresses qubit state q
    (0 = up, 1 = down) and rest state |j - 1/2, m_r> with m_r ascending.
    Satisfies V^+ V = identity to 1e-12.
    """
    s = as_spin(spin)
    if s.n_qubits < 1:
        raise ValueError("the qubit split needs 2j >= 1")
    return _embedding(s.n_qubits)


def embed_qubit_rest(state, spin) -> np.ndarray:
    """Density matrix of the embedded state V rho V^+ on qubit (x) rest."""
    arr = np.asarray(state, dtype=complex)
    v = qubit_embedding(spin)
    if arr.ndim == 1:
        w = v @ arr
        return np.outer(w, w.conj())
    return v @ arr @ v.conj().T


def partial_transpose_qubit(matrix: np.ndarray) -> np.ndarray:
    """Partial transpose of the qubit factor of a qubit (x) rest matrix."""
    mat = np.asarray(matrix)
    rest = mat.shape[0] // 2
    return (
        mat.reshape(2, rest, 2, rest).transpose(2, 1, 0, 3).reshape(2 * rest, 2 * rest)
    )


def negativity(state, spin) -> float:
    """Entanglement negativity of the qubit : rest split.

    Equal to the magnitude of the negative eigenvalues of the partially
    transposed embedded state, which matches (trace norm - 1)/2 for a
    unit-trace input. Eigenvalues above -1e-10 count as positive
    semidefinite jitter, not entanglement.
    """
    arr = np.asarray(state, dtype=complex)
    if arr.ndim == 1:
        return float(negativity_series(arr[np.newaxis, :], spin)[0])
    lam = np.linalg.eigvalsh(partial_transpose_qubit(embed_qubit_rest(arr, spin)))
    return float(-np.sum(lam[lam < NEGATIVITY_FLOOR]))


def negativity_series(states, spin) -> np.ndarray:
    """Negativity of each pure state in a (T, dim) stack (batched)."""
    states = np.asarray(states, dtype=complex)
    v = qubit_embedding(spin)
    w = states @ v.T  # (T, 2 * rest) embedded vectors
    t, two_rest = w.shape
    rest = two_rest // 2
    emb = w[:, :, np.newaxis] * w.conj()[:, np.newaxis, :]
    pt = emb.reshape(t, 2, rest, 2, rest).transpose(0, 3, 2, 1, 4).reshape(
        t, two_rest, two_rest
    )
    lam = np.linalg.eigvalsh(pt)
    return -np.where(lam < NEGATIVITY_FLOOR, lam, 0.0).sum(axis=1)


def purity(rho: np.ndarray) -> float:
    """Tr(rho^2) of a density matrix."""
    rho = np.asarray(rho, dtype=complex)
    val = complex(np.trace(rho @ rho))
    if abs(val.imag) > 1e-10:
        raise NumericalInvariantError(f"purity has imaginary residue {val.imag:.3e}")
    return float(val.real)


def time_average(series) -> float:
    """Arithmetic mean of a non-empty series."""
    arr = np.asarray(series, dtype=float)
    if arr.size == 0:
        raise ValueError("cannot average an empty series")
    return float(np.mean(arr))


def validate_density_matrix(
    rho: np.ndarray,
    herm_tol: float = 1e-10,
    trace_tol: float = 1e-9,
    psd_tol: float = 1e-9,
) -> np.ndarray:
    """Check Hermiticity, unit trace, and positive semidefiniteness."""
    rho = np.asarray(rho, dtype=complex)
    herm = float(np.max(np.abs(rho - rho.conj().T)))
    if herm > herm_tol:
        raise NumericalInvariantError(f"density matrix Hermiticity deviation {herm:.3e}")
    tr = complex(np.trace(rho))
    if abs(tr - 1.0) > trace_tol:
        raise NumericalInvariantError(f"density matrix trace {tr!r} differs from 1")
    lam_min = float(np.min(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))))
    if lam_min < -psd_tol:
        raise NumericalInvariantError(f"density matrix has eigenvalue {lam_min:.3e}")
    return rho
