"""Angular-momentum algebra for a single spin of fixed magnitude.

All operators are dense complex matrices in the |j, m> basis with m
ascending from -j to +j, and hbar = 1 throughout. Every container built
here is immutable after construction (the arrays are marked read-only),
so instances can be shared freely between threads.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalInvariantError

HERMITIAN_TOL = 1e-10
IMAG_RESIDUE_TOL = 1e-10


def freeze_array(arr: np.ndarray) -> np.ndarray:
    """Return a contiguous read-only copy of ``arr``."""
    out = np.ascontiguousarray(arr)
    if out is arr:
        out = arr.copy()
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class Spin:
    """Spin magnitude j, where 2j must be a non-negative integer."""

    j: float

    def __post_init__(self):
        two_j = 2.0 * float(self.j)
        if two_j < 0.0 or abs(two_j - round(two_j)) > 1e-9:
            raise ValueError(
                f"spin magnitude must be a non-negative half-integer, got {self.j}"
            )
        object.__setattr__(self, "j", round(two_j) / 2.0)

    @property
    def dim(self) -> int:
        """Hilbert-space dimension 2j + 1."""
        return int(round(2.0 * self.j)) + 1

    @property
    def n_qubits(self) -> int:
        """Number 2j of spin-1/2 constituents in the symmetric picture."""
        return int(round(2.0 * self.j))


def as_spin(j) -> Spin:
    """Coerce a number (or Spin) to a Spin."""
    return j if isinstance(j, Spin) else Spin(j)


def m_values(spin) -> np.ndarray:
    """Magnetic quantum numbers -j, ..., +j in ascending order."""
    s = as_spin(spin)
    return np.arange(s.dim, dtype=float) - s.j


@dataclass(frozen=True)
class SpinOperators:
    """Dense matrices jx, jy, jz for one spin magnitude."""

    spin: Spin
    jx: np.ndarray
    jy: np.ndarray
    jz: np.ndarray

    @property
    def dim(self) -> int:
        return self.spin.dim

    def as_tuple(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return (self.jx, self.jy, self.jz)


def spin_operators(spin) -> SpinOperators:
    """Build jx, jy, jz from the ladder-operator matrix elements.

    J+|j,m> = sqrt(j(j+1) - m(m+1)) |j,m+1>, with jx = (J+ + J-)/2,
    jy = (J+ - J-)/(2i), and jz diagonal with entries m.
    """
    s = as_spin(spin)
    m = m_values(s)
    jz = np.diag(m.astype(complex))
    raise_amp = np.sqrt(s.j * (s.j + 1.0) - m[:-1] * (m[:-1] + 1.0))
    jplus = np.zeros((s.dim, s.dim), dtype=complex)
    jplus[np.arange(1, s.dim), np.arange(s.dim - 1)] = raise_amp
    jminus = jplus.conj().T
    jx = 0.5 * (jplus + jminus)
    jy = -0.5j * (jplus - jminus)
    return SpinOperators(s, freeze_array(jx), freeze_array(jy), freeze_array(jz))


def expi_hermitian(gen: np.ndarray, scale: float = 1.0) -> np.ndarray:
    """exp(1j * scale * gen) for Hermitian ``gen`` via eigendecomposition."""
    w, v = np.linalg.eigh(gen)
    return (v * np.exp(1j * scale * w)) @ v.conj().T


def coherent_family(ops: SpinOperators, thetas, phi: float) -> np.ndarray:
    """Spin coherent states along a meridian of fixed phi.

    Returns a (dim, len(thetas)) array whose columns are
    exp(1j * theta * (jx sin(phi) - jy cos(phi))) |j, m=j>. A single
    eigendecomposition of the rotation generator is shared by all thetas,
    which makes sphere-wide scans cheap.
    """
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    gen = np.sin(phi) * ops.jx - np.cos(phi) * ops.jy
    w, v = np.linalg.eigh(gen)
    top = v[-1, :].conj()  # components of |j, m=j> in the generator eigenbasis
    phases = np.exp(1j * np.outer(w, thetas)) * top[:, np.newaxis]
    return v @ phases


def coherent_state(ops: SpinOperators, theta: float, phi: float) -> np.ndarray:
    """Spin coherent state |theta, phi>, a rotation of |j, m=j>.

    Its mean spin vector is (j sin(theta) cos(phi), j sin(theta) sin(phi),
    j cos(theta)).
    """
    return coherent_family(ops, [theta], phi)[:, 0]


def _check_hermitian(op: np.ndarray) -> None:
    dev = float(np.max(np.abs(op - op.conj().T)))
    if dev > HERMITIAN_TOL:
        raise ValueError(f"operator is not Hermitian (max deviation {dev:.3e})")


def expectation(state: np.ndarray, op: np.ndarray) -> float:
    """<psi|op|psi> for a state vector, or Tr(rho op) for a density matrix.

    The operator must be Hermitian; the imaginary residue of the result is
    checked to be below 1e-10 and then discarded.
    """
    state = np.asarray(state)
    op = np.asarray(op)
    _check_hermitian(op)
    if state.ndim == 1:
        if state.shape[0] != op.shape[0]:
            raise ValueError(
                f"dimension mismatch: state {state.shape[0]}, operator {op.shape[0]}"
            )
        val = complex(np.vdot(state, op @ state))
    elif state.ndim == 2:
        if state.shape != op.shape:
            raise ValueError(
                f"dimension mismatch: state {state.shape}, operator {op.shape}"
            )
        val = complex(np.trace(op @ state))
    else:
        raise ValueError("state must be a vector or a density matrix")
    if abs(val.imag) >= IMAG_RESIDUE_TOL:
        raise NumericalInvariantError(
            f"expectation value has imaginary residue {val.imag:.3e}"
        )
    return float(val.real)


def mean_spin(ops: SpinOperators, state: np.ndarray) -> np.ndarray:
    """(<jx>, <jy>, <jz>) of a state vector or density matrix."""
    return np.array([expectation(state, op) for op in ops.as_tuple()])


def mean_spin_trajectory(ops: SpinOperators, states: np.ndarray) -> np.ndarray:
    """Means (<jx>, <jy>, <jz>) for each row of a (T, dim) stack of vectors."""
    states = np.asarray(states, dtype=complex)
    cols = [
        np.einsum("ti,ij,tj->t", states.conj(), op, states).real
        for op in ops.as_tuple()
    ]
    return np.stack(cols, axis=-1)


def validate_state(state: np.ndarray, atol: float = 1e-10) -> np.ndarray:
    """Check unit norm and return the vector unchanged."""
    state = np.asarray(state)
    dev = abs(float(np.linalg.norm(state)) - 1.0)
    if dev > atol:
        raise NumericalInvariantError(f"state norm deviates from 1 by {dev:.3e}")
    return state
