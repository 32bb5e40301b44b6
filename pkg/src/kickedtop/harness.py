"""Computation drivers behind the CLI commands.

These functions take plain parameters and return arrays; the CLI layer maps
configurations onto them and writes the results out. Sweeps are chunked
across a process pool, and chunk results are reassembled in sweep order so
the output never depends on completion order.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .classical import TopParams, phase_portrait, uniform_sphere_grid
from .entanglement import linear_entropy, negativity, negativity_series
from .floquet import (
    FloquetSpectrum,
    evolve,
    floquet_operator,
    floquet_spectrum,
    overlap_distribution,
    support_measure,
)
from .opensystem import DecoherenceParams, open_kicked_top
from .spin import coherent_state, mean_spin_trajectory, spin_operators


def closed_series(theta: float, phi: float, params: TopParams, n_kicks: int):
    """Per-kick linear entropy and negativity for closed-system evolution.

    Returns (S, N), each of length n_kicks + 1 with kick 0 included.
    """
    ops = spin_operators(params.spin)
    flo = floquet_operator(params, ops)
    psi0 = coherent_state(ops, theta, phi)
    states = evolve(psi0, flo, n_kicks)
    means = mean_spin_trajectory(ops, states)
    s = linear_entropy(means, params.spin)
    n = negativity_series(states, params.spin)
    return s, n


def phi_scan(
    phis,
    theta: float,
    params: TopParams,
    n_kicks: int,
    include_negativity: bool = True,
):
    """Time-averaged S, N, and normalized support along a line of fixed theta.

    All initial states are evolved together as columns of one matrix.
    Returns (S_avg, N_avg, support); N_avg is zeros when negativity is
    skipped.
    """
    phis = np.asarray(phis, dtype=float)
    ops = spin_operators(params.spin)
    flo = floquet_operator(params, ops)
    spec = floquet_spectrum(flo)
    cols = np.stack([coherent_state(ops, theta, float(p)) for p in phis], axis=1)

    support = np.abs(spec.vectors.conj().T @ cols).sum(axis=0) / np.sqrt(spec.dim)

    n_points = phis.shape[0]
    s_sum = np.zeros(n_points)
    n_sum = np.zeros(n_points)
    cur = cols
    for k in range(n_kicks + 1):
        if k:
            cur = flo.matrix @ cur
        means = mean_spin_trajectory(ops, cur.T)
        s_sum += linear_entropy(means, params.spin)
        if include_negativity:
            n_sum += negativity_series(cur.T, params.spin)
    samples = n_kicks + 1
    return s_sum / samples, n_sum / samples, support


def kappa_scan(kappas, theta: float, phi: float, p: float, spin, n_kicks: int):
    """Time-averaged S and N versus twist strength for one initial state."""
    kappas = np.asarray(kappas, dtype=float)
    s_avg = np.empty(kappas.shape[0])
    n_avg = np.empty(kappas.shape[0])
    for i, kappa in enumerate(kappas):
        s, n = closed_series(theta, phi, TopParams(spin, float(kappa), p), n_kicks)
        s_avg[i] = s.mean()
        n_avg[i] = n.mean()
    return s_avg, n_avg


def open_series(
    theta: float,
    phi: float,
    params: TopParams,
    dec: DecoherenceParams,
    n_kicks: int,
):
    """Per-kick S, N, and purity for the open-system evolution.

    Returns (S, N, purity, rhos); rhos holds the density matrix after every
    period so callers can take snapshots.
    """
    ops = spin_operators(params.spin)
    psi0 = coherent_state(ops, theta, phi)
    rhos = open_kicked_top(np.outer(psi0, psi0.conj()), params, dec, n_kicks)
    means = np.stack(
        [np.einsum("tij,ji->t", rhos, op).real for op in ops.as_tuple()], axis=-1
    )
    s = linear_entropy(means, params.spin)
    n = np.array([negativity(rho, params.spin) for rho in rhos])
    pur = np.einsum("tij,tji->t", rhos, rhos).real
    return s, n, pur, rhos


def spectrum_report(theta: float, phi: float, params: TopParams):
    """Floquet spectrum plus the overlap distribution of one coherent state."""
    ops = spin_operators(params.spin)
    flo = floquet_operator(params, ops)
    spec = floquet_spectrum(flo)
    psi0 = coherent_state(ops, theta, phi)
    f = overlap_distribution(psi0, spec)
    return spec, f


def support_scan(phis, theta: float, spec: FloquetSpectrum, ops) -> np.ndarray:
    """Normalized support measure for coherent states along a theta line."""
    vals = np.empty(len(phis))
    for i, phi in enumerate(phis):
        vals[i] = support_measure(coherent_state(ops, theta, float(phi)), spec).normalized
    return vals


def portrait_dataset(params: TopParams, n_bands: int, n_phis: int, n_kicks: int):
    """Phase-portrait rows for a uniform-in-area initial-condition grid."""
    ics = uniform_sphere_grid(n_bands, n_phis)
    return phase_portrait(ics, params, n_kicks)


def _phi_scan_chunk(payload):
    phis, theta, j, kappa, p, n_kicks, include_negativity = payload
    params = TopParams(j, kappa, p)
    return phi_scan(np.asarray(phis), theta, params, n_kicks, include_negativity)


def _kappa_scan_chunk(payload):
    kappas, theta, phi, p, j, n_kicks = payload
    return kappa_scan(np.asarray(kappas), theta, phi, p, j, n_kicks)


def _run_chunked(worker, payloads, jobs: int):
    if len(payloads) == 1 or jobs <= 1:
        return [worker(p) for p in payloads]
    with ProcessPoolExecutor(max_workers=min(jobs, len(payloads))) as pool:
        return list(pool.map(worker, payloads))


def phi_scan_parallel(
    phis,
    theta: float,
    params: TopParams,
    n_kicks: int,
    jobs: int = 1,
    include_negativity: bool = True,
):
    """Chunked phi_scan; identical results regardless of the chunk count."""
    phis = np.asarray(phis, dtype=float)
    n_chunks = max(1, min(jobs, phis.shape[0]))
    payloads = [
        (chunk, theta, params.spin.j, params.kappa, params.p, n_kicks, include_negativity)
        for chunk in np.array_split(phis, n_chunks)
    ]
    parts = _run_chunked(_phi_scan_chunk, payloads, jobs)
    return tuple(np.concatenate(cols) for cols in zip(*parts))


def kappa_scan_parallel(
    kappas,
    theta: float,
    phi: float,
    p: float,
    spin,
    n_kicks: int,
    jobs: int = 1,
):
    """Chunked kappa_scan; identical results regardless of the chunk count."""
    kappas = np.asarray(kappas, dtype=float)
    n_chunks = max(1, min(jobs, kappas.shape[0]))
    from .spin import as_spin

    j = as_spin(spin).j
    payloads = [
        (chunk, theta, phi, p, j, n_kicks) for chunk in np.array_split(kappas, n_chunks)
    ]
    parts = _run_chunked(_kappa_scan_chunk, payloads, jobs)
    return tuple(np.concatenate(cols) for cols in zip(*parts))
