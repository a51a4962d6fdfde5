"""Exact piecewise-constant propagation of the switched-coupling dynamics.

The Hamiltonian takes only two values (coupling on / coupling off), each
constant over a half-period, so the state advances by exact matrix
exponentials: diagonalize the two real-symmetric matrices once and reuse
the eigenbases for every segment.  No time step ever straddles a switching
instant, so there is no integrator error, only linear-algebra roundoff.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .hilbert import HilbertSpace, StateVector
from .model import CouplingSchedule, SystemParams, hamiltonian_matrix, switching_grid

_HERMITICITY_ATOL = 1e-12


@dataclass(frozen=True)
class Trajectory:
    """Sampled exact evolution: times (ns) and amplitudes, one row per sample."""

    times: np.ndarray
    amplitudes: np.ndarray
    space: HilbertSpace
    params: SystemParams
    schedule: CouplingSchedule
    sample_dt: float

    def __post_init__(self):
        self.times.setflags(write=False)
        self.amplitudes.setflags(write=False)

    def __len__(self) -> int:
        return len(self.times)

    def state(self, i: int) -> StateVector:
        return StateVector(self.amplitudes[i], self.space)

    def norms(self) -> np.ndarray:
        return np.sqrt(np.sum(np.abs(self.amplitudes) ** 2, axis=1))

    def excitation_probabilities(self, qubit_index: int) -> np.ndarray:
        if not 0 <= qubit_index < self.space.n_qubits:
            raise ValueError(
                f"qubit_index={qubit_index} outside [0, {self.space.n_qubits - 1}]"
            )
        weights = np.abs(self.amplitudes) ** 2
        mask = self.space.bit_table[:, qubit_index].astype(float)
        return weights @ mask

    def photon_expectations(self) -> np.ndarray:
        weights = np.abs(self.amplitudes) ** 2
        return weights @ self.space.photon_counts.astype(float)


class _SegmentPropagator:
    """Eigendecomposition of one constant Hamiltonian, reused across segments."""

    def __init__(self, h: np.ndarray):
        scale = max(1.0, float(np.abs(h).max()))
        if np.abs(h - h.conj().T).max() > _HERMITICITY_ATOL * scale:
            raise ValueError("matrix is not Hermitian to 1e-12")
        self.eigenvalues, self.eigenvectors = np.linalg.eigh(h)

    def advance(self, psi: np.ndarray, dt: float) -> np.ndarray:
        if dt == 0.0:
            return psi
        rotated = self.eigenvectors.conj().T @ psi
        rotated *= np.exp(-1j * self.eigenvalues * dt)
        return self.eigenvectors @ rotated


def evolve_segment(h: np.ndarray, dt: float, state: StateVector) -> StateVector:
    """exp(-i*H*dt)|state> for one constant Hermitian H."""
    if dt < 0:
        raise ValueError(f"dt must be >= 0, got {dt}")
    propagator = _SegmentPropagator(np.asarray(h, dtype=np.complex128))
    return StateVector(propagator.advance(state.amplitudes.copy(), dt), state.space)


def sample_times(t_final: float, sample_dt: float) -> np.ndarray:
    """Multiples of sample_dt in [0, t_final], with t_final always included."""
    if t_final <= 0 or sample_dt <= 0:
        raise ValueError("t_final and sample_dt must be > 0")
    n = int(math.floor(t_final / sample_dt + 1e-9))
    times = np.arange(n + 1, dtype=float) * sample_dt
    times = times[times <= t_final * (1 + 1e-12)]
    times[-1] = min(float(times[-1]), t_final)
    if times[-1] < t_final * (1 - 1e-12):
        times = np.append(times, t_final)
    return times


def propagate(
    params: SystemParams,
    schedule: CouplingSchedule,
    t_final: float,
    sample_dt: float,
    initial: Optional[StateVector] = None,
) -> Trajectory:
    """Exact evolution from |gg...g,0> sampled at multiples of sample_dt.

    Steps are split exactly at the switching instants; the two segment
    Hamiltonians are diagonalized once each and reused.
    """
    space = params.space()
    if initial is None:
        psi = np.zeros(space.dim, dtype=np.complex128)
        psi[space.ground_index()] = 1.0
    else:
        if initial.space != space:
            raise ValueError("initial state space does not match params")
        psi = initial.amplitudes.copy()

    segments = (
        _SegmentPropagator(hamiltonian_matrix(params, schedule.g0)),
        _SegmentPropagator(hamiltonian_matrix(params, 0.0)),
    )
    edges = switching_grid(schedule, t_final)
    n_seg = len(edges) - 1
    times = sample_times(t_final, sample_dt)
    tol = 1e-12 * max(1.0, t_final)

    out = np.empty((len(times), space.dim), dtype=np.complex128)
    t_cur = 0.0
    k = 0
    for i, ts in enumerate(times):
        while k < n_seg - 1 and edges[k + 1] < ts - tol:
            psi = segments[k % 2].advance(psi, float(edges[k + 1]) - t_cur)
            t_cur = float(edges[k + 1])
            k += 1
        psi = segments[k % 2].advance(psi, float(ts) - t_cur)
        t_cur = float(ts)
        out[i] = psi
        while k < n_seg - 1 and abs(float(edges[k + 1]) - t_cur) <= tol:
            k += 1
    return Trajectory(
        times=times,
        amplitudes=out,
        space=space,
        params=params,
        schedule=schedule,
        sample_dt=sample_dt,
    )


@dataclass(frozen=True)
class ConvergenceReport:
    """Photon-cutoff sensitivity of the excitation probability curve."""

    n_max: int
    sup_difference: float
    threshold: float
    converged: bool


def convergence_check(
    params: SystemParams,
    schedule: CouplingSchedule,
    t_final: float,
    n_max: int,
    qubit_index: int = 0,
    sample_dt: Optional[float] = None,
    threshold: float = 1e-4,
) -> ConvergenceReport:
    """Compare excitation probabilities at cutoffs n_max and n_max + 1."""
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    if sample_dt is None:
        sample_dt = t_final / 1000.0
    base = replace(params, n_max=n_max)
    bigger = replace(params, n_max=n_max + 1)
    p_base = propagate(base, schedule, t_final, sample_dt).excitation_probabilities(
        qubit_index
    )
    p_bigger = propagate(
        bigger, schedule, t_final, sample_dt
    ).excitation_probabilities(qubit_index)
    sup = float(np.max(np.abs(p_base - p_bigger)))
    return ConvergenceReport(
        n_max=n_max,
        sup_difference=sup,
        threshold=threshold,
        converged=sup <= threshold,
    )
