"""Order-by-order perturbative solution over the switching grid.

Each order-j coefficient obeys a first-order linear ODE driven by the
order-(j-1) coefficients times the square-wave coupling.  Within one
half-period the coupling is constant, so the solution is exact over the
exponential-polynomial algebra: multiply by the interaction phase,
integrate in closed form, and match the value at the segment boundary.
Coefficients are stored per segment in local time (t measured from the
segment start), which keeps polynomial powers small and boundary matching
exact.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .exppoly import ExpPoly, linear_combination
from .hilbert import BasisState, HilbertSpace, StateVector
from .model import CouplingSchedule, SystemParams, coupling_terms, switching_grid


def interaction_adjacency(space: HilbertSpace) -> list[list[tuple[int, float]]]:
    """For each basis state, the (source index, weight) pairs coupled to it."""
    adj: list[list[tuple[int, float]]] = [[] for _ in range(space.dim)]
    for row, col, weight in coupling_terms(space):
        adj[row].append((col, weight))
        adj[col].append((row, weight))
    return adj


@dataclass(frozen=True)
class OrderTable:
    """Coefficients of one perturbative order: state index -> per-segment polys."""

    order: int
    coefficients: dict[int, list[ExpPoly]]
    dropped_couplings: int

    def support(self) -> tuple[int, ...]:
        return tuple(sorted(self.coefficients))


class PerturbativeSolution:
    """Piecewise-ExpPoly coefficients for orders 0..j of the expansion.

    Immutable once built; evaluation is pure and safe to run concurrently.
    """

    def __init__(
        self,
        params: SystemParams,
        schedule: CouplingSchedule,
        edges: np.ndarray,
        tables: tuple[OrderTable, ...],
    ):
        self.params = params
        self.schedule = schedule
        self.space = params.space()
        self.edges = edges
        self.tables = tables
        self.energies = np.asarray(
            params.omega_c * self.space.photon_counts
            + params.omega0 * self.space.excitation_counts,
            dtype=float,
        )

    @property
    def order(self) -> int:
        return len(self.tables) - 1

    @property
    def t_final(self) -> float:
        return float(self.edges[-1])

    @property
    def n_segments(self) -> int:
        return len(self.edges) - 1

    @property
    def dropped_couplings(self) -> tuple[int, ...]:
        """Per order, how many beyond-cutoff photon-raising couplings were dropped."""
        return tuple(table.dropped_couplings for table in self.tables)

    def extended(self, table: OrderTable) -> "PerturbativeSolution":
        if table.order != self.order + 1:
            raise ValueError(
                f"expected order {self.order + 1} table, got order {table.order}"
            )
        return PerturbativeSolution(
            self.params, self.schedule, self.edges, self.tables + (table,)
        )

    def support(self, order: int) -> tuple[int, ...]:
        return self.tables[order].support()

    def _locate(self, t: float) -> tuple[int, float]:
        t_final = self.t_final
        if t < 0 or t > t_final * (1 + 1e-12) + 1e-12:
            raise ValueError(f"t={t} outside [0, {t_final}]")
        k = int(np.searchsorted(self.edges, t, side="right")) - 1
        k = min(max(k, 0), self.n_segments - 1)
        return k, t - float(self.edges[k])

    def coefficient(self, order: int, state_index: int, t: float) -> complex:
        """alpha^(order) for one basis state at time t."""
        polys = self.tables[order].coefficients.get(state_index)
        if polys is None:
            return 0j
        k, tau = self._locate(t)
        return polys[k].eval(tau)

    def amplitudes(self, t: float, max_order: Optional[int] = None) -> np.ndarray:
        """Summed coefficients of orders 0..max_order at time t, one per basis state."""
        if max_order is None:
            max_order = self.order
        k, tau = self._locate(t)
        amps = np.zeros(self.space.dim, dtype=np.complex128)
        for table in self.tables[: max_order + 1]:
            for index, polys in table.coefficients.items():
                amps[index] += polys[k].eval(tau)
        return amps

    def assemble_state(self, t: float) -> StateVector:
        """Truncated perturbative state at time t (not exactly normalized)."""
        return StateVector(self.amplitudes(t), self.space)

    def excitation_probability(self, qubit_index: int, t: float) -> float:
        return pert_excitation_probability(self, qubit_index, t)

    def norm(self, t: float) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amplitudes(t)) ** 2)))


def zeroth_order(
    params: SystemParams,
    schedule: CouplingSchedule,
    t_final: float,
    initial: Optional[BasisState] = None,
) -> PerturbativeSolution:
    """Order-0 solution: the initial state evolving under its bare energy only.

    For the default ground-state start the coefficient is the constant 1;
    a nonzero-energy initial state carries its free phase exp(-i*E*t).
    """
    space = params.space()
    if initial is None:
        initial_index = space.ground_index()
    else:
        initial_index = space.index_of_state(initial)
    edges = switching_grid(schedule, t_final)
    energy = params.state_energy(
        int(space.excitation_counts[initial_index]),
        int(space.photon_counts[initial_index]),
    )
    polys = []
    for k in range(len(edges) - 1):
        phase = cmath.exp(-1j * energy * float(edges[k]))
        polys.append(ExpPoly.exponential(phase, -1j * energy))
    table = OrderTable(0, {initial_index: polys}, 0)
    return PerturbativeSolution(params, schedule, edges, (table,))


def next_order(prev: PerturbativeSolution) -> OrderTable:
    """Build order j = prev.order + 1 from the highest order already in prev.

    For each coupled state S the segment-wise ODE
    ``i dA/dt = E_S A + g * sum(couplings * alpha_prev)`` is solved exactly,
    with A continuous across segment boundaries and A(0) = 0.  Couplings
    that would raise the photon number beyond the cutoff are dropped and
    counted.
    """
    space = prev.space
    schedule = prev.schedule
    prev_table = prev.tables[-1].coefficients
    adjacency = interaction_adjacency(space)

    dropped = 0
    for index in prev_table:
        if prev.space.photon_counts[index] == space.n_max:
            dropped += space.n_qubits

    target_set: set[int] = set()
    for index in prev_table:
        target_set.update(j for j, _ in adjacency[index])
    targets = sorted(target_set)

    edges = prev.edges
    n_seg = len(edges) - 1
    durations = np.diff(edges)
    g0 = schedule.g0

    coefficients: dict[int, list[ExpPoly]] = {}
    for target in targets:
        energy = float(prev.energies[target])
        sources = [(w, s) for s, w in adjacency[target] if s in prev_table]
        a_start = 0j
        polys: list[ExpPoly] = []
        nonzero = False
        for k in range(n_seg):
            dt = float(durations[k])
            coupling_on = schedule.is_on(k) and g0 != 0.0
            if not coupling_on:
                if a_start == 0:
                    polys.append(ExpPoly.zero())
                else:
                    polys.append(ExpPoly.exponential(a_start, -1j * energy))
                    a_start = a_start * cmath.exp(-1j * energy * dt)
                    nonzero = True
                continue
            rhs = linear_combination(
                [(w, prev_table[s][k]) for w, s in sources]
            )
            if rhs.is_zero() and a_start == 0:
                polys.append(ExpPoly.zero())
                continue
            driven = rhs.mul_exp(1j * energy).integrate_from(0.0).scale(-1j * g0)
            poly = driven.add(ExpPoly.constant(a_start)).mul_exp(-1j * energy)
            polys.append(poly)
            a_start = poly.eval(dt)
            nonzero = True
        if nonzero:
            coefficients[target] = polys
    return OrderTable(prev.order + 1, coefficients, dropped)


def run_to_order(
    params: SystemParams,
    schedule: CouplingSchedule,
    j_max: int,
    t_final: float,
    initial: Optional[BasisState] = None,
) -> PerturbativeSolution:
    """Iterate the recursion up to order j_max over the grid covering [0, t_final]."""
    if j_max < 0:
        raise ValueError(f"j_max must be >= 0, got {j_max}")
    solution = zeroth_order(params, schedule, t_final, initial)
    for _ in range(j_max):
        solution = solution.extended(next_order(solution))
    return solution


def pert_excitation_probability(
    solution: PerturbativeSolution, qubit_index: int, t: float
) -> float:
    """Excitation probability of one qubit from the truncated expansion.

    The expansion parameter is absorbed into g_eff, and the truncated state
    is deliberately not renormalized: probabilities exceeding the weak-drive
    scale near a resonance are the breakdown diagnostic, not an error.
    """
    space = solution.space
    if not 0 <= qubit_index < space.n_qubits:
        raise ValueError(
            f"qubit_index={qubit_index} outside [0, {space.n_qubits - 1}]"
        )
    amps = solution.amplitudes(t)
    weights = np.abs(amps) ** 2
    mask = space.bit_table[:, qubit_index].astype(bool)
    return float(weights[mask].sum())
