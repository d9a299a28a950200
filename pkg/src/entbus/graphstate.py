"""Compile target graphs into bus schedules, co-simulate, and verify.

A schedule is an ordered list of bus cycles.  Each cycle first transfers
register qubits into bus sites (ideal swaps), then lets the bus run for one
inversion time (all pairwise controlled-sz plus the position reversal), and
finally withdraws qubits from the listed sites.  Qubits may stay in the bus
across cycles; the reversal moves a qubit at site s to site N_eb - s + 1.

The iterative compiler processes vertices in ascending order.  For vertex g
with forward neighborhood g_c it runs one cycle connecting {g} u g_c
completely, withdraws g, and runs a second cycle whose pair toggles erase
the unwanted g_c-internal connections (controlled-sz is an involution).
That is at most two cycles per vertex, hence at most 2n cycles overall.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import chain as chains
from .errors import DimensionCapError, GraphFormatError, ScheduleError
from .propagation import hermitian_propagator
from .statevector import (
    PureState,
    apply_cz,
    apply_hadamard,
    apply_reversal,
    apply_swap,
    apply_unitary,
    basis_state,
    build_spin_hamiltonian,
    pauli_expectation,
    spin_params_from_chain,
)

HAMILTONIAN_ENGINE_CAP = 14
CIRCUIT_ENGINE_CAP = 18

# type of the pluggable placement policy: (group members, bus size) -> sites
SitePolicy = Callable[[tuple[int, ...], int], Sequence[int]]


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices 1..n."""

    n_vertices: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self):
        if self.n_vertices < 1:
            raise GraphFormatError(f"need at least one vertex, got {self.n_vertices}")
        normalized = set()
        for edge in self.edges:
            a, b = edge
            if a == b:
                raise GraphFormatError(f"self-loop on vertex {a}")
            if not (1 <= a <= self.n_vertices and 1 <= b <= self.n_vertices):
                raise GraphFormatError(f"edge {edge} outside 1..{self.n_vertices}")
            normalized.add((min(a, b), max(a, b)))
        object.__setattr__(self, "edges", frozenset(normalized))

    @classmethod
    def from_edges(cls, n_vertices: int, edges) -> "Graph":
        return cls(n_vertices, frozenset(tuple(e) for e in edges))

    @classmethod
    def complete(cls, n_vertices: int) -> "Graph":
        return cls.from_edges(n_vertices, itertools.combinations(range(1, n_vertices + 1), 2))

    def neighbors(self, vertex: int) -> tuple[int, ...]:
        out = [b if a == vertex else a for a, b in self.edges if vertex in (a, b)]
        return tuple(sorted(out))

    def forward_neighbors(self, vertex: int) -> tuple[int, ...]:
        return tuple(v for v in self.neighbors(vertex) if v > vertex)


def parse_graph(text: str) -> Graph:
    """Edge-list format: first line ``vertices n``, then one ``u v`` per line."""
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise GraphFormatError("empty graph file")
    head = lines[0].split()
    if len(head) != 2 or head[0] != "vertices":
        raise GraphFormatError(f"first line must be 'vertices n', got {lines[0]!r}")
    try:
        n = int(head[1])
    except ValueError as exc:
        raise GraphFormatError(f"bad vertex count {head[1]!r}") from exc
    edges = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise GraphFormatError(f"expected 'u v', got {ln!r}")
        try:
            edges.append((int(parts[0]), int(parts[1])))
        except ValueError as exc:
            raise GraphFormatError(f"bad edge line {ln!r}") from exc
    return Graph.from_edges(n, edges)


def load_graph(path) -> Graph:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_graph(fh.read())


@dataclass(frozen=True)
class Cycle:
    """One bus evolution: placements before, withdrawals after."""

    placements: tuple[tuple[int, int], ...]  # (register qubit, bus site)
    withdrawals: tuple[tuple[int, int], ...]  # (bus site, register qubit)


@dataclass(frozen=True)
class Schedule:
    n_eb: int
    cycles: tuple[Cycle, ...]
    mode: str

    @property
    def cycle_count(self) -> int:
        return len(self.cycles)


def _mirror(site: int, n_eb: int) -> int:
    return n_eb - site + 1


def required_bus_size(graph: Graph) -> int:
    """Sites needed by the iterative compiler: max group size 1 + |g_c|."""
    sizes = [1 + len(graph.forward_neighbors(g)) for g in range(1, graph.n_vertices + 1)]
    return max([2] + [s for s in sizes if s > 1])


def _check_sites_choice(sites: Sequence[int], m: int, n_eb: int) -> tuple[int, ...]:
    sites = tuple(int(s) for s in sites)
    if len(sites) != m or len(set(sites)) != m:
        raise ScheduleError(f"need {m} distinct sites, got {sites}")
    if any(not 1 <= s <= n_eb for s in sites):
        raise ScheduleError(f"sites {sites} outside 1..{n_eb}")
    return sites


def schedule_iterative(
    graph: Graph,
    n_eb: int | None = None,
    optimize: bool = True,
    site_policy: SitePolicy | None = None,
) -> Schedule:
    """Compile ``graph`` into at most 2n bus cycles.

    With ``optimize`` on (the default) a vertex whose forward neighborhood
    is a single qubit gets one cycle instead of two, and when the whole
    remaining graph is complete on the current group a single cycle
    finishes the job.  ``optimize=False`` reproduces the literal
    two-cycles-per-vertex procedure used for the bound.
    """
    if n_eb is None:
        n_eb = required_bus_size(graph)
    remaining = set(graph.edges)
    cycles: list[Cycle] = []
    for g in range(1, graph.n_vertices + 1):
        g_c = graph.forward_neighbors(g)
        if not g_c:
            continue
        members = (g,) + g_c
        m = len(members)
        if m > n_eb:
            raise ScheduleError(
                f"group of vertex {g} needs {m} bus sites but the bus has {n_eb}"
            )
        sites = tuple(range(1, m + 1)) if site_policy is None else site_policy(members, n_eb)
        sites = _check_sites_choice(sites, m, n_eb)
        placements = tuple(zip(members, sites))
        all_pairs = set(itertools.combinations(sorted(members), 2))
        if optimize and remaining == all_pairs:
            # one cycle completes every remaining edge at once
            withdrawals = tuple(
                (_mirror(s, n_eb), v) for v, s in zip(members, sites)
            )
            cycles.append(Cycle(placements, withdrawals))
            remaining.clear()
            break
        if optimize and len(g_c) == 1:
            withdrawals = tuple(
                (_mirror(s, n_eb), v) for v, s in zip(members, sites)
            )
            cycles.append(Cycle(placements, withdrawals))
        else:
            cycles.append(Cycle(placements, ((_mirror(sites[0], n_eb), g),)))
            cycles.append(Cycle((), tuple((s, v) for v, s in zip(members[1:], sites[1:]))))
        remaining -= {(g, v) for v in g_c}
    return Schedule(n_eb=n_eb, cycles=tuple(cycles), mode="optimized" if optimize else "iterative")


def schedule_edgewise(graph: Graph, n_eb: int = 2) -> Schedule:
    """One cycle per edge: the two-qubit baseline with |E| cycles."""
    if n_eb < 2:
        raise ScheduleError(f"edgewise scheduling needs at least 2 bus sites, got {n_eb}")
    cycles = []
    for a, b in sorted(graph.edges):
        placements = ((a, 1), (b, 2))
        withdrawals = ((_mirror(1, n_eb), a), (_mirror(2, n_eb), b))
        cycles.append(Cycle(placements, withdrawals))
    return Schedule(n_eb=n_eb, cycles=tuple(cycles), mode="edgewise")


class _BusTracker:
    """Classical occupancy bookkeeping shared by the tracker and the simulator."""

    def __init__(self, n_vertices: int, n_eb: int):
        self.n_vertices = n_vertices
        self.n_eb = n_eb
        self.site_of: dict[int, int] = {}  # vertex -> site, absent = in register

    def place(self, vertex: int, site: int) -> None:
        if not 1 <= vertex <= self.n_vertices:
            raise ScheduleError(f"unknown register qubit {vertex}")
        if not 1 <= site <= self.n_eb:
            raise ScheduleError(f"bus site {site} outside 1..{self.n_eb}")
        if vertex in self.site_of:
            raise ScheduleError(f"qubit {vertex} is already in the bus")
        if site in self.site_of.values():
            raise ScheduleError(f"transfer into occupied bus site {site}")
        self.site_of[vertex] = site

    def invert(self) -> None:
        self.site_of = {v: _mirror(s, self.n_eb) for v, s in self.site_of.items()}

    def co_present(self) -> tuple[int, ...]:
        return tuple(sorted(self.site_of))

    def withdraw(self, site: int, vertex: int) -> None:
        occupant = next((v for v, s in self.site_of.items() if s == site), None)
        if occupant is None:
            raise ScheduleError(f"withdrawal from vacuum bus site {site}")
        if occupant != vertex:
            raise ScheduleError(
                f"inconsistent withdrawal: site {site} holds qubit {occupant}, "
                f"not {vertex}"
            )
        del self.site_of[vertex]

    @property
    def empty(self) -> bool:
        return not self.site_of


def track_edges(schedule: Schedule, n_vertices: int) -> frozenset[tuple[int, int]]:
    """Classical edge oracle: controlled-sz toggles every co-present pair."""
    tracker = _BusTracker(n_vertices, schedule.n_eb)
    edges: set[tuple[int, int]] = set()
    for cycle in schedule.cycles:
        for vertex, site in cycle.placements:
            tracker.place(vertex, site)
        for pair in itertools.combinations(tracker.co_present(), 2):
            edges.symmetric_difference_update({pair})
        tracker.invert()
        for site, vertex in cycle.withdrawals:
            tracker.withdraw(site, vertex)
    return frozenset(edges)


def _bus_circuit_step(state: PureState, n_reg: int, n_eb: int) -> PureState:
    for a, b in itertools.combinations(range(1, n_eb + 1), 2):
        state = apply_cz(state, n_reg + a, n_reg + b)
    return apply_reversal(state, first=n_reg + 1, last=n_reg + n_eb)


def _vacuum_weight(state: PureState, n_reg: int) -> float:
    """Probability that all qubits beyond the register read 0."""
    extra = state.n_qubits - n_reg
    block = state.amplitudes.reshape(2**n_reg, 2**extra)
    return float(np.sum(np.abs(block[:, 0]) ** 2))


def simulate_schedule(
    graph: Graph,
    schedule: Schedule,
    engine: str = "circuit",
    check_vacuum: bool = True,
) -> PureState:
    """Run the register + bus simulation and return the joint final state.

    Register qubits are 1..n, bus sites occupy qubits n+1..n+N_eb.  All
    graph vertices start in |+>, the bus in vacuum.  Transfers are ideal
    swaps.  Whenever the bookkeeping says the bus emptied, the quantum bus
    state is checked to be vacuum (fidelity > 1 - 1e-9).
    """
    n = graph.n_vertices
    n_eb = schedule.n_eb
    total = n + n_eb
    if engine == "hamiltonian":
        if total > HAMILTONIAN_ENGINE_CAP:
            raise DimensionCapError(
                f"{total} qubits exceeds the Hamiltonian-engine cap {HAMILTONIAN_ENGINE_CAP}"
            )
        spec = chains.build_resonant_chain(n_eb)
        bus_unitary = hermitian_propagator(
            build_spin_hamiltonian(spin_params_from_chain(spec)), chains.inversion_time(spec)
        )
    elif engine == "circuit":
        if total > CIRCUIT_ENGINE_CAP:
            raise DimensionCapError(
                f"{total} qubits exceeds the circuit-engine cap {CIRCUIT_ENGINE_CAP}"
            )
        bus_unitary = None
    else:
        raise ValueError(f"unknown engine {engine!r}")

    state = basis_state(total, index=0)
    for vertex in range(1, n + 1):
        state = apply_hadamard(state, vertex)

    tracker = _BusTracker(n, n_eb)
    bus_sites = list(range(n + 1, total + 1))
    for cycle_no, cycle in enumerate(schedule.cycles, start=1):
        for vertex, site in cycle.placements:
            tracker.place(vertex, site)
            state = apply_swap(state, vertex, n + site)
        if engine == "circuit":
            state = _bus_circuit_step(state, n, n_eb)
        else:
            state = apply_unitary(state, bus_unitary, bus_sites)
        tracker.invert()
        for site, vertex in cycle.withdrawals:
            tracker.withdraw(site, vertex)
            state = apply_swap(state, vertex, n + site)
        if check_vacuum and tracker.empty:
            weight = _vacuum_weight(state, n)
            if weight <= 1.0 - 1e-9:
                raise ScheduleError(
                    f"bus failed to disentangle after cycle {cycle_no}: "
                    f"vacuum weight {weight:.12f}"
                )
    return state


def register_state(state: PureState, n_reg: int) -> PureState:
    """Project out the trailing vacuum bus qubits and return the register state."""
    weight = _vacuum_weight(state, n_reg)
    if weight <= 1.0 - 1e-9:
        raise ValueError(f"bus is not in vacuum: weight {weight:.12f}")
    block = state.amplitudes.reshape(2**n_reg, -1)
    vec = block[:, 0]
    return PureState(vec / np.linalg.norm(vec), n_reg)


@dataclass(frozen=True)
class VerificationReport:
    expectations: tuple[float, ...]
    cycle_count: int | None
    bound: int | None
    passed: bool


def verify_graph_state(
    state: PureState,
    graph: Graph,
    cycle_count: int | None = None,
    bound: int | None = None,
    tol: float = 1e-8,
) -> VerificationReport:
    """Exact stabilizer expectations <X_a prod_{b~a} Z_b> per vertex.

    ``state`` may carry trailing non-vertex qubits (the bus); those must
    factor as |0>.  Passing additionally requires cycle_count <= bound when
    both are given.
    """
    n = graph.n_vertices
    if state.n_qubits < n:
        raise ValueError(f"state has {state.n_qubits} qubits, graph needs {n}")
    if state.n_qubits > n and _vacuum_weight(state, n) <= 1.0 - 1e-9:
        raise ValueError("non-vertex qubits do not factor as |0>")
    expectations = []
    for vertex in range(1, n + 1):
        string = {vertex: "X"}
        for other in graph.neighbors(vertex):
            string[other] = "Z"
        expectations.append(pauli_expectation(state, string))
    passed = all(e > 1.0 - tol for e in expectations)
    if cycle_count is not None and bound is not None:
        passed = passed and cycle_count <= bound
    return VerificationReport(tuple(expectations), cycle_count, bound, passed)


def schedule_to_text(schedule: Schedule) -> str:
    """Human-readable cycle listing used by the CLI export."""
    lines = [f"bus sites: {schedule.n_eb}", f"mode: {schedule.mode}",
             f"cycles: {schedule.cycle_count}"]
    for k, cycle in enumerate(schedule.cycles, start=1):
        place = ", ".join(f"q{v}->s{s}" for v, s in cycle.placements) or "-"
        draw = ", ".join(f"s{s}->q{v}" for s, v in cycle.withdrawals) or "-"
        lines.append(f"cycle {k}: place [{place}] withdraw [{draw}]")
    return "\n".join(lines)


def schedule_to_dict(schedule: Schedule) -> dict:
    return {
        "n_eb": schedule.n_eb,
        "mode": schedule.mode,
        "cycle_count": schedule.cycle_count,
        "cycles": [
            {
                "placements": [[v, s] for v, s in cycle.placements],
                "withdrawals": [[s, v] for s, v in cycle.withdrawals],
            }
            for cycle in schedule.cycles
        ],
    }
