"""The all-pairs CZ circuit equivalent to one bus inversion, and its checks.

One inversion of an N-site resonant bus acts on qubit states exactly like
the circuit C(N)·R: a controlled-sz between every distinct pair followed by
the position reversal R, times a constant spin-level phase
exp(i*N(N-1)*pi/4).  The phase comes from the -N*B/2 offset between the
spin Hamiltonian and its fermionic image (sz_n = 2 c+_n c_n - 1) evaluated
at B = S*J over tau = pi/J.  If all but q qubits are in |0>, C(N) reduces
to C(q) on the remaining qubits, wherever they sit, followed by the full
reversal.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import chain as chains
from .errors import DimensionCapError
from .propagation import hermitian_propagator
from .statevector import PureState, apply_reversal, basis_state, build_spin_hamiltonian, spin_params_from_chain

# dense unitary comparisons stop here
EQUIVALENCE_QUBIT_CAP = 8


@dataclass(frozen=True)
class PairCircuit:
    """All-pairs controlled-sz gate list with an optional trailing reversal."""

    n_qubits: int
    pairs: tuple[tuple[int, int], ...]
    reversal: bool = True

    def __post_init__(self):
        expected = tuple(itertools.combinations(range(1, self.n_qubits + 1), 2))
        if sorted(self.pairs) != sorted(expected):
            raise ValueError(
                f"pairs must cover all {len(expected)} unordered pairs of "
                f"1..{self.n_qubits}, got {len(self.pairs)}"
            )

    @property
    def gate_count(self) -> int:
        return len(self.pairs)


@dataclass(frozen=True)
class EquivalenceReport:
    n_qubits: int
    max_deviation: float
    passed: bool
    worst_column: int


@dataclass(frozen=True)
class ReductionReport:
    n_qubits: int
    trials: int
    max_deviation: float
    passed: bool
    worst_subset: tuple[int, ...]


def build_circuit(n_qubits: int) -> PairCircuit:
    """C(N)·R in canonical (lexicographic) gate order."""
    if n_qubits < 1:
        raise ValueError(f"n_qubits must be >= 1, got {n_qubits}")
    return PairCircuit(
        n_qubits=n_qubits,
        pairs=tuple(itertools.combinations(range(1, n_qubits + 1), 2)),
    )


def apply_circuit(state: PureState, circuit: PairCircuit) -> PureState:
    """Walk the gate list: each pair flips the sign of doubly-occupied labels,
    then the reversal permutes |q_1..q_N> to |q_N..q_1>."""
    if state.n_qubits != circuit.n_qubits:
        raise ValueError(
            f"state has {state.n_qubits} qubits, circuit expects {circuit.n_qubits}"
        )
    n = circuit.n_qubits
    idx = np.arange(state.dim)
    amps = state.amplitudes.copy()
    for a, b in circuit.pairs:
        both = ((idx >> (n - a)) & 1) & ((idx >> (n - b)) & 1)
        amps[both == 1] *= -1.0
    out = PureState(amps, n)
    return apply_reversal(out) if circuit.reversal else out


def circuit_matrix(circuit: PairCircuit) -> np.ndarray:
    """Dense unitary of C(N)·R; columns are apply_circuit images of basis states."""
    n = circuit.n_qubits
    if n > EQUIVALENCE_QUBIT_CAP:
        raise DimensionCapError(f"{n} qubits exceeds the dense {EQUIVALENCE_QUBIT_CAP}-qubit cap")
    dim = 2**n
    mat = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        mat[:, col] = apply_circuit(basis_state(n, index=col), circuit).amplitudes
    return mat


def predicted_global_phase(n_qubits: int, j_scale: float = 1.0) -> complex:
    """Spin-level constant exp(i*N*B*tau/2) = exp(i*N(N-1)*pi/4) at B = S*J.

    j_scale cancels out of the product B*tau; it is accepted so callers can
    state which bus they mean.
    """
    del j_scale
    return complex(np.exp(1j * n_qubits * (n_qubits - 1) * np.pi / 4.0))


def bus_unitary(n_qubits: int, j_scale: float = 1.0) -> np.ndarray:
    """Dense unitary of one resonant-bus inversion on the spin register."""
    spec = chains.build_resonant_chain(n_qubits, j_scale)
    hamiltonian = build_spin_hamiltonian(spin_params_from_chain(spec))
    return hermitian_propagator(hamiltonian, chains.inversion_time(spec))


def equivalence_check(n_qubits: int, j_scale: float = 1.0, tol: float = 1e-8) -> EquivalenceReport:
    """Compare the bus inversion against phase * C(N)·R column by column."""
    if not 2 <= n_qubits <= EQUIVALENCE_QUBIT_CAP:
        raise ValueError(f"n_qubits must be in 2..{EQUIVALENCE_QUBIT_CAP}, got {n_qubits}")
    u_spin = bus_unitary(n_qubits, j_scale)
    phase = predicted_global_phase(n_qubits, j_scale)
    circuit = build_circuit(n_qubits)
    max_dev = 0.0
    worst = 0
    for col in range(2**n_qubits):
        expected = phase * apply_circuit(basis_state(n_qubits, index=col), circuit).amplitudes
        dev = float(np.max(np.abs(u_spin[:, col] - expected)))
        if dev > max_dev:
            max_dev, worst = dev, col
    return EquivalenceReport(n_qubits, max_dev, max_dev < tol, worst)


def _embed_on_subset(sub_amps: np.ndarray, occupied: Sequence[int], n_qubits: int) -> PureState:
    """Tensor a state of the occupied qubits with |0> on all other qubits."""
    q = len(occupied)
    amps = np.zeros(2**n_qubits, dtype=complex)
    shifts = [n_qubits - site for site in occupied]
    for sub_index in range(2**q):
        full = 0
        for k in range(q):
            if (sub_index >> (q - 1 - k)) & 1:
                full |= 1 << shifts[k]
        amps[full] = sub_amps[sub_index]
    return PureState(amps, n_qubits)


def reduction_check(
    n_qubits: int,
    occupied: Sequence[int],
    sub_state: np.ndarray | None = None,
    rng: np.random.Generator | None = None,
    tol: float = 1e-8,
    u_spin: np.ndarray | None = None,
) -> float:
    """Deviation between bus evolution and [C(q) on ``occupied``] then full R.

    The remaining qubits start in |0>.  ``sub_state`` defaults to a random
    state on the occupied qubits.
    """
    occupied = tuple(sorted(occupied))
    if not occupied:
        raise ValueError("occupied subset must be nonempty")
    if occupied[0] < 1 or occupied[-1] > n_qubits:
        raise IndexError(f"occupied sites {occupied} out of range 1..{n_qubits}")
    q = len(occupied)
    if sub_state is None:
        rng = np.random.default_rng(0) if rng is None else rng
        sub_state = rng.standard_normal(2**q) + 1j * rng.standard_normal(2**q)
        sub_state /= np.linalg.norm(sub_state)
    state = _embed_on_subset(np.asarray(sub_state, dtype=complex), occupied, n_qubits)

    if u_spin is None:
        u_spin = bus_unitary(n_qubits)
    evolved = u_spin @ state.amplitudes

    expected = state
    for a, b in itertools.combinations(occupied, 2):
        idx = np.arange(expected.dim)
        both = ((idx >> (n_qubits - a)) & 1) & ((idx >> (n_qubits - b)) & 1)
        amps = expected.amplitudes.copy()
        amps[both == 1] *= -1.0
        expected = PureState(amps, n_qubits)
    expected = apply_reversal(expected)
    target = predicted_global_phase(n_qubits) * expected.amplitudes
    return float(np.max(np.abs(evolved - target)))


def reduction_trials(n_qubits: int, trials: int, seed: int = 0, tol: float = 1e-8) -> ReductionReport:
    """Run ``trials`` random-subset random-state reduction checks."""
    if not 2 <= n_qubits <= EQUIVALENCE_QUBIT_CAP:
        raise ValueError(f"n_qubits must be in 2..{EQUIVALENCE_QUBIT_CAP}, got {n_qubits}")
    rng = np.random.default_rng(seed)
    u_spin = bus_unitary(n_qubits)
    max_dev = 0.0
    worst: tuple[int, ...] = ()
    for _ in range(trials):
        q = int(rng.integers(1, n_qubits + 1))
        occupied = tuple(sorted(int(site) + 1 for site in rng.choice(n_qubits, size=q, replace=False)))
        dev = reduction_check(n_qubits, occupied, rng=rng, tol=tol, u_spin=u_spin)
        if dev > max_dev:
            max_dev, worst = dev, occupied
    return ReductionReport(n_qubits, trials, max_dev, max_dev < tol, worst)


@dataclass(frozen=True)
class FockLawReport:
    n_sites: int
    field: float
    max_deviation: float
    passed: bool
    worst_state: tuple[int, ...]


def fock_law_check(n_sites: int, j_scale: float = 1.0, field: float | None = None,
                   tol: float = 1e-8) -> FockLawReport:
    """Verify the occupation-sector phase law against exact spin evolution.

    Every basis state must evolve to its bit reversal with phase
    exp(i*Q*phi1 - i*pi*Q(Q-1)/2), up to the documented constant
    exp(i*N*B*tau/2).  Works at any field, not just the resonant one.
    """
    if not 2 <= n_sites <= EQUIVALENCE_QUBIT_CAP:
        raise ValueError(f"n_sites must be in 2..{EQUIVALENCE_QUBIT_CAP}, got {n_sites}")
    if field is None:
        field = chains.resonant_field(n_sites, j_scale)
    spec = chains.build_angular_momentum_chain(n_sites, j_scale, field)
    tau = chains.inversion_time(spec)
    u_spin = hermitian_propagator(build_spin_hamiltonian(spin_params_from_chain(spec)), tau)
    global_phase = np.exp(1j * n_sites * field * tau / 2.0)
    max_dev = 0.0
    worst: tuple[int, ...] = ()
    for col in range(2**n_sites):
        bits = tuple((col >> (n_sites - k)) & 1 for k in range(1, n_sites + 1))
        flipped, phase = chains.fock_evolve(chains.OccupationState(bits), spec)
        expected = np.zeros(2**n_sites, dtype=complex)
        row = 0
        for b in flipped.bits:
            row = (row << 1) | b
        expected[row] = global_phase * phase
        dev = float(np.max(np.abs(u_spin[:, col] - expected)))
        if dev > max_dev:
            max_dev, worst = dev, bits
    return FockLawReport(n_sites, float(field), max_dev, max_dev < tol, worst)
