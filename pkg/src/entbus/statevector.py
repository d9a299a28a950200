"""Dense state-vector simulator for small qubit registers.

Basis convention, used everywhere in the package: qubit 1 is the most
significant bit, so basis index i encodes |q_1 ... q_N> with
q_n = (i >> (N - n)) & 1.  The computational |1> marks an occupied mode
(an a-atom / spin-up), hence the magnetization operator sz below is
diag(-1, +1): eigenvalue +1 on |1>.  Stabilizer checks use the standard
Pauli matrices in which Z|0> = +|0>.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sparse

from .chain import ChainSpec
from .errors import DimensionCapError, PropagationError
from .propagation import PropagationInfo, expm_krylov, hermitian_propagator

DENSE_QUBIT_CAP = 14
SPARSE_QUBIT_CAP = 20
# above this dimension evolve() switches from eigendecomposition to Krylov
EIGH_DIM_CAP = 2**10

_ID2 = np.eye(2, dtype=complex)
_SX = np.array([[0, 1], [1, 0]], dtype=complex)
_SY = np.array([[0, 1j], [-1j, 0]], dtype=complex)  # |1> is the up state
_SZ = np.array([[-1, 0], [0, 1]], dtype=complex)  # +1 on the occupied state |1>

_HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2.0)

# standard-convention Paulis (Z|0> = +|0>), for stabilizer expectations
PAULI = {
    "I": _ID2,
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True)
class PureState:
    """Normalized state vector over N qubits, qubit 1 most significant."""

    amplitudes: np.ndarray
    n_qubits: int

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        amps.setflags(write=False)
        if amps.shape != (2**self.n_qubits,):
            raise ValueError(
                f"expected {2**self.n_qubits} amplitudes for {self.n_qubits} "
                f"qubits, got shape {amps.shape}"
            )
        norm_sq = float(np.sum(np.abs(amps) ** 2))
        if abs(norm_sq - 1.0) >= 1e-10:
            raise ValueError(f"state is not normalized: |norm^2 - 1| = {abs(norm_sq - 1.0):.3e}")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return self.amplitudes.size


@dataclass(frozen=True)
class SpinChainParams:
    """Couplings of the anisotropic chain: zz and xy per bond, z per site."""

    lambda_zz: np.ndarray
    lambda_z: np.ndarray
    lambda_xy: np.ndarray

    def __post_init__(self):
        zz = np.array(self.lambda_zz, dtype=float)
        z = np.array(self.lambda_z, dtype=float)
        xy = np.array(self.lambda_xy, dtype=float)
        n = z.size
        if zz.shape != (n - 1,) or xy.shape != (n - 1,):
            raise ValueError(
                f"bond arrays must have length {n - 1}: got zz {zz.shape}, xy {xy.shape}"
            )
        for arr in (zz, z, xy):
            arr.setflags(write=False)
        object.__setattr__(self, "lambda_zz", zz)
        object.__setattr__(self, "lambda_z", z)
        object.__setattr__(self, "lambda_xy", xy)

    @property
    def n_sites(self) -> int:
        return self.lambda_z.size


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, positive-semidefinite matrix on listed local dims."""

    matrix: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        mat = np.array(self.matrix, dtype=complex)
        mat.setflags(write=False)
        d = int(np.prod(self.dims))
        if mat.shape != (d, d):
            raise ValueError(f"expected {d}x{d} matrix for dims {self.dims}, got {mat.shape}")
        if abs(np.trace(mat).real - 1.0) >= 1e-9 or abs(np.trace(mat).imag) >= 1e-9:
            raise ValueError(f"trace must be 1, got {np.trace(mat):.12f}")
        if np.max(np.abs(mat - mat.conj().T)) >= 1e-9:
            raise ValueError("matrix is not Hermitian")
        min_eig = np.linalg.eigvalsh(mat)[0]
        if min_eig <= -1e-9:
            raise ValueError(f"matrix is not positive semidefinite: min eigenvalue {min_eig:.3e}")
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))

    def purity(self) -> float:
        return float(np.trace(self.matrix @ self.matrix).real)


def bits_to_index(bits: Sequence[int]) -> int:
    index = 0
    for b in bits:
        index = (index << 1) | int(b)
    return index


def index_to_bits(index: int, n_qubits: int) -> tuple[int, ...]:
    return tuple((index >> (n_qubits - n)) & 1 for n in range(1, n_qubits + 1))


def basis_state(n_qubits: int, bits: Sequence[int] | None = None, index: int | None = None) -> PureState:
    """Computational basis state from a bit pattern or a basis index."""
    if (bits is None) == (index is None):
        raise ValueError("give exactly one of bits or index")
    if bits is not None:
        if len(bits) != n_qubits:
            raise ValueError(f"expected {n_qubits} bits, got {len(bits)}")
        index = bits_to_index(bits)
    if not 0 <= index < 2**n_qubits:
        raise IndexError(f"basis index {index} out of range for {n_qubits} qubits")
    amps = np.zeros(2**n_qubits, dtype=complex)
    amps[index] = 1.0
    return PureState(amps, n_qubits)


def product_state(local_kets: Sequence[np.ndarray]) -> PureState:
    """Tensor product of normalized single-qubit kets (qubit 1 first)."""
    amps = np.array([1.0], dtype=complex)
    for ket in local_kets:
        amps = np.kron(amps, np.asarray(ket, dtype=complex))
    amps = amps / np.linalg.norm(amps)
    return PureState(amps, len(local_kets))


def plus_state(n_qubits: int) -> PureState:
    """|+>^n, the all-vertices starting state of every graph protocol."""
    amps = np.full(2**n_qubits, 2.0 ** (-n_qubits / 2.0), dtype=complex)
    return PureState(amps, n_qubits)


def spin_params_from_chain(chain: ChainSpec) -> SpinChainParams:
    """Chain couplings of the fermion picture, halved into spin language.

    j_n = 2*lambda_xy_n and u_n = B map the hopping chain onto the pure XY
    chain with uniform field B/2 on every site (the field is applied to all
    N sites, resolving the boundary ambiguity of the bond-indexed sum).
    """
    n = chain.n_sites
    return SpinChainParams(
        lambda_zz=np.zeros(n - 1),
        lambda_z=np.full(n, chain.field / 2.0),
        lambda_xy=chain.couplings / 2.0,
    )


def _site_operator(op: np.ndarray, site: int, n_qubits: int) -> sparse.csr_matrix:
    left = sparse.identity(2 ** (site - 1), dtype=complex, format="csr")
    right = sparse.identity(2 ** (n_qubits - site), dtype=complex, format="csr")
    return sparse.kron(sparse.kron(left, sparse.csr_matrix(op)), right, format="csr")


def _bond_operator(op_a: np.ndarray, op_b: np.ndarray, site: int, n_qubits: int) -> sparse.csr_matrix:
    left = sparse.identity(2 ** (site - 1), dtype=complex, format="csr")
    right = sparse.identity(2 ** (n_qubits - site - 1), dtype=complex, format="csr")
    pair = sparse.kron(sparse.csr_matrix(op_a), sparse.csr_matrix(op_b))
    return sparse.kron(sparse.kron(left, pair), right, format="csr")


def build_spin_hamiltonian(params: SpinChainParams) -> sparse.csr_matrix:
    """Sparse 2^N x 2^N chain Hamiltonian.

    H = sum_n lambda_zz_n sz_n sz_{n+1} + lambda_z_n sz_n
        - lambda_xy_n (sx_n sx_{n+1} + sy_n sy_{n+1})

    with sz = diag(-1, +1) so the field counts occupation.
    """
    n = params.n_sites
    if n > SPARSE_QUBIT_CAP:
        raise DimensionCapError(f"{n} qubits exceeds the {SPARSE_QUBIT_CAP}-qubit cap")
    h = sparse.csr_matrix((2**n, 2**n), dtype=complex)
    for site in range(1, n + 1):
        if params.lambda_z[site - 1] != 0.0:
            h = h + params.lambda_z[site - 1] * _site_operator(_SZ, site, n)
    for bond in range(1, n):
        if params.lambda_zz[bond - 1] != 0.0:
            h = h + params.lambda_zz[bond - 1] * _bond_operator(_SZ, _SZ, bond, n)
        if params.lambda_xy[bond - 1] != 0.0:
            xy = _bond_operator(_SX, _SX, bond, n) + _bond_operator(_SY, _SY, bond, n)
            h = h - params.lambda_xy[bond - 1] * xy
    return h.tocsr()


def total_sz(n_qubits: int) -> sparse.csr_matrix:
    """Total magnetization sum_n sz_n (occupancy convention)."""
    out = sparse.csr_matrix((2**n_qubits, 2**n_qubits), dtype=complex)
    for site in range(1, n_qubits + 1):
        out = out + _site_operator(_SZ, site, n_qubits)
    return out.tocsr()


def evolve(state: PureState, hamiltonian, t: float, return_info: bool = False):
    """exp(-i*H*t)|psi>: eigendecomposition up to 2^10, Krylov stepping beyond."""
    dim = hamiltonian.shape[0]
    if dim != state.dim:
        raise ValueError(f"hamiltonian dim {dim} != state dim {state.dim}")
    if dim <= EIGH_DIM_CAP:
        amps = hermitian_propagator(hamiltonian, t) @ state.amplitudes
        info = PropagationInfo(steps=1, max_residual=0.0, max_krylov_dim=0)
    else:
        amps, info = expm_krylov(hamiltonian, state.amplitudes, t, tol=1e-10, return_info=True)
    norm = np.linalg.norm(amps)
    if abs(norm - 1.0) >= 1e-9:
        raise PropagationError(
            f"norm drifted to {norm:.12f} after {info.steps} steps "
            f"(max residual {info.max_residual:.3e})"
        )
    out = PureState(amps / norm, state.n_qubits)
    return (out, info) if return_info else out


def _check_sites(n_qubits: int, *sites: int) -> None:
    for site in sites:
        if not 1 <= site <= n_qubits:
            raise IndexError(f"site {site} out of range 1..{n_qubits}")
    if len(set(sites)) != len(sites):
        raise ValueError(f"sites must be distinct, got {sites}")


def apply_single_qubit(state: PureState, site: int, matrix: np.ndarray) -> PureState:
    _check_sites(state.n_qubits, site)
    tensor = state.amplitudes.reshape([2] * state.n_qubits)
    tensor = np.moveaxis(tensor, site - 1, -1)
    tensor = tensor @ matrix.T
    amps = np.moveaxis(tensor, -1, site - 1).reshape(-1)
    return PureState(amps, state.n_qubits)


def apply_hadamard(state: PureState, site: int) -> PureState:
    return apply_single_qubit(state, site, _HADAMARD)


def apply_cz(state: PureState, site_a: int, site_b: int) -> PureState:
    """Controlled-sz: flip the sign of every basis state with both bits set."""
    _check_sites(state.n_qubits, site_a, site_b)
    n = state.n_qubits
    idx = np.arange(state.dim)
    both = ((idx >> (n - site_a)) & 1) & ((idx >> (n - site_b)) & 1)
    amps = state.amplitudes * np.where(both, -1.0, 1.0)
    return PureState(amps, n)


def apply_swap(state: PureState, site_a: int, site_b: int) -> PureState:
    _check_sites(state.n_qubits, site_a, site_b)
    tensor = state.amplitudes.reshape([2] * state.n_qubits)
    amps = np.swapaxes(tensor, site_a - 1, site_b - 1).reshape(-1)
    return PureState(amps, state.n_qubits)


def apply_reversal(state: PureState, first: int = 1, last: int | None = None) -> PureState:
    """Reverse the basis-label order of sites first..last, with no phase."""
    last = state.n_qubits if last is None else last
    _check_sites(state.n_qubits, first)
    _check_sites(state.n_qubits, last)
    if first > last:
        raise ValueError(f"need first <= last, got {first} > {last}")
    axes = list(range(state.n_qubits))
    axes[first - 1:last] = axes[first - 1:last][::-1]
    tensor = state.amplitudes.reshape([2] * state.n_qubits)
    amps = np.transpose(tensor, axes).reshape(-1)
    return PureState(amps, state.n_qubits)


def apply_unitary(state: PureState, matrix: np.ndarray, sites: Sequence[int]) -> PureState:
    """Apply a 2^k x 2^k unitary to the listed k qubits (first site = MSB of the block)."""
    _check_sites(state.n_qubits, *sites)
    k = len(sites)
    if matrix.shape != (2**k, 2**k):
        raise ValueError(f"matrix shape {matrix.shape} does not fit {k} sites")
    n = state.n_qubits
    axes = [s - 1 for s in sites]
    rest = [a for a in range(n) if a not in axes]
    tensor = state.amplitudes.reshape([2] * n)
    tensor = np.transpose(tensor, axes + rest).reshape(2**k, -1)
    tensor = matrix @ tensor
    tensor = tensor.reshape([2] * n)
    inverse = np.argsort(axes + rest)
    amps = np.transpose(tensor, inverse).reshape(-1)
    return PureState(amps, n)


def partial_trace(state: PureState, keep_sites: Sequence[int]) -> DensityMatrix:
    """Reduced density matrix on ``keep_sites`` (row order follows the list)."""
    if len(keep_sites) == 0:
        raise ValueError("keep_sites must be nonempty")
    _check_sites(state.n_qubits, *keep_sites)
    n = state.n_qubits
    keep = [s - 1 for s in keep_sites]
    rest = [a for a in range(n) if a not in keep]
    tensor = state.amplitudes.reshape([2] * n)
    tensor = np.transpose(tensor, keep + rest)
    mat = tensor.reshape(2 ** len(keep), 2 ** len(rest))
    rho = mat @ mat.conj().T
    return DensityMatrix(rho, dims=(2,) * len(keep))


def fidelity(rho: DensityMatrix, target) -> float:
    """F = <target|rho|target> for a target pure state of matching dimension."""
    vec = target.amplitudes if isinstance(target, PureState) else np.asarray(target, dtype=complex)
    if vec.shape != (rho.matrix.shape[0],):
        raise ValueError(
            f"target dimension {vec.shape} does not match rho dimension {rho.matrix.shape}"
        )
    value = float(np.real(np.vdot(vec, rho.matrix @ vec)))
    if not -1e-9 <= value <= 1.0 + 1e-9:
        raise ValueError(f"fidelity {value} outside [0, 1]")
    return min(max(value, 0.0), 1.0)


def pauli_expectation(state: PureState, paulis: dict[int, str]) -> float:
    """<psi| P |psi> for a Pauli string {site: 'X'|'Y'|'Z'} (standard convention)."""
    psi = state
    for site, name in paulis.items():
        psi = apply_single_qubit(psi, site, PAULI[name])
    return float(np.real(np.vdot(state.amplitudes, psi.amplitudes)))


def overlap(a: PureState, b: PureState) -> complex:
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def states_match(a: PureState, b: PureState, tol: float = 1e-8, up_to_phase: bool = False) -> bool:
    """Elementwise equality of two states, optionally after removing a global phase."""
    if a.dim != b.dim:
        return False
    if not up_to_phase:
        return bool(np.max(np.abs(a.amplitudes - b.amplitudes)) < tol)
    inner = np.vdot(a.amplitudes, b.amplitudes)
    if abs(inner) < tol:
        return False
    phase = inner / abs(inner)
    return bool(np.max(np.abs(a.amplitudes * phase - b.amplitudes)) < tol)
