"""Free-fermion dynamics of the entangling bus.

The bus is an open hopping chain H1 with (H1)[n,n] = u_n and
(H1)[n,n+1] = -j_n.  With the angular-momentum profile
j_n = (J/2) sqrt(n(N-n)) and uniform on-site energy u_n = B, evolving for
tau = pi/J mirror-inverts every site: |n> -> exp(i*phi1) |N-n+1> with
phi1 = pi*S + phi_B, S = (N-1)/2, phi_B = -B*pi/J.  Choosing B = S*J makes
phi1 vanish.  On multi-fermion occupation states the same evolution
bit-reverses the occupations and multiplies by exp(i*Q*phi1) times the
reordering sign (-1)^(Q(Q-1)/2) of the Q fermions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import UnsupportedProfileError
from .propagation import hermitian_propagator

# relative tolerance for recognizing the angular-momentum profile
PROFILE_RTOL = 1e-9

# magnitudes below this report phase 0 (the phase of a vanishing amplitude
# is numerical noise)
ZERO_MAGNITUDE = 1e-12


def _readonly(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class ChainSpec:
    """Open hopping chain: couplings j[1..N-1], on-site energies u[1..N].

    ``j_scale`` is the overall coupling scale J and ``field`` the uniform
    field B used by the angular-momentum constructors; both are retained so
    the inversion time and transfer phases can be derived from the spec.
    """

    n_sites: int
    couplings: np.ndarray
    onsite: np.ndarray
    j_scale: float
    field: float

    def __post_init__(self):
        if self.n_sites < 2:
            raise ValueError(f"chain needs at least 2 sites, got {self.n_sites}")
        couplings = _readonly(self.couplings)
        onsite = _readonly(self.onsite)
        if couplings.shape != (self.n_sites - 1,):
            raise ValueError(
                f"expected {self.n_sites - 1} couplings, got shape {couplings.shape}"
            )
        if onsite.shape != (self.n_sites,):
            raise ValueError(
                f"expected {self.n_sites} on-site energies, got shape {onsite.shape}"
            )
        if np.any(couplings <= 0.0):
            raise ValueError("all couplings must be positive")
        object.__setattr__(self, "couplings", couplings)
        object.__setattr__(self, "onsite", onsite)

    @property
    def spin(self) -> float:
        """Effective spin S = (N-1)/2 of the single-particle sector."""
        return (self.n_sites - 1) / 2.0


@dataclass(frozen=True)
class SingleParticlePropagator:
    """Unitary exp(-i*t*H1) on the N-dimensional single-particle space."""

    matrix: np.ndarray
    time: float

    def __post_init__(self):
        mat = np.array(self.matrix, dtype=complex)
        mat.setflags(write=False)
        n = mat.shape[0]
        if mat.shape != (n, n):
            raise ValueError(f"propagator must be square, got shape {mat.shape}")
        defect = np.max(np.abs(mat.conj().T @ mat - np.eye(n)))
        if defect >= 1e-10:
            raise ValueError(f"propagator is not unitary: max defect {defect:.3e}")
        object.__setattr__(self, "matrix", mat)

    @property
    def n_sites(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class OccupationState:
    """Fermionic occupation pattern q_1..q_N with q_n in {0, 1}."""

    bits: tuple[int, ...]

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if any(b not in (0, 1) for b in bits):
            raise ValueError(f"occupations must be 0 or 1, got {self.bits}")
        object.__setattr__(self, "bits", bits)

    @property
    def n_sites(self) -> int:
        return len(self.bits)

    @property
    def total(self) -> int:
        """Number of fermions Q."""
        return sum(self.bits)

    def reversed(self) -> "OccupationState":
        return OccupationState(self.bits[::-1])


def hopping_profile_alpha(n_sites: int) -> np.ndarray:
    """Dimensionless hopping profile alpha_n = 2 sqrt((n/N)(1 - n/N)), n = 1..N-1.

    The angular-momentum couplings factor as j_n = W * alpha_n with
    W = J*N/4, so 0 < alpha_n <= 1.
    """
    n = np.arange(1, n_sites)
    x = n / n_sites
    return 2.0 * np.sqrt(x * (1.0 - x))


def angular_momentum_couplings(n_sites: int, j_scale: float) -> np.ndarray:
    """Couplings j_n = (J/2) sqrt(n(N-n)) for n = 1..N-1."""
    n = np.arange(1, n_sites)
    return 0.5 * j_scale * np.sqrt(n * (n_sites - n))


def build_angular_momentum_chain(n_sites: int, j_scale: float, field: float = 0.0) -> ChainSpec:
    """Build the mirror-inverting chain: j_n = (J/2) sqrt(n(N-n)), u_n = B."""
    if n_sites < 2:
        raise ValueError(f"n_sites must be >= 2, got {n_sites}")
    if j_scale <= 0.0:
        raise ValueError(f"j_scale must be positive, got {j_scale}")
    return ChainSpec(
        n_sites=n_sites,
        couplings=angular_momentum_couplings(n_sites, j_scale),
        onsite=np.full(n_sites, float(field)),
        j_scale=float(j_scale),
        field=float(field),
    )


def resonant_field(n_sites: int, j_scale: float) -> float:
    """Field B = S*J, S = (N-1)/2, that cancels the single-particle transfer phase."""
    if n_sites < 2:
        raise ValueError(f"n_sites must be >= 2, got {n_sites}")
    return 0.5 * j_scale * (n_sites - 1)


def build_resonant_chain(n_sites: int, j_scale: float = 1.0) -> ChainSpec:
    """Angular-momentum chain at the phase-cancelling field B = S*J."""
    return build_angular_momentum_chain(n_sites, j_scale, resonant_field(n_sites, j_scale))


def _require_angular_momentum(chain: ChainSpec) -> None:
    expected_j = angular_momentum_couplings(chain.n_sites, chain.j_scale)
    j_dev = np.max(np.abs(chain.couplings - expected_j) / expected_j)
    u_dev = np.max(np.abs(chain.onsite - chain.field))
    u_scale = max(abs(chain.field), 1.0)
    if j_dev > PROFILE_RTOL or u_dev > PROFILE_RTOL * u_scale:
        raise UnsupportedProfileError(
            f"chain does not follow the angular-momentum profile "
            f"(coupling deviation {j_dev:.3e}, on-site deviation {u_dev:.3e})"
        )


def inversion_time(chain: ChainSpec) -> float:
    """Mirror-inversion time tau = pi/J of an angular-momentum chain."""
    _require_angular_momentum(chain)
    return np.pi / chain.j_scale


def single_particle_hamiltonian(chain: ChainSpec) -> np.ndarray:
    """Dense N x N matrix with u_n on the diagonal and -j_n on the off-diagonals."""
    h = np.diag(chain.onsite.astype(complex))
    idx = np.arange(chain.n_sites - 1)
    h[idx, idx + 1] = -chain.couplings
    h[idx + 1, idx] = -chain.couplings
    return h


def single_particle_propagator(chain: ChainSpec, t: float) -> SingleParticlePropagator:
    """exp(-i*t*H1) computed by Hermitian eigendecomposition."""
    matrix = hermitian_propagator(single_particle_hamiltonian(chain), t)
    return SingleParticlePropagator(matrix=matrix, time=float(t))


def mirror_report(prop: SingleParticlePropagator) -> list[tuple[float, float]]:
    """Mirror transfer amplitudes: (|<n̄|U|n>|, arg) per site, n̄ = N-n+1.

    For a resonant angular-momentum chain at t = tau all magnitudes are 1
    and all phases vanish.  Phases of amplitudes below 1e-12 are reported
    as 0.
    """
    n = prop.n_sites
    report = []
    for site in range(1, n + 1):
        amp = prop.matrix[n - site, site - 1]
        mag = abs(amp)
        phase = float(np.angle(amp)) if mag >= ZERO_MAGNITUDE else 0.0
        report.append((float(mag), phase))
    return report


def transfer_phase(chain: ChainSpec) -> float:
    """Per-fermion transfer phase phi1 = pi*S + phi_B with phi_B = -B*pi/J."""
    return np.pi * chain.spin - chain.field * np.pi / chain.j_scale


def fock_evolve(state: OccupationState, chain: ChainSpec) -> tuple[OccupationState, complex]:
    """Evolve an occupation state through one inversion time.

    Returns the bit-reversed occupations together with the exact phase
    exp(i*Q*phi1) * exp(-i*pi*Q(Q-1)/2): each of the Q fermions picks up
    the transfer phase phi1, and restoring lattice operator ordering after
    the inversion costs Q(Q-1)/2 anticommutations.  At B = S*J this reduces
    to the pure reordering sign.
    """
    if state.n_sites != chain.n_sites:
        raise ValueError(
            f"state has {state.n_sites} sites but chain has {chain.n_sites}"
        )
    _require_angular_momentum(chain)
    q = state.total
    pair_sign = q * (q - 1) // 2
    phase = np.exp(1j * q * transfer_phase(chain)) * np.exp(-1j * np.pi * pair_sign)
    return state.reversed(), complex(phase)
