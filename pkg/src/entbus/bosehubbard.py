"""Two-species lattice bosons at unit filling: the bus-fidelity experiment.

H = sum_n [ (U^a/2) na(na-1) + (U^b/2) nb(nb-1) + U^ab na nb ]
    - sum_n [ t^a_n (a+_n a_{n+1} + h.c.) + t^b_n (b+_n b_{n+1} + h.c.) ]
    + (B/2) sum_n (na - nb)

With U^a = U^b = 2 U^ab = U and t^{a,b}_n = T sqrt(alpha_n) the strong
interaction limit realizes the mirror-inverting XY chain with
couplings (2T^2/U) alpha_n, i.e. J = 16 T^2 / (U N) and inversion time
tau = U N pi / (16 T^2).  The experiment prepares |+> |0>...|0> |+>
(one atom per site, |0> = b-atom), evolves the full boson model for tau,
and scores the end-site pair against the state an ideal XY chain produces,
optionally while the lattice depths jitter with laser-intensity noise.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np
import scipy.sparse as sparse

from . import chain as chains
from .errors import DimensionCapError
from .propagation import expm_krylov
from .statevector import (
    DensityMatrix,
    PureState,
    SpinChainParams,
    build_spin_hamiltonian,
    evolve,
    partial_trace,
    product_state,
    spin_params_from_chain,
)

_PLUS = np.array([1.0, 1.0]) / np.sqrt(2.0)
_ZERO = np.array([1.0, 0.0])


@dataclass(frozen=True)
class BhmConfig:
    """Engineered two-species lattice: U^a = U^b = 2 U^ab = U, t_n = T sqrt(alpha_n)."""

    n_sites: int = 6
    hop_scale: float = 1.0
    interaction: float = 26.0
    field: float | None = None  # None = resonant S*J
    n_max: int = 2
    basis_cap: int = 5_000_000

    def __post_init__(self):
        if self.n_sites < 2:
            raise ValueError(f"n_sites must be >= 2, got {self.n_sites}")
        if self.hop_scale <= 0 or self.interaction <= 0:
            raise ValueError("hop_scale and interaction must be positive")
        if self.n_max < 1:
            raise ValueError(f"n_max must be >= 1, got {self.n_max}")

    @property
    def u_over_t(self) -> float:
        return self.interaction / self.hop_scale

    @property
    def j_scale(self) -> float:
        """Effective XY chain scale J = 16 T^2 / (U N)."""
        return 16.0 * self.hop_scale**2 / (self.interaction * self.n_sites)

    @property
    def tau(self) -> float:
        """Inversion time tau = pi/J = U N pi / (16 T^2)."""
        return np.pi / self.j_scale

    @property
    def resolved_field(self) -> float:
        if self.field is not None:
            return self.field
        return chains.resonant_field(self.n_sites, self.j_scale)

    @property
    def hop_profile(self) -> np.ndarray:
        """Bond hoppings t_n = T sqrt(alpha_n)."""
        return self.hop_scale * np.sqrt(chains.hopping_profile_alpha(self.n_sites))

    def effective_chain(self) -> chains.ChainSpec:
        """The XY chain this lattice engineers (j_n = (J/2) sqrt(n(N-n)), u_n = B)."""
        return chains.build_angular_momentum_chain(self.n_sites, self.j_scale, self.resolved_field)


@dataclass(frozen=True)
class NoiseConfig:
    """Stochastic lattice-depth jitter: fractional std delta around s0 recoils."""

    delta: float = 0.0
    baseline_depth: float = 15.0
    correlation_time: float | None = None  # None = tau/100
    update_interval: float | None = None  # None = tau/1000
    seed: int = 0
    model: str = "ou"

    def __post_init__(self):
        if not 0.0 <= self.delta < 0.5:
            raise ValueError(f"delta must be in [0, 0.5), got {self.delta}")
        if self.baseline_depth <= 0:
            raise ValueError("baseline_depth must be positive")
        if self.model not in ("ou", "increment"):
            raise ValueError(f"model must be 'ou' or 'increment', got {self.model!r}")
        if (
            self.correlation_time is not None
            and self.update_interval is not None
            and self.update_interval > self.correlation_time
        ):
            raise ValueError("update_interval must not exceed correlation_time")


@dataclass(frozen=True)
class FidelityRecord:
    u_over_t: float
    delta_pct: float
    seed: int
    fidelity: float
    tau: float
    n_max: int
    basis_dim: int


@dataclass(frozen=True)
class SweepSummary:
    u_over_t: float
    delta_pct: float
    n_records: int
    mean_fidelity: float
    std_fidelity: float


def local_states(n_max: int) -> tuple[tuple[int, int], ...]:
    """Per-site occupations (n_a, n_b) with n_a + n_b <= n_max, lexicographic."""
    return tuple(
        (na, nb) for na in range(n_max + 1) for nb in range(n_max + 1 - na)
    )


def basis_dimension(n_sites: int, n_max: int, n_total: int | None = None) -> int:
    """Count N_tot-atom states by site-by-site convolution."""
    n_total = n_sites if n_total is None else n_total
    site_poly = np.zeros(n_max + 1, dtype=object)
    for t in range(n_max + 1):
        site_poly[t] = t + 1  # species choices for t atoms on one site
    count = np.array([1], dtype=object)
    for _ in range(n_sites):
        count = np.convolve(count, site_poly)
    return int(count[n_total]) if n_total < count.size else 0


class BosonicBasis:
    """All states of N_tot = n_sites atoms under the per-site cap.

    States are rows of local-state indices, ordered lexicographically with
    site 1 most significant, so row lookups reduce to a searchsorted on the
    packed integer keys.
    """

    def __init__(self, n_sites: int, n_max: int, basis_cap: int = 5_000_000):
        dim = basis_dimension(n_sites, n_max)
        if dim > basis_cap:
            raise DimensionCapError(f"basis dimension {dim} exceeds cap {basis_cap}")
        self.n_sites = n_sites
        self.n_max = n_max
        self.local_states = local_states(n_max)
        self.n_local = len(self.local_states)
        self.local_index = {state: k for k, state in enumerate(self.local_states)}

        rows: list[tuple[int, ...]] = []

        def fill(prefix: list[int], budget: int, sites_left: int):
            if sites_left == 0:
                if budget == 0:
                    rows.append(tuple(prefix))
                return
            for k, (na, nb) in enumerate(self.local_states):
                t = na + nb
                if t > budget or budget - t > (sites_left - 1) * n_max:
                    continue
                prefix.append(k)
                fill(prefix, budget - t, sites_left - 1)
                prefix.pop()

        fill([], n_sites, n_sites)
        self.locals = np.array(rows, dtype=np.int64)
        self.dim = self.locals.shape[0]
        assert self.dim == dim

        occs = np.array(self.local_states, dtype=np.int64)
        self.n_a = occs[self.locals, 0]  # (dim, n_sites)
        self.n_b = occs[self.locals, 1]

        if self.n_local ** self.n_sites >= 2**62:
            raise DimensionCapError("packed basis keys overflow int64")
        self._powers = self.n_local ** np.arange(n_sites - 1, -1, -1, dtype=np.int64)
        self.keys = self.locals @ self._powers  # ascending by construction

    def lookup(self, keys: np.ndarray) -> np.ndarray:
        rows = np.searchsorted(self.keys, keys)
        if np.any(self.keys[rows] != keys):
            raise KeyError("state outside the basis")
        return rows

    def index_of(self, locals_row: Sequence[int]) -> int:
        key = np.dot(np.asarray(locals_row, dtype=np.int64), self._powers)
        return int(self.lookup(np.array([key]))[0])


class LatticeOperators:
    """Prebuilt sparse pieces of the two-species Hamiltonian on a basis."""

    def __init__(self, basis: BosonicBasis, hop_profile: np.ndarray | None = None):
        self.basis = basis
        n_sites, n_max = basis.n_sites, basis.n_max
        if hop_profile is None:
            hop_profile = np.sqrt(chains.hopping_profile_alpha(n_sites))
        self.hop_profile = np.asarray(hop_profile, dtype=float)

        # diagonal pieces
        self.diag_int_a = np.sum(basis.n_a * (basis.n_a - 1), axis=1) / 2.0
        self.diag_int_b = np.sum(basis.n_b * (basis.n_b - 1), axis=1) / 2.0
        self.diag_int_ab = np.sum(basis.n_a * basis.n_b, axis=1).astype(float)
        self.diag_field = np.sum(basis.n_a - basis.n_b, axis=1) / 2.0

        # local transitions: add/remove one atom of a species, None = leaves basis
        add_a = np.full(basis.n_local, -1, dtype=np.int64)
        rem_a = np.full(basis.n_local, -1, dtype=np.int64)
        add_b = np.full(basis.n_local, -1, dtype=np.int64)
        rem_b = np.full(basis.n_local, -1, dtype=np.int64)
        f_add_a = np.zeros(basis.n_local)
        f_rem_a = np.zeros(basis.n_local)
        f_add_b = np.zeros(basis.n_local)
        f_rem_b = np.zeros(basis.n_local)
        for k, (na, nb) in enumerate(basis.local_states):
            if (na + 1, nb) in basis.local_index:
                add_a[k] = basis.local_index[(na + 1, nb)]
                f_add_a[k] = np.sqrt(na + 1.0)
            if (na, nb + 1) in basis.local_index:
                add_b[k] = basis.local_index[(na, nb + 1)]
                f_add_b[k] = np.sqrt(nb + 1.0)
            if na > 0:
                rem_a[k] = basis.local_index[(na - 1, nb)]
                f_rem_a[k] = np.sqrt(na)
            if nb > 0:
                rem_b[k] = basis.local_index[(na, nb - 1)]
                f_rem_b[k] = np.sqrt(nb)

        self.hop_a = self._hop_matrix(add_a, rem_a, f_add_a, f_rem_a)
        self.hop_b = self._hop_matrix(add_b, rem_b, f_add_b, f_rem_b)

    def _hop_matrix(self, add, rem, f_add, f_rem) -> sparse.csr_matrix:
        """sum_n sqrt(alpha_n) (a+_n a_{n+1} + h.c.) for one species."""
        basis = self.basis
        rows_all, cols_all, vals_all = [], [], []
        for bond in range(basis.n_sites - 1):
            l_left = basis.locals[:, bond]
            l_right = basis.locals[:, bond + 1]
            valid = (add[l_left] >= 0) & (rem[l_right] >= 0)
            cols = np.nonzero(valid)[0]
            if cols.size == 0:
                continue
            new_keys = (
                basis.keys[cols]
                + (add[l_left[cols]] - l_left[cols]) * basis._powers[bond]
                + (rem[l_right[cols]] - l_right[cols]) * basis._powers[bond + 1]
            )
            rows = basis.lookup(new_keys)
            vals = self.hop_profile[bond] * f_add[l_left[cols]] * f_rem[l_right[cols]]
            rows_all.append(rows)
            cols_all.append(cols)
            vals_all.append(vals)
        if not rows_all:
            return sparse.csr_matrix((basis.dim, basis.dim))
        rows = np.concatenate(rows_all)
        cols = np.concatenate(cols_all)
        vals = np.concatenate(vals_all)
        forward = sparse.coo_matrix((vals, (rows, cols)), shape=(basis.dim, basis.dim))
        return (forward + forward.T).tocsr()

    def hamiltonian(self, t_a: float, t_b: float, u_a: float, u_b: float,
                    u_ab: float, field: float) -> sparse.csr_matrix:
        """Assemble H for instantaneous coupling scales (profile stays alpha_n)."""
        diag = (
            u_a * self.diag_int_a
            + u_b * self.diag_int_b
            + u_ab * self.diag_int_ab
            + field * self.diag_field
        )
        h = sparse.diags(diag, format="csr", dtype=float)
        if t_a != 0.0:
            h = h - t_a * self.hop_a
        if t_b != 0.0:
            h = h - t_b * self.hop_b
        return h.tocsr()


def enumerate_basis(config: BhmConfig) -> BosonicBasis:
    """All N_tot = n_sites atom states under the occupancy cap of ``config``."""
    return BosonicBasis(config.n_sites, config.n_max, config.basis_cap)


def build_bhm(config: BhmConfig, couplings: dict | None = None,
              operators: LatticeOperators | None = None) -> sparse.csr_matrix:
    """Sparse Hamiltonian for the engineered (or explicitly given) couplings.

    ``couplings`` may override any of t_a, t_b, u_a, u_b, u_ab, field as
    instantaneous scalar scales; the spatial hopping profile stays alpha_n.
    """
    if operators is None:
        operators = LatticeOperators(enumerate_basis(config))
    values = {
        "t_a": config.hop_scale,
        "t_b": config.hop_scale,
        "u_a": config.interaction,
        "u_b": config.interaction,
        "u_ab": config.interaction / 2.0,
        "field": config.resolved_field,
    }
    if couplings:
        unknown = set(couplings) - set(values)
        if unknown:
            raise ValueError(f"unknown couplings {sorted(unknown)}")
        values.update(couplings)
    return operators.hamiltonian(**values)


def spin_couplings_from_bhm(t_a, t_b, u_a: float, u_b: float, u_ab: float,
                            field: float) -> SpinChainParams:
    """Second-order superexchange couplings of the effective spin chain.

    lambda_zz_n = (t_a^2 + t_b^2)/(2 u_ab) - t_a^2/u_a - t_b^2/u_b
    lambda_z_n  = 4 (t_a^2/u_a - t_b^2/u_b) + B/2
    lambda_xy_n = t_a t_b / u_ab

    The bond-indexed lambda_z contributions sit on sites 1..N-1; site N
    carries the bare B/2 (the field acts on every site).
    """
    t_a = np.atleast_1d(np.asarray(t_a, dtype=float))
    t_b = np.atleast_1d(np.asarray(t_b, dtype=float))
    if t_a.shape != t_b.shape:
        raise ValueError(f"hopping arrays differ in shape: {t_a.shape} vs {t_b.shape}")
    if min(u_a, u_b, u_ab) <= 0.0:
        raise ValueError("interaction energies must be positive")
    lambda_zz = (t_a**2 + t_b**2) / (2.0 * u_ab) - t_a**2 / u_a - t_b**2 / u_b
    lambda_z_bonds = 4.0 * (t_a**2 / u_a - t_b**2 / u_b) + field / 2.0
    lambda_xy = t_a * t_b / u_ab
    lambda_z = np.append(lambda_z_bonds, field / 2.0)
    return SpinChainParams(lambda_zz=lambda_zz, lambda_z=lambda_z, lambda_xy=lambda_xy)


@dataclass(frozen=True)
class NoiseTrajectories:
    """Piecewise-constant lattice depths per species on the update grid."""

    update_interval: float
    depths_a: np.ndarray
    depths_b: np.ndarray

    @property
    def n_steps(self) -> int:
        return self.depths_a.size


def _resolve_noise_times(noise: NoiseConfig, duration: float) -> tuple[float, float]:
    t_corr = duration / 100.0 if noise.correlation_time is None else noise.correlation_time
    dt = duration / 1000.0 if noise.update_interval is None else noise.update_interval
    if dt > t_corr:
        raise ValueError(f"update interval {dt} exceeds correlation time {t_corr}")
    return t_corr, dt


def sample_noise(noise: NoiseConfig, duration: float) -> NoiseTrajectories:
    """Draw the two independent depth trajectories for one run.

    model='ou': stationary mean-reverting jitter with std delta*s0 and the
    configured correlation time (the first sample is drawn from the
    stationary distribution).  model='increment': a plain random walk with
    per-unit-time variance (delta*s0)^2 starting at s0.  Depths are floored
    at 0.01*s0; at the supported delta < 0.5 the floor is effectively dead.
    """
    if duration <= 0:
        raise ValueError(f"duration must be positive, got {duration}")
    t_corr, dt = _resolve_noise_times(noise, duration)
    n_steps = int(np.ceil(duration / dt))
    s0 = noise.baseline_depth
    sigma = noise.delta * s0
    rng = np.random.default_rng(noise.seed)
    z = rng.standard_normal((n_steps, 2))
    if noise.delta == 0.0:
        values = np.full((n_steps, 2), s0)
    elif noise.model == "ou":
        rho = np.exp(-dt / t_corr)
        kick = sigma * np.sqrt(1.0 - rho**2)
        values = np.empty((n_steps, 2))
        values[0] = s0 + sigma * z[0]
        for k in range(1, n_steps):
            values[k] = s0 + rho * (values[k - 1] - s0) + kick * z[k]
    else:
        steps = sigma * np.sqrt(dt) * z
        steps[0] = 0.0
        values = s0 + np.cumsum(steps, axis=0)
    values = np.maximum(values, 0.01 * s0)
    return NoiseTrajectories(dt, values[:, 0].copy(), values[:, 1].copy())


def couplings_from_depth(depth, t0: float, u0: float, s0: float) -> tuple:
    """Deep-lattice scalings: t ~ s^(3/4) exp(-2 sqrt(s)), U ~ s^(3/4).

    Calibrated so depth == s0 returns (t0, u0) exactly.  Works elementwise
    on arrays.
    """
    s = np.asarray(depth, dtype=float)
    if np.any(s <= 0):
        raise ValueError("lattice depth must be positive")
    ratio = (s / s0) ** 0.75
    t = t0 * ratio * np.exp(-2.0 * (np.sqrt(s) - np.sqrt(s0)))
    u = u0 * ratio
    if np.isscalar(depth):
        return float(t), float(u)
    return t, u


def initial_boson_state(basis: BosonicBasis) -> np.ndarray:
    """|+> (x) |0>^(N-2) (x) |+> with |0> = one b-atom, |+> = (|a>+|b>)/sqrt(2)."""
    one_b = basis.local_index[(0, 1)]
    one_a = basis.local_index[(1, 0)]
    site_amp = np.zeros((basis.n_sites, basis.n_local))
    site_amp[:, one_b] = 1.0
    for end in (0, basis.n_sites - 1):
        site_amp[end, :] = 0.0
        site_amp[end, one_b] = 1.0 / np.sqrt(2.0)
        site_amp[end, one_a] = 1.0 / np.sqrt(2.0)
    amps = np.prod(site_amp[np.arange(basis.n_sites), basis.locals], axis=1)
    return amps.astype(complex)


def end_site_density_matrix(psi: np.ndarray, basis: BosonicBasis) -> DensityMatrix:
    """Trace out the bulk, keeping sites (1, N) in the local-state basis."""
    l_first = basis.locals[:, 0]
    l_last = basis.locals[:, -1]
    middle = basis.locals[:, 1:-1]
    middle_keys = middle @ basis._powers[1:-1] if middle.shape[1] else np.zeros(basis.dim, dtype=np.int64)
    _, group = np.unique(middle_keys, return_inverse=True)
    pair = l_first * basis.n_local + l_last
    mat = np.zeros((group.max() + 1, basis.n_local**2), dtype=complex)
    mat[group, pair] = psi
    rho = mat.T @ mat.conj()
    return DensityMatrix(rho, dims=(basis.n_local, basis.n_local))


def ideal_end_target(config: BhmConfig) -> PureState:
    """End-site pair state a perfectly implemented XY chain would produce.

    Evolves the qubit image of the initial state under the engineered chain
    for tau and traces to the end sites; the result must be pure.
    """
    chain = config.effective_chain()
    kets = [_ZERO] * config.n_sites
    kets[0] = _PLUS
    kets[-1] = _PLUS
    psi0 = product_state(kets)
    h = build_spin_hamiltonian(spin_params_from_chain(chain))
    psi = evolve(psi0, h, config.tau)
    rho = partial_trace(psi, [1, config.n_sites])
    if rho.purity() < 1.0 - 1e-9:
        raise RuntimeError(f"ideal end-site state is not pure: purity {rho.purity():.12f}")
    eigvals, eigvecs = np.linalg.eigh(rho.matrix)
    return PureState(eigvecs[:, -1], 2)


def embed_qubit_pair(target: PureState, basis: BosonicBasis) -> np.ndarray:
    """Lift a two-qubit state onto the end-site pair space: |0> -> one b, |1> -> one a.

    Amplitude lands only on the singly-occupied locals, so multiple
    occupancy automatically counts as infidelity.
    """
    if target.n_qubits != 2:
        raise ValueError(f"expected a 2-qubit target, got {target.n_qubits}")
    loc = {0: basis.local_index[(0, 1)], 1: basis.local_index[(1, 0)]}
    vec = np.zeros(basis.n_local**2, dtype=complex)
    for q1, q2 in itertools.product((0, 1), repeat=2):
        vec[loc[q1] * basis.n_local + loc[q2]] = target.amplitudes[(q1 << 1) | q2]
    return vec


def _propagate_noiseless(config: BhmConfig, operators: LatticeOperators,
                         psi: np.ndarray) -> np.ndarray:
    h = build_bhm(config, operators=operators)
    return expm_krylov(h, psi, config.tau, tol=1e-9)


def _propagate_noisy(config: BhmConfig, noise: NoiseConfig,
                     operators: LatticeOperators, psi: np.ndarray) -> np.ndarray:
    tau = config.tau
    traj = sample_noise(noise, tau)
    s0 = noise.baseline_depth
    t_a, u_a = couplings_from_depth(traj.depths_a, config.hop_scale, config.interaction, s0)
    t_b, u_b = couplings_from_depth(traj.depths_b, config.hop_scale, config.interaction, s0)
    _, u_cross = couplings_from_depth((traj.depths_a + traj.depths_b) / 2.0,
                                      config.hop_scale, config.interaction, s0)
    field = config.resolved_field  # external field, not laser-derived
    remaining = tau
    for k in range(traj.n_steps):
        dt = min(traj.update_interval, remaining)
        h = operators.hamiltonian(t_a[k], t_b[k], u_a[k], u_b[k], u_cross[k] / 2.0, field)
        psi = expm_krylov(h, psi, dt, tol=1e-9)
        remaining -= dt
        if remaining <= tau * 1e-14:
            break
    return psi


def run_fidelity_point(config: BhmConfig, noise: NoiseConfig | None = None,
                       operators: LatticeOperators | None = None) -> FidelityRecord:
    """Evolve the boson model over one inversion and score the end sites.

    The target is the end-site state of the ideal XY chain (computed, not
    assumed).  tau always comes from the unperturbed couplings: the noise
    shakes the Hamiltonian, never the clock.
    """
    if operators is None:
        operators = LatticeOperators(enumerate_basis(config))
    basis = operators.basis
    psi = initial_boson_state(basis)
    noiseless = noise is None or noise.delta == 0.0
    if noiseless:
        psi = _propagate_noiseless(config, operators, psi)
    else:
        psi = _propagate_noisy(config, noise, operators, psi)
    rho = end_site_density_matrix(psi, basis)
    target = embed_qubit_pair(ideal_end_target(config), basis)
    value = float(np.real(np.vdot(target, rho.matrix @ target)))
    return FidelityRecord(
        u_over_t=config.u_over_t,
        delta_pct=0.0 if noiseless else noise.delta * 100.0,
        seed=0 if noiseless else noise.seed,
        fidelity=min(max(value, 0.0), 1.0),
        tau=config.tau,
        n_max=config.n_max,
        basis_dim=basis.dim,
    )


@dataclass(frozen=True)
class EndSiteReport:
    """Both fidelity readings of an end-site reduced state against the target.

    ``fidelity`` embeds the two-qubit target into the full bosonic pair
    space, so occupancy leakage counts as error.  ``projected_fidelity``
    first restricts to the singly-occupied (two-spin) block and
    renormalizes its trace; ``qubit_weight`` is that trace.
    """

    fidelity: float
    projected_fidelity: float
    qubit_weight: float


def end_site_report(rho: DensityMatrix, target: PureState, basis: BosonicBasis) -> EndSiteReport:
    embedded = embed_qubit_pair(target, basis)
    raw = float(np.real(np.vdot(embedded, rho.matrix @ embedded)))
    loc = (basis.local_index[(0, 1)], basis.local_index[(1, 0)])
    pairs = [l1 * basis.n_local + l2 for l1 in loc for l2 in loc]
    block = rho.matrix[np.ix_(pairs, pairs)]
    weight = float(np.trace(block).real)
    tq = embedded[pairs]
    projected = float(np.real(np.vdot(tq, block @ tq)) / weight) if weight > 0 else 0.0
    return EndSiteReport(raw, projected, weight)


def run_noise_sweep(
    config: BhmConfig,
    deltas: Sequence[float],
    u_over_t: Sequence[float],
    seeds: Sequence[int],
    noise_template: NoiseConfig | None = None,
) -> list[FidelityRecord]:
    """One record per (U/T, delta, seed); noiseless points collapse to one record.

    deltas are fractions (0.01 = 1%).  Records come out sorted by
    (u_over_t, delta, seed) regardless of input order.
    """
    template = NoiseConfig() if noise_template is None else noise_template
    records = []
    for ratio in sorted(u_over_t):
        point = replace(config, interaction=ratio * config.hop_scale)
        operators = LatticeOperators(enumerate_basis(point))
        for delta in sorted(deltas):
            if delta == 0.0:
                records.append(run_fidelity_point(point, operators=operators))
                continue
            for seed in sorted(seeds):
                noise = replace(template, delta=delta, seed=seed)
                records.append(run_fidelity_point(point, noise, operators=operators))
    return records


def summarize_records(records: Sequence[FidelityRecord]) -> list[SweepSummary]:
    """Per-(U/T, delta) mean and sample spread, ordered like the records."""
    grouped: dict[tuple[float, float], list[float]] = {}
    for rec in records:
        grouped.setdefault((rec.u_over_t, rec.delta_pct), []).append(rec.fidelity)
    out = []
    for (ratio, delta_pct), values in sorted(grouped.items()):
        arr = np.array(values)
        std = float(arr.std(ddof=1)) if arr.size > 1 else 0.0
        out.append(SweepSummary(ratio, delta_pct, arr.size, float(arr.mean()), std))
    return out
