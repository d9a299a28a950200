import numpy as np
import pytest
import scipy.sparse as sparse

from entbus.chain import build_angular_momentum_chain, build_resonant_chain, inversion_time
from entbus.errors import DimensionCapError
from entbus.statevector import (
    DensityMatrix,
    PureState,
    SpinChainParams,
    apply_cz,
    apply_hadamard,
    apply_reversal,
    apply_swap,
    basis_state,
    bits_to_index,
    build_spin_hamiltonian,
    evolve,
    fidelity,
    index_to_bits,
    partial_trace,
    pauli_expectation,
    plus_state,
    product_state,
    spin_params_from_chain,
    states_match,
    total_sz,
)

from helpers import random_state_vector, xy_chain_hamiltonian


class TestPureState:
    def test_rejects_unnormalized(self):
        with pytest.raises(ValueError):
            PureState(np.array([1.0, 1.0]), 1)

    def test_rejects_wrong_length(self):
        with pytest.raises(ValueError):
            PureState(np.array([1.0, 0.0, 0.0]), 2)

    def test_bit_ordering_round_trip(self):
        # qubit 1 is the most significant bit
        assert bits_to_index((1, 0, 0)) == 4
        assert index_to_bits(4, 3) == (1, 0, 0)
        state = basis_state(3, bits=(1, 0, 0))
        assert state.amplitudes[4] == 1.0


class TestSpinParams:
    def test_two_site_mapping(self):
        chain = build_angular_momentum_chain(2, j_scale=2.0, field=0.0)
        params = spin_params_from_chain(chain)
        assert params.lambda_xy == pytest.approx([0.5])
        assert params.lambda_z == pytest.approx([0.0, 0.0])
        assert params.lambda_zz == pytest.approx([0.0])

    def test_four_site_mapping(self):
        chain = build_angular_momentum_chain(4, j_scale=2.0)
        params = spin_params_from_chain(chain)
        assert params.lambda_xy == pytest.approx([np.sqrt(3) / 2, 1.0, np.sqrt(3) / 2])

    def test_resonant_six_site_field(self):
        params = spin_params_from_chain(build_resonant_chain(6, 1.0))
        assert params.lambda_z == pytest.approx([1.25] * 6)


class TestHamiltonian:
    def test_two_site_xy_spectrum(self):
        params = SpinChainParams(lambda_zz=[0.0], lambda_z=[0.0, 0.0], lambda_xy=[1.0])
        h = build_spin_hamiltonian(params).toarray()
        assert np.linalg.eigvalsh(h) == pytest.approx([-2.0, 0.0, 0.0, 2.0])

    def test_all_zero_couplings(self):
        params = SpinChainParams(lambda_zz=[0.0, 0.0], lambda_z=[0.0] * 3, lambda_xy=[0.0, 0.0])
        assert build_spin_hamiltonian(params).nnz == 0

    def test_hermitian(self):
        rng = np.random.default_rng(3)
        params = SpinChainParams(
            lambda_zz=rng.standard_normal(4),
            lambda_z=rng.standard_normal(5),
            lambda_xy=rng.standard_normal(4),
        )
        h = build_spin_hamiltonian(params).toarray()
        assert np.max(np.abs(h - h.conj().T)) < 1e-12

    def test_commutes_with_total_magnetization(self):
        chain = build_resonant_chain(3)
        h = build_spin_hamiltonian(spin_params_from_chain(chain))
        sz = total_sz(3)
        comm = (h @ sz - sz @ h).toarray()
        assert np.max(np.abs(comm)) < 1e-12

    def test_matches_independent_kron_oracle(self):
        chain = build_resonant_chain(5, j_scale=0.9)
        h = build_spin_hamiltonian(spin_params_from_chain(chain)).toarray()
        oracle = xy_chain_hamiltonian(chain.couplings, chain.field, 5)
        assert np.max(np.abs(h - oracle)) < 1e-12

    def test_dimension_cap(self):
        with pytest.raises(DimensionCapError):
            build_spin_hamiltonian(
                SpinChainParams(
                    lambda_zz=np.zeros(20), lambda_z=np.zeros(21), lambda_xy=np.zeros(20)
                )
            )


class TestEvolve:
    def test_zero_time_identity(self):
        state = plus_state(3)
        h = build_spin_hamiltonian(spin_params_from_chain(build_resonant_chain(3)))
        assert states_match(evolve(state, h, 0.0), state, tol=1e-12)

    def test_zero_hamiltonian_identity(self):
        state = plus_state(3)
        h = sparse.csr_matrix((8, 8), dtype=complex)
        assert states_match(evolve(state, h, 2.3), state, tol=1e-12)

    def test_resonant_transfer_up_to_global_phase(self):
        chain = build_resonant_chain(4)
        h = build_spin_hamiltonian(spin_params_from_chain(chain))
        out = evolve(basis_state(4, bits=(1, 0, 0, 0)), h, inversion_time(chain))
        assert states_match(out, basis_state(4, bits=(0, 0, 0, 1)), up_to_phase=True)

    def test_norm_preserved(self):
        rng = np.random.default_rng(7)
        state = PureState(random_state_vector(2**6, rng), 6)
        chain = build_resonant_chain(6)
        h = build_spin_hamiltonian(spin_params_from_chain(chain))
        out = evolve(state, h, 1.7)
        assert abs(np.linalg.norm(out.amplitudes) - 1.0) < 1e-9

    def test_magnetization_sector_populations_conserved(self):
        rng = np.random.default_rng(8)
        n = 5
        state = PureState(random_state_vector(2**n, rng), n)
        chain = build_resonant_chain(n)
        h = build_spin_hamiltonian(spin_params_from_chain(chain))
        out = evolve(state, h, 0.9)
        weights = np.array([bin(i).count("1") for i in range(2**n)])
        for q in range(n + 1):
            before = np.sum(np.abs(state.amplitudes[weights == q]) ** 2)
            after = np.sum(np.abs(out.amplitudes[weights == q]) ** 2)
            assert after == pytest.approx(before, abs=1e-9)

    def test_krylov_path_matches_eigh_path(self):
        # 11 qubits exceeds the eigendecomposition switch
        rng = np.random.default_rng(9)
        n = 11
        chain = build_resonant_chain(n)
        h = build_spin_hamiltonian(spin_params_from_chain(chain))
        state = basis_state(n, bits=(1,) + (0,) * (n - 1))
        out, info = evolve(state, h, inversion_time(chain), return_info=True)
        assert info.max_krylov_dim > 0
        assert states_match(out, basis_state(n, bits=(0,) * (n - 1) + (1,)), up_to_phase=True)

    def test_dimension_mismatch(self):
        h = build_spin_hamiltonian(spin_params_from_chain(build_resonant_chain(3)))
        with pytest.raises(ValueError):
            evolve(plus_state(2), h, 1.0)


class TestGates:
    def test_cz_on_plus_plus(self):
        state = apply_cz(plus_state(2), 1, 2)
        assert state.amplitudes == pytest.approx(np.array([1, 1, 1, -1]) / 2.0)

    def test_cz_involution(self):
        rng = np.random.default_rng(10)
        state = PureState(random_state_vector(8, rng), 3)
        assert states_match(apply_cz(apply_cz(state, 1, 3), 1, 3), state, tol=1e-12)

    def test_cz_pairs_commute(self):
        rng = np.random.default_rng(11)
        state = PureState(random_state_vector(16, rng), 4)
        a = apply_cz(apply_cz(state, 1, 2), 3, 4)
        b = apply_cz(apply_cz(state, 3, 4), 1, 2)
        assert np.array_equal(a.amplitudes, b.amplitudes)

    def test_hadamard_involution_exhaustive(self):
        for n in range(1, 6):
            for idx in range(2**n):
                state = basis_state(n, index=idx)
                for site in range(1, n + 1):
                    out = apply_hadamard(apply_hadamard(state, site), site)
                    assert states_match(out, state, tol=1e-12)

    def test_reversal_basis_action(self):
        out = apply_reversal(basis_state(3, bits=(1, 1, 0)))
        assert states_match(out, basis_state(3, bits=(0, 1, 1)), tol=1e-15)

    def test_reversal_involution(self):
        rng = np.random.default_rng(12)
        state = PureState(random_state_vector(32, rng), 5)
        assert np.array_equal(apply_reversal(apply_reversal(state)).amplitudes, state.amplitudes)

    def test_reversal_subrange(self):
        out = apply_reversal(basis_state(4, bits=(1, 1, 0, 0)), first=2, last=4)
        assert states_match(out, basis_state(4, bits=(1, 0, 0, 1)), tol=1e-15)

    def test_swap(self):
        out = apply_swap(basis_state(3, bits=(1, 0, 0)), 1, 3)
        assert states_match(out, basis_state(3, bits=(0, 0, 1)), tol=1e-15)

    def test_swap_involution(self):
        rng = np.random.default_rng(13)
        state = PureState(random_state_vector(8, rng), 3)
        assert np.array_equal(apply_swap(apply_swap(state, 1, 2), 1, 2).amplitudes, state.amplitudes)

    def test_index_out_of_range(self):
        with pytest.raises(IndexError):
            apply_hadamard(plus_state(2), 3)
        with pytest.raises(ValueError):
            apply_cz(plus_state(2), 1, 1)


class TestPartialTraceAndFidelity:
    def test_product_state_is_pure(self):
        plus = np.array([1.0, 1.0]) / np.sqrt(2.0)
        zero = np.array([1.0, 0.0])
        rho = partial_trace(product_state([plus, zero]), [1])
        assert rho.matrix == pytest.approx(np.full((2, 2), 0.5))
        assert rho.purity() == pytest.approx(1.0)

    def test_bell_state_is_maximally_mixed(self):
        bell = PureState(np.array([1, 0, 0, 1]) / np.sqrt(2.0), 2)
        rho = partial_trace(bell, [1])
        assert rho.matrix == pytest.approx(np.eye(2) / 2.0)
        assert rho.purity() == pytest.approx(0.5)

    def test_keep_all_is_projector(self):
        state = apply_cz(plus_state(2), 1, 2)
        rho = partial_trace(state, [1, 2])
        expected = np.outer(state.amplitudes, state.amplitudes.conj())
        assert rho.matrix == pytest.approx(expected)

    def test_fidelity_with_self(self):
        rng = np.random.default_rng(14)
        state = PureState(random_state_vector(8, rng), 3)
        assert fidelity(partial_trace(state, [1, 2, 3]), state) == pytest.approx(1.0)

    def test_fidelity_maximally_mixed(self):
        rho = DensityMatrix(np.eye(4) / 4.0, dims=(2, 2))
        assert fidelity(rho, plus_state(2)) == pytest.approx(0.25)

    def test_fidelity_zero_zero_vs_edge_state(self):
        # |<00|G2>|^2 = 1/4 by hand
        rho = partial_trace(basis_state(2, bits=(0, 0)), [1, 2])
        target = apply_cz(plus_state(2), 1, 2)
        assert fidelity(rho, target) == pytest.approx(0.25)

    def test_fidelity_dimension_mismatch(self):
        rho = DensityMatrix(np.eye(4) / 4.0, dims=(2, 2))
        with pytest.raises(ValueError):
            fidelity(rho, plus_state(3))

    def test_density_matrix_validation(self):
        with pytest.raises(ValueError):
            DensityMatrix(np.eye(4), dims=(2, 2))  # trace 4
        with pytest.raises(ValueError):
            DensityMatrix(np.diag([1.5, -0.5]), dims=(2,))  # negative eigenvalue


class TestPauliExpectation:
    def test_plus_state_x(self):
        assert pauli_expectation(plus_state(1), {1: "X"}) == pytest.approx(1.0)

    def test_zero_state_z(self):
        assert pauli_expectation(basis_state(1, bits=(0,)), {1: "Z"}) == pytest.approx(1.0)

    def test_edge_state_stabilizers(self):
        state = apply_cz(plus_state(2), 1, 2)
        assert pauli_expectation(state, {1: "X", 2: "Z"}) == pytest.approx(1.0)
        assert pauli_expectation(state, {1: "Z", 2: "X"}) == pytest.approx(1.0)
        assert pauli_expectation(state, {1: "X"}) == pytest.approx(0.0)
