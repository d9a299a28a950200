"""Acceptance suite: one test per criterion, one printed verdict line each.

Run with ``pytest -v -s tests/test_acceptance.py`` to see every verdict.
Criteria 5 and 7 assert thresholds that exact propagation of the boson
model provably cannot meet (see the printed analysis); they are expected
to fail and are kept faithful rather than loosened.
"""

import time

import numpy as np
import pytest

from entbus import bosehubbard as bhm
from entbus import chain as chains
from entbus import equivalence, graphstate
from entbus.cli import main
from entbus.propagation import expm_krylov
from entbus.statevector import build_spin_hamiltonian, spin_params_from_chain

from helpers import expm_unitary, random_graph_edges, xy_chain_hamiltonian


def _verdict(number: int, name: str, passed: bool, detail: str) -> None:
    print(f"ACCEPTANCE {number} [{name}]: {'PASS' if passed else 'FAIL'} - {detail}")


def test_criterion_1_mirror_inversion():
    start = time.time()
    worst_mag_err = 0.0
    worst_phase = 0.0
    for n in range(2, 17):
        spec = chains.build_resonant_chain(n)
        prop = chains.single_particle_propagator(spec, chains.inversion_time(spec))
        for mag, phase in chains.mirror_report(prop):
            worst_mag_err = max(worst_mag_err, abs(mag - 1.0))
            worst_phase = max(worst_phase, abs(phase))
    elapsed = time.time() - start
    passed = worst_mag_err < 1e-9 and worst_phase < 1e-9 and elapsed < 10.0
    _verdict(1, "mirror inversion N=2..16", passed,
             f"max |mag-1| {worst_mag_err:.2e}, max |phase| {worst_phase:.2e}, {elapsed:.2f}s")
    assert worst_mag_err < 1e-9
    assert worst_phase < 1e-9
    assert elapsed < 10.0


def test_criterion_2_fock_phase_law():
    start = time.time()
    worst = 0.0
    for n in range(2, 9):
        report = equivalence.fock_law_check(n, tol=1e-8)
        worst = max(worst, report.max_deviation)
    # independent cross-check at small sizes: Pade exponential of a
    # kron-built chain against the predicted permutation-with-phases
    for n in range(2, 7):
        spec = chains.build_resonant_chain(n)
        u = expm_unitary(xy_chain_hamiltonian(spec.couplings, spec.field, n),
                         chains.inversion_time(spec))
        global_phase = np.exp(1j * n * spec.field * chains.inversion_time(spec) / 2.0)
        for col in range(2**n):
            bits = tuple((col >> (n - k)) & 1 for k in range(1, n + 1))
            out, phase = chains.fock_evolve(chains.OccupationState(bits), spec)
            expected = np.zeros(2**n, dtype=complex)
            row = int("".join(str(b) for b in out.bits), 2)
            expected[row] = global_phase * phase
            worst = max(worst, float(np.max(np.abs(u[:, col] - expected))))
    elapsed = time.time() - start
    passed = worst < 1e-8 and elapsed < 120.0
    _verdict(2, "occupation-sector phase law N=2..8", passed,
             f"max deviation {worst:.2e}, {elapsed:.2f}s")
    assert worst < 1e-8
    assert elapsed < 120.0


def test_criterion_3_circuit_equivalence_and_reduction():
    start = time.time()
    worst_equiv = 0.0
    worst_red = 0.0
    for n in range(2, 9):
        report = equivalence.equivalence_check(n)
        assert report.passed, f"equivalence failed at N={n}: {report}"
        worst_equiv = max(worst_equiv, report.max_deviation)
    for n in range(3, 9):
        report = equivalence.reduction_trials(n, trials=50, seed=1000 + n)
        assert report.passed, f"reduction failed at N={n}: {report}"
        worst_red = max(worst_red, report.max_deviation)
    elapsed = time.time() - start
    passed = worst_equiv < 1e-8 and worst_red < 1e-8 and elapsed < 300.0
    _verdict(3, "circuit equivalence + reduction N=2..8", passed,
             f"equiv {worst_equiv:.2e}, reduction {worst_red:.2e}, {elapsed:.2f}s")
    assert passed


def test_criterion_4_graph_protocol():
    start = time.time()
    rng = np.random.default_rng(12345)
    checked = 0
    while checked < 200:
        n = int(rng.integers(2, 7))
        graph = graphstate.Graph.from_edges(n, random_graph_edges(n, rng))
        strict = graphstate.schedule_iterative(graph, optimize=False)
        assert strict.cycle_count <= 2 * n
        assert graphstate.track_edges(strict, n) == graph.edges
        optimized = graphstate.schedule_iterative(graph)
        assert optimized.cycle_count <= 2 * n
        assert graphstate.track_edges(optimized, n) == graph.edges
        schedule = strict if checked % 2 == 0 else optimized
        state = graphstate.simulate_schedule(graph, schedule, engine="circuit")
        report = graphstate.verify_graph_state(state, graph, schedule.cycle_count, 2 * n)
        assert report.passed, f"verification failed for {graph} via {schedule.mode}"
        checked += 1

    k5 = graphstate.Graph.complete(5)
    one_cycle = graphstate.schedule_iterative(k5)
    assert one_cycle.cycle_count == 1
    state = graphstate.simulate_schedule(k5, one_cycle, engine="circuit")
    assert graphstate.verify_graph_state(state, k5, 1, 10).passed

    elapsed = time.time() - start
    passed = elapsed < 600.0
    _verdict(4, "graph protocol, 200 random graphs + K5", passed,
             f"200 graphs verified, K5 in one cycle, {elapsed:.1f}s")
    assert passed


def test_criterion_5_fidelity_point():
    start = time.time()
    config = bhm.BhmConfig(n_sites=6, interaction=26.0, n_max=2)
    operators = bhm.LatticeOperators(bhm.enumerate_basis(config))
    record = bhm.run_fidelity_point(config, operators=operators)
    psi = expm_krylov(bhm.build_bhm(config, operators=operators),
                      bhm.initial_boson_state(operators.basis), config.tau, tol=1e-9)
    rho = bhm.end_site_density_matrix(psi, operators.basis)
    report = bhm.end_site_report(rho, bhm.ideal_end_target(config), operators.basis)
    elapsed = time.time() - start
    passed = record.fidelity >= 0.985
    _verdict(5, "U/T=26 fidelity point", passed,
             f"F = {record.fidelity:.6f} (threshold 0.985, stretch 0.99), {elapsed:.1f}s")
    print(
        f"  analysis: leakage-penalizing F = {report.fidelity:.6f}; end-site "
        f"two-spin weight = {report.qubit_weight:.6f}; renormalized two-spin "
        f"F = {report.projected_fidelity:.6f} (sqrt convention "
        f"{np.sqrt(report.projected_fidelity):.6f} > 0.99 matches the reported value); "
        f"construction validated against an independent dense oracle and the "
        f"fidelity peaks at tau, so the gap is occupancy leakage, not an error."
    )
    assert record.fidelity >= 0.985, (
        "exact propagation gives F ~ 0.949 at n_max=2 (0.962 converged) under the "
        "leakage-penalizing fidelity; the 0.99 of the source corresponds to the "
        "trace-renormalized two-spin reading (0.984, sqrt 0.992)"
    )


def test_criterion_6_noise_shape():
    start = time.time()
    ratios = list(range(8, 31, 2))
    noiseless = {}
    operator_cache = {}
    for ratio in ratios:
        config = bhm.BhmConfig(n_sites=6, interaction=float(ratio), n_max=2)
        operator_cache[ratio] = bhm.LatticeOperators(bhm.enumerate_basis(config))
        noiseless[ratio] = bhm.run_fidelity_point(
            config, operators=operator_cache[ratio]).fidelity
    values = [noiseless[r] for r in ratios]
    monotone = all(b >= a for a, b in zip(values, values[1:]))

    config26 = bhm.BhmConfig(n_sites=6, interaction=26.0, n_max=2)
    one_pct = [
        bhm.run_fidelity_point(
            config26, bhm.NoiseConfig(delta=0.01, seed=s), operators=operator_cache[26]
        ).fidelity
        for s in range(30)
    ]
    drop_1pct = noiseless[26] - float(np.mean(one_pct))

    config30 = bhm.BhmConfig(n_sites=6, interaction=30.0, n_max=2)
    five_pct = [
        bhm.run_fidelity_point(
            config30, bhm.NoiseConfig(delta=0.05, seed=s), operators=operator_cache[30]
        ).fidelity
        for s in range(10)
    ]
    drop_5pct = noiseless[30] - float(np.mean(five_pct))
    two_sem = 2.0 * float(np.std(five_pct, ddof=1)) / np.sqrt(len(five_pct))

    elapsed = time.time() - start
    passed = monotone and abs(drop_1pct) < 0.01 and drop_5pct >= 0.01 and drop_5pct > two_sem
    _verdict(6, "noise sweep shape", passed,
             f"monotone={monotone}, 1% drop {drop_1pct:.5f} (<0.01, 30 seeds), "
             f"5% drop {drop_5pct:.4f} >= 0.01 at 2-sigma (2sem {two_sem:.4f}, 10 seeds), "
             f"{elapsed:.0f}s")
    assert monotone, f"noiseless sweep not monotone: {values}"
    assert abs(drop_1pct) < 0.01
    assert drop_5pct >= 0.01
    assert drop_5pct > two_sem


def test_criterion_7_truncation_convergence():
    start = time.time()
    f2 = bhm.run_fidelity_point(bhm.BhmConfig(n_sites=4, interaction=26.0, n_max=2)).fidelity
    f3 = bhm.run_fidelity_point(bhm.BhmConfig(n_sites=4, interaction=26.0, n_max=3)).fidelity
    diff = abs(f3 - f2)
    elapsed = time.time() - start
    passed = diff < 5e-4
    _verdict(7, "truncation convergence N=4", passed,
             f"F(n_max=2) = {f2:.6f}, F(n_max=3) = {f3:.6f}, |diff| = {diff:.2e} "
             f"(threshold 5e-4), {elapsed:.1f}s")
    print(
        "  analysis: the physical occupancy-truncation sensitivity at U/T=26 is "
        "~5e-3 under the leakage-penalizing fidelity (~2.5e-3 renormalized); "
        "no fidelity convention reaches 5e-4 at this interaction strength."
    )
    assert diff < 5e-4, (
        "truncation sensitivity at U/T=26 is an order of magnitude above the "
        "5e-4 threshold under every fidelity reading"
    )


def test_criterion_8_determinism(tmp_path):
    start = time.time()
    sweep_args = [
        "fidelity-sweep", "--sites", "3", "--u-over-t", "12,18",
        "--delta", "0,2", "--num-seeds", "2", "--seed", "5",
    ]
    paths = [tmp_path / name for name in ("s1.csv", "s2.csv", "s3.csv")]
    assert main(sweep_args + ["--output", str(paths[0])]) == 0
    assert main(sweep_args + ["--output", str(paths[1])]) == 0
    assert main(sweep_args + ["--output", str(paths[2]), "--threads", "4"]) == 0
    sweep_identical = (
        paths[0].read_bytes() == paths[1].read_bytes() == paths[2].read_bytes()
    )

    graph_file = tmp_path / "graph.txt"
    graph_file.write_text("vertices 4\n1 2\n1 3\n2 4\n")
    g_paths = [tmp_path / name for name in ("g1.txt", "g2.txt")]
    for p in g_paths:
        assert main(["graph-run", "--graph", str(graph_file), "--seed", "3",
                     "--output", str(p)]) == 0
    graph_identical = g_paths[0].read_bytes() == g_paths[1].read_bytes()

    r_paths = [tmp_path / name for name in ("r1.json", "r2.json")]
    for p in r_paths:
        assert main(["reduction", "--qubits", "5", "--trials", "20", "--seed", "11",
                     "--format", "json", "--output", str(p)]) == 0
    reduction_identical = r_paths[0].read_bytes() == r_paths[1].read_bytes()

    elapsed = time.time() - start
    passed = sweep_identical and graph_identical and reduction_identical
    _verdict(8, "byte-identical determinism", passed,
             f"sweep x3 (incl. threads=4): {sweep_identical}, graph-run x2: "
             f"{graph_identical}, reduction x2: {reduction_identical}, {elapsed:.1f}s")
    assert passed
