"""Reproducible command-line harness.

Commands map one-to-one onto the library checks: mirror-check,
circuit-equiv, reduction, fock-check, graph-run, fidelity-sweep,
noise-sweep, selftest.  Exit codes: 0 all checks passed, 1 a scientific
check failed, 2 invalid input, 3 resource cap exceeded.

Every command accepts ``--config FILE`` (flat ``key value`` or
``key = value`` lines naming long flags; explicit flags win), ``--output``,
``--format``, ``--seed`` and ``--threads``; identical configuration and
seeds produce byte-identical output regardless of thread count.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, replace
from pathlib import Path

import numpy as np

from . import bosehubbard as bhm
from . import chain as chains
from . import equivalence, graphstate
from .errors import (
    DimensionCapError,
    GraphFormatError,
    PropagationError,
    ScheduleError,
    UnsupportedProfileError,
)

CSV_COLUMNS = "u_over_t,delta_pct,seed,fidelity,tau,n_max,basis_dim"

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_BAD_INPUT = 2
EXIT_RESOURCE_CAP = 3


def _fmt(value) -> str:
    return repr(value) if isinstance(value, float) else str(value)


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _render_report(config: dict, lines: list[str], args, payload: dict) -> None:
    if args.format == "json":
        text = json.dumps({"config": config, **payload}, indent=2, sort_keys=True) + "\n"
    else:
        head = [f"# {k} = {_fmt(v)}" for k, v in sorted(config.items())]
        text = "\n".join(head + lines) + "\n"
    _emit(text, args.output)


def _render_sweep(config: dict, records, summaries, args) -> None:
    if args.format == "json":
        text = json.dumps(
            {
                "config": config,
                "records": [asdict(r) for r in records],
                "summary": [asdict(s) for s in summaries],
            },
            indent=2,
            sort_keys=True,
        ) + "\n"
    else:
        lines = [f"# {k} = {_fmt(v)}" for k, v in sorted(config.items())]
        lines.append(CSV_COLUMNS)
        for r in records:
            lines.append(
                f"{r.u_over_t!r},{r.delta_pct!r},{r.seed},{r.fidelity!r},"
                f"{r.tau!r},{r.n_max},{r.basis_dim}"
            )
        lines.append("# summary: u_over_t,delta_pct,n,mean_fidelity,std_fidelity")
        for s in summaries:
            lines.append(
                f"# {s.u_over_t!r},{s.delta_pct!r},{s.n_records},"
                f"{s.mean_fidelity!r},{s.std_fidelity!r}"
            )
        text = "\n".join(lines) + "\n"
    _emit(text, args.output)


def parse_number_list(spec: str) -> list[float]:
    """Comma list ('8,10,12'), colon range ('8:30:2', stop inclusive), or scalar."""
    spec = spec.strip()
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) not in (2, 3):
            raise ValueError(f"bad range {spec!r}, want start:stop[:step]")
        start, stop = float(parts[0]), float(parts[1])
        step = float(parts[2]) if len(parts) == 3 else 1.0
        if step <= 0:
            raise ValueError(f"range step must be positive in {spec!r}")
        values = []
        x = start
        while x <= stop + 1e-12:
            values.append(round(x, 12))
            x += step
        return values
    return [float(tok) for tok in spec.split(",") if tok.strip()]


# ---------------------------------------------------------------- commands


def cmd_mirror_check(args) -> int:
    if not 2 <= args.sites <= 64:
        raise ValueError(f"--sites must be in 2..64, got {args.sites}")
    field = chains.resonant_field(args.sites, args.j_scale) if args.field is None else args.field
    spec = chains.build_angular_momentum_chain(args.sites, args.j_scale, field)
    tau = chains.inversion_time(spec)
    report = chains.mirror_report(chains.single_particle_propagator(spec, tau))
    magnitudes_ok = all(mag > 1.0 - 1e-9 for mag, _ in report)
    phases_zero = all(abs(phase) < 1e-9 for _, phase in report)
    config = {
        "command": "mirror-check", "sites": args.sites, "j_scale": args.j_scale,
        "field": field, "tau": tau, "seed": args.seed,
    }
    lines = ["site,mirror,magnitude,phase"]
    for n, (mag, phase) in enumerate(report, start=1):
        lines.append(f"{n},{args.sites - n + 1},{mag!r},{phase!r}")
    verdict = "pass" if magnitudes_ok and phases_zero else (
        "pass-with-phase" if magnitudes_ok else "fail")
    lines.append(f"# result: {verdict}")
    _render_report(config, lines, args, {
        "rows": [{"site": n + 1, "magnitude": m, "phase": p} for n, (m, p) in enumerate(report)],
        "result": verdict,
    })
    return EXIT_OK if magnitudes_ok else EXIT_CHECK_FAILED


def cmd_circuit_equiv(args) -> int:
    if not 2 <= args.qubits <= equivalence.EQUIVALENCE_QUBIT_CAP:
        raise ValueError(
            f"--qubits must be in 2..{equivalence.EQUIVALENCE_QUBIT_CAP}, got {args.qubits}"
        )
    report = equivalence.equivalence_check(args.qubits)
    config = {"command": "circuit-equiv", "qubits": args.qubits,
              "seed": args.seed}
    lines = [
        f"max_deviation: {report.max_deviation!r}",
        f"worst_column: {report.worst_column}",
        f"# result: {'pass' if report.passed else 'fail'}",
    ]
    _render_report(config, lines, args, {"report": asdict(report)})
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def cmd_reduction(args) -> int:
    if not 2 <= args.qubits <= equivalence.EQUIVALENCE_QUBIT_CAP:
        raise ValueError(
            f"--qubits must be in 2..{equivalence.EQUIVALENCE_QUBIT_CAP}, got {args.qubits}"
        )
    report = equivalence.reduction_trials(args.qubits, args.trials, args.seed)
    config = {"command": "reduction", "qubits": args.qubits, "trials": args.trials,
              "seed": args.seed}
    lines = [
        f"max_deviation: {report.max_deviation!r}",
        f"worst_subset: {list(report.worst_subset)}",
        f"# result: {'pass' if report.passed else 'fail'}",
    ]
    _render_report(config, lines, args, {"report": asdict(report)})
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def cmd_fock_check(args) -> int:
    if not 2 <= args.sites <= equivalence.EQUIVALENCE_QUBIT_CAP:
        raise ValueError(
            f"--sites must be in 2..{equivalence.EQUIVALENCE_QUBIT_CAP}, got {args.sites}"
        )
    report = equivalence.fock_law_check(args.sites, args.j_scale, args.field)
    config = {"command": "fock-check", "sites": args.sites, "j_scale": args.j_scale,
              "field": report.field, "seed": args.seed}
    lines = [
        f"max_deviation: {report.max_deviation!r}",
        f"worst_state: {list(report.worst_state)}",
        f"# result: {'pass' if report.passed else 'fail'}",
    ]
    _render_report(config, lines, args, {"report": asdict(report)})
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def cmd_graph_run(args) -> int:
    graph = graphstate.load_graph(args.graph)
    if args.mode == "edgewise":
        schedule = graphstate.schedule_edgewise(graph, n_eb=args.eb_sites or 2)
        bound = len(graph.edges)
    else:
        schedule = graphstate.schedule_iterative(
            graph, n_eb=args.eb_sites, optimize=(args.mode == "optimized")
        )
        bound = 2 * graph.n_vertices
    tracked = graphstate.track_edges(schedule, graph.n_vertices)
    edges_match = tracked == graph.edges
    state = graphstate.simulate_schedule(graph, schedule, engine=args.engine)
    report = graphstate.verify_graph_state(state, graph, schedule.cycle_count, bound)
    passed = report.passed and edges_match
    config = {
        "command": "graph-run", "graph": str(args.graph), "mode": args.mode,
        "engine": args.engine, "eb_sites": schedule.n_eb,
        "seed": args.seed,
    }
    lines = graphstate.schedule_to_text(schedule).splitlines()
    lines.append(f"bound: {bound}")
    lines.append(f"edge_tracker_match: {edges_match}")
    lines.append(
        "stabilizer_expectations: " + ", ".join(repr(e) for e in report.expectations)
    )
    lines.append(f"# result: {'pass' if passed else 'fail'}")
    _render_report(config, lines, args, {
        "schedule": graphstate.schedule_to_dict(schedule),
        "bound": bound,
        "edge_tracker_match": edges_match,
        "stabilizer_expectations": list(report.expectations),
        "result": "pass" if passed else "fail",
    })
    return EXIT_OK if passed else EXIT_CHECK_FAILED


def _sweep_points(args) -> tuple[list, dict]:
    ratios = parse_number_list(args.u_over_t)
    deltas_pct = parse_number_list(args.delta)
    seeds = [args.seed + k for k in range(args.num_seeds)]
    if any(r <= 0 for r in ratios):
        raise ValueError("--u-over-t values must be positive")
    if any(d < 0 or d >= 50 for d in deltas_pct):
        raise ValueError("--delta is a percentage in [0, 50)")
    base = bhm.BhmConfig(n_sites=args.sites, n_max=args.n_max)
    template = bhm.NoiseConfig(
        baseline_depth=args.baseline_depth,
        correlation_time=args.correlation_time,
        update_interval=args.update_interval,
        model=args.noise_model,
    )
    operators: dict[float, bhm.LatticeOperators] = {}
    points = []
    for ratio in sorted(set(ratios)):
        cfg = replace(base, interaction=ratio * base.hop_scale)
        operators[ratio] = bhm.LatticeOperators(bhm.enumerate_basis(cfg))
        for delta_pct in sorted(set(deltas_pct)):
            if delta_pct == 0.0:
                points.append((cfg, None, operators[ratio]))
            else:
                for seed in seeds:
                    noise = replace(template, delta=delta_pct / 100.0, seed=seed)
                    points.append((cfg, noise, operators[ratio]))
    meta = {"ratios": ratios, "deltas_pct": deltas_pct, "seeds": seeds}
    return points, meta


def _run_sweep(args, command_name: str) -> int:
    points, meta = _sweep_points(args)

    def run(point):
        cfg, noise, operators = point
        return bhm.run_fidelity_point(cfg, noise, operators=operators)

    if args.threads > 1:
        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            records = list(pool.map(run, points))
    else:
        records = [run(p) for p in points]
    records.sort(key=lambda r: (r.u_over_t, r.delta_pct, r.seed))
    summaries = bhm.summarize_records(records)
    config = {
        "command": command_name, "sites": args.sites, "n_max": args.n_max,
        "u_over_t": args.u_over_t, "delta": args.delta,
        "seed": args.seed, "num_seeds": args.num_seeds,
        "noise_model": args.noise_model, "baseline_depth": args.baseline_depth,
        "correlation_time": args.correlation_time, "update_interval": args.update_interval,
    }
    _render_sweep(config, records, summaries, args)
    return EXIT_OK


def cmd_fidelity_sweep(args) -> int:
    return _run_sweep(args, "fidelity-sweep")


def cmd_noise_sweep(args) -> int:
    return _run_sweep(args, "noise-sweep")


def cmd_selftest(args) -> int:
    checks: list[tuple[str, bool]] = []

    ok = True
    for n in range(2, 11):
        spec = chains.build_resonant_chain(n)
        prop = chains.single_particle_propagator(spec, chains.inversion_time(spec))
        ok &= all(m > 1 - 1e-9 and abs(p) < 1e-9 for m, p in chains.mirror_report(prop))
    checks.append(("mirror inversion N=2..10", ok))

    checks.append((
        "fock phase law N=2..5",
        all(equivalence.fock_law_check(n).passed for n in range(2, 6)),
    ))
    checks.append((
        "circuit equivalence N=2..5",
        all(equivalence.equivalence_check(n).passed for n in range(2, 6)),
    ))
    checks.append((
        "reduction 10 trials N=5",
        equivalence.reduction_trials(5, trials=10, seed=args.seed).passed,
    ))

    ok = True
    rng = np.random.default_rng(args.seed)
    graphs = [
        graphstate.Graph.from_edges(3, [(1, 2), (1, 3), (2, 3)]),
        graphstate.Graph.from_edges(3, [(1, 2), (2, 3)]),
        graphstate.Graph.from_edges(5, [(1, 2), (1, 3), (1, 4), (1, 5)]),
        graphstate.Graph.complete(5),
    ]
    for _ in range(10):
        n = int(rng.integers(2, 6))
        edges = [(a, b) for a in range(1, n + 1) for b in range(a + 1, n + 1)
                 if rng.random() < 0.5]
        graphs.append(graphstate.Graph.from_edges(n, edges))
    for g in graphs:
        for optimize in (False, True):
            schedule = graphstate.schedule_iterative(g, optimize=optimize)
            ok &= graphstate.track_edges(schedule, g.n_vertices) == g.edges
            ok &= schedule.cycle_count <= 2 * g.n_vertices
            state = graphstate.simulate_schedule(g, schedule, engine="circuit")
            ok &= graphstate.verify_graph_state(state, g).passed
    checks.append(("graph protocol on 14 graphs", ok))

    record = bhm.run_fidelity_point(bhm.BhmConfig(n_sites=4, interaction=26.0, n_max=2))
    checks.append(("lattice-boson point N=4 U/T=26", 0.9 < record.fidelity <= 1.0))
    a = bhm.sample_noise(bhm.NoiseConfig(delta=0.05, seed=args.seed), 10.0)
    b = bhm.sample_noise(bhm.NoiseConfig(delta=0.05, seed=args.seed), 10.0)
    checks.append((
        "noise determinism",
        np.array_equal(a.depths_a, b.depths_a) and np.array_equal(a.depths_b, b.depths_b),
    ))

    config = {"command": "selftest", "seed": args.seed}
    lines = [f"{'PASS' if good else 'FAIL'}  {name}" for name, good in checks]
    all_ok = all(good for _, good in checks)
    lines.append(f"# result: {'pass' if all_ok else 'fail'}")
    _render_report(config, lines, args, {
        "checks": [{"name": name, "passed": good} for name, good in checks],
        "result": "pass" if all_ok else "fail",
    })
    return EXIT_OK if all_ok else EXIT_CHECK_FAILED


# ---------------------------------------------------------------- wiring


def _add_common(parser: argparse.ArgumentParser, formats: tuple[str, ...], default_format: str):
    parser.add_argument("--config", type=str, default=None,
                        help="flat key-value config file; explicit flags win")
    parser.add_argument("--output", type=str, default=None, help="write output to this path")
    parser.add_argument("--format", choices=formats, default=default_format)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--threads", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="entbus",
        description="Entangling-bus graph-state toolkit: checks and experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mirror-check", help="mirror inversion of the bus chain at tau")
    p.add_argument("--sites", type=int, required=True)
    p.add_argument("--j-scale", type=float, default=1.0)
    p.add_argument("--field", type=float, default=None,
                   help="uniform field B; default is the resonant S*J")
    _add_common(p, ("text", "json"), "text")
    p.set_defaults(func=cmd_mirror_check)

    p = sub.add_parser("circuit-equiv", help="bus inversion equals phase * C(N)R")
    p.add_argument("--qubits", type=int, required=True)
    _add_common(p, ("text", "json"), "text")
    p.set_defaults(func=cmd_circuit_equiv)

    p = sub.add_parser("reduction", help="C(N) reduces to C(q) on non-|0> qubits")
    p.add_argument("--qubits", type=int, required=True)
    p.add_argument("--trials", type=int, default=50)
    _add_common(p, ("text", "json"), "text")
    p.set_defaults(func=cmd_reduction)

    p = sub.add_parser("fock-check", help="occupation-sector phase law vs exact evolution")
    p.add_argument("--sites", type=int, required=True)
    p.add_argument("--j-scale", type=float, default=1.0)
    p.add_argument("--field", type=float, default=None)
    _add_common(p, ("text", "json"), "text")
    p.set_defaults(func=cmd_fock_check)

    p = sub.add_parser("graph-run", help="compile, simulate, and verify a graph file")
    p.add_argument("--graph", type=str, required=True)
    p.add_argument("--mode", choices=("strict", "optimized", "edgewise"), default="optimized")
    p.add_argument("--engine", choices=("circuit", "hamiltonian"), default="circuit")
    p.add_argument("--eb-sites", type=int, default=None)
    _add_common(p, ("text", "json"), "text")
    p.set_defaults(func=cmd_graph_run)

    for name, func, extra_defaults in (
        ("fidelity-sweep", cmd_fidelity_sweep, {"delta": "0", "num_seeds": 1}),
        ("noise-sweep", cmd_noise_sweep, {"delta": "0,1,5", "num_seeds": 10}),
    ):
        p = sub.add_parser(name, help="lattice-boson fidelity records over U/T and noise")
        p.add_argument("--sites", type=int, default=6)
        p.add_argument("--n-max", type=int, default=2)
        p.add_argument("--u-over-t", type=str, default="26",
                       help="comma list or start:stop:step range")
        p.add_argument("--delta", type=str, default=extra_defaults["delta"],
                       help="noise std in percent; comma list")
        p.add_argument("--num-seeds", type=int, default=extra_defaults["num_seeds"])
        p.add_argument("--noise-model", choices=("ou", "increment"), default="ou")
        p.add_argument("--baseline-depth", type=float, default=15.0)
        p.add_argument("--correlation-time", type=float, default=None)
        p.add_argument("--update-interval", type=float, default=None)
        _add_common(p, ("csv", "json"), "csv")
        p.set_defaults(func=func)

    p = sub.add_parser("selftest", help="quick battery over every module")
    _add_common(p, ("text", "json"), "text")
    p.set_defaults(func=cmd_selftest)

    return parser


def _expand_config(argv: list[str]) -> list[str]:
    """Splice config-file tokens after the subcommand so explicit flags win."""
    if "--config" not in argv:
        return argv
    idx = argv.index("--config")
    if idx + 1 >= len(argv):
        raise ValueError("--config needs a file path")
    path = argv[idx + 1]
    tokens: list[str] = []
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" in line:
            key, value = (part.strip() for part in line.split("=", 1))
        else:
            parts = line.split(None, 1)
            if len(parts) != 2:
                raise ValueError(f"bad config line {raw!r}")
            key, value = parts
        tokens.extend([f"--{key.replace('_', '-')}", value])
    return argv[:1] + tokens + argv[1:]


def main(argv=None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    try:
        argv = _expand_config(argv)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_BAD_INPUT
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_BAD_INPUT
    try:
        return args.func(args)
    except DimensionCapError as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return EXIT_RESOURCE_CAP
    except PropagationError as exc:
        print(f"propagation failure: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    except (GraphFormatError, ScheduleError, UnsupportedProfileError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
