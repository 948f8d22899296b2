"""Acceptance suite: one test per criterion, one printed verdict line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the verdict lines;
each test also asserts, so plain ``pytest`` enforces the same bar.
"""

import json
import subprocess
import sys
import time

import numpy as np

from conftest import draw_network, horizon_and_step, make_rng, random_stabilizable_pair
from syncgain import (
    NetworkSetup,
    SystemModel,
    build_closed_loop,
    certified_blocks,
    closed_loop_spectrum_report,
    complete_coupling,
    graph_spectrum,
    integrate,
    is_hurwitz,
    certify_shift_grid,
    random_coupling,
    simulate_network,
    solve_are,
    sync_error,
    synthesize,
)

DOUBLE_INTEGRATOR = (np.array([[0.0, 1.0], [0.0, 0.0]]), np.array([[0.0], [1.0]]))


def _verdict(name, failures, elapsed, limit=None):
    ok = not failures and (limit is None or elapsed < limit)
    budget = f", budget {limit:.0f}s" if limit is not None else ""
    print(f"\nacceptance {name}: {'PASS' if ok else 'FAIL'} ({elapsed:.2f}s{budget})")
    assert ok, f"{name}: {failures[:5]} elapsed={elapsed:.2f}s"


def test_criterion_1_are_contract():
    """100 random stabilizable pairs: residual, positivity, Hurwitz loop."""
    rng = make_rng(101)
    failures = []
    start = time.perf_counter()
    for case in range(100):
        a, b = random_stabilizable_pair(rng, n_max=8, m_max=3)
        sol = solve_are(a, b, tol=1e-9)
        p = sol.p_matrix
        n = a.shape[0]
        residual = np.linalg.norm(a.T @ p + p @ a + np.eye(n) - p @ b @ b.T @ p)
        if residual > 1e-9 * (1.0 + np.linalg.norm(p) ** 2):
            failures.append(f"case {case}: residual {residual:.3e}")
        if np.linalg.eigvalsh(p).min() <= 0.0:
            failures.append(f"case {case}: P not positive definite")
        if not is_hurwitz(a - b @ b.T @ p):
            failures.append(f"case {case}: closed loop not Hurwitz")
    _verdict("1 (ARE contract, 100 random pairs)", failures, time.perf_counter() - start, limit=10.0)


def test_criterion_2_hand_solved_oracles():
    """Scalar integrator, stable scalar, and double integrator to 1e-8."""
    start = time.perf_counter()
    failures = []
    checks = [
        (np.array([[0.0]]), np.array([[1.0]]), np.array([[1.0]])),
        (np.array([[-1.0]]), np.array([[1.0]]), np.array([[np.sqrt(2.0) - 1.0]])),
        (*DOUBLE_INTEGRATOR, np.array([[np.sqrt(3.0), 1.0], [1.0, np.sqrt(3.0)]])),
    ]
    for a, b, want in checks:
        got = solve_are(a, b).p_matrix
        if np.abs(got - want).max() > 1e-8:
            failures.append(f"P mismatch for A={a.tolist()}: {got.tolist()}")
    k = DOUBLE_INTEGRATOR[1].T @ solve_are(*DOUBLE_INTEGRATOR).p_matrix
    if np.abs(k - np.array([[1.0, np.sqrt(3.0)]])).max() > 1e-8:
        failures.append(f"K mismatch: {k.tolist()}")
    _verdict("2 (hand-solved oracles)", failures, time.perf_counter() - start)


def test_criterion_3_shifted_hurwitz_sweep():
    """20 random systems swept over sigma in [1,100] x omega in [-100,100]."""
    rng = make_rng(103)
    failures = []
    start = time.perf_counter()
    for case in range(20):
        a, b = random_stabilizable_pair(rng, n_max=6, m_max=3)
        p = solve_are(a, b).p_matrix
        bound = 1e-8 * (1.0 + np.linalg.norm(p) ** 2)
        for cert in certify_shift_grid(a, b, p):
            if cert.max_real_part >= 0.0:
                failures.append(
                    f"case {case}: not Hurwitz at sigma={cert.sigma:.3g}, omega={cert.omega:.3g}"
                )
            if cert.identity_residual > bound:
                failures.append(
                    f"case {case}: identity residual {cert.identity_residual:.3e} at "
                    f"sigma={cert.sigma:.3g}, omega={cert.omega:.3g}"
                )
    _verdict("3 (shifted-Hurwitz sweep, 20 systems)", failures, time.perf_counter() - start, limit=30.0)


def test_criterion_4_connected_coupling_fact():
    """100 random connected couplings: simple zero, left spectrum, consensus flow."""
    rng = make_rng(104)
    failures = []
    start = time.perf_counter()
    for case in range(100):
        p_agents = int(rng.integers(2, 21))
        g = random_coupling(p_agents, float(rng.uniform(0.05, 0.6)), rng)
        spec = graph_spectrum(g)
        scale = 1.0 + np.linalg.norm(g.gamma)
        if spec.zero_multiplicity != 1:
            failures.append(f"case {case}: zero multiplicity {spec.zero_multiplicity}")
        nonzero = [z for z in spec.all_eigenvalues.values if abs(z) > 1e-8 * scale]
        if not all(z.real <= -1e-12 * scale for z in nonzero):
            failures.append(f"case {case}: nonzero eigenvalue touching the axis")

        x0 = rng.uniform(-2.0, 2.0, p_agents)
        spread0 = x0.max() - x0.min()
        h = min(1e-2, 0.1 / np.linalg.norm(g.gamma, 2))
        _, states = integrate(g.gamma, x0, 18.0 / spec.connectivity_gap, h, record_every=10)
        target = float(spec.r @ x0)
        if np.abs(states[-1] - target).max() > 1e-6 * (1.0 + spread0):
            failures.append(f"case {case}: limit differs from weighted average")
        if states[-1].max() - states[-1].min() > 1e-6 * spread0:
            failures.append(f"case {case}: terminal spread too large")
        slack = 1e-9 * (1.0 + spread0)
        if np.any(np.diff(states.min(axis=1)) < -slack) or np.any(np.diff(states.max(axis=1)) > slack):
            failures.append(f"case {case}: min-max envelope grew")
    _verdict("4 (connected-coupling fact, 100 graphs)", failures, time.perf_counter() - start)


def _end_to_end(mode, seed, failures):
    rng = make_rng(seed)
    for case in range(25):
        setup, report = draw_network(rng, mode=mode)
        if report.max_match_distance > 1e-6:
            failures.append(f"{mode} case {case}: spectrum mismatch {report.max_match_distance:.3e}")
        if not report.all_blocks_hurwitz:
            failures.append(f"{mode} case {case}: non-Hurwitz block")
        t_final, h = horizon_and_step(setup, report)
        decay = sync_error(simulate_network(setup, t_final=t_final, h=h))
        if decay.ratio is None or decay.ratio > 1e-3:
            failures.append(f"{mode} case {case}: decay ratio {decay.ratio}")


def test_criterion_5_state_coupled_end_to_end():
    """25 random state-coupled networks plus the hand-checked complete-triangle case."""
    failures = []
    start = time.perf_counter()

    # double integrator on the complete triangle: delta = 3, scale = 1, and
    # every certified block must equal [[0, 1], [-3, -3 sqrt(3)]]
    a, b = DOUBLE_INTEGRATOR
    gains = synthesize(a, b, delta=3.0)
    rng = make_rng(105)
    setup = NetworkSetup(SystemModel(a, b), complete_coupling(3), gains, rng.uniform(-1, 1, 6))
    want_block = np.array([[0.0, 1.0], [-3.0, -3.0 * np.sqrt(3.0)]])
    for lam, block in certified_blocks(setup):
        if np.abs(block - want_block).max() > 1e-8:
            failures.append(f"hand case: block for lambda={lam} deviates")
    report = closed_loop_spectrum_report(setup)
    if not report.passed or report.max_match_distance > 1e-6:
        failures.append("hand case: spectrum check failed")
    t_final, h = horizon_and_step(setup, report)
    decay = sync_error(simulate_network(setup, t_final=t_final, h=h))
    if decay.ratio is None or decay.ratio > 1e-3:
        failures.append(f"hand case: decay ratio {decay.ratio}")

    _end_to_end("primal", 1105, failures)
    _verdict("5 (state-coupled end-to-end, 25+1 networks)", failures, time.perf_counter() - start, limit=60.0)


def test_criterion_6_output_coupled_end_to_end():
    """Same harness with output coupling and the transposed reference flow."""
    failures = []
    start = time.perf_counter()
    _end_to_end("dual", 1106, failures)
    _verdict("6 (output-coupled end-to-end, 25 networks)", failures, time.perf_counter() - start, limit=60.0)


def test_criterion_7_integrator_cross_validation():
    """RK4 against the exact propagator on 10 closed loops with norm <= 5."""
    rng = make_rng(107)
    failures = []
    start = time.perf_counter()
    produced = 0
    while produced < 10:
        setup, _ = draw_network(rng, p_max=4, n_max=3)
        m = build_closed_loop(setup)
        # time-rescale to a random norm in [1, 5]; the rescaled matrix is the
        # closed loop of the correspondingly rescaled plant
        m *= float(rng.uniform(1.0, 5.0)) / np.linalg.norm(m, 2)
        x0 = rng.uniform(-1.0, 1.0, m.shape[0])
        _, rk4 = integrate(m, x0, 5.0, 1e-3)
        _, exact = integrate(m, x0, 5.0, 1e-3, exact=True)
        scale = max(np.linalg.norm(rk4, axis=1).max(), np.linalg.norm(exact, axis=1).max())
        deviation = np.abs(rk4 - exact).max()
        if deviation > 1e-8 * scale:
            failures.append(f"loop {produced}: deviation {deviation:.3e} vs scale {scale:.3e}")
        produced += 1
    _verdict("7 (integrator cross-validation, 10 loops)", failures, time.perf_counter() - start)


def test_criterion_8_cli_determinism_and_exit_codes(tmp_path):
    """Byte-identical repeated runs; hypothesis violations exit 2 with the condition named."""
    failures = []
    start = time.perf_counter()
    scenario_path = tmp_path / "scenario.json"
    scenario_path.write_text(
        json.dumps(
            {
                "system": {"A": [[0.0, 1.0], [0.0, 0.0]], "B": [[0.0], [1.0]]},
                "graph": "cycle 4",
                "sim": {"T": 4.0, "seed": 2026},
            }
        )
    )
    artifacts = []
    for run in ("a", "b"):
        out_dir = tmp_path / run
        proc = subprocess.run(
            [sys.executable, "-m", "syncgain", "simulate", str(scenario_path), "--out", str(out_dir)],
            capture_output=True,
            check=False,
        )
        if proc.returncode != 0:
            failures.append(f"run {run} exited {proc.returncode}: {proc.stderr.decode()[:200]}")
            continue
        artifacts.append(
            (
                proc.stdout.replace(str(out_dir).encode(), b"OUT"),
                (out_dir / "trajectory.csv").read_bytes(),
                (out_dir / "summary.json").read_bytes().replace(str(out_dir).encode(), b"OUT"),
            )
        )
    if len(artifacts) == 2 and artifacts[0] != artifacts[1]:
        failures.append("repeated runs are not byte-identical")

    violations = [
        (
            {"system": {"A": [[0.0]], "B": [[1.0]]}, "graph": "complete 3", "delta": 5.0},
            "delta <= -Re(lambda2)",
        ),
        (
            {"system": {"A": [[1.0, 0.0], [0.0, 1.0]], "B": [[0.0], [0.0]]}, "graph": "complete 3"},
            "PBH",
        ),
    ]
    for idx, (scenario, needle) in enumerate(violations):
        bad_path = tmp_path / f"bad{idx}.json"
        bad_path.write_text(json.dumps(scenario))
        proc = subprocess.run(
            [sys.executable, "-m", "syncgain", "synthesize", str(bad_path), "--out", str(tmp_path)],
            capture_output=True,
            check=False,
        )
        if proc.returncode != 2:
            failures.append(f"violation {idx} exited {proc.returncode}, expected 2")
        if needle not in proc.stderr.decode():
            failures.append(f"violation {idx} does not name the condition ({needle!r})")
    _verdict("8 (CLI determinism and exit codes)", failures, time.perf_counter() - start)
