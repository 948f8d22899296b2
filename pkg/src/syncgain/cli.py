"""Batch front-end: read a scenario file, run synthesis, certification, or
simulation, and emit JSON reports plus trajectory CSVs.

Scenario files are JSON::

    {
      "system": {"A": [[0, 1], [0, 0]], "B": [[0], [1]], "mode": "primal"},
      "graph": "complete 3",            // or {"p": 2, "triples": [[1, 2, 1.0], [2, 1, 1.0]]}
      "delta": 3.0,                     // optional; defaults to -Re(lambda2)
      "sim": {"T": 10, "h": 0.01, "seed": 7, "x0": "random", "record_every": 1},
      "outputs": {"trajectory": "trajectory.csv", "summary": "summary.json"}
    }

Matrices are row-major nested arrays; graph triples are 1-based.  Exit
codes: 0 success, 1 usage or scenario-format error, 2 violated
mathematical hypothesis, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .errors import HypothesisViolation, NumericalFailure
from .graphs import DEFAULT_ZERO_TOL, R_RESIDUAL_RTOL, CouplingMatrix, graph_spectrum, is_connected, parse_graph_spec
from .kernels import backend_name
from .linalg import eigenvalues
from .riccati import DEFAULT_ARE_TOL, solve_are
from .simulate import (
    DEFAULT_MATCH_TOL,
    DELTA_SLACK,
    SYNC_THRESHOLD_RTOL,
    NetworkSetup,
    SystemModel,
    closed_loop_spectrum_report,
    simulate_network,
    sync_error,
    write_trajectory_csv,
)
from .synthesis import (
    DEFAULT_CERT_TOL,
    DEFAULT_GRID_COUNTS,
    DEFAULT_OMEGA_RANGE,
    DEFAULT_SIGMA_RANGE,
    certify_shift_grid,
    summarize_sweep,
    synthesize,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_HYPOTHESIS = 2
EXIT_NUMERICAL = 3

RNG_NAME = "numpy.random.Generator(PCG64)"


class ScenarioError(ValueError):
    """Malformed scenario file (exit code 1)."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _pair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _finite_or_none(x: float) -> float | None:
    return float(x) if np.isfinite(x) else None


def _sorted_pairs(values: np.ndarray) -> list[list[float]]:
    order = sorted(range(values.size), key=lambda i: (-values[i].real, values[i].imag))
    return [_pair(values[i]) for i in order]


def _load_scenario(path: str) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"scenario file {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ScenarioError("scenario must be a JSON object")
    return data


def _parse_system(scenario: dict) -> SystemModel:
    data = scenario.get("system")
    if not isinstance(data, dict):
        raise ScenarioError("scenario is missing the 'system' object")
    missing = {"A", "B"} - data.keys()
    if missing:
        raise ScenarioError(f"system is missing keys {sorted(missing)}")
    mode = data.get("mode", "primal")
    try:
        return SystemModel(np.array(data["A"], dtype=float), np.array(data["B"], dtype=float), mode)
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"bad system: {exc}") from exc


def _parse_graph(scenario: dict) -> CouplingMatrix:
    if "graph" not in scenario:
        raise ScenarioError("scenario is missing the 'graph' entry")
    try:
        return parse_graph_spec(scenario["graph"])
    except ValueError as exc:
        raise ScenarioError(f"bad graph: {exc}") from exc


def _parse_delta(scenario: dict, gap: float) -> tuple[float, str]:
    if "delta" in scenario and scenario["delta"] is not None:
        try:
            delta = float(scenario["delta"])
        except (TypeError, ValueError) as exc:
            raise ScenarioError(f"delta must be a number, got {scenario['delta']!r}") from exc
        if delta > gap + DELTA_SLACK * (1.0 + abs(gap)):
            raise HypothesisViolation(
                f"coupling-strength hypothesis violated: requires delta <= -Re(lambda2) "
                f"but delta = {delta:.6g} and -Re(lambda2) = {gap:.6g}"
            )
        return delta, "explicit"
    if not np.isfinite(gap):
        raise ScenarioError("delta must be given explicitly for single-agent graphs")
    return gap, "graph"


def _sim_options(scenario: dict) -> dict:
    sim = scenario.get("sim", {})
    if not isinstance(sim, dict):
        raise ScenarioError("'sim' must be an object")
    known = {"T", "h", "seed", "x0", "record_every"}
    unknown = sim.keys() - known
    if unknown:
        raise ScenarioError(f"unknown sim options {sorted(unknown)}")
    return sim


def _initial_state(sim: dict, n: int, p: int) -> tuple[np.ndarray, str, int | None]:
    seed = sim.get("seed", 0)
    if seed is not None and not isinstance(seed, int):
        raise ScenarioError(f"seed must be an integer, got {seed!r}")
    spec = sim.get("x0", "random")
    if isinstance(spec, str):
        if spec != "random":
            raise ScenarioError(f"x0 must be 'random' or a flat array, got {spec!r}")
        rng = np.random.default_rng(seed)
        return rng.uniform(-1.0, 1.0, n * p), "random", seed
    try:
        x0 = np.asarray(spec, dtype=float).reshape(-1)
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"bad x0: {exc}") from exc
    if x0.size != n * p:
        raise ScenarioError(f"x0 must have n*p = {n * p} entries, got {x0.size}")
    return x0, "explicit", seed


def _output_path(scenario: dict, out_dir: str | None, key: str, default: str) -> Path:
    outputs = scenario.get("outputs", {})
    if not isinstance(outputs, dict):
        raise ScenarioError("'outputs' must be an object")
    name = outputs.get(key, default)
    path = Path(name)
    if not path.is_absolute() and out_dir is not None:
        path = Path(out_dir) / path
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _emit(summary: dict, scenario: dict, out_dir: str | None) -> None:
    text = json.dumps(summary, indent=2, sort_keys=True)
    print(text)
    path = _output_path(scenario, out_dir, "summary", "summary.json")
    path.write_text(text + "\n")


def cmd_synthesize(args) -> int:
    scenario = _load_scenario(args.scenario)
    system = _parse_system(scenario)
    coupling = _parse_graph(scenario)
    spectrum = graph_spectrum(coupling)
    delta, delta_source = _parse_delta(scenario, spectrum.connectivity_gap)
    gains = synthesize(system.a, system.b, delta, mode=system.mode, tol=DEFAULT_ARE_TOL)
    closed = system.a - system.b @ system.b.T @ gains.are.p_matrix
    summary = {
        "command": "synthesize",
        "mode": system.mode,
        "n": system.n,
        "m": system.m,
        "delta": delta,
        "delta_source": delta_source,
        "scale": gains.scale,
        "P": gains.are.p_matrix.tolist(),
        ("K" if system.mode == "primal" else "L"): gains.gain.tolist(),
        "are_residual": gains.are.residual,
        "closed_loop_eigenvalues": _sorted_pairs(eigenvalues(closed).values),
        "graph": {
            "p": coupling.p,
            "lambda2": None if spectrum.lambda2 is None else _pair(spectrum.lambda2),
            "connectivity_gap": _finite_or_none(spectrum.connectivity_gap),
        },
        "tolerances": {"are_tol": DEFAULT_ARE_TOL, "zero_tol": DEFAULT_ZERO_TOL},
    }
    _emit(summary, scenario, args.out)
    return EXIT_OK


def cmd_spectrum(args) -> int:
    scenario = _load_scenario(args.scenario)
    coupling = _parse_graph(scenario)
    if not is_connected(coupling):
        raise HypothesisViolation(
            "graph is not connected: no node is reachable from every other node"
        )
    spectrum = graph_spectrum(coupling)
    summary = {
        "command": "spectrum",
        "connected": True,
        "p": coupling.p,
        "eigenvalues": _sorted_pairs(spectrum.all_eigenvalues.values),
        "lambda2": None if spectrum.lambda2 is None else _pair(spectrum.lambda2),
        "connectivity_gap": _finite_or_none(spectrum.connectivity_gap),
        "zero_multiplicity": spectrum.zero_multiplicity,
        "r": spectrum.r.tolist(),
        "tolerances": {"zero_tol": DEFAULT_ZERO_TOL, "r_residual_rtol": R_RESIDUAL_RTOL},
    }
    _emit(summary, scenario, args.out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    scenario = _load_scenario(args.scenario)
    system = _parse_system(scenario)
    coupling = _parse_graph(scenario)
    spectrum = graph_spectrum(coupling)
    delta, delta_source = _parse_delta(scenario, spectrum.connectivity_gap)
    gains = synthesize(system.a, system.b, delta, mode=system.mode, tol=DEFAULT_ARE_TOL)

    sim = _sim_options(scenario)
    x0, x0_source, seed = _initial_state(sim, system.n, coupling.p)
    setup = NetworkSetup(system, coupling, gains, x0, spectrum=spectrum)

    t_final = sim.get("T")
    h = sim.get("h")
    record_every = int(sim.get("record_every", 1))
    result = simulate_network(
        setup,
        t_final=None if t_final is None else float(t_final),
        h=None if h is None else float(h),
        exact=args.exact,
        record_every=record_every,
    )
    decay = sync_error(result)
    spec_report = closed_loop_spectrum_report(setup)

    csv_path = _output_path(scenario, args.out, "trajectory", "trajectory.csv")
    write_trajectory_csv(csv_path, result, setup.n, setup.p)

    summary = {
        "command": "simulate",
        "mode": system.mode,
        "reference_form": "r^T (x) exp(A t)" if system.mode == "primal" else "r^T (x) exp(A^T t)",
        "n": system.n,
        "p": coupling.p,
        "delta": delta,
        "delta_source": delta_source,
        "scale": gains.scale,
        "T": float(result.times[-1]),
        "h": result.step,
        "record_every": record_every,
        "num_samples": result.num_samples,
        "integrator": result.integrator,
        "kernel_backend": backend_name(),
        "seed": seed,
        "rng": RNG_NAME if x0_source == "random" else None,
        "x0_source": x0_source,
        "e_initial": decay.e_initial,
        "e_final": decay.e_final,
        "ratio": decay.ratio,
        "first_crossing": decay.first_crossing,
        "sync_threshold": decay.threshold,
        "spectrum_check": {
            "passed": spec_report.passed,
            "max_match_distance": spec_report.max_match_distance,
            "all_blocks_hurwitz": spec_report.all_blocks_hurwitz,
            "min_block_gap": _finite_or_none(spec_report.min_block_gap),
        },
        "trajectory_csv": str(csv_path),
        "tolerances": {
            "are_tol": DEFAULT_ARE_TOL,
            "zero_tol": DEFAULT_ZERO_TOL,
            "match_tol": DEFAULT_MATCH_TOL,
            "sync_threshold_rtol": SYNC_THRESHOLD_RTOL,
        },
    }
    _emit(summary, scenario, args.out)
    return EXIT_OK


def _parse_grid(flag: str | None):
    if flag is None:
        return DEFAULT_SIGMA_RANGE, DEFAULT_OMEGA_RANGE, DEFAULT_GRID_COUNTS
    parts = flag.split(",")
    if len(parts) != 5:
        raise ScenarioError("--grid expects sigma_min,sigma_max,num_sigma,omega_max,num_omega")
    try:
        sigma_min, sigma_max = float(parts[0]), float(parts[1])
        num_sigma = int(parts[2])
        omega_max = float(parts[3])
        num_omega = int(parts[4])
    except ValueError as exc:
        raise ScenarioError(f"bad --grid value: {exc}") from exc
    if sigma_min < 1.0:
        raise ScenarioError(f"--grid sigma_min must be >= 1, got {sigma_min:.6g}")
    if num_sigma < 0 or num_omega < 0:
        raise ScenarioError("--grid counts must be nonnegative")
    return (sigma_min, sigma_max), (-omega_max, omega_max), (num_sigma, num_omega)


def cmd_certify(args) -> int:
    sigma_range, omega_range, counts = _parse_grid(args.grid)
    scenario = _load_scenario(args.scenario)
    system = _parse_system(scenario)
    are = solve_are(system.a, system.b, tol=DEFAULT_ARE_TOL)
    certificates = certify_shift_grid(
        system.a,
        system.b,
        are.p_matrix,
        sigma_range=sigma_range,
        omega_range=omega_range,
        counts=counts,
        tol=DEFAULT_CERT_TOL,
    )
    sweep = summarize_sweep(certificates)
    summary = {
        "command": "certify",
        "mode": system.mode,
        "n": system.n,
        "m": system.m,
        "grid": {
            "sigma_min": sigma_range[0],
            "sigma_max": sigma_range[1],
            "num_sigma": counts[0],
            "omega_min": omega_range[0],
            "omega_max": omega_range[1],
            "num_omega": counts[1],
            "sigma_spacing": "log",
            "omega_spacing": "linear",
        },
        "num_points": sweep.num_points,
        "worst_max_real_part": _finite_or_none(sweep.worst_max_real_part),
        "worst_identity_residual": sweep.worst_identity_residual,
        "residual_bound": certificates[0].residual_bound if certificates else None,
        "are_residual": are.residual,
        "passed": sweep.all_passed,
        "tolerances": {"cert_tol": DEFAULT_CERT_TOL, "are_tol": DEFAULT_ARE_TOL},
    }
    _emit(summary, scenario, args.out)
    return EXIT_OK if sweep.all_passed else EXIT_NUMERICAL


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="syncgain",
        description="Synthesize, certify, and simulate coupling gains for networks of identical linear systems.",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("scenario", help="path to the scenario JSON file")
        p.add_argument("--out", default=None, help="directory for output files")
        p.set_defaults(func=func)
        return p

    add("synthesize", cmd_synthesize, "solve the Riccati equation and report gains")
    add("spectrum", cmd_spectrum, "report coupling-matrix connectivity and spectrum")
    sim = add("simulate", cmd_simulate, "integrate the coupled network and measure synchronization")
    sim.add_argument("--exact", action="store_true", help="advance by the one-step matrix exponential instead of RK4")
    cert = add("certify", cmd_certify, "sweep shifted closed loops over a sigma x omega grid")
    cert.add_argument("--grid", default=None, metavar="SMIN,SMAX,NS,WMAX,NW", help="certification grid")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ScenarioError as exc:
        print(f"syncgain: scenario error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except HypothesisViolation as exc:
        print(f"syncgain: hypothesis violation: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except NumericalFailure as exc:
        print(f"syncgain: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
