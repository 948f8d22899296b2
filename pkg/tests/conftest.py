"""Shared random-model generators for the test suite.

All tests draw from seeded ``numpy.random.Generator`` instances so the
suite is deterministic.  The end-to-end generator applies mild
conditioning guards (resampling draws with extreme Riccati solutions,
closed-loop norms, or sluggish certified blocks); these only bound the
runtime of the simulations, the properties under test are claimed for
every accepted draw.
"""

from __future__ import annotations

import numpy as np
import pytest

from syncgain import (
    CouplingMatrix,
    NetworkSetup,
    SystemModel,
    build_closed_loop,
    closed_loop_spectrum_report,
    eigenvalues,
    graph_spectrum,
    is_stabilizable,
    random_coupling,
    synthesize,
)


def make_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)


def random_stabilizable_pair(rng, n_max: int = 8, m_max: int = 3):
    """Random (A, B) passing the PBH test, n <= n_max, m <= m_max."""
    while True:
        n = int(rng.integers(1, n_max + 1))
        m = int(rng.integers(1, m_max + 1))
        a = rng.normal(size=(n, n))
        b = rng.normal(size=(n, m))
        if is_stabilizable(a, b):
            return a, b


def random_connected_coupling(rng, p_max: int = 20) -> CouplingMatrix:
    """Random connected coupling matrix with 2 <= p <= p_max agents."""
    p = int(rng.integers(2, p_max + 1))
    density = float(rng.uniform(0.05, 0.6))
    return random_coupling(p, density, rng)


def random_hurwitz(rng, d: int, complex_entries: bool = False) -> np.ndarray:
    """Random Hurwitz matrix: a random matrix shifted left of its spectrum."""
    g = rng.normal(size=(d, d))
    if complex_entries:
        g = g + 1j * rng.normal(size=(d, d))
    shift = float(np.linalg.eigvals(g).real.max()) + float(rng.uniform(0.5, 2.0))
    return g - shift * np.eye(d)


def draw_network(rng, mode: str = "primal", p_max: int = 12, n_max: int = 4):
    """Random synthesized network with delta = -Re(lambda2).

    The coupling matrix is rescaled to a moderate spectral gap and draws
    with extreme conditioning are rejected (runtime guards; see module
    docstring).  Returns (setup, spectrum_report).
    """
    while True:
        n = int(rng.integers(1, n_max + 1))
        m = int(rng.integers(1, min(n, 3) + 1))
        a = rng.normal(size=(n, n))
        b = rng.normal(size=(n, m))
        if not is_stabilizable(a, b):
            continue
        p = int(rng.integers(2, p_max + 1))
        coupling = random_coupling(p, float(rng.uniform(0.2, 0.8)), rng)
        gap = graph_spectrum(coupling).connectivity_gap
        target_gap = float(rng.uniform(0.5, 2.0))
        coupling = CouplingMatrix(coupling.gamma * (target_gap / gap))
        spectrum = graph_spectrum(coupling)
        delta = spectrum.connectivity_gap

        gains = synthesize(a, b, delta, mode=mode)
        if float(np.linalg.eigvalsh(gains.are.p_matrix).max()) > 8.0:
            continue
        setup = NetworkSetup(
            SystemModel(a, b, mode),
            coupling,
            gains,
            rng.uniform(-1.0, 1.0, n * p),
            spectrum=spectrum,
        )
        if float(np.linalg.norm(build_closed_loop(setup), 2)) > 40.0:
            continue
        report = closed_loop_spectrum_report(setup)
        if report.min_block_gap < 0.2:
            continue
        # the common mode grows like exp(rho * T) for unstable plants; cap
        # the growth exponent over the 20/gap horizon so the absolute sync
        # error is not swamped by floating-point coupling of that mode
        rho = max(0.0, eigenvalues(a).max_real)
        if rho * 20.0 / report.min_block_gap > 10.0:
            continue
        return setup, report


def horizon_and_step(setup, report) -> tuple[float, float]:
    """Simulation horizon 20/gap with a step small enough that the RK4
    drift of the growing common mode stays below 1e-6 absolute.

    RK4 advances each eigenmode by ``exp(h lam) (1 + O((h|lam|)^5 / 120))``
    per step, so over N = T/h steps the mode's relative drift is about
    ``T h^4 |lam|^5 / 120`` and its absolute drift scales with the mode
    magnitude ``exp(Re(lam) T)``.
    """
    t_final = 20.0 / report.min_block_gap
    m_norm = float(np.linalg.norm(build_closed_loop(setup), 2))
    h = min(1e-2, 0.1 / m_norm)
    rho = max(0.0, eigenvalues(setup.system.dynamics).max_real)
    if rho > 0.0:
        growth = np.exp(rho * t_final)
        h_drift = (1e-6 * 120.0 / (t_final * rho**5 * growth)) ** 0.25
        h = min(h, float(h_drift))
    return t_final, h


@pytest.fixture
def rng() -> np.random.Generator:
    return make_rng(20260810)
