"""Closed-loop assembly, integration, and synchronization measurement.

The coupled network stacks p identical agents into one linear flow.  In
primal (state-coupled) mode each agent runs ``x_i' = A x_i + B u_i`` with
``u_i = scale * K * sum_j gamma_ij (x_j - x_i)``, so the stack obeys

    X' = (I_p (x) A + Gamma (x) scale*B*K) X.

In dual (output-coupled) mode the agents are ``x_i' = A' x_i + u_i`` with
outputs ``y_i = B' x_i`` and ``u_i = scale * L * sum_j gamma_ij (y_j - y_i)``,
giving ``I_p (x) A' + Gamma (x) scale*L*B'``.

Both synchronize to the weighted free trajectory
``xbar(t) = sum_i r_i e^{A_eff t} x_i(0)`` where r is the left null vector
of Gamma and A_eff is A (primal) or A' (dual).  The per-agent
synchronization error is ``|x_i(t) - xbar(t)|`` in the 2-norm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.optimize

from . import kernels
from .errors import HypothesisViolation, NumericalFailure
from .graphs import CouplingMatrix, GraphSpectrum, graph_spectrum
from .linalg import as_matrix, as_square, eigenvalues, expm, kron
from .synthesis import GainSynthesis, MODES

__all__ = [
    "SystemModel",
    "NetworkSetup",
    "SimulationResult",
    "DecayReport",
    "SpectrumCheckReport",
    "build_closed_loop",
    "certified_blocks",
    "closed_loop_spectrum_check",
    "closed_loop_spectrum_report",
    "reference_trajectory",
    "integrate",
    "simulate_network",
    "sync_error",
    "write_trajectory_csv",
]

DEFAULT_MAX_STEP = 1e-2
STEP_NORM_FACTOR = 0.1
SYNC_THRESHOLD_RTOL = 1e-6
R_EQUATION_RTOL = 1e-8
DELTA_SLACK = 1e-12
DEFAULT_MATCH_TOL = 1e-6


@dataclass(frozen=True)
class SystemModel:
    """The pair (A, B) with a coupling-mode flag."""

    a: np.ndarray = field(repr=False)
    b: np.ndarray = field(repr=False)
    mode: str = "primal"

    def __post_init__(self):
        a = as_square(self.a, "A")
        b = as_matrix(self.b, "B")
        if np.iscomplexobj(a) or np.iscomplexobj(b):
            raise ValueError("A and B must be real")
        if b.shape[0] != a.shape[0]:
            raise ValueError(f"B must have {a.shape[0]} rows, got {b.shape[0]}")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def n(self) -> int:
        return self.a.shape[0]

    @property
    def m(self) -> int:
        return self.b.shape[1]

    @property
    def dynamics(self) -> np.ndarray:
        """Open-loop agent dynamics: A in primal mode, A' in dual mode."""
        return self.a if self.mode == "primal" else self.a.T

    def __repr__(self) -> str:
        return f"SystemModel(n={self.n}, m={self.m}, mode={self.mode!r})"


@dataclass
class NetworkSetup:
    """A coupled network ready to simulate.

    Validates dimensional consistency and the coupling-strength hypothesis
    ``delta <= -Re(lambda2)``; computes the graph spectrum when not
    supplied.
    """

    system: SystemModel
    coupling: CouplingMatrix
    gains: GainSynthesis
    x0: np.ndarray
    spectrum: GraphSpectrum | None = None

    def __post_init__(self):
        self.x0 = np.asarray(self.x0, dtype=np.float64).reshape(-1)
        if not np.all(np.isfinite(self.x0)):
            raise ValueError("x0 has non-finite entries")
        n, p = self.system.n, self.coupling.p
        if self.x0.size != n * p:
            raise ValueError(f"x0 must have n*p = {n * p} entries, got {self.x0.size}")
        if self.gains.mode != self.system.mode:
            raise ValueError(
                f"gain mode {self.gains.mode!r} does not match system mode {self.system.mode!r}"
            )
        if self.gains.b.shape != self.system.b.shape or not np.array_equal(self.gains.b, self.system.b):
            raise ValueError("gains were synthesized for a different B matrix")
        if self.spectrum is None:
            self.spectrum = graph_spectrum(self.coupling)
        gap = self.spectrum.connectivity_gap
        if self.gains.delta > gap + DELTA_SLACK * (1.0 + abs(gap)):
            raise HypothesisViolation(
                f"coupling too weak for the requested target: -Re(lambda2) = {gap:.6g} "
                f"is below delta = {self.gains.delta:.6g}"
            )

    @property
    def n(self) -> int:
        return self.system.n

    @property
    def p(self) -> int:
        return self.coupling.p

    def coupling_feed(self) -> np.ndarray:
        """The n x n factor multiplying Gamma in the stacked dynamics."""
        if self.system.mode == "primal":
            return self.gains.scale * (self.system.b @ self.gains.K)
        return self.gains.scale * (self.gains.L @ self.system.b.T)


def build_closed_loop(setup: NetworkSetup) -> np.ndarray:
    """Stacked np x np closed-loop matrix ``I_p (x) A_eff + Gamma (x) feed``."""
    eye_p = np.eye(setup.p)
    return kron(eye_p, setup.system.dynamics) + kron(setup.coupling.gamma, setup.coupling_feed())


def certified_blocks(setup: NetworkSetup) -> list[tuple[complex, np.ndarray]]:
    """Per-eigenvalue diagonal blocks ``A_eff + lambda_i * feed``.

    One block per nonzero coupling eigenvalue; the simple zero eigenvalue
    contributes the free block ``A_eff`` and is excluded here.
    """
    vals = setup.spectrum.all_eigenvalues.values
    zero_idx = int(np.argmin(np.abs(vals)))
    feed = setup.coupling_feed()
    a_eff = setup.system.dynamics
    return [
        (complex(lam), a_eff + lam * feed)
        for i, lam in enumerate(vals)
        if i != zero_idx
    ]


@dataclass(frozen=True)
class SpectrumCheckReport:
    """Outcome of the block-diagonal eigenvalue-multiset identity."""

    passed: bool
    max_match_distance: float
    match_tol: float
    all_blocks_hurwitz: bool
    min_block_gap: float

    @property
    def spectrum_matches(self) -> bool:
        return self.max_match_distance <= self.match_tol


def closed_loop_spectrum_report(
    setup: NetworkSetup, match_tol: float = DEFAULT_MATCH_TOL
) -> SpectrumCheckReport:
    """Check eig(M) against eig(A_eff) plus the certified block spectra.

    The stacked closed loop is similar to a block-triangular matrix whose
    diagonal holds A_eff and the blocks ``A_eff + lambda_i * feed``, so the
    eigenvalue multisets must coincide.  Matching is an optimal assignment
    between the two multisets; ``min_block_gap`` is the smallest decay rate
    among the certified blocks (the slowest certified error mode).
    """
    m = build_closed_loop(setup)
    actual = eigenvalues(m).values
    predicted = list(eigenvalues(setup.system.dynamics).values)
    blocks = certified_blocks(setup)
    block_margins = []
    for _, block in blocks:
        spec = eigenvalues(block)
        predicted.extend(spec.values)
        block_margins.append(-spec.max_real)
    predicted = np.asarray(predicted, dtype=np.complex128)

    cost = np.abs(predicted[:, None] - actual[None, :])
    rows, cols = scipy.optimize.linear_sum_assignment(cost)
    max_dist = float(cost[rows, cols].max()) if cost.size else 0.0

    all_hurwitz = all(margin > 0.0 for margin in block_margins)
    min_gap = min(block_margins) if block_margins else float("inf")
    return SpectrumCheckReport(
        passed=(max_dist <= match_tol) and all_hurwitz,
        max_match_distance=max_dist,
        match_tol=match_tol,
        all_blocks_hurwitz=all_hurwitz,
        min_block_gap=min_gap,
    )


def closed_loop_spectrum_check(setup: NetworkSetup, match_tol: float = DEFAULT_MATCH_TOL) -> bool:
    return closed_loop_spectrum_report(setup, match_tol).passed


def _check_r(setup: NetworkSetup, r: np.ndarray) -> np.ndarray:
    r = np.asarray(r, dtype=np.float64).reshape(-1)
    if r.size != setup.p:
        raise ValueError(f"r must have p = {setup.p} entries, got {r.size}")
    gamma = setup.coupling.gamma
    scale = 1.0 + float(np.linalg.norm(gamma))
    if float(np.linalg.norm(r @ gamma)) > R_EQUATION_RTOL * scale:
        raise ValueError("r is not a left null vector of the coupling matrix")
    if abs(float(r.sum()) - 1.0) > R_EQUATION_RTOL:
        raise ValueError("r is not normalized against the all-ones vector")
    return r


def reference_trajectory(setup: NetworkSetup, r: np.ndarray, t: float) -> np.ndarray:
    """Predicted common trajectory ``sum_i r_i e^{A_eff t} x_i(0)``."""
    r = _check_r(setup, r)
    w0 = setup.x0.reshape(setup.p, setup.n).T @ r
    return expm(setup.system.dynamics, float(t)) @ w0


def integrate(
    m,
    x0,
    t_final: float,
    h: float,
    exact: bool = False,
    record_every: int = 1,
) -> tuple[np.ndarray, np.ndarray]:
    """Integrate ``x' = m x`` over [0, t_final] on a uniform grid.

    Classical RK4 by default; with ``exact=True`` the state is advanced by
    the one-step matrix exponential instead (the semigroup property makes
    the recorded samples equal ``e^{m t_k} x0`` up to rounding), which
    cross-validates the RK4 path.  The step count is rounded so that the
    recorded grid lands exactly on ``t_final``; samples are recorded every
    ``record_every`` steps.

    Returns ``(times, states)`` with ``states[k] = x(times[k])``.
    """
    m_arr = as_square(m, "m")
    if np.iscomplexobj(m_arr):
        raise ValueError("m must be real")
    x0 = np.asarray(x0, dtype=np.float64).reshape(-1)
    if x0.size != m_arr.shape[0]:
        raise ValueError(f"x0 must have {m_arr.shape[0]} entries, got {x0.size}")
    if h <= 0.0:
        raise ValueError(f"step size must be positive, got {h}")
    if t_final < 0.0:
        raise ValueError(f"horizon must be nonnegative, got {t_final}")
    stride = int(record_every)
    if stride < 1:
        raise ValueError(f"record_every must be >= 1, got {record_every}")

    if t_final == 0.0:
        return np.zeros(1), x0[None, :].copy()

    n_steps = max(1, int(round(t_final / h)))
    n_steps = stride * math.ceil(n_steps / stride)
    h_eff = t_final / n_steps

    if exact:
        states, bad = kernels.propagate_path(expm(m_arr, h_eff), x0, n_steps, stride)
    else:
        states, bad = kernels.rk4_path(m_arr, x0, h_eff, n_steps, stride)
    if bad >= 0:
        raise NumericalFailure(
            f"state became non-finite at t = {bad * h_eff:.6g} (step {bad}/{n_steps}); "
            "unstable dynamics can overflow over long horizons"
        )
    times = h_eff * stride * np.arange(states.shape[0])
    return times, states


@dataclass(frozen=True)
class SimulationResult:
    """Sampled network trajectory with its predicted common trajectory.

    ``states`` is (num_samples, n*p); ``reference`` is (num_samples, n);
    ``errors[k, i] = |x_i(t_k) - xbar(t_k)|``.
    """

    times: np.ndarray = field(repr=False)
    states: np.ndarray = field(repr=False)
    reference: np.ndarray = field(repr=False)
    errors: np.ndarray = field(repr=False)
    mode: str
    integrator: str
    step: float

    @property
    def num_samples(self) -> int:
        return self.times.size

    def __repr__(self) -> str:
        return (
            f"SimulationResult(samples={self.num_samples}, mode={self.mode!r}, "
            f"integrator={self.integrator!r}, step={self.step:.3g})"
        )


def simulate_network(
    setup: NetworkSetup,
    t_final: float | None = None,
    h: float | None = None,
    exact: bool = False,
    record_every: int = 1,
) -> SimulationResult:
    """Simulate the coupled network and measure synchronization errors.

    Defaults: horizon ``20 / delta`` and step ``min(1e-2, 0.1 / ||M||_2)``,
    which resolves the fastest closed-loop mode.  The reference trajectory
    is advanced by the exact one-step exponential of A_eff on the same
    grid, so the reported errors never normalize by the (possibly growing)
    state magnitude, only compare against the predicted common trajectory.
    """
    m = build_closed_loop(setup)
    if t_final is None:
        t_final = 20.0 / setup.gains.delta
    if h is None:
        h = min(DEFAULT_MAX_STEP, STEP_NORM_FACTOR / max(1e-300, float(np.linalg.norm(m, 2))))
    times, states = integrate(m, setup.x0, t_final, h, exact=exact, record_every=record_every)

    r = setup.spectrum.r
    w = setup.x0.reshape(setup.p, setup.n).T @ r
    reference = np.empty((times.size, setup.n))
    reference[0] = w
    if times.size > 1:
        step_prop = expm(setup.system.dynamics, float(times[1] - times[0]))
        for k in range(1, times.size):
            w = step_prop @ w
            reference[k] = w

    per_agent = states.reshape(times.size, setup.p, setup.n) - reference[:, None, :]
    errors = np.linalg.norm(per_agent, axis=2)
    return SimulationResult(
        times=times,
        states=states,
        reference=reference,
        errors=errors,
        mode=setup.system.mode,
        integrator="exact" if exact else "rk4",
        step=float(times[1] - times[0]) if times.size > 1 else float(h),
    )


@dataclass(frozen=True)
class DecayReport:
    """Synchronization-error decay summary.

    ``ratio`` is ``e(T)/e(0)``, or ``None`` when the network starts on the
    synchronized manifold (then the manifold-invariance check applies
    instead).  ``first_crossing`` is the earliest sample time with
    ``e(t) <= threshold`` where ``threshold = 1e-6 * (1 + e(0))``.
    """

    e_initial: float
    e_final: float
    ratio: float | None
    threshold: float
    first_crossing: float | None


def sync_error(result: SimulationResult) -> DecayReport:
    """Worst-agent error decay report for a simulated network."""
    e = result.errors.max(axis=1)
    e0 = float(e[0])
    e_final = float(e[-1])
    threshold = SYNC_THRESHOLD_RTOL * (1.0 + e0)
    below = np.nonzero(e <= threshold)[0]
    return DecayReport(
        e_initial=e0,
        e_final=e_final,
        ratio=(e_final / e0) if e0 > 0.0 else None,
        threshold=threshold,
        first_crossing=float(result.times[below[0]]) if below.size else None,
    )


def write_trajectory_csv(path, result: SimulationResult, n: int, p: int) -> None:
    """Write the sampled trajectory as CSV.

    Columns: ``time, x_1_1..x_p_n, ref_1..ref_n, err_1..err_p`` with agent-
    major state columns (``x_i_k`` is state component k of agent i).
    Floats are rendered with shortest round-trip precision so identical
    runs produce identical bytes.
    """
    header = ["time"]
    header += [f"x_{i}_{k}" for i in range(1, p + 1) for k in range(1, n + 1)]
    header += [f"ref_{k}" for k in range(1, n + 1)]
    header += [f"err_{i}" for i in range(1, p + 1)]
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for k in range(result.num_samples):
            row = [result.times[k], *result.states[k], *result.reference[k], *result.errors[k]]
            fh.write(",".join(repr(float(v)) for v in row) + "\n")
