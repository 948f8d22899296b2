"""Coupling-gain synthesis and shifted-Hurwitz certification.

Given a stabilizable pair (A, B) and a coupling-strength target
``delta > 0``, the synthesized feedback is ``K = B' P`` (state-coupled,
primal) or the output-injection gain ``L = P B`` (output-coupled, dual),
with P the Riccati solution, applied through the scale
``max(1, 1/delta)``.

The certification side checks the property the whole design rests on: for
every shift ``s = sigma + j*omega`` with ``sigma >= 1``, the matrix
``A - s BB'P`` is Hurwitz, and with ``eps = sigma - 1`` it satisfies the
complex Lyapunov identity

    (A - s BB'P)^H P + P (A - s BB'P) = -I - (1 + 2 eps) P BB' P.

A certificate records the worst closed-loop real part and the identity
residual at one shift; a grid sweep collects certificates as empirical
evidence across a sigma x omega rectangle (it cannot, of course, prove a
universally quantified statement).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import HypothesisViolation
from .linalg import as_matrix, eigenvalues
from .riccati import AreSolution, solve_are

__all__ = [
    "GainSynthesis",
    "ShiftCertificate",
    "SweepSummary",
    "synthesize",
    "certify_shift",
    "certify_shift_grid",
    "summarize_sweep",
]

MODES = ("primal", "dual")
DEFAULT_CERT_TOL = 1e-8
DEFAULT_SIGMA_RANGE = (1.0, 100.0)
DEFAULT_OMEGA_RANGE = (-100.0, 100.0)
DEFAULT_GRID_COUNTS = (15, 41)


@dataclass(frozen=True)
class GainSynthesis:
    """Synthesized coupling gain with its Riccati certificate.

    ``gain`` is K = B'P (m x n) in primal mode and L = PB (n x m) in dual
    mode; ``scale = max(1, 1/delta)`` multiplies the gain in the coupling
    law, so the effective per-eigenvalue shift always has real part >= 1.
    """

    are: AreSolution
    b: np.ndarray = field(repr=False)
    delta: float
    scale: float
    mode: str
    gain: np.ndarray = field(repr=False)

    @property
    def K(self) -> np.ndarray:
        """State-feedback form of the gain, B'P."""
        return self.gain if self.mode == "primal" else self.gain.T

    @property
    def L(self) -> np.ndarray:
        """Output-injection form of the gain, PB."""
        return self.gain if self.mode == "dual" else self.gain.T

    def __repr__(self) -> str:
        return (
            f"GainSynthesis(mode={self.mode!r}, delta={self.delta:.6g}, "
            f"scale={self.scale:.6g})"
        )


def synthesize(a, b, delta: float, mode: str = "primal", tol: float = 1e-9) -> GainSynthesis:
    """Synthesize the coupling gain for target coupling strength ``delta``.

    Primal mode assumes (A, B) stabilizable; dual mode needs (B', A')
    detectable, which is the same condition, so both run the same check.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    delta = float(delta)
    if delta <= 0.0:
        raise HypothesisViolation(f"coupling-strength target delta must be positive, got {delta:.6g}")
    are = solve_are(a, b, tol=tol)
    b_arr = as_matrix(b, "B")
    k = b_arr.T @ are.p_matrix
    return GainSynthesis(
        are=are,
        b=b_arr,
        delta=delta,
        scale=max(1.0, 1.0 / delta),
        mode=mode,
        gain=k if mode == "primal" else k.T,
    )


@dataclass(frozen=True)
class ShiftCertificate:
    """Evidence that ``A - (sigma + j omega) BB'P`` is Hurwitz at one shift."""

    sigma: float
    omega: float
    max_real_part: float
    identity_residual: float
    residual_bound: float

    @property
    def passed(self) -> bool:
        return self.max_real_part < 0.0 and self.identity_residual <= self.residual_bound


def certify_shift(a, b, p, sigma: float, omega: float, tol: float = DEFAULT_CERT_TOL) -> ShiftCertificate:
    """Certify the shifted closed loop at a single complex shift.

    ``sigma`` must be at least 1 (shifts with smaller real part are outside
    the guaranteed region and are rejected).  The identity residual is
    ``||F^H P + P F + I + (1 + 2 eps) P BB' P||`` with
    ``F = A - (sigma + j omega) BB'P`` and ``eps = sigma - 1``; its bound
    is ``tol * (1 + ||P||^2)`` because the identity is quadratic in P.
    """
    sigma = float(sigma)
    omega = float(omega)
    if sigma < 1.0:
        raise HypothesisViolation(f"shift real part sigma must be >= 1, got {sigma:.6g}")
    a_arr = as_matrix(a, "A")
    b_arr = as_matrix(b, "B")
    p_arr = as_matrix(p, "P")
    n = a_arr.shape[0]

    bbt_p = b_arr @ (b_arr.T @ p_arr)
    shifted = a_arr - (sigma + 1j * omega) * bbt_p
    max_real_part = eigenvalues(shifted).max_real

    eps = sigma - 1.0
    pbbt_p = p_arr @ bbt_p
    identity = (
        shifted.conj().T @ p_arr
        + p_arr @ shifted
        + np.eye(n)
        + (1.0 + 2.0 * eps) * pbbt_p
    )
    p_scale = 1.0 + float(np.linalg.norm(p_arr)) ** 2
    return ShiftCertificate(
        sigma=sigma,
        omega=omega,
        max_real_part=max_real_part,
        identity_residual=float(np.linalg.norm(identity)),
        residual_bound=tol * p_scale,
    )


def certify_shift_grid(
    a,
    b,
    p,
    sigma_range: tuple[float, float] = DEFAULT_SIGMA_RANGE,
    omega_range: tuple[float, float] = DEFAULT_OMEGA_RANGE,
    counts: tuple[int, int] = DEFAULT_GRID_COUNTS,
    tol: float = DEFAULT_CERT_TOL,
) -> list[ShiftCertificate]:
    """Certificates over a log-spaced sigma grid times a linear omega grid.

    Returned in row-major (sigma-major) grid order.  An empty grid yields
    an empty list.
    """
    sigma_lo, sigma_hi = (float(x) for x in sigma_range)
    omega_lo, omega_hi = (float(x) for x in omega_range)
    if sigma_lo < 1.0:
        raise HypothesisViolation(f"sigma grid must start at >= 1, got {sigma_lo:.6g}")
    if sigma_hi < sigma_lo or omega_hi < omega_lo:
        raise ValueError("grid ranges must be nondecreasing")
    n_sigma, n_omega = (int(c) for c in counts)
    if n_sigma < 0 or n_omega < 0:
        raise ValueError("grid counts must be nonnegative")
    if n_sigma == 0 or n_omega == 0:
        return []
    sigmas = np.geomspace(sigma_lo, sigma_hi, n_sigma) if n_sigma > 1 else np.array([sigma_lo])
    omegas = np.linspace(omega_lo, omega_hi, n_omega) if n_omega > 1 else np.array([omega_lo])
    # geomspace endpoint rounding must not dip below the guaranteed region
    sigmas = np.maximum(sigmas, 1.0)
    return [
        certify_shift(a, b, p, sigma, omega, tol=tol)
        for sigma in sigmas
        for omega in omegas
    ]


@dataclass(frozen=True)
class SweepSummary:
    num_points: int
    worst_max_real_part: float
    worst_identity_residual: float
    all_passed: bool


def summarize_sweep(certificates) -> SweepSummary:
    certs = list(certificates)
    if not certs:
        return SweepSummary(0, float("-inf"), 0.0, True)
    return SweepSummary(
        num_points=len(certs),
        worst_max_real_part=max(c.max_real_part for c in certs),
        worst_identity_residual=max(c.identity_residual for c in certs),
        all_passed=all(c.passed for c in certs),
    )
