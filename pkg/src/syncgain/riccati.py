"""Stabilizability test and the algebraic Riccati equation with unit weights.

The equation solved here is ``A' P + P A + I - P B B' P = 0``; its unique
symmetric positive definite solution exists exactly when (A, B) is
stabilizable, and the associated closed loop ``A - B B' P`` is Hurwitz.

Solution method: form the 2n x 2n Hamiltonian ``[[A, -BB'], [-I, -A']]``,
extract a basis (U1; U2) of its stable invariant subspace from an ordered
real Schur decomposition, set ``P = U2 U1^{-1}``, symmetrize, then polish
with up to five Newton steps (each one a Lyapunov solve on the current
closed loop) until the residual contract is met.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import HypothesisViolation, NumericalFailure
from .linalg import as_matrix, as_square, eigenvalues, solve_lyapunov

__all__ = [
    "AreSolution",
    "is_stabilizable",
    "stabilizability_margin",
    "solve_are",
]

DEFAULT_ARE_TOL = 1e-9
NEWTON_STEPS = 5


@dataclass(frozen=True)
class AreSolution:
    """Symmetric positive definite Riccati solution and its residual norm."""

    p_matrix: np.ndarray = field(repr=False)
    residual: float

    @property
    def n(self) -> int:
        return self.p_matrix.shape[0]

    def __repr__(self) -> str:
        return f"AreSolution(n={self.n}, residual={self.residual:.3e})"


def _check_pair(a, b) -> tuple[np.ndarray, np.ndarray]:
    a_arr = as_square(a, "A")
    b_arr = as_matrix(b, "B")
    if np.iscomplexobj(a_arr) or np.iscomplexobj(b_arr):
        raise ValueError("A and B must be real")
    if b_arr.shape[0] != a_arr.shape[0]:
        raise ValueError(f"B must have {a_arr.shape[0]} rows, got {b_arr.shape[0]}")
    return a_arr, b_arr


def stabilizability_margin(a, b) -> tuple[float, complex | None]:
    """Worst PBH margin over the closed right half-plane.

    For every eigenvalue ``lam`` of A with ``Re(lam) >= 0``, computes the
    smallest singular value of the n x (n+m) matrix ``[A - lam I, B]``.
    Returns the minimum margin and the eigenvalue attaining it, or
    ``(inf, None)`` when A has no unstable modes.
    """
    a_arr, b_arr = _check_pair(a, b)
    n = a_arr.shape[0]
    worst = float("inf")
    worst_lam = None
    for lam in eigenvalues(a_arr).values:
        if lam.real < 0.0:
            continue
        pencil = np.hstack([a_arr - lam * np.eye(n), b_arr])
        sigma_min = float(np.linalg.svd(pencil, compute_uv=False)[-1])
        if sigma_min < worst:
            worst, worst_lam = sigma_min, complex(lam)
    return worst, worst_lam


def is_stabilizable(a, b, tol: float = DEFAULT_ARE_TOL) -> bool:
    """PBH test: every unstable mode of A must be reachable through B."""
    a_arr, b_arr = _check_pair(a, b)
    scale = 1.0 + float(np.linalg.norm(a_arr)) + float(np.linalg.norm(b_arr))
    margin, _ = stabilizability_margin(a_arr, b_arr)
    return margin > tol * scale


def _residual_matrix(a: np.ndarray, bbt: np.ndarray, p: np.ndarray) -> np.ndarray:
    n = a.shape[0]
    return a.T @ p + p @ a + np.eye(n) - p @ bbt @ p


def solve_are(a, b, tol: float = DEFAULT_ARE_TOL) -> AreSolution:
    """Solve ``A' P + P A + I - P B B' P = 0`` for P = P' > 0.

    Raises
    ------
    HypothesisViolation
        If (A, B) fails the PBH stabilizability test.
    NumericalFailure
        If the residual contract ``||residual|| <= tol * (1 + ||P||^2)``
        cannot be met, or the computed P is not positive definite, or the
        closed loop ``A - B B' P`` is not Hurwitz.
    """
    a_arr, b_arr = _check_pair(a, b)
    n = a_arr.shape[0]
    scale = 1.0 + float(np.linalg.norm(a_arr)) + float(np.linalg.norm(b_arr))
    margin, bad_lam = stabilizability_margin(a_arr, b_arr)
    if margin <= tol * scale:
        raise HypothesisViolation(
            f"pair (A, B) is not stabilizable: PBH test failed at eigenvalue "
            f"lambda={bad_lam:.6g} (margin {margin:.3e})"
        )

    bbt = b_arr @ b_arr.T
    hamiltonian = np.block([
        [a_arr, -bbt],
        [-np.eye(n), -a_arr.T],
    ])
    try:
        _, z, sdim = scipy.linalg.schur(hamiltonian, output="real", sort="lhp")
    except scipy.linalg.LinAlgError as exc:
        raise NumericalFailure(f"Schur decomposition of the Hamiltonian failed: {exc}") from exc
    if sdim != n:
        raise NumericalFailure(
            f"Hamiltonian has {sdim} stable eigenvalues, expected {n}; "
            "the problem is too close to the stabilizability boundary"
        )
    u1 = z[:n, :n]
    u2 = z[n:, :n]
    try:
        p = np.linalg.solve(u1.T, u2.T).T
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure("stable-subspace basis is degenerate (U1 singular)") from exc
    p = (p + p.T) / 2.0

    residual = float(np.linalg.norm(_residual_matrix(a_arr, bbt, p)))
    for _ in range(NEWTON_STEPS):
        if residual <= tol * (1.0 + float(np.linalg.norm(p)) ** 2):
            break
        closed = a_arr - bbt @ p
        try:
            delta = solve_lyapunov(closed, _residual_matrix(a_arr, bbt, p), tol=tol)
        except (HypothesisViolation, NumericalFailure) as exc:
            raise NumericalFailure(f"Newton refinement step failed: {exc}") from exc
        p = (p + delta + (p + delta).T) / 2.0
        residual = float(np.linalg.norm(_residual_matrix(a_arr, bbt, p)))
    if residual > tol * (1.0 + float(np.linalg.norm(p)) ** 2):
        raise NumericalFailure(
            f"Riccati residual {residual:.3e} still above contract after "
            f"{NEWTON_STEPS} Newton steps"
        )

    min_eig = float(np.linalg.eigvalsh(p).min())
    if min_eig <= 0.0:
        raise NumericalFailure(f"Riccati solution is not positive definite (min eig {min_eig:.3e})")
    closed_spectrum = eigenvalues(a_arr - bbt @ p)
    if closed_spectrum.max_real >= 0.0:
        raise NumericalFailure(
            f"closed loop A - BB'P is not Hurwitz (max Re(eig) = {closed_spectrum.max_real:.3e})"
        )
    return AreSolution(p_matrix=p, residual=residual)
