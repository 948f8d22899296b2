"""Dense linear-algebra primitives used throughout the package.

Everything operates on plain 2-D numpy arrays, real or complex.  All
tolerance checks are relative to a problem scale ``1 + ||.||`` (Frobenius
norm for matrices) rather than raw epsilons.

Eigenvalues and matrix exponentials are delegated to LAPACK via
numpy/scipy, which implement the standard dense methods (Hessenberg
reduction plus shifted QR, scaling-and-squaring with a Pade approximant).
The contracts here are accuracy bounds, not algorithms; the test suite
checks the bounds directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import HypothesisViolation, NumericalFailure

__all__ = [
    "Spectrum",
    "as_matrix",
    "as_square",
    "norm_scale",
    "kron",
    "eigenvalues",
    "eig_residuals",
    "is_hurwitz",
    "expm",
    "solve_lyapunov",
]


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce ``a`` to a 2-D float64/complex128 array with finite entries."""
    arr = np.asarray(a)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {arr.shape}")
    if np.iscomplexobj(arr):
        arr = arr.astype(np.complex128, copy=False)
    else:
        arr = arr.astype(np.float64, copy=False)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    return arr


def as_square(a, name: str = "matrix") -> np.ndarray:
    arr = as_matrix(a, name)
    if arr.shape[0] != arr.shape[1]:
        raise ValueError(f"{name} must be square, got shape {arr.shape}")
    return arr


def norm_scale(a: np.ndarray) -> float:
    """Relative-tolerance scale ``1 + ||a||_F``."""
    return 1.0 + float(np.linalg.norm(a))


@dataclass(frozen=True)
class Spectrum:
    """All eigenvalues of a square matrix, with algebraic multiplicity."""

    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "values", np.atleast_1d(np.asarray(self.values, dtype=np.complex128)))

    @property
    def dim(self) -> int:
        return self.values.size

    @property
    def max_real(self) -> float:
        return float(self.values.real.max())

    def __repr__(self) -> str:
        return f"Spectrum({np.array2string(self.values, precision=6)})"


def kron(a, b) -> np.ndarray:
    """Kronecker product of two dense matrices.

    The (m*p) x (n*q) block matrix whose (i, j) block is ``a[i, j] * b``.
    Satisfies the mixed-product identity
    ``kron(a, b) @ kron(c, d) == kron(a @ c, b @ d)`` for conformable
    factors.
    """
    return np.kron(as_matrix(a, "a"), as_matrix(b, "b"))


def eigenvalues(m, tol: float | None = None) -> Spectrum:
    """All eigenvalues of a square matrix, with multiplicity.

    When ``tol`` is given, every returned eigenvalue is certified: the
    smallest singular value of ``m - lam*I`` must be at most
    ``tol * (1 + ||m||)``.  The certificate costs an extra SVD per
    eigenvalue (O(d^4) total), so it is opt-in; the test suite exercises
    it at desk scale.

    Raises
    ------
    ValueError
        If ``m`` is not square.
    NumericalFailure
        If the QR iteration does not converge, or a certificate fails.
    """
    arr = as_square(m, "m")
    try:
        vals = np.linalg.eigvals(arr)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"eigenvalue iteration did not converge: {exc}") from exc
    if tol is not None:
        residuals = eig_residuals(arr, vals)
        bound = tol * norm_scale(arr)
        worst = float(residuals.max()) if residuals.size else 0.0
        if worst > bound:
            raise NumericalFailure(
                f"eigenvalue residual {worst:.3e} exceeds certificate bound {bound:.3e}"
            )
    return Spectrum(vals)


def eig_residuals(m, values) -> np.ndarray:
    """Certificate residuals: smallest singular value of ``m - lam*I`` per ``lam``."""
    arr = as_square(m, "m")
    eye = np.eye(arr.shape[0])
    vals = np.atleast_1d(np.asarray(values, dtype=np.complex128))
    return np.array(
        [np.linalg.svd(arr - lam * eye, compute_uv=False)[-1] for lam in vals]
    )


def is_hurwitz(m, margin: float = 0.0) -> bool:
    """True iff every eigenvalue of ``m`` has real part below ``-margin``."""
    return eigenvalues(m).max_real < -margin


def expm(m, t: float = 1.0) -> np.ndarray:
    """Matrix exponential ``e^{m t}``.

    Accurate to ~1e-10 relative for ``||m t|| <= 100``.  Arguments whose
    exponential overflows the double range are rejected rather than
    returning non-finite entries.
    """
    arr = as_square(m, "m")
    with np.errstate(over="ignore", invalid="ignore"):
        result = scipy.linalg.expm(arr * float(t))
    if not np.all(np.isfinite(result)):
        raise NumericalFailure(
            f"matrix exponential overflowed for ||m*t|| = {np.linalg.norm(arr * t):.3e}"
        )
    return result


def solve_lyapunov(f, q, tol: float = 1e-9) -> np.ndarray:
    """Solve ``f^H P + P f = -q`` for Hermitian ``P``.

    ``f`` must be Hurwitz (otherwise the equation may lack a unique
    solution) and ``q`` Hermitian.  Solves the vectorized d^2 x d^2 linear
    system ``(I (x) f^H + f^T (x) I) vec(P) = -vec(q)`` with column-major
    ``vec``; O(d^6), intended for desk-scale d.

    The returned ``P`` is exactly Hermitian and satisfies
    ``||f^H P + P f + q|| <= tol * (1 + ||P||)``; if ``q`` is positive
    definite then so is ``P``.
    """
    f_arr = as_square(f, "f")
    q_arr = as_square(q, "q")
    if f_arr.shape != q_arr.shape:
        raise ValueError(f"shape mismatch: f is {f_arr.shape}, q is {q_arr.shape}")
    if np.linalg.norm(q_arr - q_arr.conj().T) > 1e-10 * norm_scale(q_arr):
        raise ValueError("q must be Hermitian")
    f_abscissa = eigenvalues(f_arr).max_real
    if f_abscissa >= 0.0:
        raise HypothesisViolation(
            "f must be Hurwitz for a unique Lyapunov solution; "
            f"max Re(eig) = {f_abscissa:.6g}"
        )
    q_arr = (q_arr + q_arr.conj().T) / 2.0

    d = f_arr.shape[0]
    eye = np.eye(d)
    system = np.kron(eye, f_arr.conj().T) + np.kron(f_arr.T, eye)
    vec_p = np.linalg.solve(system, -q_arr.reshape(-1, order="F"))
    p = vec_p.reshape((d, d), order="F")
    p = (p + p.conj().T) / 2.0
    if np.isrealobj(f_arr) and np.isrealobj(q_arr):
        p = p.real

    residual = float(np.linalg.norm(f_arr.conj().T @ p + p @ f_arr + q_arr))
    if residual > tol * norm_scale(p):
        raise NumericalFailure(
            f"Lyapunov residual {residual:.3e} exceeds {tol:.1e} * (1 + ||P||)"
        )
    return p
