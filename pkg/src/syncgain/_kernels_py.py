"""Pure-numpy integration kernels (fallback backend).

Mirrors the compiled kernels in ``_kernels_cy`` step for step so both
backends walk the same grid, record the same samples, and report the same
failure step.
"""

from __future__ import annotations

import numpy as np


def rk4_path(m, x0, h, n_steps, stride):
    """Classical fourth-order Runge-Kutta samples of ``x' = m x``.

    Takes ``n_steps`` steps of size ``h`` from ``x0``, recording the state
    every ``stride`` steps (``n_steps`` must be a multiple of ``stride``).
    Returns ``(out, bad_step)`` where ``out`` has ``n_steps // stride + 1``
    rows and ``bad_step`` is the 1-based index of the first step that
    produced a non-finite state, or -1 on success.
    """
    x = np.array(x0, dtype=np.float64)
    d = x.shape[0]
    out = np.zeros((n_steps // stride + 1, d))
    out[0] = x
    half = 0.5 * h
    sixth = h / 6.0
    with np.errstate(over="ignore", invalid="ignore"):
        for step in range(1, n_steps + 1):
            k1 = m @ x
            k2 = m @ (x + half * k1)
            k3 = m @ (x + half * k2)
            k4 = m @ (x + h * k3)
            x = x + sixth * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            if not np.all(np.isfinite(x)):
                return out, step
            if step % stride == 0:
                out[step // stride] = x
    return out, -1


def propagate_path(r, x0, n_steps, stride):
    """Samples of the recurrence ``x <- r x`` (one-step propagator mode).

    Same recording and failure conventions as :func:`rk4_path`.
    """
    x = np.array(x0, dtype=np.float64)
    d = x.shape[0]
    out = np.zeros((n_steps // stride + 1, d))
    out[0] = x
    with np.errstate(over="ignore", invalid="ignore"):
        for step in range(1, n_steps + 1):
            x = r @ x
            if not np.all(np.isfinite(x)):
                return out, step
            if step % stride == 0:
                out[step // stride] = x
    return out, -1
