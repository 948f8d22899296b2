"""Coupling matrices for diffusively coupled networks.

A coupling matrix is a real p x p matrix with nonnegative off-diagonal
entries and zero row sums.  Its directed graph has an arc (i, j) whenever
entry (i, j) is positive, i.e. agent i listens to agent j.  The matrix is
*connected* when some node is reachable by a directed path from every
other node (equivalently, the graph contains a spanning tree); a connected
coupling matrix has a simple zero eigenvalue with eigenvector 1 and all
other eigenvalues strictly in the open left half-plane.

The module also parses the textual graph formats shared with the CLI:
a weight list (``p`` plus 1-based triples ``(i, j, w)``) and the generator
shortcuts ``"cycle p"``, ``"path p"``, ``"complete p"``,
``"random p density seed"``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import HypothesisViolation, NumericalFailure
from .linalg import Spectrum, as_square, eigenvalues

__all__ = [
    "CouplingMatrix",
    "GraphSpectrum",
    "coupling_from_weights",
    "is_connected",
    "graph_spectrum",
    "complete_coupling",
    "cycle_coupling",
    "path_coupling",
    "random_coupling",
    "coupling_from_triples",
    "parse_graph_spec",
]

ROW_SUM_RTOL = 1e-12
DEFAULT_ZERO_TOL = 1e-8
R_RESIDUAL_RTOL = 1e-10


@dataclass(frozen=True)
class CouplingMatrix:
    """Validated p x p coupling matrix."""

    gamma: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = as_square(self.gamma, "gamma")
        object.__setattr__(self, "gamma", arr)
        off = arr[~np.eye(self.p, dtype=bool)]
        if off.size and off.min() < 0:
            raise ValueError(f"off-diagonal entries must be nonnegative, min is {off.min():.6g}")
        scale = 1.0 + (float(np.abs(arr).max()) if arr.size else 0.0)
        row_sums = arr.sum(axis=1)
        worst = float(np.abs(row_sums).max())
        if worst > ROW_SUM_RTOL * scale:
            raise ValueError(f"row sums must vanish; worst residual {worst:.3e}")

    @property
    def p(self) -> int:
        return self.gamma.shape[0]

    def __repr__(self) -> str:
        return f"CouplingMatrix(p={self.p})"


@dataclass(frozen=True)
class GraphSpectrum:
    """Spectral data of a connected coupling matrix.

    ``lambda2`` is a nonzero eigenvalue with largest real part (ties broken
    by smallest |imag|, then nonnegative imag); it is ``None`` only in the
    degenerate single-agent case.  ``r`` is the left null vector normalized
    against the all-ones vector: ``r @ gamma = 0`` and ``r @ 1 = 1``.
    """

    zero_multiplicity: int
    lambda2: complex | None
    all_eigenvalues: Spectrum
    r: np.ndarray = field(repr=False)

    @property
    def connectivity_gap(self) -> float:
        """Distance of the nonzero spectrum to the imaginary axis, -Re(lambda2)."""
        if self.lambda2 is None:
            return float("inf")
        return -float(self.lambda2.real)


def coupling_from_weights(w) -> CouplingMatrix:
    """Build a coupling matrix from nonnegative off-diagonal weights.

    The diagonal of ``w`` is ignored; each diagonal entry of the result is
    minus the sum of the other entries in its row, so row sums vanish.
    """
    arr = as_square(w, "w")
    if np.iscomplexobj(arr):
        raise ValueError("weights must be real")
    p = arr.shape[0]
    gamma = arr.copy()
    np.fill_diagonal(gamma, 0.0)
    off = gamma[~np.eye(p, dtype=bool)]
    if off.size and off.min() < 0:
        raise ValueError(f"off-diagonal weights must be nonnegative, min is {off.min():.6g}")
    np.fill_diagonal(gamma, -gamma.sum(axis=1))
    return CouplingMatrix(gamma)


def _reachers(pos: np.ndarray, root: int) -> int:
    """Number of nodes with a directed path to ``root`` (root included)."""
    p = pos.shape[0]
    seen = np.zeros(p, dtype=bool)
    seen[root] = True
    queue = deque([root])
    count = 1
    while queue:
        v = queue.popleft()
        for u in np.nonzero(pos[:, v])[0]:
            if not seen[u]:
                seen[u] = True
                count += 1
                queue.append(u)
    return count


def is_connected(g: CouplingMatrix) -> bool:
    """True iff some node is reachable by a path from every other node.

    Brute-force reachability: breadth-first search on reversed arcs from
    each candidate root, O(p * (p + arcs)).
    """
    pos = g.gamma > 0
    np.fill_diagonal(pos, False)
    p = g.p
    return any(_reachers(pos, root) == p for root in range(p))


def graph_spectrum(g: CouplingMatrix, zero_tol: float = DEFAULT_ZERO_TOL) -> GraphSpectrum:
    """Eigenvalues, lambda2, and the left null vector of a connected coupling matrix.

    Rejects inputs whose zero eigenvalue is not numerically simple
    (|lam| <= zero_tol * (1 + ||gamma||) counts as zero), which signals a
    disconnected or degenerate graph.
    """
    if not is_connected(g):
        raise HypothesisViolation("graph is not connected: no node is reachable from every other node")
    gamma = g.gamma
    scale = 1.0 + float(np.linalg.norm(gamma))
    spectrum = eigenvalues(gamma)
    vals = spectrum.values
    zero_mask = np.abs(vals) <= zero_tol * scale
    zero_multiplicity = int(zero_mask.sum())
    if zero_multiplicity != 1:
        raise HypothesisViolation(
            f"zero eigenvalue has multiplicity {zero_multiplicity}, expected 1 "
            "for a connected coupling matrix"
        )

    nonzero = vals[~zero_mask]
    lambda2 = None
    if nonzero.size:
        order = sorted(
            range(nonzero.size),
            key=lambda i: (-nonzero[i].real, abs(nonzero[i].imag), nonzero[i].imag < 0),
        )
        lambda2 = complex(nonzero[order[0]])

    r = _left_null_vector(gamma, scale)
    return GraphSpectrum(
        zero_multiplicity=zero_multiplicity,
        lambda2=lambda2,
        all_eigenvalues=spectrum,
        r=r,
    )


def _left_null_vector(gamma: np.ndarray, scale: float) -> np.ndarray:
    """Left null vector of gamma, normalized so that r @ 1 = 1."""
    p = gamma.shape[0]
    if p == 1:
        return np.ones(1)
    w, v = np.linalg.eig(gamma.T)
    cand = v[:, np.argmin(np.abs(w))]
    # Rotate the phase so the dominant component is real, then drop the
    # (noise-level) imaginary part.
    pivot = cand[np.argmax(np.abs(cand))]
    cand = (cand / pivot).real
    # One residual-correction step: subtracting the minimum-norm solution of
    # gamma^T d = gamma^T cand projects cand onto the numerical null space.
    correction, *_ = np.linalg.lstsq(gamma.T, gamma.T @ cand, rcond=None)
    cand = cand - correction
    total = float(cand.sum())
    if abs(total) <= 1e-12 * float(np.abs(cand).sum()):
        raise NumericalFailure("left null vector cannot be normalized: r @ 1 is numerically zero")
    r = cand / total
    residual = float(np.linalg.norm(r @ gamma))
    if residual > R_RESIDUAL_RTOL * scale:
        raise NumericalFailure(
            f"left null vector residual {residual:.3e} exceeds {R_RESIDUAL_RTOL:.1e} * (1 + ||gamma||)"
        )
    return r


def _check_agent_count(p: int) -> int:
    p = int(p)
    if p < 1:
        raise ValueError(f"agent count must be >= 1, got {p}")
    return p


def complete_coupling(p: int) -> CouplingMatrix:
    """All-to-all unit weights."""
    p = _check_agent_count(p)
    return coupling_from_weights(np.ones((p, p)) - np.eye(p))


def cycle_coupling(p: int) -> CouplingMatrix:
    """Directed cycle with unit weights: agent i listens to agent i+1 (mod p)."""
    p = _check_agent_count(p)
    w = np.zeros((p, p))
    for i in range(p):
        w[i, (i + 1) % p] = 1.0
    return coupling_from_weights(w)


def path_coupling(p: int) -> CouplingMatrix:
    """Directed chain with unit weights: agent i listens to agent i+1.

    The last agent is uncoupled, so the network follows its free
    trajectory (observer-style leader).
    """
    p = _check_agent_count(p)
    w = np.zeros((p, p))
    for i in range(p - 1):
        w[i, i + 1] = 1.0
    return coupling_from_weights(w)


def random_coupling(p: int, density: float, seed_or_rng) -> CouplingMatrix:
    """Random connected coupling matrix.

    A directed cycle through a random permutation (weights in [0.5, 1.5])
    guarantees connectivity; every other off-diagonal arc is added with
    probability ``density`` and a weight drawn uniformly from [0, 1).
    """
    p = _check_agent_count(p)
    if not 0.0 <= density <= 1.0:
        raise ValueError(f"density must lie in [0, 1], got {density}")
    rng = seed_or_rng if isinstance(seed_or_rng, np.random.Generator) else np.random.default_rng(seed_or_rng)
    w = np.zeros((p, p))
    perm = rng.permutation(p)
    for a, b in zip(perm, np.roll(perm, -1)):
        if a != b:
            w[a, b] = rng.uniform(0.5, 1.5)
    extra = rng.random((p, p)) < density
    np.fill_diagonal(extra, False)
    w = np.where(extra & (w == 0), rng.uniform(0.0, 1.0, (p, p)), w)
    return coupling_from_weights(w)


def coupling_from_triples(p: int, triples) -> CouplingMatrix:
    """Weight-list form: agent count plus 1-based ``(i, j, w)`` triples."""
    p = _check_agent_count(p)
    w = np.zeros((p, p))
    for entry in triples:
        try:
            i, j, weight = entry
        except (TypeError, ValueError) as exc:
            raise ValueError(f"weight triple must be (i, j, w), got {entry!r}") from exc
        i, j = int(i), int(j)
        if not (1 <= i <= p and 1 <= j <= p):
            raise ValueError(f"agent indices must lie in 1..{p}, got ({i}, {j})")
        if i == j:
            raise ValueError(f"self-weight ({i}, {i}) is not allowed")
        w[i - 1, j - 1] = float(weight)
    return coupling_from_weights(w)


def parse_graph_spec(spec) -> CouplingMatrix:
    """Parse the CLI graph format.

    Either a generator shortcut string (``"cycle 4"``, ``"path 3"``,
    ``"complete 5"``, ``"random 8 0.3 42"``) or a mapping with keys ``p``
    and ``triples``.
    """
    if isinstance(spec, str):
        tokens = spec.split()
        if not tokens:
            raise ValueError("empty graph specification")
        kind, args = tokens[0], tokens[1:]
        try:
            if kind == "cycle" and len(args) == 1:
                return cycle_coupling(int(args[0]))
            if kind == "path" and len(args) == 1:
                return path_coupling(int(args[0]))
            if kind == "complete" and len(args) == 1:
                return complete_coupling(int(args[0]))
            if kind == "random" and len(args) == 3:
                return random_coupling(int(args[0]), float(args[1]), int(args[2]))
        except ValueError as exc:
            raise ValueError(f"bad graph specification {spec!r}: {exc}") from exc
        raise ValueError(
            f"bad graph specification {spec!r}; expected 'cycle p', 'path p', "
            "'complete p', or 'random p density seed'"
        )
    if isinstance(spec, dict):
        missing = {"p", "triples"} - spec.keys()
        if missing:
            raise ValueError(f"graph mapping is missing keys {sorted(missing)}")
        return coupling_from_triples(spec["p"], spec["triples"])
    raise ValueError(f"graph specification must be a string or mapping, got {type(spec).__name__}")
