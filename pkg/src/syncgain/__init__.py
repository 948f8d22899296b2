"""Coupling-gain synthesis and synchronization analysis for networks of
identical linear systems.

Workflow: build a coupling matrix (``graphs``), synthesize the gain from
the Riccati solution (``riccati``, ``synthesis``), certify the shifted
closed loops, then assemble and simulate the coupled network
(``simulate``).  The ``syncgain`` CLI drives the same pipeline from JSON
scenario files.
"""

from .errors import HypothesisViolation, NumericalFailure, SyncGainError
from .graphs import (
    CouplingMatrix,
    GraphSpectrum,
    complete_coupling,
    coupling_from_triples,
    coupling_from_weights,
    cycle_coupling,
    graph_spectrum,
    is_connected,
    parse_graph_spec,
    path_coupling,
    random_coupling,
)
from .kernels import backend_name
from .linalg import (
    Spectrum,
    eig_residuals,
    eigenvalues,
    expm,
    is_hurwitz,
    kron,
    solve_lyapunov,
)
from .riccati import AreSolution, is_stabilizable, solve_are, stabilizability_margin
from .simulate import (
    DecayReport,
    NetworkSetup,
    SimulationResult,
    SpectrumCheckReport,
    SystemModel,
    build_closed_loop,
    certified_blocks,
    closed_loop_spectrum_check,
    closed_loop_spectrum_report,
    integrate,
    reference_trajectory,
    simulate_network,
    sync_error,
    write_trajectory_csv,
)
from .synthesis import (
    GainSynthesis,
    ShiftCertificate,
    SweepSummary,
    certify_shift,
    certify_shift_grid,
    summarize_sweep,
    synthesize,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "SyncGainError",
    "HypothesisViolation",
    "NumericalFailure",
    "Spectrum",
    "kron",
    "eigenvalues",
    "eig_residuals",
    "is_hurwitz",
    "expm",
    "solve_lyapunov",
    "CouplingMatrix",
    "GraphSpectrum",
    "coupling_from_weights",
    "coupling_from_triples",
    "is_connected",
    "graph_spectrum",
    "complete_coupling",
    "cycle_coupling",
    "path_coupling",
    "random_coupling",
    "parse_graph_spec",
    "AreSolution",
    "is_stabilizable",
    "stabilizability_margin",
    "solve_are",
    "GainSynthesis",
    "ShiftCertificate",
    "SweepSummary",
    "synthesize",
    "certify_shift",
    "certify_shift_grid",
    "summarize_sweep",
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
    "backend_name",
]
