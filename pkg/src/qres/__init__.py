"""Quantum-resource quantifiers of many-body ground states via tensor
cross interpolation of the measure's tensor representation."""

from .errors import (
    ConvergenceError,
    InvalidInputError,
    PivotError,
    QresError,
    ResourceLimitError,
    ShapeError,
)
from .mps import MatrixProductState, mps_from_dense, product_mps
from .pauli import PauliString
from .snapshot import load_mps, save_mps
from .spin_models import SpinModel, apply_hamiltonian, build_tfim_1d, build_tfim_2d
from .lanczos import ed_ground_state
from .mpo import MatrixProductOperator, mpo_from_model
from .dmrg import dmrg_ground_state
from .cache import AmplitudeEvaluator, PauliEnvEvaluator, PrefixCache
from .tci import (
    BlackBoxTensor,
    PivotState,
    TciDiagnostics,
    interpolation_error_estimate,
    tci_initialize,
    tci_run,
    tci_sweep,
)
from .resources import (
    ResourceReport,
    TciParams,
    make_ghz_mps,
    make_t_state_mps,
    rec,
    rec_blackbox,
    rec_bruteforce,
    sre2,
    sre2_blackbox,
    sre2_bruteforce,
)

__version__ = "0.1.0"

__all__ = [
    "AmplitudeEvaluator",
    "BlackBoxTensor",
    "ConvergenceError",
    "InvalidInputError",
    "MatrixProductOperator",
    "MatrixProductState",
    "PauliEnvEvaluator",
    "PauliString",
    "PivotError",
    "PivotState",
    "PrefixCache",
    "QresError",
    "ResourceLimitError",
    "ResourceReport",
    "ShapeError",
    "SpinModel",
    "TciDiagnostics",
    "TciParams",
    "apply_hamiltonian",
    "build_tfim_1d",
    "build_tfim_2d",
    "dmrg_ground_state",
    "ed_ground_state",
    "interpolation_error_estimate",
    "load_mps",
    "make_ghz_mps",
    "make_t_state_mps",
    "mpo_from_model",
    "mps_from_dense",
    "product_mps",
    "rec",
    "rec_blackbox",
    "rec_bruteforce",
    "save_mps",
    "sre2",
    "sre2_blackbox",
    "sre2_bruteforce",
    "tci_initialize",
    "tci_run",
    "tci_sweep",
]
