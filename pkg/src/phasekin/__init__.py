"""Phase-space kinetics toolkit.

Builds the joint distribution of a force-carrier position and a real
particle's phase-space point two independent ways, evolves quasi-
probability distributions under classical and quantum transport, and
analyzes the coupling kernel's cumulant structure.
"""

from .config import DEFAULT_CONFIG, ScenarioConfig, load_config, parse_config
from .coupling import (
    CouplingKernelSample,
    classical_joint,
    coupling_kernel,
    log_sinc_values,
    quantum_joint_series,
    quantum_joint_spectral,
    sinc_values,
)
from .cumulants import (
    CharacteristicField,
    CumulantReport,
    PhiField,
    characteristic_function,
    classical_limit_scan,
    heisenberg_check,
    kappa22,
    phi_field,
    phi_series_coefficients,
)
from .dynamics import (
    EvolutionParams,
    Potential,
    Trajectory,
    analytic_free_evolution,
    collision_rhs,
    free_potential,
    harmonic_potential,
    liouville_rhs,
    moyal_rhs_series,
    moyal_rhs_spectral,
    potential_from_density,
    propagate,
    quartic_potential,
)
from .errors import (
    ConfigError,
    DecayGuardError,
    DegenerateFitError,
    GridMismatchError,
    ImaginaryResidueError,
    InsufficientSupportError,
    NonConvergenceError,
    NormalizationError,
    PhasekinError,
    SignedDensityError,
)
from .grids import (
    ConjugateGrid1D,
    Field,
    Grid1D,
    boundary_ratio,
    conjugate,
    forward_transform,
    inverse_transform,
    make_grid,
    spectral_derivative,
)
from .states import (
    JointDistribution,
    MomentSet,
    VirtualDensity,
    WignerDistribution,
    gaussian_density,
    gaussian_wigner,
    marginal_over_R,
    marginal_over_pr,
    moments,
    sample_joint,
)
from .verification import VerificationReport, run_verification

__version__ = "0.1.0"
