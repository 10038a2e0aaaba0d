"""Energy-minimizing Cosserat rotations on SO(3).

Library computing the relaxed polar factors of the quadratic Cosserat
shear-stretch energy, the full catalog of critical points of its quaternion
lift, closed-form reduced energies, and Monte Carlo evidence of global
optimality. See the README for the CLI front end.
"""

from .branches import (
    BRANCH_IDS,
    Classification,
    CriticalBranch,
    branch_energy,
    branch_multiplier,
    branch_quaternion,
    classify_branch,
    enumerate_branches,
    minimal_branch,
    verify_branch,
)
from .energy import (
    MaterialParams,
    Regime,
    el_residual_matrix,
    el_residual_quat,
    energy,
    isochoric_project,
    lifted_energy,
    relative_energy,
    rescale_F,
)
from .errors import (
    ClassicalRegime,
    ExhaustedAttempts,
    NegativeDeterminant,
    NonDistinctSigma,
    NonInvertible,
    NonPositiveSigma,
    NotARotation,
    NotUnimodular,
    RelaxedPolarError,
    UndefinedBranch,
    ZeroQuaternion,
)
from .relax import (
    DomainTag,
    RelaxedRotations,
    classical_neighborhood_radius,
    classify_domain,
    d_epsilon_witness,
    mmp_strain,
    mmp_stretch,
    optimal_relative_angle,
    reduced_energy,
    reduced_energy_sigma,
    relaxed_polar,
    sl3_nonclassical_check,
    tangent_bundle_distance,
)
from .rotcore import (
    AxisAngle,
    Decomposition,
    axis_angle,
    canonical_quaternion,
    polar_factor,
    quat_to_rotation,
    recover_absolute,
    rotation_from_axis_angle,
    rotation_to_quat,
    svd_ordered,
    symmetry_orbit,
)
from .sampling import (
    CaseRecord,
    RngState,
    ValidationReport,
    derive_seed,
    run_validation,
    sample_F,
    sample_rotation,
    sample_rotations,
    sample_unit_quaternion,
    sample_unit_quaternions,
    validate_case,
)

__version__ = "0.1.0"
