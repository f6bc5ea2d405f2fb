"""Finite-squeezing noise analysis for single-qumode Gaussian computation on CV wires."""

from .errors import (
    DegenerateMeasurementError,
    InvalidParameterError,
    UnreachableGateError,
    UnsupportedBasisError,
    WirenoiseError,
)
from .noise import (
    BoundReport,
    NoiseKernel,
    SigmaAccumulation,
    SvReport,
    accumulate_sigma,
    bound_suite,
    canonical_macronode_sv,
    certified_cvw_gap,
    certified_dictionary_gap,
    cvw_kernel,
    high_squeezing_floor,
    macronode_kernel,
    min_scalar_variance,
    position_kernel,
    rotation_sweep,
    scalar_variance,
    sv_from_decomposition,
    sv_g_decomposition,
)
from .oracle import (
    ChannelEstimate,
    GaussianState,
    append_squeezed_mode,
    apply_single_mode,
    beamsplitter5050,
    cz,
    displace,
    homodyne,
    run_channel,
    squeeze_mode,
    step_feedback,
    symplectic_eigenvalues,
    vacuum,
)
from .protocols import (
    CorrectionDisplacement,
    HomodyneBasis,
    MacronodeBasis,
    MeasurementPlan,
    correction_displacement,
    cvw_step_gate,
    dictionary_from_cvw,
    dictionary_step_gate,
    macronode_step_gate,
    plan_gate,
    printed_macronode_correction,
    solve_cvw_plan,
    solve_macronode_plan,
    theta_primed,
)
from .symplectic import (
    EulerDecomposition,
    Symplectic2,
    compose,
    compose_all,
    displacement,
    euler_decompose,
    fourier,
    identity,
    make_gate,
    rotation,
    shear,
    squeeze,
)
from .wires import DrwParams, RemodeledWire, WireParams, db_to_alpha, drw_params, remodel

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
