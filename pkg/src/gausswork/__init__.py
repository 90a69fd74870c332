"""Phase-space statistics of extractable work from random Gaussian states.

The package samples energy-bounded random multimode Gaussian states,
computes the work extractable from them with Gaussian unitaries, and
checks the concentration of their local spectra around the thermal value
against exact Haar-moment formulas.
"""

from .phasespace import (
    WilliamsonResult,
    check_covariance,
    energy,
    extractable_work,
    partial_trace,
    purify,
    single_mode_squeezer,
    symplectic_eigenvalues,
    symplectic_form,
    symplectic_trace,
)
from .sampling import (
    RandomStateConfig,
    SqueezingSpec,
    ZProfile,
    draw_squeezing,
    haar_unitary,
    sample_random_state,
    squeeze_gram,
    state_from_unitary,
    unitary_to_symplectic,
)
from .stats import (
    TypicalityRecord,
    eigen_dispersion,
    evaluate_record,
    symplectic_dispersion,
    tail_probability,
    thermal_nu,
)
from .weingarten import (
    MomentReport,
    expected_tr_gamma,
    expected_tr_gamma_sq,
    expected_tr_omega_gamma_sq,
    mc_moment,
    weingarten_pair,
)

__version__ = "0.1.0"

__all__ = [
    "MomentReport",
    "RandomStateConfig",
    "SqueezingSpec",
    "TypicalityRecord",
    "WilliamsonResult",
    "ZProfile",
    "check_covariance",
    "draw_squeezing",
    "eigen_dispersion",
    "energy",
    "evaluate_record",
    "expected_tr_gamma",
    "expected_tr_gamma_sq",
    "expected_tr_omega_gamma_sq",
    "extractable_work",
    "haar_unitary",
    "mc_moment",
    "partial_trace",
    "purify",
    "sample_random_state",
    "single_mode_squeezer",
    "squeeze_gram",
    "state_from_unitary",
    "symplectic_dispersion",
    "symplectic_eigenvalues",
    "symplectic_form",
    "symplectic_trace",
    "tail_probability",
    "thermal_nu",
    "unitary_to_symplectic",
    "weingarten_pair",
]
