"""Far-field double-aperture interference with which-path detectors.

Library for computing momentum-space fringe patterns of a particle entangled
with a path detector, decomposing the visibility loss into per-channel phase
shifts and momentum transfers, and reconstructing quantum-eraser coincidence
patterns.  Units: hbar = 1, lengths in one arbitrary unit.
"""

from .apertures import (
    ApertureProfile,
    ApertureSetup,
    ComplexSpectrum,
    MomentumGrid,
    Pattern,
    default_grid,
    direction_to_momentum,
    fringe_pattern,
    gaussian_profile,
    point_profile,
    rectangular_profile,
    shift_pattern,
    single_aperture_amplitude,
    two_slit_pattern,
)
from .detectors import (
    DetectorChannel,
    DetectorModel,
    DipoleSpec,
    PhotonQuadrature,
    custom_model,
    fixed_dipole,
    flatten_weights,
    heisenberg_model,
    isotropic_dipole,
    micromaser_model,
    overlap,
    sinc_visibility,
)
from .analysis import (
    FringeComponent,
    FringeDecomposition,
    TransferHistogram,
    conditional_pattern,
    decompose,
    envelope_pattern,
    fitted_visibility,
    marginal_pattern,
    momentum_kick_pattern,
    rect_autocorrelation,
    rotate_basis,
    transfer_histogram,
    weighted_iqr,
    wrap_phase,
)
from .eraser import (
    EraserResult,
    EraserSweepPoint,
    eraser_patterns,
    eraser_phase_sweep,
    plus_minus_basis,
)

__version__ = "0.1.0"

__all__ = [
    "ApertureProfile",
    "ApertureSetup",
    "ComplexSpectrum",
    "DetectorChannel",
    "DetectorModel",
    "DipoleSpec",
    "EraserResult",
    "EraserSweepPoint",
    "FringeComponent",
    "FringeDecomposition",
    "MomentumGrid",
    "Pattern",
    "PhotonQuadrature",
    "TransferHistogram",
    "conditional_pattern",
    "custom_model",
    "decompose",
    "default_grid",
    "direction_to_momentum",
    "envelope_pattern",
    "eraser_patterns",
    "eraser_phase_sweep",
    "fitted_visibility",
    "fixed_dipole",
    "flatten_weights",
    "fringe_pattern",
    "gaussian_profile",
    "heisenberg_model",
    "isotropic_dipole",
    "marginal_pattern",
    "micromaser_model",
    "momentum_kick_pattern",
    "overlap",
    "plus_minus_basis",
    "point_profile",
    "rect_autocorrelation",
    "rectangular_profile",
    "rotate_basis",
    "shift_pattern",
    "sinc_visibility",
    "single_aperture_amplitude",
    "transfer_histogram",
    "two_slit_pattern",
    "weighted_iqr",
    "wrap_phase",
    "__version__",
]
