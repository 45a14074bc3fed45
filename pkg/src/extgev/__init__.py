"""Extended Gevrey weights, their associated functions, and time-frequency transforms."""

__version__ = "0.1.0"

from .associated import (  # noqa: E402
    AssociatedFunction,
    BMTWeight,
    associated_value,
    check_matrix_conditions,
    fit_sandwich,
    komatsu_dual,
    sandwich_envelope,
)
from .lambertw import check_lambert_bounds, lambert_w, lambert_w_array  # noqa: E402
from .testfn import (  # noqa: E402
    PolyGaussian,
    characterize,
    fit_tau,
    gaussian,
    hermite,
    modulated_translated,
    seminorm_l2,
    seminorm_sup,
    seminorm_table,
)
from .tfr import (  # noqa: E402
    Axis,
    PhaseSpaceGrid,
    SampledSignal,
    ambiguity,
    fourier,
    grossmann_royer,
    inverse_fourier,
    invert,
    moyal_check,
    stft,
    tfr_membership,
    wigner,
)
from .weights import (  # noqa: E402
    LogWeightTable,
    WeightParams,
    absorption_constant,
    check_conditions,
    log_weight,
    sup_geometric_over_weight,
)
