"""Near-field beam training for uniform linear arrays.

Curvature is estimated from the spatial autocorrelation of one snapshot, the
channel is de-shaped to a planar wave and a plain DFT sweep finds the angle.
DFT and polar codebooks are provided as baselines.
"""

from .channel import (
    ChannelVector,
    NoiseSpec,
    add_noise,
    exact_channel,
    far_field_channel,
    phase_error_quadratic,
    quadratic_channel,
    spatial_spectrum,
)
from .coa import (
    AutocorrSequence,
    CoaEstimate,
    EstimatorConfig,
    autocorrelation,
    dirichlet_kernel,
    estimate_p1,
    invert_kernel,
    oracle_p1,
)
from .codebooks import (
    Codebook,
    Codeword,
    ShapingVector,
    de_shape,
    dft_codebook,
    jac_codebook,
    polar_codebook,
    shaping_vector,
)
from .experiments import (
    CoverageGrid,
    ExperimentSpec,
    ResultRecord,
    achievable_rate,
    coverage_heatmap,
    overhead_table,
    rate_vs_snr,
)
from .geometry import (
    ArrayConfig,
    NearFieldParams,
    UserPosition,
    antenna_position,
    fresnel_lower_bound,
    params_from_position,
    position_from_params,
    rayleigh_distance,
)
from .training import TrainingResult, jac_train, matched_filter_power, sweep

__version__ = "0.1.0"

__all__ = [
    "ArrayConfig",
    "AutocorrSequence",
    "ChannelVector",
    "CoaEstimate",
    "Codebook",
    "Codeword",
    "CoverageGrid",
    "EstimatorConfig",
    "ExperimentSpec",
    "NearFieldParams",
    "NoiseSpec",
    "ResultRecord",
    "ShapingVector",
    "TrainingResult",
    "UserPosition",
    "achievable_rate",
    "add_noise",
    "antenna_position",
    "autocorrelation",
    "coverage_heatmap",
    "de_shape",
    "dft_codebook",
    "dirichlet_kernel",
    "estimate_p1",
    "exact_channel",
    "far_field_channel",
    "fresnel_lower_bound",
    "invert_kernel",
    "jac_codebook",
    "jac_train",
    "matched_filter_power",
    "oracle_p1",
    "overhead_table",
    "params_from_position",
    "phase_error_quadratic",
    "polar_codebook",
    "position_from_params",
    "quadratic_channel",
    "rate_vs_snr",
    "rayleigh_distance",
    "shaping_vector",
    "spatial_spectrum",
    "sweep",
]
