"""hangersim: dispersive qubit readout through a symmetric hanger cavity,
with constructive interference of the transmission and reflection paths."""

from .calibration import (
    CalibrationRecord,
    ChainGains,
    LossFactors,
    ThetaEstimate,
    estimate_theta_rt,
    fit_chain_gains,
    loss_factors,
    measured_ratios,
    reconstruct_amplitudes,
)
from .cavity import (
    CavityParams,
    DriveTone,
    Path,
    PointerPair,
    QubitState,
    RelaxationWindow,
    ground_diameter,
    intracavity_steady,
    iq_circle,
    pointer_distance,
    reflection,
    relaxed_diameter,
    transmission,
)
from .interference import (
    InterferenceSetting,
    Port,
    combine,
    enhancement_factor,
    interference_distance,
    normalize_phase,
    path_phase_from_spacing,
)
from .kernels import BACKEND
from .optimizer import (
    ErrorBudget,
    ErrorModelParams,
    erf,
    lambert_w0,
    optimal_time,
    p_measure,
    p_relax,
    p_thermal,
    pointer_rate_from_photons,
    total_error,
)
from .presets import DevicePreset, get_preset, list_presets
from .readout import (
    ChainNoise,
    ShotAnalysis,
    ShotBatch,
    ShotConfig,
    analyze,
    bridge_c0,
    gaussian_overlap,
    histogram_batches,
    optimal_threshold,
    pointer_means,
    rescale_variance,
    simulate_shots,
)

__version__ = "0.1.0"
