"""Bi-directional amplify-and-forward relay networks: link-level Monte
Carlo simulation and matching closed-form SER analysis.

Two sources exchange symbols through a pool of relays in two phases.
The package covers single-relay selection (sum-SER-optimal and min-max
rules), the all-participate baseline with maximal ratio combining, the
high-SNR SER laws for both, and power allocation across sources and
relay under a total budget.
"""

from .analysis import (
    ModulationConstant,
    PowerProfile,
    asymptotic_ser_ap,
    asymptotic_ser_rs,
    exact_snr_pdf,
    opa_gain,
    q_function,
    selected_snr_cdf_approx,
    ser_ratio_rs_over_ap,
)
from .apaf import ApConfig, ap_effective_snr, simulate_ap_frame
from .channel import (
    ChannelPair,
    FrameChannels,
    derive_stream,
    draw_channel_matrix,
    draw_frame_channels,
)
from .montecarlo import (
    SCHEMES,
    ExperimentConfig,
    SerCurve,
    SerPoint,
    estimate_diversity_order,
    estimate_ser,
    power_profile_at,
    run_frame_rs,
)
from .phy import Constellation, awgn, ml_detect, ml_detect_many, modulate
from .powalloc import (
    PowerSplit,
    mc_sweep_lambda,
    opa_split,
    optimize_lambda,
    split_for_lambda,
    sweep_lambda,
)
from .selection import SelectionOutcome, select_minmax, select_optimal
from .twoway import (
    EndToEndLink,
    RelayObservation,
    amplification_factor,
    effective_snr_approx,
    effective_snr_exact,
    forward_and_cancel,
    relay_observe,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "ModulationConstant",
    "PowerProfile",
    "q_function",
    "asymptotic_ser_rs",
    "asymptotic_ser_ap",
    "ser_ratio_rs_over_ap",
    "opa_gain",
    "exact_snr_pdf",
    "selected_snr_cdf_approx",
    "ChannelPair",
    "FrameChannels",
    "derive_stream",
    "draw_frame_channels",
    "draw_channel_matrix",
    "Constellation",
    "modulate",
    "awgn",
    "ml_detect",
    "ml_detect_many",
    "RelayObservation",
    "EndToEndLink",
    "amplification_factor",
    "relay_observe",
    "forward_and_cancel",
    "effective_snr_exact",
    "effective_snr_approx",
    "SelectionOutcome",
    "select_optimal",
    "select_minmax",
    "ApConfig",
    "ap_effective_snr",
    "simulate_ap_frame",
    "SCHEMES",
    "ExperimentConfig",
    "SerPoint",
    "SerCurve",
    "power_profile_at",
    "run_frame_rs",
    "estimate_ser",
    "estimate_diversity_order",
    "PowerSplit",
    "opa_split",
    "split_for_lambda",
    "sweep_lambda",
    "optimize_lambda",
    "mc_sweep_lambda",
]
