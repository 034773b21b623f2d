"""Rate laboratory for K-ary phase-shift-keyed floodlight QKD.

Computes the legitimate parties' Shannon-information rate over the Gaussian
measurement channel, simulates the single-photon channel monitor and its
intrusion estimator, and maximizes the secret-key-rate lower bound over
source brightness across path-length and alphabet-size sweeps.
"""

from .constellation import Constellation, IQPoint, boundary_angles, decide, make_kpsk, rotate
from .errors import (
    DomainError,
    GridRangeError,
    InvalidAlphabetError,
    NoCorrelationError,
    QuadratureError,
    SweepPointError,
)
from .link import (
    DEFAULT_PARAMS,
    GaussianChannel,
    ModesPerSymbol,
    ProtocolParams,
    link_budget,
    modes_per_symbol,
    path_transmissivity,
)
from .monitor import (
    FluxCheck,
    IntrusionEstimate,
    MonitorCounts,
    expected_counts,
    flux_check,
    intrusion_parameter,
    simulate_counts,
)
from .optimizer import DEFAULT_NS_BOUNDS, SweepRow, optimize_brightness, sweep
from .rates import (
    EveModel,
    RateResult,
    TabulatedBound,
    ZeroLeakage,
    eve_chi,
    mutual_information,
    mutual_information_circulant,
    skr_lower_bound,
)
from .receiver import (
    ConfusionMatrix,
    bpsk_error_closed_form,
    confusion_monte_carlo,
    confusion_quadrature,
    sample_iq,
)
from .streams import normal_pairs, philox_stream

__version__ = "0.1.0"

__all__ = [
    "Constellation", "IQPoint", "make_kpsk", "decide", "boundary_angles", "rotate",
    "ProtocolParams", "GaussianChannel", "ModesPerSymbol", "DEFAULT_PARAMS",
    "path_transmissivity", "modes_per_symbol", "link_budget",
    "ConfusionMatrix", "sample_iq", "confusion_monte_carlo", "confusion_quadrature",
    "bpsk_error_closed_form",
    "RateResult", "EveModel", "ZeroLeakage", "TabulatedBound",
    "mutual_information", "mutual_information_circulant", "skr_lower_bound", "eve_chi",
    "MonitorCounts", "IntrusionEstimate", "FluxCheck",
    "intrusion_parameter", "simulate_counts", "expected_counts", "flux_check",
    "SweepRow", "optimize_brightness", "sweep", "DEFAULT_NS_BOUNDS",
    "philox_stream", "normal_pairs",
    "DomainError", "InvalidAlphabetError", "NoCorrelationError", "GridRangeError",
    "QuadratureError", "SweepPointError",
    "__version__",
]
