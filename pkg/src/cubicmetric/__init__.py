"""Cubic metric (CM) of OFDM signals.

Submodules:

* :mod:`cubicmetric.ofdm` -- random frames and oversampled baseband synthesis
* :mod:`cubicmetric.metrics` -- xi, RCM, CM and PAPR of a time signal
* :mod:`cubicmetric.analytic` -- closed-form variance, correlation and MSE
* :mod:`cubicmetric.montecarlo` -- seeded paired simulations, CCDF and MSE estimates
* :mod:`cubicmetric.cli` -- command-line front end
"""

from .analytic import AnalyticContext, AnalyticReport, analytic_report
from .errors import DegenerateSignalError, NumericalFailure
from .metrics import LTE_DOWNLINK, CmParams, MetricSample, measure
from .ofdm import OfdmConfig, PowerNorm, draw_frame, make_constellation, synthesize, trial_rng

__version__ = "0.1.0"

__all__ = [
    "AnalyticContext", "AnalyticReport", "CmParams", "DegenerateSignalError", "LTE_DOWNLINK",
    "MetricSample", "NumericalFailure", "OfdmConfig", "PowerNorm", "analytic_report",
    "draw_frame", "make_constellation", "measure", "synthesize", "trial_rng",
]
