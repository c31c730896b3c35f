"""Cubic metric and PAPR of discrete OFDM signals.

``xi`` is the mean sixth power of the normalized envelope, i.e. the squared raw
cubic metric.  ``20 log10(rms(r^3))`` equals ``10 log10(xi)``, which is what
``rcm_db_of`` evaluates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSignalError
from .ofdm import PowerNorm, TimeSignal, average_power, normalized_envelope


@dataclass(frozen=True)
class CmParams:
    rcm_ref_db: float = 1.52
    k_slope: float = 1.56

    def __post_init__(self):
        if not self.k_slope > 0:
            raise ValueError(f"k_slope must be positive, got {self.k_slope}")


LTE_DOWNLINK = CmParams()


@dataclass(frozen=True)
class MetricSample:
    xi: float
    rcm: float
    rcm_db: float
    papr_db: float
    effective_oversample: float


def xi_of(signal: TimeSignal, mode: PowerNorm | str = PowerNorm.FRAME) -> float:
    r = normalized_envelope(signal, average_power(signal, mode))
    return float(np.mean(r**6))


def xi_batch(samples: np.ndarray, mode: PowerNorm | str = PowerNorm.FRAME) -> np.ndarray:
    """``xi`` for every row of a 2-D array of time samples."""
    power = np.abs(samples) ** 2
    xi = np.mean(power**3, axis=-1)
    if PowerNorm(mode) is PowerNorm.FRAME:
        p_av = np.mean(power, axis=-1)
        if np.any(p_av == 0):
            raise DegenerateSignalError("all-zero signal has no average power")
        xi = xi / p_av**3
    return xi


def rcm_db_of(xi: float) -> float:
    if not xi > 0:
        raise ValueError(f"xi must be positive, got {xi}")
    return 10.0 * math.log10(xi)


def cm_db_of(rcm_db: float, params: CmParams = LTE_DOWNLINK) -> float:
    return (rcm_db - params.rcm_ref_db) / params.k_slope


def papr_db_of(signal: TimeSignal, mode: PowerNorm | str = PowerNorm.FRAME) -> float:
    r = normalized_envelope(signal, average_power(signal, mode))
    peak = float(np.max(r**2))
    if peak == 0.0:
        raise DegenerateSignalError("all-zero signal has no peak power")
    return 10.0 * math.log10(peak)


def measure(signal: TimeSignal, mode: PowerNorm | str = PowerNorm.FRAME) -> MetricSample:
    xi = xi_of(signal, mode)
    return MetricSample(
        xi=xi,
        rcm=math.sqrt(xi),
        rcm_db=rcm_db_of(xi),
        papr_db=papr_db_of(signal, mode),
        effective_oversample=signal.effective_oversample,
    )
