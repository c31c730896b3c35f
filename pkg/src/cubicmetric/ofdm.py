"""OFDM frame generation and oversampled baseband synthesis.

The OFDM symbol period is normalized to 1, so sample ``n`` of an ``M``-point
signal sits at time ``n / M``.  A frame of ``N`` subcarrier symbols is placed
on FFT bins ``0..N-1`` and zero padded to ``M = round(L * N)`` bins.  The
``1/sqrt(N)`` scaling makes the ensemble-average sample power equal to 1 for a
unit-power constellation.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.fft

from .errors import DegenerateSignalError

SUPPORTED_ORDERS = (4, 16, 64, 256)


class PowerNorm(str, enum.Enum):
    FRAME = "frame"
    ENSEMBLE = "ensemble"


@dataclass(frozen=True)
class OfdmConfig:
    n_subcarriers: int
    oversample: float = 1.0
    constellation_order: int = 16
    power_norm: PowerNorm = PowerNorm.FRAME
    seed: int = 0

    def __post_init__(self):
        if int(self.n_subcarriers) != self.n_subcarriers or self.n_subcarriers < 2:
            raise ValueError(f"n_subcarriers must be an integer >= 2, got {self.n_subcarriers}")
        if not self.oversample >= 1.0:
            raise ValueError(f"oversample must be >= 1, got {self.oversample}")
        if self.constellation_order not in SUPPORTED_ORDERS:
            raise ValueError(f"unsupported constellation order {self.constellation_order}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")
        object.__setattr__(self, "power_norm", PowerNorm(self.power_norm))

    @property
    def n_samples(self) -> int:
        return n_samples(self.n_subcarriers, self.oversample)


@dataclass(frozen=True)
class Constellation:
    points: np.ndarray
    order: int


@dataclass(frozen=True)
class FrequencyFrame:
    symbols: np.ndarray

    @property
    def n_subcarriers(self) -> int:
        return len(self.symbols)


@dataclass(frozen=True)
class TimeSignal:
    samples: np.ndarray
    n_subcarriers: int
    effective_oversample: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "effective_oversample", len(self.samples) / self.n_subcarriers)


def n_samples(n_subcarriers: int, oversample: float) -> int:
    """Grid size ``round(L * N)``, never below ``N``."""
    if oversample < 1:
        raise ValueError(f"oversample must be >= 1, got {oversample}")
    return max(int(round(oversample * n_subcarriers)), n_subcarriers)


def make_constellation(order: int) -> Constellation:
    """Square QAM with unit average power."""
    if order not in SUPPORTED_ORDERS:
        raise ValueError(f"unsupported constellation order {order}; use one of {SUPPORTED_ORDERS}")
    side = math.isqrt(order)
    levels = np.arange(-(side - 1), side, 2, dtype=float)
    grid = (levels[:, None] + 1j * levels[None, :]).ravel()
    # mean |a + jb|^2 over the grid = 2 * mean(levels^2) = 2 (side^2 - 1) / 3
    scale = math.sqrt(2.0 * (order - 1) / 3.0)
    return Constellation(points=grid / scale, order=order)


def trial_rng(seed: int, index: int) -> np.random.Generator:
    """Independent Philox stream for trial ``index``.

    The trial index occupies the upper counter word, so streams never overlap
    and trial ``i`` is reproducible regardless of which worker draws it.
    """
    return np.random.Generator(np.random.Philox(key=seed, counter=[0, 0, 0, index]))


def draw_frame(config: OfdmConfig, rng: np.random.Generator,
               constellation: Constellation | None = None) -> FrequencyFrame:
    if constellation is None:
        constellation = make_constellation(config.constellation_order)
    idx = rng.integers(0, constellation.order, size=config.n_subcarriers)
    return FrequencyFrame(symbols=constellation.points[idx])


def synthesize_batch(symbols: np.ndarray, oversample: float) -> np.ndarray:
    """Rows of ``symbols`` (shape ``(..., N)``) to ``M``-sample time signals."""
    symbols = np.asarray(symbols, dtype=complex)
    n = symbols.shape[-1]
    m = n_samples(n, oversample)
    # ifft carries a 1/M factor; rescale to the 1/sqrt(N) convention
    return scipy.fft.ifft(symbols, n=m, axis=-1) * (m / math.sqrt(n))


def synthesize(frame: FrequencyFrame, oversample: float) -> TimeSignal:
    samples = synthesize_batch(frame.symbols, oversample)
    return TimeSignal(samples=samples, n_subcarriers=frame.n_subcarriers)


def average_power(signal: TimeSignal, mode: PowerNorm | str = PowerNorm.FRAME) -> float:
    """Normalization power ``P_av``: realized mean power or the ensemble value 1."""
    mode = PowerNorm(mode)
    if len(signal.samples) == 0:
        raise ValueError("empty signal")
    if mode is PowerNorm.ENSEMBLE:
        return 1.0
    p = float(np.mean(np.abs(signal.samples) ** 2))
    if p == 0.0:
        raise DegenerateSignalError("all-zero signal has no average power")
    return p


def normalized_envelope(signal: TimeSignal, p_av: float) -> np.ndarray:
    if not p_av > 0:
        raise ValueError(f"p_av must be positive, got {p_av}")
    return np.abs(signal.samples) / math.sqrt(p_av)
