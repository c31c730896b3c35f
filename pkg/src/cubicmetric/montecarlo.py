"""Seeded Monte Carlo estimates of the cubic-metric distribution and MSE.

Every trial draws its frame from its own Philox stream keyed by
``(seed, trial index)``.  Trials are processed in fixed-size chunks whose
boundaries depend only on the trial count and grid size, so results are
bit-identical for any number of worker processes.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .metrics import xi_batch
from .ofdm import OfdmConfig, make_constellation, n_samples, synthesize_batch, trial_rng

DEFAULT_REF_OVERSAMPLE = 32.0
DEFAULT_TRIALS = 100_000
# complex samples held per chunk and grid
_CHUNK_SAMPLES = 1 << 21


@dataclass(frozen=True)
class TrialBatch:
    xi_l: np.ndarray
    xi_ref: np.ndarray
    config: OfdmConfig
    ref_oversample: float = DEFAULT_REF_OVERSAMPLE

    @property
    def trials(self) -> int:
        return len(self.xi_l)


@dataclass(frozen=True)
class EmpiricalCcdf:
    thresholds_db: np.ndarray
    probabilities: np.ndarray


@dataclass(frozen=True)
class MseEstimate:
    mse_xi_hat: float
    mse_rcm_hat: float
    trials: int
    std_err_xi: float
    std_err_rcm: float


def draw_symbols(config: OfdmConfig, start: int, stop: int) -> np.ndarray:
    """Frames for trials ``start..stop-1`` as rows of an array."""
    points = make_constellation(config.constellation_order).points
    out = np.empty((stop - start, config.n_subcarriers), dtype=complex)
    for row, i in enumerate(range(start, stop)):
        idx = trial_rng(config.seed, i).integers(0, len(points), size=config.n_subcarriers)
        out[row] = points[idx]
    return out


def _chunk_xi(args) -> np.ndarray:
    config, start, stop, oversamples = args
    symbols = draw_symbols(config, start, stop)
    return np.stack([xi_batch(synthesize_batch(symbols, L), config.power_norm)
                     for L in oversamples])


def _chunk_size(config: OfdmConfig, oversamples) -> int:
    m = max(n_samples(config.n_subcarriers, L) for L in oversamples)
    return max(1, _CHUNK_SAMPLES // m)


def simulate_xi(config: OfdmConfig, trials: int, oversamples, workers: int = 1) -> np.ndarray:
    """``xi`` for each oversampling factor (rows) and trial (columns), same frames throughout."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    oversamples = tuple(float(L) for L in oversamples)
    size = _chunk_size(config, oversamples)
    jobs = [(config, lo, min(lo + size, trials), oversamples) for lo in range(0, trials, size)]
    if workers <= 1:
        parts = [_chunk_xi(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_chunk_xi, jobs))
    return np.concatenate(parts, axis=1)


def run_sweep(config: OfdmConfig, oversamples, trials: int,
              ref_oversample: float = DEFAULT_REF_OVERSAMPLE, workers: int = 1) -> list[TrialBatch]:
    """Paired batches for several oversampling factors sharing one reference signal."""
    oversamples = [float(L) for L in oversamples]
    if any(L > ref_oversample for L in oversamples):
        raise ValueError("ref_oversample must be at least every simulated oversample")
    xi = simulate_xi(config, trials, [*oversamples, ref_oversample], workers)
    ref = xi[-1]
    return [TrialBatch(xi_l=xi[j], xi_ref=ref,
                       config=OfdmConfig(config.n_subcarriers, L, config.constellation_order,
                                         config.power_norm, config.seed),
                       ref_oversample=ref_oversample)
            for j, L in enumerate(oversamples)]


def run_paired_trials(config: OfdmConfig, trials: int,
                      ref_oversample: float = DEFAULT_REF_OVERSAMPLE,
                      workers: int = 1) -> TrialBatch:
    return run_sweep(config, [config.oversample], trials, ref_oversample, workers)[0]


def empirical_ccdf(samples_xi, thresholds_db) -> EmpiricalCcdf:
    """Fraction of samples whose RCM in dB strictly exceeds each threshold."""
    samples_xi = np.asarray(samples_xi, dtype=float).ravel()
    thresholds_db = np.asarray(thresholds_db, dtype=float).ravel()
    if samples_xi.size == 0 or thresholds_db.size == 0:
        raise ValueError("samples and thresholds must be nonempty")
    if np.any(np.diff(thresholds_db) < 0):
        raise ValueError("thresholds must be ascending")
    rcm_db = np.sort(10.0 * np.log10(samples_xi))
    above = rcm_db.size - np.searchsorted(rcm_db, thresholds_db, side="right")
    return EmpiricalCcdf(thresholds_db=thresholds_db, probabilities=above / rcm_db.size)


def _mean_and_stderr(values: np.ndarray) -> tuple[float, float]:
    n = values.size
    mean = math.fsum(values) / n
    var = math.fsum((values - mean) ** 2) / (n - 1)
    return mean, math.sqrt(var / n)


def estimate_mse(batch: TrialBatch) -> MseEstimate:
    if batch.trials < 2:
        raise ValueError("need at least two trials for a standard error")
    d = batch.xi_l - batch.xi_ref
    d_root = d / (np.sqrt(batch.xi_l) + np.sqrt(batch.xi_ref))
    mse_xi, se_xi = _mean_and_stderr(d * d)
    mse_rcm, se_rcm = _mean_and_stderr(d_root * d_root)
    return MseEstimate(mse_xi_hat=mse_xi, mse_rcm_hat=mse_rcm, trials=batch.trials,
                       std_err_xi=se_xi, std_err_rcm=se_rcm)
