"""Closed-form statistics of the cubic metric of OFDM signals.

Model: the normalized envelope ``r`` of a Gaussian OFDM signal is Rayleigh, so
``w = r**6`` is Weibull with shape 1/3 and ``E[w**k] = (3k)!``.  The per-frame
statistic ``xi_L`` is the sample mean of ``w`` over ``M = round(L N)`` samples
and is treated as Gaussian with mean 6.  Time lags are in units of the OFDM
symbol period.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
import scipy.integrate
import scipy.special

from .errors import NumericalFailure
from .ofdm import n_samples
from .special import (
    DEFAULT_QUADRATURE,
    QuadratureSpec,
    erf,
    hyp2f1_unit_c,
    integrate_periodic_pieces,
    sinc_ratio,
    standard_normal_nodes,
)

__all__ = [
    "AnalyticContext", "AnalyticReport", "QuadratureSpec", "analytic_report",
    "ccdf_rcm_db", "corr_xi", "cov_w", "erf", "hyp2f1_unit_c", "joint_moment_w",
    "mse_rcm", "mse_xi", "rcm_db_quantile", "rho_tau", "sigma_inf_sq",
    "sigma_inf_sq_quadrature", "sigma_l_sq", "sinc_ratio_integral",
    "sinc_ratio_quadrature", "w_variance", "weibull_moment",
]

XI_MEAN = 6.0
# snap tolerance (in units of lag * N) for lags that sit on the sample grid
_GRID_SNAP = 64 * np.finfo(float).eps


@dataclass(frozen=True)
class AnalyticContext:
    n_subcarriers: int
    oversample: float = 1.0

    def __post_init__(self):
        if int(self.n_subcarriers) != self.n_subcarriers or self.n_subcarriers < 2:
            raise ValueError(f"n_subcarriers must be an integer >= 2, got {self.n_subcarriers}")
        if not self.oversample >= 1:
            raise ValueError(f"oversample must be >= 1, got {self.oversample}")

    @property
    def n_samples(self) -> int:
        return n_samples(self.n_subcarriers, self.oversample)

    @property
    def effective_oversample(self) -> float:
        return self.n_samples / self.n_subcarriers


@dataclass(frozen=True)
class AnalyticReport:
    n_subcarriers: int
    effective_oversample: float
    sigma_l_sq: float
    sigma_inf_sq: float
    corr: float
    mse_xi: float
    mse_rcm: float

    @property
    def normalized_mse_rcm(self) -> float:
        return self.mse_rcm / XI_MEAN


# ---------------------------------------------------------------------------
# moments of w = r^6

def weibull_moment(k: int) -> float:
    """``E[w**k] = Gamma(1 + 3k) = (3k)!``."""
    if int(k) != k or k < 0:
        raise ValueError(f"k must be a nonnegative integer, got {k}")
    value = math.factorial(3 * int(k))
    try:
        return float(value)
    except OverflowError:
        raise OverflowError(f"(3*{k})! exceeds the double range") from None


def w_variance() -> float:
    return weibull_moment(2) - weibull_moment(1) ** 2


def rho_tau(n_subcarriers: int, tau):
    """Envelope correlation ``sin(pi N tau) / (N sin(pi tau))`` at lag ``tau``.

    Lags on the Nyquist grid (``N tau`` integer, ``tau`` not) return exactly 0;
    integer lags return the limit ``(-1)**(tau (N + 1))``, i.e. 1 at ``tau = 0``.
    """
    n = n_subcarriers
    tau = np.asarray(tau, dtype=float)
    nt = n * tau
    on_nyquist = np.abs(nt - np.round(nt)) <= _GRID_SNAP * np.maximum(1.0, np.abs(nt))
    on_period = on_nyquist & (np.abs(tau - np.round(tau)) <= _GRID_SNAP * np.maximum(1.0, np.abs(nt)))
    den = n * np.sin(np.pi * tau)
    out = np.sin(np.pi * nt) / np.where(on_nyquist, 1.0, den)
    out = np.where(on_nyquist, 0.0, out)
    parity = np.mod(np.round(tau).astype(np.int64) * (n + 1), 2)
    out = np.where(on_period, 1.0 - 2.0 * parity, out)
    return float(out) if out.ndim == 0 else out


def cov_w(rho):
    """``Cov(w(t), w(t + tau))`` as a function of the envelope correlation."""
    rho = np.asarray(rho, dtype=float)
    if np.any(np.abs(rho) > 1 + 1e-12):
        raise ValueError("correlation must satisfy |rho| <= 1")
    r2 = rho * rho
    out = 36.0 * r2 * (9.0 + r2 * (9.0 + r2))
    return float(out) if out.ndim == 0 else out


def joint_moment_w(p: int, q: int, rho: float) -> float:
    """``E[w(t)**p w(t + tau)**q]`` through the Gauss hypergeometric series."""
    if p < 0 or q < 0:
        raise ValueError("moment orders must be nonnegative")
    if abs(rho) > 1:
        raise ValueError(f"|rho| must be <= 1, got {rho}")
    if abs(rho) == 1:
        return weibull_moment(p + q)
    z = rho * rho
    a, b = 1 + 3 * p, 1 + 3 * q
    return ((1 - z) ** (1 + 3 * p + 3 * q) * math.gamma(a) * math.gamma(b)
            * hyp2f1_unit_c(a, b, z))


# ---------------------------------------------------------------------------
# variance of the sample mean xi_L

def sigma_l_sq(ctx: AnalyticContext) -> float:
    """Variance of ``xi_L`` from the stationary sample-mean formula over M samples."""
    n, m = ctx.n_subcarriers, ctx.n_samples
    k = np.arange(1, m)
    c = cov_w(rho_tau(n, k / m))
    return w_variance() / m + 2.0 / m**2 * math.fsum((m - k) * c)


def sigma_inf_sq(n_subcarriers: int) -> float:
    """Variance of ``xi`` for the continuous signal (exact closed form)."""
    n = float(n_subcarriers)
    return 36.0 / (5.0 * n**5) + 117.0 / n**3 + 2799.0 / (5.0 * n)


def sinc_ratio_integral(n_subcarriers: int, r: int) -> float:
    """``int_0^{N pi/2} (sin x / (N sin(x/N)))**r dx`` in closed form, r in {2, 4, 6}."""
    n2 = float(n_subcarriers) ** 2
    if r == 2:
        return math.pi / 2
    if r == 4:
        return math.pi * (1 / 3 + 1 / (6 * n2))
    if r == 6:
        return math.pi * (11 / 40 + 1 / (8 * n2) + 1 / (10 * n2 * n2))
    raise ValueError(f"r must be 2, 4 or 6, got {r}")


def sinc_ratio_quadrature(n_subcarriers: int, r: int,
                          spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    n = n_subcarriers
    return integrate_periodic_pieces(lambda x: sinc_ratio(x, n) ** r, n * math.pi / 2,
                                     math.pi, spec)


def _sigma_inf_integrand(x, n):
    g2 = sinc_ratio(x, n) ** 2
    return g2 * (9.0 + g2 * (9.0 + g2))


def sigma_inf_sq_quadrature(n_subcarriers: int,
                            spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    n = n_subcarriers
    integral = integrate_periodic_pieces(lambda x: _sigma_inf_integrand(x, n),
                                         n * math.pi / 2, math.pi, spec)
    return 72.0 / (n * math.pi) * integral


@functools.lru_cache(maxsize=64)
def _cov_fourier(n_subcarriers: int) -> np.ndarray:
    """Fourier coefficients of ``cov_w(rho_tau(N, tau))`` at frequencies -3(N-1)..3(N-1).

    ``rho**2`` is a trigonometric polynomial whose coefficients form the
    triangle ``(N - |d|) / N**2``; higher powers are its self-convolutions.
    """
    n = n_subcarriers
    d = np.arange(-(n - 1), n)
    a2 = (n - np.abs(d)) / float(n * n)
    a4 = np.convolve(a2, a2)
    a6 = np.convolve(a4, a2)
    width = 3 * (n - 1)
    c = 36.0 * a6
    c[width - 2 * (n - 1): width + 2 * (n - 1) + 1] += 324.0 * a4
    c[width - (n - 1): width + n] += 324.0 * a2
    return c


def sigma_sq_fourier(n_subcarriers: int, n_samples_: int | None = None) -> float:
    """Variance of ``xi`` on an ``M``-point grid by summing aliased Fourier coefficients.

    ``M=None`` gives the continuous-signal value (zero-frequency coefficient).
    Sampling a trigonometric polynomial on ``M`` points folds every coefficient
    at a multiple of ``M`` onto zero frequency.
    """
    c = _cov_fourier(n_subcarriers)
    width = 3 * (n_subcarriers - 1)
    if n_samples_ is None:
        return float(c[width])
    freqs = np.arange(-width, width + 1)
    return math.fsum(c[freqs % n_samples_ == 0])


def _alias_excess(n_subcarriers: int, m: int) -> float:
    c = _cov_fourier(n_subcarriers)
    width = 3 * (n_subcarriers - 1)
    freqs = np.arange(-width, width + 1)
    return math.fsum(c[(freqs % m == 0) & (freqs != 0)])


def corr_xi(ctx: AnalyticContext) -> float:
    """Correlation between ``xi_L`` and ``xi_inf``: ``sigma_inf / sigma_L``."""
    s_inf = sigma_inf_sq(ctx.n_subcarriers)
    return math.sqrt(s_inf / (s_inf + mse_xi(ctx)))


def mse_xi(ctx: AnalyticContext) -> float:
    """``E[(xi_L - xi_inf)**2] = sigma_L**2 - sigma_inf**2``.

    Evaluated as the sum of aliased spectral terms, which equals the variance
    difference but carries no cancellation and is exactly 0 once the grid
    resolves the highest covariance harmonic (``M > 3(N - 1)``).
    """
    return _alias_excess(ctx.n_subcarriers, ctx.n_samples)


def mse_rcm(ctx: AnalyticContext, spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """``E[(sqrt(xi_L) - sqrt(xi_inf))**2]`` under the bivariate Gaussian model.

    Works in decorrelated standard normals ``u, v`` with ``xi_L = 6 + s_L u``
    and ``xi_inf = 6 + s_inf (rho u + sqrt(1 - rho^2) v)``; the region where
    either ``xi`` is nonpositive contributes nothing.  Tensor Gauss-Hermite is
    used when that region lies beyond ``_GH_SAFE_SIGMAS`` standard deviations.
    Closer in, the cut and the square-root branch spoil Gauss-Hermite
    convergence, so nested adaptive quadrature with breakpoints at the cut
    takes over.
    """
    excess = mse_xi(ctx)
    s_inf_sq = sigma_inf_sq(ctx.n_subcarriers)
    s_l = math.sqrt(s_inf_sq + excess)
    s_inf = math.sqrt(s_inf_sq)
    if excess == 0.0:
        return 0.0
    if XI_MEAN / s_l >= _GH_SAFE_SIGMAS:
        value = _mse_rcm_hermite(excess, s_l, s_inf, spec.hermite_nodes)
    else:
        value = _mse_rcm_adaptive(excess, s_l, s_inf, spec)
    if not math.isfinite(value):
        raise NumericalFailure("RCM MSE evaluation is not finite")
    return value


# Gaussian mass beyond 8 sigma is below 1e-15
_GH_SAFE_SIGMAS = 8.0
_NORMAL_SPAN = 40.0


def _mse_rcm_hermite(excess, s_l, s_inf, n_nodes):
    rho = s_inf / s_l
    nodes, weights = standard_normal_nodes(n_nodes)
    u, v = np.meshgrid(nodes, nodes, indexing="ij")
    w = np.outer(weights, weights)
    xi_l = XI_MEAN + s_l * u
    xi_inf = XI_MEAN + s_inf * (rho * u + math.sqrt(max(0.0, 1 - rho * rho)) * v)
    # xi_l - xi_inf written without cancellation
    diff = (excess / s_l) * u - (s_inf / s_l) * math.sqrt(excess) * v
    valid = (xi_l > 0) & (xi_inf > 0)
    root_sum = np.sqrt(np.where(valid, xi_l, 1.0)) + np.sqrt(np.where(valid, xi_inf, 1.0))
    integrand = np.where(valid, (diff / root_sum) ** 2, 0.0)
    return math.fsum((w * integrand).ravel())


def _quad(f, lo, hi, spec):
    # relative-only tolerance: the MSE spans many orders of magnitude
    val, err = scipy.integrate.quad(f, lo, hi, epsabs=0.0, epsrel=spec.rel_tol,
                                    limit=spec.max_subdivisions)
    if err > 100 * spec.rel_tol * abs(val) + 1e-300:
        raise NumericalFailure(f"adaptive quadrature on [{lo}, {hi}] reached only {err:.3g}")
    return val


def _mse_rcm_adaptive(excess, s_l, s_inf, spec):
    rho = s_inf / s_l
    rho_c = math.sqrt(excess) / s_l  # sqrt(1 - rho^2)
    a = excess / s_l
    b = (s_inf / s_l) * math.sqrt(excess)
    norm = 1.0 / math.sqrt(2.0 * math.pi)

    def inner(u):
        xi_l = XI_MEAN + s_l * u
        root_l = math.sqrt(xi_l)
        v_cut = (-XI_MEAN / s_inf - rho * u) / rho_c

        def f(v):
            xi_inf = XI_MEAN + s_inf * (rho * u + rho_c * v)
            d = (a * u - b * v) / (root_l + math.sqrt(max(xi_inf, 0.0)))
            return d * d * norm * math.exp(-0.5 * v * v)

        lo = max(v_cut, -_NORMAL_SPAN)
        total = _quad(f, max(lo, 0.0), _NORMAL_SPAN, spec)
        if lo < 0:
            total += _quad(f, lo, 0.0, spec)
        return total * norm * math.exp(-0.5 * u * u)

    u_cut = max(-XI_MEAN / s_l, -_NORMAL_SPAN)
    return _quad(inner, u_cut, 0.0, spec) + _quad(inner, 0.0, _NORMAL_SPAN, spec)


# ---------------------------------------------------------------------------
# distribution of RCM in dB

def ccdf_rcm_db(a_db, sigma_l: float):
    """``P(RCM_L|dB > a)`` for Gaussian ``xi_L`` with mean 6 and std ``sigma_l``."""
    if not sigma_l > 0:
        raise ValueError(f"sigma_l must be positive, got {sigma_l}")
    arg = (10.0 ** (np.asarray(a_db, dtype=float) / 10.0) - XI_MEAN) / (sigma_l * math.sqrt(2.0))
    # erfc keeps precision in the upper tail where 1 - erf cancels
    out = 0.5 * scipy.special.erfc(arg)
    return float(out) if np.ndim(out) == 0 else out


def rcm_db_quantile(prob, sigma_l: float):
    """Inverse of :func:`ccdf_rcm_db`: the level exceeded with probability ``prob``."""
    xi = XI_MEAN + sigma_l * math.sqrt(2.0) * scipy.special.erfcinv(2.0 * np.asarray(prob, float))
    out = 10.0 * np.log10(xi)
    return float(out) if np.ndim(out) == 0 else out


def analytic_report(ctx: AnalyticContext,
                    spec: QuadratureSpec = DEFAULT_QUADRATURE) -> AnalyticReport:
    return AnalyticReport(
        n_subcarriers=ctx.n_subcarriers,
        effective_oversample=ctx.effective_oversample,
        sigma_l_sq=sigma_l_sq(ctx),
        sigma_inf_sq=sigma_inf_sq(ctx.n_subcarriers),
        corr=corr_xi(ctx),
        mse_xi=mse_xi(ctx),
        mse_rcm=mse_rcm(ctx, spec),
    )
