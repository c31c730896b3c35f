"""Special functions and quadrature helpers used by :mod:`cubicmetric.analytic`."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.integrate
import scipy.special

from .errors import NumericalFailure


@dataclass(frozen=True)
class QuadratureSpec:
    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_subdivisions: int = 2000
    hermite_nodes: int = 96

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")
        if self.hermite_nodes < 16:
            raise ValueError("hermite_nodes must be >= 16")


DEFAULT_QUADRATURE = QuadratureSpec()


def erf(x):
    """Error function; accepts scalars or arrays."""
    out = scipy.special.erf(x)
    return float(out) if np.ndim(out) == 0 else out


def hyp2f1_unit_c(a: int, b: int, z: float, tol: float = 1e-16,
                  max_terms: int = 2_000_000) -> float:
    """Gauss hypergeometric ``2F1(a, b; 1; z)`` by direct power series.

    Summation stops once the geometric bound on the remaining tail falls
    below ``tol`` times the partial sum.  Nonpositive integer ``a`` or ``b``
    terminate the series exactly.
    """
    if not abs(z) < 1:
        raise ValueError(f"series needs |z| < 1, got {z}")
    term = 1.0
    total = 1.0
    for m in range(max_terms):
        term *= (a + m) * (b + m) / ((m + 1) * (m + 1)) * z
        total += term
        if term == 0.0:
            return total
        ratio = abs((a + m + 1) * (b + m + 1) / ((m + 2) * (m + 2)) * z)
        if ratio < 1 and abs(term) * ratio / (1 - ratio) <= tol * abs(total):
            return total
    raise NumericalFailure(f"2F1({a}, {b}; 1; {z}) did not converge in {max_terms} terms")


def sinc_ratio(x, n_subcarriers: int):
    """``sin(x) / (N sin(x/N))`` with the removable singularities filled in."""
    x = np.asarray(x, dtype=float)
    n = n_subcarriers
    den = n * np.sin(x / n)
    singular = np.abs(np.sin(x / n)) < 1e-12
    safe = np.where(singular, 1.0, den)
    out = np.where(singular, np.cos(x) / np.cos(x / n), np.sin(x) / safe)
    return float(out) if out.ndim == 0 else out


def integrate_periodic_pieces(func, upper: float, piece: float,
                              spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """Adaptive quadrature of ``func`` over ``[0, upper]`` split every ``piece``.

    Splitting at the zeros of an oscillating integrand keeps each QUADPACK call
    on a single smooth lobe.
    """
    edges = np.arange(0.0, upper, piece)
    edges = np.append(edges, upper)
    parts = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        if hi - lo <= 0:
            continue
        val, err, info = scipy.integrate.quad(
            func, lo, hi, epsabs=spec.abs_tol, epsrel=spec.rel_tol,
            limit=spec.max_subdivisions, full_output=True)[:3]
        if err > 10 * max(spec.abs_tol, spec.rel_tol * abs(val)):
            raise NumericalFailure(f"quadrature on [{lo}, {hi}] reached only {err:.3g}")
        parts.append(val)
    return math.fsum(parts)


def standard_normal_nodes(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Hermite nodes and weights for expectations under N(0, 1)."""
    x, w = np.polynomial.hermite.hermgauss(n)
    return math.sqrt(2.0) * x, w / math.sqrt(math.pi)
