"""Exact Fourier-series forward path for a concentric disc inclusion.

For a disc of radius rho centered at the origin with constant transmission
coefficient gamma, separation of variables gives the gap current of the
voltage exp(i n theta) in closed form.  Writing the exterior solution as
a_n r^|n| + b_n r^-|n| per mode (a_0 + b_0 ln r for n = 0), the interface
conditions yield

    a_n = (2|n| + g) / (2|n| + g (1 - rho^2|n|)),      g = gamma * rho,
    b_n = -g rho^2|n| / (2|n| + g (1 - rho^2|n|)),

and the boundary current of the full problem is |n| sigma_n per unit
voltage with sigma_n = a_n - b_n, while the reference current is |n|.
The gap operator therefore acts diagonally: mode 0 is scaled by
sigma_0 = g / (1 - g ln rho) and mode n by |n| (sigma_n - 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import BoundaryGrid, CurrentGapMatrix

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class SeriesCoefficients:
    """Parameters of the separable concentric-disc problem.

    ``truncation`` is the largest retained mode order N; the series kernel
    keeps modes |n| <= N.
    """

    rho: float
    gamma: float
    truncation: int

    def __post_init__(self):
        if not 0.0 < self.rho < 1.0:
            raise ValueError("rho must lie in (0, 1)")
        if self.gamma < 0.0:
            raise ValueError("gamma must be nonnegative")
        if self.truncation < 1:
            raise ValueError("truncation order must be at least 1")


def mode_coefficients(coeffs: SeriesCoefficients, n: int) -> tuple[float, float]:
    """Exterior expansion coefficients (a_n, b_n) for the unit voltage mode n.

    For n = 0 the pair refers to a_0 + b_0 ln r.
    """
    g = coeffs.gamma * coeffs.rho
    m = abs(int(n))
    if m == 0:
        b0 = g / (1.0 - g * math.log(coeffs.rho))
        return 1.0, b0
    p = coeffs.rho ** (2 * m)
    denom = 2.0 * m + g * (1.0 - p)
    return (2.0 * m + g) / denom, -g * p / denom


def mode_eigenvalue(coeffs: SeriesCoefficients, n: int) -> float:
    """Scaled boundary current sigma_n of the unit voltage mode n.

    sigma_0 = g / (1 - g ln rho) with g = gamma*rho, and for n != 0
    sigma_n = (2|n| + g(1 + rho^2|n|)) / (2|n| + g(1 - rho^2|n|)); the gap
    operator multiplies mode n by |n| (sigma_n - 1) and mode 0 by sigma_0.
    """
    g = coeffs.gamma * coeffs.rho
    m = abs(int(n))
    if m == 0:
        return g / (1.0 - g * math.log(coeffs.rho))
    p = coeffs.rho ** (2 * m)
    return (2.0 * m + g * (1.0 + p)) / (2.0 * m + g * (1.0 - p))


def gap_mode_weights(coeffs: SeriesCoefficients) -> np.ndarray:
    """Diagonal gap-operator weights for modes 0..truncation.

    Entry 0 is sigma_0 and entry n is n (sigma_n - 1), evaluated in the
    cancellation-free form 2 n g rho^2n / (2n + g (1 - rho^2n)); forming
    sigma_n - 1 by subtraction would be pure rounding noise once the weight
    drops below ~1e-13.
    """
    g = coeffs.gamma * coeffs.rho
    out = np.empty(coeffs.truncation + 1)
    out[0] = mode_eigenvalue(coeffs, 0)
    for n in range(1, coeffs.truncation + 1):
        p = coeffs.rho ** (2 * n)
        out[n] = 2.0 * n * g * p / (2.0 * n + g * (1.0 - p))
    return out


def kernel(coeffs: SeriesCoefficients, theta, phi):
    """Truncated gap kernel K(theta, phi).

    K(theta, phi) = sigma_0 + sum over 1 <= |n| <= N of
    |n| (sigma_n - 1) exp(i n (theta - phi)); since sigma_n = sigma_-n the
    value is real and depends only on theta - phi.
    """
    t = np.asarray(theta, dtype=float)
    p = np.asarray(phi, dtype=float)
    w = gap_mode_weights(coeffs)
    diff = t - p
    val = np.full(np.shape(diff), w[0])
    for n in range(1, coeffs.truncation + 1):
        val = val + 2.0 * w[n] * np.cos(n * diff)
    return val if np.ndim(val) else float(val)


def assemble_series_operator(coeffs: SeriesCoefficients,
                             grid: BoundaryGrid) -> CurrentGapMatrix:
    """Nodal collocation matrix of the gap operator on a boundary grid.

    A[j, k] = w_k K(theta_j, theta_k) / (2 pi); the matrix is circulant and
    for K > 2N reproduces the mode weights exactly: applying A to samples of
    exp(i n theta) returns |n|(sigma_n - 1) (sigma_0 for n = 0) times them.
    """
    t = grid.thetas
    vals = kernel(coeffs, t[:, None], t[None, :]) / grid.size
    return CurrentGapMatrix(values=vals, grid=grid, provenance="series")


@dataclass(frozen=True)
class TruncationReport:
    """Measured truncation error of the series operator versus a reference."""

    orders: np.ndarray
    measured: np.ndarray
    bound: np.ndarray
    reference_order: int

    def log_slope(self) -> float:
        """Least-squares slope of ln(measured) against the truncation order."""
        return float(np.polyfit(self.orders, np.log(self.measured), 1)[0])

    def ratio_spread(self) -> float:
        """max/min of measured/bound across the reported orders."""
        r = self.measured / self.bound
        return float(r.max() / r.min())


def truncation_error_report(rho: float, gamma: float, orders,
                            reference_order: int = 40,
                            grid: BoundaryGrid | None = None) -> TruncationReport:
    """Spectral-norm distance between truncated and reference operators.

    For each N in ``orders`` the report measures
    ||A_ref - A_N||_2 on the grid together with the theoretical envelope
    rho^(2(N+1)) / sqrt(N+1).  The grid must resolve the reference order
    (more than two nodes per mode).

    Raises:
        ValueError: when an order is out of range or the grid is too coarse.
    """
    orders = np.asarray(list(orders), dtype=int)
    if orders.size == 0:
        raise ValueError("at least one truncation order is required")
    if orders.min() < 1 or orders.max() >= reference_order:
        raise ValueError("orders must satisfy 1 <= N < reference_order")
    if grid is None:
        grid = BoundaryGrid(2 * reference_order + 16)
    if grid.size <= 2 * reference_order:
        raise ValueError("grid must satisfy K > 2 * reference_order")
    ref = SeriesCoefficients(rho=rho, gamma=gamma, truncation=reference_order)
    a_ref = assemble_series_operator(ref, grid).values
    measured = np.empty(orders.size)
    bound = np.empty(orders.size)
    for i, n in enumerate(orders):
        cn = SeriesCoefficients(rho=rho, gamma=gamma, truncation=int(n))
        a_n = assemble_series_operator(cn, grid).values
        measured[i] = np.linalg.norm(a_ref - a_n, ord=2)
        bound[i] = rho ** (2 * (n + 1)) / math.sqrt(n + 1)
    return TruncationReport(orders=orders, measured=measured, bound=bound,
                            reference_order=reference_order)
