"""Subspace localization of small inclusions from paired gap data.

The voltage-current pairing of the low-order Fourier voltages against the
gap currents builds the response matrix

    F[n, m] = (2 pi / K) sum_k exp(i m theta_k) * gap_n(theta_k),

which to leading order in the component scale factorizes as U T U^T with
U[m, j] the harmonic lifting of mode m at the j-th center and T the
diagonal of eps * circumference * average transmission coefficient.  The
orthogonal complement of the leading singular subspace therefore
annihilates the probe vector phi_x = (u0(x, f_0), ..., u0(x, f_N)) exactly
when x is a component center; the reciprocal squared projection onto that
complement peaks there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (BoundaryGrid, CurrentGapMatrix, FourierBasisSet,
                   IndicatorField, RobinCoefficient, SamplingGrid, SmallDiscs)

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class ResponseMatrix:
    """Paired response matrix over a low-pass voltage basis."""

    values: np.ndarray
    basis: FourierBasisSet

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        n = self.basis.size
        if vals.shape != (n, n):
            raise ValueError("response matrix must be square over the basis")
        object.__setattr__(self, "values", vals)

    def singular_values(self) -> np.ndarray:
        return np.linalg.svd(self.values, compute_uv=False)


def assemble_response(data: CurrentGapMatrix) -> ResponseMatrix:
    """Pair gap data bilinearly against the voltage basis.

    The pairing integral is discretized by the periodic Riemann sum on the
    data's boundary grid; no factor is conjugated, so synthetic small-disc
    data yields a complex-symmetric matrix.
    """
    if data.basis is None:
        raise ValueError("response assembly needs basis-indexed gap data")
    modes = data.basis.evaluate(data.grid.thetas)       # (|basis|, K)
    vals = (TWO_PI / data.grid.size) * (data.values @ modes.T)
    return ResponseMatrix(values=vals, basis=data.basis)


def synthetic_response(geometry: SmallDiscs, gamma: RobinCoefficient,
                       basis: FourierBasisSet, nodes: int = 32) -> ResponseMatrix:
    """Exact leading-order response U T U^T of a small-disc union."""
    centers = geometry.centers()
    z = centers[:, 0] + 1j * centers[:, 1]
    n = np.asarray(basis.indices)
    if np.any(n < 0):
        raise ValueError("synthetic response expects a low-pass basis")
    u = z[None, :] ** n[:, None]                        # (|basis|, J)
    t = TWO_PI * np.arange(nodes) / nodes
    strengths = np.array([
        geometry.epsilon * (TWO_PI * scale) * float(np.mean(gamma.samples(t)))
        for _, scale in geometry.components])
    vals = (u * strengths[None, :]) @ u.T
    return ResponseMatrix(values=vals, basis=basis)


def detect_rank(response, tau: float = 0.01) -> int:
    """Number of singular values within a factor tau of the largest.

    Accepts a ResponseMatrix or a 1-D array of singular values; a zero
    matrix has rank 0.
    """
    if not 0.0 < tau < 1.0:
        raise ValueError("tau must lie in (0, 1)")
    sig = (response.singular_values() if isinstance(response, ResponseMatrix)
           else np.sort(np.asarray(response, dtype=float))[::-1])
    if sig.size == 0 or sig[0] <= 0.0:
        return 0
    return int(np.count_nonzero(sig >= tau * sig[0]))


def probe_phi(x, basis: FourierBasisSet) -> np.ndarray:
    """Probe vector phi_x of harmonic liftings at x over the basis."""
    return probe_stack(np.asarray(x, dtype=float)[None, :], basis)[:, 0]


def probe_stack(points: np.ndarray, basis: FourierBasisSet) -> np.ndarray:
    """Probe vectors of many points, shape (|basis|, n_points)."""
    pts = np.asarray(points, dtype=float)
    z = pts[:, 0] + 1j * pts[:, 1]
    if np.any(np.abs(z) >= 1.0):
        raise ValueError("probe points must lie strictly inside the unit disk")
    n = np.asarray(basis.indices)
    if np.any(n < 0):
        raise ValueError("probe vectors are defined over a low-pass basis")
    return z[None, :] ** n[:, None]


def noise_projection(response: ResponseMatrix, rank: int) -> np.ndarray:
    """Orthonormal basis of the noise subspace (left singular vectors > rank)."""
    u, _, _ = np.linalg.svd(response.values)
    if not 0 <= rank <= u.shape[1]:
        raise ValueError("rank out of range")
    return u[:, rank:]


def music_field(response: ResponseMatrix, sampling: SamplingGrid,
                tau: float = 0.01, rank: int | None = None) -> IndicatorField:
    """Localization field over the sampling grid.

    W(x) = 1 / ||projection of phi_x onto the noise subspace||^2, normalized
    to a maximum of one; the detected (or supplied) rank and the raw peak
    value are recorded in the metadata.
    """
    if response.basis.kind != "lowpass":
        raise ValueError("localization requires the low-pass voltage basis")
    r = detect_rank(response, tau) if rank is None else int(rank)
    noise = noise_projection(response, r)               # (|basis|, n_noise)
    pts = sampling.points()
    phi = probe_stack(pts, response.basis)              # (|basis|, n_pts)
    # inner products (phi_x, u_l) with the second argument conjugated
    proj = noise.conj().T @ phi                         # (n_noise, n_pts)
    power = np.sum(np.abs(proj) ** 2, axis=0)
    with np.errstate(divide="ignore"):
        w = 1.0 / power
    finite_max = w[np.isfinite(w)].max() if np.any(np.isfinite(w)) else 1.0
    w = np.where(np.isfinite(w), w, finite_max)
    values = np.full(sampling.shape, np.nan)
    values[sampling.mask] = w / w.max()
    return IndicatorField(grid=sampling, values=values, method="music",
                          metadata={"rank": r, "tau": float(tau),
                                    "raw_peak": float(w.max()),
                                    "noise_dimension": int(noise.shape[1])})


def extract_peaks(field: IndicatorField, expected_count: int | None = None,
                  median_factor: float = 10.0) -> np.ndarray:
    """Grid local maxima of the field, strongest first.

    A retained point is a peak when its value is no smaller than each of its
    up-to-eight retained neighbors.  With ``expected_count`` the strongest
    that many peaks are returned; otherwise peaks exceeding
    ``median_factor`` times the median retained value are kept.

    Returns:
        array of rows (x, y, value), possibly empty.
    """
    vals = field.values
    padded = np.full((vals.shape[0] + 2, vals.shape[1] + 2), -np.inf)
    padded[1:-1, 1:-1] = np.where(np.isfinite(vals), vals, -np.inf)
    center = padded[1:-1, 1:-1]
    neighbor_max = np.full_like(center, -np.inf)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == 0 and dj == 0:
                continue
            shifted = padded[1 + di:padded.shape[0] - 1 + di,
                             1 + dj:padded.shape[1] - 1 + dj]
            neighbor_max = np.fmax(neighbor_max, shifted)
    is_peak = np.isfinite(center) & (center >= neighbor_max)
    ii, jj = np.nonzero(is_peak)
    if ii.size == 0:
        return np.empty((0, 3))
    peaks = np.column_stack([field.grid.x[ii], field.grid.y[jj],
                             center[ii, jj]])
    order = np.argsort(peaks[:, 2])[::-1]
    peaks = peaks[order]
    if expected_count is not None:
        return peaks[:expected_count]
    med = float(np.median(field.masked_values()))
    return peaks[peaks[:, 2] > median_factor * med]
