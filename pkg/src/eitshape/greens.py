"""Dirichlet Green's function of the unit disk and its boundary flux kernel.

The Green's function is represented through the image point z* = z/|z|^2:

    G(x, z) = -(1/2pi) ln|x - z| + (1/2pi) ln(|z| |x - z*|),

smooth in both arguments away from x = z (the image term equals
(1/4pi) ln(|x|^2 |z|^2 - 2 x.z + 1), which is well defined even at z = 0).
Its outward normal derivative at a boundary point is the negative Poisson
kernel; with that sign the pairing of a boundary voltage g against the flux
kernel reproduces minus the harmonic lifting of g.
"""

from __future__ import annotations

import numpy as np

from .core import BoundaryGrid

_INV_2PI = 1.0 / (2.0 * np.pi)
_INV_4PI = 1.0 / (4.0 * np.pi)


def _as_points(x) -> np.ndarray:
    pts = np.asarray(x, dtype=float)
    if pts.shape[-1] != 2:
        raise ValueError("points must have shape (..., 2)")
    return pts


def green(x, z):
    """Green's function G(x, z) of the unit disk with zero boundary trace.

    Args:
        x: observation point(s), |x| <= 1, shape (..., 2).
        z: source point(s) strictly inside the disk, broadcastable to x.

    Returns:
        float or array of shape (...).

    Raises:
        ValueError: outside the domain of definition or when x == z.
    """
    xp = _as_points(x)
    zp = _as_points(z)
    if np.any(np.hypot(xp[..., 0], xp[..., 1]) > 1.0 + 1e-14):
        raise ValueError("observation point lies outside the closed unit disk")
    if np.any(np.hypot(zp[..., 0], zp[..., 1]) >= 1.0):
        raise ValueError("source point must lie strictly inside the unit disk")
    d2 = np.sum((xp - zp) ** 2, axis=-1)
    if np.any(d2 == 0.0):
        raise ValueError("Green's function is singular at x = z")
    x2 = np.sum(xp * xp, axis=-1)
    z2 = np.sum(zp * zp, axis=-1)
    dot = np.sum(xp * zp, axis=-1)
    # |z|^2 |x - z*|^2 = |x|^2 |z|^2 - 2 x.z + 1  (image-point identity)
    image = x2 * z2 - 2.0 * dot + 1.0
    val = -_INV_4PI * np.log(d2) + _INV_4PI * np.log(image)
    return val if val.ndim else float(val)


def poisson_normal_derivative(x, theta_z):
    """Outward normal derivative of G(x, .) at the boundary point angle theta_z.

    Equals minus the Poisson kernel,

        -(1/2pi) (1 - |x|^2) / (|x|^2 + 1 - 2|x| cos(theta_x - theta_z)),

    and is strictly negative for |x| < 1.

    Args:
        x: interior point(s), shape (..., 2).
        theta_z: boundary angle(s), broadcastable against the leading shape.

    Returns:
        float or array of shape broadcast(x-leading, theta_z).
    """
    xp = _as_points(x)
    t = np.asarray(theta_z, dtype=float)
    x2 = np.sum(xp * xp, axis=-1)
    if np.any(x2 >= 1.0):
        raise ValueError("flux kernel point must lie strictly inside the unit disk")
    dist2 = x2 + 1.0 - 2.0 * (xp[..., 0] * np.cos(t) + xp[..., 1] * np.sin(t))
    val = -_INV_2PI * (1.0 - x2) / dist2
    return val if val.ndim else float(val)


def probe_vector(z, grid: BoundaryGrid) -> np.ndarray:
    """Sampled flux kernel of the source point z on a boundary grid.

    Entry k is the outward normal derivative of G(z, .) at the grid node
    theta_k; the vector is real and strictly negative.
    """
    zp = _as_points(z)
    if zp.ndim != 1:
        raise ValueError("probe point must be a single point of shape (2,)")
    return poisson_normal_derivative(zp, grid.thetas)


def probe_matrix(points, grid: BoundaryGrid) -> np.ndarray:
    """Probe vectors of many source points at once, shape (n_points, K)."""
    pts = _as_points(points)
    return poisson_normal_derivative(pts[:, None, :], grid.thetas[None, :])
