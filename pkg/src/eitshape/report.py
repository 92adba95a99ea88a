"""Figure rendering for run reports.

Every run writes the delimited data first and then renders compact
matplotlib figures next to it: a field panel (filled contours plus either a
surface view or the extracted level curve) and a spectrum panel.  Rendering
is headless and deterministic given the same inputs.
"""

from __future__ import annotations

import numpy as np

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .core import (ConcentricDisc, Geometry, IndicatorField, SmallDiscs,
                   StarShaped)

_TWO_PI = 2.0 * np.pi


def _boundary_outline(geometry: Geometry, samples: int = 400):
    """Closed polylines tracing the inclusion boundary, list of (x, y)."""
    t = np.linspace(0.0, _TWO_PI, samples)
    if isinstance(geometry, ConcentricDisc):
        return [(geometry.radius * np.cos(t), geometry.radius * np.sin(t))]
    if isinstance(geometry, StarShaped):
        r = np.asarray(geometry.rho(t), dtype=float)
        return [(r * np.cos(t), r * np.sin(t))]
    if isinstance(geometry, SmallDiscs):
        out = []
        for j, ((cx, cy), _) in enumerate(geometry.components):
            a = geometry.disc_radius(j)
            out.append((cx + a * np.cos(t), cy + a * np.sin(t)))
        return out
    return []


def _field_mesh(field: IndicatorField):
    xx, yy = np.meshgrid(field.grid.x, field.grid.y, indexing="ij")
    return xx, yy, np.ma.masked_invalid(field.values)


def save_music_figure(field: IndicatorField, peaks: np.ndarray,
                      geometry: Geometry | None, path) -> None:
    """Contour and surface views of the localization field."""
    xx, yy, zz = _field_mesh(field)
    fig = plt.figure(figsize=(10, 4.2))
    ax = fig.add_subplot(1, 2, 1)
    cs = ax.contourf(xx, yy, zz, levels=30, cmap="viridis")
    fig.colorbar(cs, ax=ax, shrink=0.9)
    circle = np.linspace(0.0, _TWO_PI, 200)
    ax.plot(np.cos(circle), np.sin(circle), "k:", linewidth=1.0)
    if geometry is not None:
        for bx, by in _boundary_outline(geometry):
            ax.plot(bx, by, "w--", linewidth=1.0)
    if peaks.size:
        ax.plot(peaks[:, 0], peaks[:, 1], "r+", markersize=10,
                markeredgewidth=1.6, label="peaks")
        ax.legend(loc="upper right", fontsize=8)
    ax.set_aspect("equal")
    ax.set_title("localization field")
    ax3 = fig.add_subplot(1, 2, 2, projection="3d")
    ax3.plot_surface(xx, yy, np.where(np.isfinite(field.values),
                                      field.values, 0.0),
                     cmap="viridis", linewidth=0, antialiased=False)
    ax3.set_title("surface view")
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def save_factorization_figure(field: IndicatorField, segments: np.ndarray,
                              geometry: Geometry | None, level: float,
                              path) -> None:
    """Field heatmap and extracted level curve against the true boundary."""
    xx, yy, zz = _field_mesh(field)
    fig, (ax, ax2) = plt.subplots(1, 2, figsize=(10, 4.2))
    cs = ax.contourf(xx, yy, zz, levels=30, cmap="viridis")
    fig.colorbar(cs, ax=ax, shrink=0.9)
    ax.set_aspect("equal")
    ax.set_title("indicator field W")
    circle = np.linspace(0.0, _TWO_PI, 200)
    for a in (ax, ax2):
        a.plot(np.cos(circle), np.sin(circle), "k:", linewidth=1.0)
    if geometry is not None:
        for bx, by in _boundary_outline(geometry):
            ax2.plot(bx, by, "b--", linewidth=1.0, label="true boundary")
    for k, seg in enumerate(segments):
        ax2.plot(seg[:, 0], seg[:, 1], "r-", linewidth=1.2,
                 label="level curve" if k == 0 else None)
    ax2.set_aspect("equal")
    ax2.set_xlim(-1.05, 1.05)
    ax2.set_ylim(-1.05, 1.05)
    ax2.set_title("level set {W = %g}" % level)
    if geometry is not None or len(segments):
        ax2.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def save_spectrum_figure(sigmas: np.ndarray, path, title: str = "spectrum") -> None:
    fig, ax = plt.subplots(figsize=(5, 3.6))
    j = np.arange(1, sigmas.size + 1)
    ax.semilogy(j, sigmas, "o-", markersize=3)
    ax.set_xlabel("index j")
    ax.set_ylabel("singular value")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def save_scaling_figure(epsilons, norms: dict, path) -> None:
    fig, ax = plt.subplots(figsize=(5, 3.6))
    for label, values in norms.items():
        ax.loglog(epsilons, values, "o-", label=label)
    ax.set_xlabel("scale eps")
    ax.set_ylabel("data norm")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def save_convergence_figure(orders, measured, bound, path) -> None:
    fig, ax = plt.subplots(figsize=(5, 3.6))
    ax.semilogy(orders, measured, "o-", label="measured")
    ax.semilogy(orders, bound, "s--", label="envelope")
    ax.set_xlabel("truncation order N")
    ax.set_ylabel("operator distance")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
