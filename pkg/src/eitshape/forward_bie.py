"""Boundary-integral forward solver for general inclusion geometries.

The transmission solution u with boundary voltage f satisfies, for z inside
the disk,

    u(z) = u0(z) - integral over the inclusion boundary of
           G(z, x) gamma(x) u(x) ds(x),

with u0 the harmonic lifting of f.  Restricting z to the inclusion boundary
gives a second-kind integral equation for the trace psi = u restricted to
that boundary; the logarithmic singularity of G is handled with the
classical product quadrature for periodic log kernels (trigonometric
interpolation of the density against the ln(4 sin^2((t-s)/2)) weight), so
the solve is spectrally accurate for analytic boundaries.  The gap current
at a boundary angle theta_z then follows by smooth quadrature:

    gap(theta_z) = - integral of gamma psi dG/dnu(., theta_z) ds.

Small-disc unions are discretized component by component; cross-component
blocks are smooth and use the plain trapezoid rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (BoundaryGrid, ConcentricDisc, CurrentGapMatrix,
                   FourierBasisSet, Geometry, RobinCoefficient, SmallDiscs,
                   StarShaped, boundary_curve, harmonic_lifting)
from .greens import poisson_normal_derivative

TWO_PI = 2.0 * math.pi
_INV_4PI = 1.0 / (4.0 * math.pi)


def log_quadrature_weights(m: int) -> np.ndarray:
    """Product-quadrature weight matrix for the periodic log kernel.

    Returns R with R[i, j] such that for smooth 2*pi periodic f,

        integral of ln(4 sin^2((t_i - s)/2)) f(s) ds  ~=  sum_j R[i, j] f(s_j)

    on the equispaced grid s_j = 2 pi j / m; the rule is exact for
    trigonometric polynomials of degree below m/2.  ``m`` must be even.
    """
    if m < 4 or m % 2:
        raise ValueError("log quadrature needs an even number of nodes >= 4")
    half = m // 2
    d = TWO_PI * np.arange(m) / m
    orders = np.arange(1, half)[:, None]
    row = -(TWO_PI / half) * np.sum(np.cos(orders * d[None, :]) / orders, axis=0)
    row -= (math.pi / half ** 2) * np.cos(half * d)
    idx = (np.arange(m)[:, None] - np.arange(m)[None, :]) % m
    return row[idx]


@dataclass(frozen=True)
class BieDiscretization:
    """Nystrom discretization of the inclusion boundary.

    Nodes are grouped per closed curve (one curve for a disc or star-shaped
    inclusion, one per component for small-disc unions).  ``system`` holds
    the dense second-kind matrix I + S diag(gamma * speed * weight) acting on
    the trace samples.
    """

    geometry: Geometry
    params: np.ndarray          # boundary parameter per node
    points: np.ndarray          # node coordinates, (M, 2)
    speeds: np.ndarray          # |x'(t)| per node
    gammas: np.ndarray          # transmission coefficient per node
    weights: np.ndarray         # parameter-space quadrature weight per node
    system: np.ndarray          # dense (M, M) second-kind matrix

    @property
    def size(self) -> int:
        return self.params.size

    def line_density(self, trace: np.ndarray) -> np.ndarray:
        """gamma * trace * speed * weight per node (moment quadrature factors)."""
        return self.gammas * self.speeds * self.weights * trace


def _component_count(geometry: Geometry) -> int:
    return geometry.count if isinstance(geometry, SmallDiscs) else 1


def _image_part(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Smooth image term of the Green's function for interior point pairs."""
    x2 = np.sum(p * p, axis=-1)
    y2 = np.sum(q * q, axis=-1)
    dot = p[..., 0] * q[..., 0] + p[..., 1] * q[..., 1]
    return _INV_4PI * np.log(x2 * y2 - 2.0 * dot + 1.0)


def discretize(geometry: Geometry, gamma: RobinCoefficient,
               nodes: int = 128) -> BieDiscretization:
    """Assemble the dense second-kind system for the trace equation.

    ``nodes`` is the node count for a single smooth boundary; small-disc
    unions use ``nodes`` per component.  Must be even (the log-kernel rule
    interpolates at an even number of points).
    """
    if nodes < 8 or nodes % 2:
        raise ValueError("node count must be even and at least 8")
    n_comp = _component_count(geometry)
    t = TWO_PI * np.arange(nodes) / nodes
    params, points, speeds, gammas = [], [], [], []
    for c in range(n_comp):
        p, s, _ = boundary_curve(geometry, t, component=c)
        params.append(t)
        points.append(p)
        speeds.append(s)
        gammas.append(gamma.samples(t))
    params = np.concatenate(params)
    points = np.vstack(points)
    speeds = np.concatenate(speeds)
    gammas = np.concatenate(gammas)
    total = n_comp * nodes
    weights = np.full(total, TWO_PI / nodes)

    kern = np.empty((total, total))
    log_w = log_quadrature_weights(nodes)
    for bi in range(n_comp):
        si = slice(bi * nodes, (bi + 1) * nodes)
        for bj in range(n_comp):
            sj = slice(bj * nodes, (bj + 1) * nodes)
            pi, pj = points[si], points[sj]
            img = _image_part(pi[:, None, :], pj[None, :, :])
            if bi != bj:
                # disjoint curves: the full kernel is smooth
                d2 = np.sum((pi[:, None, :] - pj[None, :, :]) ** 2, axis=-1)
                kern[si, sj] = (TWO_PI / nodes) * (-_INV_4PI * np.log(d2) + img)
                continue
            # same curve: split off the periodic log singularity
            d2 = np.sum((pi[:, None, :] - pj[None, :, :]) ** 2, axis=-1)
            sin2 = 4.0 * np.sin(0.5 * (t[:, None] - t[None, :])) ** 2
            ratio = np.divide(d2, sin2, out=np.ones_like(d2), where=sin2 > 0)
            np.fill_diagonal(ratio, speeds[si] ** 2)
            smooth = -_INV_4PI * np.log(ratio) + img
            kern[si, sj] = -_INV_4PI * log_w + (TWO_PI / nodes) * smooth
    system = np.eye(total) + kern * (gammas * speeds)[None, :]
    return BieDiscretization(geometry=geometry, params=params, points=points,
                             speeds=speeds, gammas=gammas, weights=weights,
                             system=system)


def _lifting_matrix(points: np.ndarray, basis: FourierBasisSet) -> np.ndarray:
    """u0(x, f_n) for every node and basis mode, shape (M, |basis|)."""
    z = points[:, 0] + 1j * points[:, 1]
    if np.any(np.abs(z) >= 1.0):
        raise ValueError("inclusion nodes must lie strictly inside the unit disk")
    cols = [z ** n if n >= 0 else np.conj(z) ** (-n) for n in basis.indices]
    return np.column_stack(cols)


def solve_traces(disc: BieDiscretization, basis: FourierBasisSet) -> np.ndarray:
    """Boundary traces of u for every basis voltage, shape (M, |basis|)."""
    rhs = _lifting_matrix(disc.points, basis)
    try:
        return np.linalg.solve(disc.system, rhs)
    except np.linalg.LinAlgError as exc:
        raise RuntimeError("second-kind system is singular: %s" % exc) from exc


def solve_trace(geometry: Geometry, gamma: RobinCoefficient, mode: int,
                nodes: int = 128) -> np.ndarray:
    """Trace of the transmission solution for the single voltage mode.

    Returns psi sampled at the discretization nodes (component by component
    for small-disc unions).
    """
    disc = discretize(geometry, gamma, nodes)
    return solve_traces(disc, FourierBasisSet(indices=(mode,)))[:, 0]


def _gap_from_traces(disc: BieDiscretization, traces: np.ndarray,
                     grid: BoundaryGrid) -> np.ndarray:
    """Gap currents at the boundary grid from trace samples, (|basis|, K)."""
    flux = poisson_normal_derivative(disc.points[:, None, :],
                                     grid.thetas[None, :])
    dens = (disc.gammas * disc.speeds * disc.weights)[:, None] * traces
    return -(dens.T @ flux)


def current_gap_matrix(geometry: Geometry, gamma: RobinCoefficient,
                       basis: FourierBasisSet, grid: BoundaryGrid,
                       nodes: int = 128) -> CurrentGapMatrix:
    """Full-solve gap data for every basis voltage at the boundary nodes."""
    disc = discretize(geometry, gamma, nodes)
    traces = solve_traces(disc, basis)
    vals = _gap_from_traces(disc, traces, grid)
    return CurrentGapMatrix(values=vals, grid=grid, provenance="bie",
                            basis=basis)


def current_gap(geometry: Geometry, gamma: RobinCoefficient, mode: int,
                grid: BoundaryGrid, nodes: int = 128) -> np.ndarray:
    """Gap current of a single voltage mode at the boundary grid nodes."""
    basis = FourierBasisSet(indices=(mode,))
    return current_gap_matrix(geometry, gamma, basis, grid, nodes).values[0]


def born_current_gap_matrix(geometry: Geometry, gamma: RobinCoefficient,
                            basis: FourierBasisSet, grid: BoundaryGrid,
                            nodes: int = 32) -> CurrentGapMatrix:
    """Born-approximation gap data: the trace is replaced by the lifting.

    Skips the solve entirely; exact up to quadrature for gamma -> 0 and the
    leading term of the small-volume expansion otherwise.
    """
    disc = discretize_quadrature_only(geometry, gamma, nodes)
    traces = _lifting_matrix(disc.points, basis)
    vals = _gap_from_traces(disc, traces, grid)
    return CurrentGapMatrix(values=vals, grid=grid, provenance="born",
                            basis=basis)


def born_current_gap(geometry: Geometry, gamma: RobinCoefficient, mode: int,
                     grid: BoundaryGrid, nodes: int = 32) -> np.ndarray:
    basis = FourierBasisSet(indices=(mode,))
    return born_current_gap_matrix(geometry, gamma, basis, grid, nodes).values[0]


def discretize_quadrature_only(geometry: Geometry, gamma: RobinCoefficient,
                               nodes: int = 32) -> BieDiscretization:
    """Node/weight layout without assembling the dense system.

    Sufficient for the Born and moment quadratures, which never invert
    anything.
    """
    if nodes < 4:
        raise ValueError("need at least 4 quadrature nodes")
    n_comp = _component_count(geometry)
    t = TWO_PI * np.arange(nodes) / nodes
    params, points, speeds, gammas = [], [], [], []
    for c in range(n_comp):
        p, s, _ = boundary_curve(geometry, t, component=c)
        params.append(t)
        points.append(p)
        speeds.append(s)
        gammas.append(gamma.samples(t))
    total = n_comp * nodes
    return BieDiscretization(geometry=geometry, params=np.concatenate(params),
                             points=np.vstack(points),
                             speeds=np.concatenate(speeds),
                             gammas=np.concatenate(gammas),
                             weights=np.full(total, TWO_PI / nodes),
                             system=np.empty((0, 0)))


def asymptotic_current_gap_matrix(geometry: SmallDiscs,
                                  gamma: RobinCoefficient,
                                  basis: FourierBasisSet, grid: BoundaryGrid,
                                  nodes: int = 32) -> CurrentGapMatrix:
    """Leading-order small-volume gap data.

    gap(f, theta_z) ~= -eps * sum_j |dB_j| avg(gamma_j) u0(x_j, f)
                       dG/dnu(x_j, theta_z),
    with |dB_j| the unscaled component circumference and avg the arclength
    average of gamma over the component boundary.
    """
    if not isinstance(geometry, SmallDiscs):
        raise TypeError("asymptotic data is defined for small-disc unions")
    t = TWO_PI * np.arange(nodes) / nodes
    centers = geometry.centers()
    vals = np.zeros((basis.size, grid.size), dtype=complex)
    if geometry.count == 0:
        return CurrentGapMatrix(values=vals, grid=grid,
                                provenance="asymptotic", basis=basis)
    flux = poisson_normal_derivative(centers[:, None, :], grid.thetas[None, :])
    lift = _lifting_matrix(centers, basis)          # (J, |basis|)
    for j, (_, scale) in enumerate(geometry.components):
        avg_gamma = float(np.mean(gamma.samples(t)))
        strength = geometry.epsilon * (TWO_PI * scale) * avg_gamma
        vals += -strength * lift[j][:, None] * flux[j][None, :]
    return CurrentGapMatrix(values=vals, grid=grid, provenance="asymptotic",
                            basis=basis)


def asymptotic_current_gap(geometry: SmallDiscs, gamma: RobinCoefficient,
                           mode: int, grid: BoundaryGrid) -> np.ndarray:
    basis = FourierBasisSet(indices=(mode,))
    return asymptotic_current_gap_matrix(geometry, gamma, basis, grid).values[0]


@dataclass(frozen=True)
class ScalingReport:
    """Frobenius data norms of the three forward paths across scales."""

    epsilons: np.ndarray
    norm_born: np.ndarray
    norm_full_minus_born: np.ndarray
    norm_full_minus_asymptotic: np.ndarray

    def born_slope(self) -> float:
        return float(np.polyfit(np.log(self.epsilons),
                                np.log(self.norm_born), 1)[0])

    def correction_slope(self) -> float:
        return float(np.polyfit(np.log(self.epsilons),
                                np.log(self.norm_full_minus_born), 1)[0])

    def rows(self):
        for i, eps in enumerate(self.epsilons):
            yield (float(eps), float(self.norm_born[i]),
                   float(self.norm_full_minus_born[i]),
                   float(self.norm_full_minus_asymptotic[i]))


def asymptotic_scaling_report(components, gamma: RobinCoefficient,
                              epsilons, basis: FourierBasisSet | None = None,
                              grid: BoundaryGrid | None = None,
                              nodes: int = 32) -> ScalingReport:
    """Empirical scaling of the Born and asymptotic errors in the scale eps.

    For each eps the small-disc union is rebuilt with the given components,
    the full gap data is computed by boundary-integral solves on every disc
    boundary, and the Born/asymptotic paths are differenced against it in
    the Frobenius norm.
    """
    basis = FourierBasisSet.lowpass(20) if basis is None else basis
    grid = BoundaryGrid(64) if grid is None else grid
    epsilons = np.asarray(sorted(float(e) for e in epsilons))
    if epsilons.size < 2:
        raise ValueError("need at least two scales to fit slopes")
    nb, nfb, nfa = [], [], []
    for eps in epsilons:
        geo = SmallDiscs(components=tuple(components), epsilon=float(eps))
        full = current_gap_matrix(geo, gamma, basis, grid, nodes).values
        born = born_current_gap_matrix(geo, gamma, basis, grid, nodes).values
        asym = asymptotic_current_gap_matrix(geo, gamma, basis, grid).values
        nb.append(np.linalg.norm(born))
        nfb.append(np.linalg.norm(full - born))
        nfa.append(np.linalg.norm(full - asym))
    return ScalingReport(epsilons=epsilons, norm_born=np.array(nb),
                         norm_full_minus_born=np.array(nfb),
                         norm_full_minus_asymptotic=np.array(nfa))


def nodal_current_gap_matrix(geometry: Geometry, gamma: RobinCoefficient,
                             grid: BoundaryGrid, max_order: int = 30,
                             nodes: int = 128) -> CurrentGapMatrix:
    """K x K nodal form of the gap operator from full solves.

    Columns of the symmetric voltage basis |n| <= max_order are solved for,
    then recombined against the discrete Fourier coefficients of nodal
    voltage samples:

        A[j, k] = (1/K) sum_n gap_n(theta_j) exp(-i n theta_k).

    Requires 2*max_order < K so that no retained mode aliases on the grid.
    """
    if 2 * max_order >= grid.size:
        raise ValueError("grid must resolve the voltage basis (K > 2*max_order)")
    basis = FourierBasisSet.symmetric(max_order)
    data = current_gap_matrix(geometry, gamma, basis, grid, nodes)
    modes = basis.evaluate(grid.thetas)             # (|basis|, K)
    vals = data.values.T @ modes.conj() / grid.size
    return CurrentGapMatrix(values=vals, grid=grid, provenance="bie-nodal")
