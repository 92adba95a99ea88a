"""Shared data model: boundary/sampling grids, inclusion geometries, Robin
coefficients, Fourier voltage bases, and the containers passed between the
forward solvers and the reconstruction algorithms.

Everything lives inside the open unit disk: voltages are applied on the unit
circle and the inclusion sits strictly inside it.  All functions here are
pure; instances are frozen dataclasses safe to share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# grids


@dataclass(frozen=True)
class BoundaryGrid:
    """Equispaced quadrature nodes on the unit circle.

    Nodes are theta_k = 2*pi*k/K with uniform weights 2*pi/K, the natural
    (spectrally accurate) rule for smooth periodic integrands.
    """

    size: int

    def __post_init__(self):
        if self.size < 4:
            raise ValueError("boundary grid needs at least 4 nodes")

    @property
    def thetas(self) -> np.ndarray:
        return TWO_PI * np.arange(self.size) / self.size

    @property
    def weights(self) -> np.ndarray:
        return np.full(self.size, TWO_PI / self.size)

    def points(self) -> np.ndarray:
        """Node coordinates on the unit circle, shape (K, 2)."""
        t = self.thetas
        return np.column_stack([np.cos(t), np.sin(t)])


@dataclass(frozen=True)
class SamplingGrid:
    """Rectangular sampling lattice clipped to the open unit disk.

    ``x`` and ``y`` are the 1-D axes; ``mask[i, j]`` is True when the point
    (x[i], y[j]) is kept.  Points with |z| >= 1 - margin are discarded so
    that every retained sampling point lies strictly inside the disk.
    """

    x: np.ndarray
    y: np.ndarray
    mask: np.ndarray

    def __post_init__(self):
        if self.mask.shape != (self.x.size, self.y.size):
            raise ValueError("mask shape must be (len(x), len(y))")
        xx, yy = np.meshgrid(self.x, self.y, indexing="ij")
        rr = np.hypot(xx, yy)
        if np.any(rr[self.mask] >= 1.0):
            raise ValueError("sampling points must satisfy |z| < 1")

    @classmethod
    def from_step(cls, step: float = 0.0202, bounds: tuple[float, float] = (-1.0, 1.0),
                  margin: float | None = None) -> "SamplingGrid":
        """Lattice with the given step over ``bounds`` squared.

        ``margin`` defaults to ``step``; points with |z| >= 1 - margin are
        dropped.
        """
        if step <= 0:
            raise ValueError("step must be positive")
        lo, hi = bounds
        n = int(math.floor((hi - lo) / step + 1e-12)) + 1
        axis = lo + step * np.arange(n)
        axis = axis[axis <= hi + 1e-12]
        margin = step if margin is None else margin
        xx, yy = np.meshgrid(axis, axis, indexing="ij")
        mask = np.hypot(xx, yy) < 1.0 - margin
        return cls(x=axis, y=axis.copy(), mask=mask)

    @property
    def shape(self) -> tuple[int, int]:
        return self.mask.shape

    def points(self) -> np.ndarray:
        """Retained points, shape (n_points, 2), in row-major (x, y) order."""
        xx, yy = np.meshgrid(self.x, self.y, indexing="ij")
        return np.column_stack([xx[self.mask], yy[self.mask]])


# ---------------------------------------------------------------------------
# inclusion geometries


@dataclass(frozen=True)
class ConcentricDisc:
    """Disc of radius rho centered at the origin, 0 < rho < 1."""

    radius: float

    def __post_init__(self):
        if not 0.0 < self.radius < 1.0:
            raise ValueError("concentric disc radius must lie in (0, 1)")


@dataclass(frozen=True)
class StarShaped:
    """Star-shaped inclusion x(theta) = rho(theta) (cos theta, sin theta).

    ``rho`` and its derivative ``drho`` must be smooth and 2*pi periodic,
    with 0 < rho(theta) < 1 everywhere.
    """

    rho: Callable[[np.ndarray], np.ndarray]
    drho: Callable[[np.ndarray], np.ndarray]

    def __post_init__(self):
        t = np.linspace(0.0, TWO_PI, 720, endpoint=False)
        r = np.asarray(self.rho(t), dtype=float)
        if r.min() <= 0.0:
            raise ValueError("radial profile must be strictly positive")
        if r.max() >= 1.0:
            raise ValueError("radial profile must stay inside the unit disk")

    @classmethod
    def cosine(cls, base: float, amplitude: float, frequency: int) -> "StarShaped":
        """Profile rho(theta) = base * (1 + amplitude*cos(frequency*theta))."""
        def rho(t):
            return base * (1.0 + amplitude * np.cos(frequency * np.asarray(t)))

        def drho(t):
            return -base * amplitude * frequency * np.sin(frequency * np.asarray(t))

        return cls(rho=rho, drho=drho)


@dataclass(frozen=True)
class SmallDiscs:
    """Finitely many well separated small discs D_j = x_j + eps*r_j*B(0,1).

    ``components`` holds (center, shape radius scale) pairs; ``epsilon`` is
    the common smallness scale.  Validity demands pairwise disjoint closures
    and a positive distance to the unit circle.
    """

    components: tuple[tuple[tuple[float, float], float], ...]
    epsilon: float

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if not self.components:
            object.__setattr__(self, "components", tuple())
        comps = tuple((tuple(map(float, c)), float(r)) for c, r in self.components)
        object.__setattr__(self, "components", comps)
        for (c, r) in comps:
            if r <= 0:
                raise ValueError("component radius scale must be positive")
            if math.hypot(*c) + self.epsilon * r >= 1.0:
                raise ValueError("component %r touches or leaves the unit disk" % (c,))
        for i in range(len(comps)):
            for j in range(i + 1, len(comps)):
                (ci, ri), (cj, rj) = comps[i], comps[j]
                gap = math.dist(ci, cj) - self.epsilon * (ri + rj)
                if gap <= 0:
                    raise ValueError("components %d and %d overlap" % (i, j))

    @property
    def count(self) -> int:
        return len(self.components)

    def centers(self) -> np.ndarray:
        return np.array([c for c, _ in self.components], dtype=float)

    def disc_radius(self, j: int) -> float:
        return self.epsilon * self.components[j][1]


Geometry = ConcentricDisc | StarShaped | SmallDiscs


# ---------------------------------------------------------------------------
# Robin coefficient


@dataclass(frozen=True)
class RobinCoefficient:
    """Transmission coefficient gamma as a function of the boundary parameter.

    The jump of the normal flux across the inclusion boundary equals
    gamma * u there; gamma must be strictly positive.
    """

    fn: Callable[[np.ndarray], np.ndarray]
    label: str = "custom"

    def __call__(self, theta):
        if np.ndim(theta) == 0:
            return float(self.fn(float(theta)))
        return self.samples(np.asarray(theta, dtype=float))

    def samples(self, thetas: np.ndarray) -> np.ndarray:
        vals = np.asarray(self.fn(np.asarray(thetas, dtype=float)), dtype=float)
        return np.broadcast_to(vals, np.shape(thetas)).astype(float)

    def validate(self) -> None:
        t = np.linspace(0.0, TWO_PI, 720, endpoint=False)
        if self.samples(t).min() <= 0.0:
            raise ValueError("Robin coefficient must be strictly positive")

    @classmethod
    def constant(cls, value: float) -> "RobinCoefficient":
        value = float(value)
        return cls(fn=lambda t: np.full(np.shape(t), value) if np.ndim(t) else value,
                   label="constant(%g)" % value)

    @classmethod
    def exp_cos(cls) -> "RobinCoefficient":
        """Smooth strictly positive profile 1 / (4 + exp(cos theta))."""
        return cls(fn=lambda t: 1.0 / (4.0 + np.exp(np.cos(t))), label="exp_cos")

    @classmethod
    def tabulated(cls, values: Sequence[float]) -> "RobinCoefficient":
        """Periodic linear interpolation of samples at equispaced parameters."""
        vals = np.asarray(values, dtype=float)
        if vals.size < 2:
            raise ValueError("tabulated coefficient needs at least two samples")
        nodes = TWO_PI * np.arange(vals.size + 1) / vals.size
        closed = np.append(vals, vals[0])

        def fn(t):
            return np.interp(np.mod(t, TWO_PI), nodes, closed)

        return cls(fn=fn, label="tabulated(%d)" % vals.size)


# ---------------------------------------------------------------------------
# Fourier voltage basis


@dataclass(frozen=True)
class FourierBasisSet:
    """Ordered set of Fourier voltage modes f_n(theta) = exp(i n theta)."""

    indices: tuple[int, ...]
    kind: str = "custom"

    def __post_init__(self):
        if len(set(self.indices)) != len(self.indices):
            raise ValueError("basis indices must be distinct")
        object.__setattr__(self, "indices", tuple(int(n) for n in self.indices))

    @classmethod
    def lowpass(cls, max_order: int) -> "FourierBasisSet":
        """Modes n = 0, 1, ..., max_order (the localization basis)."""
        if max_order < 0:
            raise ValueError("max_order must be nonnegative")
        return cls(indices=tuple(range(max_order + 1)), kind="lowpass")

    @classmethod
    def symmetric(cls, max_order: int) -> "FourierBasisSet":
        """Modes |n| <= max_order, ordered -max_order, ..., max_order."""
        if max_order < 0:
            raise ValueError("max_order must be nonnegative")
        return cls(indices=tuple(range(-max_order, max_order + 1)), kind="symmetric")

    @property
    def size(self) -> int:
        return len(self.indices)

    def evaluate(self, thetas: np.ndarray) -> np.ndarray:
        """Matrix of basis samples, shape (len(indices), len(thetas))."""
        n = np.asarray(self.indices)[:, None]
        return np.exp(1j * n * np.asarray(thetas)[None, :])


# ---------------------------------------------------------------------------
# data containers


@dataclass(frozen=True)
class CurrentGapMatrix:
    """Sampled current-gap data on a boundary grid.

    Two layouts are used.  With ``basis`` set, ``values[p, k]`` is the gap
    current of voltage ``basis.indices[p]`` at boundary node k (shape
    |basis| x K).  With ``basis`` None the matrix is the nodal K x K
    collocation form mapping voltage samples to gap-current samples.
    """

    values: np.ndarray
    grid: BoundaryGrid
    provenance: str
    basis: FourierBasisSet | None = None

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        object.__setattr__(self, "values", vals)
        rows = self.basis.size if self.basis is not None else self.grid.size
        if vals.shape != (rows, self.grid.size):
            raise ValueError("data shape %r does not match grid/basis" % (vals.shape,))

    @property
    def nodal(self) -> bool:
        return self.basis is None


@dataclass(frozen=True)
class IndicatorField:
    """Reconstruction field W over a sampling grid.

    ``values`` has the grid's full rectangular shape with NaN at masked-out
    points; retained values lie in (0, 1] after normalization.
    """

    grid: SamplingGrid
    values: np.ndarray
    method: str
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != self.grid.shape:
            raise ValueError("field shape must match the sampling grid")
        object.__setattr__(self, "values", vals)

    def masked_values(self) -> np.ndarray:
        return self.values[self.grid.mask]


# ---------------------------------------------------------------------------
# harmonic lifting and boundary parametrization


def harmonic_lifting(x, n: int):
    """Harmonic extension of the voltage exp(i n theta) evaluated at x.

    For x = r (cos t, sin t) inside the open unit disk the value is
    r^|n| exp(i n t); as a function of x this is z^n for n >= 0 and
    conj(z)^|n| for n < 0, with z = x1 + i x2.

    Args:
        x: point(s) in the open unit disk, shape (..., 2).
        n: integer Fourier mode.

    Returns:
        complex scalar or array of shape (...).

    Raises:
        ValueError: if any point lies on or outside the unit circle.
    """
    pts = np.asarray(x, dtype=float)
    if pts.shape[-1] != 2:
        raise ValueError("points must have shape (..., 2)")
    z = pts[..., 0] + 1j * pts[..., 1]
    if np.any(np.abs(z) >= 1.0):
        raise ValueError("harmonic lifting is defined strictly inside the unit disk")
    n = int(n)
    out = z ** n if n >= 0 else np.conj(z) ** (-n)
    return out if out.ndim else complex(out)


def boundary_curve(geometry: Geometry, theta, component: int = 0):
    """Parametrization data of the inclusion boundary at parameter theta.

    Args:
        geometry: inclusion geometry; for SmallDiscs, ``component`` selects
            which disc boundary is parametrized.
        theta: parameter value(s).

    Returns:
        (point, speed, normal): boundary point(s) of shape (..., 2), tangent
        speed |x'(theta)| and outward unit normal of matching shape.
    """
    t = np.asarray(theta, dtype=float)
    ct, st = np.cos(t), np.sin(t)
    if isinstance(geometry, ConcentricDisc):
        r = geometry.radius
        point = np.stack([r * ct, r * st], axis=-1)
        speed = np.broadcast_to(np.asarray(r, dtype=float), t.shape).copy()
        normal = np.stack([ct, st], axis=-1)
    elif isinstance(geometry, StarShaped):
        r = np.asarray(geometry.rho(t), dtype=float)
        dr = np.asarray(geometry.drho(t), dtype=float)
        point = np.stack([r * ct, r * st], axis=-1)
        # x'(t) = dr*(cos,sin) + r*(-sin,cos); outward normal is the tangent
        # rotated clockwise for a counterclockwise parametrization.
        tx = dr * ct - r * st
        ty = dr * st + r * ct
        speed = np.hypot(tx, ty)
        normal = np.stack([ty / speed, -tx / speed], axis=-1)
    elif isinstance(geometry, SmallDiscs):
        (cx, cy), scale = geometry.components[component]
        a = geometry.epsilon * scale
        point = np.stack([cx + a * ct, cy + a * st], axis=-1)
        speed = np.broadcast_to(np.asarray(a, dtype=float), t.shape).copy()
        normal = np.stack([ct, st], axis=-1)
    else:
        raise TypeError("unsupported geometry %r" % type(geometry).__name__)
    if t.ndim == 0:
        return point.reshape(2), float(speed), normal.reshape(2)
    return point, speed, normal
