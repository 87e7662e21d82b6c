"""Unit-cell decomposition of the plane and the shared discretization grid.

The plane is tiled by half-open unit squares centered at the integer
lattice: the cell of ``nu = j + ik`` is ``[j-1/2, j+1/2) x [k-1/2, k+1/2)``.
Half-open cells (closed on the lower-left sides) guarantee that every point
of the plane belongs to exactly one cell, so atomic masses binned by cell
are counted exactly once.  Disks are open throughout.

All other modules discretize through this one: squares are integrated with
a Richardson-extrapolated tensor midpoint rule, disks with a polar midpoint
rule (exact for constants), and bulk disk-mass fields are produced by
convolving grid samples with a kernel of exact cell/disk intersection
areas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterator, NamedTuple

import numpy as np
from scipy.signal import fftconvolve


class LatticePoint(NamedTuple):
    """The lattice point nu = j + ik, viewed as a point of the plane."""

    j: int
    k: int

    @property
    def z(self) -> complex:
        return complex(self.j, self.k)

    @property
    def abs(self) -> float:
        return math.hypot(self.j, self.k)


@dataclass(frozen=True)
class Cell:
    """Half-open unit square centered at a lattice point.

    Closed on the left/bottom edges, open on the right/top ones, so the
    cells over all lattice points tile the plane without overlap.
    """

    center: LatticePoint

    @property
    def x0(self) -> float:
        return self.center.j - 0.5

    @property
    def x1(self) -> float:
        return self.center.j + 0.5

    @property
    def y0(self) -> float:
        return self.center.k - 0.5

    @property
    def y1(self) -> float:
        return self.center.k + 0.5

    def contains(self, z: complex) -> bool:
        return self.x0 <= z.real < self.x1 and self.y0 <= z.imag < self.y1


@dataclass(frozen=True)
class Window:
    """Finite block of cells with max(|j|, |k|) <= n_max."""

    n_max: int

    def __post_init__(self) -> None:
        if self.n_max < 0:
            raise ValueError("n_max must be >= 0")

    @property
    def count(self) -> int:
        return (2 * self.n_max + 1) ** 2

    @property
    def half_extent(self) -> float:
        """Half side length of the union of the window's cells."""
        return self.n_max + 0.5

    def contains(self, nu: LatticePoint) -> bool:
        return max(abs(nu.j), abs(nu.k)) <= self.n_max

    def points(self) -> Iterator[LatticePoint]:
        """Window lattice points in fixed row-major order (j, then k)."""
        for j in range(-self.n_max, self.n_max + 1):
            for k in range(-self.n_max, self.n_max + 1):
                yield LatticePoint(j, k)


def _default_window() -> Window:
    return Window(12)


@dataclass(frozen=True)
class GridSpec:
    """All discretization choices: node spacing, truncation radius, window."""

    step: float = 0.05
    radius: float = 16.0
    window: Window = field(default_factory=_default_window)

    def __post_init__(self) -> None:
        if self.step <= 0:
            raise ValueError("step must be positive")
        if self.radius < self.window.n_max + 2:
            raise ValueError("radius must be >= window n_max + 2")


def default_grid() -> GridSpec:
    return GridSpec()


def cell_of(z: complex) -> LatticePoint:
    """The unique lattice point whose half-open cell contains z."""
    z = complex(z)
    return LatticePoint(math.floor(z.real + 0.5), math.floor(z.imag + 0.5))


def dist_to_cell(z: complex, nu: LatticePoint) -> float:
    """Euclidean distance from z to the closed cell of nu."""
    z = complex(z)
    dx = max(nu.j - 0.5 - z.real, 0.0, z.real - (nu.j + 0.5))
    dy = max(nu.k - 0.5 - z.imag, 0.0, z.imag - (nu.k + 0.5))
    return math.hypot(dx, dy)


def covering_cells(z: complex, radius: float) -> list[LatticePoint]:
    """Lattice points whose closed cell meets the open disk D(z, radius).

    Equivalently: the closed cell contains a point at distance < radius
    from z.  Returned in row-major order.
    """
    if radius <= 0:
        raise ValueError("radius must be positive")
    z = complex(z)
    j_lo = math.floor(z.real - radius)
    j_hi = math.ceil(z.real + radius)
    k_lo = math.floor(z.imag - radius)
    k_hi = math.ceil(z.imag + radius)
    out = []
    for j in range(j_lo, j_hi + 1):
        for k in range(k_lo, k_hi + 1):
            nu = LatticePoint(j, k)
            if dist_to_cell(z, nu) < radius:
                out.append(nu)
    return out


# ---------------------------------------------------------------------------
# quadrature primitives
# ---------------------------------------------------------------------------


def node_axis(half_extent: float, step: float) -> np.ndarray:
    """Midpoint nodes covering [-half_extent, half_extent] at ~step spacing."""
    n = max(2, int(round(2.0 * half_extent / step)))
    h = 2.0 * half_extent / n
    return -half_extent + (np.arange(n) + 0.5) * h


def plane_nodes(grid: GridSpec, half_extent: float | None = None):
    """Complex node grid and cell area for plane integrals.

    Returns ``(Z, dA)`` where Z is a 2-D complex array of midpoint nodes
    covering the square of the given half extent (defaults to the
    truncation radius) and dA is the per-node area weight.
    """
    L = grid.radius if half_extent is None else half_extent
    xs = node_axis(L, grid.step)
    h = xs[1] - xs[0]
    Z = xs[:, None] + 1j * xs[None, :]
    return Z, float(h * h)


def square_nodes(z: complex, t: float, step: float, refine: int = 1):
    """Tensor midpoint nodes over the square Q_t(z)."""
    n = max(4, int(round(t / step))) * refine
    h = t / n
    ax = (np.arange(n) + 0.5) * h - t / 2.0
    Z = complex(z) + ax[:, None] + 1j * ax[None, :]
    return Z, float(h * h)


def polar_disk_nodes(z: complex, r: float, step: float):
    """Polar midpoint nodes over the open disk D(z, r).

    Returns ``(Z, weights)`` with weights summing exactly to pi*r^2, so
    constants integrate exactly.
    """
    n_rho = max(8, int(math.ceil(r / step)))
    n_th = max(16, int(math.ceil(2.0 * math.pi * r / step)))
    d_rho = r / n_rho
    d_th = 2.0 * math.pi / n_th
    rho = (np.arange(n_rho) + 0.5) * d_rho
    th = (np.arange(n_th) + 0.5) * d_th
    Z = complex(z) + rho[:, None] * np.exp(1j * th)[None, :]
    weights = np.broadcast_to((rho * d_rho * d_th)[:, None], Z.shape)
    return Z, weights


def circle_rect_area(cx: float, cy: float, r: float,
                     x0: float, x1: float, y0: float, y1: float) -> float:
    """Exact area of the disk D((cx, cy), r) intersected with a rectangle.

    Piecewise closed form: the x-range is split at the abscissas where the
    circle crosses the horizontal rectangle edges, and on each piece the
    strip height is one of y1-y0, y1+g, g-y0 or 2g with g = sqrt(r^2-x^2),
    all of which integrate in closed form.
    """
    x0, x1, y0, y1 = x0 - cx, x1 - cx, y0 - cy, y1 - cy
    x0, x1 = max(x0, -r), min(x1, r)
    if x0 >= x1 or y0 >= r or y1 <= -r or y0 >= y1:
        return 0.0

    def anti(u: float) -> float:
        # antiderivative of sqrt(r^2 - u^2)
        u = min(max(u, -r), r)
        return 0.5 * (u * math.sqrt(max(r * r - u * u, 0.0))
                      + r * r * math.asin(u / r))

    breaks = {x0, x1}
    for yy in (y0, y1):
        if abs(yy) < r:
            u = math.sqrt(r * r - yy * yy)
            for s in (-u, u):
                if x0 < s < x1:
                    breaks.add(s)
    pts = sorted(breaks)
    total = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        m = 0.5 * (a + b)
        g = math.sqrt(max(r * r - m * m, 0.0))
        top_clipped = y1 < g
        bot_clipped = y0 > -g
        if min(y1, g) <= max(y0, -g):
            continue
        if top_clipped and bot_clipped:
            total += (y1 - y0) * (b - a)
        elif top_clipped:
            total += y1 * (b - a) + (anti(b) - anti(a))
        elif bot_clipped:
            total += (anti(b) - anti(a)) - y0 * (b - a)
        else:
            total += 2.0 * (anti(b) - anti(a))
    return total


def disk_area_kernel(step: float, r: float = 1.0) -> np.ndarray:
    """Convolution kernel of exact cell/disk intersection areas.

    Entry (i, j) is the area of the step-sized grid cell centered at
    ``(offs[i], offs[j])`` inside D(0, r); the entries sum to pi*r^2.
    Convolving grid samples of a density with this kernel yields the
    density's disk masses at every node at once.
    """
    m = int(math.ceil(r / step)) + 1
    offs = np.arange(-m, m + 1) * step
    K = np.zeros((offs.size, offs.size))
    h2 = step / 2.0
    for i, ox in enumerate(offs):
        for j, oy in enumerate(offs):
            # cheap classification before the exact formula
            d_far = math.hypot(abs(ox) + h2, abs(oy) + h2)
            if d_far <= r:
                K[i, j] = step * step
                continue
            d_near = math.hypot(max(abs(ox) - h2, 0.0), max(abs(oy) - h2, 0.0))
            if d_near >= r:
                continue
            K[i, j] = circle_rect_area(0.0, 0.0, r,
                                       ox - h2, ox + h2, oy - h2, oy + h2)
    return K


def disk_mass_field(values: np.ndarray, step: float, r: float = 1.0) -> np.ndarray:
    """Disk masses of a sampled density at all nodes via FFT convolution."""
    K = disk_area_kernel(step, r)
    return fftconvolve(values, K, mode="same")


class BilinearField:
    """Values on a uniform node grid with bilinear interpolation.

    Evaluation clamps to the grid hull; callers are expected to stay
    inside the sampled region.
    """

    def __init__(self, xs: np.ndarray, values: np.ndarray):
        self.xs = xs
        self.values = values
        self._h = float(xs[1] - xs[0])

    def __call__(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        fx = np.clip((z.real - self.xs[0]) / self._h, 0, self.xs.size - 1.001)
        fy = np.clip((z.imag - self.xs[0]) / self._h, 0, self.xs.size - 1.001)
        ix = fx.astype(int)
        iy = fy.astype(int)
        tx = fx - ix
        ty = fy - iy
        v = self.values
        return ((1 - tx) * (1 - ty) * v[ix, iy]
                + tx * (1 - ty) * v[ix + 1, iy]
                + (1 - tx) * ty * v[ix, iy + 1]
                + tx * ty * v[ix + 1, iy + 1])


def divergence_windows(n_max: int) -> list[int]:
    """Nested sub-windows used for window-growth (divergence) traces."""
    ns = sorted({max(1, n_max // 8), max(2, n_max // 4),
                 max(3, n_max // 2), n_max})
    return [n for n in ns if n <= n_max]
