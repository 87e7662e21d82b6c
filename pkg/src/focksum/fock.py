"""Fock-space primitives: kernels, test functions, pairing, Berezin transform.

Every integrand here is assembled from the bounded Gaussian profile
e^{-(a/2)|z-u|^2}; the raw kernel e^{a Re(conj(u) z)} is never exponentiated
on its own, because at the default truncation radius it overflows double
precision long before the profile stops mattering.  Norms of kernels are
therefore carried around as logarithms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from scipy.special import erf, logsumexp

from .errors import DomainError, TruncationTooTight
from .lattice import GridSpec, LatticePoint, Window, plane_nodes, polar_disk_nodes
from .measures import Measure, measure_cell_masses
from .weights import Weight, averaged_weight, cell_mass_table, mass_on_disk


@dataclass(frozen=True)
class KernelFunction:
    """The reproducing kernel K_u(z) = e^{a conj(u) z} of the Gaussian pairing."""

    u: complex
    alpha: float

    def log_modulus(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        return self.alpha * (np.conj(self.u) * z).real

    def weighted_modulus(self, z) -> np.ndarray:
        """|K_u(z)| e^{-(a/2)|z|^2} e^{-(a/2)|u|^2} = e^{-(a/2)|z-u|^2} <= 1."""
        z = np.asarray(z, dtype=complex)
        return np.exp(-0.5 * self.alpha * np.abs(z - self.u) ** 2)


@dataclass(frozen=True)
class KernelNorm:
    """log of the p-th power of a kernel norm, with its two-sided proxy.

    ``direct`` is the truncated-plane quadrature of
    |K_u|^p e^{-(pa/2)|z|^2} w; ``proxy`` is e^{(pa/2)|u|^2} w(D(u,1)).
    Both are kept in the log domain; the ratio is always finite.
    """

    log_direct: float
    log_proxy: float
    p: float

    @property
    def direct(self) -> float:
        return math.exp(self.log_direct)

    @property
    def proxy(self) -> float:
        return math.exp(self.log_proxy)

    @property
    def ratio(self) -> float:
        return math.exp(self.log_direct - self.log_proxy)

    @property
    def log_norm(self) -> float:
        """log of the norm itself (the p-th root of the direct value)."""
        return self.log_direct / self.p


def kernel_norm(u: complex, p: float, alpha: float, w: Weight,
                grid: GridSpec) -> KernelNorm:
    """Kernel norm by quadrature next to its closed-form-style proxy."""
    u = complex(u)
    if abs(u) + 3.0 > grid.radius:
        raise DomainError(f"|u|={abs(u):g} too close to the truncation radius")
    Z, dA = plane_nodes(grid)
    profile = -0.5 * p * alpha * np.abs(Z - u) ** 2 + w.log_density(Z)
    peak = float(np.max(profile))
    boundary = max(float(np.max(profile[0, :])), float(np.max(profile[-1, :])),
                   float(np.max(profile[:, 0])), float(np.max(profile[:, -1])))
    if boundary > peak + math.log(1e-10):
        raise TruncationTooTight(
            f"integrand at |z|={grid.radius:g} is within 1e-10 of its peak")
    log_integral = float(logsumexp(profile)) + math.log(dA)
    log_direct = 0.5 * p * alpha * abs(u) ** 2 + log_integral
    log_proxy = (0.5 * p * alpha * abs(u) ** 2
                 + math.log(mass_on_disk(w, u, 1.0, grid)))
    return KernelNorm(log_direct, log_proxy, p)


@dataclass
class TestFunction:
    """Finite combination of normalized kernels over window lattice points.

    Stores the coefficients, the log kernel norms used as normalizers, and
    enough context to evaluate the bounded weighted values
    f(z) e^{-(a/2)|z|^2} anywhere on the plane.
    """

    coefficients: dict
    log_normalizers: dict
    alpha: float
    p: float
    weight: Weight

    def __post_init__(self) -> None:
        for nu in self.coefficients:
            if nu not in self.log_normalizers:
                raise ValueError(f"missing normalizer for {nu}")
            if not math.isfinite(self.log_normalizers[nu]):
                raise ValueError(f"normalizer for {nu} is not positive/finite")

    @property
    def support(self) -> list[LatticePoint]:
        return sorted(self.coefficients)

    def weighted_values(self, z) -> np.ndarray:
        """f(z) e^{-(a/2)|z|^2}, safe to evaluate anywhere."""
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape, dtype=complex)
        for nu in self.support:
            c = self.coefficients[nu]
            if c == 0:
                continue
            scale = math.exp(0.5 * self.alpha * abs(nu.z) ** 2
                             - self.log_normalizers[nu])
            phase = self.alpha * (np.conj(nu.z) * z).imag
            out += (c * scale
                    * np.exp(-0.5 * self.alpha * np.abs(z - nu.z) ** 2
                             + 1j * phase))
        return out


def synthesize_test_function(c: dict, p: float, alpha: float, w: Weight,
                             grid: GridSpec) -> TestFunction:
    """Build sum_nu c_nu K_nu / ||K_nu|| with quadrature normalizers."""
    normalizers = {}
    for nu, coeff in c.items():
        if not grid.window.contains(nu):
            raise DomainError(f"support point {nu} outside the window")
        normalizers[nu] = kernel_norm(nu.z, p, alpha, w, grid).log_norm
    return TestFunction(dict(c), normalizers, alpha, p, w)


def weighted_norm(f: TestFunction, grid: GridSpec,
                  w: Optional[Weight] = None) -> float:
    """Quadrature norm of f in the weighted Fock space (default: its own w)."""
    weight = f.weight if w is None else w
    Z, dA = plane_nodes(grid)
    vals = np.abs(f.weighted_values(Z)) ** f.p * np.exp(weight.log_density(Z))
    return float(np.sum(vals) * dA) ** (1.0 / f.p)


def pointwise_bound_check(f: TestFunction, z: complex, t: float,
                          grid: GridSpec) -> float:
    """Ratio of |f(z)|^p e^{-(pa/2)|z|^2} to its disk average against w.

    The ratio is scale-free in f and finite for admitted weights; zero
    functions return 0 by convention.
    """
    z = complex(z)
    if abs(z) + t > grid.radius:
        raise DomainError("D(z,t) leaves the truncated plane")
    num = float(np.abs(f.weighted_values(z)) ** f.p)
    Z, wts = polar_disk_nodes(z, t, grid.step)
    integrand = (np.abs(f.weighted_values(Z)) ** f.p
                 * np.exp(f.weight.log_density(Z)))
    disk_integral = float(np.sum(integrand * wts))
    if disk_integral == 0.0:
        return 0.0
    return num * mass_on_disk(f.weight, z, t, grid) / disk_integral


def max_pointwise_ratio(f: TestFunction, t: float, grid: GridSpec) -> float:
    """Window-wide maximum of the pointwise bound ratio (finiteness report)."""
    best = 0.0
    n = grid.window.n_max
    for nu in Window(min(n, int(grid.radius - t - 1))).points():
        best = max(best, pointwise_bound_check(f, nu.z, t, grid))
    return best


def dual_pairing(f: TestFunction, g: TestFunction, alpha: float,
                 grid: GridSpec) -> complex:
    """<f, g> = int f conj(g) e^{-a|z|^2} dA over the truncated plane."""
    Z, dA = plane_nodes(grid)
    fz = f.weighted_values(Z)
    gz = g.weighted_values(Z)
    return complex(np.sum(fz * np.conj(gz)) * dA)


def berezin_transform(f: Callable, alpha: float, z: complex,
                      grid: GridSpec) -> float:
    """(B f)(z) = int f(u) e^{-a|z-u|^2} dA(u) over the truncated plane."""
    Z, dA = plane_nodes(grid)
    vals = np.asarray(f(Z), dtype=float)
    return float(np.sum(vals * np.exp(-alpha * np.abs(Z - complex(z)) ** 2)) * dA)


# ---------------------------------------------------------------------------
# Berezin operator-norm estimation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BerezinBounds:
    """Randomized lower bound and lattice proxy for the Berezin norm.

    ``lower`` is the best ratio ||B f||_{L^{q/2}(mu)} / ||f|| found over
    seeded nonnegative cell-indicator combinations; ``lattice_proxy`` is
    the l^s norm of mu(Q_1(nu)) / w(Q_1(nu))^{q/p}.  No upper bound beyond
    the proxy's regression band is claimed.
    """

    lower: float
    lattice_proxy: float
    s: float
    trials: int


def berezin_exponent(p: float, q: float) -> float:
    """The sequence exponent s = 2p / (2p - 2q + pq)."""
    return 2.0 * p / (2.0 * p - 2.0 * q + p * q)


@lru_cache(maxsize=32)
def _cell_gauss_integrals(mu: Measure, w: Weight, p: float, alpha: float,
                          grid: GridSpec):
    """J[i, nu] = int_{Q_1(nu)} e^{-a|z_i - u|^2} what(u)^{-2/p} dA at atoms.

    Density measures are discretized to their cell masses placed at cell
    centers for the purposes of the randomized search.
    """
    what = averaged_weight(w, grid)
    pts = list(grid.window.points())
    if mu.is_atomic:
        locs = mu.atom_locations
        masses = mu.atom_masses
    else:
        cm = measure_cell_masses(mu, grid.window, grid)
        locs = np.array([nu.z for nu in pts])
        masses = np.array([cm[nu] for nu in pts])
        keep = masses > 0
        locs, masses = locs[keep], masses[keep]
    if locs.size == 0:
        return pts, locs, masses, np.zeros((0, len(pts)))
    n_nodes = max(6, int(round(1.0 / max(grid.step, 0.1))))
    h = 1.0 / n_nodes
    ax = (np.arange(n_nodes) + 0.5) * h - 0.5
    rel = (ax[:, None] + 1j * ax[None, :]).ravel()
    J = np.zeros((locs.size, len(pts)))
    what_pow = {}
    for col, nu in enumerate(pts):
        nodes = nu.z + rel
        what_pow[nu] = np.exp(-(2.0 / p) * what.log_density(nodes)) * h * h
    for i, z in enumerate(locs):
        for col, nu in enumerate(pts):
            if abs(z - nu.z) > math.sqrt(45.0 / alpha) + 0.8:
                continue  # kernel below ~1e-19: negligible
            nodes = nu.z + rel
            J[i, col] = float(np.sum(np.exp(-alpha * np.abs(z - nodes) ** 2)
                                     * what_pow[nu]))
    return pts, locs, masses, J


def berezin_opnorm_bounds(p: float, q: float, w: Weight, mu: Measure,
                          trials: int, seed: int, grid: GridSpec,
                          alpha: float = 1.0) -> BerezinBounds:
    """Lower-bound-by-search plus lattice proxy for the Berezin norm.

    The search tests nonnegative simple functions constant on cells,
    weighted by what^{-2/p} so their source norm is exactly the l^{p/(2-p)}
    norm of the coefficients; each trial derives its own seed, so the
    result is reproducible and mergeable by deterministic max.
    """
    if not 1.0 < p < 2.0:
        raise DomainError("berezin bounds require 1 < p < 2")
    if not 1.0 <= q <= 2.0:
        raise DomainError("berezin bounds require 1 <= q <= 2")
    s = berezin_exponent(p, q)
    w_cells = cell_mass_table(w, grid.window, grid)
    mu_cells = measure_cell_masses(mu, grid.window, grid)
    lam = np.array([mu_cells[nu] / w_cells.masses[nu] ** (q / p)
                    for nu in grid.window.points()])
    proxy = float(np.sum(lam ** s)) ** (1.0 / s)

    pts, locs, masses, J = _cell_gauss_integrals(mu, w, p, alpha, grid)
    if masses.size == 0:
        return BerezinBounds(0.0, proxy, s, trials)
    src_exp = p / (2.0 - p)
    lower = 0.0
    for t in range(trials):
        rng = np.random.default_rng((seed, t))
        support = rng.integers(0, 2, len(pts)).astype(bool)
        if not support.any():
            support[rng.integers(0, len(pts))] = True
        c = np.where(support, rng.exponential(1.0, len(pts)), 0.0)
        src = float(np.sum(c ** src_exp)) ** (1.0 / src_exp)
        Bf = J @ c
        target = float(np.sum(masses * Bf ** (q / 2.0))) ** (2.0 / q)
        if src > 0:
            lower = max(lower, target / src)
    return BerezinBounds(lower, proxy, s, trials)
