"""Weights on the plane: masses, Muckenhoupt-type constants, companions.

A weight is a locally integrable nonnegative density.  Everything here is
computed from the *logarithm* of the density and only exponentiated after
the large quadratic terms have cancelled, so weights like e^{b|z|^2} can be
fed to the divergence detectors without overflowing on the way.

Square masses use a Richardson-extrapolated tensor midpoint rule; disk
masses use a polar midpoint rule that integrates constants exactly.  The
restricted A_p constant is estimated by a supremum over window lattice
centers refined with a 4x4 sub-grid of offsets per cell, together with a
monotonicity trace over growing windows: a finite-window sup can only
certify divergence (sustained growth), never infinite-plane membership,
so membership verdicts are three-valued.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from scipy.special import logsumexp

from .errors import DivergentConstant, NonPositiveMass, ZeroInfimum
from .lattice import (BilinearField, GridSpec, LatticePoint, Window,
                      disk_mass_field, divergence_windows, node_axis,
                      plane_nodes, polar_disk_nodes, square_nodes)


@dataclass(frozen=True)
class PowerEnvelope:
    """Pointwise lower bound w(z) >= exp(log_coeff) * (1+|z|)^gamma.

    ``exact`` marks weights that *equal* the bound (pure powers), for which
    companion constructions keep exact envelopes under exponent arithmetic.
    """

    gamma: float
    log_coeff: float = 0.0
    exact: bool = False

    def log_at(self, radius: float) -> float:
        """log of the envelope evaluated at |z| = radius."""
        return self.log_coeff + self.gamma * math.log1p(max(radius, 0.0))


class Weight:
    """Positive density on the plane, held as a vectorized log-density.

    ``envelope`` (optional) records polynomial growth/decay of log w used
    by tail certificates; it must be a valid lower bound everywhere.
    Weights compare by identity, which lets heavy derived tables be cached
    per instance.
    """

    def __init__(self, log_density: Callable[[np.ndarray], np.ndarray],
                 label: str, envelope: Optional[PowerEnvelope] = None):
        self.log_density = log_density
        self.label = label
        self.envelope = envelope

    def density(self, z) -> np.ndarray:
        return np.exp(self.log_density(np.asarray(z, dtype=complex)))

    def __repr__(self) -> str:
        return f"Weight({self.label!r})"


def const_weight(c: float) -> Weight:
    if c <= 0:
        raise ValueError("constant weight must be positive")
    lc = math.log(c)
    return Weight(lambda z: np.full(np.shape(z), lc, dtype=float),
                  f"const:{c:g}", PowerEnvelope(0.0, lc, exact=True))


def poly_weight(gamma: float) -> Weight:
    """The radial power weight (1+|z|)^gamma."""
    return Weight(lambda z: gamma * np.log1p(np.abs(z)),
                  f"poly:{gamma:g}", PowerEnvelope(gamma, 0.0, exact=True))


def exp2_weight(beta: float) -> Weight:
    """The Gaussian-type weight e^{beta |z|^2} (for negative tests)."""
    env = PowerEnvelope(0.0, 0.0, exact=False) if beta > 0 else None
    return Weight(lambda z: beta * np.abs(z) ** 2, f"exp2:{beta:g}", env)


def product_weight(w1: Weight, w2: Weight) -> Weight:
    env = None
    if w1.envelope is not None and w2.envelope is not None:
        env = PowerEnvelope(w1.envelope.gamma + w2.envelope.gamma,
                            w1.envelope.log_coeff + w2.envelope.log_coeff,
                            exact=w1.envelope.exact and w2.envelope.exact)
    return Weight(lambda z: w1.log_density(z) + w2.log_density(z),
                  f"product:{w1.label},{w2.label}", env)


def tilt_weight(w: Weight, k: int, p: float) -> Weight:
    """w(z) / (1+|z|)^{kp}; the measures module re-exports this op."""
    gamma = -k * p
    env = None
    if w.envelope is not None:
        env = PowerEnvelope(w.envelope.gamma + gamma, w.envelope.log_coeff,
                            exact=w.envelope.exact)
    return Weight(lambda z: w.log_density(z) + gamma * np.log1p(np.abs(z)),
                  f"tilt:{k:g},{p:g},{w.label}", env)


def dual_weight(w: Weight, p: float) -> Weight:
    """The companion weight w^{-p'/p} of the dual pairing, p > 1."""
    if p <= 1:
        raise ValueError("dual weight requires p > 1")
    q = p / (p - 1.0)
    factor = -q / p
    env = None
    if w.envelope is not None and w.envelope.exact:
        env = PowerEnvelope(factor * w.envelope.gamma,
                            factor * w.envelope.log_coeff, exact=True)
    return Weight(lambda z: factor * w.log_density(z),
                  f"dual:{p:g},{w.label}", env)


# ---------------------------------------------------------------------------
# mini-language
# ---------------------------------------------------------------------------

def parse_weight(spec: str) -> Weight:
    """Parse the weight mini-language.

    Grammar (consumed left to right, no whitespace)::

        weight := 'const:' NUM | 'poly:' NUM | 'exp2:' NUM
                | 'tilt:' NUM ',' NUM ',' weight
                | 'product:' weight ',' weight

    NUM is a decimal literal accepted by float().
    """
    w, pos = _parse_weight_at(spec, 0)
    if pos != len(spec):
        raise ValueError(f"trailing characters in weight spec: {spec[pos:]!r}")
    return w


def _read_head(s: str, pos: int) -> tuple[str, int]:
    i = s.find(":", pos)
    if i < 0:
        raise ValueError(f"expected ':' in weight spec at {s[pos:]!r}")
    return s[pos:i], i + 1


def _read_num(s: str, pos: int) -> tuple[float, int]:
    i = s.find(",", pos)
    tok = s[pos:] if i < 0 else s[pos:i]
    end = len(s) if i < 0 else i
    try:
        return float(tok), end
    except ValueError as exc:
        raise ValueError(f"bad number {tok!r} in weight spec") from exc


def _expect_comma(s: str, pos: int) -> int:
    if pos >= len(s) or s[pos] != ",":
        raise ValueError(f"expected ',' in weight spec at {s[pos:]!r}")
    return pos + 1


def _parse_weight_at(s: str, pos: int) -> tuple[Weight, int]:
    head, pos = _read_head(s, pos)
    if head == "const":
        c, pos = _read_num(s, pos)
        return const_weight(c), pos
    if head == "poly":
        g, pos = _read_num(s, pos)
        return poly_weight(g), pos
    if head == "exp2":
        b, pos = _read_num(s, pos)
        return exp2_weight(b), pos
    if head == "tilt":
        k, pos = _read_num(s, pos)
        pos = _expect_comma(s, pos)
        p, pos = _read_num(s, pos)
        pos = _expect_comma(s, pos)
        base, pos = _parse_weight_at(s, pos)
        return tilt_weight(base, int(k), p), pos
    if head == "product":
        w1, pos = _parse_weight_at(s, pos)
        pos = _expect_comma(s, pos)
        w2, pos = _parse_weight_at(s, pos)
        return product_weight(w1, w2), pos
    raise ValueError(f"unknown weight constructor {head!r}")


# ---------------------------------------------------------------------------
# masses
# ---------------------------------------------------------------------------

def log_mass_on_square(w: Weight, z: complex, t: float, grid: GridSpec,
                       richardson: bool = True) -> float:
    """log of the quadrature of the density over Q_t(z)."""
    if t <= 0:
        raise ValueError("t must be positive")
    Z1, dA1 = square_nodes(z, t, grid.step, refine=1)
    log1 = float(logsumexp(w.log_density(Z1))) + math.log(dA1)
    if not richardson:
        return log1
    Z2, dA2 = square_nodes(z, t, grid.step, refine=2)
    log2 = float(logsumexp(w.log_density(Z2))) + math.log(dA2)
    # (4*I2 - I1)/3 evaluated without leaving the log domain
    m = max(log1, log2)
    if not math.isfinite(m):
        return m
    combo = (4.0 * math.exp(log2 - m) - math.exp(log1 - m)) / 3.0
    if combo <= 0.0:  # wildly varying integrand: fall back to the finer rule
        return log2
    return m + math.log(combo)


def mass_on_square(w: Weight, z: complex, t: float, grid: GridSpec) -> float:
    """Mass w(Q_t(z)) by Richardson-extrapolated tensor midpoint rule."""
    lm = log_mass_on_square(w, z, t, grid)
    if lm == -math.inf or math.isnan(lm):
        raise NonPositiveMass(f"weight {w.label} has vanishing mass on Q_{t}({z})")
    return math.exp(lm)


def log_mass_on_disk(w: Weight, z: complex, t: float, grid: GridSpec) -> float:
    if t <= 0:
        raise ValueError("t must be positive")
    Z, wts = polar_disk_nodes(z, t, grid.step)
    return float(logsumexp(w.log_density(Z), b=wts))


def mass_on_disk(w: Weight, z: complex, t: float, grid: GridSpec) -> float:
    """Mass w(D(z,t)) by a polar midpoint rule (exact for constants)."""
    lm = log_mass_on_disk(w, z, t, grid)
    if lm == -math.inf or math.isnan(lm):
        raise NonPositiveMass(f"weight {w.label} has vanishing mass on D({z},{t})")
    return math.exp(lm)


# ---------------------------------------------------------------------------
# restricted Muckenhoupt-type constants
# ---------------------------------------------------------------------------

N_SUB_OFFSETS = 4          # per-cell sub-grid refining the supremum
GROWTH_FACTOR_LIMIT = 10.0  # per-enlargement growth that certifies divergence
N_DIVERGENT_STEPS = 3       # successive enlargements required


@dataclass(frozen=True)
class SupConstantResult:
    """Sup-type constant with the attaining center and its window trace."""

    constant: float
    center: complex
    trace: tuple[tuple[int, float], ...]  # (window n, running sup)


def _sup_centers(window: Window) -> tuple[np.ndarray, np.ndarray]:
    """All refined centers (lattice + 4x4 offsets) and their window index."""
    pts = np.array([nu.z for nu in window.points()])
    ring = np.array([max(abs(nu.j), abs(nu.k)) for nu in window.points()])
    offs = (np.arange(N_SUB_OFFSETS) + 0.5) / N_SUB_OFFSETS - 0.5
    shifts = (offs[:, None] + 1j * offs[None, :]).ravel()
    centers = (pts[:, None] + shifts[None, :]).ravel()
    rings = np.repeat(ring, shifts.size)
    return centers, rings


def _log_square_averages(w: Weight, centers: np.ndarray, t: float,
                         grid: GridSpec, dual_power: float):
    """Per-center log-averages of w and of w^{dual_power} over Q_t."""
    n = max(4, int(round(t / grid.step)))
    h = t / n
    ax = (np.arange(n) + 0.5) * h - t / 2.0
    rel = (ax[:, None] + 1j * ax[None, :]).ravel()
    log_n = math.log(rel.size)
    avg_w = np.empty(centers.size)
    avg_dual = np.empty(centers.size)
    chunk = max(1, 4_000_000 // rel.size)
    for i in range(0, centers.size, chunk):
        Z = centers[i:i + chunk, None] + rel[None, :]
        lw = w.log_density(Z)
        avg_w[i:i + chunk] = logsumexp(lw, axis=1) - log_n
        avg_dual[i:i + chunk] = logsumexp(dual_power * lw, axis=1) - log_n
    return avg_w, avg_dual


def _sup_with_trace(log_products: np.ndarray, centers: np.ndarray,
                    rings: np.ndarray, n_max: int, what: str) -> SupConstantResult:
    trace = []
    prev = None
    hits = 0
    for n in divergence_windows(n_max):
        mask = rings <= n
        log_sup = float(np.max(log_products[mask]))
        trace.append((n, log_sup))
        if prev is not None:
            if log_sup - prev > math.log(GROWTH_FACTOR_LIMIT):
                hits += 1
            else:
                hits = 0
            if hits >= min(N_DIVERGENT_STEPS, len(divergence_windows(n_max)) - 1):
                raise DivergentConstant(
                    f"{what} grows by more than x{GROWTH_FACTOR_LIMIT:g} across "
                    f"{hits} successive window enlargements (trace: "
                    + ", ".join(f"n={m}: {v:.4g}" for m, v in
                                [(m, math.exp(min(v, 700.0))) for m, v in trace])
                    + ")")
        prev = log_sup
    i_best = int(np.argmax(log_products))
    log_c = float(log_products[i_best])
    if not math.isfinite(log_c):
        raise DivergentConstant(f"{what} is infinite on the window "
                                "(density vanishes on a node set)")
    return SupConstantResult(math.exp(log_c), complex(centers[i_best]),
                             tuple((n, math.exp(min(v, 700.0))) for n, v in trace))


def apr_constant(w: Weight, p: float, t: float, grid: GridSpec) -> SupConstantResult:
    """Restricted A_p constant estimate over the window.

    sup over refined centers z of
    (avg_{Q_t(z)} w) * (avg_{Q_t(z)} w^{-p'/p})^{p/p'}, with a growth trace
    over nested windows; sustained growth by more than a factor of 10 per
    enlargement raises DivergentConstant.
    """
    if p <= 1:
        raise ValueError("apr_constant requires p > 1")
    if t <= 0:
        raise ValueError("t must be positive")
    q = p / (p - 1.0)
    centers, rings = _sup_centers(grid.window)
    avg_w, avg_dual = _log_square_averages(w, centers, t, grid, -q / p)
    log_products = avg_w + (p / q) * avg_dual
    return _sup_with_trace(log_products, centers, rings, grid.window.n_max,
                           f"A_{p:g} constant of {w.label}")


def a1_constant(w: Weight, t: float, grid: GridSpec) -> SupConstantResult:
    """Restricted A_1 constant: average over Q_t divided by the node minimum."""
    if t <= 0:
        raise ValueError("t must be positive")
    centers, rings = _sup_centers(grid.window)
    n = max(4, int(round(t / grid.step)))
    h = t / n
    ax = (np.arange(n) + 0.5) * h - t / 2.0
    rel = (ax[:, None] + 1j * ax[None, :]).ravel()
    log_n = math.log(rel.size)
    avg_w = np.empty(centers.size)
    min_w = np.empty(centers.size)
    chunk = max(1, 4_000_000 // rel.size)
    for i in range(0, centers.size, chunk):
        Z = centers[i:i + chunk, None] + rel[None, :]
        lw = w.log_density(Z)
        avg_w[i:i + chunk] = logsumexp(lw, axis=1) - log_n
        min_w[i:i + chunk] = np.min(lw, axis=1)
    if np.any(min_w == -math.inf):
        bad = centers[int(np.argmin(min_w))]
        raise ZeroInfimum(f"weight {w.label} vanishes at a node of Q_{t:g}({bad})")
    return _sup_with_trace(avg_w - min_w, centers, rings, grid.window.n_max,
                           f"A_1 constant of {w.label}")


# ---------------------------------------------------------------------------
# cell masses and companions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CellMassTable:
    """Strictly positive cell masses w(Q_1(nu)) over a window."""

    window: Window
    masses: dict
    log_masses: dict

    def mass(self, nu: LatticePoint) -> float:
        return self.masses[nu]


@lru_cache(maxsize=64)
def cell_mass_table(w: Weight, window: Window, grid: GridSpec) -> CellMassTable:
    """Cell masses of the weight over the window (cached per weight)."""
    pts = list(window.points())
    centers = np.array([nu.z for nu in pts])
    Z1, dA1 = square_nodes(0j, 1.0, grid.step, refine=1)
    Z2, dA2 = square_nodes(0j, 1.0, grid.step, refine=2)
    rel1, rel2 = Z1.ravel(), Z2.ravel()
    logs = np.empty(len(pts))
    chunk = max(1, 4_000_000 // rel2.size)
    for i in range(0, centers.size, chunk):
        c = centers[i:i + chunk, None]
        l1 = logsumexp(w.log_density(c + rel1[None, :]), axis=1) + math.log(dA1)
        l2 = logsumexp(w.log_density(c + rel2[None, :]), axis=1) + math.log(dA2)
        m = np.maximum(l1, l2)
        combo = (4.0 * np.exp(l2 - m) - np.exp(l1 - m)) / 3.0
        logs[i:i + chunk] = np.where(combo > 0, m + np.log(np.maximum(combo, 1e-300)), l2)
    if np.any(~np.isfinite(logs) & (logs != math.inf)):
        raise NonPositiveMass(f"weight {w.label} has a vanishing cell mass")
    masses = {nu: float(np.exp(min(lv, 700.0)) if lv < math.inf else math.inf)
              for nu, lv in zip(pts, logs)}
    log_masses = {nu: float(lv) for nu, lv in zip(pts, logs)}
    return CellMassTable(window, masses, log_masses)


def esti_growth_constant(w: Weight, window: Window, grid: GridSpec) -> float:
    """Smallest C with mass(nu)/mass(nu') <= C^{|nu-nu'|} over window pairs.

    Exhaustive over all ordered pairs; ratios are scale-free in w.
    """
    table = cell_mass_table(w, window, grid)
    pts = list(window.points())
    logs = np.array([table.log_masses[nu] for nu in pts])
    zs = np.array([nu.z for nu in pts])
    log_c = 0.0
    for i in range(len(pts)):
        d = np.abs(zs - zs[i])
        diff = np.abs(logs - logs[i])
        mask = d > 0
        log_c = max(log_c, float(np.max(diff[mask] / d[mask])))
    return math.exp(log_c)


def averaged_weight(w: Weight, grid: GridSpec,
                    table_spacing: float = 0.25) -> Weight:
    """The averaged companion z -> w(Q_1(z)).

    Memoized on a sub-lattice of the given spacing (which includes the
    integer lattice, where values are exact cell masses) with bilinear
    interpolation in between.
    """
    L = grid.radius + 1.0
    n_side = int(math.ceil(L / table_spacing))
    xs = np.arange(-n_side, n_side + 1) * table_spacing
    Z1, dA1 = square_nodes(0j, 1.0, grid.step, refine=1)
    Z2, dA2 = square_nodes(0j, 1.0, grid.step, refine=2)
    rel1, rel2 = Z1.ravel(), Z2.ravel()
    centers = (xs[:, None] + 1j * xs[None, :]).ravel()
    logs = np.empty(centers.size)
    chunk = max(1, 4_000_000 // rel2.size)
    for i in range(0, centers.size, chunk):
        c = centers[i:i + chunk, None]
        l1 = logsumexp(w.log_density(c + rel1[None, :]), axis=1) + math.log(dA1)
        l2 = logsumexp(w.log_density(c + rel2[None, :]), axis=1) + math.log(dA2)
        m = np.maximum(l1, l2)
        combo = (4.0 * np.exp(l2 - m) - np.exp(l1 - m)) / 3.0
        logs[i:i + chunk] = np.where(combo > 0, m + np.log(np.maximum(combo, 1e-300)), l2)
    field = BilinearField(xs, logs.reshape(xs.size, xs.size))
    env = None
    if w.envelope is not None:
        # averaging over Q_1 moves |z| by at most ~0.75 in the envelope
        env = PowerEnvelope(w.envelope.gamma,
                            w.envelope.log_coeff
                            - abs(w.envelope.gamma) * math.log(1.75),
                            exact=False)
    return Weight(lambda z: np.asarray(field(z), dtype=float),
                  f"avg:{w.label}", env)


averaged_weight = lru_cache(maxsize=16)(averaged_weight)


# ---------------------------------------------------------------------------
# bulk disk-mass field
# ---------------------------------------------------------------------------

@lru_cache(maxsize=32)
def weight_disk_field(w: Weight, grid: GridSpec, r: float = 1.0) -> BilinearField:
    """w(D(., r)) sampled on the plane grid, with bilinear interpolation.

    Built by convolving density samples with the exact-area disk kernel;
    the sampled square is padded by r so interpolation stays interior for
    |z| <= radius.
    """
    L = grid.radius + r + 4 * grid.step
    xs = node_axis(L, grid.step)
    h = float(xs[1] - xs[0])
    Z = xs[:, None] + 1j * xs[None, :]
    vals = np.exp(np.minimum(w.log_density(Z), 700.0))
    field = disk_mass_field(vals, h, r)
    return BilinearField(xs, field)
