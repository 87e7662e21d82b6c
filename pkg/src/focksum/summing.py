"""The decision engine: regimes, lattice/integral norms, summing verdicts.

The embedding of a weighted Fock space into L^p of a measure is r-summing
exactly when a single scalar field — the ratio of disk masses
mu(D(z,1)) / w(D(z,1)) — lies in L^s of the plane, where the exponent s
depends only on (p, r) through four regimes.  One outer exponent 1/(s*p)
turns the L^s quantity into a two-sided estimate of the summing norm in
every regime (s*p equals 2, p', r and p across the four branches).

Finite windows cannot decide an infinite-plane condition, so verdicts are
three-valued: divergence is certified by sustained growth across nested
sub-windows, summability by window stability plus a tail certificate
(exact for atomic measures contained in the window, envelope-based
otherwise), and anything else is reported inconclusive.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .errors import DegenerateWeight, DomainError
from .lattice import (GridSpec, LatticePoint, Window, disk_mass_field,
                      divergence_windows, node_axis)
from .measures import Measure, measure_cell_masses
from .weights import Weight, cell_mass_table, weight_disk_field
from .calibration import CalibrationTable, default_calibration

DIVERGENCE_GROWTH = 1.2    # per-doubling growth of the s-sum certifying divergence
STABILITY_TOL = 0.05       # relative increment over the last doubling for stability
TAIL_FRACTION = 0.01       # certified tail must stay below this fraction


class Regime(enum.Enum):
    """The four exponent branches of the summability characterization."""

    SUB_TWO = "SubTwo"    # 1 < p < 2 (any r)
    LOW_R = "LowR"        # p >= 2, r <= p'
    MID_R = "MidR"        # p >= 2, p' <= r <= p
    HIGH_R = "HighR"      # p >= 2, r >= p


class Classification(enum.Enum):
    SUMMING = "summing_certified"
    NOT_SUMMING = "not_summing_certified"
    INCONCLUSIVE = "inconclusive"


def target_exponent(p: float, r: float) -> tuple[Regime, float]:
    """Regime and decision exponent s for the pair (p, r).

    Boundary ties resolve identically by value: at r = p' the low and mid
    branches agree, at r = p the mid and high branches agree, and at p = 2
    every branch gives s = 1.
    """
    if p <= 1:
        raise DomainError("p must be > 1")
    if r < 1:
        raise DomainError("r must be >= 1")
    if p < 2:
        return Regime.SUB_TWO, 2.0 / p
    p_conj = p / (p - 1.0)
    if r <= p_conj:
        return Regime.LOW_R, p_conj / p
    if r >= p:
        return Regime.HIGH_R, 1.0
    return Regime.MID_R, r / p


@dataclass(frozen=True)
class DiagonalSequence:
    """Nonnegative sequence indexed by lattice points, finitely supported."""

    values: dict

    @property
    def support(self) -> list[LatticePoint]:
        return sorted(self.values)

    def as_array(self) -> np.ndarray:
        return np.array([self.values[nu] for nu in self.support])


def ls_norm(seq, s: float) -> float:
    """(sum v^s)^{1/s} over the sequence; s = inf gives the maximum."""
    if isinstance(seq, DiagonalSequence):
        vals = [seq.values[nu] for nu in seq.support]
    else:
        vals = list(seq)
    if not vals:
        return 0.0
    if s == math.inf:
        return float(max(vals))
    if s <= 0:
        raise DomainError("s must be positive")
    m = float(max(vals))
    if m == 0.0:
        return 0.0
    return m * math.fsum((v / m) ** s for v in vals) ** (1.0 / s)


def lattice_sequence(mu: Measure, w: Weight, q_over_p: float, window: Window,
                     grid: GridSpec) -> DiagonalSequence:
    """The cell-mass ratio sequence mu(Q_1(nu)) / w(Q_1(nu))^{q/p}."""
    w_cells = cell_mass_table(w, window, grid)
    mu_cells = measure_cell_masses(mu, window, grid)
    values = {}
    for nu in window.points():
        wm = w_cells.masses[nu]
        if not (wm > 0) or not math.isfinite(wm):
            raise DegenerateWeight(f"w(Q_1({nu})) = {wm} for {w.label}")
        values[nu] = mu_cells[nu] / wm ** q_over_p
    return DiagonalSequence(values)


# ---------------------------------------------------------------------------
# tail certificates
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TailCertificate:
    """Certified upper bound for the mass of the decision sum beyond the window."""

    kind: str          # "exact_zero" or "envelope"
    bound: float


def tail_certificate(mu: Measure, w: Weight, s: float,
                     grid: GridSpec) -> Optional[TailCertificate]:
    """Bound the decision quantity beyond the window, if the data allow it.

    Atomic measures whose atoms all lie strictly inside the window have an
    exactly zero tail.  Densities need a Gaussian envelope with genuine
    decay, and the weight needs a power lower envelope; the tail is then
    bounded by an explicit ring sum.  Otherwise: no certificate.
    """
    n = grid.window.n_max
    inside = True
    if mu.atom_locations.size:
        coords = np.maximum(np.abs(mu.atom_locations.real),
                            np.abs(mu.atom_locations.imag))
        inside = bool(np.all(coords < n + 0.5))
    if mu.is_atomic:
        return TailCertificate("exact_zero", 0.0) if inside else None
    if not inside:
        return None
    env = mu.envelope
    if env is None or env.c2 <= 0 or w.envelope is None:
        return None
    wenv = w.envelope
    total = 0.0
    for m in range(n + 1, n + 400):
        rho = m - 0.5                     # nearest distance of ring-m cells
        d_eff = max(0.0, rho - 1.0)       # disk around the cell reaches this far in
        log_num = math.log(math.pi) + env.c0 - env.c2 * d_eff * d_eff
        if wenv.gamma >= 0:
            log_den = wenv.log_at(max(0.0, rho - 1.0))
        else:
            log_den = wenv.log_at(math.sqrt(2.0) * (m + 0.5) + 1.0)
        log_term = s * (log_num - log_den) + math.log(16.0 * (m + 2.0))
        term = math.exp(min(log_term, 700.0))
        total += term
        if term < 1e-30 and m > n + 3:
            break
    else:
        return None
    if not math.isfinite(total):
        return None
    return TailCertificate("envelope", total)


# ---------------------------------------------------------------------------
# verdicts
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SummingVerdict:
    """Decision record for one embedding: regime, norms, bracket, verdict."""

    regime: Regime
    s: float
    lattice_norm: float
    integral_norm: float
    window: Window
    tail_certificate: Optional[TailCertificate]
    pi_r_low: float
    pi_r_high: float
    classification: Classification
    lattice_trace: tuple = ()
    integral_trace: tuple = ()

    def __post_init__(self) -> None:
        if self.pi_r_low > self.pi_r_high:
            raise ValueError("pi_r_low must not exceed pi_r_high")
        if (self.classification is Classification.SUMMING
                and self.tail_certificate is None):
            raise ValueError("summing_certified requires a tail certificate")


def _classify_from_trace(sums: list[float], tail: Optional[TailCertificate]):
    """Three-valued call from nested-window sums of the decision quantity."""
    total = sums[-1]
    if total == 0.0:
        return Classification.SUMMING
    ratios = [b / a if a > 0 else math.inf for a, b in zip(sums[:-1], sums[1:])]
    if len(ratios) >= 3 and all(rho >= DIVERGENCE_GROWTH for rho in ratios[-3:]):
        return Classification.NOT_SUMMING
    stable = sums[-2] > 0 and (total - sums[-2]) <= STABILITY_TOL * total
    if (stable and tail is not None
            and tail.bound <= max(TAIL_FRACTION * total, 1e-12)):
        return Classification.SUMMING
    return Classification.INCONCLUSIVE


@lru_cache(maxsize=32)
def _mu_disk_node_values(mu: Measure, grid: GridSpec):
    """mu(D(z,1)) at all window-square nodes (atoms exact, density by kernel)."""
    L = grid.window.half_extent
    xs = node_axis(L, grid.step)
    h = float(xs[1] - xs[0])
    Z = xs[:, None] + 1j * xs[None, :]
    num = np.zeros(Z.shape)
    for z, m in zip(mu.atom_locations, mu.atom_masses):
        num += m * (np.abs(Z - z) < 1.0)
    if mu.log_density is not None:
        pad = int(math.ceil(1.0 / h)) + 2
        left = xs[0] - h * np.arange(pad, 0, -1)
        right = xs[-1] + h * np.arange(1, pad + 1)
        xs_p = np.concatenate([left, xs, right])
        Zp = xs_p[:, None] + 1j * xs_p[None, :]
        vals = np.exp(np.minimum(mu.log_density(Zp), 700.0))
        field = disk_mass_field(vals, h, 1.0)
        num += field[pad:-pad, pad:-pad]
    return xs, num


def _ring_index(xs: np.ndarray) -> np.ndarray:
    """Window ring max(|j|,|k|) of the cell containing each node."""
    j = np.floor(xs + 0.5).astype(int)
    return np.maximum(np.abs(j)[:, None], np.abs(j)[None, :])


def classify_embedding(p: float, r: float, alpha: float, w: Weight,
                       mu: Measure, grid: GridSpec,
                       calibration: Optional[CalibrationTable] = None
                       ) -> SummingVerdict:
    """Full summability verdict for the embedding determined by (w, mu).

    Computes the decision exponent s, the windowed lattice sum
    sum (mu(Q_1)/w(Q_1))^s and the windowed integral of (mu-hat)^s, both
    raised to 1/(s*p); classifies by window growth plus tail certificates;
    and brackets the summing norm by the lattice value times pinned
    regression band constants (calibrated at alpha = 1 for each admitted
    weight family; the alpha and p dependence of the rank-one atom is
    factored out exactly).
    """
    if alpha <= 0:
        raise DomainError("alpha must be positive")
    regime, s = target_exponent(p, r)
    window = grid.window
    sub_windows = divergence_windows(window.n_max)

    lam = lattice_sequence(mu, w, 1.0, window, grid)
    lattice_sums = []
    for n in sub_windows:
        vals = [lam.values[nu] ** s for nu in lam.support
                if max(abs(nu.j), abs(nu.k)) <= n]
        lattice_sums.append(math.fsum(vals))

    xs, mu_disk = _mu_disk_node_values(mu, grid)
    h = float(xs[1] - xs[0])
    w_disk = weight_disk_field(w, grid)(xs[:, None] + 1j * xs[None, :])
    if np.any(~(w_disk > 0)):
        raise DegenerateWeight(f"w(D(z,1)) vanishes on the window for {w.label}")
    ring = _ring_index(xs)
    # clip convolution ringing: disk masses are nonnegative
    integrand = (np.maximum(mu_disk, 0.0) / w_disk) ** s * h * h
    ring_sums = np.bincount(ring.ravel(), weights=integrand.ravel(),
                            minlength=window.n_max + 1)
    cum = np.cumsum(ring_sums)
    integral_sums = [float(cum[min(n, window.n_max)]) for n in sub_windows]

    tail = tail_certificate(mu, w, s, grid)
    classification = _classify_from_trace(lattice_sums, tail)

    sp = s * p
    lattice_norm = lattice_sums[-1] ** (1.0 / sp)
    integral_norm = integral_sums[-1] ** (1.0 / sp)

    calib = calibration if calibration is not None else default_calibration()
    lo, hi = calib.band_for_weight("pi_band", w)
    atom_factor = (p * alpha / (2.0 * math.pi)) ** (1.0 / p)
    pi_mid = lattice_norm * atom_factor
    pi_low, pi_high = pi_mid * lo, pi_mid * hi
    if classification is Classification.NOT_SUMMING:
        pi_high = math.inf

    return SummingVerdict(
        regime=regime, s=s, lattice_norm=lattice_norm,
        integral_norm=integral_norm, window=window, tail_certificate=tail,
        pi_r_low=pi_low, pi_r_high=pi_high, classification=classification,
        lattice_trace=tuple(zip(sub_windows, lattice_sums)),
        integral_trace=tuple(zip(sub_windows, integral_sums)))


# ---------------------------------------------------------------------------
# diagonal multipliers
# ---------------------------------------------------------------------------

def diag_summing_estimate(lam: DiagonalSequence, p: float, r: float) -> float:
    """Two-sided formula value for the summing norm of the multiplier.

    For p >= 2 the r-summing norm of the diagonal multiplier on l^p is
    comparable to the l^{p'}, l^r or l^p norm of the symbol according to
    whether r <= p', p' <= r <= p or r >= p; the branches agree at the
    boundaries.
    """
    if p < 2:
        raise DomainError("diagonal estimates require p >= 2")
    if r < 1:
        raise DomainError("r must be >= 1")
    p_conj = p / (p - 1.0)
    if r <= p_conj:
        return ls_norm(lam, p_conj)
    if r >= p:
        return ls_norm(lam, p)
    return ls_norm(lam, r)


def _mixed_norm_sup(X: np.ndarray, r: float, p: float, rng,
                    restarts: int = 20, tol: float = 1e-8,
                    maxiter: int = 200) -> float:
    """sup over the unit ball of l^{r'} of ||X c||_p by normalized ascent.

    Generalized power iteration: ascend along X^T phi_p(Xc) mapped through
    the dual exponent, renormalizing on the l^{r'} sphere; ties in the
    sup-norm normalization resolve to the lowest index through numpy's
    argmax convention.  Restarts guard against non-global stationary
    points at desk scale.
    """
    n, m = X.shape
    if not np.any(X):
        return 0.0
    r_conj = math.inf if r == 1.0 else r / (r - 1.0)

    def normalize(c):
        nrm = np.max(np.abs(c)) if r_conj == math.inf else \
            float(np.sum(np.abs(c) ** r_conj)) ** (1.0 / r_conj)
        return c if nrm == 0 else c / nrm

    best = 0.0
    starts = [np.ones(m), np.eye(m)[0] if m else np.ones(m)]
    starts += [rng.standard_normal(m) for _ in range(max(0, restarts - 2))]
    for c in starts[:restarts]:
        c = normalize(np.asarray(c, dtype=float))
        last = 0.0
        for _ in range(maxiter):
            y = X @ c
            val = float(np.sum(np.abs(y) ** p)) ** (1.0 / p)
            if val == 0.0:
                break
            g = X.T @ (np.sign(y) * np.abs(y) ** (p - 1.0))
            if r == 1.0:
                c_new = np.where(g >= 0, 1.0, -1.0)
            else:
                c_new = np.sign(g) * np.abs(g) ** (r - 1.0)
            c = normalize(c_new)
            if abs(val - last) <= tol * max(1.0, val):
                last = val
                break
            last = val
        best = max(best, last)
    return best


def diag_summing_bruteforce(lam: DiagonalSequence, p: float, r: float,
                            families: int, seed: int) -> float:
    """Definition-level lower bound for the multiplier's summing norm.

    Maximizes (sum_j ||M x_j||_p^r)^{1/r} over the canonical basis family
    plus seeded random families, normalized by the searched supremum of
    ||sum c_j x_j||_p over the l^{r'} ball.  Exact for rank-one symbols.
    """
    support = lam.support
    n = len(support)
    if n > 64:
        raise DomainError("brute force is limited to supports of size <= 64")
    if n == 0:
        return 0.0
    d = np.array([lam.values[nu] for nu in support])
    rng = np.random.default_rng(seed)
    best = 0.0
    for fam in range(max(1, families)):
        if fam == 0:
            X = np.eye(n)
        else:
            m = int(rng.integers(1, 2 * n + 1))
            X = rng.standard_normal((n, m))
        num = float(np.sum(np.sum(np.abs(d[:, None] * X) ** p, axis=0)
                           ** (r / p))) ** (1.0 / r)
        den = _mixed_norm_sup(X, r, p, rng)
        if den > 0:
            best = max(best, num / den)
    return best


# ---------------------------------------------------------------------------
# order boundedness and local blocks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OrderBoundedReport:
    """Windowed integral of mu-hat with the proof's kernel-form intermediate."""

    order_bounded: Optional[bool]
    value: float              # int over the window of mu-hat
    kernel_integral: float    # int dmu(z) / w(D(z,1))
    tail_certificate: Optional[TailCertificate]
    trace: tuple


def order_bounded_check(mu: Measure, w: Weight, p: float, alpha: float,
                        grid: GridSpec) -> OrderBoundedReport:
    """Decide order boundedness: finite integral of mu-hat over the plane.

    The verdict does not depend on (p, alpha); they are accepted for
    context and recorded nowhere else.  Atom contributions integrate the
    smooth reciprocal disk-mass field over each atom's unit disk, so for
    w = 1 the value is exact up to interpolation noise.
    """
    window = grid.window
    sub_windows = divergence_windows(window.n_max)
    wfield = weight_disk_field(w, grid)

    atom_vals = np.zeros(len(sub_windows))
    kernel_int = 0.0
    for z, m in zip(mu.atom_locations, mu.atom_masses):
        from .lattice import polar_disk_nodes, cell_of
        nodes, wts = polar_disk_nodes(z, 1.0, grid.step)
        contrib = m * float(np.sum(wts / wfield(nodes)))
        kernel_int += m / float(wfield(np.array([z]))[0])
        ring = max(abs(cell_of(z).j), abs(cell_of(z).k))
        for i, n in enumerate(sub_windows):
            if ring <= n:
                atom_vals[i] += contrib
    density_vals = np.zeros(len(sub_windows))
    if mu.log_density is not None:
        xs, mu_disk = _mu_disk_node_values(mu, grid)
        h = float(xs[1] - xs[0])
        Z = xs[:, None] + 1j * xs[None, :]
        w_disk = wfield(Z)
        dens = np.exp(np.minimum(mu.log_density(Z), 700.0))
        ring = _ring_index(xs)
        ring_sums = np.bincount(ring.ravel(),
                                weights=(dens / w_disk).ravel() * h * h,
                                minlength=window.n_max + 1)
        cum = np.cumsum(ring_sums)
        kernel_int += float(cum[-1])
        # mu-hat integral for the density part: mu(D(z,1))/w(D(z,1)) nodes
        mu_disk_dens = mu_disk.copy()
        for z, m in zip(mu.atom_locations, mu.atom_masses):
            mu_disk_dens -= m * (np.abs(Z - z) < 1.0)
        ring_sums2 = np.bincount(ring.ravel(),
                                 weights=(mu_disk_dens / w_disk).ravel() * h * h,
                                 minlength=window.n_max + 1)
        cum2 = np.cumsum(ring_sums2)
        density_vals = np.array([float(cum2[min(n, window.n_max)])
                                 for n in sub_windows])

    sums = list(atom_vals + density_vals)
    tail = tail_certificate(mu, w, 1.0, grid)
    cls = _classify_from_trace(sums, tail)
    verdict = {Classification.SUMMING: True,
               Classification.NOT_SUMMING: False,
               Classification.INCONCLUSIVE: None}[cls]
    return OrderBoundedReport(verdict, sums[-1], kernel_int, tail,
                              tuple(zip(sub_windows, sums)))


def local_summing_bound(mu: Measure, w: Weight, nu: LatticePoint, p: float,
                        grid: GridSpec) -> float:
    """Per-cell block bound (mu(Q_1(nu)) / w(Q_1(nu)))^{1/p}."""
    window = grid.window if grid.window.contains(nu) else Window(
        max(abs(nu.j), abs(nu.k)))
    w_cells = cell_mass_table(w, window, grid)
    mu_cells = measure_cell_masses(mu, window, grid)
    wm = w_cells.masses[nu]
    if not (wm > 0) or not math.isfinite(wm):
        raise DegenerateWeight(f"w(Q_1({nu})) = {wm}")
    return (mu_cells[nu] / wm) ** (1.0 / p)


def aggregate_local_bounds(mu: Measure, w: Weight, window: Window, p: float,
                           r: float, grid: GridSpec) -> float:
    """(sum_nu bound^r)^{1/r}: the block-diagonal aggregation of cell bounds."""
    vals = []
    w_cells = cell_mass_table(w, window, grid)
    mu_cells = measure_cell_masses(mu, window, grid)
    for nu in window.points():
        vals.append((mu_cells[nu] / w_cells.masses[nu]) ** (r / p))
    return math.fsum(vals) ** (1.0 / r)
