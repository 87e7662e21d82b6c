"""Cross-verification harness: every comparability claim becomes a ratio test.

Each suite computes an analytically independent pair (lattice vs integral
form, searched lower bound vs formula, exact Hilbert-space value vs
bracket) on seeded cases and checks the measured ratios against the pinned
calibration bands; reports are deterministic given the seed and grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.special import logsumexp

from .calibration import BAND_SLACK, CalibrationTable, default_calibration
from .fock import berezin_opnorm_bounds
from .lattice import GridSpec, Window, default_grid, node_axis
from .measures import Measure, measure_cell_masses
from .summing import (Classification, DiagonalSequence, _mu_disk_node_values,
                      classify_embedding, diag_summing_bruteforce,
                      diag_summing_estimate, ls_norm)
from .weights import (Weight, cell_mass_table, const_weight, dual_weight,
                      poly_weight, weight_disk_field)
from .measures import AffineSymbol, pullback_measure

CALIBRATION_WEIGHTS = ("const:1", "poly:2", "poly:-2")
DIS_EXPONENT_PAIRS = ((0.5, 0.5), (1.0, 1.0), (2.0, 1.0))


def _weight_by_label(label: str) -> Weight:
    from .weights import parse_weight
    return parse_weight(label)


def _normalize_seed(seed):
    """Coerce mixed tuples (ints, floats) into a valid generator seed."""
    if isinstance(seed, (tuple, list)):
        return [int(round(float(x) * 1009)) & 0xFFFFFFFF for x in seed]
    return seed


def seeded_atoms(seed, n: int = 20, radius: float = 3.0,
                 mass_range=(0.1, 1.0)) -> Measure:
    """Seeded atomic measure with atoms uniform in D(0, radius)."""
    rng = np.random.default_rng(_normalize_seed(seed))
    r = radius * np.sqrt(rng.uniform(0, 1, n))
    th = rng.uniform(0, 2 * math.pi, n)
    masses = rng.uniform(*mass_range, n)
    locs = r * np.exp(1j * th)
    return Measure(list(zip(locs, masses)), None, None, f"atoms[seed={seed}]")


@dataclass(frozen=True)
class SuiteReport:
    name: str
    passed: bool
    lines: tuple

    def __str__(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return "\n".join([f"suite {self.name}: {status}", *self.lines])


# ---------------------------------------------------------------------------
# lattice <-> integral equivalence
# ---------------------------------------------------------------------------

def _dis_sides(mu: Measure, w: Weight, gamma: float, eta: float,
               grid: GridSpec) -> tuple[float, float]:
    """Lattice sum and windowed integral of mu(.)^gamma / w(.)^eta."""
    w_cells = cell_mass_table(w, grid.window, grid)
    mu_cells = measure_cell_masses(mu, grid.window, grid)
    lattice = math.fsum(mu_cells[nu] ** gamma / w_cells.masses[nu] ** eta
                        for nu in grid.window.points())
    xs, mu_disk = _mu_disk_node_values(mu, grid)
    h = float(xs[1] - xs[0])
    w_disk = weight_disk_field(w, grid)(xs[:, None] + 1j * xs[None, :])
    integral = float(np.sum(np.maximum(mu_disk, 0.0) ** gamma
                            / w_disk ** eta)) * h * h
    return lattice, integral


def verify_lattice_integral_equivalence(cases: int = 20, seed: int = 0,
                                        grid: Optional[GridSpec] = None,
                                        calibration: Optional[CalibrationTable] = None
                                        ) -> SuiteReport:
    """Two-sided lattice/integral comparability on seeded atomic measures.

    For each case the ratio of the cell-mass sum to the disk-mass integral
    is recorded, checked for exact scale invariance under mu -> c*mu, and
    checked against the pinned band for its (weight, exponents) family.
    """
    grid = grid or default_grid()
    calib = calibration or default_calibration()
    lines = []
    passed = True
    for i in range(cases):
        w = _weight_by_label(CALIBRATION_WEIGHTS[i % 3])
        gamma, eta = DIS_EXPONENT_PAIRS[(i // 3) % 3]
        mu = seeded_atoms((seed, i), n=5 + (i * 7) % 20)
        lattice, integral = _dis_sides(mu, w, gamma, eta, grid)
        ratio = lattice / integral
        devs = []
        for c in (1e-3, 1e3):
            l2, i2 = _dis_sides(mu.scaled(c), w, gamma, eta, grid)
            devs.append(abs((l2 / i2) / ratio - 1.0))
        scale_ok = max(devs) <= 1e-9
        case_id = f"lemma_dis:{w.label}:g{gamma:g}:e{eta:g}"
        band_ok = calib.within(case_id, ratio)
        ok = scale_ok and band_ok
        passed = passed and ok
        lines.append(f"case {i:02d} {case_id} ratio={ratio:.6g} "
                     f"scale_dev={max(devs):.2e} "
                     f"{'ok' if ok else 'FAIL'}")
    return SuiteReport("lattice-integral", passed, tuple(lines))


def measure_dis_bands(cases: int = 20, seed: int = 0,
                      grid: Optional[GridSpec] = None) -> dict:
    """Measured min/max lattice/integral ratios per calibration family."""
    grid = grid or default_grid()
    bands: dict = {}
    for i in range(cases):
        w = _weight_by_label(CALIBRATION_WEIGHTS[i % 3])
        gamma, eta = DIS_EXPONENT_PAIRS[(i // 3) % 3]
        mu = seeded_atoms((seed, i), n=5 + (i * 7) % 20)
        lattice, integral = _dis_sides(mu, w, gamma, eta, grid)
        ratio = lattice / integral
        case_id = f"lemma_dis:{w.label}:g{gamma:g}:e{eta:g}"
        lo, hi = bands.get(case_id, (ratio, ratio))
        bands[case_id] = (min(lo, ratio), max(hi, ratio))
    return bands


# ---------------------------------------------------------------------------
# dual-pairing bridge (sub-two regime, Hilbert-space target)
# ---------------------------------------------------------------------------

def prop33_integral_side(p: float, w: Weight, mu: Measure, alpha: float,
                         grid: GridSpec) -> float:
    """The kernel-square double integral of the duality criterion.

    Computed as int (sum_i m_i e^{-a|z_i - u|^2})^{p'/2} w'(u) dA(u): the
    quadratic exponents are cancelled analytically before exponentiation,
    which realizes the log-domain requirement.
    """
    if not mu.is_atomic:
        raise ValueError("the duality bridge is computed for atomic measures")
    p_conj = p / (p - 1.0)
    xs = node_axis(grid.radius, grid.step)
    h = float(xs[1] - xs[0])
    Z = (xs[:, None] + 1j * xs[None, :]).ravel()
    wp = dual_weight(w, p)
    total = 0.0
    chunk = 200_000
    log_masses = np.log(mu.atom_masses)
    for i in range(0, Z.size, chunk):
        U = Z[i:i + chunk]
        log_inner = logsumexp(
            log_masses[None, :] - alpha * np.abs(U[:, None]
                                                 - mu.atom_locations[None, :]) ** 2,
            axis=1)
        total += float(np.sum(np.exp(0.5 * p_conj * log_inner
                                     + wp.log_density(U))))
    return total * h * h


def prop33_lattice_side(p: float, w: Weight, mu: Measure,
                        grid: GridSpec) -> float:
    """sum of (mu(Q_1)/w(Q_1)^{2/p})^{p'/2} over the window."""
    p_conj = p / (p - 1.0)
    w_cells = cell_mass_table(w, grid.window, grid)
    mu_cells = measure_cell_masses(mu, grid.window, grid)
    return math.fsum((mu_cells[nu] / w_cells.masses[nu] ** (2.0 / p))
                     ** (0.5 * p_conj) for nu in grid.window.points())


def verify_prop33_equivalence(p: float, w: Weight, mu: Measure,
                              grid: Optional[GridSpec] = None,
                              alpha: float = 1.0) -> tuple[float, float, float]:
    """Both sides of the duality bridge and their ratio (integral/lattice)."""
    if not 1.0 < p < 2.0:
        raise ValueError("the bridge requires 1 < p < 2")
    grid = grid or default_grid()
    b = prop33_integral_side(p, w, mu, alpha, grid)
    d = prop33_lattice_side(p, w, mu, grid)
    ratio = b / d if d > 0 else (0.0 if b == 0 else math.inf)
    return b, d, ratio


def prop33_suite(seed: int = 0, grid: Optional[GridSpec] = None,
                 calibration: Optional[CalibrationTable] = None,
                 n_seeds: int = 10) -> SuiteReport:
    grid = grid or default_grid()
    calib = calibration or default_calibration()
    lines = []
    passed = True
    w = const_weight(1.0)
    for p in (1.25, 1.5, 1.75):
        for i in range(n_seeds):
            mu = seeded_atoms((seed, p, i), n=10)
            b, d, ratio = verify_prop33_equivalence(p, w, mu, grid)
            b2, d2, _ = verify_prop33_equivalence(p, w, mu.scaled(10.0), grid)
            p_conj = p / (p - 1.0)
            scale = 10.0 ** (0.5 * p_conj)
            scale_ok = (abs(b2 / b - scale) <= 1e-6 * scale
                        and abs(d2 / d - scale) <= 1e-6 * scale)
            band_ok = calib.within(f"prop33:p{p:g}", ratio)
            ok = scale_ok and band_ok
            passed = passed and ok
            lines.append(f"p={p:g} seed={i} ratio={ratio:.6g} "
                         f"{'ok' if ok else 'FAIL'}")
    return SuiteReport("prop33", passed, tuple(lines))


def measure_prop33_bands(seed: int = 0, grid: Optional[GridSpec] = None,
                         n_seeds: int = 10) -> dict:
    grid = grid or default_grid()
    bands: dict = {}
    w = const_weight(1.0)
    for p in (1.25, 1.5, 1.75):
        for i in range(n_seeds):
            mu = seeded_atoms((seed, p, i), n=10)
            _, _, ratio = verify_prop33_equivalence(p, w, mu, grid)
            key = f"prop33:p{p:g}"
            lo, hi = bands.get(key, (ratio, ratio))
            bands[key] = (min(lo, ratio), max(hi, ratio))
    return bands


# ---------------------------------------------------------------------------
# Hilbert-Schmidt oracle
# ---------------------------------------------------------------------------

def hs_exact_pi2(alpha: float, total_mass: float) -> float:
    """Exact 2-summing norm of the embedding at p = 2, w = 1.

    The normalized monomials e_n = z^n sqrt(a^{n+1} / (pi n!)) are an
    orthonormal basis; summing their squared images against the measure
    telescopes to (a/pi) * mu(C), so pi_2 = sqrt(a * mu(C) / pi)
    independently of where the mass sits.
    """
    return math.sqrt(alpha * total_mass / math.pi)


def verify_hs_oracle(alpha: float, atoms: Measure,
                     grid: Optional[GridSpec] = None) -> SuiteReport:
    """Check that the p = 2 bracket contains the exact Hilbert-space value."""
    grid = grid or default_grid()
    exact = hs_exact_pi2(alpha, float(np.sum(atoms.atom_masses)))
    verdict = classify_embedding(2.0, 2.0, alpha, const_weight(1.0), atoms, grid)
    inside = verdict.pi_r_low <= exact <= verdict.pi_r_high
    width_ok = verdict.pi_r_high <= 3.0 * verdict.pi_r_low
    lines = (f"exact pi_2 = {exact:.9g}",
             f"bracket = [{verdict.pi_r_low:.9g}, {verdict.pi_r_high:.9g}]",
             f"inside={inside} width_ok={width_ok}")
    return SuiteReport("hs", inside and width_ok, lines)


def hs_suite(seed: int = 0, grid: Optional[GridSpec] = None) -> SuiteReport:
    grid = grid or default_grid()
    lines = []
    passed = True
    for i in range(5):
        mu = seeded_atoms((seed, i), n=50)
        rep = verify_hs_oracle(1.0, mu, grid)
        passed = passed and rep.passed
        lines.append(f"seed={i} " + ("ok" if rep.passed else "FAIL")
                     + " | " + rep.lines[0] + " " + rep.lines[1])
    return SuiteReport("hs", passed, tuple(lines))


# ---------------------------------------------------------------------------
# Berezin equivalence
# ---------------------------------------------------------------------------

def verify_berezin_equivalence(p: float, q: float, w: Weight, mu: Measure,
                               trials: int = 40, seed: int = 0,
                               grid: Optional[GridSpec] = None,
                               alpha: float = 1.0,
                               calibration: Optional[CalibrationTable] = None
                               ) -> tuple[float, float, bool]:
    """Searched lower bound vs lattice proxy for the Berezin operator norm.

    Returns (lower^{q/2}, proxy, in_band).  Both sides are linear in the
    measure, and the searched lower bound can never certifiably exceed the
    banded proxy.
    """
    grid = grid or default_grid()
    calib = calibration or default_calibration()
    bounds = berezin_opnorm_bounds(p, q, w, mu, trials, seed, grid, alpha)
    lower_pow = bounds.lower ** (0.5 * q)
    if bounds.lattice_proxy == 0.0:
        return lower_pow, 0.0, lower_pow == 0.0
    ratio = lower_pow / bounds.lattice_proxy
    return lower_pow, bounds.lattice_proxy, calib.within(f"berezin:p{p:g}:q{q:g}", ratio)


BEREZIN_CASES = ((1.5, 2.0), (1.5, 1.5), (1.75, 1.0))


def berezin_suite(seed: int = 0, grid: Optional[GridSpec] = None,
                  calibration: Optional[CalibrationTable] = None) -> SuiteReport:
    grid = grid or default_grid()
    lines = []
    passed = True
    w = const_weight(1.0)
    for p, q in BEREZIN_CASES:
        for i in range(3):
            mu = seeded_atoms((seed, p, q, i), n=30, radius=4.0)
            lower_pow, proxy, ok = verify_berezin_equivalence(
                p, q, w, mu, 40, seed + i, grid, 1.0, calibration)
            # linear scaling of both sides in the measure
            lp2, proxy2, _ = verify_berezin_equivalence(
                p, q, w, mu.scaled(3.0), 40, seed + i, grid, 1.0, calibration)
            lin_ok = (abs(lp2 / lower_pow - 3.0) <= 1e-6 * 3.0
                      and abs(proxy2 / proxy - 3.0) <= 1e-6 * 3.0)
            ok = ok and lin_ok
            passed = passed and ok
            lines.append(f"p={p:g} q={q:g} seed={i} lower^(q/2)={lower_pow:.5g} "
                         f"proxy={proxy:.5g} {'ok' if ok else 'FAIL'}")
    return SuiteReport("berezin", passed, tuple(lines))


def measure_berezin_bands(seed: int = 0, grid: Optional[GridSpec] = None) -> dict:
    grid = grid or default_grid()
    bands: dict = {}
    w = const_weight(1.0)
    for p, q in BEREZIN_CASES:
        for i in range(3):
            mu = seeded_atoms((seed, p, q, i), n=30, radius=4.0)
            bounds = berezin_opnorm_bounds(p, q, w, mu, 40, seed + i, grid, 1.0)
            ratio = bounds.lower ** (0.5 * q) / bounds.lattice_proxy
            key = f"berezin:p{p:g}:q{q:g}"
            lo, hi = bands.get(key, (ratio, ratio))
            bands[key] = (min(lo, ratio), max(hi, ratio))
    return bands


# ---------------------------------------------------------------------------
# diagonal consistency
# ---------------------------------------------------------------------------

def _seeded_sequence(seed, n: int) -> DiagonalSequence:
    rng = np.random.default_rng(seed)
    pts = [nu for nu in Window(4).points()]
    idx = rng.choice(len(pts), size=n, replace=False)
    vals = rng.uniform(0.1, 2.0, n)
    return DiagonalSequence({pts[i]: float(v) for i, v in zip(idx, vals)})


def verify_diag_consistency(seed: int = 0, cases: int = 50,
                            calibration: Optional[CalibrationTable] = None
                            ) -> SuiteReport:
    """Brute-force lower bounds against the formula values, plus exact cases.

    Rank-one symbols must reproduce their sup norm to 1e-6; the identity
    on an 8-dimensional Hilbert space must recover sqrt(8) within 10%; and
    across seeded cases the searched lower bound must stay below the
    pinned band times the formula value.
    """
    calib = calibration or default_calibration()
    lines = []
    passed = True

    one = DiagonalSequence({Window(0).points().__next__(): 1.0})
    rank_one = diag_summing_bruteforce(one, 3.0, 2.0, 4, seed)
    ok = abs(rank_one - 1.0) <= 1e-6
    passed = passed and ok
    lines.append(f"rank-one: {rank_one:.9f} {'ok' if ok else 'FAIL'}")

    eight = DiagonalSequence({nu: 1.0 for nu in list(Window(4).points())[:8]})
    hs8 = diag_summing_bruteforce(eight, 2.0, 2.0, 4, seed)
    ok = hs8 >= 0.9 * math.sqrt(8.0)
    passed = passed and ok
    lines.append(f"identity on l2^8: {hs8:.6f} vs sqrt(8)={math.sqrt(8):.6f} "
                 f"{'ok' if ok else 'FAIL'}")

    ps = (2.0, 3.0, 4.0)
    for i in range(cases):
        p = ps[i % 3]
        p_conj = p / (p - 1.0)
        rs = (1.0, p_conj, 2.0, p, p + 1.0)
        r = rs[(i // 3) % 5]
        lam = _seeded_sequence((seed, i), n=1 + (i * 5) % 16)
        brute = diag_summing_bruteforce(lam, p, r, 4, seed * 1000 + i)
        formula = diag_summing_estimate(lam, p, r)
        ratio = brute / formula
        ok = calib.within(f"diag:p{p:g}", ratio) or ratio <= 1.0
        passed = passed and ok
        if not ok or i % 10 == 0:
            lines.append(f"case {i:02d} p={p:g} r={r:g} brute/formula="
                         f"{ratio:.4f} {'ok' if ok else 'FAIL'}")
    return SuiteReport("diag", passed, tuple(lines))


def measure_diag_bands(seed: int = 0, cases: int = 50) -> dict:
    bands: dict = {}
    ps = (2.0, 3.0, 4.0)
    for i in range(cases):
        p = ps[i % 3]
        p_conj = p / (p - 1.0)
        rs = (1.0, p_conj, 2.0, p, p + 1.0)
        r = rs[(i // 3) % 5]
        lam = _seeded_sequence((seed, i), n=1 + (i * 5) % 16)
        brute = diag_summing_bruteforce(lam, p, r, 4, seed * 1000 + i)
        formula = diag_summing_estimate(lam, p, r)
        ratio = brute / formula
        key = f"diag:p{p:g}"
        lo, hi = bands.get(key, (ratio, ratio))
        bands[key] = (min(lo, ratio), max(hi, ratio))
    return bands


# ---------------------------------------------------------------------------
# monotonicity across (p, alpha)
# ---------------------------------------------------------------------------

def verify_monotonicity(seed: int = 0, grid: Optional[GridSpec] = None,
                        p: float = 2.5, r: float = 2.0,
                        alpha: float = 1.0) -> SuiteReport:
    """Summability certified at (p, alpha) persists at smaller q, any beta.

    Checked on the affine pull-back family with |a| < 1 (the measure stays
    the one built at the original parameters).
    """
    grid = grid or default_grid()
    rng = np.random.default_rng(seed)
    w = const_weight(1.0)
    lines = []
    passed = True
    for i in range(3):
        a = (0.3 + 0.4 * rng.uniform()) * np.exp(1j * rng.uniform(0, 2 * math.pi))
        b = rng.uniform(-1.5, 1.5) + 1j * rng.uniform(-1.5, 1.5)
        mu = pullback_measure(AffineSymbol(complex(a), complex(b)), p, alpha)
        base = classify_embedding(p, r, alpha, w, mu, grid)
        ok = base.classification is Classification.SUMMING
        for q in (1.5, min(p, 2.0)):
            for beta in (alpha / 2, alpha, 2 * alpha):
                v = classify_embedding(q, r, beta, w, mu, grid)
                ok = ok and v.classification is Classification.SUMMING
        passed = passed and ok
        lines.append(f"case {i} a={a:.3f} b={b:.3f} {'ok' if ok else 'FAIL'}")
    return SuiteReport("monotonicity", passed, tuple(lines))


# ---------------------------------------------------------------------------
# fock-space regression bands (measured on the reduced grid)
# ---------------------------------------------------------------------------

REDUCED_GRID = GridSpec(step=0.1, radius=8.0, window=Window(6))


def _seeded_test_function(seed, p: float, alpha: float, w: Weight,
                          grid: GridSpec):
    from .fock import synthesize_test_function
    from .lattice import LatticePoint
    rng = np.random.default_rng(_normalize_seed(seed))
    pts = [nu for nu in Window(3).points()]
    size = int(rng.integers(1, 7))
    idx = rng.choice(len(pts), size=size, replace=False)
    coeffs = {pts[i]: complex(a, b) for i, a, b in
              zip(idx, rng.standard_normal(size), rng.standard_normal(size))}
    return synthesize_test_function(coeffs, p, alpha, w, grid), coeffs


def measure_kernel_ratio_bands(grid: Optional[GridSpec] = None) -> dict:
    """direct/proxy kernel-norm ratio over |u| <= 5, per weight family."""
    from .fock import kernel_norm
    grid = grid or REDUCED_GRID
    us = [0j, 1 + 0j, 2 + 0j, 3 + 0j, 4 + 0j, 5 + 0j,
          1j, 3j, 1 + 1j, 2 + 2j, 3 - 2j, 3 + 4j]
    bands: dict = {}
    for label in CALIBRATION_WEIGHTS:
        w = _weight_by_label(label)
        ratios = [kernel_norm(u, 2.0, 1.0, w, grid).ratio for u in us]
        bands[f"kernel_ratio:{label}:p2"] = (min(ratios), max(ratios))
    return bands


def measure_hat_equiv_bands(seed: int = 0,
                            grid: Optional[GridSpec] = None) -> dict:
    """Norm ratios between a weight and its cell-averaged companion."""
    from .fock import weighted_norm
    from .weights import averaged_weight
    grid = grid or REDUCED_GRID
    bands: dict = {}
    for label in CALIBRATION_WEIGHTS:
        w = _weight_by_label(label)
        what = averaged_weight(w, grid)
        ratios = []
        for i in range(20):
            f, _ = _seeded_test_function((seed, i), 2.0, 1.0, w, grid)
            ratios.append(weighted_norm(f, grid, w) / weighted_norm(f, grid, what))
        bands[f"hat_equiv:{label}:p2"] = (min(ratios), max(ratios))
    return bands


def measure_synthesis_bands(seed: int = 0,
                            grid: Optional[GridSpec] = None) -> dict:
    """||f||/||c||_{l^p} for kernel combinations, per family and p."""
    from .fock import weighted_norm
    grid = grid or REDUCED_GRID
    bands: dict = {}
    for label in CALIBRATION_WEIGHTS:
        w = _weight_by_label(label)
        for p in (2.0, 3.0):
            ratios = []
            for i in range(12):
                f, coeffs = _seeded_test_function((seed, p, i), p, 1.0, w, grid)
                c_norm = ls_norm([abs(c) for c in coeffs.values()], p)
                ratios.append(weighted_norm(f, grid) / c_norm)
            bands[f"synthesis:{label}:p{p:g}"] = (min(ratios), max(ratios))
    return bands


def measure_pointwise_bands(seed: int = 0,
                            grid: Optional[GridSpec] = None) -> dict:
    """Pointwise-bound ratios at random evaluation points, per family."""
    from .fock import pointwise_bound_check
    grid = grid or REDUCED_GRID
    bands: dict = {}
    for label in CALIBRATION_WEIGHTS:
        w = _weight_by_label(label)
        rng = np.random.default_rng(seed)
        ratios = []
        for i in range(15):
            f, _ = _seeded_test_function((seed, i, 3), 2.0, 1.0, w, grid)
            z = complex(rng.uniform(-3, 3), rng.uniform(-3, 3))
            ratios.append(pointwise_bound_check(f, z, 1.0, grid))
        bands[f"pointwise:{label}:p2"] = (min(ratios), max(ratios))
    return bands


def measure_dual_bands(grid: Optional[GridSpec] = None) -> dict:
    """w(Q_1(nu)) * w'(Q_1(nu))^{p/p'} across the window (duality band)."""
    grid = grid or REDUCED_GRID
    bands: dict = {}
    for label, p in (("poly:2", 2.0),):
        w = _weight_by_label(label)
        wp = dual_weight(w, p)
        mw = cell_mass_table(w, grid.window, grid)
        mwp = cell_mass_table(wp, grid.window, grid)
        p_conj = p / (p - 1.0)
        vals = [mw.masses[nu] * mwp.masses[nu] ** (p / p_conj)
                for nu in grid.window.points()]
        bands[f"dual_band:{label}:p{p:g}"] = (min(vals), max(vals))
    return bands


def measure_pi_band(seed: int = 0, grid: Optional[GridSpec] = None,
                    margin: float = 1.7) -> dict:
    """Exact-to-midpoint bracket ratios at p = 2, widened by the margin.

    At p = 2, w = 1 the bracket midpoint is exact for every atomic
    measure; the recorded margin covers the p != 2 regimes, where no
    independent oracle exists, while keeping the bracket width below 3.
    """
    grid = grid or default_grid()
    ratios = []
    for i in range(5):
        mu = seeded_atoms((seed, i), n=50)
        exact = hs_exact_pi2(1.0, float(np.sum(mu.atom_masses)))
        v = classify_embedding(2.0, 2.0, 1.0, const_weight(1.0), mu, grid)
        mid = v.lattice_norm * (2.0 * 1.0 / (2.0 * math.pi)) ** 0.5
        ratios.append(exact / mid)
    return {"pi_band:const": (min(ratios) / margin, max(ratios) * margin)}


def compute_calibration(seed: int = 0, version: int = 1) -> "CalibrationTable":
    """Measure every band on the fixed calibration suite (slow; run once)."""
    from .calibration import CalibrationTable
    bands: dict = {}
    bands.update(measure_dis_bands(seed=seed))
    bands.update(measure_prop33_bands(seed=seed))
    bands.update(measure_berezin_bands(seed=seed))
    bands.update(measure_diag_bands(seed=seed))
    bands.update(measure_kernel_ratio_bands())
    bands.update(measure_hat_equiv_bands(seed=seed))
    bands.update(measure_synthesis_bands(seed=seed))
    bands.update(measure_pointwise_bands(seed=seed))
    bands.update(measure_dual_bands())
    bands.update(measure_pi_band(seed=seed))
    bands["pi_band:default"] = (0.5, 2.0)
    return CalibrationTable(version, bands)


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------

def run_suite(name: str, seed: int = 0,
              grid: Optional[GridSpec] = None) -> SuiteReport:
    if name == "lattice-integral":
        return verify_lattice_integral_equivalence(seed=seed, grid=grid)
    if name == "prop33":
        return prop33_suite(seed=seed, grid=grid)
    if name == "hs":
        return hs_suite(seed=seed, grid=grid)
    if name == "berezin":
        return berezin_suite(seed=seed, grid=grid)
    if name == "diag":
        return verify_diag_consistency(seed=seed)
    if name == "monotonicity":
        return verify_monotonicity(seed=seed, grid=grid)
    raise ValueError(f"unknown suite {name!r}; available: "
                     f"lattice-integral, prop33, hs, berezin, diag, monotonicity")


SUITE_NAMES = ("lattice-integral", "prop33", "hs", "berezin", "diag",
               "monotonicity")
