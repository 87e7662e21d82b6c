"""Positive Borel measures: atoms plus densities, and derived measures.

A measure is a finite list of atoms together with an optional density,
plus an optional Gaussian decay envelope (a pointwise upper bound of the
log-density of the form c0 - c2|z|^2, c2 >= 0).  The envelope is what
lets finite-window computations certify statements about the whole plane:
without one, verdicts that depend on the tail are reported inconclusive.

Atoms exactly on a disk boundary are excluded (disks are open) and
flagged with a warning; cell membership follows the half-open convention,
so summing cell masses over a window reproduces the windowed total mass
exactly for atomic measures.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from scipy.special import logsumexp

from .errors import BoundaryAtomWarning, DegenerateWeight
from .lattice import (GridSpec, LatticePoint, Window, cell_of,
                      polar_disk_nodes, square_nodes)
from .weights import Weight, tilt_weight
from . import weights as _weights

BOUNDARY_ATOM_TOL = 1e-12


@dataclass(frozen=True)
class GaussEnvelope:
    """Upper bound log-density(z) <= c0 - c2 |z|^2 with c2 >= 0."""

    c0: float
    c2: float = 0.0

    def __post_init__(self) -> None:
        if self.c2 < 0:
            raise ValueError("envelope decay coefficient must be >= 0")

    def log_at(self, radius: float) -> float:
        return self.c0 - self.c2 * radius * radius


class Measure:
    """Atoms plus an optional density, with an optional decay envelope.

    Measures compare by identity so derived tables can be cached per
    instance.  When both a density and an envelope are given, the envelope
    is checked against the density at 1000 seeded probe points.
    """

    def __init__(self, atoms=None, log_density: Optional[Callable] = None,
                 envelope: Optional[GaussEnvelope] = None, label: str = "mu"):
        if atoms is None or len(atoms) == 0:
            self.atom_locations = np.zeros(0, dtype=complex)
            self.atom_masses = np.zeros(0)
        else:
            locs, masses = zip(*atoms)
            self.atom_locations = np.asarray(locs, dtype=complex)
            self.atom_masses = np.asarray(masses, dtype=float)
        if np.any(self.atom_masses <= 0):
            raise ValueError("atom masses must be positive")
        self.log_density = log_density
        self.envelope = envelope
        self.label = label
        if log_density is not None and envelope is not None:
            rng = np.random.default_rng(0)
            probes = rng.uniform(-20, 20, 1000) + 1j * rng.uniform(-20, 20, 1000)
            ld = np.asarray(log_density(probes))
            bound = envelope.c0 - envelope.c2 * np.abs(probes) ** 2
            if np.any(ld > bound + 1e-9):
                raise ValueError("envelope does not dominate the density")

    @property
    def atoms(self) -> list[tuple[complex, float]]:
        return list(zip(self.atom_locations.tolist(), self.atom_masses.tolist()))

    @property
    def is_atomic(self) -> bool:
        return self.log_density is None

    def density(self, z) -> np.ndarray:
        if self.log_density is None:
            return np.zeros(np.shape(z))
        return np.exp(self.log_density(np.asarray(z, dtype=complex)))

    def scaled(self, c: float) -> "Measure":
        """The measure c * mu (c > 0)."""
        if c <= 0:
            raise ValueError("scale factor must be positive")
        log_c = math.log(c)
        ld = None
        if self.log_density is not None:
            base = self.log_density
            ld = lambda z: base(z) + log_c
        env = None
        if self.envelope is not None:
            env = GaussEnvelope(self.envelope.c0 + log_c, self.envelope.c2)
        return Measure(list(zip(self.atom_locations, self.atom_masses * c)),
                       ld, env, f"{c:g}*{self.label}")

    def __add__(self, other: "Measure") -> "Measure":
        atoms = (list(zip(self.atom_locations, self.atom_masses))
                 + list(zip(other.atom_locations, other.atom_masses)))
        lds = [m.log_density for m in (self, other) if m.log_density is not None]
        ld = None
        if len(lds) == 1:
            ld = lds[0]
        elif len(lds) == 2:
            f1, f2 = lds
            ld = lambda z: np.logaddexp(f1(z), f2(z))
        env = None
        if self.envelope is not None and other.envelope is not None:
            env = GaussEnvelope(np.logaddexp(self.envelope.c0, other.envelope.c0),
                                min(self.envelope.c2, other.envelope.c2))
        elif self.log_density is None:
            env = other.envelope
        elif other.log_density is None:
            env = self.envelope
        return Measure(atoms, ld, env, f"sum:{self.label};{other.label}")

    def __repr__(self) -> str:
        return f"Measure({self.label!r})"


def zero_measure() -> Measure:
    return Measure([], None, GaussEnvelope(-math.inf, 0.0), "zero")


def dirac(location: complex, mass: float = 1.0) -> Measure:
    return Measure([(location, mass)], None, None, f"dirac:{complex(location)}")


def lebesgue_measure() -> Measure:
    return Measure([], lambda z: np.zeros(np.shape(z)),
                   GaussEnvelope(0.0, 0.0), "lebesgue")


def gauss_measure(beta: float) -> Measure:
    """Density e^{-beta |z|^2}; envelope only certifies decay for beta > 0."""
    env = GaussEnvelope(0.0, beta) if beta >= 0 else None
    return Measure([], lambda z: -beta * np.abs(z) ** 2, env, f"gauss:{beta:g}")


# ---------------------------------------------------------------------------
# symbols
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AffineSymbol:
    """z -> a z + b (|a| >= 1 allowed; the classifier handles all cases)."""

    a: complex
    b: complex

    def __call__(self, z):
        return self.a * np.asarray(z, dtype=complex) + self.b


class PolynomialSymbol:
    """Polynomial in the monomial basis, low-order coefficients first."""

    def __init__(self, coefficients):
        coeffs = [complex(c) for c in coefficients] or [0j]
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs.pop()
        self.coefficients = tuple(coeffs)

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def derivative(self) -> "PolynomialSymbol":
        c = self.coefficients
        return PolynomialSymbol([i * c[i] for i in range(1, len(c))] or [0j])

    def __call__(self, z):
        return np.polynomial.polynomial.polyval(np.asarray(z, dtype=complex),
                                                np.asarray(self.coefficients))

    def __repr__(self) -> str:
        return f"PolynomialSymbol({list(self.coefficients)!r})"


# ---------------------------------------------------------------------------
# masses
# ---------------------------------------------------------------------------

def mass_on_disk(mu: Measure, z: complex, r: float, grid: GridSpec) -> float:
    """mu(D(z, r)) with the open-disk convention for atoms."""
    if r <= 0:
        raise ValueError("r must be positive")
    z = complex(z)
    total = 0.0
    if mu.atom_locations.size:
        d = np.abs(mu.atom_locations - z)
        near = np.abs(d - r) < BOUNDARY_ATOM_TOL
        if np.any(near):
            warnings.warn(
                f"{int(near.sum())} atom(s) within {BOUNDARY_ATOM_TOL:g} of the "
                f"boundary of D({z}, {r}) excluded (open disk)",
                BoundaryAtomWarning, stacklevel=2)
        total += float(np.sum(mu.atom_masses[(d < r) & ~near]))
    if mu.log_density is not None:
        Z, wts = polar_disk_nodes(z, r, grid.step)
        total += float(np.exp(logsumexp(mu.log_density(Z), b=wts)))
    return total


def mass_on_cell(mu: Measure, nu: LatticePoint, grid: GridSpec) -> float:
    """mu(Q_1(nu)) with half-open cell semantics for atoms."""
    total = 0.0
    if mu.atom_locations.size:
        inside = np.array([cell_of(z) == nu for z in mu.atom_locations])
        total += float(np.sum(mu.atom_masses[inside]))
    if mu.log_density is not None:
        Z1, dA1 = square_nodes(nu.z, 1.0, grid.step, refine=1)
        Z2, dA2 = square_nodes(nu.z, 1.0, grid.step, refine=2)
        i1 = float(np.exp(logsumexp(mu.log_density(Z1)))) * dA1
        i2 = float(np.exp(logsumexp(mu.log_density(Z2)))) * dA2
        total += max((4.0 * i2 - i1) / 3.0, 0.0)
    return total


@lru_cache(maxsize=64)
def measure_cell_masses(mu: Measure, window: Window, grid: GridSpec) -> dict:
    """mu(Q_1(nu)) for every window cell (atoms binned exactly; cached)."""
    masses = {nu: 0.0 for nu in window.points()}
    for z, m in zip(mu.atom_locations, mu.atom_masses):
        nu = cell_of(z)
        if nu in masses:
            masses[nu] += float(m)
    if mu.log_density is not None:
        pts = list(window.points())
        centers = np.array([nu.z for nu in pts])
        Z1, dA1 = square_nodes(0j, 1.0, grid.step, refine=1)
        Z2, dA2 = square_nodes(0j, 1.0, grid.step, refine=2)
        rel1, rel2 = Z1.ravel(), Z2.ravel()
        chunk = max(1, 4_000_000 // rel2.size)
        for i in range(0, centers.size, chunk):
            c = centers[i:i + chunk, None]
            i1 = np.exp(logsumexp(mu.log_density(c + rel1[None, :]), axis=1)) * dA1
            i2 = np.exp(logsumexp(mu.log_density(c + rel2[None, :]), axis=1)) * dA2
            vals = np.maximum((4.0 * i2 - i1) / 3.0, 0.0)
            for nu, v in zip(pts[i:i + chunk], vals):
                masses[nu] += float(v)
    return masses


def mu_hat(mu: Measure, w: Weight, z: complex, grid: GridSpec) -> float:
    """The decision quantity mu(D(z,1)) / w(D(z,1))."""
    denom = _weights.mass_on_disk(w, z, 1.0, grid)
    if not (denom > 0) or not math.isfinite(denom):
        raise DegenerateWeight(f"w(D({z},1)) = {denom} for {w.label}")
    return mass_on_disk(mu, z, 1.0, grid) / denom


# ---------------------------------------------------------------------------
# derived measures
# ---------------------------------------------------------------------------

def pullback_measure(phi: AffineSymbol, p: float, alpha: float) -> Measure:
    """Transport of the Gaussian-weighted area measure through z -> az+b.

    For a != 0 the result has the density
    |a|^{-2} exp(-(p a/2)(|(v-b)/a|^2 - |v|^2)), which carries a Gaussian
    envelope exactly when |a| < 1; for a = 0 it is a genuine atom at b.
    """
    if p <= 0 or alpha <= 0:
        raise ValueError("p and alpha must be positive")
    a, b = complex(phi.a), complex(phi.b)
    pa = p * alpha
    if a == 0:
        mass = (2.0 * math.pi / pa) * math.exp(0.5 * pa * abs(b) ** 2)
        return Measure([(b, mass)], None, None, f"pullback:a=0,b={b}")

    aa = abs(a) ** 2

    def log_density(v):
        v = np.asarray(v, dtype=complex)
        return (-math.log(aa)
                - 0.5 * pa * (np.abs((v - b) / a) ** 2 - np.abs(v) ** 2))

    env = None
    if abs(a) < 1:
        q_full = 0.5 * pa * (1.0 - aa) / aa
        c2 = 0.5 * q_full
        c0 = (-math.log(aa) - 0.5 * pa * abs(b) ** 2 / aa
              + pa * abs(b) ** 2 / (aa * (1.0 - aa)))
        env = GaussEnvelope(c0, c2)
    return Measure([], log_density, env,
                   f"pullback:a={a},b={b},p={p:g},alpha={alpha:g}")


def volterra_measure(g: PolynomialSymbol, p: float) -> Measure:
    """The measure |g'(z)|^p (1+|z|)^{-p} dA deciding Volterra summability."""
    if p <= 0:
        raise ValueError("p must be positive")
    dg = g.derivative()
    if dg.degree == 0 and dg.coefficients[0] == 0:
        return zero_measure()

    def log_density(z):
        z = np.asarray(z, dtype=complex)
        with np.errstate(divide="ignore"):
            return p * (np.log(np.abs(dg(z))) - np.log1p(np.abs(z)))

    env = None
    if dg.degree <= 1:
        # |g'(z)|/(1+|z|) is bounded by the coefficient sum when deg g' <= 1
        c_sum = float(np.sum(np.abs(dg.coefficients)))
        env = GaussEnvelope(p * math.log(c_sum), 0.0)
    label = "volterra:" + ",".join(str(c) for c in g.coefficients)
    return Measure([], log_density, env, label)


def tilted_weight(w: Weight, k: int, p: float) -> Weight:
    """w(z) (1+|z|)^{-kp}, the weight the k-th derivative reduces to."""
    if k == 0:
        return w
    return tilt_weight(w, k, p)


# ---------------------------------------------------------------------------
# moment condition
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MomentReport:
    """Windowed Gaussian moments and a three-valued finiteness verdict."""

    ok: Optional[bool]
    moments: tuple
    reason: str


def moment_condition(mu: Measure, p: float, alpha: float, l_max: int,
                     grid: GridSpec) -> MomentReport:
    """Check finiteness of int |z|^{lp} e^{-(pa/2)|z|^2} dmu for l = 0..l_max.

    Atom contributions are exact finite sums.  Density contributions are
    integrated over growing truncation disks; sustained growth marks the
    moment divergent, and an envelope (c2 >= 0 suffices, thanks to the
    Gaussian factor) certifies the tail.  Densities without an envelope
    yield an inconclusive verdict unless divergence is detected.
    """
    if l_max < 0:
        raise ValueError("l_max must be >= 0")
    pa2 = 0.5 * p * alpha
    radii = [grid.radius / 4, grid.radius / 2, grid.radius]
    moments = []
    diverging = False
    for l in range(l_max + 1):
        lp = l * p
        total = 0.0
        if mu.atom_locations.size:
            r_at = np.abs(mu.atom_locations)
            with np.errstate(divide="ignore"):
                log_terms = np.where(r_at > 0, lp * np.log(r_at),
                                     0.0 if lp == 0 else -math.inf)
            total += float(np.sum(mu.atom_masses
                                  * np.exp(log_terms - pa2 * r_at ** 2)))
        if mu.log_density is not None:
            vals = []
            for R in radii:
                Z, wts = polar_disk_nodes(0j, R, max(grid.step, R / 160.0))
                r_nodes = np.abs(Z)
                with np.errstate(divide="ignore"):
                    log_f = (mu.log_density(Z) - pa2 * r_nodes ** 2
                             + (lp * np.log(r_nodes) if lp > 0 else 0.0))
                vals.append(float(np.exp(logsumexp(log_f, b=wts))))
            if vals[1] > 0 and vals[2] > 2.0 * vals[1] and vals[1] > 2.0 * vals[0]:
                diverging = True
            total += vals[-1]
        moments.append(total)
    if diverging:
        return MomentReport(False, tuple(moments),
                            "windowed moments keep growing with the radius")
    if mu.log_density is not None and mu.envelope is None:
        return MomentReport(None, tuple(moments),
                            "density has no envelope: tail not certifiable")
    if mu.log_density is not None:
        # envelope tail: integrand <= |z|^{lp} e^{c0 - (pa2 + c2)|z|^2}
        decay = pa2 + mu.envelope.c2
        R = grid.radius
        l_big = l_max * p
        tail_log = (mu.envelope.c0 + math.log(2 * math.pi)
                    + _log_radial_tail(l_big, decay, R))
        ref = max(max(moments), 1e-12)
        if not tail_log < math.log(ref) + math.log(0.01):
            return MomentReport(None, tuple(moments),
                                "envelope tail bound not negligible at this radius")
    return MomentReport(True, tuple(moments), "all windowed moments finite")


def _log_radial_tail(power: float, decay: float, R: float) -> float:
    """log of an upper bound for int_R^inf r^{power+1} e^{-decay r^2} dr.

    Uses r^{power} <= R^{power} e^{(r^2 - R^2) * power / (2 R^2)} and assumes
    the remaining exponent still decays (true for the default grids).
    """
    eff = decay - power / (2.0 * R * R)
    if eff <= 0:
        return math.inf
    return power * math.log(R) - eff * R * R - math.log(2.0 * eff)


# ---------------------------------------------------------------------------
# mini-language
# ---------------------------------------------------------------------------

def parse_measure(spec: str, p: float = 2.0, alpha: float = 1.0) -> Measure:
    """Parse the measure mini-language.

    Grammar (consumed left to right, no whitespace; p and alpha provide
    the context the pull-back and Volterra constructions need)::

        measure := 'atoms:' PATH            (CSV with header x,y,mass)
                 | 'lebesgue'
                 | 'gauss:' NUM
                 | 'pullback:' NUM ',' NUM ',' NUM ',' NUM   (a_re,a_im,b_re,b_im)
                 | 'volterra:' NUM (',' NUM)*
                 | 'sum:' measure ';' measure
    """
    m, pos = _parse_measure_at(spec, 0, p, alpha)
    if pos != len(spec):
        raise ValueError(f"trailing characters in measure spec: {spec[pos:]!r}")
    return m


def _parse_measure_at(spec: str, pos: int, p: float, alpha: float):
    if spec.startswith("lebesgue", pos):
        return lebesgue_measure(), pos + len("lebesgue")
    if spec.startswith("atoms:", pos):
        rest = spec[pos + len("atoms:"):]
        end = rest.find(";")
        path = rest if end < 0 else rest[:end]
        return load_atoms_csv(path), pos + len("atoms:") + len(path)
    if spec.startswith("gauss:", pos):
        tok, end = _take_numbers(spec, pos + len("gauss:"), 1)
        return gauss_measure(tok[0]), end
    if spec.startswith("pullback:", pos):
        tok, end = _take_numbers(spec, pos + len("pullback:"), 4)
        phi = AffineSymbol(complex(tok[0], tok[1]), complex(tok[2], tok[3]))
        return pullback_measure(phi, p, alpha), end
    if spec.startswith("volterra:", pos):
        tok, end = _take_numbers(spec, pos + len("volterra:"), None)
        return volterra_measure(PolynomialSymbol(tok), p), end
    if spec.startswith("sum:", pos):
        m1, pos = _parse_measure_at(spec, pos + len("sum:"), p, alpha)
        if pos >= len(spec) or spec[pos] != ";":
            raise ValueError("expected ';' between summands in measure spec")
        m2, pos = _parse_measure_at(spec, pos + 1, p, alpha)
        return m1 + m2, pos
    raise ValueError(f"unknown measure constructor at {spec[pos:]!r}")


def _take_numbers(spec: str, pos: int, count):
    """Comma-separated floats from pos up to ';' or the end."""
    stop = spec.find(";", pos)
    chunk = spec[pos:] if stop < 0 else spec[pos:stop]
    toks = chunk.split(",") if chunk else []
    if count is not None:
        toks = toks[:count]
    vals = [float(t) for t in toks]
    if count is not None and len(vals) != count:
        raise ValueError(f"expected {count} numbers in measure spec, got {len(vals)}")
    consumed = len(",".join(toks))
    return vals, pos + consumed


def load_atoms_csv(path: str) -> Measure:
    """Atoms from a UTF-8 CSV with required header columns x,y,mass."""
    atoms = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"x", "y", "mass"} <= set(reader.fieldnames):
            raise ValueError(f"{path}: atoms CSV needs a header with x,y,mass")
        for row in reader:
            atoms.append((complex(float(row["x"]), float(row["y"])),
                          float(row["mass"])))
    return Measure(atoms, None, None, f"atoms:{path}")
