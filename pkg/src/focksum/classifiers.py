"""Closed-form verdicts for composition, Volterra and derivative operators.

Each classifier states its verdict from the closed-form dichotomy and, on
request, attaches the numeric embedding verdict for the operator's derived
measure.  A *certified* numeric verdict must agree with the closed form;
an inconclusive numeric verdict never counts as disagreement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

from .errors import DomainError
from .lattice import GridSpec, default_grid
from .measures import (AffineSymbol, Measure, MomentReport, PolynomialSymbol,
                       moment_condition, pullback_measure, tilted_weight,
                       volterra_measure)
from .summing import Classification, SummingVerdict, classify_embedding
from .weights import Weight, const_weight


@dataclass(frozen=True)
class OperatorVerdict:
    """Closed-form summability verdict with an optional numeric cross-check."""

    summing: Optional[bool]
    reason: str
    cross_check: Optional[SummingVerdict] = None

    @property
    def agrees(self) -> Optional[bool]:
        """Whether a certified numeric cross-check matches the closed form.

        None when there is no cross-check or it is inconclusive.
        """
        if self.cross_check is None or self.summing is None:
            return None
        cls = self.cross_check.classification
        if cls is Classification.INCONCLUSIVE:
            return None
        return (cls is Classification.SUMMING) == self.summing


def classify_composition(phi: Union[AffineSymbol, PolynomialSymbol], p: float,
                         r: float, alpha: float,
                         grid: Optional[GridSpec] = None,
                         cross_check: bool = True) -> OperatorVerdict:
    """r-summability of composition by z -> az+b on the standard Fock space.

    Affine symbols are summing exactly when |a| < 1, for every p > 1 and
    r >= 1.  Non-affine polynomial symbols are rejected outright (the
    operator is not even bounded); no quadrature is attempted for them.
    """
    if p <= 1 or r < 1 or alpha <= 0:
        raise DomainError("need p > 1, r >= 1, alpha > 0")
    if isinstance(phi, PolynomialSymbol):
        if phi.degree >= 2:
            return OperatorVerdict(False, "not bounded: symbol is not affine")
        coeffs = phi.coefficients + (0j,) * (2 - len(phi.coefficients))
        phi = AffineSymbol(coeffs[1], coeffs[0])
    summing = abs(phi.a) < 1.0
    reason = (f"|a| = {abs(phi.a):g} < 1" if summing
              else f"|a| = {abs(phi.a):g} >= 1")
    check = None
    if cross_check:
        grid = grid or default_grid()
        mu = pullback_measure(phi, p, alpha)
        check = classify_embedding(p, r, alpha, const_weight(1.0), mu, grid)
    return OperatorVerdict(summing, reason, check)


def classify_volterra(g: PolynomialSymbol, p: float, r: float, alpha: float,
                      grid: Optional[GridSpec] = None,
                      cross_check: bool = True) -> OperatorVerdict:
    """r-summability of the Volterra operator with polynomial symbol g.

    For p <= 2, and also for p > 2 with r <= 2, only constant symbols are
    summing; for p > 2 and r > 2 the summing symbols are exactly the
    affine ones.  The verdict depends only on deg g and the (p, r) region.
    """
    if p <= 1 or r < 1 or alpha <= 0:
        raise DomainError("need p > 1, r >= 1, alpha > 0")
    deg = g.degree
    if p <= 2 or r <= 2:
        summing = deg == 0
        region = "p <= 2 or r <= 2: constant symbols only"
    else:
        summing = deg <= 1
        region = "p > 2 and r > 2: affine symbols"
    check = None
    if cross_check:
        grid = grid or default_grid()
        mu = volterra_measure(g, p)
        check = classify_embedding(p, r, alpha, const_weight(1.0), mu, grid)
    return OperatorVerdict(summing, f"deg g = {deg}; {region}", check)


@dataclass(frozen=True)
class DifferentiationVerdict:
    """Embedding verdict for the k-th derivative against the tilted weight."""

    verdict: Optional[SummingVerdict]
    moment_report: MomentReport
    inconclusive_reason: str = ""

    @property
    def classification(self) -> Classification:
        if self.verdict is None:
            return Classification.INCONCLUSIVE
        return self.verdict.classification


def reduce_differentiation(k: int, p: float, r: float, alpha: float,
                           w: Weight, mu: Measure,
                           grid: Optional[GridSpec] = None
                           ) -> DifferentiationVerdict:
    """Summability of the k-th derivative (k < 0: repeated integration).

    Subject to a Gaussian-moment condition on the measure, the operator is
    r-summing exactly when the plain embedding against the tilted weight
    w(z) (1+|z|)^{-kp} is; a failed or uncertifiable moment condition
    downgrades the verdict to inconclusive.
    """
    if p <= 1 or r < 1 or alpha <= 0:
        raise DomainError("need p > 1, r >= 1, alpha > 0")
    grid = grid or default_grid()
    l_max = max(0, -k - 1)
    report = moment_condition(mu, p, alpha, l_max, grid)
    if report.ok is not True:
        return DifferentiationVerdict(None, report,
                                      f"moment condition failed: {report.reason}")
    verdict = classify_embedding(p, r, alpha, tilted_weight(w, k, p), mu, grid)
    return DifferentiationVerdict(verdict, report)
