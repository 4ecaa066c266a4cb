"""Assembly of the singular Riemann-Roch formula.

The invariant Riemann-Roch number (the z^0 coefficient of the character)
decomposes as

    rr = regular term + sum over indefinite F at moment 0 of exceptional
         terms + sum over F at moment 0 of residue terms,

where the residue prescription per component is: residue at z = 0 of
z^{-1} chi_tilde for a positive-definite component (local minimum of the
moment map), the residue at infinity for a negative-definite one, and the
average of the two for an indefinite one.

The regular term is an integral over the regular stratum of the reduced
space; it is computed from user-supplied quotient data when present and
otherwise only reported as a tagged diagnostic (the difference of the other
terms), never silently invented.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .localization import equivariant_todd_at_F
from .model import FixedComponent, ManifoldPresentation
from .quantize_fit import exact_polynomial_fit  # re-exported helper
from . import localization


class Classification(enum.Enum):
    POSITIVE_DEFINITE = "positive-definite"
    NEGATIVE_DEFINITE = "negative-definite"
    INDEFINITE = "indefinite"


class Unsupported(NotImplementedError):
    """Exceptional data for a positive-dimensional indefinite component is
    not representable in a flat presentation."""


class NotIndefinite(ValueError):
    pass


def classify(F: FixedComponent) -> Classification:
    ws = F.weights()
    if all(w > 0 for w in ws):
        return Classification.POSITIVE_DEFINITE
    if all(w < 0 for w in ws):
        return Classification.NEGATIVE_DEFINITE
    return Classification.INDEFINITE


def rr_invariant(p: ManifoldPresentation, m: int) -> int:
    """The multiplicity of the trivial weight in the index character."""
    c = localization.character(p, m).constant_term()
    if c.denominator != 1:
        raise ArithmeticError(f"invariant multiplicity {c} is not an integer")
    return c.numerator


def residue_term(F: FixedComponent, m: int) -> Fraction:
    """The residue prescription applied to chi_tilde of a moment-zero
    component, dispatched on its classification."""
    if F.moment != 0:
        raise ValueError(
            f"component {F.name} has moment {F.moment}; residue terms are "
            "defined for moment-zero components only")
    chi = localization.chi_tilde(F, m)
    cls = classify(F)
    if cls is Classification.POSITIVE_DEFINITE:
        return chi.shifted(-1).residue_at_zero()
    if cls is Classification.NEGATIVE_DEFINITE:
        return chi.residue_at_infinity()
    return (chi.shifted(-1).residue_at_zero()
            + chi.residue_at_infinity()) / 2


# Overall scale of the exceptional term.  The absolute normalization is not
# exhibited numerically anywhere upstream; it is pinned operationally by the
# balance identities in the acceptance suite, and `normalization_fit` below
# reports the correction multiple if balance ever fails by a constant factor.
EXCEPTIONAL_SCALE = Fraction(1)


def _divide_by_u_minus_v(num: dict[tuple[int, int], Fraction],
                         degree: int) -> dict[tuple[int, int], Fraction]:
    """Exact division of a homogeneous bivariate polynomial by (u - v)."""
    q: dict[tuple[int, int], Fraction] = {}
    for i in range(degree, 0, -1):
        j = degree - i
        qc = num.get((i, j), Fraction(0)) + q.get((i, j - 1), Fraction(0))
        if qc != 0:
            q[(i - 1, j)] = qc
    rem = num.get((0, degree), Fraction(0)) + q.get((0, degree - 1),
                                                    Fraction(0))
    if rem != 0:
        raise ArithmeticError("numerator is not divisible by (u - v)")
    return q


def exceptional_term(F: FixedComponent, m: int,
                     scale: Fraction = EXCEPTIONAL_SCALE) -> Fraction:
    """Contribution of an isolated indefinite moment-zero component, with
    the equivariant Todd class as the localized integrand."""
    _exceptional_preconditions(F)
    pos = [w for w in F.weights() if w > 0]
    n = len(pos) + len([w for w in F.weights() if w < 0]) - 1
    rho = equivariant_todd_at_F(F, n).series.integrate_over_F()
    return exceptional_from_series(F, rho, m, scale)


def _exceptional_preconditions(F: FixedComponent) -> None:
    if F.moment != 0:
        raise ValueError("exceptional terms require moment zero")
    if classify(F) is not Classification.INDEFINITE:
        raise NotIndefinite(f"component {F.name} is definite")
    if F.dim_F != 0:
        raise Unsupported(
            "exceptional term for a positive-dimensional indefinite "
            "component needs sphere-bundle connection data that a flat "
            "presentation does not carry")


def exceptional_from_series(F: FixedComponent, rho: dict[int, Fraction],
                            m: int,
                            scale: Fraction = EXCEPTIONAL_SCALE) -> Fraction:
    """The exceptional contribution for an arbitrary scalar series rho.

    The kernel N(u, v) = (rho(u) + rho(v))/2 - rho((u+v)/2) is divided
    exactly by (u - v) and the coefficient of u^{l+ - 1} v^{l- - 1} is
    extracted, then weighted by 1/(prod of positive weights * prod of
    |negative| weights).  Only the homogeneous part of rho of degree
    l+ + l- - 1 can contribute; affine parts of rho drop out identically,
    and l+ = l- = 1 (the only isolated shape possible below dimension six)
    gives exactly 0.
    """
    _exceptional_preconditions(F)
    pos = [w for w in F.weights() if w > 0]
    neg = [-w for w in F.weights() if w < 0]
    lp, ln = len(pos), len(neg)
    if lp == 1 and ln == 1:
        return Fraction(0)
    n = lp + ln - 1
    rho_n = rho.get(n, Fraction(0))
    if rho_n == 0:
        return Fraction(0)
    # N(u,v) restricted to its degree-n part: the only part whose quotient
    # by (u - v) can carry the degree (lp-1, ln-1) coefficient.
    half = Fraction(1, 2)
    num: dict[tuple[int, int], Fraction] = {}
    num[(n, 0)] = half
    num[(0, n)] = num.get((0, n), Fraction(0)) + half
    from math import comb
    for i in range(n + 1):
        c = -Fraction(comb(n, i), 2 ** n)
        key = (i, n - i)
        num[key] = num.get(key, Fraction(0)) + c
    quotient = _divide_by_u_minus_v({k: v for k, v in num.items() if v != 0},
                                    n)
    coeff = quotient.get((lp - 1, ln - 1), Fraction(0))
    orbifold = Fraction(1)
    for w in pos + neg:
        orbifold *= w
    return scale * rho_n * coeff / orbifold


def regular_term(p: ManifoldPresentation, m: int) -> tuple[Fraction, str]:
    """The reduced-space term: exact when quotient data is supplied,
    otherwise the tagged diagnostic rr - residues - exceptionals."""
    if p.quotient is not None:
        q = p.quotient
        integrand = (q.omega0 * Fraction(m)).exp_nilpotent() * q.kappa_todd
        return integrand.integrate(), "supplied"
    total = Fraction(rr_invariant(p, m))
    for F in p.f_zero():
        total -= residue_term(F, m)
        if classify(F) is Classification.INDEFINITE:
            total -= exceptional_term(F, m)
    return total, "diagnostic"


@dataclass
class MainFormulaReport:
    m: int
    rr: int
    residue_terms: dict[str, tuple[str, Fraction]]
    exceptional_terms: dict[str, Fraction]
    regular: Fraction
    regular_tag: str
    balance: Optional[bool]

    def residue_sum(self) -> Fraction:
        return sum((v for _, v in self.residue_terms.values()), Fraction(0))

    def exceptional_sum(self) -> Fraction:
        return sum(self.exceptional_terms.values(), Fraction(0))


def main_formula_report(p: ManifoldPresentation, m: int) -> MainFormulaReport:
    rr = rr_invariant(p, m)
    residues = {}
    exceptionals = {}
    for F in p.f_zero():
        cls = classify(F)
        residues[F.name] = (cls.value, residue_term(F, m))
        if cls is Classification.INDEFINITE:
            exceptionals[F.name] = exceptional_term(F, m)
    reg, tag = regular_term(p, m)
    balance: Optional[bool] = None
    if tag == "supplied":
        total = reg + sum(v for _, v in residues.values()) \
            + sum(exceptionals.values())
        balance = (total == rr)
    return MainFormulaReport(m=m, rr=rr, residue_terms=residues,
                             exceptional_terms=exceptionals, regular=reg,
                             regular_tag=tag, balance=balance)


@dataclass
class NormalizationFit:
    """Outcome of probing the exceptional-term normalization by balance."""
    balanced: bool
    multiple: Optional[Fraction]   # fitted correction, when identifiable
    detail: str


def normalization_fit(presentations, m_values) -> NormalizationFit:
    """Check Theorem balance across presentations and moments; when it fails
    by one constant rational multiple of the exceptional sum everywhere,
    report that multiple instead of a bare failure."""
    ratios = set()
    bare_failure = False
    for p in presentations:
        for m in m_values:
            rep = main_formula_report(p, m)
            if rep.regular_tag != "supplied":
                raise ValueError(
                    f"{p.name} has no supplied quotient data")
            needed = Fraction(rep.rr) - rep.regular - rep.residue_sum()
            got = rep.exceptional_sum()
            if needed == got:
                continue
            if got != 0:
                ratios.add(needed / got)
            else:
                bare_failure = True
    if not ratios and not bare_failure:
        return NormalizationFit(True, None, "balance holds exactly")
    if len(ratios) == 1 and not bare_failure:
        mult = next(iter(ratios))
        return NormalizationFit(
            False, mult,
            f"balance fails by the constant multiple {mult} of the "
            "exceptional term; the scale constant should be multiplied by it")
    return NormalizationFit(False, None,
                            "balance fails and no constant multiple fits")


@dataclass
class PolynomialFit:
    coefficients: list[Fraction]       # ascending powers of m
    fitted_at: list[int]
    residuals: dict[int, Fraction]     # m -> value - fit(m)

    def degree(self) -> int:
        d = len(self.coefficients) - 1
        while d > 0 and self.coefficients[d] == 0:
            d -= 1
        return d

    def evaluate(self, m: int) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coefficients):
            acc = acc * m + c
        return acc

    def max_residual(self) -> Fraction:
        return max((abs(r) for r in self.residuals.values()),
                   default=Fraction(0))


def polynomiality_check(p: ManifoldPresentation, m_min: int,
                        m_max: int) -> PolynomialFit:
    """Fit rr_invariant exactly on the first dim_M/2 + 1 moments and report
    the deviations at the remaining ones; a presentation with a free action
    on the regular stratum must have residual identically zero."""
    degree_cap = p.dim_M // 2
    if m_max - m_min < degree_cap + 2:
        raise ValueError(
            f"need m_max - m_min >= dim_M/2 + 2 = {degree_cap + 2}")
    ms = list(range(m_min, m_max + 1))
    values = {m: Fraction(rr_invariant(p, m)) for m in ms}
    anchor = ms[:degree_cap + 1]
    coeffs = exact_polynomial_fit([(m, values[m]) for m in anchor])
    fit = PolynomialFit(coefficients=coeffs, fitted_at=anchor, residuals={})
    for m in ms[degree_cap + 1:]:
        fit.residuals[m] = values[m] - fit.evaluate(m)
    return fit
