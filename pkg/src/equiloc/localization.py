"""The fixed-point engine.

Exact side: chi_tilde assembles, per fixed component F, the meromorphic
function

    chi_tilde_F(z) = int_F Td(F) e^{m omega_F} prod_{k,j} 1/(1 - z^k e^{a_kj})

and the global character is the Laurent polynomial

    chi^(m)(z) = sum_F z^{m J(F)} chi_tilde_F(z),

whose z^0 coefficient is the invariant Riemann-Roch number.

Numeric side: the localized inner integrand of the Witten integral,

    dh_inner(x) = sum_F e^{2 pi i m x J(F)} int_F e^{m omega_F} rho_F(x)/e_F(x).

Normalization of the equivariant Euler class.  Internally every series is
written in the variable u = 2 pi i x, which keeps all coefficients rational.
A normal root of weight k and stored Chern root `a` contributes the factor
y = -(k u + a) to e_F and the factor td(y) = y/(1-e^{-y}) to the
equivariant Todd class.  This single sign is a calibration, fixed once by
requiring that on the rotation sphere (cp1 builder) the localized sum with
rho = 1 reproduce the exact pushforward integral

    int_M e^{2 pi i m x J} e^{m omega} = int_0^1 e^{2 pi i m x t} m dt
                                       = (e^{2 pi i m x} - 1)/(2 pi i x),

which forces 1/e = 1/(-2 pi i x) at the minimum, and by the exact identity
td(y)/y = 1/(1 - e^{-y}) which then reproduces each character factor
1/(1 - z^k e^a) at z = e^{2 pi i x}.  Tests assert both pins.
"""

from __future__ import annotations

import cmath
import os
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Mapping, Optional, Sequence, Union

from .model import FixedComponent, ManifoldPresentation
from .ring import GradedElement, RingSpec, todd_coefficient
from .zrational import LaurentPolynomial, NotAPolynomial, ZRational


def thread_cap() -> int:
    """Parallelism cap from EQUILOC_THREADS (default 1: sequential)."""
    try:
        return max(1, int(os.environ.get("EQUILOC_THREADS", "1")))
    except ValueError:
        return 1


def _binom(n: int, k: int) -> int:
    if k < 0 or k > n:
        return 0
    return factorial(n) // (factorial(k) * factorial(n - k))


# ---------------------------------------------------------------------------
# exact character


def chi_tilde(F: FixedComponent, m: int) -> ZRational:
    """The component character function as a scalar ZRational."""
    if m < 0:
        raise ValueError("m must be nonnegative")
    acc = ZRational.from_element(F.todd * (F.omega * Fraction(m)).exp_nilpotent())
    for block in F.blocks:
        for root in block.chern_roots:
            acc = acc * ZRational.inv_one_minus(block.weight, root)
    return acc.integrate_over_F()


def character(p: ManifoldPresentation, m: int) -> LaurentPolynomial:
    """Exact Laurent-polynomial character of the index representation.

    Raises NotAPolynomial when the per-component poles fail to cancel,
    which certifies the fixed-point data inconsistent.
    """
    point = RingSpec.point()
    total = ZRational.zero(point)
    terms = _map_components(p.components,
                            lambda F: chi_tilde(F, m).shifted(m * F.moment))
    for piece in terms:
        total = total + piece
    return total.to_laurent_polynomial()


def rr_total(p: ManifoldPresentation, m: int) -> int:
    """RR(M, L^m): the character evaluated at z = 1."""
    value = character(p, m).evaluate_at_one()
    if value.denominator != 1:
        raise NotAPolynomial(f"character sums to non-integer {value} at z=1")
    return value.numerator


def _map_components(components, fn):
    cap = thread_cap()
    if cap > 1 and len(components) > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=cap) as pool:
            return list(pool.map(fn, components))
    return [fn(F) for F in components]


# ---------------------------------------------------------------------------
# series in the equivariant parameter


class USeries:
    """Laurent series in u = 2 pi i x with GradedElement coefficients,
    truncated above `order`; negative powers are always finitely many."""

    __slots__ = ("ring", "coeffs", "order")

    def __init__(self, ring: RingSpec, coeffs: Mapping[int, GradedElement],
                 order: int):
        self.ring = ring
        self.order = order
        self.coeffs = {int(j): c for j, c in coeffs.items()
                       if j <= order and not c.is_zero()}

    @staticmethod
    def constant(ring: RingSpec, elem: GradedElement, order: int) -> "USeries":
        return USeries(ring, {0: elem}, order)

    def __mul__(self, other: "USeries") -> "USeries":
        order = min(self.order, other.order)
        out: dict[int, GradedElement] = {}
        for j1, c1 in self.coeffs.items():
            for j2, c2 in other.coeffs.items():
                j = j1 + j2
                if j > order:
                    continue
                prod = c1 * c2
                if prod.is_zero():
                    continue
                if j in out:
                    out[j] = out[j] + prod
                else:
                    out[j] = prod
        return USeries(self.ring, out, order)

    def __add__(self, other: "USeries") -> "USeries":
        order = min(self.order, other.order)
        out = dict(self.coeffs)
        for j, c in other.coeffs.items():
            out[j] = out[j] + c if j in out else c
        return USeries(self.ring, out, order)

    def scale(self, c) -> "USeries":
        return USeries(self.ring, {j: v * c for j, v in self.coeffs.items()},
                       self.order)

    def min_power(self) -> int:
        return min(self.coeffs, default=0)

    def integrate_over_F(self) -> dict[int, Fraction]:
        out = {}
        for j, c in self.coeffs.items():
            val = c.integrate()
            if val != 0:
                out[j] = val
        return out


@dataclass
class EquivariantClassAtF:
    """Restriction of an equivariantly closed class to a fixed component,
    as a truncated series in u = 2 pi i x with ring coefficients."""
    component: FixedComponent
    series: USeries


CALIBRATED_WEIGHT_SCALE = Fraction(1)
# The root factor is y = -(c*k*u + a) with c = 1 once u = 2 pi i x; any
# other c breaks the rotation-sphere pushforward identity (negative-control
# tests pass c != 1 on purpose).


def _td_factor(ring: RingSpec, weight: int, root: GradedElement, order: int,
               weight_scale: Fraction) -> USeries:
    """td(y) for y = -(weight_scale * k * u + a), as a USeries."""
    nil = -root                     # nilpotent part of y
    s = -Fraction(weight) * weight_scale  # u-coefficient of y
    nilpowers = [ring.one()]
    while not (nilpowers[-1] * nil).is_zero():
        nilpowers.append(nilpowers[-1] * nil)
    coeffs: dict[int, GradedElement] = {}
    for q in range(order + 1):
        acc = ring.zero()
        for t in range(len(nilpowers)):
            c = todd_coefficient(q + t) * _binom(q + t, q)
            if c != 0:
                acc = acc + nilpowers[t] * c
        acc = acc * (s ** q)
        if not acc.is_zero():
            coeffs[q] = acc
    return USeries(ring, coeffs, order)


def equivariant_todd_at_F(F: FixedComponent, order: Optional[int] = None,
                          weight_scale: Fraction = CALIBRATED_WEIGHT_SCALE
                          ) -> EquivariantClassAtF:
    """Td(F) * prod_{k,j} td(-(k u + a_kj)), truncated at u-order `order`
    (default: twice the ambient dimension)."""
    if order is None:
        order = 2 * (F.dim_F + 2 * F.normal_rank())
    series = USeries.constant(F.ring, F.todd, order)
    for block in F.blocks:
        for root in block.chern_roots:
            series = series * _td_factor(F.ring, block.weight, root, order,
                                         weight_scale)
    return EquivariantClassAtF(F, series)


def equivariant_todd_map(p: ManifoldPresentation, order: int,
                         weight_scale: Fraction = CALIBRATED_WEIGHT_SCALE
                         ) -> dict[str, EquivariantClassAtF]:
    return {F.name: equivariant_todd_at_F(F, order, weight_scale)
            for F in p.components}


def euler_inverse(F: FixedComponent, order: int,
                  weight_scale: Fraction = CALIBRATED_WEIGHT_SCALE) -> USeries:
    """1/e_F(u) = prod_{k,j} 1/(-(k u + a_kj)): a finite Laurent tail in 1/u
    times nilpotent corrections, truncated at u-order `order`."""
    ring = F.ring
    acc = USeries.constant(ring, ring.one(), order)
    for block in F.blocks:
        s = Fraction(block.weight) * weight_scale
        for root in block.chern_roots:
            # 1/(-(s*u + a)) = sum_{t>=0} (-1/s)^{t+1} a^t u^{-(t+1)}
            coeffs: dict[int, GradedElement] = {}
            power = ring.one()
            t = 0
            while True:
                c = power * ((Fraction(-1) / s) ** (t + 1))
                if not c.is_zero():
                    coeffs[-(t + 1)] = c
                power = power * root
                t += 1
                if power.is_zero():
                    break
            acc = acc * USeries(ring, coeffs, order)
    return acc


RhoMap = Optional[Union[str, Mapping[str, EquivariantClassAtF]]]


def _rho_series(F: FixedComponent, rho: RhoMap, order: int) -> USeries:
    if rho is None:
        return USeries.constant(F.ring, F.ring.one(), order)
    if rho == "todd":
        return equivariant_todd_at_F(F, order).series
    entry = rho[F.name]
    series = entry.series if isinstance(entry, EquivariantClassAtF) else entry
    return series


def component_u_laurent(F: FixedComponent, m: int, rho: RhoMap,
                        order: int,
                        weight_scale: Fraction = CALIBRATED_WEIGHT_SCALE
                        ) -> dict[int, Fraction]:
    """Scalar u-Laurent coefficients of int_F e^{m omega} rho_F / e_F."""
    series = _rho_series(F, rho, order)
    emw = USeries.constant(F.ring, (F.omega * Fraction(m)).exp_nilpotent(),
                           order)
    total = series * emw * euler_inverse(F, order, weight_scale)
    return total.integrate_over_F()


class PreparedInner:
    """The localized integrand with per-component Laurent data frozen,
    ready for repeated numeric evaluation."""

    __slots__ = ("terms", "m", "order")

    def __init__(self, p: ManifoldPresentation, m: int, rho: RhoMap,
                 order: int,
                 weight_scale: Fraction = CALIBRATED_WEIGHT_SCALE):
        self.m = m
        self.order = order
        self.terms = []
        for F in p.components:
            laurent = component_u_laurent(F, m, rho, order, weight_scale)
            self.terms.append((F.moment, laurent))

    def laurent_sum(self, taylor_order: int) -> dict[int, Fraction]:
        """Exact u-Laurent coefficients of the full sum, with each
        oscillatory factor e^{m J u} Taylor-expanded to `taylor_order`."""
        out: dict[int, Fraction] = {}
        for J, laurent in self.terms:
            mJ = Fraction(self.m * J)
            for t in range(taylor_order + 1):
                etc = mJ ** t / factorial(t)
                if etc == 0 and t > 0:
                    break
                for j, c in laurent.items():
                    key = j + t
                    if key > self.order:
                        continue
                    out[key] = out.get(key, Fraction(0)) + etc * c
        return {k: v for k, v in out.items() if v != 0}

    def evaluate(self, x: float) -> complex:
        """Kahan-compensated sum over components in document order."""
        if x == 0:
            raise ValueError("the localized integrand is singular at x = 0")
        u = 2j * cmath.pi * x
        total = 0j
        comp = 0j
        for J, laurent in self.terms:
            if not laurent:
                continue
            lo = min(laurent)
            hi = max(laurent)
            acc = 0j
            for j in range(hi, lo - 1, -1):
                acc = acc * u + complex(laurent.get(j, Fraction(0)))
            term = cmath.exp(self.m * J * u) * acc * u ** lo
            y = term - comp
            t = total + y
            comp = (t - total) - y
            total = t
        return total


def dh_inner(p: ManifoldPresentation, rho: RhoMap, m: int, x: float,
             order: Optional[int] = None,
             weight_scale: Fraction = CALIBRATED_WEIGHT_SCALE) -> complex:
    """One-shot evaluation of the localized inner Witten integrand."""
    if order is None:
        order = default_series_order(p, abs(x))
    return PreparedInner(p, m, rho, order, weight_scale).evaluate(x)


def default_series_order(p: ManifoldPresentation, x_max: float,
                         tol: float = 1e-13) -> int:
    """Truncation order making the td-series tail below `tol` at |x|<=x_max.

    The series in u has radius set by the nearest pole of td(-(k u)), at
    |x| = 1/k, so the tail is controlled by (k_max * x_max)^order.
    """
    import math
    ratio = p.max_weight() * x_max
    floor_order = 2 * p.dim_M
    if ratio >= 0.97:
        raise ValueError(
            f"|x| = {x_max} too close to a singular circle 1/k; "
            "no convergent series order exists")
    if ratio <= 0:
        return floor_order
    need = math.log(tol) / math.log(ratio)
    return max(floor_order, int(need) + 2)


def kirillov_check(p: ManifoldPresentation, m: int,
                   x_samples: Sequence[float],
                   order: Optional[int] = None,
                   weight_scale: Fraction = CALIBRATED_WEIGHT_SCALE) -> float:
    """Max deviation between the character at e^{2 pi i x} and the localized
    equivariant integral, over the given samples (which must avoid 0 and the
    circles where some e^{2 pi i k x} degenerates)."""
    chi = character(p, m)
    if order is None:
        order = default_series_order(p, max(abs(x) for x in x_samples))
    rho = equivariant_todd_map(p, order, weight_scale)
    prepared = PreparedInner(p, m, rho, order, weight_scale)
    worst = 0.0
    for x in x_samples:
        z = cmath.exp(2j * cmath.pi * x)
        lhs = chi.evaluate(z)
        rhs = prepared.evaluate(x)
        worst = max(worst, abs(lhs - rhs))
    return worst
