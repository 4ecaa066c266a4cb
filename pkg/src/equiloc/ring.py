"""Exact arithmetic in truncated graded-commutative rings.

A ring here models the even-degree cohomology of a compact manifold F:
finitely many generators of even degree >= 2, all products truncated above
a fixed even degree (the dimension of F), and an integration functional
pairing top-degree monomials with exact rationals.  Restricting to even
degrees makes the ring honestly commutative, so no sign bookkeeping is
needed anywhere downstream.

All coefficients are `fractions.Fraction`; nothing in this module touches
floating point.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Iterable, Mapping, Sequence, Union

Rat = Union[int, Fraction]


class RingError(ValueError):
    """Raised on malformed ring data or cross-ring arithmetic."""


@lru_cache(maxsize=None)
def bernoulli(n: int) -> Fraction:
    """n-th Bernoulli number (B1 = -1/2), by the standard recurrence."""
    if n < 0:
        raise ValueError("Bernoulli index must be nonnegative")
    if n == 0:
        return Fraction(1)
    # sum_{k=0}^{n} C(n+1, k) B_k = 0  for n >= 1
    acc = Fraction(0)
    for k in range(n):
        acc += Fraction(_binom(n + 1, k)) * bernoulli(k)
    return -acc / (n + 1)


def _binom(n: int, k: int) -> int:
    if k < 0 or k > n:
        return 0
    return factorial(n) // (factorial(k) * factorial(n - k))


@lru_cache(maxsize=None)
def todd_coefficient(n: int) -> Fraction:
    """Coefficient of y^n in y/(1 - e^{-y}).

    The series is 1 + y/2 + sum_{j>=1} B_{2j} y^{2j} / (2j)!.
    """
    if n == 0:
        return Fraction(1)
    if n == 1:
        return Fraction(1, 2)
    if n % 2 == 1:
        return Fraction(0)
    return bernoulli(n) / factorial(n)


class RingSpec:
    """Presentation of a truncated graded ring with an integration table.

    generators        -- ordered (name, even degree >= 2) pairs
    truncation_degree -- even integer; products above it are discarded
    integration_table -- exponent tuple -> rational, keys of total degree
                         exactly `truncation_degree`
    """

    __slots__ = ("generators", "truncation_degree", "integration_table",
                 "_gen_degrees")

    def __init__(self, generators: Sequence[tuple[str, int]],
                 truncation_degree: int,
                 integration_table: Mapping[tuple[int, ...], Rat]):
        gens = tuple((str(n), int(d)) for n, d in generators)
        names = [n for n, _ in gens]
        if len(set(names)) != len(names):
            raise RingError("duplicate generator names")
        for name, deg in gens:
            if deg < 2 or deg % 2 != 0:
                raise RingError(
                    f"generator {name!r} has degree {deg}; must be even and >= 2")
        if truncation_degree < 0 or truncation_degree % 2 != 0:
            raise RingError("truncation_degree must be even and >= 0")
        self.generators = gens
        self.truncation_degree = int(truncation_degree)
        self._gen_degrees = tuple(d for _, d in gens)
        table = {}
        for mono, val in integration_table.items():
            mono = tuple(int(e) for e in mono)
            if len(mono) != len(gens):
                raise RingError("integration table key has wrong arity")
            if self.monomial_degree(mono) != truncation_degree:
                raise RingError(
                    f"integration table key {mono} does not have top degree")
            table[mono] = Fraction(val)
        self.integration_table = table

    @staticmethod
    def point() -> "RingSpec":
        """The ring of a point: no generators, truncation 0, integral 1."""
        return RingSpec((), 0, {(): Fraction(1)})

    def monomial_degree(self, mono: tuple[int, ...]) -> int:
        return sum(e * d for e, d in zip(mono, self._gen_degrees))

    def same_as(self, other: "RingSpec") -> bool:
        return (self.generators == other.generators
                and self.truncation_degree == other.truncation_degree
                and self.integration_table == other.integration_table)

    def __eq__(self, other):
        return isinstance(other, RingSpec) and self.same_as(other)

    def __hash__(self):
        return hash((self.generators, self.truncation_degree,
                     tuple(sorted(self.integration_table.items()))))

    def __repr__(self):
        gens = ", ".join(f"{n}:{d}" for n, d in self.generators)
        return f"RingSpec([{gens}], trunc={self.truncation_degree})"

    # -- element constructors -------------------------------------------------

    def zero(self) -> "GradedElement":
        return GradedElement(self, {})

    def one(self) -> "GradedElement":
        return self.scalar(1)

    def scalar(self, c: Rat) -> "GradedElement":
        c = Fraction(c)
        if c == 0:
            return self.zero()
        return GradedElement(self, {(0,) * len(self.generators): c})

    def generator(self, name: str) -> "GradedElement":
        for i, (n, _) in enumerate(self.generators):
            if n == name:
                expo = [0] * len(self.generators)
                expo[i] = 1
                return GradedElement(self, {tuple(expo): Fraction(1)})
        raise RingError(f"no generator named {name!r}")

    def monomial(self, expo: tuple[int, ...], c: Rat = 1) -> "GradedElement":
        return GradedElement(self, {tuple(expo): Fraction(c)})

    def tensor(self, other: "RingSpec") -> "RingSpec":
        """Tensor product: generators concatenated, truncation summed,
        integration table the product of the two tables."""
        gens = self.generators + other.generators
        trunc = self.truncation_degree + other.truncation_degree
        table = {}
        for m1, v1 in self.integration_table.items():
            for m2, v2 in other.integration_table.items():
                table[m1 + m2] = v1 * v2
        return RingSpec(gens, trunc, table)


class GradedElement:
    """Element of a RingSpec: monomial -> nonzero rational, canonical form."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: RingSpec, terms: Mapping[tuple[int, ...], Rat]):
        self.ring = ring
        clean = {}
        for mono, c in terms.items():
            c = Fraction(c)
            if c == 0:
                continue
            mono = tuple(int(e) for e in mono)
            deg = ring.monomial_degree(mono)
            if deg > ring.truncation_degree:
                continue
            clean[mono] = c
        self.terms = clean

    # -- basics ---------------------------------------------------------------

    def _check(self, other: "GradedElement"):
        if not self.ring.same_as(other.ring):
            raise RingError("elements live in different rings")

    def is_zero(self) -> bool:
        return not self.terms

    def scalar_part(self) -> Fraction:
        return self.terms.get((0,) * len(self.ring.generators), Fraction(0))

    def without_scalar(self) -> "GradedElement":
        zero_mono = (0,) * len(self.ring.generators)
        return GradedElement(
            self.ring, {m: c for m, c in self.terms.items() if m != zero_mono})

    def max_degree(self) -> int:
        if not self.terms:
            return 0
        return max(self.ring.monomial_degree(m) for m in self.terms)

    def homogeneous_part(self, degree: int) -> "GradedElement":
        return GradedElement(self.ring, {
            m: c for m, c in self.terms.items()
            if self.ring.monomial_degree(m) == degree})

    def __eq__(self, other):
        if not isinstance(other, GradedElement):
            return NotImplemented
        return self.ring.same_as(other.ring) and self.terms == other.terms

    def __hash__(self):
        return hash((self.ring, tuple(sorted(self.terms.items()))))

    def __repr__(self):
        from .expressions import element_to_string
        return f"<{element_to_string(self)}>"

    # -- arithmetic -----------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ring.scalar(other)
        self._check(other)
        terms = dict(self.terms)
        for m, c in other.terms.items():
            terms[m] = terms.get(m, Fraction(0)) + c
        return GradedElement(self.ring, terms)

    __radd__ = __add__

    def __neg__(self):
        return GradedElement(self.ring, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ring.scalar(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return GradedElement(
                self.ring, {m: c * other for m, c in self.terms.items()})
        self._check(other)
        ring = self.ring
        cap = ring.truncation_degree
        out: dict[tuple[int, ...], Fraction] = {}
        for m1, c1 in self.terms.items():
            d1 = ring.monomial_degree(m1)
            for m2, c2 in other.terms.items():
                if d1 + ring.monomial_degree(m2) > cap:
                    continue
                m = tuple(a + b for a, b in zip(m1, m2))
                out[m] = out.get(m, Fraction(0)) + c1 * c2
        return GradedElement(ring, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise RingError("negative powers are not defined")
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- the operations the formulas need --------------------------------------

    def exp_nilpotent(self) -> "GradedElement":
        """exp of a nilpotent element (zero scalar part); finite sum."""
        if self.scalar_part() != 0:
            raise RingError("exp_nilpotent requires zero scalar part")
        result = self.ring.one()
        term = self.ring.one()
        k = 1
        while True:
            term = term * self
            if term.is_zero():
                break
            result = result + term * Fraction(1, factorial(k))
            k += 1
        return result

    def integrate(self) -> Fraction:
        """Pair the top-degree part with the integration table."""
        ring = self.ring
        total = Fraction(0)
        for mono, c in self.terms.items():
            if ring.monomial_degree(mono) == ring.truncation_degree:
                weight = ring.integration_table.get(mono)
                if weight is not None:
                    total += c * weight
        return total


def exp_nilpotent(a: GradedElement) -> GradedElement:
    return a.exp_nilpotent()


def integrate(a: GradedElement) -> Fraction:
    return a.integrate()


def todd_of_root(root: GradedElement) -> GradedElement:
    """y/(1 - e^{-y}) for a single nilpotent degree-2 class y."""
    if root.scalar_part() != 0:
        raise RingError("Todd roots must be nilpotent")
    for mono in root.terms:
        if root.ring.monomial_degree(mono) != 2:
            raise RingError("Todd roots must be of pure degree 2")
    result = root.ring.one()
    power = root.ring.one()
    n = 1
    while True:
        power = power * root
        if power.is_zero():
            break
        result = result + power * todd_coefficient(n)
        n += 1
    return result


def todd_from_roots(ring: RingSpec,
                    roots: Iterable[GradedElement]) -> GradedElement:
    """prod_i r_i/(1 - e^{-r_i}), truncated in `ring`."""
    result = ring.one()
    for r in roots:
        if not r.ring.same_as(ring):
            raise RingError("root lives in a different ring")
        result = result * todd_of_root(r)
    return result
