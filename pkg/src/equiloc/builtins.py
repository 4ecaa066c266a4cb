"""Named example presentations and their enumeration oracles.

Every builtin is generated by the builders in `model`; the exact documents
shipped under data/ are serializations of these objects, and a test pins
the two against each other.  Each entry also knows how to produce its
ground-truth weight multiset by monomial enumeration, so the acceptance
suite can compare characters coefficient by coefficient.
"""

from __future__ import annotations

from . import oracle
from .model import (ManifoldPresentation, QuotientData, cpn_linear,
                    disjoint_union, product, projective_ring, shift_moment,
                    trivial_cp1)
from .oracle import WeightMultiset
from .ring import RingSpec, todd_from_roots


def _zero_quotient() -> QuotientData:
    """Quotient data of an empty regular stratum: everything integrates to 0."""
    ring = RingSpec.point()
    return QuotientData(ring=ring, omega0=ring.zero(), kappa_todd=ring.zero())


def _point_quotient() -> QuotientData:
    """A reduced space that is a single free point with trivial bundle."""
    ring = RingSpec.point()
    return QuotientData(ring=ring, omega0=ring.zero(), kappa_todd=ring.one())


def _cp2_quotient() -> QuotientData:
    """The projective plane with its hyperplane class and Todd class."""
    ring = projective_ring(3)
    h = ring.generator("h")
    return QuotientData(ring=ring, omega0=h,
                        kappa_todd=todd_from_roots(ring, [h, h, h]))


def _cp1_pos() -> ManifoldPresentation:
    return cpn_linear([0, 1], 1)


def _cp1_neg() -> ManifoldPresentation:
    return shift_moment(cpn_linear([0, 1], 1), -1)


def build_cp1() -> ManifoldPresentation:
    p = _cp1_pos()
    p.name = "cp1"
    p.quotient = _zero_quotient()
    return p


def build_cp001() -> ManifoldPresentation:
    p = cpn_linear([0, 0, 1], 1)
    p.name = "cp001"
    p.quotient = _zero_quotient()
    return p


def build_cp012() -> ManifoldPresentation:
    p = cpn_linear([0, 1, 2], 1)
    p.name = "cp012"
    p.quotient = _zero_quotient()
    return p


def build_prod11() -> ManifoldPresentation:
    p = product(_cp1_pos(), _cp1_neg())
    p.name = "prod11"
    return p


def build_dgmw() -> ManifoldPresentation:
    """Moment-zero locus equal to the fixed-point set, in three pieces:
    a projective plane whose minimum is a sphere, plus two sphere-times-
    trivial-sphere pieces placing weights +2 and -3 at moment zero."""
    piece1 = cpn_linear([0, 0, 1], 1)
    piece2 = product(cpn_linear([0, 2], 1), trivial_cp1(1))
    piece3 = product(shift_moment(cpn_linear([0, 3], 1), -3), trivial_cp1(1))
    p = disjoint_union(piece1, piece2, piece3, name="dgmw")
    p.quotient = _zero_quotient()
    return p


def build_dim6() -> ManifoldPresentation:
    p = product(product(_cp1_pos(), _cp1_pos()), _cp1_neg())
    p.name = "dim6"
    p.quotient = _cp2_quotient()
    return p


def build_dim6b() -> ManifoldPresentation:
    p = product(product(_cp1_pos(), _cp1_neg()), _cp1_neg())
    p.name = "dim6b"
    p.quotient = _cp2_quotient()
    return p


def build_regval() -> ManifoldPresentation:
    """Zero is a regular value: the square of the hyperplane bundle on the
    rotation sphere, with the moment interval shifted to [-1, 1]."""
    p = shift_moment(cpn_linear([0, 1], 2), -1)
    p.name = "regval"
    p.quotient = _point_quotient()
    return p


_BUILDERS = {
    "cp1": build_cp1,
    "cp001": build_cp001,
    "cp012": build_cp012,
    "prod11": build_prod11,
    "dgmw": build_dgmw,
    "dim6": build_dim6,
    "dim6b": build_dim6b,
    "regval": build_regval,
}


def builtin_names() -> list[str]:
    return list(_BUILDERS)


def builtin(name: str) -> ManifoldPresentation:
    try:
        return _BUILDERS[name]()
    except KeyError:
        raise KeyError(
            f"unknown builtin {name!r}; available: {', '.join(_BUILDERS)}"
        ) from None


# ---------------------------------------------------------------------------
# enumeration oracles


def _triv(m: int) -> WeightMultiset:
    return oracle.cpn_weights([0, 0], 1, m)


def builtin_oracle(name: str, m: int) -> WeightMultiset:
    """Ground-truth weight multiset of a builtin's section space."""
    cpw = oracle.cpn_weights
    conv = oracle.convolve
    if name == "cp1":
        return cpw([0, 1], 1, m)
    if name == "cp001":
        return cpw([0, 0, 1], 1, m)
    if name == "cp012":
        return cpw([0, 1, 2], 1, m)
    if name == "prod11":
        return conv(cpw([0, 1], 1, m), cpw([0, 1], 1, m, shift=-1))
    if name == "dgmw":
        piece1 = cpw([0, 0, 1], 1, m)
        piece2 = conv(cpw([0, 2], 1, m), _triv(m))
        piece3 = conv(cpw([0, 3], 1, m, shift=-3), _triv(m))
        return oracle.add(oracle.add(piece1, piece2), piece3)
    if name == "dim6":
        two = conv(cpw([0, 1], 1, m), cpw([0, 1], 1, m))
        return conv(two, cpw([0, 1], 1, m, shift=-1))
    if name == "dim6b":
        two = conv(cpw([0, 1], 1, m), cpw([0, 1], 1, m, shift=-1))
        return conv(two, cpw([0, 1], 1, m, shift=-1))
    if name == "regval":
        return cpw([0, 1], 2, m, shift=-1)
    raise KeyError(f"no oracle for builtin {name!r}")
