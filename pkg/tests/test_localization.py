"""Fixed-point engine: exact characters, numeric localization, calibration."""

import cmath
import random
from fractions import Fraction

import pytest

from equiloc import builtin, builtin_names, builtin_oracle
from equiloc.localization import (PreparedInner, character, chi_tilde,
                                  component_u_laurent, default_series_order,
                                  dh_inner, equivariant_todd_at_F,
                                  kirillov_check, rr_total)
from equiloc.model import (FixedComponent, NormalBlock, bundle_power,
                           cpn_linear, product, shift_moment)
from equiloc.oracle import convolve
from equiloc.ring import RingSpec
from equiloc.zrational import LaurentPolynomial, NotAPolynomial, ZRational

POINT = RingSpec.point()


def point_component(name, moment, weights):
    blocks = [NormalBlock(w, [POINT.zero()]) for w in weights]
    return FixedComponent(name, 0, moment, POINT, POINT.one(), POINT.zero(),
                          blocks)


def zr(shift, num, den):
    return ZRational(POINT, shift,
                     {j: POINT.scalar(c) for j, c in num.items()}, den)


# -- chi_tilde ----------------------------------------------------------------

def test_chi_tilde_point_single_weight():
    F = point_component("f", 0, [1])
    for m in (0, 3):
        assert chi_tilde(F, m) == zr(0, {0: 1}, {1: 1})


def test_chi_tilde_point_two_weights():
    F = point_component("f", 0, [1, -1])
    assert chi_tilde(F, 1) == zr(1, {0: -1}, {1: 2})   # -z/(1-z)^2


def test_chi_tilde_cp1_component():
    # the sphere component at moment zero inside cpn_linear([0,0,1],1):
    # (m+1)/(1-z) - z/(1-z)^2, the sign of the z-term pinned by the oracle
    F = builtin("cp001").component("w0")
    m = 1
    want = zr(0, {0: m + 1}, {1: 1}) + zr(1, {0: -1}, {1: 2})
    assert chi_tilde(F, m) == want


# -- character ----------------------------------------------------------------

def test_character_matches_oracle_all_builtins():
    for name in builtin_names():
        p = builtin(name)
        for m in range(0, 6):
            assert character(p, m) == builtin_oracle(name, m).to_laurent(), \
                (name, m)


def test_character_worked_examples():
    assert character(builtin("cp1"), 2) == LaurentPolynomial(
        {0: 1, 1: 1, 2: 1})
    assert character(builtin("cp001"), 1) == LaurentPolynomial({0: 2, 1: 1})


def test_character_m0_is_one_for_connected_builders():
    for name in ("cp1", "cp001", "cp012", "prod11", "dim6", "dim6b"):
        assert character(builtin(name), 0) == LaurentPolynomial({0: 1})


def test_character_weight_support_bound():
    for name in builtin_names():
        p = builtin(name)
        jmin = min(F.moment for F in p.components)
        jmax = max(F.moment for F in p.components)
        for m in range(0, 5):
            lo, hi = character(p, m).support()
            assert lo >= m * jmin and hi <= m * jmax


def test_inconsistent_data_fails_pole_cancellation():
    p = cpn_linear([0, 1], 1)
    p.components[0].blocks[0].weight = 2    # breaks global consistency
    with pytest.raises(NotAPolynomial):
        character(p, 1)


def test_random_consistency_preserving_transforms():
    rng = random.Random(7)
    bases = ["cp1", "cp001", "cp012", "prod11"]
    for _ in range(100):
        p = builtin(rng.choice(bases))
        op = rng.randrange(3)
        if op == 0:
            p = shift_moment(p, rng.randint(-4, 4))
        elif op == 1:
            p = product(p, builtin(rng.choice(["cp1", "prod11"])))
        else:
            p = bundle_power(p, rng.randint(1, 3))
        character(p, rng.randint(0, 2))    # must not raise


# -- totals -------------------------------------------------------------------

def test_rr_total_worked_examples():
    for m in range(0, 6):
        assert rr_total(builtin("cp1"), m) == m + 1
        assert rr_total(builtin("cp012"), m) == (m + 1) * (m + 2) // 2
    two = product(cpn_linear([0, 1], 1), cpn_linear([0, 1], 1))
    for m in range(0, 4):
        assert rr_total(two, m) == (m + 1) ** 2


def test_kunneth_consistency_at_z_equals_one():
    a, b = builtin("cp1"), builtin("cp012")
    p = product(a, b)
    for m in (1, 2, 3):
        assert rr_total(p, m) == rr_total(a, m) * rr_total(b, m)
        want = convolve(builtin_oracle("cp1", m), builtin_oracle("cp012", m))
        assert character(p, m) == want.to_laurent()


# -- numeric localization ------------------------------------------------------

def test_dh_inner_cp1_pushforward():
    p = builtin("cp1")
    for m in (1, 2, 8):
        for x in (0.03, 0.1, 0.2, -0.15):
            got = dh_inner(p, None, m, x)
            want = (cmath.exp(2j * cmath.pi * m * x) - 1) / (2j * cmath.pi * x)
            assert abs(got - want) < 1e-12


def test_dh_inner_rejects_zero():
    with pytest.raises(ValueError):
        dh_inner(builtin("cp1"), None, 1, 0.0)


def test_dh_inner_m0_constant_rho_sums_to_zero_exactly():
    # int_M 1 vanishes for dim M > 0: every Laurent coefficient cancels
    for name in ("cp1", "cp001", "cp012", "prod11", "dim6"):
        prep = PreparedInner(builtin(name), 0, None, 8)
        assert prep.laurent_sum(8) == {}


def test_dh_inner_moment_shift_factor():
    p = builtin("cp001")
    q = shift_moment(p, 2)
    m, x = 3, 0.07
    a = dh_inner(p, None, m, x)
    b = dh_inner(q, None, m, x)
    assert abs(b - cmath.exp(2j * cmath.pi * m * x * 2) * a) < 1e-12


def test_dh_inner_conjugate_symmetry():
    p = builtin("prod11")
    for x in (0.05, 0.13):
        a = dh_inner(p, "todd", 2, x)
        b = dh_inner(p, "todd", 2, -x)
        assert abs(b - a.conjugate()) < 1e-11


# -- equivariant Todd and the Kirillov identity --------------------------------

def test_equivariant_todd_point_no_blocks():
    F = FixedComponent("pt", 0, 0, POINT, POINT.one(), POINT.zero(), [])
    cls = equivariant_todd_at_F(F, 6)
    assert cls.series.integrate_over_F() == {0: Fraction(1)}


def test_equivariant_todd_point_single_block():
    # td(-u) = 1 - u/2 + u^2/12 - ...
    F = point_component("pt", 0, [1])
    series = equivariant_todd_at_F(F, 4).series.integrate_over_F()
    assert series[0] == 1
    assert series[1] == Fraction(-1, 2)
    assert series[2] == Fraction(1, 12)
    assert series.get(3, Fraction(0)) == 0
    assert series[4] == Fraction(-1, 720)


def test_component_laurent_cp1_minimum():
    # 1/(1 - e^u) = -1/u + 1/2 - u/12 + ...
    F = builtin("cp1").component("w0")
    laurent = component_u_laurent(F, 0, "todd", 3)
    assert laurent[-1] == -1
    assert laurent[0] == Fraction(1, 2)
    assert laurent[1] == Fraction(-1, 12)


def test_kirillov_check_builders():
    for name in ("cp1", "cp001", "prod11"):
        p = builtin(name)
        for m in (1, 2, 3, 4):
            dev = kirillov_check(p, m, [0.05, 0.1, 0.2])
            assert dev < 1e-8, (name, m, dev)


def test_kirillov_check_near_half_without_weight_two():
    # x near 1/2 is fine when every |weight| is 1
    dev = kirillov_check(builtin("cp1"), 3, [0.45])
    assert dev < 1e-8


def test_kirillov_uncalibrated_negative_control():
    dev = kirillov_check(builtin("cp1"), 3, [0.1],
                         weight_scale=Fraction(2))
    assert dev > 0.1


def test_series_order_is_stable_when_raised():
    p = builtin("cp001")
    base = default_series_order(p, 0.2)
    a = dh_inner(p, "todd", 2, 0.2, order=base)
    b = dh_inner(p, "todd", 2, 0.2, order=base + 10)
    assert abs(a - b) < 1e-12 * max(1.0, abs(a))


def test_thread_cap_respected_and_results_identical(monkeypatch):
    p = builtin("dgmw")
    baseline = character(p, 2)
    monkeypatch.setenv("EQUILOC_THREADS", "4")
    assert character(p, 2) == baseline
    monkeypatch.setenv("EQUILOC_THREADS", "not-a-number")
    assert character(p, 2) == baseline
