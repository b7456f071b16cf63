"""Exact polynomial arithmetic, ring descriptors, parsing and printing."""

from fractions import Fraction

import pytest

from mfcalc.fields import QQ, gf
from mfcalc.polyring import (
    A_INFINITY,
    D_INFINITY,
    RingDescriptor,
    is_unit_local,
    is_unit_y_inverted,
    leading_term,
    monomials_upto,
    p_add,
    p_eq,
    p_inverse_truncated,
    p_mono,
    p_mul,
    p_one,
    p_project_last,
    p_promote,
    p_sub,
    p_var,
    p_zero,
    poly_from_string,
    poly_to_string,
    total_degree,
)


def test_basic_arithmetic_is_exact():
    fd = QQ
    x = p_var(0, 2, fd)
    y = p_var(1, 2, fd)
    s = p_add(x, y, fd)
    sq = p_mul(s, s, fd)
    assert sq == {(2, 0): Fraction(1), (1, 1): Fraction(2), (0, 2): Fraction(1)}
    assert p_sub(sq, sq, fd) == p_zero()
    third = p_mono((0, 0), Fraction(1, 3))
    assert p_mul(third, p_mono((0, 0), Fraction(3)), fd) == p_one(2, fd)


def test_cancellation_removes_keys():
    fd = QQ
    x = p_var(0, 2, fd)
    neg = p_sub(p_zero(), x, fd)
    assert p_add(x, neg, fd) == {}
    assert not p_add(x, neg, fd)


def test_total_degree_and_leading_term():
    p = {(2, 1): Fraction(1), (0, 2): Fraction(-3)}
    assert total_degree(p) == 3
    assert total_degree(p_zero()) == -1
    e, c = leading_term(p)
    assert e == (2, 1) and c == Fraction(1)


def test_ring_descriptor_equations():
    ra = RingDescriptor(A_INFINITY, 1)
    rd = RingDescriptor(D_INFINITY, 1)
    assert poly_to_string(ra.f(), ra) == "x^2"
    assert poly_to_string(rd.f(), rd) == "x^2*y"
    r2 = ra.sharp()
    assert r2.dim == 2 and r2.nvars == 3
    assert poly_to_string(r2.f(), r2) == "z^2 + x^2"
    assert r2.unsharp() == ra
    r3 = rd.sharp().sharp()
    assert poly_to_string(r3.f(), r3) == "x^2*y + w^2 + z^2"


def test_normal_form_reduces_by_equation():
    ra = RingDescriptor(A_INFINITY, 1)
    x = p_var(0, 2, QQ)
    assert ra.nf(p_mul(x, x, QQ)) == {}
    rd = RingDescriptor(D_INFINITY, 1)
    xxy = poly_from_string("x^2*y + x", rd)
    assert rd.nf(xxy) == poly_from_string("x", rd)
    # x^2 itself is not in the D-type ideal, only x^2*y is
    assert rd.nf(poly_from_string("x^2", rd)) == poly_from_string("x^2", rd)


def test_string_round_trip():
    ra = RingDescriptor(A_INFINITY, 1)
    for text in ("x", "y^3", "x*y - 2*y^2", "1/2*x + 3", "-x*y^4 + y"):
        p = poly_from_string(text, ra)
        assert p_eq(poly_from_string(poly_to_string(p, ra), ra), p)
    assert poly_to_string(p_zero(), ra) == "0"


def test_parse_rejects_garbage():
    ra = RingDescriptor(A_INFINITY, 1)
    for bad in ("x +", "q", "x^", "((x)", "2**x"):
        with pytest.raises(ValueError):
            poly_from_string(bad, ra)


def test_parse_parentheses_and_constants():
    ra = RingDescriptor(A_INFINITY, 1)
    p = poly_from_string("(x + y)*(x - y)", ra)
    assert p == poly_from_string("x^2 - y^2", ra)
    assert poly_from_string("7", ra) == {(0, 0): Fraction(7)}


def test_monomials_upto_counts():
    # 2 variables, degree <= d: (d+1)(d+2)/2 monomials
    assert len(monomials_upto(2, 3)) == 10
    assert len(monomials_upto(3, 2)) == 10
    assert monomials_upto(2, 0) == [(0, 0)]


def test_unit_detection_local_and_y_inverted():
    ra = RingDescriptor(A_INFINITY, 1)
    assert is_unit_local(poly_from_string("1 + x", ra))
    assert not is_unit_local(poly_from_string("x + y", ra))
    # y is invertible once y is inverted, but x is nilpotent there
    assert is_unit_y_inverted(poly_from_string("y^3", ra), ra)
    assert is_unit_y_inverted(poly_from_string("y + x", ra), ra)
    assert not is_unit_y_inverted(poly_from_string("x", ra), ra)
    assert not is_unit_y_inverted(p_zero(), ra)


def test_truncated_inverse():
    fd = QQ
    p = poly_from_string("1 - y", RingDescriptor(A_INFINITY, 1))
    inv = p_inverse_truncated(p, 6, fd)
    prod = p_mul(p, inv, fd)
    kept = {e: c for e, c in prod.items() if sum(e) < 6}
    assert kept == {(0, 0): Fraction(1)}
    with pytest.raises(ValueError):
        p_inverse_truncated(poly_from_string("y", RingDescriptor(A_INFINITY, 1)), 4, fd)


def test_promote_and_project_variables():
    fd = QQ
    p = {(1, 2): Fraction(5)}
    up = p_promote(p)
    assert up == {(1, 2, 0): Fraction(5)}
    z = {(0, 0, 1): Fraction(1), (1, 0, 0): Fraction(2)}
    assert p_project_last(z, fd) == {(1, 0): Fraction(2)}


def test_prime_field_arithmetic():
    f5 = gf(5)
    assert f5.add(3, 4) == 2
    assert f5.inv(2) == 3
    assert f5.parse("7") == 2
    with pytest.raises(ValueError):
        gf(4)
    ra5 = RingDescriptor(A_INFINITY, 1, field=f5)
    p = poly_from_string("3*x + 4*x", ra5)
    assert p == {(1, 0): 2}


def test_ring_descriptor_json_round_trip():
    for ring in (RingDescriptor(A_INFINITY, 1), RingDescriptor(D_INFINITY, 2),
                 RingDescriptor(A_INFINITY, 1, field=gf(7))):
        again = RingDescriptor.from_json(ring.to_json())
        assert again == ring


def test_ring_descriptor_rejects_bad_dim():
    with pytest.raises(ValueError):
        RingDescriptor(A_INFINITY, 0)
    with pytest.raises(ValueError):
        RingDescriptor("E-infinity", 1)
