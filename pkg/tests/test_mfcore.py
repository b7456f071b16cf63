"""Matrix factorizations, morphisms, cones, homotopies and reduction."""

import pytest

from mfcalc.catalog import Label, catalog_get
from mfcalc.fields import QQ
from mfcalc.mfcore import (
    MatrixFactorization,
    MfMorphism,
    cone,
    cone_triangle,
    identity_morphism,
    is_zero_object,
    mat_eq,
    mat_parse,
    mf_conjugate,
    mf_reduce,
    null_homotopy,
    scalar_morphism,
    trivial_mf,
    zero_mf,
    zero_morphism,
)
from mfcalc.polyring import A_INFINITY, D_INFINITY, RingDescriptor, poly_from_string


def _mf(ring, a_rows, b_rows):
    return MatrixFactorization(ring, mat_parse(a_rows, ring), mat_parse(b_rows, ring))


def test_verify_accepts_catalog_shapes(ring_a, ring_d):
    m = _mf(ring_a, [["x", "y^3"], ["0", "-x"]], [["x", "y^3"], ["0", "-x"]])
    assert m.verify()
    n = _mf(ring_d, [["x*y"]], [["x"]])
    assert n.verify()


def test_verify_rejects_wrong_pair(ring_a):
    with pytest.raises(ValueError):
        _mf(ring_a, [["x"]], [["y"]])
    # same matrices over the wrong ring fail too
    ring_d = RingDescriptor(D_INFINITY, 1)
    with pytest.raises(ValueError):
        _mf(ring_d, [["x"]], [["x"]])


def test_shift_is_an_involution(ring_a):
    m = catalog_get(ring_a, Label("I", 2))
    assert m.shift().shift() == m
    assert mat_eq(m.shift().a, m.b)


def test_direct_sum_block_structure(ring_a):
    m1 = catalog_get(ring_a, Label("I", 1))
    m2 = catalog_get(ring_a, Label("I", 2))
    s = m1.direct_sum(m2)
    assert s.size == m1.size + m2.size
    assert s.verify()
    with pytest.raises(ValueError):
        m1.direct_sum(catalog_get(RingDescriptor(D_INFINITY, 1), Label("X")))


def test_trivial_and_zero_objects(ring_a):
    t = trivial_mf(ring_a)
    assert t.verify() and t.size == 1
    assert trivial_mf(ring_a, swapped=True) == t.shift()
    z = zero_mf(ring_a)
    assert z.size == 0
    assert is_zero_object(z)
    assert is_zero_object(t)
    assert not is_zero_object(catalog_get(ring_a, Label("I", 3)))


def test_morphism_must_intertwine(ring_a):
    m1 = catalog_get(ring_a, Label("I", 1))
    m2 = catalog_get(ring_a, Label("I", 2))
    with pytest.raises(ValueError):
        MfMorphism(m1, m2,
                   mat_parse([["1", "0"], ["0", "1"]], ring_a),
                   mat_parse([["1", "0"], ["0", "1"]], ring_a))
    # multiplication by y: alpha = beta = diag(y, 1) does intertwine
    phi = MfMorphism(m1, m2,
                     mat_parse([["y", "0"], ["0", "1"]], ring_a),
                     mat_parse([["y", "0"], ["0", "1"]], ring_a))
    assert phi.src is m1 and phi.tgt is m2


def test_morphism_compose_and_shift(ring_a):
    m = catalog_get(ring_a, Label("I", 2))
    ident = identity_morphism(m)
    assert ident.compose(ident).alpha == ident.alpha
    sh = ident.shift()
    assert sh.src == m.shift()
    y_map = scalar_morphism(m, poly_from_string("y", ring_a))
    composed = y_map.compose(y_map)
    y2_map = scalar_morphism(m, poly_from_string("y^2", ring_a))
    assert composed.alpha == y2_map.alpha


def test_null_homotopy_finds_witness(ring_a):
    m = catalog_get(ring_a, Label("I", 2))
    # y^2 * id is null-homotopic on I(2); y * id is not
    h = null_homotopy(scalar_morphism(m, poly_from_string("y^2", ring_a)))
    assert h is not None
    assert null_homotopy(scalar_morphism(m, poly_from_string("y", ring_a))) is None
    assert null_homotopy(zero_morphism(m, m)) is not None


def test_homotopy_witness_is_checked_exactly(ring_a):
    m = catalog_get(ring_a, Label("I", 3))
    phi = scalar_morphism(m, poly_from_string("y^3", ring_a))
    pair = null_homotopy(phi)
    # the witness pair (h, k) satisfies alpha = A*h + k*B exactly
    assert pair is not None
    h, k = pair
    from mfcalc.mfcore import mat_add, mat_mul
    fd = ring_a.field
    rebuilt = mat_add(mat_mul(m.a, h, fd, cols=m.size),
                      mat_mul(k, m.b, fd, cols=m.size), fd)
    assert mat_eq(rebuilt, phi.alpha)


def test_cone_of_zero_is_sum_with_shift(ring_a):
    from mfcalc.mfcore import block_matrix, identity, mat_neg

    m1 = catalog_get(ring_a, Label("I", 1))
    m2 = catalog_get(ring_a, Label("I", 2))
    c, iota, pi = cone(zero_morphism(m1, m2))
    assert c.verify()
    assert iota.verify() and pi.verify()
    # the shift block enters with a sign; diag(I, I) / diag(I, -I) fixes it
    split = m2.direct_sum(m1.shift())
    fd = ring_a.field
    n1, n2 = m1.size, m2.size
    eye1 = identity(n1, ring_a.nvars, fd)
    eye2 = identity(n2, ring_a.nvars, fd)
    alpha = block_matrix([[eye2, None], [None, eye1]], [n2, n1], [n2, n1])
    beta = block_matrix([[eye2, None], [None, mat_neg(eye1, fd)]],
                        [n2, n1], [n2, n1])
    iso = MfMorphism(c, split, alpha, beta)
    assert iso.verify()


def test_cone_of_identity_is_contractible(ring_a):
    m = catalog_get(ring_a, Label("I", 2))
    c, _, _ = cone(identity_morphism(m))
    assert c.verify()
    assert is_zero_object(c)


def test_cone_triangle_composites_vanish(ring_a):
    m = catalog_get(ring_a, Label("I", 2))
    tri = cone_triangle(scalar_morphism(m, poly_from_string("y", ring_a)))
    assert tri.y.verify() and tri.z.verify()
    vu = tri.v.compose(tri.u)
    assert null_homotopy(vu) is not None
    wv = tri.w.compose(tri.v)
    assert null_homotopy(wv) is not None


def test_conjugate_preserves_class(ring_a):
    from fractions import Fraction

    m = catalog_get(ring_a, Label("I", 2))
    p = [[Fraction(1), Fraction(0)], [Fraction(1), Fraction(1)]]
    q = [[Fraction(1), Fraction(0)], [Fraction(-1), Fraction(1)]]
    other, iso = mf_conjugate(m, p, q)
    assert other.verify()
    assert other.size == m.size
    assert iso.src == m and iso.tgt == other
    assert iso.verify()


def test_reduce_strips_trivial_summands(ring_a):
    m = catalog_get(ring_a, Label("I", 2))
    padded = m.direct_sum(trivial_mf(ring_a)).direct_sum(trivial_mf(ring_a, True))
    red, complete = mf_reduce(padded)
    assert complete
    assert red.size == m.size
    assert red.verify()


def test_reduce_of_contractible_reaches_zero(ring_a):
    c, _, _ = cone(identity_morphism(catalog_get(ring_a, Label("I", 3))))
    red, complete = mf_reduce(c)
    assert complete
    assert red.size == 0


def test_reduce_keeps_reduced_objects(ring_d):
    m = catalog_get(ring_d, Label("N", 2, 1))
    red, complete = mf_reduce(m)
    assert complete
    assert red == m


def test_json_round_trip(ring_d):
    m = catalog_get(ring_d, Label("M", 1, -1))
    again = MatrixFactorization.from_json(m.to_json())
    assert again == m
