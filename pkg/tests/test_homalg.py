"""Stable Hom profiles, fingerprints, morphism spaces and Tor.

Every pinned number here was frozen from the dense oracle in oracles.py,
which recomputes the same quantity with independently written dense
elimination; several tests run both routes side by side.
"""

import pytest

from mfcalc.catalog import Label, catalog_get
from mfcalc.fields import QQ, gf
from mfcalc.homalg import (
    TruncationContext,
    cokernel_module,
    default_context,
    fingerprint_add,
    fingerprint_equal,
    hom_space,
    quotient_module,
    quotient_resolution,
    stable_hom_fingerprint,
    stable_hom_profile,
    tor_presentation,
)
from mfcalc.mfcore import mat_mul, mat_to_strings
from mfcalc.polyring import A_INFINITY, D_INFINITY, RingDescriptor, p_mono

from oracles import oracle_hom_profile, oracle_tor_profile


def test_default_context_scaling():
    assert default_context().order == 32
    assert default_context(10).order == 48
    assert default_context(3).order == 32
    assert default_context(10).degree_bound == 16
    with pytest.raises(ValueError):
        TruncationContext(4, 8)


def test_truncated_cokernel_dimensions(ring_a):
    # coker(A) for I(2) is R^2 modulo the columns of [[x, y^2], [0, -x]]:
    # two generators, relations kick in from degree 1 on, then the graded
    # growth settles at two new classes per degree
    m = catalog_get(ring_a, Label("I", 2))
    mod = cokernel_module(m, 12)
    dims = [mod.dims_upto(g) for g in range(6)]
    assert dims == [2, 5, 7, 9, 11, 13]
    q = quotient_module(ring_a, 3, 12)
    assert [q.dims_upto(g) for g in range(5)] == [1, 2, 3, 3, 3]


def test_module_element_and_mult(ring_a):
    q = quotient_module(ring_a, 3, 12)
    fd = ring_a.field
    # y^2 is nonzero in R/(x, y^3), y^3 is zero, x is zero
    assert q.element((0, 2), 0)
    assert not q.element((0, 3), 0)
    assert not q.element((1, 0), 0)
    cls = q.element((0, 1), 0)
    assert not q.mult(cls, p_mono((0, 2), fd.one()))
    assert q.mult(cls, p_mono((0, 1), fd.one()))


def test_pinned_end_profile_of_i1(ring_a, ctx32):
    dims, window = stable_hom_profile(
        catalog_get(ring_a, Label("I", 1)), catalog_get(ring_a, Label("I", 1)),
        ctx32)
    assert window == 29
    assert all(d == 2 for d in dims)


def test_pinned_hom_profile_i2_i3(ring_a, ctx32):
    dims, _ = stable_hom_profile(
        catalog_get(ring_a, Label("I", 2)), catalog_get(ring_a, Label("I", 3)),
        ctx32)
    assert dims[:6] == [1, 3, 4, 4, 4, 4]


def test_pinned_end_profile_iinf(ring_a, ctx32):
    dims, _ = stable_hom_profile(
        catalog_get(ring_a, Label("I", None)),
        catalog_get(ring_a, Label("I", None)), ctx32)
    assert dims[:8] == [1, 2, 3, 4, 5, 6, 7, 8]


def test_profiles_match_dense_oracle(ring_a, ring_d):
    order = 14
    ctx = TruncationContext(order, 8)
    pairs = [
        (ring_a, Label("I", 1), Label("I", 1)),
        (ring_a, Label("I", 2), Label("I", 3)),
        (ring_a, Label("I", 3), Label("I", 1)),
        (ring_a, Label("I", None), Label("I", 2)),
        (ring_d, Label("X"), Label("X")),
        (ring_d, Label("M", 1, 1), Label("N", 1, -1)),
        (ring_d, Label("N", 2, 1), Label("M", 0, 1)),
    ]
    for ring, src, probe in pairs:
        m_src = catalog_get(ring, src)
        m_probe = catalog_get(ring, probe)
        dims, window = stable_hom_profile(m_src, m_probe, ctx)
        expected = oracle_hom_profile(m_src, m_probe, order)
        assert dims[:window] == expected[:window], (str(src), str(probe))


def test_profiles_match_oracle_over_prime_field():
    ring = RingDescriptor(A_INFINITY, 1, field=gf(7))
    ctx = TruncationContext(12, 8)
    m2 = catalog_get(ring, Label("I", 2))
    m3 = catalog_get(ring, Label("I", 3))
    dims, window = stable_hom_profile(m2, m3, ctx)
    assert dims[:window] == oracle_hom_profile(m2, m3, 12)[:window]


def test_fingerprint_additivity(ring_d, ctx32):
    from mfcalc.catalog import catalog_list

    probes = [(str(lab), catalog_get(ring_d, lab))
              for lab in catalog_list(ring_d, 3)]
    m1 = catalog_get(ring_d, Label("M", 2, 1))
    m2 = catalog_get(ring_d, Label("X"))
    f1 = stable_hom_fingerprint(m1, probes, ctx32)
    f2 = stable_hom_fingerprint(m2, probes, ctx32)
    fsum = stable_hom_fingerprint(m1.direct_sum(m2), probes, ctx32)
    assert fingerprint_equal(fsum, fingerprint_add(f1, f2))


def test_fingerprint_ignores_contractibles(ring_a, ctx32):
    from mfcalc.mfcore import trivial_mf

    probes = [("I(1)", catalog_get(ring_a, Label("I", 1)))]
    m = catalog_get(ring_a, Label("I", 2))
    plain = stable_hom_fingerprint(m, probes, ctx32)
    padded = stable_hom_fingerprint(
        m.direct_sum(trivial_mf(ring_a)), probes, ctx32)
    assert fingerprint_equal(plain, padded)


def test_hom_space_realizes_classes(ring_a):
    m1 = catalog_get(ring_a, Label("I", 1))
    m2 = catalog_get(ring_a, Label("I", 2))
    space = hom_space(m1, m2, TruncationContext(16, 6))
    # each basis element is a genuine strict morphism; the filtration dims
    # stabilize at the stable Hom value 2
    assert space.dims == (1, 2, 2, 2, 2, 2)
    assert space.morphisms
    for phi in space.morphisms:
        assert phi.verify()
    for phi in space.homotopies:
        assert phi.is_null_homotopic()


def test_quotient_resolution_composites_vanish(ring_a):
    res = quotient_resolution(ring_a, 3)
    fd = ring_a.field
    for i in (1, 2, 3):
        left = res.diff(i)
        right = res.diff(i + 1)
        prod = mat_mul(left, right, fd, cols=len(right[0]))
        for row in prod:
            for p in row:
                assert ring_a.is_zero_mod_f(p), (i, mat_to_strings(prod, ring_a))
    assert res.rank(0) == 1
    assert res.rank(1) == 2
    assert res.rank(5) == 2


def test_pinned_tor_one_profile(ring_a):
    # Tor_1(R/(x,y^a), (x,y^a)) = (R/(x,y^a))^2: cumulative dims step by
    # two per degree up to 2a and the class degrees pair up
    a = 3
    ctx = default_context(8)
    res = quotient_resolution(ring_a, a)
    ideal = catalog_get(ring_a, Label("I", a))
    tor = tor_presentation(res, 1, ideal, ctx)
    assert tor.finite_length
    assert tor.total_dim == 2 * a
    assert tor.dims[: a + 2] == (2, 4, 6, 6, 6)
    assert tor.class_degrees() == (0, 0, 1, 1, 2, 2)


def test_tor_against_dense_oracle(ring_a):
    order = 16
    ctx = TruncationContext(order, 8)
    for a in (1, 2, 3):
        res = quotient_resolution(ring_a, a)
        ideal = catalog_get(ring_a, Label("I", a))
        tor = tor_presentation(res, 1, ideal, ctx)
        dense = oracle_tor_profile(
            ring_a, res.diff(1), res.diff(2), ideal.a, ideal.size, order)
        common = min(tor.window, len(dense))
        assert list(tor.dims[:common]) == dense[:common], a


def test_tor_window_shrinks_with_coefficient_presentation(ring_a):
    # the junk-class regression: Tor_2 against the quotient module used to
    # report spurious classes near the truncation edge for a >= 4
    a = 5
    ctx = default_context(max(a, 2) + 2)
    res = quotient_resolution(ring_a, a)
    quotient = quotient_module(ring_a, a, ctx.order)
    cross = tor_presentation(res, 2, quotient, ctx)
    assert cross.finite_length
    assert cross.total_dim == 2 * a
    ideal = catalog_get(ring_a, Label("I", a))
    tor = tor_presentation(res, 1, ideal, ctx)
    common = min(tor.window, cross.window)
    assert tor.dims[:common] == cross.dims[:common]


def test_tor_annihilation_witness(ring_a):
    a = 5
    ctx = default_context(a + 4)
    res = quotient_resolution(ring_a, a)
    ideal = catalog_get(ring_a, Label("I", a))
    tor = tor_presentation(res, 1, ideal, ctx)
    fd = ring_a.field
    # x*y^b kills everything (x does); y^{2b} does not when 2b < a
    kills, witness = tor.annihilates([p_mono((1, 1), fd.one())])
    assert kills and witness is None
    kills, witness = tor.annihilates([p_mono((0, 2), fd.one())])
    assert not kills
    assert witness["class_degree"] + 2 == witness["residual_degree"]
    kills, _ = tor.annihilates([p_mono((0, a), fd.one())])
    assert kills


def test_tor_first_argument_as_factorization(ring_a):
    # giving the factorization itself resolves its cokernel two-periodically
    a = 2
    ctx = default_context(6)
    ideal = catalog_get(ring_a, Label("I", a))
    tor = tor_presentation(ideal, 1, ideal, ctx)
    assert tor.dims == tuple(sorted(tor.dims))
    assert all(d >= 0 for d in tor.dims)
