"""Catalog labels, entries, counts and the syzygy of the residue field."""

import pytest

from mfcalc.catalog import (
    Label,
    base_ring,
    catalog_get,
    catalog_list,
    omega_k_label,
    parse_label,
)
from mfcalc.fields import QQ, gf
from mfcalc.mfcore import mat_to_strings
from mfcalc.polyring import A_INFINITY, D_INFINITY, RingDescriptor


def test_label_parsing_round_trip():
    for text in ("I(1)", "I(17)", "I(inf)", "X", "OX", "M(0,+)", "M(3,-)",
                 "N(1,+)", "N(5,-)", "I(2)#1", "M(1,+)#2"):
        lab = parse_label(text)
        assert str(lab) == text
        assert parse_label(str(lab)) == lab


def test_label_validation():
    with pytest.raises(ValueError):
        Label("I", 0)
    with pytest.raises(ValueError):
        Label("M", 1)          # missing sign
    with pytest.raises(ValueError):
        Label("N", 0, 1)       # N starts at 1
    with pytest.raises(ValueError):
        Label("X", 2)          # X carries no index
    with pytest.raises(ValueError):
        parse_label("K(2)")


def test_label_shift_action():
    assert Label("I", 4).shift() == Label("I", 4)
    assert Label("I", None).shift() == Label("I", None)
    assert Label("X").shift() == Label("OX")
    assert Label("OX").shift() == Label("X")
    assert Label("M", 2, 1).shift() == Label("M", 2, -1)
    assert Label("N", 3, -1).shift() == Label("N", 3, 1)
    lab = Label("M", 1, 1, sharp_level=2)
    assert lab.shift().sharp_level == 2


def test_curve_catalog_entries_are_factorizations(ring_a, ring_d):
    for ring in (ring_a, ring_d):
        for lab in catalog_list(ring, 6):
            m = catalog_get(ring, lab)
            assert m.verify(), str(lab)


def test_catalog_counts(ring_a, ring_d):
    # A-type: I(1)..I(n) and I(inf); D-type: X, OX, M(0..n,+-), N(1..n,+-)
    for n in (1, 3, 7):
        assert len(catalog_list(ring_a, n)) == n + 1
        assert len(catalog_list(ring_d, n)) == 4 * n + 4


def test_pinned_catalog_matrices(ring_a, ring_d):
    i3 = catalog_get(ring_a, Label("I", 3))
    assert mat_to_strings(i3.a, ring_a) == [["x", "y^3"], ["0", "-x"]]
    assert mat_to_strings(i3.b, ring_a) == [["x", "y^3"], ["0", "-x"]]
    iinf = catalog_get(ring_a, Label("I", None))
    assert mat_to_strings(iinf.a, ring_a) == [["x"]]
    x_obj = catalog_get(ring_d, Label("X"))
    assert mat_to_strings(x_obj.a, ring_d) == [["x"]]
    assert mat_to_strings(x_obj.b, ring_d) == [["x*y"]]
    ox_obj = catalog_get(ring_d, Label("OX"))
    assert mat_to_strings(ox_obj.a, ring_d) == [["x*y"]]
    m0 = catalog_get(ring_d, Label("M", 0, 1))
    assert mat_to_strings(m0.a, ring_d) == [["x^2"]]
    assert mat_to_strings(m0.b, ring_d) == [["y"]]


def test_minus_labels_are_shifts(ring_d):
    for fam, n in (("M", 1), ("M", 2), ("N", 1), ("N", 3)):
        plus = catalog_get(ring_d, Label(fam, n, 1))
        minus = catalog_get(ring_d, Label(fam, n, -1))
        assert minus == plus.shift()


def test_sharp_labels_give_doubled_entries(ring_a):
    ring2 = ring_a.sharp()
    lab = Label("I", 2, sharp_level=1)
    m = catalog_get(ring2, lab)
    assert m.verify()
    assert m.size == 4
    with pytest.raises(ValueError):
        catalog_get(ring2, Label("I", 2))  # sharp level must match dim - 1
    with pytest.raises(ValueError):
        catalog_get(ring_a, lab)


def test_base_ring_of_labels():
    assert base_ring(Label("I", 5), QQ).type == A_INFINITY
    assert base_ring(Label("X"), QQ).type == D_INFINITY
    # base_ring reports the underlying curve regardless of sharp level
    assert base_ring(Label("I", 1, sharp_level=2), QQ).dim == 1
    r = base_ring(Label("N", 1, 1), gf(5))
    assert r.field == gf(5)


def test_omega_k_labels():
    assert omega_k_label(A_INFINITY) == Label("I", 1)
    assert omega_k_label(D_INFINITY) == Label("N", 1, -1)
    assert omega_k_label(A_INFINITY, 2) == Label("I", 1, sharp_level=2)


def test_catalog_list_is_sorted_and_shift_closed(ring_d):
    labels = catalog_list(ring_d, 5)
    assert len(set(labels)) == len(labels)
    have = set(labels)
    for lab in labels:
        assert lab.shift() in have
