"""Level certificates, the Tor obstruction, and relative dimension.

A level certificate bounds how many cone steps it takes to build the
syzygy of the residue field from a given object: level 0 means the
syzygy label already occurs among the object's stable summands, and
level 1 attaches a verified triangle whose ends are shifts of one
summand and whose middle contains the syzygy label.  Over the curve
rings every nonzero object admits such a certificate.

The Tor obstruction shows that one cone step is sometimes too few: if
the ideal (x, y^a) were built in two steps from (x, y^b), the square of
the smaller ideal would annihilate Tor_1(R/(x, y^a), (x, y^a)).  That
Tor module is computed exactly from the two-periodic resolution and is
a sum of two copies of R/(x, y^a), on which y^{2b} acts nontrivially
whenever a > 2b, while y^{2b} only lies in (x, y^a) when 2b >= a.  The
certificate carries the resolution, the graded Tor dimensions, the
annihilation witness, and the monomial membership check.

relative_dimension evaluates the decision table for the number of cone
steps needed to build a thick subcategory from a shift-closed class of
labels: zero when the class already is the subcategory, infinity when
it is confined to a proper thick subcategory or has finitely many
indecomposables, and one otherwise, in which case bridging triangles
are attached that place sampled missing labels in the two-step closure.
orlov_spectrum reports the resulting spectra: {1} for the whole stable
category, empty for the subcategory of punctured-spectrum-free objects.
"""

from __future__ import annotations

from dataclasses import dataclass

from .catalog import Label, catalog_get, omega_k_label, parse_label
from .classify import (
    CM,
    CMO,
    SubcategoryDescriptor,
    chain_height,
    decompose,
    label_sort_key,
)
from .homalg import (
    TruncationContext,
    default_context,
    quotient_module,
    quotient_resolution,
    tor_presentation,
)
from .knorrer import unsharp
from .mfcore import MatrixFactorization, mat_to_strings
from .polyring import A_INFINITY, RingDescriptor, p_mono, poly_to_string
from .triangles import VerifiedTriangle, bridge_triangle, schreyer_triangle, telescope

ASSUMPTIONS = ("catalog-completeness", "field-substitution")


class LevelError(ValueError):
    pass


# ---------------------------------------------------------------------------
# level certificates
# ---------------------------------------------------------------------------

@dataclass
class LevelCertificate:
    """Places the syzygy of k in the (level+1)-step closure of the subject.

    For subjects over higher-dimensional rings the computation happens on
    the curve after applying unsharp `transport` times; the level is
    preserved by that transport, which the certificate records.  Level 0
    is witnessed by the decomposition alone; level 1 by a verified
    triangle whose ends are shifts of the anchor summand and whose middle
    block at witness_slot is the syzygy object on the nose.
    """

    subject: MatrixFactorization
    curve_subject: MatrixFactorization
    target: Label
    curve_target: Label
    level: int
    summands: tuple
    witness: VerifiedTriangle = None
    witness_slot: int = None
    witness_anchor: Label = None
    end_shifts: tuple = None
    transport: int = 0
    context: TruncationContext = None
    max_index: int = 10

    def to_json(self) -> dict:
        data = {
            "kind": "level",
            "claim": "%s lies in the %d-step closure of the subject"
                     % (self.target, self.level + 1),
            "target": str(self.target),
            "curve_target": str(self.curve_target),
            "level": self.level,
            "subject": self.subject.to_json(),
            "summands": [str(lab) for lab in self.summands],
            "transport": self.transport,
            "max_index": self.max_index,
            "assumptions": list(ASSUMPTIONS),
            "context": self.context.to_json(),
        }
        if self.transport:
            data["curve_subject"] = self.curve_subject.to_json()
        if self.witness is not None:
            data["witness"] = self.witness.to_json()
            data["witness_slot"] = self.witness_slot
            data["witness_anchor"] = str(self.witness_anchor)
            data["end_shifts"] = [list(pair) for pair in self.end_shifts]
        return data


def level_witness(m: MatrixFactorization, ctx: TruncationContext = None,
                  max_index: int = 10) -> LevelCertificate:
    """Certificate that the syzygy of k is in the two-step closure of m.

    Claims level 0 exactly when the syzygy label itself appears among
    the stable summands of m; otherwise level 1 with a verified witness
    triangle.  Subjects over higher-dimensional rings are transported to
    the curve by unsharp, which preserves the level.
    """
    subject = m
    transport = 0
    work = m
    while work.ring.dim > 1:
        work = unsharp(work)
        transport += 1
    ring = work.ring
    if ctx is None:
        ctx = default_context(max_index + 2)
    summands = decompose(work, max_index, ctx)
    if not summands:
        raise LevelError("the subject is stably zero; no level certificate")
    curve_target = omega_k_label(ring.type)
    target = omega_k_label(ring.type, subject.ring.dim - 1)
    if curve_target in summands:
        return LevelCertificate(
            subject, work, target, curve_target, 0, summands,
            transport=transport, context=ctx, max_index=max_index)
    anchor, triangle, slot = _level_one_witness(ring, summands, ctx)
    ends = _end_shift_info(triangle, anchor)
    return LevelCertificate(
        subject, work, target, curve_target, 1, summands,
        witness=triangle, witness_slot=slot, witness_anchor=anchor,
        end_shifts=ends, transport=transport, context=ctx,
        max_index=max_index)


def _level_one_witness(ring, summands, ctx):
    """Triangle over shifts of one summand whose middle holds the syzygy."""
    target = omega_k_label(ring.type)
    anchor = sorted(set(summands), key=label_sort_key)[0]
    if ring.type == A_INFINITY:
        if anchor.index is None:
            triangle = schreyer_triangle(ring, "A-Iinf", ctx=ctx)
        else:
            triangle = telescope(ring, "I", anchor.index, ctx=ctx)
    elif anchor.family in ("X", "OX"):
        triangle = schreyer_triangle(ring, "D-OXX", ctx=ctx)
    elif anchor.family == "M" and anchor.index == 0:
        triangle = schreyer_triangle(ring, "D-MtoN", 0, 1, ctx)
    else:
        triangle = telescope(ring, anchor.family, anchor.index, -1, ctx)
    slots = [i for i, lab in enumerate(triangle.labels[1])
             if lab == str(target)]
    if not slots:
        raise LevelError(
            "middle of the witness triangle misses the syzygy label %s"
            % target)
    return anchor, triangle, slots[0]


def _end_shift_info(triangle, anchor):
    """How each end of the witness relates to the anchor summand."""
    out = []
    for end_text in (triangle.labels[0], triangle.labels[2]):
        end = parse_label(end_text)
        if end == anchor:
            steps = 0
        elif end == anchor.shift():
            steps = 1
        else:
            raise LevelError(
                "end %s of the witness is not a shift of the anchor %s"
                % (end, anchor))
        out.append((end_text, steps))
    return tuple(out)


# ---------------------------------------------------------------------------
# the Tor obstruction against two-step membership
# ---------------------------------------------------------------------------

@dataclass
class NonMembershipCertificate:
    """Evidence that (x, y^a) is not in the two-step closure of (x, y^b).

    Membership would force the square of (x, y^b) to annihilate
    Tor_1(R/(x, y^a), (x, y^a)).  The certificate computes that Tor
    module from the two-periodic resolution, records its graded
    dimensions twice (once as Tor_1 against the ideal, once as Tor_2
    against the quotient, which must agree), and exhibits a class on
    which y^{2b} acts nontrivially together with the monomial check
    that y^{2b} lies outside (x, y^a).  When a <= 2b the obstruction
    vanishes and the verdict is inconclusive: no claim either way.
    """

    a: int
    b: int
    verdict: str
    ring: RingDescriptor
    tor_dims: tuple
    tor_window: int
    finite_length: bool
    tor_total: object
    cross_dims: tuple
    resolution: dict
    annihilation: tuple
    membership_check: dict
    context: TruncationContext

    def to_json(self) -> dict:
        return {
            "kind": "tor-obstruction",
            "claim": "(x, y^%d) is not in the 2-step closure of (x, y^%d)"
                     % (self.a, self.b) if self.verdict == "not-in-level-1"
                     else "no obstruction detected for a=%d, b=%d"
                     % (self.a, self.b),
            "a": self.a,
            "b": self.b,
            "verdict": self.verdict,
            "ring": self.ring.to_json(),
            "tor_dims": list(self.tor_dims),
            "tor_window": self.tor_window,
            "finite_length": self.finite_length,
            "tor_total": self.tor_total,
            "cross_dims": list(self.cross_dims),
            "resolution": self.resolution,
            "annihilation": list(self.annihilation),
            "membership_check": self.membership_check,
            "assumptions": list(ASSUMPTIONS),
            "context": self.context.to_json(),
        }


def tor_nonmembership(a: int, b: int, ctx: TruncationContext = None,
                      ring: RingDescriptor = None) -> NonMembershipCertificate:
    """The Tor obstruction certificate for the ideal pair (x,y^a), (x,y^b)."""
    if ring is None:
        ring = RingDescriptor(A_INFINITY, 1)
    if ring.type != A_INFINITY or ring.dim != 1:
        raise LevelError("the Tor obstruction lives over the curve with x^2 = 0")
    if a < 1 or b < 1:
        raise LevelError("ideal exponents must be positive")
    if ctx is None:
        ctx = default_context(max(a, 2 * b) + 2)
    fd = ring.field
    resolution = quotient_resolution(ring, a)
    ideal = catalog_get(ring, Label("I", a))
    tor = tor_presentation(resolution, 1, ideal, ctx)
    quotient = quotient_module(ring, a, ctx.order)
    cross = tor_presentation(resolution, 2, quotient, ctx)
    common = min(tor.window, cross.window)
    if tor.dims[:common] != cross.dims[:common]:
        raise LevelError(
            "Tor_1 against the ideal and Tor_2 against the quotient "
            "disagree below degree %d" % common)

    generators = (p_mono((1, b), fd.one()), p_mono((0, 2 * b), fd.one()))
    annihilation = []
    obstruction_witness = None
    for gen in generators:
        kills, witness = tor.annihilates([gen])
        entry = {"generator": poly_to_string(gen, ring), "kills": kills}
        if witness is not None:
            entry["witness"] = {
                "class_index": witness["class_index"],
                "class_degree": witness["class_degree"],
                "residual_degree": witness["residual_degree"],
            }
            obstruction_witness = entry
        annihilation.append(entry)

    squared = p_mono((0, 2 * b), fd.one())
    residue = quotient.element((0, 2 * b), 0)
    membership = {
        "monomial": poly_to_string(squared, ring),
        "ideal": "(x, y^%d)" % a,
        "in_ideal": not residue,
        "exponent_comparison": "2b >= a" if 2 * b >= a else "2b < a",
    }

    obstructed = obstruction_witness is not None and not membership["in_ideal"]
    if obstructed != (a > 2 * b):
        raise LevelError(
            "computed obstruction disagrees with the exponent arithmetic "
            "for a=%d, b=%d" % (a, b))
    verdict = "not-in-level-1" if obstructed else "inconclusive"
    return NonMembershipCertificate(
        a, b, verdict, ring,
        tor.dims, tor.window, tor.finite_length, tor.total_dim,
        cross.dims,
        {name: mat_to_strings(resolution.diff(i + 1), ring)
         for i, name in enumerate(("d1", "d2", "d3"))},
        tuple(annihilation), membership, ctx)


# ---------------------------------------------------------------------------
# the relative dimension decision table
# ---------------------------------------------------------------------------

@dataclass
class DimensionCertificate:
    """Value of the decision table for building T from the class X.

    Value 1 in the proper-subcategory case carries bridging triangles:
    for each sampled label missing from X, a verified triangle with both
    ends at shifts of a member of X and the missing label in its middle,
    so two cone steps reach it.  The branch where X leaves the proper
    subcategory relies on the classification of thick subcategories and
    is tagged cited-theorem, with the syzygy-reaching triangle attached
    as a bounded witness when X contains a non-free label.
    """

    t_name: str
    descriptor: SubcategoryDescriptor
    value: object
    branch: str
    witnesses: tuple
    tags: tuple
    context: TruncationContext
    max_witness_index: int = 8

    def to_json(self) -> dict:
        return {
            "kind": "relative-dimension",
            "claim": "building %s from the described class takes %s cone "
                     "steps beyond the first" % (self.t_name, self.value),
            "T": self.t_name,
            "X": self.descriptor.to_json(),
            "value": self.value,
            "branch": self.branch,
            "max_witness_index": self.max_witness_index,
            "witnesses": [
                {"missing": w["missing"], "member": w["member"],
                 "triangle": w["triangle"].to_json()}
                for w in self.witnesses],
            "tags": list(self.tags),
            "assumptions": list(ASSUMPTIONS),
            "context": self.context.to_json(),
        }


def relative_dimension(t_name: str, x: SubcategoryDescriptor,
                       ctx: TruncationContext = None,
                       max_witness_index: int = 8) -> DimensionCertificate:
    """Decision-table value of the relative dimension of T with respect to X.

    T is CM (everything) or CMo (objects free on the punctured
    spectrum); X must be a shift-closed class contained in T.  The value
    is 0 when X already equals T, otherwise 1 or inf according to the
    table; in the constructive branch, bridging triangles witness every
    missing label up to max_witness_index.
    """
    if t_name not in (CM, CMO):
        raise LevelError("T must be %s or %s" % (CM, CMO))
    if not isinstance(x, SubcategoryDescriptor):
        raise LevelError("X must be a SubcategoryDescriptor")
    ring = RingDescriptor(x.ring_type, 1)
    if ctx is None:
        ctx = default_context(max_witness_index + 2)
    if t_name == CMO and not x.subset_of_cmo():
        raise LevelError(
            "X contains a label that is not free on the punctured "
            "spectrum, so X is not inside CMo")
    if x.equals_named(t_name):
        return DimensionCertificate(t_name, x, 0, "X equals T", (), (), ctx,
                                    max_witness_index)
    if t_name == CM:
        if not x.subset_of_cmo():
            witnesses = _syzygy_witnesses(ring, x, ctx)
            return DimensionCertificate(
                t_name, x, 1, "X differs from T and leaves the "
                "punctured-free subcategory", witnesses,
                ("cited-theorem",), ctx, max_witness_index)
        return DimensionCertificate(
            t_name, x, "inf", "X lies inside the punctured-free "
            "subcategory", (), ("cited-theorem",), ctx, max_witness_index)
    if x.ind_is_finite():
        return DimensionCertificate(
            t_name, x, "inf", "X has finitely many indecomposables",
            (), ("cited-theorem",), ctx, max_witness_index)
    witnesses = _bridge_witnesses(ring, x, max_witness_index)
    return DimensionCertificate(
        t_name, x, 1, "X differs from T and has infinitely many "
        "indecomposables", witnesses, (), ctx, max_witness_index)


def _syzygy_witnesses(ring, x, ctx):
    """Bounded witness for the branch that leaves the free subcategory.

    When X contains one of the three non-free labels, the corresponding
    short triangle places the syzygy of k in the two-step closure of X;
    generation of everything else in two steps is the cited
    classification result.
    """
    if ring.type == A_INFINITY:
        candidates = (Label("I", None),)
    else:
        candidates = (Label("X"), Label("OX"))
    for lab in candidates:
        if x.contains_label(lab):
            if ring.type == A_INFINITY:
                triangle = schreyer_triangle(ring, "A-Iinf", ctx=ctx)
            else:
                triangle = schreyer_triangle(ring, "D-OXX", ctx=ctx)
            return ({"missing": str(omega_k_label(ring.type)),
                     "member": str(lab), "triangle": triangle},)
    return ()


def _bridge_witnesses(ring, x, max_witness_index):
    """One bridging triangle per missing label up to the sample bound."""
    out = []
    for missing in x.missing_free_labels(max_witness_index):
        member = x.member_above_height(chain_height(missing))
        if member is None:
            raise LevelError(
                "no member of X above height %d to bridge from"
                % chain_height(missing))
        triangle = bridge_triangle(ring, member, missing)
        out.append({"missing": str(missing), "member": str(member),
                    "triangle": triangle})
    return tuple(out)


# ---------------------------------------------------------------------------
# the spectrum of generation times
# ---------------------------------------------------------------------------

@dataclass
class SpectrumCertificate:
    """Set of finite generation times of a thick subcategory.

    The whole stable category is generated in one cone step by any
    single non-free indecomposable and by nothing in zero steps, so its
    spectrum is {1}; the punctured-free subcategory admits no finite
    generation time at all.  Both values are dimension-independent: the
    square-adding functor transports generators both ways, which the
    certificate records as the transport note.
    """

    t_name: str
    ring: RingDescriptor
    spectrum: tuple
    example: dict = None

    def to_json(self) -> dict:
        data = {
            "kind": "orlov-spectrum",
            "claim": "the generation-time spectrum of %s is %s"
                     % (self.t_name,
                        "{%s}" % ", ".join(str(v) for v in self.spectrum)
                        if self.spectrum else "empty"),
            "T": self.t_name,
            "ring": self.ring.to_json(),
            "spectrum": list(self.spectrum),
            "transport": "invariant under adding a square to the equation",
            "assumptions": list(ASSUMPTIONS),
        }
        if self.example is not None:
            data["example"] = {
                "generator": self.example["generator"],
                "dimension": self.example["dimension"].to_json(),
            }
        return data


def orlov_spectrum(t_name: str, ring: RingDescriptor = None,
                   ctx: TruncationContext = None) -> SpectrumCertificate:
    """Spectrum of finite generation times: {1} for CM, empty for CMo.

    For CM the certificate attaches a single-object generator (the
    non-free indecomposable I(inf), resp. the pair X, OX) together with
    its relative-dimension certificate of value 1.
    """
    if ring is None:
        ring = RingDescriptor(A_INFINITY, 1)
    if t_name == CMO:
        return SpectrumCertificate(t_name, ring, ())
    if t_name != CM:
        raise LevelError("the spectrum is reported for %s or %s" % (CM, CMO))
    if ring.type == A_INFINITY:
        labels = (Label("I", None),)
    else:
        labels = (Label("X"), Label("OX"))
    x = SubcategoryDescriptor("finite-list", ring.type, labels=labels)
    dimension = relative_dimension(CM, x, ctx)
    generator = labels[0].with_sharp_level(ring.dim - 1)
    return SpectrumCertificate(
        t_name, ring, (1,),
        {"generator": str(generator), "dimension": dimension})
