"""Decomposition against the catalog and thick subcategory classification.

Every object over one of the curve rings is stably isomorphic to a finite
direct sum of catalog entries, and the graded dimensions of stable Hom
into a fixed probe list are additive in the source.  decompose therefore
recovers the summand multiset numerically: it solves for the unique
nonnegative integer combination of catalog profiles matching the profile
of the input, by exact rational elimination over the probe grading.  No
splitting idempotents are produced; downstream consumers only need the
multiplicities.

punctured_free decides, exactly, whether the underlying module is free
away from the closed point.  Inverting y turns both curve rings into
k((y))[x]/(x^2), where an entry is a unit precisely when it keeps an
x-free monomial, so fraction-free unit-pivot elimination reduces the
presentation matrix completely: the cokernel is free on the punctured
spectrum exactly when nothing survives the reduction.

thick_classify composes the two tests.  The thick closure of a set of
generators is zero, the subcategory of objects free on the punctured
spectrum, or everything; which one depends only on stable vanishing and
punctured freeness of the generators, and both are decided by the exact
procedures above.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .catalog import Label, catalog_get, catalog_list, parse_label
from .fields import QQ
from .homalg import (
    TopEchelon,
    TruncationContext,
    default_context,
    stable_hom_fingerprint,
)
from .mfcore import MatrixFactorization
from .polyring import (
    A_INFINITY,
    D_INFINITY,
    RingDescriptor,
    is_unit_y_inverted,
    p_mul,
    p_sub,
)

ZERO, CMO, CM = "ZERO", "CMo", "CM"


class ClassifyError(ValueError):
    pass


class OutOfCatalogError(ClassifyError):
    """The profile is not a catalog combination within max_index."""


class AmbiguousFingerprintError(ClassifyError):
    """Catalog profiles became dependent at the working truncation."""


# ---------------------------------------------------------------------------
# label order, chain positions, catalog-level freeness
# ---------------------------------------------------------------------------

_FAMILY_ORDER = {"I": 0, "X": 1, "OX": 2, "M": 3, "N": 4}


def label_sort_key(label: Label):
    """Deterministic order: family, then index with infinity last, + first."""
    return (_FAMILY_ORDER[label.family], label.index is None,
            label.index or 0, -label.sign)


def chain_height(label: Label):
    """Position of a label along its catalog chain; None off the chain.

    Over the A-type curve the chain is I(1), I(2), ... with height n.
    Over the D-type curve, height 2n is the M(n) sign pair and height
    2n - 1 the N(n) sign pair.  I(inf), X and OX sit off the chains.
    """
    if label.family == "I":
        return label.index
    if label.family == "M":
        return 2 * label.index
    if label.family == "N":
        return 2 * label.index - 1
    return None


def label_punctured_free(label: Label) -> bool:
    """Freeness on the punctured spectrum, at the label level.

    The non-free classes are I(inf) and the pair X, OX; every finite
    chain member localizes to a free module.  punctured_free computes the
    same answer from the matrices, and the tests assert the agreement.
    """
    if label.family in ("X", "OX"):
        return False
    return label.index is not None


# ---------------------------------------------------------------------------
# decomposition against catalog profiles
# ---------------------------------------------------------------------------

_TAG, _DATA = 0, 1


def _profile_vector(fingerprint, window):
    """Sparse vector of a windowed fingerprint on (probe, degree) slots."""
    vec = {}
    for row_index, row in enumerate(fingerprint.dims):
        for degree in range(min(window, len(row))):
            if row[degree]:
                vec[(_DATA, row_index, degree)] = Fraction(row[degree])
    return vec


class _CatalogSolver:
    """Echelonized catalog profiles with multiplicity bookkeeping.

    Each candidate profile is inserted together with a tag coordinate
    naming the candidate.  Tag coordinates sort below every profile
    coordinate, so reduction pivots on profile data first; a candidate
    whose residual pivots on a tag adds no new profile and the whole
    solver is declared ambiguous.  Reducing an object's profile leaves
    its negated multiplicities on the tags.
    """

    def __init__(self, ring, max_index, ctx, window=None):
        self.ring = ring
        self.max_index = max_index
        self.ctx = ctx
        self.candidates = tuple(catalog_list(ring, max_index))
        self.probes = tuple(
            (str(lab), catalog_get(ring, lab))
            for lab in catalog_list(ring, max_index + 2))
        prints = [
            stable_hom_fingerprint(catalog_get(ring, lab), self.probes, ctx)
            for lab in self.candidates]
        self.window = min(fp.window for fp in prints)
        if window is not None:
            if window > self.window:
                raise ClassifyError(
                    "catalog profiles only reach %d degrees at truncation "
                    "%d, short of the requested %d"
                    % (self.window, ctx.order, window))
            self.window = window
        self.echelon = TopEchelon(QQ)
        for pos, fp in enumerate(prints):
            vec = _profile_vector(fp, self.window)
            vec[(_TAG, pos, 0)] = Fraction(1)
            pivot, _ = self.echelon.insert(vec)
            if pivot is None or pivot[0] == _TAG:
                raise AmbiguousFingerprintError(
                    "catalog profiles are dependent at truncation %d: %s "
                    "adds no new profile data" % (ctx.order, self.candidates[pos]))

    def solve(self, m: MatrixFactorization) -> dict:
        """Multiplicities {label: count} with fingerprint(m) = sum."""
        fp = stable_hom_fingerprint(m, self.probes, self.ctx)
        vec = _profile_vector(fp, self.window)
        residual = self.echelon.reduce(vec)
        stray = [c for c in residual if c[0] == _DATA]
        if stray:
            _, row_index, degree = max(stray)
            raise OutOfCatalogError(
                "profile of the object is not a catalog combination up to "
                "index %d (first unmatched: probe %s at degree %d); the "
                "object may involve higher indices"
                % (self.max_index, self.probes[row_index][0], degree))
        counts = {}
        for coord, value in residual.items():
            count = -value
            if count == 0:
                continue
            if count.denominator != 1 or count < 0:
                raise OutOfCatalogError(
                    "profile solves with multiplicity %s of %s, which is "
                    "not a nonnegative integer; the object is not a catalog "
                    "sum within index %d"
                    % (count, self.candidates[coord[1]], self.max_index))
            counts[self.candidates[coord[1]]] = int(count)
        return counts


_solver_cache = {}


def _solver(ring, max_index, ctx, window=None):
    key = (ring, max_index, ctx.order, window)
    got = _solver_cache.get(key)
    if got is None:
        got = _CatalogSolver(ring, max_index, ctx, window)
        _solver_cache[key] = got
    return got


def decompose(m: MatrixFactorization, max_index: int = 10,
              ctx: TruncationContext = None) -> tuple:
    """Stable summand multiset of m, as a sorted tuple of catalog labels.

    Solves fingerprint(m) as the unique nonnegative integer combination
    of catalog fingerprints with indices up to max_index.  Raises
    OutOfCatalogError when no such combination exists (for instance when
    m involves higher indices) and AmbiguousFingerprintError when the
    catalog profiles themselves are dependent even after one truncation
    escalation.  Contractible summands vanish from the result.
    """
    ring = m.ring
    if ring.dim != 1:
        raise ClassifyError(
            "decompose works over the curve rings; apply unsharp until the "
            "object lives in dimension one")
    if ctx is None:
        ctx = default_context(max_index + 2)
    last_error = None
    for attempt in (ctx, TruncationContext(2 * ctx.order, ctx.degree_bound)):
        try:
            counts = _decompose_once(m, max_index, attempt)
        except AmbiguousFingerprintError as err:
            last_error = err
            continue
        out = []
        for lab in sorted(counts, key=label_sort_key):
            out.extend([lab] * counts[lab])
        return tuple(out)
    raise last_error


def _decompose_once(m, max_index, ctx):
    solver = _solver(m.ring, max_index, ctx)
    own_window = stable_hom_fingerprint(m, solver.probes, ctx).window
    if own_window < solver.window:
        if own_window < 4:
            raise AmbiguousFingerprintError(
                "entry degrees of the object leave only %d usable profile "
                "degrees at truncation %d" % (own_window, ctx.order))
        solver = _solver(m.ring, max_index, ctx, window=own_window)
    return solver.solve(m)


# ---------------------------------------------------------------------------
# freeness on the punctured spectrum
# ---------------------------------------------------------------------------

def _y_inverted_strip(p, ring):
    """Image of p in k((y))[x]/(x^2): drop monomials with x-degree >= 2."""
    return {e: c for e, c in ring.nf(p).items() if e[0] < 2}


def punctured_free(m: MatrixFactorization, ctx: TruncationContext = None) -> bool:
    """True when coker of the first matrix is free off the closed point.

    Works in the y-inverted ring, where both curve equations collapse to
    x^2 = 0 and an entry is a unit exactly when it keeps an x-free term.
    Unit pivots are split off by fraction-free elimination (rows and
    columns are scaled by the pivot, a unit, so the cokernel class is
    preserved); the module is free at the nonmaximal singular prime
    exactly when the fully reduced matrix is zero.  The ctx argument is
    accepted for interface uniformity and unused: the reduction is exact.
    """
    ring = m.ring
    if ring.dim != 1:
        raise ClassifyError(
            "punctured freeness is a curve-level notion; unsharp first")
    fd = ring.field
    a = [[_y_inverted_strip(p, ring) for p in row] for row in m.a]
    while True:
        pivot = None
        for i, row in enumerate(a):
            for j, p in enumerate(row):
                if p and is_unit_y_inverted(p, ring):
                    pivot = (i, j)
                    break
            if pivot:
                break
        if pivot is None:
            break
        i, j = pivot
        piv = a[i][j]
        size = len(a)
        for r in range(size):
            if r == i or not a[r][j]:
                continue
            coef = a[r][j]
            a[r] = [
                _y_inverted_strip(
                    p_sub(p_mul(piv, a[r][t], fd), p_mul(coef, a[i][t], fd), fd),
                    ring)
                for t in range(size)]
        row_i = a[i]
        for t in range(size):
            if t == j or not row_i[t]:
                continue
            coef = row_i[t]
            for r in range(size):
                a[r][t] = _y_inverted_strip(
                    p_sub(p_mul(piv, a[r][t], fd), p_mul(coef, a[r][j], fd), fd),
                    ring)
        a = [[p for t, p in enumerate(row) if t != j]
             for r, row in enumerate(a) if r != i]
    return all(not p for row in a for p in row)


# ---------------------------------------------------------------------------
# thick subcategory classification
# ---------------------------------------------------------------------------

def thick_classify(gens, ctx: TruncationContext = None, max_index: int = 10):
    """ZERO, CMo or CM: the thick closure of the given generators.

    gens is a list of factorizations or a SubcategoryDescriptor.  The
    closure is ZERO when every generator is stably trivial, CM when some
    generator is not free on the punctured spectrum, and CMo otherwise;
    only these three subcategories are thick over the curve rings, which
    every emitted certificate records as the catalog-completeness
    assumption.
    """
    if isinstance(gens, SubcategoryDescriptor):
        if gens.kind == "named":
            return gens.name
        labels = gens.sample_labels(max_index)
        if not labels and not gens.is_zero():
            labels = gens.sample_labels(max_index + (gens.modulus or 1) + 2)
        if not labels:
            return ZERO
        ring = _descriptor_ring(gens)
        objects = [catalog_get(ring, lab) for lab in labels]
    else:
        objects = list(gens)
    if not objects:
        return ZERO
    nonzero = False
    for m in objects:
        if decompose(m, max_index, ctx):
            nonzero = True
            break
    if not nonzero:
        return ZERO
    for m in objects:
        if not punctured_free(m):
            return CM
    return CMO


def _descriptor_ring(descriptor) -> RingDescriptor:
    return RingDescriptor(descriptor.ring_type, 1)


# ---------------------------------------------------------------------------
# shift-closed families of labels
# ---------------------------------------------------------------------------

_FAMILY_MIN_INDEX = {"I": 1, "M": 0, "N": 1}


@dataclass(frozen=True)
class SubcategoryDescriptor:
    """A shift-closed class of catalog labels, by explicit description.

    kind "finite-list" carries the labels themselves; "arithmetic-family"
    the indices n >= family minimum with n = residue (mod modulus) in one
    chain family, both signs; "cofinite-in-family" all indices of one
    family except the listed ones, both signs; "named" one of ZERO, CMo,
    CM.  Shift closure (which fixes each I(n), swaps the D-type signs and
    swaps X with OX) is enforced at construction.
    """

    kind: str
    ring_type: str
    labels: tuple = ()
    family: str = None
    residue: int = None
    modulus: int = None
    excluded: tuple = ()
    name: str = None

    def __post_init__(self):
        if self.ring_type not in (A_INFINITY, D_INFINITY):
            raise ClassifyError("unknown ring type %r" % (self.ring_type,))
        if self.kind == "finite-list":
            have = set(self.labels)
            for lab in self.labels:
                if lab.shift() not in have:
                    raise ClassifyError(
                        "label list is not shift-closed: %s is missing"
                        % lab.shift())
                self._check_family_ring(lab.family)
        elif self.kind == "arithmetic-family":
            self._check_chain_family()
            if not (self.modulus >= 1 and 0 <= self.residue < self.modulus):
                raise ClassifyError("need 0 <= residue < modulus")
        elif self.kind == "cofinite-in-family":
            self._check_chain_family()
            floor = _FAMILY_MIN_INDEX[self.family]
            if any(n < floor for n in self.excluded):
                raise ClassifyError("excluded indices leave the family")
        elif self.kind == "named":
            if self.name not in (ZERO, CMO, CM):
                raise ClassifyError("unknown subcategory name %r" % (self.name,))
        else:
            raise ClassifyError("unknown descriptor kind %r" % (self.kind,))

    def _check_family_ring(self, fam):
        a_families = ("I",)
        d_families = ("X", "OX", "M", "N")
        ok = a_families if self.ring_type == A_INFINITY else d_families
        if fam not in ok:
            raise ClassifyError(
                "family %s does not live over the %s curve" % (fam, self.ring_type))

    def _check_chain_family(self):
        if self.family not in _FAMILY_MIN_INDEX:
            raise ClassifyError(
                "family kinds need a chain family (I, M or N), got %r"
                % (self.family,))
        self._check_family_ring(self.family)

    # -- membership and size ------------------------------------------

    def contains_label(self, label: Label) -> bool:
        if self.kind == "finite-list":
            return label in self.labels
        if self.kind == "arithmetic-family":
            return (label.family == self.family and label.index is not None
                    and label.index % self.modulus == self.residue)
        if self.kind == "cofinite-in-family":
            return (label.family == self.family and label.index is not None
                    and label.index not in self.excluded)
        if self.name == ZERO:
            return False
        if self.name == CM:
            return True
        return label_punctured_free(label)

    def is_zero(self) -> bool:
        if self.kind == "finite-list":
            return not self.labels
        return self.kind == "named" and self.name == ZERO

    def ind_is_finite(self) -> bool:
        return self.is_zero() or self.kind == "finite-list"

    def subset_of_cmo(self) -> bool:
        """All member labels free on the punctured spectrum."""
        if self.kind == "finite-list":
            return all(label_punctured_free(lab) for lab in self.labels)
        if self.kind == "named":
            return self.name in (ZERO, CMO)
        return True

    def equals_named(self, name: str) -> bool:
        """Same label class as the named thick subcategory, semantically."""
        if self.kind == "named":
            return self.name == name
        if name == ZERO:
            return self.is_zero()
        if self.is_zero():
            return False
        if name == CM:
            return False
        if self.ring_type != A_INFINITY:
            return False
        if self.kind == "arithmetic-family":
            return self.family == "I" and self.modulus == 1
        if self.kind == "cofinite-in-family":
            return self.family == "I" and not self.excluded
        return False

    # -- sampling for witnesses and spot checks ------------------------

    def sample_labels(self, max_index: int) -> tuple:
        """Member labels with index at most max_index, sorted."""
        if self.kind == "finite-list":
            got = [lab for lab in self.labels
                   if lab.index is None or lab.index <= max_index]
        elif self.kind == "named":
            ring = _descriptor_ring(self)
            got = [lab for lab in catalog_list(ring, max_index)
                   if self.contains_label(lab)]
        else:
            got = []
            floor = _FAMILY_MIN_INDEX[self.family]
            for n in range(floor, max_index + 1):
                for sign in ((0,) if self.family == "I" else (1, -1)):
                    lab = Label(self.family, n, sign)
                    if self.contains_label(lab):
                        got.append(lab)
        return tuple(sorted(set(got), key=label_sort_key))

    def member_above_height(self, height: int) -> Label:
        """A member label of chain height strictly above the given one.

        Returns the lowest such member (positive sign over the D-type
        curve; shift closure supplies the other sign), or None when the
        family is exhausted, which only happens for finite descriptors.
        """
        best = None
        for lab in self._chain_members_upto(height + 2 * (self.modulus or 1) + 4):
            h = chain_height(lab)
            if h is not None and h > height:
                if best is None or h < chain_height(best):
                    best = lab
        return best

    def _chain_members_upto(self, max_height: int):
        if self.kind == "finite-list":
            for lab in self.labels:
                if lab.sign >= 0 and chain_height(lab) is not None:
                    yield lab
            return
        if self.kind == "named":
            if self.name == ZERO:
                return
            ring = _descriptor_ring(self)
            families = ("I",) if self.ring_type == A_INFINITY else ("M", "N")
            for fam in families:
                for n in range(_FAMILY_MIN_INDEX[fam], max_height + 2):
                    lab = Label(fam, n, 0 if fam == "I" else 1)
                    if chain_height(lab) <= max_height:
                        yield lab
            return
        floor = _FAMILY_MIN_INDEX[self.family]
        sign = 0 if self.family == "I" else 1
        for n in range(floor, max_height + 2):
            lab = Label(self.family, n, sign)
            if self.contains_label(lab) and chain_height(lab) <= max_height + 2:
                yield lab

    def missing_free_labels(self, max_index: int) -> tuple:
        """Punctured-free catalog labels up to max_index not in the class."""
        ring = _descriptor_ring(self)
        return tuple(
            lab for lab in catalog_list(ring, max_index)
            if label_punctured_free(lab) and not self.contains_label(lab))

    # -- serialization --------------------------------------------------

    def to_json(self) -> dict:
        data = {"kind": self.kind, "ring": self.ring_type}
        if self.kind == "finite-list":
            data["labels"] = [str(lab) for lab in self.labels]
        elif self.kind == "arithmetic-family":
            data.update(family=self.family, residue=self.residue,
                        modulus=self.modulus)
        elif self.kind == "cofinite-in-family":
            data.update(family=self.family, excluded=sorted(self.excluded))
        else:
            data["name"] = self.name
        return data

    @staticmethod
    def from_json(data: dict) -> "SubcategoryDescriptor":
        kind = data["kind"]
        ring_type = data["ring"]
        if kind == "finite-list":
            return SubcategoryDescriptor(
                kind, ring_type,
                labels=tuple(parse_label(s) for s in data["labels"]))
        if kind == "arithmetic-family":
            return SubcategoryDescriptor(
                kind, ring_type, family=data["family"],
                residue=int(data["residue"]), modulus=int(data["modulus"]))
        if kind == "cofinite-in-family":
            return SubcategoryDescriptor(
                kind, ring_type, family=data["family"],
                excluded=tuple(int(n) for n in data["excluded"]))
        return SubcategoryDescriptor(kind, ring_type, name=data["name"])
