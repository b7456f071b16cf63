"""Truncated homological engine over the curve rings.

Everything here works with the truncation R_T = R / (monomials of degree
>= T).  Cokernels of presentation matrices become finite-dimensional
k-spaces with a degree-compatible monomial basis, and stable Hom and Tor
dimensions reduce to exact rank computations on sparse vectors.

Gradings are by filtration: the dimension reported at degree g counts
classes representable by vectors supported in monomial degrees <= g.
Dimensions are only meaningful below a window T - (entry degree) - 2;
every consumer records the window it used.  Stable Hom spaces over these
rings can be infinite-dimensional, so totals are never reported for
them; Tor dimensions carry a finite-length flag instead.

Morphism spaces are graded by the entry degrees of the first matrix of
each map.  The second matrix rides along: over the hypersurface it is
determined by the first one up to homotopy, and the homology route below
(kernel of the transposed presentation acting on a truncated cokernel,
modulo the image of the partner matrix) computes exactly the classes of
first matrices.  hom_space and stable_hom_profile therefore agree
degree by degree inside the window, which the tests exercise against an
independently written dense eliminator.
"""

from dataclasses import dataclass

from .linalg import sparse_nullspace
from .mfcore import MatrixFactorization, MfMorphism, mat_max_degree, mat_mul
from .polyring import (
    RingDescriptor,
    leading_term,
    monomials_upto,
    p_zero,
    total_degree,
)


@dataclass(frozen=True)
class TruncationContext:
    """Working precision: truncation order T and entry degree bound D."""

    order: int = 32
    degree_bound: int = 16

    def __post_init__(self):
        if not (self.order >= self.degree_bound >= 1):
            raise ValueError("need order >= degree_bound >= 1")

    def to_json(self):
        return {"order": self.order, "degree_bound": self.degree_bound}

    @staticmethod
    def from_json(data):
        return TruncationContext(int(data["order"]), int(data["degree_bound"]))


def default_context(max_index=None) -> TruncationContext:
    """Default precision, scaled so indices up to max_index stay resolvable."""
    order = 32
    if max_index is not None:
        order = max(order, 4 * max_index + 8)
    return TruncationContext(order=order, degree_bound=min(16, order))


# ---------------------------------------------------------------------------
# echelon spans pivoting on the largest coordinate
# ---------------------------------------------------------------------------

class TopEchelon:
    """Incremental echelon span of sparse vectors, pivot = largest coordinate.

    Coordinates must be orderable and degree-compatible (larger coordinate
    means larger or equal degree), so that a vector lies in the degree-g
    filtration step exactly when its pivot does.  Vectors are dicts mapping
    coordinates to nonzero field elements.  Stored vectors are never
    mutated; reduce always returns a fresh dict.
    """

    def __init__(self, fd):
        self.fd = fd
        self.cols = {}

    @property
    def rank(self):
        return len(self.cols)

    def reduce(self, vec):
        fd = self.fd
        zero = fd.zero()
        out = {c: v for c, v in vec.items() if v != zero}
        while True:
            hits = [c for c in out if c in self.cols]
            if not hits:
                return out
            c = max(hits)
            col = self.cols[c]
            q = fd.div(out[c], col[c])
            for c2, v2 in col.items():
                acc = fd.sub(out.get(c2, zero), fd.mul(q, v2))
                if acc == zero:
                    out.pop(c2, None)
                else:
                    out[c2] = acc
        return out

    def insert(self, vec):
        """Add a vector to the span; returns (pivot, residual) or (None, {})."""
        out = self.reduce(vec)
        if not out:
            return None, {}
        p = max(out)
        self.cols[p] = out
        return p, out

    def contains(self, vec):
        return not self.reduce(vec)

    def copy(self):
        other = TopEchelon(self.fd)
        other.cols = dict(self.cols)
        return other


# ---------------------------------------------------------------------------
# truncated cokernel modules
# ---------------------------------------------------------------------------

def _lead_exponent(ring: RingDescriptor):
    return leading_term(ring.f())[0]


def _divisible(e, lead):
    return all(a >= b for a, b in zip(e, lead))


class TruncatedModule:
    """coker(presentation) over R, truncated below a fixed order.

    The presentation is a matrix over S with `nslots` rows; the module is
    R^nslots modulo the column span and modulo all monomials of degree
    >= order.  Elements are sparse dicts over integer codes; the code
    order is degree-compatible (monomials in degree-lexicographic order,
    slot minor), so TopEchelon filtration counting applies directly.

    Restricted to curve rings (dim 1): there the hypersurface equation is
    a single monomial, so normal forms of monomials are monomials and the
    basis stays closed under multiplication.
    """

    def __init__(self, ring: RingDescriptor, presentation, nslots: int, order: int):
        if ring.dim != 1:
            raise ValueError("truncated modules are built over curve rings only")
        self.ring = ring
        self.fd = ring.field
        self.order = order
        self.nslots = nslots
        self.pres_degree = mat_max_degree(presentation) if presentation else 0
        lead = _lead_exponent(ring)
        self.monos = [e for e in monomials_upto(ring.nvars, order - 1)
                      if not _divisible(e, lead)]
        self.rank_of = {e: i for i, e in enumerate(self.monos)}
        self.relations = TopEchelon(self.fd)
        ncols = len(presentation[0]) if presentation and presentation[0] else 0
        for j in range(ncols):
            column = [presentation[i][j] for i in range(nslots)]
            for e in self.monos:
                vec = {}
                for i, poly in enumerate(column):
                    self._accumulate(vec, e, i, poly, self.fd.one())
                if vec:
                    self.relations.insert(vec)
        pivots = set(self.relations.cols)
        self.qcodes = [c for c in range(len(self.monos) * nslots)
                       if c not in pivots]
        self.qpos_of = {c: i for i, c in enumerate(self.qcodes)}
        self.qdegs = [sum(self.monos[c // nslots]) for c in self.qcodes]

    def code(self, e, slot):
        return self.rank_of[e] * self.nslots + slot

    def decode(self, code):
        return self.monos[code // self.nslots], code % self.nslots

    def _accumulate(self, vec, e, slot, poly, scale):
        """vec += scale * mono_e * poly placed in the given slot, truncated."""
        fd = self.fd
        zero = fd.zero()
        for et, c in poly.items():
            e2 = tuple(a + b for a, b in zip(e, et))
            rank = self.rank_of.get(e2)
            if rank is None:
                continue
            code = rank * self.nslots + slot
            acc = fd.add(vec.get(code, zero), fd.mul(scale, c))
            if acc == zero:
                vec.pop(code, None)
            else:
                vec[code] = acc

    def reduce(self, vec):
        return self.relations.reduce(vec)

    def element(self, e, slot):
        """Reduced class of the basis monomial e in the given slot."""
        rank = self.rank_of.get(e)
        if rank is None:
            return {}
        return self.reduce({rank * self.nslots + slot: self.fd.one()})

    def mult(self, vec, poly):
        """Reduced class of poly * vec."""
        out = {}
        for code, val in vec.items():
            e, slot = self.decode(code)
            self._accumulate(out, e, slot, poly, val)
        return self.reduce(out)

    def dims_upto(self, degree):
        """Dimension of the degree-filtration step of the quotient."""
        return sum(1 for d in self.qdegs if d <= degree)

    def top_degree(self, vec):
        if not vec:
            return -1
        return max(sum(self.decode(c)[0]) for c in vec)


_module_cache = {}


def truncated_module(ring, presentation_key, presentation, nslots, order):
    """Cached TruncatedModule; presentation_key must determine presentation."""
    key = (ring, presentation_key, nslots, order)
    got = _module_cache.get(key)
    if got is None:
        got = TruncatedModule(ring, presentation, nslots, order)
        _module_cache[key] = got
    return got


def cokernel_module(mf: MatrixFactorization, order: int) -> TruncatedModule:
    """Truncated coker(A) of a factorization, cached."""
    return truncated_module(mf.ring, ("coker-a", mf.key()), mf.a, mf.size, order)


def map_vector(src: TruncatedModule, dst: TruncatedModule, matrix, vec):
    """Image of a class under the module map induced by a polynomial matrix.

    matrix has dst.nslots rows and src.nslots columns; vec is a class in
    src.  Both modules must share the ring and order.
    """
    out = {}
    for code, val in vec.items():
        e, slot = src.decode(code)
        for i2 in range(dst.nslots):
            poly = matrix[i2][slot]
            if poly:
                dst._accumulate(out, e, i2, poly, val)
    return dst.reduce(out)


# ---------------------------------------------------------------------------
# stable Hom profiles (homology route)
# ---------------------------------------------------------------------------

def _entry_window(order, *matrices):
    delta = 0
    for mat in matrices:
        delta = max(delta, mat_max_degree(mat))
    return max(0, order - delta - 2)


_profile_cache = {}


def stable_hom_profile(m: MatrixFactorization, probe: MatrixFactorization,
                       ctx: TruncationContext):
    """Graded dims of stable Hom(m, probe), filtration degrees < window.

    Classes of morphisms m -> probe correspond to homology of the probe
    cokernel: vectors psi in coker(A_probe)^n with A_m^T psi = 0, modulo
    the image of B_m^T; psi collects the columns of the first matrix of a
    morphism.  Returns (dims, window).
    """
    key = (m.key(), probe.key(), ctx.order)
    got = _profile_cache.get(key)
    if got is not None:
        return got
    window = _entry_window(ctx.order, m.a, m.b)
    result = _profile_uncached(m, probe, ctx.order, window)
    _profile_cache[key] = result
    return result


def _profile_uncached(m, probe, order, window):
    fd = m.ring.field
    n = m.size
    if window == 0 or n == 0 or probe.size == 0:
        return [0] * window, window

    module = cokernel_module(probe, order)
    qn = len(module.qcodes)
    if qn == 0:
        return [0] * window, window

    # V = module^n with coordinates qpos * n + copy, degree of qpos
    def apply_transposed(mat, qpos, copy):
        e, slot = module.decode(module.qcodes[qpos])
        out = {}
        raw = {}
        for copy2 in range(n):
            poly = mat[copy][copy2]
            if not poly:
                continue
            cell = {}
            module._accumulate(cell, e, slot, poly, fd.one())
            if cell:
                raw[copy2] = module.reduce(cell)
        for copy2, red in raw.items():
            for code, val in red.items():
                c2 = module.qpos_of[code] * n + copy2
                acc = fd.add(out.get(c2, fd.zero()), val)
                if acc == fd.zero():
                    out.pop(c2, None)
                else:
                    out[c2] = acc
        return out

    maxdeg = max(module.qdegs) if module.qdegs else -1
    top = max(window - 1, maxdeg)
    coords_upto = [0] * (top + 1)
    for d in module.qdegs:
        for g in range(d, top + 1):
            coords_upto[g] += n

    ker_ech = TopEchelon(fd)
    im_ech = TopEchelon(fd)
    rank_a_upto = [0] * (top + 1)
    last = 0
    for qpos in range(qn):
        deg = module.qdegs[qpos]
        while last < deg:
            rank_a_upto[last] = ker_ech.rank
            last += 1
        for copy in range(n):
            ker_ech.insert(apply_transposed(m.a, qpos, copy))
            im_ech.insert(apply_transposed(m.b, qpos, copy))
    while last <= top:
        rank_a_upto[last] = ker_ech.rank
        last += 1

    im_by_degree = [0] * (top + 1)
    for pivot in im_ech.cols:
        d = module.qdegs[pivot // n]
        for g in range(d, top + 1):
            im_by_degree[g] += 1

    dims = [coords_upto[g] - rank_a_upto[g] - im_by_degree[g]
            for g in range(window)]
    return dims, window


# ---------------------------------------------------------------------------
# fingerprints
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FingerprintVector:
    """Windowed graded dims of stable Hom into a fixed probe list."""

    order: int
    window: int
    probes: tuple
    dims: tuple

    def __post_init__(self):
        if len(self.probes) != len(self.dims):
            raise ValueError("probe and dimension lists disagree")
        for row in self.dims:
            if len(row) != self.window:
                raise ValueError("ragged fingerprint")
            if any(d < 0 for d in row):
                raise ValueError("negative dimension")

    def truncated(self, window):
        if window > self.window:
            raise ValueError("cannot widen a fingerprint")
        return FingerprintVector(
            self.order, window, self.probes,
            tuple(row[:window] for row in self.dims))

    def to_json(self):
        return {
            "order": self.order,
            "window": self.window,
            "probes": list(self.probes),
            "dims": [list(r) for r in self.dims],
        }

    @staticmethod
    def from_json(data):
        return FingerprintVector(
            int(data["order"]), int(data["window"]),
            tuple(data["probes"]),
            tuple(tuple(int(v) for v in r) for r in data["dims"]))


def stable_hom_fingerprint(m: MatrixFactorization, probes,
                           ctx: TruncationContext) -> FingerprintVector:
    """Fingerprint of m against (name, factorization) probe pairs.

    Additive in m: the fingerprint of a direct sum is the componentwise
    sum.  Trivial summands contribute zero in every degree.
    """
    names = tuple(name for name, _ in probes)
    rows = []
    window = None
    for _, probe in probes:
        dims, w = stable_hom_profile(m, probe, ctx)
        window = w if window is None else min(window, w)
        rows.append(dims)
    if window is None:
        window = max(0, ctx.order - 2)
    return FingerprintVector(
        ctx.order, window, names,
        tuple(tuple(r[:window]) for r in rows))


def fingerprint_equal(f1: FingerprintVector, f2: FingerprintVector) -> bool:
    """Equality on the common window; probe lists and order must agree."""
    if f1.probes != f2.probes or f1.order != f2.order:
        return False
    w = min(f1.window, f2.window)
    return f1.truncated(w).dims == f2.truncated(w).dims


def fingerprint_add(f1: FingerprintVector, f2: FingerprintVector) -> FingerprintVector:
    if f1.probes != f2.probes or f1.order != f2.order:
        raise ValueError("incompatible fingerprints")
    w = min(f1.window, f2.window)
    a, b = f1.truncated(w), f2.truncated(w)
    return FingerprintVector(
        f1.order, w, f1.probes,
        tuple(tuple(x + y for x, y in zip(r1, r2))
              for r1, r2 in zip(a.dims, b.dims)))


# ---------------------------------------------------------------------------
# morphism spaces with explicit bases
# ---------------------------------------------------------------------------

@dataclass
class HomSpace:
    """Bounded-degree morphism space and its null-homotopic subspace.

    morphisms: basis of all morphisms with entry degrees < degree_bound.
    homotopies: basis of the subspace of null-homotopic ones (witnessed
    by homotopy pairs of entry degree < degree_bound).
    dims[g]: classes with first-matrix entries of degree <= g, modulo the
    null-homotopic subspace, for g < degree_bound.
    """

    source: MatrixFactorization
    target: MatrixFactorization
    degree_bound: int
    morphisms: tuple
    homotopies: tuple
    dims: tuple


def hom_space(m1: MatrixFactorization, m2: MatrixFactorization,
              ctx: TruncationContext) -> HomSpace:
    if m1.ring != m2.ring:
        raise ValueError("morphisms need a common ring")
    ring = m1.ring
    fd = ring.field
    bound = ctx.degree_bound
    n1, n2 = m1.size, m2.size
    if n1 == 0 or n2 == 0:
        return HomSpace(m1, m2, bound, (), (), tuple([0] * bound))

    delta = max(mat_max_degree(m) for m in (m1.a, m1.b, m2.a, m2.b))
    monos = monomials_upto(ring.nvars, bound - 1)
    monos_big = monomials_upto(ring.nvars, bound - 1 + delta)
    rank_big = {e: i for i, e in enumerate(monos_big)}

    # unknown coefficients of alpha ('a') and beta ('b')
    equations = {}

    def emit(side, i, k, e, var, coeff):
        row = equations.setdefault((side, i, k, rank_big.get(e, -1), e), {})
        row[var] = fd.add(row.get(var, fd.zero()), coeff)

    for i in range(n2):
        for k in range(n1):
            for em in monos:
                for j in range(n1):
                    for e, c in m1.a[j][k].items():
                        e2 = tuple(p + q for p, q in zip(em, e))
                        emit(0, i, k, e2, ("a", i, j, em), c)
                    for e, c in m1.b[j][k].items():
                        e2 = tuple(p + q for p, q in zip(em, e))
                        emit(1, i, k, e2, ("b", i, j, em), c)
                for j in range(n2):
                    for e, c in m2.a[i][j].items():
                        e2 = tuple(p + q for p, q in zip(em, e))
                        emit(0, i, k, e2, ("b", j, k, em), fd.neg(c))
                    for e, c in m2.b[i][j].items():
                        e2 = tuple(p + q for p, q in zip(em, e))
                        emit(1, i, k, e2, ("a", j, k, em), fd.neg(c))

    kernel, _ = sparse_nullspace(list(equations.values()), fd)

    def coords_of(alpha, beta):
        # Coordinate order encodes the filtration: in-bound beta entries
        # (class 0) sort below everything, in-bound alpha entries (class 1)
        # sort by degree, and any entry at or beyond the bound (class 2)
        # sorts above all, so a vector lies in the bounded box with alpha
        # degree <= g exactly when its largest coordinate does.
        vec = {}
        for flag, mat in ((1, alpha), (0, beta)):
            for i in range(n2):
                for j in range(n1):
                    for e, c in mat[i][j].items():
                        deg = sum(e)
                        if deg >= bound:
                            code = (2, deg, rank_big[e], flag, i, j)
                        elif flag == 1:
                            code = (1, deg, rank_big[e], flag, i, j)
                        else:
                            code = (0, 0, rank_big[e], flag, i, j)
                        vec[code] = c
        return vec

    def matrices_of(solution):
        alpha = [[p_zero() for _ in range(n1)] for _ in range(n2)]
        beta = [[p_zero() for _ in range(n1)] for _ in range(n2)]
        for (kind, i, j, e), val in solution.items():
            target = alpha if kind == "a" else beta
            if val != fd.zero():
                target[i][j] = dict(target[i][j])
                target[i][j][e] = val
        return alpha, beta

    morph_ech = TopEchelon(fd)
    morphisms = []
    for sol in kernel:
        alpha, beta = matrices_of(sol)
        piv, _ = morph_ech.insert(coords_of(alpha, beta))
        if piv is not None:
            morphisms.append(MfMorphism(m1, m2, alpha, beta))

    hom_ech = TopEchelon(fd)
    homotopy_reps = []
    for which in (0, 1):
        for i in range(n2):
            for j in range(n1):
                for em in monos:
                    unit = [[p_zero() for _ in range(n1)] for _ in range(n2)]
                    unit[i][j] = {em: fd.one()}
                    if which == 0:
                        alpha = mat_mul(m2.a, unit, fd, cols=n1)
                        beta = mat_mul(unit, m1.a, fd, cols=n1)
                    else:
                        alpha = mat_mul(unit, m1.b, fd, cols=n1)
                        beta = mat_mul(m2.b, unit, fd, cols=n1)
                    piv, red = hom_ech.insert(coords_of(alpha, beta))
                    if piv is not None:
                        homotopy_reps.append((piv, red))

    # vectors pivoted in class 2 stick out of the bounded box and never
    # meet the morphism space; the rest decode back into matrices
    homotopies = []
    hom_pivot_degs = []
    for piv, red in homotopy_reps:
        if piv[0] == 2:
            continue
        alpha = [[p_zero() for _ in range(n1)] for _ in range(n2)]
        beta = [[p_zero() for _ in range(n1)] for _ in range(n2)]
        for (_, _, rankpos, flag, i, j), val in red.items():
            target = alpha if flag == 1 else beta
            target[i][j] = dict(target[i][j])
            target[i][j][monos_big[rankpos]] = val
        homotopies.append(MfMorphism(m1, m2, alpha, beta))
        hom_pivot_degs.append(piv[1] if piv[0] == 1 else 0)

    morph_pivot_degs = [piv[1] if piv[0] == 1 else 0
                        for piv in morph_ech.cols]
    dims = []
    for g in range(bound):
        dm = sum(1 for d in morph_pivot_degs if d <= g)
        dh = sum(1 for d in hom_pivot_degs if d <= g)
        dims.append(dm - dh)

    space = HomSpace(m1, m2, bound, tuple(morphisms), tuple(homotopies),
                     tuple(dims))
    if m1.key() == m2.key():
        from .mfcore import identity_morphism
        ident = identity_morphism(m1)
        if not morph_ech.contains(coords_of(ident.alpha, ident.beta)):
            raise ValueError(
                "degree bound too small: identity not representable")
    return space


# ---------------------------------------------------------------------------
# free resolutions
# ---------------------------------------------------------------------------

class Resolution:
    """Eventually periodic free resolution over R.

    diff(i) is the i-th differential (i >= 1), mapping F_i -> F_{i-1};
    rank(j) is the rank of F_j.  The augmentation F_0 -> coker(diff(1))
    is the natural quotient map.  After the prefix the differentials
    cycle with the stated period.
    """

    def __init__(self, ring, prefix, cycle):
        self.ring = ring
        self.prefix = tuple(prefix)
        self.cycle = tuple(cycle)
        if not self.cycle:
            raise ValueError("resolution needs a repeating part")

    def diff(self, i):
        if i < 1:
            raise ValueError("differentials are indexed from 1")
        if i <= len(self.prefix):
            return self.prefix[i - 1]
        return self.cycle[(i - 1 - len(self.prefix)) % len(self.cycle)]

    def rank(self, j):
        if j < 0:
            raise ValueError("negative homological degree")
        return len(self.diff(j + 1))


def periodic_resolution(m: MatrixFactorization) -> Resolution:
    """Two-periodic resolution of coker(A): differentials A, B, A, ..."""
    if m.size == 0:
        raise ValueError("zero object has no presentation to resolve")
    ring = m.ring
    a = [[ring.nf(p) for p in row] for row in m.a]
    b = [[ring.nf(p) for p in row] for row in m.b]
    return Resolution(ring, (), (a, b))


def quotient_resolution(ring: RingDescriptor, a: int) -> Resolution:
    """Resolution of R/(x, y^a) over the curve with x^2 = 0.

    The first differential is the row (x, y^a); afterwards the complex is
    two-periodic with the paired 2x2 differentials obtained from the
    factorization of x^2 attached to the ideal (x, y^a), columns swapped
    so that consecutive composites vanish.
    """
    from .polyring import A_INFINITY, p_mono, p_neg, p_var

    if ring.type != A_INFINITY or ring.dim != 1:
        raise ValueError("quotient resolutions are for the curve with x^2 = 0")
    fd = ring.field
    x = p_var(0, ring.nvars, fd)
    ya = p_mono((0, a), fd.one())
    d1 = [[x, ya]]
    d2 = [[ya, x], [p_neg(x, fd), p_zero()]]
    d3 = [[p_zero(), p_neg(x, fd)], [x, ya]]
    return Resolution(ring, (d1,), (d2, d3))


def quotient_module(ring: RingDescriptor, a: int, order: int) -> TruncatedModule:
    """Truncated R/(x, y^a) itself, as a one-slot module."""
    from .polyring import A_INFINITY, p_mono, p_var

    if ring.type != A_INFINITY or ring.dim != 1:
        raise ValueError("quotient modules are for the curve with x^2 = 0")
    fd = ring.field
    pres = [[p_var(0, ring.nvars, fd), p_mono((0, a), fd.one())]]
    return truncated_module(ring, ("quotient", a), pres, 1, order)


# ---------------------------------------------------------------------------
# Tor
# ---------------------------------------------------------------------------

@dataclass
class TorPresentation:
    """Computed Tor_i with class representatives and an image span.

    dims[g] counts classes representable in degrees <= g, for g < window.
    finite_length is True when no class sits in the top margin, in which
    case total_dim is exact; otherwise the computation is inconclusive
    about totals and total_dim is None.
    """

    ring: RingDescriptor
    index: int
    module: TruncatedModule
    copies: int
    window: int
    dims: tuple
    classes: tuple
    image: TopEchelon
    finite_length: bool
    total_dim: object

    def class_degrees(self):
        return tuple(deg for deg, _ in self.classes)

    def annihilates(self, generators):
        """Does every listed polynomial kill every Tor class?

        Returns (True, None) or (False, witness).  The witness records
        the generator, the class representative and the nonzero residual
        of their product against the boundary span.  Raises when the
        truncation is too small to decide.
        """
        if not self.finite_length:
            raise ValueError(
                "annihilation test needs a finite-length presentation; "
                "raise the truncation order")
        for gen in generators:
            gdeg = total_degree(gen)
            for cls_index, (deg, rep) in enumerate(self.classes):
                top = _vec_degree(self.module, self.copies, rep)
                if top + gdeg >= self.window:
                    raise ValueError(
                        "truncation too small for annihilation test")
                image = _mult_copies(self.module, self.copies, rep, gen)
                residual = self.image.reduce(image)
                if residual:
                    return False, {
                        "generator": gen,
                        "class_index": cls_index,
                        "class_degree": deg,
                        "residual_degree": _vec_degree(
                            self.module, self.copies, residual),
                    }
        return True, None


def _mult_copies(module, copies, vec, poly):
    out = {}
    fd = module.fd
    per_copy = [{} for _ in range(copies)]
    for c2, val in vec.items():
        per_copy[c2 % copies][module.qcodes[c2 // copies]] = val
    for j, comp in enumerate(per_copy):
        if not comp:
            continue
        red = module.mult(comp, poly)
        for code, val in red.items():
            out[module.qpos_of[code] * copies + j] = val
    return out


def _vec_degree(module, copies, vec):
    if not vec:
        return -1
    return max(module.qdegs[c // copies] for c in vec)


def _apply_diff(module, matrix, rows, cols, vec):
    """Image of a vector of module^cols under a differential matrix."""
    fd = module.fd
    out = {}
    for c2, val in vec.items():
        qpos, j = divmod(c2, cols)
        e, slot = module.decode(module.qcodes[qpos])
        for r in range(rows):
            poly = matrix[r][j]
            if not poly:
                continue
            cell = {}
            module._accumulate(cell, e, slot, poly, val)
            for code, v in module.reduce(cell).items():
                key = module.qpos_of[code] * rows + r
                acc = fd.add(out.get(key, fd.zero()), v)
                if acc == fd.zero():
                    out.pop(key, None)
                else:
                    out[key] = acc
    return out


def tor_presentation(first, i: int, coefficient, ctx: TruncationContext) -> TorPresentation:
    """Tor_i of coker(first) against the coefficient module.

    first: a MatrixFactorization (resolved two-periodically) or a
    Resolution.  coefficient: a MatrixFactorization (its coker(A)) or a
    TruncatedModule built at ctx.order.
    """
    if i < 1:
        raise ValueError("Tor index must be positive")
    if isinstance(first, MatrixFactorization):
        res = periodic_resolution(first)
    else:
        res = first
    if isinstance(coefficient, MatrixFactorization):
        module = cokernel_module(coefficient, ctx.order)
    else:
        module = coefficient
        if module.order != ctx.order:
            raise ValueError("coefficient module order disagrees with ctx")

    d_i = res.diff(i)
    d_next = res.diff(i + 1)
    rows_i, cols_i = len(d_i), len(d_i[0])
    rows_n, cols_n = len(d_next), len(d_next[0])
    # the module's own presentation can connect low-degree representatives
    # to classes above the truncation, so its entry degree shrinks the
    # trustworthy window along with the two differentials
    window = _entry_window(ctx.order - module.pres_degree, d_i, d_next)
    if window < 4:
        raise ValueError("truncation too small for a Tor window")
    fd = module.fd
    copies = cols_i
    qn = len(module.qcodes)

    image = TopEchelon(fd)
    for qpos in range(qn):
        for j in range(cols_n):
            unit = {qpos * cols_n + j: fd.one()}
            image.insert(_apply_diff(module, d_next, rows_n, cols_n, unit))

    # kernel of d_i on module^copies via a sparse solve
    equations = {}
    for qpos in range(qn):
        for j in range(copies):
            var = qpos * copies + j
            img = _apply_diff(module, d_i, rows_i, cols_i,
                              {var: fd.one()})
            for out_coord, coeff in img.items():
                equations.setdefault(out_coord, {})[var] = coeff
    kernel, _ = sparse_nullspace(list(equations.values()), fd)

    # every coordinate not touched by any equation is free; sparse_nullspace
    # only reports variables that occur, so add the untouched unit vectors
    seen = set()
    for row in equations.values():
        seen.update(row)
    for qpos in range(qn):
        for j in range(copies):
            var = qpos * copies + j
            if var not in seen:
                kernel.append({var: fd.one()})

    combined = image.copy()
    classes = []
    for vec in sorted(kernel, key=lambda v: (max(v), sorted(v.items()))):
        piv, red = combined.insert(vec)
        if piv is not None:
            deg = module.qdegs[piv // copies]
            # classes at or above the window are truncation junk: products
            # from those degrees fall off the top, so membership there says
            # nothing about the untruncated module
            if deg < window:
                classes.append((deg, red))

    dims = []
    for g in range(window):
        dims.append(sum(1 for deg, _ in classes if deg <= g))
    finite = all(deg < window - 2 for deg, _ in classes)
    total = len(classes) if finite else None
    return TorPresentation(
        ring=module.ring, index=i, module=module, copies=copies,
        window=window, dims=tuple(dims), classes=tuple(classes),
        image=image, finite_length=finite, total_dim=total)


def tor_dim(m_module, n_module, i: int, ctx: TruncationContext) -> TorPresentation:
    """Tor of two factorizations' cokernels; see tor_presentation."""
    return tor_presentation(m_module, i, n_module, ctx)
