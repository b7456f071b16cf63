"""Independent dense linear-algebra oracles.

The production code computes morphism spaces, stable Hom dimensions and
Tor dimensions with sparse incremental elimination.  The functions here
recompute the same quantities from scratch with a second, independently
written dense Gauss eliminator and rank formulas (dim(U + W), inclusion
and exclusion) instead of pivot counting.  Tests pin expected values by
running these oracles, so agreement is a genuine cross-check.

Dense vectors are plain lists of field elements; matrices are lists of
rows.  Everything is exact (Fraction or prime-field integers).
"""

from mfcalc.polyring import monomials_upto, total_degree


# ---------------------------------------------------------------------------
# dense elimination
# ---------------------------------------------------------------------------

def dense_rank(rows, fd):
    """Rank of a dense matrix, by forward elimination with exact pivots."""
    work = [list(r) for r in rows]
    ncols = len(work[0]) if work else 0
    rank = 0
    for col in range(ncols):
        pivot_row = None
        for r in range(rank, len(work)):
            if work[r][col] != fd.zero():
                pivot_row = r
                break
        if pivot_row is None:
            continue
        work[rank], work[pivot_row] = work[pivot_row], work[rank]
        inv = fd.inv(work[rank][col])
        work[rank] = [fd.mul(inv, v) for v in work[rank]]
        for r in range(len(work)):
            if r != rank and work[r][col] != fd.zero():
                c = work[r][col]
                work[r] = [fd.sub(a, fd.mul(c, b)) for a, b in zip(work[r], work[rank])]
        rank += 1
        if rank == len(work):
            break
    return rank


def vectors_rank(vectors, fd):
    if not vectors:
        return 0
    return dense_rank(vectors, fd)


def sum_rank(u_vectors, w_vectors, fd):
    return vectors_rank(list(u_vectors) + list(w_vectors), fd)


def intersection_dim(u_vectors, w_vectors, fd):
    """dim(U n W) = dim U + dim W - dim(U + W)."""
    du = vectors_rank(u_vectors, fd)
    dw = vectors_rank(w_vectors, fd)
    return du + dw - sum_rank(u_vectors, w_vectors, fd)


def nullspace_basis(rows, fd):
    """Kernel basis of a dense matrix (solutions x with rows*x = 0)."""
    work = [list(r) for r in rows]
    ncols = len(work[0]) if work else 0
    pivots = []
    rank = 0
    for col in range(ncols):
        pivot_row = None
        for r in range(rank, len(work)):
            if work[r][col] != fd.zero():
                pivot_row = r
                break
        if pivot_row is None:
            continue
        work[rank], work[pivot_row] = work[pivot_row], work[rank]
        inv = fd.inv(work[rank][col])
        work[rank] = [fd.mul(inv, v) for v in work[rank]]
        for r in range(len(work)):
            if r != rank and work[r][col] != fd.zero():
                c = work[r][col]
                work[r] = [fd.sub(a, fd.mul(c, b)) for a, b in zip(work[r], work[rank])]
        pivots.append(col)
        rank += 1
        if rank == len(work):
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fcol in free:
        vec = [fd.zero()] * ncols
        vec[fcol] = fd.one()
        for prow, pcol in enumerate(pivots):
            vec[pcol] = fd.neg(work[prow][fcol])
        basis.append(vec)
    return basis


# ---------------------------------------------------------------------------
# shared small helpers (data plumbing only; no production solver reused)
# ---------------------------------------------------------------------------

def _exp_add(e1, e2):
    return tuple(a + b for a, b in zip(e1, e2))


def _divisible(e, lead):
    return all(a >= b for a, b in zip(e, lead))


def _lead_exponent(ring):
    f = ring.f()
    best = None
    for e in f:
        key = (sum(e), tuple(reversed(e)))
        if best is None or key > best[0]:
            best = (key, e)
    return best[1]


def _nf_monomials(ring, order):
    lead = _lead_exponent(ring)
    return [e for e in monomials_upto(ring.nvars, order - 1)
            if not _divisible(e, lead)]


class DenseModule:
    """Truncated cokernel R_T^nslots / column span of a presentation matrix.

    Coordinates are (monomial, slot) pairs with degree-compatible order;
    the quotient is realised as ambient space plus an explicit dense
    spanning set of the relation subspace.
    """

    def __init__(self, ring, presentation, nslots, order):
        if ring.dim != 1:
            raise ValueError("dense module oracle works over curve rings only")
        self.ring = ring
        self.fd = ring.field
        self.order = order
        self.nslots = nslots
        self.monos = _nf_monomials(ring, order)
        self.index = {}
        for e in self.monos:
            for i in range(nslots):
                self.index[(e, i)] = len(self.index)
        self.dim = len(self.index)
        self.relations = []
        ncols = len(presentation[0]) if presentation else 0
        for j in range(ncols):
            for e in self.monos:
                vec = [self.fd.zero()] * self.dim
                hit = False
                for i in range(nslots):
                    for et, c in presentation[i][j].items():
                        e2 = _exp_add(e, et)
                        pos = self.index.get((e2, i))
                        if pos is not None:
                            vec[pos] = self.fd.add(vec[pos], c)
                            hit = True
                if hit:
                    self.relations.append(vec)

    def coord_degree(self, pos):
        # index is insertion-ordered: recover the monomial from the position
        e = self.monos[pos // self.nslots]
        return sum(e)

    def filtration_basis(self, copies, degree):
        """Unit vectors of the copies-fold ambient space with degree <= degree."""
        out = []
        total = self.dim * copies
        for pos in range(self.dim):
            if self.coord_degree(pos) <= degree:
                for j in range(copies):
                    vec = [self.fd.zero()] * total
                    vec[pos * copies + j] = self.fd.one()
                    out.append(vec)
        return out

    def stacked_relations(self, copies):
        """Relation subspace of the copies-fold ambient space."""
        out = []
        total = self.dim * copies
        for rel in self.relations:
            for j in range(copies):
                vec = [self.fd.zero()] * total
                for pos, v in enumerate(rel):
                    if v != self.fd.zero():
                        vec[pos * copies + j] = v
                out.append(vec)
        return out

    def apply_matrix(self, mat, rows, cols, vec):
        """Image of an ambient vector of self^cols under a polynomial matrix.

        vec has coordinates (pos, copy j < cols); the result lives in
        self^rows with coordinates (pos, copy r < rows).
        """
        fd = self.fd
        out = [fd.zero()] * (self.dim * rows)
        for pos in range(self.dim):
            base = pos * cols
            e = self.monos[pos // self.nslots]
            slot = pos % self.nslots
            for j in range(cols):
                v = vec[base + j]
                if v == fd.zero():
                    continue
                for r in range(rows):
                    g = mat[r][j]
                    for et, c in g.items():
                        e2 = _exp_add(e, et)
                        pos2 = self.index.get((e2, slot))
                        if pos2 is not None:
                            out[pos2 * rows + r] = fd.add(
                                out[pos2 * rows + r], fd.mul(v, c))
        return out


def dense_homology_profile(module, d_in, shape_in, d_out, shape_out, window):
    """Filtration profile of ker(d_out) / im(d_in) on module^middle.

    d_out maps module^middle -> module^after, d_in maps module^before ->
    module^middle; shapes are (rows, cols) of the polynomial matrices.
    Returns dims[g] for g < window, where dims[g] counts homology classes
    representable by vectors supported in coordinate degrees <= g.
    """
    fd = module.fd
    before = shape_in[1]
    middle = shape_in[0]
    assert shape_out[1] == middle
    after = shape_out[0]

    total_mid = module.dim * middle
    rel_mid = module.stacked_relations(middle)
    rel_after = module.stacked_relations(after)

    # kernel of induced map: vectors v with d_out * v inside relations
    images = []
    for pos in range(total_mid):
        vec = [fd.zero()] * total_mid
        vec[pos] = fd.one()
        images.append(module.apply_matrix(d_out, after, middle, vec))
    nrel = len(rel_after)
    stacked = []
    for pos in range(total_mid):
        stacked.append(images[pos])
    # solve: v such that d_out v = combination of rel_after
    # columns: v coordinates then relation coefficients
    nrows = module.dim * after
    eqrows = []
    for r in range(nrows):
        row = [stacked[pos][r] for pos in range(total_mid)]
        row += [fd.neg(rel_after[t][r]) for t in range(nrel)]
        eqrows.append(row)
    kernel = []
    for sol in nullspace_basis(eqrows, fd):
        kernel.append(sol[:total_mid])

    # image subspace: d_in applied to ambient basis, plus relations
    img = []
    for pos in range(module.dim * before):
        vec = [fd.zero()] * (module.dim * before)
        vec[pos] = fd.one()
        img.append(module.apply_matrix(d_in, middle, before, vec))
    img_space = img + rel_mid

    dims = []
    for g in range(window):
        filt = module.filtration_basis(middle, g)
        k_g = intersection_dim(kernel, filt, fd)
        i_g = intersection_dim(img_space, filt, fd)
        dims.append(k_g - i_g)
    return dims


# ---------------------------------------------------------------------------
# oracle: stable Hom profile of a pair of factorizations
# ---------------------------------------------------------------------------

def oracle_hom_profile(m_src, m_probe, order):
    """Graded stable Hom dims, by the dense homology route.

    Hom classes of maps m_src -> m_probe biject with homology of the
    probe cokernel: ker(a_src transpose) / im(b_src transpose) acting on
    copies of coker(a_probe), truncated below `order`.  The grading is by
    the least representative degree.  Returns dims for g < window with
    window = order - (max entry degree of m_src) - 2.
    """
    ring = m_src.ring
    module = DenseModule(ring, m_probe.a, m_probe.size, order)
    n = m_src.size
    delta = 0
    for mat in (m_src.a, m_src.b):
        for row in mat:
            for p in row:
                delta = max(delta, total_degree(p))
    window = max(0, order - delta - 2)
    if n == 0:
        return [0] * window
    at = [[m_src.a[j][i] for j in range(n)] for i in range(n)]
    bt = [[m_src.b[j][i] for j in range(n)] for i in range(n)]
    return dense_homology_profile(module, bt, (n, n), at, (n, n), window)


def oracle_degree0_stable_end(mf, order):
    """Pinned example: dimension of the degree-0 part of stable End."""
    profile = oracle_hom_profile(mf, mf, order)
    return profile[0]


# ---------------------------------------------------------------------------
# oracle: morphism space dims by entry degree (dense intertwining solve)
# ---------------------------------------------------------------------------

def oracle_morphism_space_dims(m1, m2, entry_bound, homotopy_bound):
    """Dims per degree of (bounded morphisms)/(bounded null-homotopic maps).

    Morphisms are graded by the largest total degree in the first matrix;
    the filtration at level g keeps alpha entries of degree <= g with no
    constraint on beta.  Independent of the sparse production solver.
    """
    ring = m1.ring
    fd = ring.field
    n1, n2 = m1.size, m2.size
    if n1 == 0 or n2 == 0:
        return [0] * entry_bound
    delta = 0
    for mat in (m1.a, m1.b, m2.a, m2.b):
        for row in mat:
            for p in row:
                delta = max(delta, total_degree(p))
    big = max(entry_bound, homotopy_bound + delta)
    monos = monomials_upto(ring.nvars, big - 1)
    mono_index = {e: i for i, e in enumerate(monos)}

    coords = {}
    for matflag in (0, 1):
        for i in range(n2):
            for j in range(n1):
                for e in monos:
                    coords[(matflag, i, j, e)] = len(coords)
    total = len(coords)

    def pair_to_vec(alpha, beta):
        vec = [fd.zero()] * total
        for matflag, mat in ((0, alpha), (1, beta)):
            for i in range(n2):
                for j in range(n1):
                    for e, c in mat[i][j].items():
                        vec[coords[(matflag, i, j, e)]] = fd.add(
                            vec[coords[(matflag, i, j, e)]], c)
        return vec

    # intertwining equations on unknown entries of degree < entry_bound
    unknowns = []
    for matflag in (0, 1):
        for i in range(n2):
            for j in range(n1):
                for e in monos:
                    if sum(e) < entry_bound:
                        unknowns.append((matflag, i, j, e))
    unk_index = {u: i for i, u in enumerate(unknowns)}

    equations = {}

    def emit(side, i, k, e, var, coeff):
        key = (side, i, k, e)
        row = equations.setdefault(key, {})
        row[var] = fd.add(row.get(var, fd.zero()), coeff)

    for i in range(n2):
        for k in range(n1):
            for j in range(n1):
                for e, c in m1.a[j][k].items():
                    for em in monos:
                        if sum(em) < entry_bound:
                            emit(0, i, k, _exp_add(em, e), (0, i, j, em), c)
            for j in range(n2):
                for e, c in m2.a[i][j].items():
                    for em in monos:
                        if sum(em) < entry_bound:
                            emit(0, i, k, _exp_add(em, e),
                                 (1, j, k, em), fd.neg(c))
            for j in range(n1):
                for e, c in m1.b[j][k].items():
                    for em in monos:
                        if sum(em) < entry_bound:
                            emit(1, i, k, _exp_add(em, e), (1, i, j, em), c)
            for j in range(n2):
                for e, c in m2.b[i][j].items():
                    for em in monos:
                        if sum(em) < entry_bound:
                            emit(1, i, k, _exp_add(em, e),
                                 (0, j, k, em), fd.neg(c))

    eqrows = []
    for key in sorted(equations, key=lambda t: (t[0], t[1], t[2], sorted(t[3]))):
        row = [fd.zero()] * len(unknowns)
        for var, c in equations[key].items():
            row[unk_index[var]] = c
        eqrows.append(row)

    morph_vectors = []
    from mfcalc.polyring import p_zero
    for sol in nullspace_basis(eqrows, fd):
        alpha = [[dict() for _ in range(n1)] for _ in range(n2)]
        beta = [[dict() for _ in range(n1)] for _ in range(n2)]
        for (matflag, i, j, e), val in zip(unknowns, sol):
            if val != fd.zero():
                target = alpha if matflag == 0 else beta
                target[i][j][e] = val
        morph_vectors.append(pair_to_vec(alpha, beta))

    # homotopy images: h, k run over single monomials of degree < homotopy_bound
    from mfcalc.mfcore import mat_mul
    hom_vectors = []
    for which in (0, 1):
        for i in range(n2):
            for j in range(n1):
                for e in monos:
                    if sum(e) >= homotopy_bound:
                        continue
                    unit = [[p_zero() for _ in range(n1)] for _ in range(n2)]
                    unit[i][j] = {e: fd.one()}
                    if which == 0:
                        alpha = mat_mul(m2.a, unit, fd, cols=n1)
                        beta = mat_mul(unit, m1.a, fd, cols=n1)
                    else:
                        alpha = mat_mul(unit, m1.b, fd, cols=n1)
                        beta = mat_mul(m2.b, unit, fd, cols=n1)
                    hom_vectors.append(pair_to_vec(alpha, beta))

    def filt_vectors(g):
        out = []
        for (matflag, i, j, e), pos in coords.items():
            if matflag == 1 or sum(e) <= g:
                vec = [fd.zero()] * total
                vec[pos] = fd.one()
                out.append(vec)
        return out

    dims = []
    for g in range(entry_bound):
        filt = filt_vectors(g)
        mg = intersection_basis(morph_vectors, filt, fd)
        both = intersection_dim(mg, hom_vectors, fd)
        dims.append(len(mg) - both)
    return dims


def intersection_basis(u_vectors, w_vectors, fd):
    """Basis of span(U) n span(W), by a dense joint nullspace solve."""
    if not u_vectors or not w_vectors:
        return []
    total = len(u_vectors[0])
    nu, nw = len(u_vectors), len(w_vectors)
    rows = []
    for pos in range(total):
        row = [u_vectors[t][pos] for t in range(nu)]
        row += [fd.neg(w_vectors[t][pos]) for t in range(nw)]
        rows.append(row)
    basis = []
    for sol in nullspace_basis(rows, fd):
        vec = [fd.zero()] * total
        nonzero = False
        for t in range(nu):
            if sol[t] != fd.zero():
                for pos in range(total):
                    vec[pos] = fd.add(vec[pos], fd.mul(sol[t], u_vectors[t][pos]))
        for v in vec:
            if v != fd.zero():
                nonzero = True
                break
        if nonzero:
            basis.append(vec)
    # prune to independent set
    out = []
    for vec in basis:
        if vectors_rank(out + [vec], fd) > len(out):
            out.append(vec)
    return out


# ---------------------------------------------------------------------------
# oracle: Tor dims through an explicit pair of consecutive differentials
# ---------------------------------------------------------------------------

def oracle_tor_profile(ring, d_i, d_next, coeff_presentation, coeff_slots, order):
    """Filtration dims of ker(d_i x N)/im(d_next x N) over the truncation."""
    module = DenseModule(ring, coeff_presentation, coeff_slots, order)
    rows_i = len(d_i)
    cols_i = len(d_i[0])
    rows_n = len(d_next)
    cols_n = len(d_next[0])
    assert rows_n == cols_i
    delta = 0
    for mat in (d_i, d_next):
        for row in mat:
            for p in row:
                delta = max(delta, total_degree(p))
    window = max(0, order - delta - 2)
    return dense_homology_profile(
        module, d_next, (rows_n, cols_n), d_i, (rows_i, cols_i), window)
