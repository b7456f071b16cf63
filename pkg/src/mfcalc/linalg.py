"""Exact linear algebra over the coefficient field.

Two independent routes live here on purpose.  The sparse route
(ColumnSpace, sparse_affine_solve) is the workhorse: vectors are dicts
keyed by orderable coordinate labels, and elimination keeps a reduced
echelon invariant so membership tests and rank counts stay cheap on the
monomial-sparse systems this package produces.  The dense route at the
bottom is a deliberately separate textbook Gauss-Jordan used as an
oracle in tests; it shares no code with the sparse route.
"""

from __future__ import annotations

from .fields import FieldDescriptor


class ColumnSpace:
    """Incrementally echelonized span of sparse vectors.

    Vectors are dicts {coordinate: value}; coordinates must be mutually
    orderable.  The stored basis is in reduced echelon form: each basis
    vector has value 1 at its pivot coordinate (the minimal coordinate
    of its support at insertion time) and every other basis vector
    vanishes there.  Insertion order therefore does not affect the
    span, only which pivots get chosen.
    """

    def __init__(self, fd: FieldDescriptor):
        self.fd = fd
        self.cols = {}  # pivot coordinate -> vector

    @property
    def rank(self) -> int:
        return len(self.cols)

    def reduce(self, vec: dict) -> dict:
        fd = self.fd
        out = dict(vec)
        while True:
            hit = None
            for coord in out:
                if coord in self.cols:
                    hit = coord
                    break
            if hit is None:
                return out
            c = out[hit]
            for coord, v in self.cols[hit].items():
                s = fd.sub(out.get(coord, fd.zero()), fd.mul(c, v))
                if s:
                    out[coord] = s
                elif coord in out:
                    del out[coord]
        # unreachable

    def insert(self, vec: dict):
        """Add vec to the span; return the new pivot coordinate or None."""
        fd = self.fd
        res = self.reduce(vec)
        if not res:
            return None
        piv = min(res)
        inv = fd.inv(res[piv])
        res = {c: fd.mul(inv, v) for c, v in res.items()}
        # keep the reduced-echelon invariant
        for p, col in self.cols.items():
            if piv in col:
                c = col[piv]
                for coord, v in res.items():
                    s = fd.sub(col.get(coord, fd.zero()), fd.mul(c, v))
                    if s:
                        col[coord] = s
                    elif coord in col:
                        del col[coord]
        self.cols[piv] = res
        return piv

    def contains(self, vec: dict) -> bool:
        return not self.reduce(vec)


def sparse_affine_solve(equations, rhs, fd: FieldDescriptor):
    """Solve a sparse linear system  sum_v eq[v]*x[v] = rhs  exactly.

    equations: list of dicts {variable: coeff}; rhs: list of field
    elements (same length).  Variables are arbitrary orderable labels.
    Returns (particular, basis, pivots):
      particular -- dict var -> value with free variables set to 0,
                    or None when the system is inconsistent;
      basis      -- kernel basis, one dict per free variable, each
                    normalized to value 1 at its free variable;
      pivots     -- list of pivot variables in elimination order.
    The free variables of the kernel basis are every variable that
    appears in some equation but is not a pivot; variables appearing in
    no equation are unconstrained and are NOT listed (callers that care
    must add trivial equations or handle them separately).
    """
    rows = []       # reduced rows, each {var: coeff}
    rows_rhs = []
    pivot_of = {}   # var -> row index
    order = []      # pivot vars in creation order
    seen = set()
    zero = fd.zero()

    for eq, b in zip(equations, rhs):
        row = dict(eq)
        seen.update(row)
        val = b
        # reduce against existing pivots (ascending creation order is
        # implicit: any pivot introduced by a substitution is itself
        # already reduced or will be met again in the while loop)
        while True:
            hit = None
            for v in row:
                if v in pivot_of:
                    hit = v
                    break
            if hit is None:
                break
            i = pivot_of[hit]
            c = row.pop(hit)
            for v, w in rows[i].items():
                if v == hit:
                    continue
                s = fd.sub(row.get(v, zero), fd.mul(c, w))
                if s:
                    row[v] = s
                elif v in row:
                    del row[v]
            val = fd.sub(val, fd.mul(c, rows_rhs[i]))
        if not row:
            if val != zero:
                return None, [], order
            continue
        piv = min(row)
        inv = fd.inv(row[piv])
        row = {v: fd.mul(inv, w) for v, w in row.items()}
        val = fd.mul(inv, val)
        # eliminate the new pivot from stored rows
        for i, r in enumerate(rows):
            if piv in r:
                c = r.pop(piv)
                for v, w in row.items():
                    if v == piv:
                        continue
                    s = fd.sub(r.get(v, zero), fd.mul(c, w))
                    if s:
                        r[v] = s
                    elif v in r:
                        del r[v]
                rows_rhs[i] = fd.sub(rows_rhs[i], fd.mul(c, val))
        pivot_of[piv] = len(rows)
        order.append(piv)
        rows.append(row)
        rows_rhs.append(val)

    particular = {}
    for piv, i in pivot_of.items():
        if rows_rhs[i] != zero:
            particular[piv] = rows_rhs[i]
    free = sorted(v for v in seen if v not in pivot_of)
    basis = []
    for fvar in free:
        vec = {fvar: fd.one()}
        for piv, i in pivot_of.items():
            c = rows[i].get(fvar)
            if c:
                vec[piv] = fd.neg(c)
        basis.append(vec)
    return particular, basis, order


def sparse_nullspace(equations, fd: FieldDescriptor):
    """Kernel basis of a homogeneous sparse system; see sparse_affine_solve."""
    _, basis, pivots = sparse_affine_solve(equations, [fd.zero()] * len(equations), fd)
    return basis, pivots


# ---------------------------------------------------------------------------
# dense oracle (independent implementation, used by tests only)
# ---------------------------------------------------------------------------

def dense_rref(rows, fd: FieldDescriptor):
    """Gauss-Jordan on a list-of-lists matrix; returns (rref, pivot columns)."""
    m = [list(r) for r in rows]
    if not m:
        return m, []
    ncols = len(m[0])
    zero = fd.zero()
    pivots = []
    r = 0
    for c in range(ncols):
        sel = None
        for i in range(r, len(m)):
            if m[i][c] != zero:
                sel = i
                break
        if sel is None:
            continue
        m[r], m[sel] = m[sel], m[r]
        inv = fd.inv(m[r][c])
        m[r] = [fd.mul(inv, v) for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != zero:
                f = m[i][c]
                m[i] = [fd.sub(a, fd.mul(f, b)) for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def dense_rank(rows, fd: FieldDescriptor) -> int:
    return len(dense_rref(rows, fd)[1])


def dense_inverse(rows, fd: FieldDescriptor):
    """Inverse of a square matrix of field elements, or None if singular."""
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ValueError("matrix is not square")
    zero, one = fd.zero(), fd.one()
    aug = [list(r) + [one if i == j else zero for j in range(n)]
           for i, r in enumerate(rows)]
    rref, pivots = dense_rref(aug, fd)
    if pivots[:n] != list(range(n)):
        return None
    return [row[n:] for row in rref[:n]]


def dense_nullspace(rows, fd: FieldDescriptor):
    """Kernel basis (list of lists) of the matrix given by rows."""
    if not rows:
        return []
    ncols = len(rows[0])
    rref, pivots = dense_rref(rows, fd)
    pivset = set(pivots)
    basis = []
    zero, one = fd.zero(), fd.one()
    for c in range(ncols):
        if c in pivset:
            continue
        vec = [zero] * ncols
        vec[c] = one
        for r, p in enumerate(pivots):
            v = rref[r][c]
            if v != zero:
                vec[p] = fd.neg(v)
        basis.append(vec)
    return basis
