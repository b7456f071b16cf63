"""Sparse multivariate polynomial arithmetic and the two hypersurface rings.

A polynomial is a dict mapping exponent tuples to nonzero field elements.
The empty dict is zero.  All functions return canonical dicts (no zero
coefficients, fresh objects).  The monomial order used for printing,
normal forms and pivot selection is degree-lexicographic with
x0 < x1 < ... ; within a degree, later variables weigh more.

The ambient ring is S = k[x0..xd] and the hypersurface is R = S/(f) with

    f = x0^2 + x2^2 + ... + xd^2          (A-infinity)
    f = x0^2*x1 + x2^2 + ... + xd^2       (D-infinity)

so x1 (printed y) never appears in f beyond the D-infinity cubic term.
Variables are printed x, y, z, w for x0..x3; sharp constructions add one
variable at a time and four variables suffice for sharp levels 0..2.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .fields import QQ, FieldDescriptor

A_INFINITY = "A-infinity"
D_INFINITY = "D-infinity"

VAR_NAMES = ("x", "y", "z", "w")

Poly = dict  # {exponent tuple: field element}


# ---------------------------------------------------------------------------
# raw polynomial arithmetic over S
# ---------------------------------------------------------------------------

def p_zero() -> Poly:
    return {}

def p_const(c, nvars: int, fd: FieldDescriptor) -> Poly:
    if c == fd.zero():
        return {}
    return {(0,) * nvars: c}

def p_one(nvars: int, fd: FieldDescriptor) -> Poly:
    return {(0,) * nvars: fd.one()}

def p_var(i: int, nvars: int, fd: FieldDescriptor) -> Poly:
    e = [0] * nvars
    e[i] = 1
    return {tuple(e): fd.one()}

def p_mono(exps, c) -> Poly:
    if not c:
        return {}
    return {tuple(exps): c}

def p_is_zero(p: Poly) -> bool:
    return not p

def p_add(a: Poly, b: Poly, fd: FieldDescriptor) -> Poly:
    out = dict(a)
    for e, c in b.items():
        s = fd.add(out.get(e, fd.zero()), c)
        if s:
            out[e] = s
        elif e in out:
            del out[e]
    return out

def p_neg(a: Poly, fd: FieldDescriptor) -> Poly:
    return {e: fd.neg(c) for e, c in a.items()}

def p_sub(a: Poly, b: Poly, fd: FieldDescriptor) -> Poly:
    return p_add(a, p_neg(b, fd), fd)

def p_scale(c, a: Poly, fd: FieldDescriptor) -> Poly:
    if not c:
        return {}
    return {e: fd.mul(c, v) for e, v in a.items()}

def p_mul(a: Poly, b: Poly, fd: FieldDescriptor) -> Poly:
    out: Poly = {}
    zero = fd.zero()
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(i + j for i, j in zip(ea, eb))
            s = fd.add(out.get(e, zero), fd.mul(ca, cb))
            if s:
                out[e] = s
            elif e in out:
                del out[e]
    return out

def p_mul_mono(a: Poly, exps, c, fd: FieldDescriptor) -> Poly:
    """a * c*x^exps, cheaper than p_mul for a one-term factor."""
    if not c:
        return {}
    return {tuple(i + j for i, j in zip(e, exps)): fd.mul(v, c) for e, v in a.items()}

def p_eq(a: Poly, b: Poly) -> bool:
    return a == b

def total_degree(p: Poly) -> int:
    """Max total degree of p; -1 for the zero polynomial."""
    if not p:
        return -1
    return max(sum(e) for e in p)

def p_truncate(p: Poly, order: int, fd: FieldDescriptor) -> Poly:
    """Drop every monomial of total degree >= order."""
    return {e: c for e, c in p.items() if sum(e) < order}

def deglex_key(e) -> tuple:
    # later variables are more significant inside a fixed total degree
    return (sum(e), tuple(reversed(e)))

def leading_term(p: Poly):
    """(exps, coeff) of the deglex-largest monomial; None for zero."""
    if not p:
        return None
    e = max(p, key=deglex_key)
    return e, p[e]

def is_unit_local(p: Poly) -> bool:
    """Unit in the local ring k[[x0..xd]]: nonzero constant term."""
    for e, c in p.items():
        if not any(e):
            return bool(c)
    return False


# ---------------------------------------------------------------------------
# ring descriptors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RingDescriptor:
    """One of the two countable-type hypersurfaces, any dimension d >= 1.

    dim is the Krull dimension of R = k[[x0..xd]]/(f); the number of
    ambient variables is dim + 1.
    """

    type: str = A_INFINITY
    dim: int = 1
    field: FieldDescriptor = field(default_factory=lambda: QQ)

    def __post_init__(self):
        if self.type not in (A_INFINITY, D_INFINITY):
            raise ValueError("unknown ring type %r" % self.type)
        if not 1 <= self.dim <= len(VAR_NAMES) - 1:
            raise ValueError("dim must lie in 1..%d" % (len(VAR_NAMES) - 1))

    @property
    def nvars(self) -> int:
        return self.dim + 1

    @property
    def names(self) -> tuple:
        return VAR_NAMES[: self.nvars]

    @property
    def sharp_level(self) -> int:
        return self.dim - 1

    def sharp(self) -> "RingDescriptor":
        return RingDescriptor(self.type, self.dim + 1, self.field)

    def unsharp(self) -> "RingDescriptor":
        if self.dim == 1:
            raise ValueError("cannot unsharp a one-dimensional ring")
        return RingDescriptor(self.type, self.dim - 1, self.field)

    def f(self) -> Poly:
        fd = self.field
        n = self.nvars
        out: Poly = {}
        e0 = [0] * n
        e0[0] = 2
        if self.type == D_INFINITY:
            e0[1] = 1
        out[tuple(e0)] = fd.one()
        for i in range(2, n):
            e = [0] * n
            e[i] = 2
            out[tuple(e)] = fd.one()
        return out

    def nf(self, p: Poly) -> Poly:
        """Normal form of p modulo (f), by division with respect to deglex.

        The leading term of f is xd^2 for d >= 2 and the whole of f for
        d = 1 (x^2 resp. x^2*y), so the loop strictly decreases the
        deglex-largest reducible term and terminates.
        """
        fd = self.field
        fpoly = self.f()
        lt = leading_term(fpoly)
        le, lc = lt
        rest = dict(fpoly)
        del rest[le]
        out = dict(p)
        while True:
            cand = None
            for e in out:
                if all(i >= j for i, j in zip(e, le)):
                    if cand is None or deglex_key(e) > deglex_key(cand):
                        cand = e
            if cand is None:
                return out
            q = tuple(i - j for i, j in zip(cand, le))
            c = fd.div(out[cand], lc)
            # out -= c * x^q * f
            del out[cand]
            for e, v in rest.items():
                k = tuple(i + j for i, j in zip(e, q))
                s = fd.sub(out.get(k, fd.zero()), fd.mul(c, v))
                if s:
                    out[k] = s
                elif k in out:
                    del out[k]

    def mul(self, a: Poly, b: Poly, quotient: bool = True) -> Poly:
        prod = p_mul(a, b, self.field)
        return self.nf(prod) if quotient else prod

    def is_zero_mod_f(self, p: Poly) -> bool:
        return not self.nf(p)

    def to_json(self) -> dict:
        return {"type": self.type, "dim": self.dim, "field": self.field.to_json()}

    @staticmethod
    def from_json(obj: dict) -> "RingDescriptor":
        return RingDescriptor(obj["type"], obj["dim"], FieldDescriptor.from_json(obj["field"]))


def poly_arith(op: str, p: Poly, q: Poly, ring: RingDescriptor, quotient: bool = True) -> Poly:
    """add | sub | mul over S, optionally reduced into R = S/(f)."""
    fd = ring.field
    if op == "add":
        out = p_add(p, q, fd)
    elif op == "sub":
        out = p_sub(p, q, fd)
    elif op == "mul":
        out = p_mul(p, q, fd)
    else:
        raise ValueError("unknown op %r" % op)
    return ring.nf(out) if quotient else out


def is_unit_y_inverted(p: Poly, ring: RingDescriptor) -> bool:
    """Unit in R localized at the nonmaximal singular prime (x).

    Only defined for dim 1.  Inverting y makes x square-zero in both
    rings, so p is a unit exactly when its x-free part survives.
    """
    if ring.dim != 1:
        raise ValueError("y-inverted units are a curve-level notion (dim 1)")
    q = ring.nf(p)
    return any(e[0] == 0 and c for e, c in q.items())


# ---------------------------------------------------------------------------
# text form:  3*x^2*y - 1/2
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*([A-Za-z]\w*|\d+/\d+|\d+|\^|\*|\+|-|\(|\))")


def poly_to_string(p: Poly, ring: RingDescriptor) -> str:
    if not p:
        return "0"
    fd = ring.field
    names = ring.names
    parts = []
    for e in sorted(p, key=deglex_key, reverse=True):
        c = p[e]
        factors = []
        for i, k in enumerate(e):
            if k == 1:
                factors.append(names[i])
            elif k > 1:
                factors.append("%s^%d" % (names[i], k))
        cs = fd.format(c)
        neg = cs.startswith("-")
        if neg:
            cs = cs[1:]
        if factors and cs == "1":
            body = "*".join(factors)
        elif factors:
            body = cs + "*" + "*".join(factors)
        else:
            body = cs
        if not parts:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append(("- " if neg else "+ ") + body)
    return " ".join(parts)


def poly_from_string(text: str, ring: RingDescriptor) -> Poly:
    """Parse '3*x^2*y - 1/2' style input; result is canonical."""
    fd = ring.field
    names = list(ring.names)
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m:
            raise ValueError("bad character %r in polynomial" % text[pos])
        tokens.append(m.group(1))
        pos = m.end()
    tokens.append(None)
    idx = [0]

    def peek():
        return tokens[idx[0]]

    def take():
        t = tokens[idx[0]]
        idx[0] += 1
        return t

    def parse_factor() -> Poly:
        t = take()
        if t == "(":
            p = parse_sum()
            if take() != ")":
                raise ValueError("missing closing parenthesis")
        elif t is None:
            raise ValueError("unexpected end of polynomial")
        elif t[0].isdigit():
            p = p_const(fd.parse(t), ring.nvars, fd)
        elif t in names:
            p = p_var(names.index(t), ring.nvars, fd)
        else:
            raise ValueError("unknown variable %r (ring has %s)" % (t, ", ".join(names)))
        if peek() == "^":
            take()
            exp = take()
            if exp is None or not exp.isdigit():
                raise ValueError("exponent must be a nonnegative integer")
            q = p_one(ring.nvars, fd)
            for _ in range(int(exp)):
                q = p_mul(q, p, fd)
            p = q
        return p

    def parse_term() -> Poly:
        p = parse_factor()
        while peek() == "*":
            take()
            p = p_mul(p, parse_factor(), fd)
        return p

    def parse_sum() -> Poly:
        sign = 1
        while peek() in ("+", "-"):
            if take() == "-":
                sign = -sign
        p = parse_term()
        if sign < 0:
            p = p_neg(p, fd)
        while peek() in ("+", "-"):
            sign = 1
            while peek() in ("+", "-"):
                if take() == "-":
                    sign = -sign
            q = parse_term()
            if sign < 0:
                q = p_neg(q, fd)
            p = p_add(p, q, fd)
        return p

    out = parse_sum()
    if peek() is not None:
        raise ValueError("trailing input in polynomial: %r" % peek())
    return out


# ---------------------------------------------------------------------------
# assorted utilities used by the matrix layer
# ---------------------------------------------------------------------------

def monomials_upto(nvars: int, maxdeg: int) -> list:
    """All exponent tuples with total degree <= maxdeg, in deglex order."""
    out = []

    def rec(prefix, remaining, slots):
        if slots == 0:
            out.append(tuple(prefix))
            return
        for k in range(remaining + 1):
            rec(prefix + [k], remaining - k, slots - 1)

    rec([], maxdeg, nvars)
    out.sort(key=deglex_key)
    return out


def p_inverse_truncated(p: Poly, order: int, fd: FieldDescriptor) -> Poly:
    """Inverse of a local unit in k[[x0..xd]], kept modulo degree `order`.

    Requires a nonzero constant term.  Writes p = c*(1 + g) and sums the
    geometric series in -g, truncating after each multiplication.
    """
    if not p:
        raise ValueError("zero has no inverse")
    n = len(next(iter(p)))
    c = p.get((0,) * n, fd.zero())
    if not c:
        raise ValueError("not a unit in the local ring")
    cinv = fd.inv(c)
    g = p_scale(cinv, p, fd)
    del g[(0,) * n]
    g = p_truncate(g, order, fd)
    acc = p_one(n, fd)
    term = p_one(n, fd)
    for _ in range(max(order - 1, 0)):
        term = p_truncate(p_scale(fd.neg(fd.one()), p_mul(term, g, fd), fd), order, fd)
        if not term:
            break
        acc = p_add(acc, term, fd)
    return p_scale(cinv, acc, fd)


def p_promote(p: Poly) -> Poly:
    """Reinterpret p in one more variable (append exponent 0)."""
    return {e + (0,): c for e, c in p.items()}


def p_project_last(p: Poly, fd: FieldDescriptor) -> Poly:
    """Set the last variable to 0 and drop its exponent slot."""
    return {e[:-1]: c for e, c in p.items() if e[-1] == 0}
