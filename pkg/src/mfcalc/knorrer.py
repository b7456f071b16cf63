"""Passage between factorizations of f and of f + z^2 (one more square).

The sharp functor doubles a factorization (a, b) of f into the pair
(c, c), c = [[z*I, a], [b, -z*I]], which squares to (f + z^2)*I; the
unsharp functor sets the fresh variable to zero.  Unsharp after sharp
gives ([[0,a],[b,0]], same), which an explicit constant block swap
identifies with (a,b) + (b,a), i.e. the object plus its shift.  These
identities are exact matrix statements, checked by multiplication, and
both functors act on morphisms and triangles.
"""

from __future__ import annotations

from dataclasses import dataclass

from .polyring import RingDescriptor, p_project_last, p_promote, p_var
from .mfcore import (
    MatrixFactorization,
    MfMorphism,
    Triangle,
    block_matrix,
    identity,
    mat_map,
    mat_neg,
)


@dataclass(frozen=True)
class SharpContext:
    base: RingDescriptor
    lifted: RingDescriptor
    fresh_index: int


def sharp_context(ring: RingDescriptor) -> SharpContext:
    lifted = ring.sharp()
    return SharpContext(ring, lifted, lifted.nvars - 1)


def _require_ctx(ring: RingDescriptor, ctx) -> SharpContext:
    if ctx is None:
        return sharp_context(ring)
    if ctx.base != ring:
        raise ValueError("context base ring does not match the object")
    return ctx


def sharp_object(m: MatrixFactorization, ctx: SharpContext = None) -> MatrixFactorization:
    ctx = _require_ctx(m.ring, ctx)
    lifted = ctx.lifted
    fd = lifted.field
    n = m.size
    a = mat_map(m.a, p_promote)
    b = mat_map(m.b, p_promote)
    z = p_var(ctx.fresh_index, lifted.nvars, fd)
    zi = tuple(
        tuple(dict(z) if i == j else {} for j in range(n)) for i in range(n)
    )
    c = block_matrix([[zi, a], [b, mat_neg(zi, fd)]], [n, n], [n, n])
    return MatrixFactorization(lifted, c, c, check=False)


def sharp_morphism(phi: MfMorphism, ctx: SharpContext = None) -> MfMorphism:
    ctx = _require_ctx(phi.src.ring, ctx)
    src = sharp_object(phi.src, ctx)
    tgt = sharp_object(phi.tgt, ctx)
    r1, r2 = phi.tgt.size, phi.src.size
    alpha = mat_map(phi.alpha, p_promote)
    beta = mat_map(phi.beta, p_promote)
    blk = block_matrix([[alpha, None], [None, beta]], [r1, r1], [r2, r2])
    return MfMorphism(src, tgt, blk, blk, check=False)


def sharp_shift_iso(m: MatrixFactorization, ctx: SharpContext = None) -> MfMorphism:
    """The constant isomorphism sharp(shift m) -> shift(sharp m).

    Both sides have the same underlying pair up to the block swap with
    one sign; the map below commutes exactly with the factorizations.
    """
    ctx = _require_ctx(m.ring, ctx)
    src = sharp_object(m.shift(), ctx)
    tgt = sharp_object(m, ctx).shift()
    fd = ctx.lifted.field
    n = m.size
    eye = identity(n, ctx.lifted.nvars, fd)
    alpha = block_matrix([[None, mat_neg(eye, fd)], [eye, None]], [n, n], [n, n])
    beta = block_matrix([[None, eye], [mat_neg(eye, fd), None]], [n, n], [n, n])
    return MfMorphism(src, tgt, alpha, beta, check=False)


def sharp_triangle(tri: Triangle, ctx: SharpContext = None) -> Triangle:
    ctx = _require_ctx(tri.x.ring, ctx)
    x = sharp_object(tri.x, ctx)
    y = sharp_object(tri.y, ctx)
    z = sharp_object(tri.z, ctx)
    u = sharp_morphism(tri.u, ctx)
    v = sharp_morphism(tri.v, ctx)
    w = sharp_shift_iso(tri.x, ctx).compose(sharp_morphism(tri.w, ctx))
    return Triangle(x, y, z, u, v, w)


def unsharp(m: MatrixFactorization, check: bool = True) -> MatrixFactorization:
    ring = m.ring.unsharp()
    fd = ring.field
    a = mat_map(m.a, lambda p: p_project_last(p, fd))
    b = mat_map(m.b, lambda p: p_project_last(p, fd))
    out = MatrixFactorization(ring, a, b, check=False)
    if check and not out.verify():
        raise ValueError("projection of the last variable is not a factorization")
    return out


def unsharp_morphism(phi: MfMorphism) -> MfMorphism:
    src = unsharp(phi.src, check=False)
    tgt = unsharp(phi.tgt, check=False)
    fd = src.ring.field
    alpha = mat_map(phi.alpha, lambda p: p_project_last(p, fd))
    beta = mat_map(phi.beta, lambda p: p_project_last(p, fd))
    return MfMorphism(src, tgt, alpha, beta, check=False)


def unsharp_triangle(tri: Triangle) -> Triangle:
    return Triangle(
        unsharp(tri.x, check=False), unsharp(tri.y, check=False),
        unsharp(tri.z, check=False),
        unsharp_morphism(tri.u), unsharp_morphism(tri.v), unsharp_morphism(tri.w),
    )


def unsharp_sharp_splitting(m: MatrixFactorization):
    """Identify unsharp(sharp(m)) with m + shift(m) by a block swap.

    Returns (round_trip, split, iso) where iso: round_trip -> split is
    invertible with constant entries (alpha the identity, beta the
    swap), so the two factorizations are exactly isomorphic.
    """
    ring = m.ring
    fd = ring.field
    n = m.size
    round_trip = unsharp(sharp_object(m), check=False)
    split = m.direct_sum(m.shift())
    eye = identity(2 * n, ring.nvars, fd)
    eyen = identity(n, ring.nvars, fd)
    swap = block_matrix([[None, eyen], [eyen, None]], [n, n], [n, n])
    iso = MfMorphism(round_trip, split, eye, swap, check=False)
    return round_trip, split, iso
