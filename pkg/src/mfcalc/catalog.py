"""Named indecomposable maximal Cohen-Macaulay modules over the two rings.

Over the curve k[[x,y]]/(x^2) the indecomposables are the ideals
I(n) = (x, y^n) for n >= 1 together with I(inf) = (x); over
k[[x,y]]/(x^2 y) they are X, its syzygy OX, and two families
M(n,+/-) (n >= 0) and N(n,+/-) (n >= 1), where the minus variant is the
shift of the plus one.  Higher-dimensional rings get their catalog by
repeatedly adding a square to the potential, which doubles the matrix
pair; a label carries that lift count as its sharp level.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .fields import FieldDescriptor
from .polyring import A_INFINITY, D_INFINITY, RingDescriptor
from .mfcore import MatrixFactorization, mat_parse
from .knorrer import sharp_object

INF = None  # index value used for I(inf)


@dataclass(frozen=True)
class Label:
    """A catalog name: family, index, sign variant, and sharp level."""

    family: str
    index: int = None
    sign: int = 0
    sharp_level: int = 0

    def __post_init__(self):
        fam = self.family
        if fam == "I":
            if self.index is not None and self.index < 1:
                raise ValueError("I-family indices start at 1")
            if self.sign != 0:
                raise ValueError("I-family labels carry no sign")
        elif fam in ("X", "OX"):
            if self.index is not None or self.sign != 0:
                raise ValueError("%s carries no index or sign" % fam)
        elif fam == "M":
            if self.index is None or self.index < 0:
                raise ValueError("M-family indices start at 0")
            if self.sign not in (1, -1):
                raise ValueError("M-family labels need a sign")
        elif fam == "N":
            if self.index is None or self.index < 1:
                raise ValueError("N-family indices start at 1")
            if self.sign not in (1, -1):
                raise ValueError("N-family labels need a sign")
        else:
            raise ValueError("unknown family %r" % fam)
        if self.sharp_level < 0:
            raise ValueError("sharp level must be nonnegative")

    @property
    def ring_type(self) -> str:
        return A_INFINITY if self.family == "I" else D_INFINITY

    def shift(self) -> "Label":
        """The label of the shifted object: I's are fixed, signs and
        X/OX swap."""
        if self.family == "I":
            return self
        if self.family == "X":
            return Label("OX", sharp_level=self.sharp_level)
        if self.family == "OX":
            return Label("X", sharp_level=self.sharp_level)
        return Label(self.family, self.index, -self.sign, self.sharp_level)

    def with_sharp_level(self, level: int) -> "Label":
        return Label(self.family, self.index, self.sign, level)

    def __str__(self):
        if self.family in ("X", "OX"):
            core = self.family
        elif self.family == "I":
            core = "I(%s)" % ("inf" if self.index is None else self.index)
        else:
            core = "%s(%d,%s)" % (self.family, self.index,
                                  "+" if self.sign > 0 else "-")
        if self.sharp_level:
            core += "#%d" % self.sharp_level
        return core

    def to_json(self) -> str:
        return str(self)


_LABEL_RE = re.compile(
    r"^\s*(I|M|N|X|OX)\s*"
    r"(?:\(\s*(inf|\d+)\s*(?:,\s*([+-])\s*)?\))?"
    r"\s*(?:#\s*(\d+))?\s*$"
)


def parse_label(text: str) -> Label:
    m = _LABEL_RE.match(text)
    if not m:
        raise ValueError("cannot parse label %r" % text)
    fam, idx, sign, sharp = m.groups()
    if fam in ("X", "OX"):
        if idx is not None or sign is not None:
            raise ValueError("%s takes no arguments" % fam)
        return Label(fam, sharp_level=int(sharp) if sharp else 0)
    if idx is None:
        raise ValueError("family %s needs an index" % fam)
    index = None if idx == "inf" else int(idx)
    if fam == "I":
        if sign is not None:
            raise ValueError("I-family labels carry no sign")
        return Label("I", index, sharp_level=int(sharp) if sharp else 0)
    if index is None:
        raise ValueError("only the I family admits an infinite index")
    if sign is None:
        raise ValueError("family %s needs a sign" % fam)
    return Label(fam, index, 1 if sign == "+" else -1,
                 int(sharp) if sharp else 0)


def base_ring(label: Label, fd: FieldDescriptor) -> RingDescriptor:
    return RingDescriptor(label.ring_type, 1, fd)


def _curve_entry(label: Label, ring: RingDescriptor) -> MatrixFactorization:
    fam = label.family
    if fam == "I":
        if label.index is None:
            a = mat_parse([["x"]], ring)
            return MatrixFactorization(ring, a, a, check=False)
        a = mat_parse([["x", "y^%d" % label.index], ["0", "-x"]], ring)
        return MatrixFactorization(ring, a, a, check=False)
    if fam == "X":
        return MatrixFactorization(ring, mat_parse([["x"]], ring),
                                   mat_parse([["x*y"]], ring), check=False)
    if fam == "OX":
        return MatrixFactorization(ring, mat_parse([["x*y"]], ring),
                                   mat_parse([["x"]], ring), check=False)
    if fam == "M":
        if label.index == 0:
            plus = MatrixFactorization(ring, mat_parse([["x^2"]], ring),
                                       mat_parse([["y"]], ring), check=False)
        else:
            a = mat_parse([["x", "y^%d" % label.index], ["0", "-x"]], ring)
            ya = mat_parse([["x*y", "y^%d" % (label.index + 1)],
                            ["0", "-x*y"]], ring)
            plus = MatrixFactorization(ring, a, ya, check=False)
        return plus if label.sign > 0 else plus.shift()
    # N family
    a = mat_parse([["x", "y^%d" % label.index], ["0", "-x*y"]], ring)
    b = mat_parse([["x*y", "y^%d" % label.index], ["0", "-x"]], ring)
    plus = MatrixFactorization(ring, a, b, check=False)
    return plus if label.sign > 0 else plus.shift()


def catalog_get(ring: RingDescriptor, label: Label) -> MatrixFactorization:
    """The validated matrix pair a label names over the given ring."""
    if label.ring_type != ring.type:
        raise ValueError("label %s does not live over a %s ring" % (label, ring.type))
    if label.sharp_level != ring.dim - 1:
        raise ValueError(
            "label %s has sharp level %d but the ring needs %d"
            % (label, label.sharp_level, ring.dim - 1)
        )
    curve = RingDescriptor(ring.type, 1, ring.field)
    out = _curve_entry(label, curve)
    for _ in range(ring.dim - 1):
        out = sharp_object(out)
    return out


def catalog_list(ring: RingDescriptor, max_index: int) -> list:
    """All labels with index <= max_index plus the index-free ones,
    in a fixed deterministic order."""
    if max_index < 1:
        raise ValueError("max_index must be at least 1")
    lvl = ring.dim - 1
    if ring.type == A_INFINITY:
        out = [Label("I", n, sharp_level=lvl) for n in range(1, max_index + 1)]
        out.append(Label("I", INF, sharp_level=lvl))
        return out
    out = [
        Label("X", sharp_level=lvl),
        Label("OX", sharp_level=lvl),
        Label("M", 0, 1, lvl),
        Label("M", 0, -1, lvl),
    ]
    for n in range(1, max_index + 1):
        out.extend(
            [Label("M", n, 1, lvl), Label("M", n, -1, lvl),
             Label("N", n, 1, lvl), Label("N", n, -1, lvl)]
        )
    return out


def omega_k_label(ring_type: str, sharp_level: int = 0) -> Label:
    """The label of the first syzygy of the residue field (d = 1 names)."""
    if ring_type == A_INFINITY:
        return Label("I", 1, sharp_level=sharp_level)
    return Label("N", 1, -1, sharp_level=sharp_level)
