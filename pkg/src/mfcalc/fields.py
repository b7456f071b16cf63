"""Exact coefficient fields.

Every computation in this package happens over an exact field: the
rationals (via fractions.Fraction) or a prime field GF(p) with p odd.
Characteristic two is excluded because the hypersurface equations are
built from squares and the structure theory needs 2 to be invertible.

Field elements are plain Python values (Fraction or int in [0, p)).
The FieldDescriptor carries the arithmetic so polynomial and matrix
code can stay field-agnostic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

RATIONALS = "rationals"
PRIME_FIELD = "prime-field"


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class FieldDescriptor:
    """The coefficient field: kind 'rationals' or 'prime-field' with odd p."""

    kind: str = RATIONALS
    characteristic: int = 0

    def __post_init__(self):
        if self.kind == RATIONALS:
            if self.characteristic != 0:
                raise ValueError("rationals have characteristic 0")
        elif self.kind == PRIME_FIELD:
            p = self.characteristic
            if p == 2:
                raise ValueError("characteristic two is not supported")
            if not _is_prime(p):
                raise ValueError("characteristic must be an odd prime, got %r" % p)
        else:
            raise ValueError("unknown field kind %r" % self.kind)

    # -- arithmetic ---------------------------------------------------

    def zero(self):
        return Fraction(0) if self.kind == RATIONALS else 0

    def one(self):
        return Fraction(1) if self.kind == RATIONALS else 1

    def of_int(self, n: int):
        if self.kind == RATIONALS:
            return Fraction(n)
        return n % self.characteristic

    def of_fraction(self, num: int, den: int):
        if self.kind == RATIONALS:
            return Fraction(num, den)
        p = self.characteristic
        d = den % p
        if d == 0:
            raise ZeroDivisionError("denominator %d vanishes in GF(%d)" % (den, p))
        return (num % p) * pow(d, p - 2, p) % p

    def add(self, a, b):
        if self.kind == RATIONALS:
            return a + b
        return (a + b) % self.characteristic

    def sub(self, a, b):
        if self.kind == RATIONALS:
            return a - b
        return (a - b) % self.characteristic

    def mul(self, a, b):
        if self.kind == RATIONALS:
            return a * b
        return (a * b) % self.characteristic

    def neg(self, a):
        if self.kind == RATIONALS:
            return -a
        return (-a) % self.characteristic

    def inv(self, a):
        if self.kind == RATIONALS:
            if a == 0:
                raise ZeroDivisionError("inverse of zero")
            return Fraction(1) / a
        if a % self.characteristic == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, self.characteristic - 2, self.characteristic)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    # -- formatting ---------------------------------------------------

    def format(self, a) -> str:
        if self.kind == RATIONALS:
            return str(a)
        return str(a % self.characteristic)

    def parse(self, text: str):
        text = text.strip()
        if "/" in text:
            num, den = text.split("/")
            return self.of_fraction(int(num), int(den))
        return self.of_int(int(text))

    def to_json(self) -> dict:
        return {"kind": self.kind, "characteristic": self.characteristic}

    @staticmethod
    def from_json(obj: dict) -> "FieldDescriptor":
        return FieldDescriptor(obj["kind"], obj["characteristic"])


QQ = FieldDescriptor()


def gf(p: int) -> FieldDescriptor:
    return FieldDescriptor(PRIME_FIELD, p)
