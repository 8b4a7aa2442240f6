"""Dense rational matrices stored as an integer matrix over one common denominator.

Keeping a single denominator turns every product into pure integer
arithmetic, which is far cheaper than entrywise ``Fraction`` operations.
After each product the common content is divided out so the
representation stays canonical.
"""

from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from operator import mul

from .errors import DomainError, ResourceError


class RatMatrix:
    """Square matrix ``num / den`` with integer ``num`` rows and ``den > 0``."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=1):
        if den == 0:
            raise DomainError("denominator must be nonzero")
        rows = [list(r) for r in num]
        if den < 0:
            rows = [[-x for x in r] for r in rows]
            den = -den
        g = den
        for r in rows:
            for x in r:
                if x:
                    g = gcd(g, x)
                    if g == 1:
                        break
            if g == 1:
                break
        if g > 1:
            rows = [[x // g for x in r] for r in rows]
            den //= g
        self.num = rows
        self.den = den

    @classmethod
    def from_fractions(cls, rows):
        rows = [[Fraction(x) for x in r] for r in rows]
        den = reduce(lcm, (x.denominator for r in rows for x in r), 1)
        return cls([[x.numerator * (den // x.denominator) for x in r] for r in rows], den)

    @classmethod
    def identity(cls, n):
        return cls([[int(i == j) for j in range(n)] for i in range(n)], 1)

    @property
    def size(self):
        return len(self.num)

    def __len__(self):
        return len(self.num)

    def __getitem__(self, ij):
        i, j = ij
        return Fraction(self.num[i][j], self.den)

    def row(self, i):
        return [Fraction(x, self.den) for x in self.num[i]]

    def to_fractions(self):
        return [self.row(i) for i in range(len(self.num))]

    def transpose(self):
        return RatMatrix([list(c) for c in zip(*self.num)], self.den)

    def __eq__(self, other):
        if not isinstance(other, RatMatrix):
            return NotImplemented
        return self.den == other.den and self.num == other.num

    def __repr__(self):
        return f"RatMatrix(size={self.size}, den={self.den})"

    def max_bits(self):
        """Bit length of the largest numerator or of the denominator."""
        top = max((abs(x).bit_length() for r in self.num for x in r), default=0)
        return max(top, self.den.bit_length())

    def __matmul__(self, other):
        if len(self.num[0]) != len(other.num):
            raise DomainError("dimension mismatch")
        cols = list(zip(*other.num))
        prod = [[sum(map(mul, r, c)) for c in cols] for r in self.num]
        return RatMatrix(prod, self.den * other.den)

    def check_budget(self, budget):
        if self.max_bits() > budget:
            raise ResourceError(
                f"exact matrix entries exceed the {budget}-bit budget"
            )
        return self
