"""Exact finite distributions and the ratio distances used by the reductions."""

from fractions import Fraction

from .core import as_rational
from .errors import CertificateViolation, DomainError, InvalidDistributionError, SupportError


class FiniteDist:
    """Immutable exact probability vector over ``0..size-1``.

    ``space`` is optional and only used for labels.
    """

    __slots__ = ("mass", "space")

    def __init__(self, mass, space=None):
        mass = tuple(as_rational(m) for m in mass)
        if not mass:
            raise InvalidDistributionError("empty distribution")
        if any(m < 0 for m in mass):
            raise InvalidDistributionError("negative mass")
        total = sum(mass)
        if total != 1:
            raise InvalidDistributionError(f"masses sum to {total}, not 1")
        if space is not None and space.size != len(mass):
            raise DomainError("distribution length does not match the state space")
        self.mass = mass
        self.space = space

    @classmethod
    def point(cls, size, i, space=None):
        return cls([int(j == i) for j in range(size)], space)

    @classmethod
    def uniform(cls, size, space=None):
        return cls([Fraction(1, size)] * size, space)

    def __len__(self):
        return len(self.mass)

    def __getitem__(self, i):
        return self.mass[i]

    def __iter__(self):
        return iter(self.mass)

    def __eq__(self, other):
        if isinstance(other, FiniteDist):
            return self.mass == other.mass
        return NotImplemented

    def __hash__(self):
        return hash(self.mass)

    def __repr__(self):
        return "FiniteDist(" + ", ".join(str(m) for m in self.mass) + ")"

    def support(self):
        return [i for i, m in enumerate(self.mass) if m]

    def min_support_mass(self):
        return min(m for m in self.mass if m)

    def to_json(self):
        return [[m.numerator, m.denominator] for m in self.mass]

    @classmethod
    def from_json(cls, data, space=None):
        return cls([as_rational(pair) for pair in data], space)


def _pair(p, r):
    if len(p) != len(r):
        raise DomainError("distributions live on different spaces")


def _ratios(p, r):
    _pair(p, r)
    for x, (px, rx) in enumerate(zip(p, r)):
        if px:
            if not rx:
                raise SupportError(f"state {x} is in supp(p) but not in supp(r)")
            yield px / rx


def d_max(p, r, allow_infinite=False):
    """Largest ratio ``p(x)/r(x)`` over the support of ``p``.

    With ``allow_infinite`` a support violation returns ``math.inf``
    instead of raising.
    """
    try:
        return max(_ratios(p, r))
    except SupportError:
        if allow_infinite:
            return float("inf")
        raise


def d_inf(p, r):
    """Largest ``|p(x)/r(x) - 1|`` over the support of ``p``."""
    return max(abs(q - 1) for q in _ratios(p, r))


def residual(p, r, eps):
    """Distribution ``h`` with ``r = p/(1+eps) + eps*h/(1+eps)``.

    Raises CertificateViolation when some ``h(z)`` would be negative, which
    happens exactly when ``p(z)/r(z) > 1 + eps`` somewhere.
    """
    eps = as_rational(eps)
    if eps <= 0:
        raise DomainError("eps must be positive")
    _pair(p, r)
    scale = (1 + eps) / eps
    inv = 1 / (1 + eps)
    h = []
    for z, (pz, rz) in enumerate(zip(p, r)):
        hz = scale * (rz - inv * pz)
        if hz < 0:
            raise CertificateViolation(
                f"residual mass {hz} < 0 at state {z}: p/r exceeds 1 + eps", state=z
            )
        h.append(hz)
    space = r.space if isinstance(r, FiniteDist) else None
    return FiniteDist(h, space)


def tv_distance(p, r):
    """Unhalved l1 distance ``sum |p(x) - r(x)|``, a value in [0, 2]."""
    _pair(p, r)
    return sum((abs(a - b) for a, b in zip(p, r)), Fraction(0))
