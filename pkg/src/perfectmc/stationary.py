"""Exact stationary distributions, detailed balance and Gibbs normalisation."""

from dataclasses import dataclass
from fractions import Fraction

from .core import as_rational
from .distributions import FiniteDist
from .errors import DomainError, EmptySupportError, MultiplicityError
from .ratmatrix import RatMatrix


@dataclass(frozen=True)
class StationaryVector:
    dist: FiniteDist
    pi_star: Fraction


def _as_matrix(P):
    return P if isinstance(P, RatMatrix) else RatMatrix.from_fractions(P)


def check_stochastic(P):
    P = _as_matrix(P)
    n = len(P.num)
    for i, r in enumerate(P.num):
        if len(r) != n:
            raise DomainError("transition matrix must be square")
        if any(x < 0 for x in r):
            raise DomainError(f"row {i} has a negative entry")
        if sum(r) != P.den:
            raise DomainError(f"row {i} does not sum to 1")
    return P


def bareiss_solve(A, b):
    """Solve the integer system ``A x = b`` exactly by fraction-free elimination.

    Every intermediate entry is a minor of the augmented matrix, so bit
    sizes stay polynomial.  Raises MultiplicityError when ``A`` is singular.
    """
    n = len(A)
    M = [list(row) + [bi] for row, bi in zip(A, b)]
    prev = 1
    for k in range(n):
        piv = next((i for i in range(k, n) if M[i][k]), None)
        if piv is None:
            raise MultiplicityError("singular system: stationary solution is not unique")
        if piv != k:
            M[k], M[piv] = M[piv], M[k]
        Mk = M[k]
        akk = Mk[k]
        for i in range(k + 1, n):
            Mi = M[i]
            aik = Mi[k]
            if aik:
                for j in range(k + 1, n + 1):
                    Mi[j] = (Mi[j] * akk - aik * Mk[j]) // prev
            else:
                for j in range(k + 1, n + 1):
                    if Mi[j]:
                        Mi[j] = Mi[j] * akk // prev
            Mi[k] = 0
        prev = akk
    x = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        Mi = M[i]
        s = Fraction(Mi[n])
        for j in range(i + 1, n):
            if Mi[j]:
                s -= Mi[j] * x[j]
        x[i] = s / Mi[i]
    return x


def solve_stationary(P):
    """Unique exact solution of ``pi P = pi``, ``sum(pi) = 1``.

    One balance equation is redundant and is replaced by the normalisation;
    the resulting integer system is nonsingular iff the stationary
    distribution is unique.
    """
    P = check_stochastic(P)
    n = len(P.num)
    d = P.den
    # Row y of the system: sum_x pi(x) * (d*P[x][y] - d*[x == y]) = 0.
    A = [[P.num[x][y] - (d if x == y else 0) for x in range(n)] for y in range(n)]
    A[-1] = [1] * n
    b = [0] * (n - 1) + [1]
    pi = bareiss_solve(A, b)
    if any(v < 0 for v in pi):
        raise MultiplicityError("solution has negative entries")
    dist = FiniteDist(pi)
    return StationaryVector(dist, dist.min_support_mass())


def check_reversible(P, pi):
    """Exact detailed balance ``pi(x) P(x,y) == pi(y) P(y,x)`` for all pairs."""
    P = _as_matrix(P)
    n = len(P.num)
    if len(pi) != n:
        raise DomainError("dimension mismatch")
    for x in range(n):
        px = pi[x]
        row = P.num[x]
        for y in range(x + 1, n):
            if px * row[y] != pi[y] * P.num[y][x]:
                return False
    return True


def is_stationary(P, pi):
    """Exact check of ``pi P == pi``."""
    P = _as_matrix(P)
    n = len(P.num)
    for y in range(n):
        s = sum((pi[x] * P.num[x][y] for x in range(n) if P.num[x][y]), Fraction(0))
        if s != pi[y] * P.den:
            return False
    return True


def gibbs_from_weights(space, weight):
    """Normalise nonnegative rational weights into a distribution over ``space``."""
    n = space if isinstance(space, int) else space.size
    w = [as_rational(weight(i)) for i in range(n)]
    if any(v < 0 for v in w):
        raise DomainError("weights must be nonnegative")
    Z = sum(w)
    if Z == 0:
        raise EmptySupportError("all weights are zero")
    return FiniteDist([v / Z for v in w], None if isinstance(space, int) else space)
