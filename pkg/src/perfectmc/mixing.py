"""Exact l_p mixing distances, uniform mixing times and mixing certificates.

Distances are worst-start quantities of ``q_t(x, y) = P^t(x, y) / pi(y)``:

* ``D1(t)  = max_x sum_y pi(y) |q_t(x,y) - 1|``  (unhalved l1, i.e. 2 * TV)
* ``D2(t)^2 = max_x sum_y pi(y) (q_t(x,y) - 1)^2`` (kept squared, hence rational)
* ``Dinf(t) = max_x max_y |q_t(x,y) - 1|``
"""

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from math import ceil, lcm
from typing import NamedTuple, Optional

import numpy as np

from . import limits
from .core import as_rational
from .distributions import FiniteDist
from .errors import DomainError, ResourceError, SupportError
from .ratmatrix import RatMatrix
from .stationary import check_reversible

PROVENANCES = ("brute-exact", "spectral-gap", "ell1-bound", "user-supplied")


@dataclass(frozen=True)
class MixingCertificate:
    """Claim that ``Dinf(t) <= eps``.

    Only ``brute-exact`` certificates were machine-checked; the other
    provenances are trusted and audited downstream by the samplers.
    """

    t: int
    eps: Fraction
    provenance: str
    gap: Optional[float] = None
    note: str = field(default="", compare=False)

    def __post_init__(self):
        if self.t < 0:
            raise DomainError("certificate time must be nonnegative")
        if self.provenance not in PROVENANCES:
            raise DomainError(f"unknown provenance {self.provenance!r}")
        object.__setattr__(self, "eps", as_rational(self.eps))

    def to_dict(self):
        return {
            "t": self.t,
            "eps": [self.eps.numerator, self.eps.denominator],
            "provenance": self.provenance,
            "gap": self.gap,
            "note": self.note,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d):
        return cls(int(d["t"]), as_rational(d["eps"]), d["provenance"], d.get("gap"), d.get("note", ""))

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def _as_matrix(P):
    return P if isinstance(P, RatMatrix) else RatMatrix.from_fractions(P)


class PowerCache:
    """Exact powers of one transition matrix, built by repeated squaring.

    ``P^(2^k)`` are kept, and so is every power handed out.  Entries may not
    exceed ``budget`` bits; the check raises ResourceError.
    """

    def __init__(self, P, budget=None):
        self.P = _as_matrix(P)
        self.budget = limits.max_bits() if budget is None else budget
        self._squares = [self.P]
        self._powers = {0: RatMatrix.identity(len(self.P)), 1: self.P}

    def _square(self, k):
        while len(self._squares) <= k:
            last = self._squares[-1]
            self._squares.append((last @ last).check_budget(self.budget))
        return self._squares[k]

    def power(self, t):
        if t < 0:
            raise DomainError("t must be nonnegative")
        got = self._powers.get(t)
        if got is not None:
            return got
        result = None
        k = 0
        s = t
        while s:
            if s & 1:
                sq = self._square(k)
                result = sq if result is None else (result @ sq).check_budget(self.budget)
            s >>= 1
            k += 1
        self._powers[t] = result
        return result


def _pi_ints(pi):
    pi = list(pi)
    S = reduce(lcm, (Fraction(v).denominator for v in pi), 1)
    return [int(Fraction(v) * S) for v in pi], S


class Distances(NamedTuple):
    t: int
    d1: Fraction
    d2_sq: Fraction
    dinf: Fraction


def _row_distances(a_row, d, s, S, L):
    """Per-start (d1, d2_sq, dinf) for the row ``a_row / d`` against ``s / S``."""
    l1 = 0
    sq = 0
    best_num, best_den = 0, 1
    for y, (a, sy) in enumerate(zip(a_row, s)):
        if not sy:
            if a:
                raise SupportError(f"mass reaches state {y} outside supp(pi)")
            continue
        diff = abs(a * S - sy * d)
        l1 += diff
        sq += diff * diff * (L // sy)
        if diff * best_den > best_num * sy:
            best_num, best_den = diff, sy
    d1 = Fraction(l1, d * S)
    d2_sq = Fraction(sq, S * d * d * L)
    dinf = Fraction(best_num, best_den * d)
    return d1, d2_sq, dinf


def distances_from_power(Pt, pi, t=0):
    """Exact ``(D1, D2^2, Dinf)`` given the matrix ``Pt = P^t``."""
    s, S = _pi_ints(pi)
    if len(s) != len(Pt.num):
        raise DomainError("dimension mismatch")
    L = reduce(lcm, (v for v in s if v), 1)
    d1 = d2 = dinf = Fraction(0)
    for row in Pt.num:
        a, b, c = _row_distances(row, Pt.den, s, S, L)
        d1 = max(d1, a)
        d2 = max(d2, b)
        dinf = max(dinf, c)
    return Distances(t, d1, d2, dinf)


def distance_profile(P, pi, t, cache=None):
    cache = cache or PowerCache(P)
    return distances_from_power(cache.power(t), pi, t)


def q_ratio_matrix(P, pi, t, cache=None):
    """Matrix of ``q_t(x, y) = P^t(x, y) / pi(y)`` as Fractions."""
    cache = cache or PowerCache(P)
    Pt = cache.power(t)
    out = []
    for x, row in enumerate(Pt.num):
        qrow = []
        for y, a in enumerate(row):
            if pi[y] == 0:
                if a:
                    raise SupportError(f"mass reaches state {y} outside supp(pi)")
                qrow.append(Fraction(0))
            else:
                qrow.append(Fraction(a, Pt.den) / pi[y])
        out.append(qrow)
    return out


def d_p_at(P, pi, t, p, cache=None):
    """``D1(t)`` for p=1, ``D2(t)^2`` for p=2, ``Dinf(t)`` for p=inf."""
    dist = distance_profile(P, pi, t, cache)
    if p == 1:
        return dist.d1
    if p == 2:
        return dist.d2_sq
    if p in (math.inf, "inf"):
        return dist.dinf
    raise DomainError(f"unsupported p={p!r}")


# -- independent row-iteration route --------------------------------------


def _sparse_int_rows(rows):
    """Sparse rows of ``(j, Fraction)`` put over one global denominator."""
    den = reduce(lcm, (p.denominator for r in rows for _, p in r), 1)
    return [[(j, p.numerator * (den // p.denominator)) for j, p in r] for r in rows], den


def _rows_of(source):
    if isinstance(source, RatMatrix):
        return [[(j, Fraction(a, source.den)) for j, a in enumerate(r) if a] for r in source.num]
    if isinstance(source, list):
        return [[(j, Fraction(a)) for j, a in enumerate(r) if a] for r in source]
    return [source.row(i) for i in range(source.size)]


class RowIterator:
    """Evolves single-start distributions ``1_x P^t`` by vector-matrix products.

    Accepts a ChainModel, a RatMatrix or a dense list of rows.  This path
    never forms matrix powers, so it serves as an independent check of
    :class:`PowerCache`.
    """

    def __init__(self, source, budget=None):
        self.rows, self.den = _sparse_int_rows(_rows_of(source))
        self.n = len(self.rows)
        self.budget = limits.max_bits() if budget is None else budget

    def evolve(self, start, t):
        """Integer vector ``v`` and denominator ``D`` with ``1_start P^t = v / D``."""
        n = self.n
        v = [0] * n
        v[start] = 1
        D = 1
        rows = self.rows
        for _ in range(t):
            w = [0] * n
            for x, vx in enumerate(v):
                if vx:
                    for y, a in rows[x]:
                        w[y] += vx * a
            D *= self.den
            g = reduce(math.gcd, w, D)
            if g > 1:
                w = [c // g for c in w]
                D //= g
            v = w
            if D.bit_length() > self.budget:
                raise ResourceError(f"row distribution exceeds the {self.budget}-bit budget")
        return v, D

    def distribution(self, start, t):
        v, D = self.evolve(start, t)
        return FiniteDist([Fraction(c, D) for c in v])


def output_distribution(source, start, t):
    """Exact law of ``X_t`` given ``X_0 = start``."""
    return RowIterator(source).distribution(start, t)


def dinf_by_rows(source, pi, t):
    """``Dinf(t)`` recomputed start by start through row iteration."""
    it = RowIterator(source)
    s, S = _pi_ints(pi)
    L = reduce(lcm, (v for v in s if v), 1)
    worst = Fraction(0)
    for x in range(it.n):
        v, D = it.evolve(x, t)
        worst = max(worst, _row_distances(v, D, s, S, L)[2])
    return worst


# -- mixing times and certificates ----------------------------------------


def _search(check, max_t):
    """Smallest-found ``t`` with ``check(t)`` by doubling then bisection."""
    if check(0):
        return 0
    hi = 1
    while not check(hi):
        if hi >= max_t:
            raise ResourceError(f"no t <= {max_t} satisfies the mixing target")
        hi = min(2 * hi, max_t)
    lo = hi // 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if check(mid):
            hi = mid
        else:
            lo = mid
    return hi


def tau_uniform_brute(P, pi, eps, max_t=None, cache=None):
    """Brute-force uniform mixing certificate: some ``t`` with ``Dinf(t) <= eps``.

    For chains whose ``Dinf`` is monotone this is the uniform mixing time;
    in general only the returned ``t`` itself is guaranteed.
    """
    eps = as_rational(eps)
    if eps <= 0:
        raise DomainError("eps must be positive")
    cache = cache or PowerCache(P)
    max_t = limits.max_t() if max_t is None else max_t

    def ok(t):
        return distance_profile(P, pi, t, cache).dinf <= eps

    t = _search(ok, max_t)
    if not ok(t):  # pragma: no cover - _search only returns checked times
        raise AssertionError("brute search returned an unverified time")
    return MixingCertificate(t, eps, "brute-exact", note=f"Dinf({t}) <= {eps} verified exactly")


def tau_l1_brute(P, pi, threshold=Fraction(1, 4), max_t=None, cache=None):
    """Smallest ``t`` with ``D1(t) <= threshold`` (D1 is nonincreasing in t)."""
    threshold = as_rational(threshold)
    cache = cache or PowerCache(P)
    max_t = limits.max_t() if max_t is None else max_t
    return _search(lambda t: distance_profile(P, pi, t, cache).d1 <= threshold, max_t)


def _log_inverse(x):
    """``ln(1/x)`` for a positive rational ``x``, safe for huge integers."""
    return math.log(x.denominator) - math.log(x.numerator)


def tau_from_gap(gamma_star, pi_star, eps):
    """Certificate ``t = 2 * ceil(ln(1/(eps*pi_star)) / gamma_star)``."""
    gamma_star = float(gamma_star)
    if not 0 < gamma_star <= 1:
        raise DomainError("spectral gap must lie in (0, 1]")
    eps, pi_star = as_rational(eps), as_rational(pi_star)
    if eps <= 0 or pi_star <= 0:
        raise DomainError("eps and pi_star must be positive")
    x = eps * pi_star
    t = 0 if x >= 1 else 2 * ceil(_log_inverse(x) / gamma_star)
    return MixingCertificate(t, eps, "spectral-gap", gap=gamma_star,
                             note=f"gamma*={gamma_star!r}, pi*={pi_star}")


def tau_from_ell1(T, pi_star, eps):
    """Certificate ``t = T * ceil(ln(1/(eps*pi_star)))`` from an l1 quarter time ``T``."""
    if T < 0:
        raise DomainError("T must be nonnegative")
    eps, pi_star = as_rational(eps), as_rational(pi_star)
    if eps <= 0 or pi_star <= 0:
        raise DomainError("eps and pi_star must be positive")
    x = eps * pi_star
    t = 0 if x >= 1 else T * ceil(_log_inverse(x))
    return MixingCertificate(t, eps, "ell1-bound", note=f"T={T}, pi*={pi_star}")


def user_certificate(t, eps, note="user supplied"):
    return MixingCertificate(int(t), as_rational(eps), "user-supplied", note=note)


def audit_certificate(source, pi, cert):
    """Independent exact recomputation of ``Dinf(cert.t) <= cert.eps``."""
    return dinf_by_rows(source, pi, cert.t) <= cert.eps


class GapEstimate(NamedTuple):
    gamma: float
    residual: float
    certified: bool = False

    def __float__(self):
        return self.gamma


def spectral_gap_estimate(P, pi):
    """Floating-point absolute spectral gap of a reversible chain.

    Symmetrises ``P`` as ``D^(1/2) P D^(-1/2)`` with ``D = diag(pi)`` and
    takes ``1 - max |lambda|`` over all eigenvalues but the top one.  Not a
    certificate: the reported residual is the largest eigenpair residual.
    """
    P = _as_matrix(P)
    if not check_reversible(P, pi):
        raise DomainError("spectral gap estimate needs a reversible chain")
    supp = [i for i, v in enumerate(pi) if v]
    if len(supp) != len(P.num):
        raise SupportError("pi must have full support")
    n = len(supp)
    if n == 1:
        return GapEstimate(1.0, 0.0)
    A = np.array([[float(Fraction(P.num[x][y], P.den)) for y in supp] for x in supp])
    root = np.sqrt(np.array([float(pi[x]) for x in supp]))
    S = (root[:, None] * A) / root[None, :]
    S = (S + S.T) / 2
    vals, vecs = np.linalg.eigh(S)
    residual = float(np.max(np.linalg.norm(S @ vecs - vecs * vals, axis=0)))
    top = int(np.argmin(np.abs(vals - 1.0)))
    rest = np.delete(vals, top)
    gamma = float(1.0 - np.max(np.abs(rest)))
    return GapEstimate(max(gamma, 0.0), residual)


def verify_l2_linf_identity(P, pi, t, cache=None):
    """Exact check of ``Dinf(2t) == D2(t)^2 == max_x q_2t(x,x) - 1``."""
    P = _as_matrix(P)
    if not check_reversible(P, pi):
        raise DomainError("the l2/linf identity holds only for reversible chains")
    cache = cache or PowerCache(P)
    at_2t = distance_profile(P, pi, 2 * t, cache)
    at_t = distance_profile(P, pi, t, cache)
    P2t = cache.power(2 * t)
    diag = max(Fraction(P2t.num[x][x], P2t.den) / pi[x] for x in range(len(P2t.num)) if pi[x]) - 1
    return at_2t.dinf == at_t.d2_sq == diag


def verify_linf_from_l1(P, pi, t, cache=None):
    """Exact check of ``Dinf(t) <= D1(t) / pi_star``."""
    pi_star = min(v for v in pi if v)
    d = distance_profile(P, pi, t, cache)
    return d.dinf * pi_star <= d.d1


def verify_norm_chain(P, pi, t, cache=None):
    """Exact check of ``D1(t) <= D2(t) <= Dinf(t)`` (compared through squares)."""
    d = distance_profile(P, pi, t, cache)
    return d.d1 * d.d1 <= d.d2_sq <= d.dinf * d.dinf
