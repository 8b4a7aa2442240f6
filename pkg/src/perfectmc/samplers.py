"""Perfect samplers built from approximate ones.

Two reductions are implemented on top of an approximate sampler ``A_eps``
(here: a chain run for ``t`` steps from a fixed start) whose output law
``p`` satisfies ``Dinf(p, pi) <= eps``:

* :func:`perfect_sample_mixture` writes ``pi = p/(1+eps) + eps*h/(1+eps)``
  and only builds the residual ``h`` when a ``1/(1+eps)`` coin fails.
* :func:`perfect_sample_reject` accepts a chain sample outright with
  probability ``(1-eps)/(1+eps)`` and otherwise computes the exact
  acceptance probability for that one state.

Both return states distributed exactly as ``pi``.  If the supplied
certificate was false, the expensive branch notices and raises
CertificateViolation instead of returning a biased sample.
"""

import threading
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
import multiprocessing

from .core import BitSource, TableSampler, as_rational, bernoulli_exact, check_index, simulate, transition_matrix
from .distributions import FiniteDist, residual
from .errors import CertificateViolation, DomainError
from .mixing import (
    MixingCertificate,
    PowerCache,
    RowIterator,
    spectral_gap_estimate,
    tau_from_ell1,
    tau_from_gap,
    tau_l1_brute,
    tau_uniform_brute,
    user_certificate,
)
from .stationary import StationaryVector, check_reversible, solve_stationary

BRANCHES = ("cheap", "expensive-mixture", "expensive-reject-accept", "reject-retry")
EXPENSIVE = frozenset(BRANCHES[1:])
MODES = ("mixture", "reject")
CERT_SOURCES = ("brute", "gap", "ell1", "user")

CHUNK = 4096


@dataclass(frozen=True)
class ApproxSamplerSpec:
    chain: object
    start: int
    t: int
    eps: Fraction

    @classmethod
    def from_certificate(cls, chain, start, cert):
        return cls(chain, start, cert.t, cert.eps)

    def __post_init__(self):
        check_index(self.chain, self.start)
        object.__setattr__(self, "eps", as_rational(self.eps))
        if self.eps <= 0:
            raise DomainError("eps must be positive")
        if self.t < 0:
            raise DomainError("t must be nonnegative")


@dataclass(frozen=True)
class SampleReport:
    state: int
    branch: str
    steps_simulated: int
    bits_used: int
    oracle_invoked: bool
    iterations: int = 1

    def to_dict(self, space=None):
        d = {
            "state": self.state,
            "branch": self.branch,
            "steps": self.steps_simulated,
            "bits": self.bits_used,
            "oracle": self.oracle_invoked,
            "iterations": self.iterations,
        }
        if space is not None:
            d["label"] = space.label(self.state)
        return d


class OracleCache:
    """Exact oracle outputs, each computed at most once.

    ``stationary`` plays the role of the target-distribution oracle and
    ``output_dist`` (the law of ``X_t`` from the start state) the role of
    the approximate sampler's output oracle.  The first writer wins; later
    readers see the identical exact value.
    """

    def __init__(self, stationary=None, output_dist=None):
        self._lock = threading.Lock()
        self.stationary = stationary
        self.output_dist = output_dist
        self._residual = None
        self._entries = {}
        self._key = None
        self.invocations = 0

    def _bind(self, spec):
        key = (id(spec.chain), spec.start, spec.t, spec.eps)
        if self._key is None:
            self._key = key
        elif self._key != key:
            raise DomainError("oracle cache is bound to a different sampler spec")

    def get_stationary(self, spec):
        with self._lock:
            self._bind(spec)
            if self.stationary is None:
                self.stationary = solve_stationary(transition_matrix(spec.chain))
            return self.stationary

    def get_output(self, spec):
        with self._lock:
            self._bind(spec)
            if self.output_dist is None:
                self.output_dist = RowIterator(spec.chain).distribution(spec.start, spec.t)
            return self.output_dist

    def get_residual(self, spec):
        pi = self.get_stationary(spec).dist
        p = self.get_output(spec)
        with self._lock:
            if self._residual is None:
                h = residual(p, pi, spec.eps)
                self._residual = (h, TableSampler(range(len(h)), h.mass))
            return self._residual

    def entry(self, spec, x):
        """``(pi(x), p(x))`` for a single state, memoised."""
        got = self._entries.get(x)
        if got is None:
            pi = self.get_stationary(spec).dist
            p = self.get_output(spec)
            got = (pi[x], p[x])
            with self._lock:
                self._entries.setdefault(x, got)
        return got

    def warm(self, spec, mode):
        self.get_stationary(spec)
        self.get_output(spec)
        if mode == "mixture":
            self.get_residual(spec)


def perfect_sample_mixture(spec, oracles, bits):
    """One exact draw from ``pi`` by the cheap/residual mixture."""
    before = bits.bits_used
    eps = spec.eps
    if bernoulli_exact(1 / (1 + eps), bits):
        x = simulate(spec.chain, spec.start, spec.t, bits)
        return SampleReport(x, "cheap", spec.t, bits.bits_used - before, False)
    oracles.invocations += 1
    _, table = oracles.get_residual(spec)
    x = table.draw(bits)
    return SampleReport(x, "expensive-mixture", 0, bits.bits_used - before, True)


def reject_acceptance(r_x, p_x, eps):
    """Second-coin probability ``(r/p - (1-eps)) / (2 eps)``, validated."""
    if p_x == 0:
        raise CertificateViolation("sampled state has zero output probability")
    a = (r_x / p_x - (1 - eps)) / (2 * eps)
    if not 0 <= a <= 1:
        raise CertificateViolation(f"acceptance probability {a} outside [0, 1]")
    return a


def perfect_sample_reject(spec, oracles, bits):
    """One exact draw from ``pi`` by rejection with a lazily computed second coin."""
    eps = spec.eps
    if eps > Fraction(1, 2):
        raise DomainError("the rejection reduction needs eps <= 1/2")
    before = bits.bits_used
    cheap = (1 - eps) / (1 + eps)
    steps = 0
    iterations = 0
    invoked = False
    while True:
        iterations += 1
        x = simulate(spec.chain, spec.start, spec.t, bits)
        steps += spec.t
        if bernoulli_exact(cheap, bits):
            branch = "cheap" if iterations == 1 else "reject-retry"
            return SampleReport(x, branch, steps, bits.bits_used - before, invoked, iterations)
        invoked = True
        oracles.invocations += 1
        r_x, p_x = oracles.entry(spec, x)
        try:
            a = reject_acceptance(r_x, p_x, eps)
        except CertificateViolation as exc:
            exc.state = x
            raise
        if bernoulli_exact(a, bits):
            return SampleReport(x, "expensive-reject-accept", steps, bits.bits_used - before, True, iterations)


# -- exact-law checks --------------------------------------------------------


def mixture_identity(p, pi, eps):
    """Check ``p/(1+eps) + eps*h/(1+eps) == pi`` entrywise.

    Returns ``(ok, state)`` where ``state`` is the first offending index
    (a negative residual entry or a mismatch) or None.
    """
    eps = as_rational(eps)
    try:
        h = residual(p, pi, eps)
    except CertificateViolation as exc:
        return False, exc.state
    for z, (pz, hz, rz) in enumerate(zip(p, h, pi)):
        if pz / (1 + eps) + eps * hz / (1 + eps) != rz:
            return False, z
    return True, None


def reject_iteration_mass(p, pi, eps):
    """Exact per-iteration probability that the rejection sampler returns each state."""
    eps = as_rational(eps)
    cheap = (1 - eps) / (1 + eps)
    out = []
    for x, (px, rx) in enumerate(zip(p, pi)):
        if px == 0:
            out.append(Fraction(0))
            continue
        try:
            a = reject_acceptance(rx, px, eps)
        except CertificateViolation as exc:
            exc.state = x
            raise
        out.append(px * (cheap + (1 - cheap) * a))
    return out


def reject_identity(p, pi, eps):
    """Check per-iteration return mass ``== pi(x)/(1+eps)`` for every ``x``."""
    eps = as_rational(eps)
    try:
        mass = reject_iteration_mass(p, pi, eps)
    except CertificateViolation as exc:
        return False, exc.state
    for x, (m, rx) in enumerate(zip(mass, pi)):
        if m != rx / (1 + eps):
            return False, x
    if sum(mass) != 1 / (1 + eps):
        return False, None
    return True, None


# -- Markov-chain instantiation ---------------------------------------------


def _draw_chunk(sampler, seed, chunk, count):
    bits = BitSource(seed, stream=chunk)
    return [sampler.draw(bits) for _ in range(count)]


_WORKER_SAMPLER = None


def _worker_init(sampler):
    global _WORKER_SAMPLER
    _WORKER_SAMPLER = sampler


def _worker_chunk(args):
    return _draw_chunk(_WORKER_SAMPLER, *args)


class PerfectSampler:
    """Reusable perfect sampler for the stationary law of one chain.

    Draws made with :meth:`sample` are split into fixed chunks with one
    substream each, so results do not depend on the number of workers.
    """

    def __init__(self, chain, start, mode, certificate, stationary=None, oracles=None):
        if mode not in MODES:
            raise DomainError(f"mode must be one of {MODES}")
        self.chain = chain
        self.mode = mode
        self.certificate = certificate
        if mode == "reject":
            eps = reject_eps(certificate.eps)
            if eps > Fraction(1, 2):
                raise DomainError("the rejection reduction needs eps <= 1/2 (certificate eps <= 1/3)")
            self.spec = ApproxSamplerSpec(chain, start, certificate.t, eps)
        else:
            self.spec = ApproxSamplerSpec.from_certificate(chain, start, certificate)
        self.oracles = oracles or OracleCache(stationary=stationary)

    @property
    def t(self):
        return self.spec.t

    @property
    def eps(self):
        return self.spec.eps

    def draw(self, bits):
        if self.mode == "mixture":
            return perfect_sample_mixture(self.spec, self.oracles, bits)
        return perfect_sample_reject(self.spec, self.oracles, bits)

    def warm(self):
        self.oracles.warm(self.spec, self.mode)
        return self

    def sample(self, n, seed=0, workers=1):
        jobs = []
        done = 0
        chunk = 0
        while done < n:
            count = min(CHUNK, n - done)
            jobs.append((seed, chunk, count))
            done += count
            chunk += 1
        if workers <= 1 or len(jobs) == 1:
            out = []
            for job in jobs:
                out.extend(_draw_chunk(self, *job))
            return out
        # Oracles are filled before forking so every worker sees the same values.
        self.warm()
        ctx = multiprocessing.get_context("fork")
        with ProcessPoolExecutor(workers, mp_context=ctx, initializer=_worker_init, initargs=(self,)) as ex:
            parts = list(ex.map(_worker_chunk, jobs))
        return [r for part in parts for r in part]


def certificate_eps(eps, mode):
    """Distance the certificate must guarantee for a sampler run at ``eps``.

    The rejection coin needs ``p(x)/r(x) >= 1/(1+eps)``, which ``Dinf <= eps``
    alone does not give; ``Dinf <= eps/(1+eps)`` does.
    """
    eps = as_rational(eps)
    return eps / (1 + eps) if mode == "reject" else eps


def reject_eps(delta):
    """Rejection parameter ``eps`` served by a certificate ``Dinf <= delta``."""
    if not 0 < delta < 1:
        raise DomainError("certificate eps must lie in (0, 1) for the rejection reduction")
    return delta / (1 - delta)


def default_eps(size, mode="mixture"):
    eps = Fraction(1, size**4)
    return min(eps, Fraction(1, 2)) if mode == "reject" else eps


def make_certificate(P, st, source, eps, *, gamma_star=None, T=None, user_t=None, cache=None):
    """Mixing certificate for ``eps`` from one of the supported sources."""
    pi = st.dist
    if source == "brute":
        return tau_uniform_brute(P, pi, eps, cache=cache)
    if source == "gap":
        if not check_reversible(P, pi):
            raise DomainError("the spectral-gap route needs a reversible chain")
        if gamma_star is None:
            gamma_star = spectral_gap_estimate(P, pi).gamma
        return tau_from_gap(gamma_star, st.pi_star, eps)
    if source == "ell1":
        if T is None:
            T = tau_l1_brute(P, pi, cache=cache)
        return tau_from_ell1(T, st.pi_star, eps)
    if source == "user":
        if user_t is None:
            raise DomainError("user certificates need an explicit t")
        return user_certificate(user_t, eps)
    raise DomainError(f"certificate source must be one of {CERT_SOURCES}")


def mc_perfect_sampler(chain, start=0, mode="mixture", certificate_source="brute", eps=None,
                       *, gamma_star=None, T=None, user_t=None, stationary=None, simulator="local"):
    """Perfect sampler for the stationary law of ``chain``.

    ``eps`` defaults to ``1/|Omega|^4`` (capped at 1/2 in reject mode).  In
    reject mode the certificate is requested at ``eps/(1+eps)``, which is
    what keeps the second coin inside [0, 1].
    The chain is screened by an exact stationary solve, which fails loudly
    for reducible chains.  ``simulator="table"`` runs the chain by exact
    row lookup instead of its local moves; the law is the same, only
    speed and bit usage differ.
    """
    check_index(chain, start)
    if simulator == "table":
        chain = chain.tabulated()
    elif simulator != "local":
        raise DomainError("simulator must be 'local' or 'table'")
    eps = default_eps(chain.size, mode) if eps is None else as_rational(eps)
    P = transition_matrix(chain)
    st = stationary if stationary is not None else solve_stationary(P)
    if not isinstance(st, StationaryVector):
        st = StationaryVector(st, st.min_support_mass())
    cert = make_certificate(P, st, certificate_source, certificate_eps(eps, mode), gamma_star=gamma_star,
                            T=T, user_t=user_t, cache=PowerCache(P))
    return PerfectSampler(chain, start, mode, cert, stationary=st)


def main_theorem_sampler(chain, start=0, *, T=None, gamma_star=None, mode="mixture", eps=None,
                         simulator="local"):
    """Sampler whose run length comes from an l1 quarter time or a spectral gap."""
    if (T is None) == (gamma_star is None):
        raise DomainError("give exactly one of T or gamma_star")
    if T is not None:
        return mc_perfect_sampler(chain, start, mode, "ell1", eps, T=T, simulator=simulator)
    return mc_perfect_sampler(chain, start, mode, "gap", eps, gamma_star=gamma_star, simulator=simulator)


def with_certificate(sampler, cert):
    """Same chain and oracles' stationary law, different certificate."""
    return PerfectSampler(sampler.chain, sampler.spec.start, sampler.mode, cert,
                          stationary=sampler.oracles.stationary)


__all__ = [
    "ApproxSamplerSpec",
    "MixingCertificate",
    "OracleCache",
    "PerfectSampler",
    "SampleReport",
    "FiniteDist",
    "main_theorem_sampler",
    "mc_perfect_sampler",
    "mixture_identity",
    "perfect_sample_mixture",
    "perfect_sample_reject",
    "reject_identity",
    "reject_iteration_mass",
    "certificate_eps",
    "reject_eps",
]
