"""Exact numbers, fair-bit randomness, state spaces and Markov-chain kernels.

Every probability in the package is a :class:`fractions.Fraction`.  All
randomness is drawn from a :class:`BitSource` of independent fair bits, and
every random choice (coins, categorical draws, chain steps) is exact: its
outcome law equals the stated rational probabilities with no rounding.
"""

import random
from bisect import bisect_right
from fractions import Fraction
from functools import reduce
from math import lcm

from . import limits
from .errors import DomainError, InvalidDistributionError, ResourceError
from .ratmatrix import RatMatrix

Rational = Fraction

SEED_LIMIT = 1 << 64


def as_rational(value):
    """Parse ``value`` into a Fraction.

    Accepts ints, Fractions, ``"num/den"`` strings and ``[num, den]`` pairs.
    Floats are refused: they would smuggle rounding into exact code.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise DomainError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, (list, tuple)) and len(value) == 2:
        num, den = value
        if isinstance(num, int) and isinstance(den, int) and not isinstance(num, bool):
            return Fraction(num, den)
    raise DomainError(f"not a rational: {value!r}")


# -- randomness ------------------------------------------------------------


class BitSource:
    """A seeded stream of fair bits with a consumed-bit counter.

    ``stream`` selects an independent substream for the same seed, so that
    parallel replicas can each own a source without sharing state.
    """

    def __init__(self, seed=0, stream=0):
        if not 0 <= seed < SEED_LIMIT:
            raise DomainError("seed must be a 64-bit unsigned integer")
        if stream < 0:
            raise DomainError("stream must be nonnegative")
        self.seed = seed
        self.stream = stream
        self._rng = random.Random(seed | (stream << 64))
        self.bits_used = 0

    def bit(self):
        self.bits_used += 1
        return self._rng.getrandbits(1)

    def bits(self, k):
        """Return ``k`` fresh bits packed into an integer in ``[0, 2**k)``."""
        if k == 0:
            return 0
        self.bits_used += k
        return self._rng.getrandbits(k)


class BitsExhausted(Exception):
    """Raised by :class:`ScriptedBits` when its prefix runs out."""


class ScriptedBits:
    """A bit source that replays a fixed prefix; used to walk bit-trees."""

    def __init__(self, prefix):
        self.prefix = list(prefix)
        self.bits_used = 0

    def bit(self):
        if self.bits_used >= len(self.prefix):
            raise BitsExhausted
        b = self.prefix[self.bits_used]
        self.bits_used += 1
        return b

    def bits(self, k):
        v = 0
        for _ in range(k):
            v = (v << 1) | self.bit()
        return v


def exhaust_bit_tree(draw, max_depth):
    """Enumerate every bit prefix of length <= ``max_depth`` fed to ``draw``.

    Returns ``(masses, undecided)`` where ``masses[outcome]`` is the exact
    probability that ``draw`` finishes with ``outcome`` within ``max_depth``
    bits, and ``undecided`` is the probability it needs more bits.
    """
    masses = {}
    undecided = Fraction(0)
    stack = [()]
    while stack:
        prefix = stack.pop()
        try:
            outcome = draw(ScriptedBits(prefix))
        except BitsExhausted:
            if len(prefix) == max_depth:
                undecided += Fraction(1, 1 << max_depth)
            else:
                stack.append(prefix + (1,))
                stack.append(prefix + (0,))
            continue
        masses[outcome] = masses.get(outcome, 0) + Fraction(1, 1 << len(prefix))
    return masses, undecided


def bernoulli_exact(p, bits):
    """Return True with probability exactly ``p``.

    The fair bits are read as the binary expansion of a uniform ``U`` and
    compared lazily against the expansion of ``1 - p``; the answer is
    ``U > 1 - p``.  Each bit settles the comparison with probability 1/2,
    so on average at most two bits are read.
    """
    p = as_rational(p)
    num, b = p.numerator, p.denominator
    if num < 0 or num > b:
        raise DomainError(f"coin probability {p} outside [0, 1]")
    if num == 0:
        return False
    a = b - num
    while a:
        a <<= 1
        qbit = a >= b
        if qbit:
            a -= b
        u = bits.bit()
        if u != qbit:
            return u > qbit
    # U agrees with the terminating expansion of 1 - p so far; U > 1 - p a.s.
    return True


def uniform_int(n, bits):
    """Uniform integer in ``[0, n)`` by rejection on ``ceil(log2 n)``-bit blocks."""
    if n <= 0:
        raise DomainError("range must be nonempty")
    if n == 1:
        return 0
    k = (n - 1).bit_length()
    while True:
        v = bits.bits(k)
        if v < n:
            return v


class TableSampler:
    """Exact sampler for a fixed rational distribution over ``outcomes``.

    Weights are put over a common denominator ``D``; a uniform integer below
    ``D`` is drawn exactly and located among the cumulative counts.
    """

    __slots__ = ("outcomes", "cum", "total")

    def __init__(self, outcomes, weights):
        weights = [as_rational(w) for w in weights]
        if any(w < 0 for w in weights):
            raise InvalidDistributionError("negative weight")
        if sum(weights) != 1:
            raise InvalidDistributionError(f"weights sum to {sum(weights)}, not 1")
        den = reduce(lcm, (w.denominator for w in weights), 1)
        cum = []
        acc = 0
        kept = []
        for o, w in zip(outcomes, weights):
            if w:
                acc += w.numerator * (den // w.denominator)
                cum.append(acc)
                kept.append(o)
        self.outcomes = tuple(kept)
        self.cum = cum
        self.total = den

    def draw(self, bits):
        if len(self.outcomes) == 1:
            return self.outcomes[0]
        u = uniform_int(self.total, bits)
        return self.outcomes[bisect_right(self.cum, u)]


def categorical_exact(weights, bits):
    """Return index ``i`` with probability exactly ``weights[i]``."""
    return TableSampler(range(len(weights)), weights).draw(bits)


# -- state spaces and chains -------------------------------------------------


class StateSpace:
    """Bijection between an enumerated tuple of states and ``0..size-1``."""

    def __init__(self, states, label=None):
        self.states = tuple(states)
        if not self.states:
            raise DomainError("state space must be nonempty")
        self._index = {s: i for i, s in enumerate(self.states)}
        if len(self._index) != len(self.states):
            raise DomainError("duplicate states")
        self._label = label or str

    @property
    def size(self):
        return len(self.states)

    def __len__(self):
        return len(self.states)

    def encode(self, state):
        return self._index[state]

    def decode(self, index):
        return self.states[index]

    def label(self, index):
        return self._label(self.states[index])

    def __contains__(self, state):
        return state in self._index


def _aggregate(entries, size):
    row = {}
    for j, p in entries:
        p = as_rational(p)
        if p < 0:
            raise InvalidDistributionError(f"negative transition probability {p}")
        if not 0 <= j < size:
            raise DomainError(f"transition target {j} out of range")
        if p:
            row[j] = row.get(j, 0) + p
    total = sum(row.values())
    if total != 1:
        raise InvalidDistributionError(f"transition row sums to {total}, not 1")
    return tuple(sorted(row.items()))


class ChainModel:
    """A finite Markov chain with rational transition rows.

    ``row(i)`` yields ``(j, probability)`` pairs (duplicates are summed).
    ``step(i, bits)`` simulates one transition; when omitted, rows are
    tabulated and sampled exactly.  Rows are validated and memoised on
    first use; the model is otherwise immutable.
    """

    def __init__(self, space, row, step=None, name="chain"):
        self.space = space
        self._row_fn = row
        self._step_fn = step
        self.name = name
        self._rows = {}
        self._tables = {}

    @property
    def size(self):
        return self.space.size

    def row(self, i):
        r = self._rows.get(i)
        if r is None:
            r = _aggregate(self._row_fn(i), self.size)
            self._rows[i] = r
        return r

    def table(self, i):
        t = self._tables.get(i)
        if t is None:
            r = self.row(i)
            t = TableSampler([j for j, _ in r], [p for _, p in r])
            self._tables[i] = t
        return t

    def step(self, i, bits):
        if self._step_fn is None:
            return self.table(i).draw(bits)
        return self._step_fn(i, bits)

    @property
    def has_local_step(self):
        return self._step_fn is not None

    def tabulated(self):
        """Same kernel, simulated by exact table lookup instead of local moves."""
        chain = ChainModel(self.space, self._row_fn, None, self.name)
        chain._rows = self._rows
        return chain


def check_index(chain, i):
    if not isinstance(i, int) or not 0 <= i < chain.size:
        raise DomainError(f"state index {i!r} out of range for |Omega| = {chain.size}")


def simulate(chain, start, t, bits):
    """Run ``chain`` for ``t`` steps from ``start`` and return ``X_t``."""
    check_index(chain, start)
    if t < 0:
        raise DomainError("t must be nonnegative")
    x = start
    step = chain.step
    for _ in range(t):
        x = step(x, bits)
    return x


def transition_matrix(chain, cap=None):
    """Dense exact transition matrix of ``chain``."""
    cap = limits.dense_cap() if cap is None else cap
    n = chain.size
    if n > cap:
        raise ResourceError(f"|Omega| = {n} exceeds the dense-matrix cap {cap}")
    rows = []
    for i in range(n):
        dense = [Fraction(0)] * n
        for j, p in chain.row(i):
            dense[j] = p
        rows.append(dense)
    return RatMatrix.from_fractions(rows)


def explicit_chain(rows, name="explicit", labels=None):
    """Chain from a dense list of rational rows."""
    rows = [[as_rational(x) for x in r] for r in rows]
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise DomainError("transition matrix must be square")
    states = list(range(n)) if labels is None else list(labels)
    space = StateSpace(states)
    table = [[(j, p) for j, p in enumerate(r) if p] for r in rows]
    chain = ChainModel(space, lambda i: table[i], name=name)
    for i in range(n):
        chain.row(i)
    return chain
