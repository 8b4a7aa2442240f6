from fractions import Fraction

from ..core import ChainModel, StateSpace, bernoulli_exact, uniform_int
from ..distributions import FiniteDist
from ..errors import ModelError
from .base import GalleryChain, capped

HALF = Fraction(1, 2)


def _closure(n, relations):
    below = [set() for _ in range(n)]  # below[b] = {a : a < b}
    for a, b in relations:
        if not (0 <= a < n and 0 <= b < n):
            raise ModelError(f"relation {(a, b)} leaves the element range")
        below[b].add(a)
    changed = True
    while changed:
        changed = False
        for b in range(n):
            extra = set()
            for a in below[b]:
                extra |= below[a]
            extra -= below[b]
            if extra:
                below[b] |= extra
                changed = True
    if any(b in below[b] for b in range(n)):
        raise ModelError("relations contain a cycle")
    return below


def linear_extensions(n, relations):
    below = _closure(n, relations)

    def extend(prefix, placed):
        if len(prefix) == n:
            yield tuple(prefix)
            return
        for e in range(n):
            if e not in placed and below[e] <= placed:
                prefix.append(e)
                placed.add(e)
                yield from extend(prefix, placed)
                placed.discard(e)
                prefix.pop()

    return capped(extend([], set()), "linear extensions"), below


def linear_extension_chain(n, relations=()):
    """Lazy adjacent-transposition walk on linear extensions; uniform stationary law.

    ``relations`` are pairs ``(a, b)`` meaning ``a < b``.  With probability
    1/2 the chain holds; otherwise it picks one of the ``n - 1`` adjacent
    position pairs and swaps it when the result is still a linear extension.
    """
    n = int(n)
    relations = [tuple(r) for r in relations]
    if n < 0:
        raise ModelError("poset size must be nonnegative")
    states, below = linear_extensions(n, relations)
    space = StateSpace(states, label=lambda s: "<".join(map(str, s)))

    def swapped(s, i):
        a, b = s[i], s[i + 1]
        if a in below[b]:
            return None
        return s[:i] + (b, a) + s[i + 2:]

    def row(k):
        s = space.decode(k)
        if n < 2:
            return [(k, Fraction(1))]
        p = Fraction(1, 2 * (n - 1))
        out = [(k, HALF)]
        for i in range(n - 1):
            t = swapped(s, i)
            out.append((k if t is None else space.encode(t), p))
        return out

    def step(k, bits):
        if n < 2 or bernoulli_exact(HALF, bits):
            return k
        s = space.decode(k)
        t = swapped(s, uniform_int(n - 1, bits))
        return k if t is None else space.encode(t)

    chain = ChainModel(space, row, step, name=f"linear-extension(n={n})")
    return GalleryChain("linear-extension", chain, FiniteDist.uniform(len(states), space),
                        {"n": n, "relations": relations})
