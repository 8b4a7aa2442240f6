"""Heat-bath Glauber dynamics for q-colourings and two-spin systems."""

from fractions import Fraction
from itertools import product

from ..core import ChainModel, StateSpace, as_rational, bernoulli_exact, uniform_int
from ..distributions import FiniteDist
from ..errors import ModelError
from ..stationary import gibbs_from_weights
from .base import GalleryChain, capped, require_irreducible


def proper_colorings(graph, q):
    """All proper ``q``-colourings as tuples, in lexicographic order."""
    n = graph.n
    order_nbrs = [[w for w in graph.neighbors(v) if w < v] for v in range(n)]

    def extend(prefix):
        v = len(prefix)
        if v == n:
            yield tuple(prefix)
            return
        used = {prefix[w] for w in order_nbrs[v]}
        for c in range(q):
            if c not in used:
                prefix.append(c)
                yield from extend(prefix)
                prefix.pop()

    return capped(extend([]), "proper colourings")


def coloring_glauber(graph, q):
    """Heat-bath Glauber on proper q-colourings; uniform stationary law.

    A uniform vertex is recoloured uniformly among the colours absent from
    its neighbourhood.  Needs ``q >= max_degree + 2`` and an irreducible
    enumerated space.
    """
    q = int(q)
    if q < graph.max_degree + 2:
        raise ModelError(
            f"heat-bath Glauber needs q >= max_degree + 2 = {graph.max_degree + 2}, got q = {q}"
        )
    states = proper_colorings(graph, q)
    space = StateSpace(states, label=lambda s: "".join(map(str, s)))
    n = graph.n
    nbrs = [sorted(graph.neighbors(v)) for v in range(n)]

    def allowed(s, v):
        used = {s[w] for w in nbrs[v]}
        return [c for c in range(q) if c not in used]

    def row(i):
        s = space.decode(i)
        out = []
        for v in range(n):
            cols = allowed(s, v)
            p = Fraction(1, n * len(cols))
            for c in cols:
                out.append((space.encode(s[:v] + (c,) + s[v + 1:]), p))
        return out

    def step(i, bits):
        s = space.decode(i)
        v = uniform_int(n, bits)
        cols = allowed(s, v)
        c = cols[uniform_int(len(cols), bits)]
        return space.encode(s[:v] + (c,) + s[v + 1:])

    chain = ChainModel(space, row, step, name=f"coloring-glauber(n={n}, q={q})")
    require_irreducible(chain, "colour moves do not connect all proper colourings")
    return GalleryChain("coloring-glauber", chain, FiniteDist.uniform(len(states), space),
                        {"graph": graph, "q": q})


def two_spin_weight(graph, sigma, beta, gamma, lam):
    A = ((beta, 1), (1, gamma))
    w = Fraction(1)
    for u, v in graph.edges:
        w *= A[sigma[u]][sigma[v]]
    for s in sigma:
        if s:
            w *= lam
    return w


def two_spin_glauber(graph, beta, gamma, lam):
    """Heat-bath Glauber for the two-spin system with interaction ((beta,1),(1,gamma)).

    States are the configurations of positive weight; the stationary law
    is the Gibbs distribution.  Hardcore is (beta, gamma) = (1, 0); Ising
    is beta = gamma.
    """
    beta, gamma, lam = (as_rational(x) for x in (beta, gamma, lam))
    if min(beta, gamma, lam) < 0:
        raise ModelError("two-spin parameters must be nonnegative")
    n = graph.n
    if n > 24:
        raise ModelError("two-spin enumeration is limited to 24 vertices")
    A = ((beta, Fraction(1)), (Fraction(1), gamma))
    configs = capped(
        (s for s in product((0, 1), repeat=n) if two_spin_weight(graph, s, beta, gamma, lam) > 0),
        "positive-weight configurations",
    )
    space = StateSpace(configs, label=lambda s: "".join(map(str, s)))
    nbrs = [sorted(graph.neighbors(v)) for v in range(n)]

    def local(s, v, spin):
        w = lam if spin else Fraction(1)
        for u in nbrs[v]:
            w *= A[spin][s[u]]
        return w

    def up_probability(s, v):
        w0, w1 = local(s, v, 0), local(s, v, 1)
        return w1 / (w0 + w1)

    def flip_to(s, v, spin):
        return space.encode(s[:v] + (spin,) + s[v + 1:])

    def row(i):
        s = space.decode(i)
        out = []
        for v in range(n):
            p1 = up_probability(s, v)
            if p1:
                out.append((flip_to(s, v, 1), p1 / n))
            if p1 != 1:
                out.append((flip_to(s, v, 0), (1 - p1) / n))
        return out

    up_memo = {}

    def step(i, bits):
        v = uniform_int(n, bits)
        key = (i, v)
        got = up_memo.get(key)
        if got is None:
            s = space.decode(i)
            p1 = up_probability(s, v)
            down = flip_to(s, v, 0) if p1 != 1 else None
            up = flip_to(s, v, 1) if p1 else None
            got = up_memo[key] = (p1, down, up)
        p1, down, up = got
        return up if bernoulli_exact(p1, bits) else down

    chain = ChainModel(space, row, step, name=f"two-spin(n={n}, beta={beta}, gamma={gamma}, lambda={lam})")
    require_irreducible(chain, "single-site updates do not connect all positive-weight configurations")
    pi = gibbs_from_weights(space, lambda i: two_spin_weight(graph, space.decode(i), beta, gamma, lam))
    return GalleryChain("two-spin", chain, pi,
                        {"graph": graph, "beta": beta, "gamma": gamma, "lambda": lam})


def hardcore(graph, lam):
    g = two_spin_glauber(graph, 1, 0, lam)
    g.name = "hardcore"
    return g
