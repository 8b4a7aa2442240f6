"""Single-phase JSV matching chain with exact ideal hole weights.

States are the perfect and near-perfect matchings of the complete
bipartite graph ``K_{n,n}``.  A matching is stored as a tuple ``mate``
with ``mate[u] = v`` or ``-1`` when ``u`` is a hole.  Edge weights are 1 on
edges of the input graph and ``edge_penalty`` on non-edges; the hole
weights default to the ideal ``w*(u,v) = lambda(P) / lambda(N(u,v))``.
"""

from fractions import Fraction
from itertools import permutations
from math import factorial

from ..core import BitSource, ChainModel, StateSpace, as_rational, bernoulli_exact, uniform_int
from ..errors import ModelError
from ..samplers import CHUNK, mc_perfect_sampler
from ..stationary import gibbs_from_weights
from .base import GalleryChain, require_irreducible

HALF = Fraction(1, 2)
MAX_SIDE = 6


def holes(mate):
    """``(u, v)`` hole pair of a near-perfect matching, None when perfect."""
    if -1 not in mate:
        return None
    u = mate.index(-1)
    used = set(mate)
    v = next(v for v in range(len(mate)) if v not in used)
    return u, v


def _enumerate(n):
    perfect = [tuple(p) for p in permutations(range(n))]
    near = []
    for hu in range(n):
        us = [u for u in range(n) if u != hu]
        for hv in range(n):
            vs = [v for v in range(n) if v != hv]
            for perm in permutations(vs):
                mate = [-1] * n
                for u, v in zip(us, perm):
                    mate[u] = v
                near.append(tuple(mate))
    return perfect, near


def _label(mate):
    h = holes(mate)
    body = ",".join(f"{u}-{v}" for u, v in enumerate(mate) if v >= 0)
    return f"P[{body}]" if h is None else f"N{h}[{body}]"


def jsv_matching_chain(graph, edge_penalty=None, hole_weights=None):
    """Metropolis chain on perfect and near-perfect matchings with weights ``Lambda``.

    With probability 1/2 the chain holds.  Otherwise it proposes a uniform
    pair ``(u, v)`` in ``U x V``: remove ``(u, v)`` from a perfect matching
    containing it; add it to a matching whose holes are exactly ``u, v``;
    or, when exactly one of ``u, v`` is a hole, slide the edge at the other
    endpoint onto ``(u, v)``.  Every other pair holds.  The proposal is
    symmetric and accepted with ``min(1, Lambda'/Lambda)``.

    ``hole_weights`` maps ``(u, v)`` to ``w(u, v)``; a callable receiving the
    ideal-weight dict may be given instead.
    """
    n = graph.side_size
    if not 1 <= n <= MAX_SIDE:
        raise ModelError(f"JSV enumeration supports 1 <= n <= {MAX_SIDE}, got {n}")
    pairs = graph.bipartite_pairs()
    penalty = Fraction(1, factorial(n)) if edge_penalty is None else as_rational(edge_penalty)
    if penalty <= 0:
        raise ModelError("edge penalty must be positive")
    lam = [[Fraction(1) if (u, v) in pairs else penalty for v in range(n)] for u in range(n)]

    def weight(mate):
        w = Fraction(1)
        for u, v in enumerate(mate):
            if v >= 0:
                w *= lam[u][v]
        return w

    perfect, near = _enumerate(n)
    lam_P = sum(weight(m) for m in perfect)
    lam_N = {}
    for m in near:
        h = holes(m)
        lam_N[h] = lam_N.get(h, 0) + weight(m)
    w_star = {h: lam_P / lam_N[h] for h in lam_N}
    if hole_weights is None:
        w = dict(w_star)
    elif callable(hole_weights):
        w = {h: as_rational(x) for h, x in hole_weights(dict(w_star)).items()}
    else:
        w = {h: as_rational(x) for h, x in hole_weights.items()}
    if set(w) != set(w_star) or min(w.values()) <= 0:
        raise ModelError("hole weights must be positive and cover every hole pattern")

    states = perfect + near
    space = StateSpace(states, label=_label)
    Lam = []
    for m in states:
        h = holes(m)
        Lam.append(weight(m) if h is None else weight(m) * w[h])

    def propose(mate, u, v):
        h = holes(mate)
        if h is None:
            if mate[u] != v:
                return None
            new = list(mate)
            new[u] = -1
            return tuple(new)
        hu, hv = h
        if u == hu and v == hv:
            new = list(mate)
            new[u] = v
            return tuple(new)
        if u == hu:
            other = mate.index(v)
            new = list(mate)
            new[other] = -1
            new[u] = v
            return tuple(new)
        if v == hv:
            new = list(mate)
            new[u] = v
            return tuple(new)
        return None

    def accept_probability(i, j):
        r = Lam[j] / Lam[i]
        return r if r < 1 else Fraction(1)

    pair_p = HALF / (n * n)

    def row(i):
        mate = space.decode(i)
        out = [(i, HALF)]
        for u in range(n):
            for v in range(n):
                new = propose(mate, u, v)
                if new is None:
                    out.append((i, pair_p))
                    continue
                j = space.encode(new)
                a = accept_probability(i, j)
                out.append((j, pair_p * a))
                if a != 1:
                    out.append((i, pair_p * (1 - a)))
        return out

    moves = {}

    def step(i, bits):
        if bits.bit():
            return i
        k = uniform_int(n * n, bits)
        got = moves.get((i, k))
        if got is None:
            new = propose(space.decode(i), k // n, k % n)
            j = i if new is None else space.encode(new)
            got = moves[(i, k)] = (j, accept_probability(i, j))
        j, a = got
        return j if bernoulli_exact(a, bits) else i

    chain = ChainModel(space, row, step, name=f"jsv-matching(n={n})")
    require_irreducible(chain, "matching moves do not connect the state space")
    pi = gibbs_from_weights(space, lambda i: Lam[i])
    perfect_idx = list(range(len(perfect)))
    valid_idx = [i for i in perfect_idx if all((u, v) in pairs for u, v in enumerate(states[i]))]
    info = {
        "graph": graph,
        "n": n,
        "penalty": penalty,
        "lambda_P": lam_P,
        "lambda_N": lam_N,
        "w_star": w_star,
        "hole_weights": w,
        "perfect": perfect_idx,
        "valid_perfect": valid_idx,
    }
    return GalleryChain("jsv-matching", chain, pi, info)


def pattern_masses(g):
    """Exact stationary mass of the perfect set and of each hole pattern."""
    pi = g.pi
    states = g.chain.space.states
    perfect = sum((pi[i] for i in g.info["perfect"]), Fraction(0))
    per_hole = {}
    for i, m in enumerate(states):
        h = holes(m)
        if h is not None:
            per_hole[h] = per_hole.get(h, 0) + pi[i]
    return perfect, per_hole


class JsvPerfectMatchingSampler:
    """Uniform perfect matchings of a bipartite graph by restarting exact JSV draws.

    Each attempt is an exact draw from the JSV stationary law; attempts
    that are not penalty-free perfect matchings of the input graph are
    discarded.  Conditioned on acceptance the draw is uniform over the
    graph's perfect matchings, since they all carry weight ``lambda = 1``.
    """

    def __init__(self, gallery, sampler):
        self.gallery = gallery
        self.sampler = sampler
        self.valid = frozenset(gallery.info["valid_perfect"])

    @property
    def chain(self):
        return self.gallery.chain

    def acceptance_probability(self):
        pi = self.gallery.pi
        return sum((pi[i] for i in self.valid), Fraction(0))

    def draw(self, bits):
        """Return ``(state_index, attempts, reports)`` for one accepted draw."""
        reports = []
        while True:
            rep = self.sampler.draw(bits)
            reports.append(rep)
            if rep.state in self.valid:
                return rep.state, len(reports), reports

    def sample(self, n, seed=0):
        out = []
        chunk = 0
        while len(out) < n:
            bits = BitSource(seed, stream=chunk)
            for _ in range(min(CHUNK, n - len(out))):
                out.append(self.draw(bits)[:2])
            chunk += 1
        return out

    def matching(self, state):
        """Edges ``(u, v)`` of an accepted state."""
        return tuple(enumerate(self.chain.space.decode(state)))


def jsv_perfect_matching_sampler(graph, mode="mixture", certificate_source="brute", eps=None,
                                 edge_penalty=None, **cert_kwargs):
    """Exact uniform sampler over the perfect matchings of a balanced bipartite graph."""
    n = graph.side_size
    pairs = graph.bipartite_pairs()
    if not any(all((u, v) in pairs for u, v in enumerate(p)) for p in permutations(range(n))):
        raise ModelError("graph has no perfect matching")
    g = jsv_matching_chain(graph, edge_penalty)
    sampler = mc_perfect_sampler(g.chain, 0, mode, certificate_source, eps, **cert_kwargs)
    return JsvPerfectMatchingSampler(g, sampler)
