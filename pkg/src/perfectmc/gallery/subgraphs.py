"""Weighted even subgraphs (the subgraph-world representation of Ising).

Even subgraphs are the cycle space of the graph.  The chain flips a
uniformly chosen fundamental cycle, which keeps every degree even, with
Metropolis acceptance for the weight ``beta^|S|`` and 1/2 laziness.
Subsets are bitmasks over edge indices.
"""

from fractions import Fraction

from ..core import ChainModel, StateSpace, as_rational, bernoulli_exact, uniform_int
from ..errors import ModelError
from ..stationary import gibbs_from_weights
from .base import GalleryChain, capped

HALF = Fraction(1, 2)


def cycle_basis(graph):
    """Fundamental cycles (as edge bitmasks) of a BFS spanning forest."""
    index = {e: k for k, e in enumerate(graph.edges)}
    parent = [-1] * graph.n
    parent_edge = [0] * graph.n
    depth = [0] * graph.n
    tree = 0
    seen = [False] * graph.n
    for root in range(graph.n):
        if seen[root]:
            continue
        seen[root] = True
        queue = [root]
        for u in queue:
            for w in sorted(graph.neighbors(u)):
                if not seen[w]:
                    seen[w] = True
                    parent[w] = u
                    depth[w] = depth[u] + 1
                    bit = 1 << index[(min(u, w), max(u, w))]
                    parent_edge[w] = bit
                    tree |= bit
                    queue.append(w)
    basis = []
    for k, (u, v) in enumerate(graph.edges):
        if tree >> k & 1:
            continue
        mask = 1 << k
        a, b = u, v
        while a != b:
            if depth[a] < depth[b]:
                a, b = b, a
            mask ^= parent_edge[a]
            a = parent[a]
        basis.append(mask)
    return basis


def even_subgraphs(graph):
    basis = cycle_basis(graph)
    if len(basis) > 20:
        raise ModelError("cycle space too large to enumerate")

    def span():
        for code in range(1 << len(basis)):
            mask = 0
            for k, c in enumerate(basis):
                if code >> k & 1:
                    mask ^= c
            yield mask

    return capped(span(), "even subgraphs"), basis


def even_subgraph_weights(graph, beta):
    """Exact law proportional to ``beta^|S|`` over even subgraphs, with the subgraph list."""
    beta = as_rational(beta)
    if beta <= 0:
        raise ModelError("beta must be positive")
    states, _ = even_subgraphs(graph)
    pi = gibbs_from_weights(len(states), lambda i: beta ** bin(states[i]).count("1"))
    return states, pi


def even_subgraph_chain(graph, beta):
    beta = as_rational(beta)
    states, pi = even_subgraph_weights(graph, beta)
    basis = cycle_basis(graph)
    edges = graph.edges
    space = StateSpace(states, label=lambda s: "{" + ",".join(
        f"{u}-{v}" for k, (u, v) in enumerate(edges) if s >> k & 1) + "}")
    pi = type(pi)(pi.mass, space)
    k = len(basis)

    def accept(s, t):
        r = beta ** (bin(t).count("1") - bin(s).count("1"))
        return r if r < 1 else Fraction(1)

    def row(i):
        s = states[i]
        if k == 0:
            return [(i, Fraction(1))]
        out = [(i, HALF)]
        p = HALF / k
        for c in basis:
            t = s ^ c
            a = accept(s, t)
            out.append((space.encode(t), p * a))
            if a != 1:
                out.append((i, p * (1 - a)))
        return out

    def step(i, bits):
        if k == 0 or bernoulli_exact(HALF, bits):
            return i
        s = states[i]
        t = s ^ basis[uniform_int(k, bits)]
        return space.encode(t) if bernoulli_exact(accept(s, t), bits) else i

    chain = ChainModel(space, row, step, name=f"even-subgraph(n={graph.n}, m={graph.m}, beta={beta})")
    return GalleryChain("even-subgraph", chain, pi, {"graph": graph, "beta": beta, "basis": basis})
