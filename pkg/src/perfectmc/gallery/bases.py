"""Bases-exchange (down-up) walk on matroid bases; graphic matroids ship."""

from fractions import Fraction
from itertools import combinations

from ..core import ChainModel, StateSpace, uniform_int
from ..distributions import FiniteDist
from ..errors import ModelError
from .base import GalleryChain, capped


def bases_exchange_walk(bases, name="bases-exchange"):
    """Down-up walk over an explicit list of equal-size bases.

    Drop a uniform element of the current basis, then move to a uniform
    basis containing what remains.  The walk is symmetric, so its
    stationary law is uniform over the bases.
    """
    bases = [frozenset(b) for b in bases]
    if not bases:
        raise ModelError("no bases")
    k = len(bases[0])
    if any(len(b) != k for b in bases):
        raise ModelError("bases must all have the same size")
    space = StateSpace(bases, label=lambda b: "{" + ",".join(map(str, sorted(b))) + "}")
    ups = {}
    for i, b in enumerate(bases):
        for e in b:
            ups.setdefault(b - {e}, []).append(i)
    members = [sorted(b) for b in bases]

    def row(i):
        b = bases[i]
        if k == 0:
            return [(i, Fraction(1))]
        out = []
        for e in members[i]:
            up = ups[b - {e}]
            p = Fraction(1, k * len(up))
            out.extend((j, p) for j in up)
        return out

    def step(i, bits):
        if k == 0:
            return i
        e = members[i][uniform_int(k, bits)]
        up = ups[bases[i] - {e}]
        return up[uniform_int(len(up), bits)]

    chain = ChainModel(space, row, step, name=name)
    return GalleryChain("bases-exchange", chain, FiniteDist.uniform(len(bases), space), {"rank": k})


def _is_forest(n, edges):
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in edges:
        ru, rv = find(u), find(v)
        if ru == rv:
            return False
        parent[ru] = rv
    return True


def spanning_trees(graph):
    """Spanning trees as frozensets of edge indices."""
    if not graph.is_connected():
        raise ModelError("spanning trees need a connected graph")
    E = graph.edges
    return capped(
        (frozenset(c) for c in combinations(range(len(E)), graph.n - 1)
         if _is_forest(graph.n, [E[i] for i in c])),
        "spanning trees",
    )


def bases_exchange_chain(graph):
    """Down-up walk on the spanning trees of ``graph`` (graphic matroid bases)."""
    g = bases_exchange_walk(spanning_trees(graph), name=f"bases-exchange(n={graph.n}, m={graph.m})")
    g.info["graph"] = graph
    return g
