from fractions import Fraction

from ..core import ChainModel, StateSpace, bernoulli_exact, uniform_int
from ..distributions import FiniteDist
from ..errors import ModelError
from .base import GalleryChain

HALF = Fraction(1, 2)


def lazy_walk(graph):
    """1/2-lazy simple random walk; stationary law proportional to degree."""
    if not graph.is_connected():
        raise ModelError("lazy walk needs a connected graph")
    n = graph.n
    nbrs = [sorted(graph.neighbors(v)) for v in range(n)]

    def row(v):
        if not nbrs[v]:
            return [(v, Fraction(1))]
        share = HALF / len(nbrs[v])
        return [(v, HALF)] + [(w, share) for w in nbrs[v]]

    def step(v, bits):
        if not nbrs[v] or bernoulli_exact(HALF, bits):
            return v
        return nbrs[v][uniform_int(len(nbrs[v]), bits)]

    chain = ChainModel(StateSpace(range(n)), row, step, name=f"lazy-walk(n={n})")
    if graph.m == 0:
        pi = FiniteDist([1])
    else:
        pi = FiniteDist([Fraction(graph.degree(v), 2 * graph.m) for v in range(n)])
    return GalleryChain("lazy-walk", chain, pi, {"graph": graph})
