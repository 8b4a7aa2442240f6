"""Small simple graphs, optionally bipartite."""

from dataclasses import dataclass, field
from typing import Optional, Tuple

from ..errors import ModelError


@dataclass(frozen=True)
class GraphSpec:
    """Simple undirected graph on vertices ``0..n-1``.

    ``bipartition`` is a pair of vertex tuples ``(U, V)``; when present every
    edge must join ``U`` to ``V``.
    """

    n: int
    edges: Tuple[Tuple[int, int], ...] = ()
    bipartition: Optional[Tuple[Tuple[int, ...], Tuple[int, ...]]] = None
    _adj: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n < 1:
            raise ModelError("a graph needs at least one vertex")
        norm = []
        seen = set()
        for e in self.edges:
            u, v = (int(x) for x in e)
            if u == v:
                raise ModelError(f"self-loop at {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ModelError(f"edge {e} leaves the vertex range")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise ModelError(f"parallel edge {key}")
            seen.add(key)
            norm.append(key)
        object.__setattr__(self, "edges", tuple(norm))
        adj = [set() for _ in range(self.n)]
        for u, v in norm:
            adj[u].add(v)
            adj[v].add(u)
        object.__setattr__(self, "_adj", tuple(frozenset(a) for a in adj))
        if self.bipartition is not None:
            U, V = (tuple(int(x) for x in side) for side in self.bipartition)
            if sorted(U + V) != list(range(self.n)):
                raise ModelError("bipartition must split the vertex set")
            side = {u: 0 for u in U}
            side.update({v: 1 for v in V})
            for u, v in norm:
                if side[u] == side[v]:
                    raise ModelError(f"edge {(u, v)} lies inside one side of the bipartition")
            object.__setattr__(self, "bipartition", (U, V))

    @property
    def m(self):
        return len(self.edges)

    def neighbors(self, v):
        return self._adj[v]

    def degree(self, v):
        return len(self._adj[v])

    @property
    def max_degree(self):
        return max(len(a) for a in self._adj)

    def components(self):
        comp = [-1] * self.n
        count = 0
        for s in range(self.n):
            if comp[s] >= 0:
                continue
            comp[s] = count
            stack = [s]
            while stack:
                u = stack.pop()
                for w in self._adj[u]:
                    if comp[w] < 0:
                        comp[w] = count
                        stack.append(w)
            count += 1
        return comp, count

    def is_connected(self):
        return self.components()[1] == 1

    # -- constructors --

    @classmethod
    def complete(cls, n):
        return cls(n, tuple((u, v) for u in range(n) for v in range(u + 1, n)))

    @classmethod
    def path(cls, n):
        return cls(n, tuple((i, i + 1) for i in range(n - 1)))

    @classmethod
    def cycle(cls, n):
        if n < 3:
            raise ModelError("a cycle needs at least three vertices")
        return cls(n, tuple((i, (i + 1) % n) for i in range(n)))

    @classmethod
    def bipartite(cls, k, pairs):
        """Bipartite graph with ``U = 0..k-1``, ``V = k..2k-1``; pairs are ``(u, v)`` side indices."""
        return cls(2 * k, tuple((u, k + v) for u, v in pairs),
                   (tuple(range(k)), tuple(range(k, 2 * k))))

    @classmethod
    def complete_bipartite(cls, k):
        return cls.bipartite(k, [(u, v) for u in range(k) for v in range(k)])

    @property
    def side_size(self):
        """``|U|`` for a balanced bipartite graph."""
        if self.bipartition is None:
            raise ModelError("graph has no bipartition")
        U, V = self.bipartition
        if len(U) != len(V):
            raise ModelError("bipartition is unbalanced")
        return len(U)

    def bipartite_pairs(self):
        """Edges as ``(u, v)`` side-index pairs, with ``U`` and ``V`` in sorted order."""
        U, V = self.bipartition
        ui = {u: i for i, u in enumerate(U)}
        vi = {v: i for i, v in enumerate(V)}
        out = set()
        for a, b in self.edges:
            if a in ui:
                out.add((ui[a], vi[b]))
            else:
                out.add((ui[b], vi[a]))
        return out

    @classmethod
    def from_dict(cls, d):
        """Build from a JSON-style mapping.

        Shorthands: ``{"complete": n}``, ``{"path": n}``, ``{"cycle": n}``,
        ``{"complete_bipartite": k}``, ``{"bipartite": k, "pairs": [...]}``;
        otherwise ``{"n": n, "edges": [...]}``.
        """
        if "complete" in d:
            return cls.complete(int(d["complete"]))
        if "path" in d:
            return cls.path(int(d["path"]))
        if "cycle" in d:
            return cls.cycle(int(d["cycle"]))
        if "complete_bipartite" in d:
            return cls.complete_bipartite(int(d["complete_bipartite"]))
        if "bipartite" in d:
            return cls.bipartite(int(d["bipartite"]), [tuple(p) for p in d.get("pairs", [])])
        if "n" not in d:
            raise ModelError(f"cannot read a graph from {d!r}")
        bip = d.get("bipartition")
        return cls(int(d["n"]), tuple(tuple(e) for e in d.get("edges", [])),
                   None if bip is None else (tuple(bip[0]), tuple(bip[1])))
