import json
from fractions import Fraction as F

import pytest

from perfectmc.core import transition_matrix
from perfectmc.errors import ModelError
from perfectmc.gallery import (
    KINDS,
    GraphSpec,
    bases_exchange_chain,
    build_chain,
    coloring_glauber,
    cycle_basis,
    even_subgraph_chain,
    even_subgraph_weights,
    has_self_loop,
    hardcore,
    is_irreducible,
    jsv_matching_chain,
    jsv_perfect_matching_sampler,
    lazy_walk,
    linear_extension_chain,
    load_chain,
    pattern_masses,
    proper_colorings,
    spanning_trees,
    two_spin_glauber,
)
from perfectmc.stationary import check_reversible
from perfectmc.stats import binomial_z

from conftest import GALLERY_IDS


def matrix(g):
    return transition_matrix(g.chain).to_fractions()


def by_state(g):
    return {g.chain.space.decode(i): p for i, p in enumerate(g.pi)}


@pytest.mark.parametrize("key", GALLERY_IDS)
def test_gallery_chain_contract(gallery, key):
    g = gallery(key)
    P = transition_matrix(g.chain)
    assert check_reversible(P, g.pi)
    assert is_irreducible(g.chain)
    assert has_self_loop(g.chain)


def test_lazy_walk_examples():
    assert matrix(lazy_walk(GraphSpec.path(2))) == [[F(1, 2), F(1, 2)], [F(1, 2), F(1, 2)]]
    assert list(lazy_walk(GraphSpec.cycle(6)).pi) == [F(1, 6)] * 6
    assert list(lazy_walk(GraphSpec.path(3)).pi) == [F(1, 4), F(1, 2), F(1, 4)]
    with pytest.raises(ModelError):
        lazy_walk(GraphSpec(3, ((0, 1),)))


def test_colorings():
    tri = GraphSpec.complete(3)
    assert len(proper_colorings(tri, 3)) == 6
    # With q = Delta + 1 the heat-bath chain on a triangle cannot move at all.
    with pytest.raises(ModelError):
        coloring_glauber(tri, 3)
    g = coloring_glauber(tri, 4)
    assert g.size == 24 and set(g.pi) == {F(1, 24)}
    one = coloring_glauber(GraphSpec(1), 2)
    assert matrix(one) == [[F(1, 2), F(1, 2)], [F(1, 2), F(1, 2)]]


def test_two_spin_examples():
    g = hardcore(GraphSpec.path(3), 2)
    m = by_state(g)
    assert m == {(0, 0, 0): F(1, 11), (1, 0, 0): F(2, 11), (0, 1, 0): F(2, 11),
                 (0, 0, 1): F(2, 11), (1, 0, 1): F(4, 11)}
    free = two_spin_glauber(GraphSpec.path(3), 1, 1, 1)
    assert free.size == 8 and set(free.pi) == {F(1, 8)}
    ising = two_spin_glauber(GraphSpec.path(2), 2, 2, 1)
    assert by_state(ising) == {(0, 0): F(1, 3), (0, 1): F(1, 6), (1, 0): F(1, 6), (1, 1): F(1, 3)}


def test_linear_extensions():
    assert linear_extension_chain(3, []).size == 6
    assert linear_extension_chain(3, [(0, 1), (1, 2)]).size == 1
    v = linear_extension_chain(3, [(0, 2), (1, 2)])
    assert v.size == 2 and list(v.pi) == [F(1, 2), F(1, 2)]
    with pytest.raises(ModelError):
        linear_extension_chain(2, [(0, 1), (1, 0)])


def test_spanning_trees():
    assert len(spanning_trees(GraphSpec.complete(3))) == 3
    assert bases_exchange_chain(GraphSpec.path(4)).size == 1
    c4 = bases_exchange_chain(GraphSpec.cycle(4))
    assert c4.size == 4 and set(c4.pi) == {F(1, 4)}
    assert len(spanning_trees(GraphSpec.complete(4))) == 16
    with pytest.raises(ModelError):
        spanning_trees(GraphSpec(3, ((0, 1),)))


def test_jsv_k22_ideal_weights():
    g = jsv_matching_chain(GraphSpec.complete_bipartite(2))
    assert len(g.info["perfect"]) == 2
    assert g.info["w_star"] == {(u, v): 2 for u in range(2) for v in range(2)}
    perfect, per_hole = pattern_masses(g)
    assert len(per_hole) == 4 and set(per_hole.values()) == {perfect} == {F(1, 5)}


@pytest.mark.parametrize("pairs", [None, "minus-edge"])
def test_jsv_k33_patterns(pairs):
    k = 3
    all_pairs = [(u, v) for u in range(k) for v in range(k)]
    graph = GraphSpec.bipartite(k, all_pairs if pairs is None else all_pairs[1:])
    g = jsv_matching_chain(graph, F(1, 6))
    perfect, per_hole = pattern_masses(g)
    assert len(per_hole) == 9
    assert all(m == perfect for m in per_hole.values())
    assert perfect == F(1, 10)
    valid = [g.pi[i] for i in g.info["valid_perfect"]]
    assert len(valid) == (6 if pairs is None else 4)
    assert len(set(valid)) == 1
    assert check_reversible(transition_matrix(g.chain), g.pi)


def test_jsv_perturbed_weights_keep_perfect_mass():
    n = 3
    g = jsv_matching_chain(GraphSpec.complete_bipartite(n), hole_weights=lambda w: {h: 2 * x for h, x in w.items()})
    perfect, _ = pattern_masses(g)
    assert perfect >= F(1, 2 * (n * n + 1))
    assert check_reversible(transition_matrix(g.chain), g.pi)
    with pytest.raises(ModelError):
        jsv_matching_chain(GraphSpec.complete_bipartite(2), hole_weights={(0, 0): 1})


def test_jsv_sampler_k22_uniform():
    s = jsv_perfect_matching_sampler(GraphSpec.complete_bipartite(2), eps=F(1, 4))
    assert s.acceptance_probability() == F(1, 5)
    n = 100_000
    out = s.sample(n, seed=2024)
    counts = {}
    for state, _ in out:
        counts[state] = counts.get(state, 0) + 1
    assert set(counts) == set(s.valid) and len(counts) == 2
    for c in counts.values():
        assert abs(binomial_z(c, n, F(1, 2))) < 4
    attempts = sum(a for _, a in out)
    assert abs(attempts / n - 5) < 0.1


def test_jsv_sampler_unique_matching_and_none():
    forced = GraphSpec.bipartite(2, [(0, 0), (1, 1), (0, 1)])
    s = jsv_perfect_matching_sampler(forced, eps=F(1, 4))
    assert len(s.valid) == 1
    states = {state for state, _ in s.sample(200, seed=1)}
    assert states == set(s.valid)
    assert s.matching(next(iter(states))) == ((0, 0), (1, 1))
    with pytest.raises(ModelError):
        jsv_perfect_matching_sampler(GraphSpec.bipartite(2, [(0, 0), (1, 0)]))


def test_even_subgraphs():
    tri = even_subgraph_chain(GraphSpec.complete(3), 1)
    assert list(tri.pi) == [F(1, 2), F(1, 2)]
    single = even_subgraph_chain(GraphSpec.path(2), 3)
    assert single.size == 1
    for beta in (F(1, 2), F(1), F(2)):
        states, pi = even_subgraph_weights(GraphSpec.cycle(4), beta)
        assert [bin(s).count("1") for s in states] == [0, 4]
        assert list(pi) == [1 / (1 + beta**4), beta**4 / (1 + beta**4)]
    k4 = GraphSpec.complete(4)
    assert len(cycle_basis(k4)) == k4.m - k4.n + 1
    states, _ = even_subgraph_weights(k4, 1)
    assert len(states) == 8
    for s in states:
        deg = [0] * 4
        for k, (u, v) in enumerate(k4.edges):
            if s >> k & 1:
                deg[u] += 1
                deg[v] += 1
        assert all(d % 2 == 0 for d in deg)


def test_registry_round_trip(tmp_path):
    docs = {
        "lazy-walk": {"graph": {"cycle": 4}},
        "coloring-glauber": {"graph": {"path": 2}, "q": 3},
        "hardcore": {"graph": {"path": 3}, "lambda": "2"},
        "two-spin": {"graph": {"path": 2}, "beta": 2, "gamma": [2, 1]},
        "linear-extension": {"n": 3, "relations": [[0, 2], [1, 2]]},
        "bases-exchange": {"graph": {"complete": 3}},
        "jsv-matching": {"graph": {"complete_bipartite": 2}},
        "even-subgraph": {"graph": {"complete": 3}, "beta": "1/2"},
    }
    assert set(docs) | {"explicit"} == set(KINDS)
    for kind, params in docs.items():
        g = build_chain({"kind": kind, "params": params})
        assert check_reversible(transition_matrix(g.chain), g.pi)
    path = tmp_path / "chain.json"
    path.write_text(json.dumps({"kind": "explicit", "matrix": [[[1, 2], [1, 2]], [[1, 3], [2, 3]]]}))
    assert list(load_chain(str(path)).pi) == [F(2, 5), F(3, 5)]
    for bad in ('{"kind": "nope"}', '{"params": {}}', '{"kind": "hardcore", "params": {}}', "{oops", "missing.json"):
        with pytest.raises(ModelError):
            load_chain(bad)
