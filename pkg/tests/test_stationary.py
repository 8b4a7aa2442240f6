from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from perfectmc.core import StateSpace, explicit_chain, transition_matrix
from perfectmc.distributions import FiniteDist
from perfectmc.errors import EmptySupportError, MultiplicityError
from perfectmc.gallery import GraphSpec, hardcore, lazy_walk
from perfectmc.stationary import (
    check_reversible,
    gibbs_from_weights,
    is_stationary,
    solve_stationary,
)

from conftest import GALLERY_IDS

CYCLE3 = [[0, 1, 0], [0, 0, 1], [1, 0, 0]]


def test_one_state():
    assert list(solve_stationary([[1]]).dist) == [1]


def test_two_state_example():
    st_ = solve_stationary([[F(1, 2), F(1, 2)], [F(1, 3), F(2, 3)]])
    assert list(st_.dist) == [F(2, 5), F(3, 5)]
    assert st_.pi_star == F(2, 5)


def test_doubly_stochastic_is_uniform():
    P = transition_matrix(lazy_walk(GraphSpec.complete(6)).chain)
    assert list(solve_stationary(P).dist) == [F(1, 6)] * 6


def test_reducible_chain_rejected():
    with pytest.raises(MultiplicityError):
        solve_stationary([[1, 0], [0, 1]])


def test_reversibility_examples():
    sym = [[F(1, 2), F(1, 2)], [F(1, 2), F(1, 2)]]
    assert check_reversible(sym, FiniteDist.uniform(2))
    assert not check_reversible(CYCLE3, FiniteDist.uniform(3))
    assert is_stationary(transition_matrix(explicit_chain(CYCLE3)), FiniteDist.uniform(3))
    g = hardcore(GraphSpec.path(3), 2)
    assert check_reversible(transition_matrix(g.chain), g.pi)


def test_gibbs_examples():
    assert list(gibbs_from_weights(4, lambda i: 1)) == [F(1, 4)] * 4
    g = hardcore(GraphSpec.path(3), 2)
    by_label = dict(zip(g.chain.space.states, g.pi))
    masses = sorted(by_label.values())
    assert masses == sorted(F(k, 11) for k in (1, 2, 2, 2, 4))
    space = StateSpace("abc")
    w = {0: 3, 1: 5, 2: 7}
    assert gibbs_from_weights(space, w.get) == gibbs_from_weights(space, lambda i: 2 * w[i])
    with pytest.raises(EmptySupportError):
        gibbs_from_weights(3, lambda i: 0)


@pytest.mark.parametrize("key", GALLERY_IDS)
def test_gallery_stationary(gallery, key):
    g = gallery(key)
    P = transition_matrix(g.chain)
    st_ = solve_stationary(P)
    assert st_.dist == g.pi
    assert is_stationary(P, st_.dist)
    assert sum(st_.dist) == 1


@st.composite
def stochastic(draw):
    n = draw(st.integers(1, 5))
    rows = []
    for _ in range(n):
        w = draw(st.lists(st.integers(1, 9), min_size=n, max_size=n))
        rows.append([F(x, sum(w)) for x in w])
    return rows


@settings(max_examples=60, deadline=None)
@given(stochastic(), st.randoms())
def test_relabeling_equivariance(P, rnd):
    n = len(P)
    perm = list(range(n))
    rnd.shuffle(perm)
    Q = [[P[perm[i]][perm[j]] for j in range(n)] for i in range(n)]
    pi = solve_stationary(P).dist
    pq = solve_stationary(Q).dist
    assert [pq[i] for i in range(n)] == [pi[perm[i]] for i in range(n)]
    assert is_stationary(P, pi)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(1, 9), min_size=2, max_size=5), st.integers(0, 3))
def test_detailed_balance_implies_stationary(weights, seed):
    # Metropolis chain on a complete graph with target proportional to weights.
    n = len(weights)
    Z = sum(weights)
    mu = FiniteDist([F(w, Z) for w in weights])
    P = [[F(0)] * n for _ in range(n)]
    for x in range(n):
        for y in range(n):
            if x != y:
                P[x][y] = F(1, n) * min(F(1), mu[y] / mu[x])
        P[x][x] = 1 - sum(P[x])
    assert check_reversible(P, mu)
    assert solve_stationary(P).dist == mu
