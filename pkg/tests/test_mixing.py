import math
from fractions import Fraction as F

import pytest

from perfectmc.core import explicit_chain, transition_matrix
from perfectmc.distributions import FiniteDist
from perfectmc.errors import DomainError, ResourceError
from perfectmc.gallery import GraphSpec, lazy_walk
from perfectmc.mixing import (
    MixingCertificate,
    PowerCache,
    RowIterator,
    audit_certificate,
    d_p_at,
    dinf_by_rows,
    distance_profile,
    q_ratio_matrix,
    spectral_gap_estimate,
    tau_from_ell1,
    tau_from_gap,
    tau_l1_brute,
    tau_uniform_brute,
    verify_l2_linf_identity,
    verify_linf_from_l1,
    verify_norm_chain,
)
from perfectmc.stationary import check_reversible

from conftest import GALLERY_IDS


def kn(n):
    g = lazy_walk(GraphSpec.complete(n))
    return transition_matrix(g.chain), g.pi


def test_q_ratio_examples():
    P, pi = kn(3)
    q0 = q_ratio_matrix(P, pi, 0)
    assert q0 == [[3, 0, 0], [0, 3, 0], [0, 0, 3]]
    q1 = q_ratio_matrix(P, pi, 1)
    assert all(q1[x][x] == F(3, 2) for x in range(3))
    assert all(q1[x][y] == F(3, 4) for x in range(3) for y in range(3) if x != y)
    for t in (0, 1, 5):
        for row in q_ratio_matrix(P, pi, t):
            assert sum(q * p for q, p in zip(row, pi)) == 1


def test_distance_examples():
    P, pi = kn(3)
    assert d_p_at(P, pi, 0, "inf") == 2
    assert d_p_at(P, pi, 1, math.inf) == F(1, 2)
    d = distance_profile(P, pi, 1)
    assert (d.d1, d.d2_sq, d.dinf) == (F(1, 3), F(1, 8), F(1, 2))
    for n in (2, 5, 7):
        Pn, pin = kn(n)
        assert d_p_at(Pn, pin, 0, "inf") == n - 1
    with pytest.raises(DomainError):
        d_p_at(P, pi, 1, 3)


def test_power_cache_matches_rows():
    P, pi = kn(4)
    cache = PowerCache(P)
    it = RowIterator(P)
    for t in (0, 1, 3, 8, 13):
        Pt = cache.power(t).to_fractions()
        for x in range(4):
            assert list(it.distribution(x, t)) == Pt[x]


def test_tau_uniform_examples():
    P, pi = kn(3)
    assert tau_uniform_brute(P, pi, F(1, 2)).t == 1
    assert tau_uniform_brute(P, pi, 2).t == 0
    cert = tau_uniform_brute(P, pi, F(1, 81))
    assert cert.provenance == "brute-exact"
    assert d_p_at(P, pi, cert.t, "inf") <= F(1, 81) < d_p_at(P, pi, cert.t - 1, "inf")


def test_flip_chain_never_mixes():
    P = transition_matrix(explicit_chain([[0, 1], [1, 0]]))
    with pytest.raises(ResourceError):
        tau_uniform_brute(P, FiniteDist.uniform(2), F(1, 2), max_t=1024)


def test_tau_from_gap_examples():
    assert tau_from_gap(1, F(1, 2), F(1, 2)).t == 2 * math.ceil(math.log(4)) == 4
    assert tau_from_gap(F(1, 3), F(1, 2), 2).t == 0
    with pytest.raises(DomainError):
        tau_from_gap(0, F(1, 2), F(1, 2))


def test_tau_from_ell1_examples():
    assert tau_from_ell1(3, F(1, 4), F(1, 16)).t == 15
    assert tau_from_ell1(3, F(1, 2), 2).t == 0


def test_certificates_audit_on_k8():
    P, pi = kn(8)
    eps = F(1, 8**4)
    gamma = F(1, 2) + F(1, 14)
    cert = tau_from_gap(gamma, F(1, 8), eps)
    assert audit_certificate(P, pi, cert)
    T = tau_l1_brute(P, pi)
    cert = tau_from_ell1(T, F(1, 8), eps)
    assert audit_certificate(P, pi, cert)
    assert dinf_by_rows(P, pi, cert.t) == d_p_at(P, pi, cert.t, "inf")


@pytest.mark.parametrize("n", [3, 4, 8, 16])
def test_gap_of_lazy_complete_graph(n):
    P, pi = kn(n)
    est = spectral_gap_estimate(P, pi)
    assert abs(est.gamma - n / (2 * (n - 1))) < 1e-9
    assert not est.certified


def test_gap_degenerate_cases():
    ident = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    assert abs(spectral_gap_estimate(ident, FiniteDist.uniform(3)).gamma) < 1e-9
    flat = [[F(1, 2), F(1, 2)], [F(1, 2), F(1, 2)]]
    assert abs(spectral_gap_estimate(flat, FiniteDist.uniform(2)).gamma - 1) < 1e-9
    with pytest.raises(DomainError):
        spectral_gap_estimate([[0, 1, 0], [0, 0, 1], [1, 0, 0]], FiniteDist.uniform(3))


def test_l2_linf_examples():
    P, pi = kn(3)
    assert verify_l2_linf_identity(P, pi, 1)
    assert distance_profile(P, pi, 2).dinf == F(1, 8)
    assert q_ratio_matrix(P, pi, 2)[0][0] == F(9, 8)
    ident = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    u = FiniteDist.uniform(3)
    for t in (0, 1, 3):
        d = distance_profile(ident, u, t)
        assert d.dinf == d.d2_sq == 2
        assert verify_l2_linf_identity(ident, u, t)
    with pytest.raises(DomainError):
        verify_l2_linf_identity([[0, 1, 0], [0, 0, 1], [1, 0, 0]], u, 1)


@pytest.mark.parametrize("key", GALLERY_IDS)
def test_distance_invariants(gallery, key):
    g = gallery(key)
    P = transition_matrix(g.chain)
    cache = PowerCache(P)
    reversible = check_reversible(P, g.pi)
    for t in (1, 2, 4, 8):
        assert verify_norm_chain(P, g.pi, t, cache)
        assert verify_linf_from_l1(P, g.pi, t, cache)
        if reversible:
            assert verify_l2_linf_identity(P, g.pi, t, cache)


@pytest.mark.parametrize("key", ["lazy-K5", "hardcore-P4", "trees-C4", "jsv-K22", "linext-antichain3"])
def test_brute_certificate_reverifies(gallery, key):
    g = gallery(key)
    P = transition_matrix(g.chain)
    cert = tau_uniform_brute(P, g.pi, F(1, 100))
    assert audit_certificate(g.chain, g.pi, cert)


def test_certificate_json_round_trip():
    for cert in (tau_from_gap(F(3, 4), F(1, 3), F(1, 81)), tau_from_ell1(2, F(1, 3), F(1, 81))):
        again = MixingCertificate.from_json(cert.to_json())
        assert again == cert and again.to_json() == cert.to_json()
    with pytest.raises(DomainError):
        MixingCertificate(1, F(1, 2), "guess")


def test_ratio_study_increasing():
    ratios = []
    for n in (8, 16, 32, 64):
        P, pi = kn(n)
        cache = PowerCache(P)
        tu = tau_uniform_brute(P, pi, F(1, n), cache=cache).t
        tq = tau_l1_brute(P, pi, cache=cache)
        ratios.append(F(tu, tq))
    assert ratios == sorted(set(ratios))


def test_power_budget():
    P, _ = kn(5)
    with pytest.raises(ResourceError):
        PowerCache(P, budget=16).power(64)
