"""Goodness-of-fit helpers for the statistical side of verification.

These never establish exactness (the rational identities do); they catch
gross implementation slips in the simulators.
"""

import math
from collections import Counter
from typing import NamedTuple

from scipy import stats


class ChiSquare(NamedTuple):
    statistic: float
    dof: int
    p_value: float
    bins: int


def chi_square(counts, probs, min_expected=5.0):
    """Pearson chi-square of ``counts`` against exact ``probs``.

    Bins with expected count below ``min_expected`` are pooled, smallest
    first, into one bin.
    """
    N = sum(counts)
    cells = sorted(((float(p) * N, c) for p, c in zip(probs, counts)), key=lambda e: e[0])
    pooled = []
    acc_e = acc_c = 0.0
    for e, c in cells:
        if e < min_expected or acc_e and acc_e < min_expected:
            acc_e += e
            acc_c += c
        else:
            pooled.append((e, c))
    if acc_e:
        if acc_e < min_expected and pooled:
            e, c = pooled.pop(0)
            acc_e += e
            acc_c += c
        pooled.append((acc_e, acc_c))
    if any(e == 0 and c > 0 for e, c in pooled):
        return ChiSquare(math.inf, max(len(pooled) - 1, 0), 0.0, len(pooled))
    stat = sum((c - e) ** 2 / e for e, c in pooled if e > 0)
    dof = len(pooled) - 1
    p = 1.0 if dof <= 0 else float(stats.chi2.sf(stat, dof))
    return ChiSquare(stat, dof, p, len(pooled))


def binomial_z(count, n, p):
    """z-score of ``count`` successes in ``n`` trials with success probability ``p``."""
    p = float(p)
    sd = math.sqrt(n * p * (1 - p))
    if sd == 0:
        return 0.0 if count == n * p else math.inf
    return (count - n * p) / sd


def mean_z(values, mean, variance):
    """z-score of the sample mean against a known mean and per-draw variance."""
    n = len(values)
    sd = math.sqrt(float(variance) / n)
    diff = sum(values) / n - float(mean)
    if sd == 0:
        return 0.0 if diff == 0 else math.inf
    return diff / sd


def frequencies(states, size):
    c = Counter(states)
    return [c.get(i, 0) for i in range(size)]
