from fractions import Fraction

import pytest

from perfectmc.gallery import (
    GraphSpec,
    bases_exchange_chain,
    coloring_glauber,
    even_subgraph_chain,
    hardcore,
    jsv_matching_chain,
    lazy_walk,
    linear_extension_chain,
    two_spin_glauber,
)

F = Fraction


def small_gallery():
    """Small instances of every gallery family, keyed by a readable id."""
    return {
        "lazy-K3": lambda: lazy_walk(GraphSpec.complete(3)),
        "lazy-K5": lambda: lazy_walk(GraphSpec.complete(5)),
        "lazy-P4": lambda: lazy_walk(GraphSpec.path(4)),
        "lazy-C5": lambda: lazy_walk(GraphSpec.cycle(5)),
        "coloring-triangle-q4": lambda: coloring_glauber(GraphSpec.complete(3), 4),
        "coloring-P3-q4": lambda: coloring_glauber(GraphSpec.path(3), 4),
        "hardcore-P3": lambda: hardcore(GraphSpec.path(3), 2),
        "hardcore-P4": lambda: hardcore(GraphSpec.path(4), 2),
        "ising-edge": lambda: two_spin_glauber(GraphSpec.path(2), 2, 2, 1),
        "two-spin-C4": lambda: two_spin_glauber(GraphSpec.cycle(4), F(3, 2), F(1, 2), F(2, 3)),
        "linext-antichain3": lambda: linear_extension_chain(3, []),
        "linext-V": lambda: linear_extension_chain(3, [(0, 2), (1, 2)]),
        "trees-triangle": lambda: bases_exchange_chain(GraphSpec.complete(3)),
        "trees-C4": lambda: bases_exchange_chain(GraphSpec.cycle(4)),
        "trees-K4": lambda: bases_exchange_chain(GraphSpec.complete(4)),
        "jsv-K22": lambda: jsv_matching_chain(GraphSpec.complete_bipartite(2)),
        "even-triangle": lambda: even_subgraph_chain(GraphSpec.complete(3), 1),
        "even-K4": lambda: even_subgraph_chain(GraphSpec.complete(4), F(1, 2)),
    }


GALLERY_IDS = list(small_gallery())


@pytest.fixture(scope="session")
def gallery():
    cache = {}

    def get(key):
        if key not in cache:
            cache[key] = small_gallery()[key]()
        return cache[key]

    return get


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for k in sorted(results):
            terminalreporter.write_line(results[k])
