"""Concrete chains with rational kernels and exact reference distributions."""

from .base import GalleryChain, has_self_loop, is_irreducible
from .bases import bases_exchange_chain, bases_exchange_walk, spanning_trees
from .graphs import GraphSpec
from .matchings import (
    JsvPerfectMatchingSampler,
    jsv_matching_chain,
    jsv_perfect_matching_sampler,
    pattern_masses,
)
from .posets import linear_extension_chain, linear_extensions
from .registry import KINDS, build_chain, load_chain
from .spins import coloring_glauber, hardcore, proper_colorings, two_spin_glauber
from .subgraphs import cycle_basis, even_subgraph_chain, even_subgraph_weights
from .walks import lazy_walk

__all__ = [
    "GalleryChain",
    "GraphSpec",
    "JsvPerfectMatchingSampler",
    "KINDS",
    "bases_exchange_chain",
    "bases_exchange_walk",
    "build_chain",
    "coloring_glauber",
    "cycle_basis",
    "even_subgraph_chain",
    "even_subgraph_weights",
    "hardcore",
    "has_self_loop",
    "is_irreducible",
    "jsv_matching_chain",
    "jsv_perfect_matching_sampler",
    "lazy_walk",
    "linear_extension_chain",
    "linear_extensions",
    "load_chain",
    "pattern_masses",
    "proper_colorings",
    "spanning_trees",
    "two_spin_glauber",
]
