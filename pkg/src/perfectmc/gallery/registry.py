"""Chain-definition documents.

A document is either ``{"kind": <gallery name>, "params": {...}}`` or
``{"kind": "explicit", "matrix": [[[num, den], ...], ...]}``.  Rational
parameters may be ints, ``"num/den"`` strings or ``[num, den]`` pairs.
"""

import json
from pathlib import Path

from ..core import as_rational, explicit_chain, transition_matrix
from ..errors import ModelError
from ..stationary import solve_stationary
from .base import GalleryChain
from .bases import bases_exchange_chain
from .graphs import GraphSpec
from .matchings import jsv_matching_chain
from .posets import linear_extension_chain
from .spins import coloring_glauber, hardcore, two_spin_glauber
from .subgraphs import even_subgraph_chain
from .walks import lazy_walk


def _graph(params):
    if "graph" not in params:
        raise ModelError("params.graph is required")
    return GraphSpec.from_dict(params["graph"])


def _explicit(doc):
    if "matrix" not in doc:
        raise ModelError("explicit chains need a matrix")
    chain = explicit_chain([[as_rational(x) for x in row] for row in doc["matrix"]])
    pi = solve_stationary(transition_matrix(chain)).dist
    return GalleryChain("explicit", chain, pi, {})


BUILDERS = {
    "lazy-walk": lambda p: lazy_walk(_graph(p)),
    "coloring-glauber": lambda p: coloring_glauber(_graph(p), p["q"]),
    "hardcore": lambda p: hardcore(_graph(p), p.get("lambda", 1)),
    "two-spin": lambda p: two_spin_glauber(_graph(p), p["beta"], p["gamma"], p.get("lambda", 1)),
    "linear-extension": lambda p: linear_extension_chain(p["n"], [tuple(r) for r in p.get("relations", [])]),
    "bases-exchange": lambda p: bases_exchange_chain(_graph(p)),
    "jsv-matching": lambda p: jsv_matching_chain(_graph(p), p.get("penalty")),
    "even-subgraph": lambda p: even_subgraph_chain(_graph(p), p.get("beta", 1)),
}

KINDS = tuple(BUILDERS) + ("explicit",)


def build_chain(doc):
    """Build a GalleryChain from a parsed chain-definition document."""
    if not isinstance(doc, dict) or "kind" not in doc:
        raise ModelError("chain document must be an object with a 'kind'")
    kind = doc["kind"]
    if kind == "explicit":
        return _explicit(doc)
    if kind not in BUILDERS:
        raise ModelError(f"unknown chain kind {kind!r}; expected one of {KINDS}")
    params = doc.get("params", {})
    try:
        return BUILDERS[kind](params)
    except KeyError as exc:
        raise ModelError(f"{kind}: missing parameter {exc.args[0]!r}") from None


def load_chain(text_or_path):
    """Parse an inline JSON document or read one from a file path."""
    text = str(text_or_path).strip()
    if not text.startswith("{"):
        path = Path(text)
        if not path.is_file():
            raise ModelError(f"chain file {text!r} not found")
        text = path.read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError(f"invalid chain JSON: {exc}") from None
    return build_chain(doc)
