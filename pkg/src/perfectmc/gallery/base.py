"""Shared pieces of the chain gallery."""

from dataclasses import dataclass, field

from .. import limits
from ..distributions import FiniteDist
from ..errors import ModelError, ResourceError


@dataclass
class GalleryChain:
    """A gallery chain together with its declared exact stationary law."""

    name: str
    chain: object
    pi: FiniteDist
    info: dict = field(default_factory=dict)

    @property
    def size(self):
        return self.chain.size


def capped(iterable, what):
    """Materialise an enumeration, refusing to exceed the state cap."""
    cap = limits.state_cap()
    out = []
    for item in iterable:
        out.append(item)
        if len(out) > cap:
            raise ResourceError(f"more than {cap} {what}; raise {limits.STATE_CAP_ENV} to continue")
    if not out:
        raise ModelError(f"no {what}")
    return out


def reachable_from(chain, start=0):
    seen = {start}
    stack = [start]
    while stack:
        x = stack.pop()
        for y, _ in chain.row(x):
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return seen


def is_irreducible(chain):
    """Every state reaches every other: forward closure from 0 and reversed closure to 0."""
    n = chain.size
    if len(reachable_from(chain, 0)) != n:
        return False
    back = [[] for _ in range(n)]
    for x in range(n):
        for y, _ in chain.row(x):
            back[y].append(x)
    seen = {0}
    stack = [0]
    while stack:
        y = stack.pop()
        for x in back[y]:
            if x not in seen:
                seen.add(x)
                stack.append(x)
    return len(seen) == n


def has_self_loop(chain):
    return any(j == i for i in range(chain.size) for j, _ in chain.row(i))


def require_irreducible(chain, why):
    if not is_irreducible(chain):
        raise ModelError(f"{chain.name}: state space is not irreducible ({why})")
