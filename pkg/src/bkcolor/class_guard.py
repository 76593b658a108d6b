"""Membership tests for the two hereditary graph classes.

The forbidden patterns are hard-wired: H is a 3-vertex path plus one vertex
non-adjacent to all of it, R is an edge plus two vertices non-adjacent to
the edge and to each other.  Searches are exhaustive with bitmask pruning
and return the lexicographically first witness, so reports are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .graph_core import Graph, bits

__all__ = [
    "ClassId",
    "InducedWitness",
    "find_H_witness",
    "find_R_witness",
    "is_in_class",
    "shortest_induced_odd_cycle",
]


class ClassId(Enum):
    H_FREE = "h"
    R_FREE = "r"


@dataclass(frozen=True)
class InducedWitness:
    """Four vertices realizing pattern H or R, in role order.

    For H, vertices = (a, b, c, d) with induced path a-b-c and d isolated
    from all three.  For R, vertices = (a, b, c, d) with edge ab and c, d
    non-adjacent to each other and to both endpoints.
    """

    pattern: str
    vertices: tuple[int, int, int, int]

    def check(self, G: Graph) -> bool:
        a, b, c, d = self.vertices
        if len({a, b, c, d}) != 4:
            return False
        if self.pattern == "H":
            return (
                G.adjacent(a, b)
                and G.adjacent(b, c)
                and not G.adjacent(a, c)
                and not G.adjacent(a, d)
                and not G.adjacent(b, d)
                and not G.adjacent(c, d)
            )
        if self.pattern == "R":
            return (
                G.adjacent(a, b)
                and not G.adjacent(c, d)
                and not G.adjacent(a, c)
                and not G.adjacent(a, d)
                and not G.adjacent(b, c)
                and not G.adjacent(b, d)
            )
        return False


def find_H_witness(G: Graph) -> InducedWitness | None:
    """First induced P3-plus-isolated-vertex in lex order of (a, b, c, d)."""
    n, adj = G.n, G.adj
    full = G.full_mask
    for a in range(n):
        aa = adj[a]
        for b in bits(aa):
            # candidate far path ends: adjacent to b, not to a; a < c kills
            # the a/c mirror without changing the lex-first witness.
            cands = adj[b] & ~aa & ~((1 << (a + 1)) - 1)
            for c in bits(cands):
                rest = full & ~(aa | adj[b] | adj[c]) & ~(1 << a) & ~(1 << b) & ~(1 << c)
                if rest:
                    d = (rest & -rest).bit_length() - 1
                    return InducedWitness("H", (a, b, c, d))
    return None


def find_R_witness(G: Graph) -> InducedWitness | None:
    """First induced edge-plus-nonadjacent-pair in lex order of (a, b, c, d)."""
    n, adj = G.n, G.adj
    full = G.full_mask
    for a in range(n):
        higher = adj[a] >> (a + 1) << (a + 1)
        for b in bits(higher):
            outside = full & ~adj[a] & ~adj[b] & ~(1 << a) & ~(1 << b)
            if outside.bit_count() < 2:
                continue
            for c in bits(outside):
                rest = outside & ~adj[c] & ~((1 << (c + 1)) - 1)
                if rest:
                    d = (rest & -rest).bit_length() - 1
                    return InducedWitness("R", (a, b, c, d))
    return None


def is_in_class(G: Graph, class_id: ClassId) -> tuple[bool, InducedWitness | None]:
    wit = find_H_witness(G) if class_id is ClassId.H_FREE else find_R_witness(G)
    return wit is None, wit


def shortest_induced_odd_cycle(G: Graph, min_length: int = 5) -> tuple[int, ...] | None:
    """Shortest chordless odd cycle of length >= min_length, or None.

    Searches lengths in ascending order; within a length, paths grow in lex
    order from their smallest vertex, so the result is deterministic.
    """
    if min_length % 2 == 0:
        min_length += 1
    adj = G.adj
    for length in range(min_length, G.n + 1, 2):
        for start in range(G.n):
            found = _grow_induced_cycle(adj, start, length)
            if found is not None:
                return found
    return None


def _grow_induced_cycle(adj, start: int, length: int):
    # Grow an induced path from start (kept minimal in the cycle, so every
    # cycle is tried exactly once).  forb_mid masks vertices equal or
    # adjacent to interior path vertices; the closing vertex alone is
    # allowed (required) to touch start.
    low = (1 << (start + 1)) - 1

    def step(path: list[int], forb_mid: int):
        head = path[-1]
        if len(path) == length - 1:
            cands = adj[head] & adj[start] & ~forb_mid & ~(1 << head) & ~low
            for w in bits(cands):
                return path + [w]
            return None
        cands = adj[head] & ~forb_mid & ~adj[start] & ~(1 << head) & ~low
        for w in bits(cands):
            done = step(path + [w], forb_mid | adj[head] | (1 << head))
            if done is not None:
                return done
        return None

    for v1 in bits(adj[start] & ~low):
        found = step([start, v1], 0)
        if found is not None:
            return tuple(found)
    return None
