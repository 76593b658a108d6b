"""Bitset-backed simple undirected graphs: construction, graph6 interchange,
small-graph enumeration, and seeded generation of class members.

Vertices are dense integers 0..n-1.  Vertex sets are plain Python ints used
as bitmasks, which keeps neighborhood algebra (union, intersection,
complement) down to single bigint operations.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

__all__ = [
    "Graph",
    "GraphFormatError",
    "bits",
    "mask_of",
    "make_graph",
    "degree_profile",
    "neighbors",
    "induced_subgraph",
    "delete_vertex",
    "parse_graph6",
    "emit_graph6",
    "parse_edge_list",
    "canonical_bits",
    "enumerate_graphs",
    "random_class_graph",
]

ENUM_MAX_N = 8


class GraphFormatError(ValueError):
    """Raised for malformed graph6 or edge-list input."""


def bits(mask: int) -> Iterator[int]:
    """Yield set bit positions of ``mask`` in ascending order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_of(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


@dataclass(frozen=True)
class Graph:
    """Immutable simple undirected graph.

    ``adj[v]`` is the neighbor bitmask of vertex v; the relation is kept
    symmetric and irreflexive by construction.
    """

    n: int
    adj: tuple[int, ...]

    def adjacent(self, v: int, w: int) -> bool:
        return bool(self.adj[v] >> w & 1)

    def degree(self, v: int) -> int:
        return self.adj[v].bit_count()

    @property
    def delta(self) -> int:
        """Maximum degree; 0 for the edgeless/empty graph."""
        return max((a.bit_count() for a in self.adj), default=0)

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def edge_count(self) -> int:
        return sum(a.bit_count() for a in self.adj) // 2

    def edges(self) -> Iterator[tuple[int, int]]:
        for v in range(self.n):
            higher = self.adj[v] >> (v + 1) << (v + 1)
            for w in bits(higher):
                yield (v, w)

    def complement(self) -> Graph:
        full = self.full_mask
        return Graph(self.n, tuple((full & ~a) & ~(1 << v) for v, a in enumerate(self.adj)))

    def is_complete(self) -> bool:
        return self.edge_count() == self.n * (self.n - 1) // 2

    def is_connected(self) -> bool:
        if self.n <= 1:
            return True
        seen = 1
        frontier = 1
        while frontier:
            grow = 0
            for v in bits(frontier):
                grow |= self.adj[v]
            frontier = grow & ~seen
            seen |= frontier
        return seen == self.full_mask


def make_graph(n: int, edges: Iterable[tuple[int, int]]) -> Graph:
    """Build a graph from an edge list; duplicates collapse, loops are errors."""
    if n < 0:
        raise ValueError(f"vertex count must be non-negative, got {n}")
    adj = [0] * n
    for v, w in edges:
        if not (0 <= v < n and 0 <= w < n):
            raise ValueError(f"edge ({v},{w}) out of range for n={n}")
        if v == w:
            raise ValueError(f"self-loop at vertex {v}")
        adj[v] |= 1 << w
        adj[w] |= 1 << v
    return Graph(n, tuple(adj))


def degree_profile(G: Graph) -> tuple[tuple[int, ...], int]:
    """Per-vertex degrees and the maximum degree."""
    degs = tuple(a.bit_count() for a in G.adj)
    return degs, max(degs, default=0)


def neighbors(G: Graph, v: int, closed: bool = False) -> int:
    """Neighbor bitmask of v; the closed variant includes v itself."""
    if not 0 <= v < G.n:
        raise ValueError(f"vertex {v} out of range for n={G.n}")
    m = G.adj[v]
    return m | (1 << v) if closed else m


def induced_subgraph(G: Graph, S: int) -> tuple[Graph, dict[int, int]]:
    """Subgraph induced by the vertex bitmask S, plus the old->new id map."""
    if S & ~G.full_mask:
        raise ValueError("vertex set contains members outside the graph")
    old = list(bits(S))
    remap = {v: i for i, v in enumerate(old)}
    adj = [0] * len(old)
    for i, v in enumerate(old):
        for w in bits(G.adj[v] & S):
            adj[i] |= 1 << remap[w]
    return Graph(len(old), tuple(adj)), remap


def delete_vertex(G: Graph, v: int) -> Graph:
    if not 0 <= v < G.n:
        raise ValueError(f"vertex {v} out of range for n={G.n}")
    sub, _ = induced_subgraph(G, G.full_mask & ~(1 << v))
    return sub


# ---------------------------------------------------------------------------
# graph6 interchange (printable 6-bit encoding, offset 63, column-major
# upper triangle) and the edge-list convenience format.
# ---------------------------------------------------------------------------


def _g6_size_prefix(n: int) -> str:
    if n <= 62:
        return chr(n + 63)
    if n <= 258047:
        return "~" + "".join(chr(((n >> s) & 63) + 63) for s in (12, 6, 0))
    if n <= 68719476735:
        return "~~" + "".join(chr(((n >> s) & 63) + 63) for s in (30, 24, 18, 12, 6, 0))
    raise GraphFormatError(f"graph too large for graph6: n={n}")


def emit_graph6(G: Graph) -> str:
    out = [_g6_size_prefix(G.n)]
    acc = 0
    filled = 0
    for j in range(1, G.n):
        col = G.adj[j]
        for i in range(j):
            acc = acc << 1 | (col >> i & 1)
            filled += 1
            if filled == 6:
                out.append(chr(acc + 63))
                acc = 0
                filled = 0
    if filled:
        out.append(chr((acc << (6 - filled)) + 63))
    return "".join(out)


def parse_graph6(text: str) -> Graph:
    """Decode one graph6 line; strict about length, range, and padding bits."""
    s = text.strip()
    if s.startswith(">>graph6<<"):
        s = s[len(">>graph6<<"):]
    if not s:
        raise GraphFormatError("empty graph6 line")
    vals = []
    for ch in s:
        v = ord(ch) - 63
        if not 0 <= v <= 63:
            raise GraphFormatError(f"character {ch!r} outside graph6 range")
        vals.append(v)
    if vals[0] < 63:
        n, data = vals[0], vals[1:]
    elif len(vals) >= 4 and vals[1] < 63:
        n = vals[1] << 12 | vals[2] << 6 | vals[3]
        data = vals[4:]
    elif len(vals) >= 8 and vals[1] == 63:
        n = 0
        for v in vals[2:8]:
            n = n << 6 | v
        data = vals[8:]
    else:
        raise GraphFormatError("malformed graph6 size prefix")
    nbits = n * (n - 1) // 2
    need = (nbits + 5) // 6
    if len(data) != need:
        raise GraphFormatError(
            f"graph6 body has {len(data)} characters, expected {need} for n={n}"
        )
    adj = [0] * n
    idx = 0
    for val in data:
        for k in range(5, -1, -1):
            bit = val >> k & 1
            if idx < nbits:
                if bit:
                    i, j = _g6_cell(idx, n)
                    adj[i] |= 1 << j
                    adj[j] |= 1 << i
            elif bit:
                raise GraphFormatError("nonzero padding bits in graph6 body")
            idx += 1
    return Graph(n, tuple(adj))


def _g6_cell(idx: int, n: int) -> tuple[int, int]:
    # Column-major upper triangle: columns of length 1, 2, ..., n-1.
    j = 1
    while idx >= j:
        idx -= j
        j += 1
    return idx, j


def parse_edge_list(text: str) -> Graph:
    """Parse the "n m" header plus m "v w" lines convenience format."""
    tokens = text.split()
    if len(tokens) < 2:
        raise GraphFormatError("edge list needs an 'n m' header")
    try:
        n, m = int(tokens[0]), int(tokens[1])
    except ValueError as exc:
        raise GraphFormatError(f"bad edge-list header: {exc}") from None
    body = tokens[2:]
    if len(body) != 2 * m:
        raise GraphFormatError(f"edge list declares {m} edges but has {len(body) // 2}")
    try:
        pairs = [(int(body[2 * i]), int(body[2 * i + 1])) for i in range(m)]
        return make_graph(n, pairs)
    except ValueError as exc:
        raise GraphFormatError(str(exc)) from None


# ---------------------------------------------------------------------------
# Isomorphism-free enumeration of small graphs.
#
# Candidates are produced by one-vertex augmentation, deduplicated with an
# iterated-refinement invariant plus exact backtracking isomorphism tests
# inside invariant buckets.  canonical_bits() additionally exposes the exact
# minimum-bitstring form (same bit order as graph6) for n <= ENUM_MAX_N.
# ---------------------------------------------------------------------------


def _refine(adj: Sequence[int], n: int) -> list[int]:
    """Iterated neighborhood refinement; exact (integer-coded multisets)."""
    tri = []
    for v in range(n):
        av = adj[v]
        tri.append(sum((av & adj[w]).bit_count() for w in bits(av)) // 2)
    ids = _relabel([(adj[v].bit_count() << 10) | tri[v] for v in range(n)])
    while True:
        # neighbor multiset packed as 4-bit counts per color id (n <= 16)
        sig = [
            (ids[v] << 64) | sum(1 << (4 * ids[w]) for w in bits(adj[v]))
            for v in range(n)
        ]
        new = _relabel(sig)
        if new == ids:
            return ids
        ids = new


def _relabel(keys: list[int]) -> list[int]:
    order = {k: i for i, k in enumerate(sorted(set(keys)))}
    return [order[k] for k in keys]


def _signature(adj: Sequence[int], n: int, rounds: int = 3) -> tuple[int, ...]:
    """Label-independent per-vertex content hashes (strong bucket key).

    Unlike the ordinal refinement ids, these carry the actual neighborhood
    structure, so non-isomorphic graphs rarely share a bucket.
    """
    h = []
    for v in range(n):
        av = adj[v]
        tri = sum((av & adj[w]).bit_count() for w in bits(av)) // 2
        h.append(hash((av.bit_count(), tri)))
    for _ in range(rounds):
        h = [hash((h[v], tuple(sorted(h[w] for w in bits(adj[v]))))) for v in range(n)]
    return tuple(sorted(h))


def _invariant(adj: Sequence[int], n: int, colors: list[int]) -> tuple:
    return (
        n,
        sum(a.bit_count() for a in adj) // 2,
        tuple(sorted(colors)),
        _signature(adj, n),
    )


def _isomorphic(a, ca, b, cb, n: int) -> bool:
    """Exact isomorphism test; ca/cb are precomputed refinement colors."""
    hist: dict[int, int] = {}
    for c in ca:
        hist[c] = hist.get(c, 0) + 1
    order = sorted(range(n), key=lambda v: (hist[ca[v]], ca[v], v))
    image = [-1] * n

    def place(k: int, used: int) -> bool:
        if k == n:
            return True
        v = order[k]
        want = 0
        av = a[v]
        for t in range(k):
            if av >> order[t] & 1:
                want |= 1 << image[order[t]]
        cv = ca[v]
        for w in range(n):
            if used >> w & 1 or cb[w] != cv:
                continue
            if b[w] & used != want:
                continue
            image[v] = w
            if place(k + 1, used | (1 << w)):
                return True
        image[v] = -1
        return False

    return place(0, 0)


def canonical_bits(G: Graph) -> tuple[int, ...]:
    """Exact minimum adjacency bitstring over all vertex orderings.

    Returned as one integer per placed vertex (its adjacency column to the
    already-placed prefix).  Brute-force branch and bound; capped at
    ENUM_MAX_N because highly symmetric graphs degenerate to n! leaves.
    """
    n = G.n
    if n > ENUM_MAX_N:
        raise ValueError(f"canonical_bits supports n <= {ENUM_MAX_N}, got {n}")
    if n == 0:
        return ()
    adj = G.adj
    best: list[int] | None = None
    perm: list[int] = []
    cols: list[int] = []

    def extend(used: int) -> None:
        nonlocal best
        k = len(perm)
        if k == n:
            if best is None or cols < best:
                best = cols[:]
            return
        for v in range(n):
            if used >> v & 1:
                continue
            col = 0
            for t, p in enumerate(perm):
                col |= (adj[v] >> p & 1) << (k - 1 - t)
            if best is not None and (cols + [col]) > best[: k + 1]:
                continue
            perm.append(v)
            cols.append(col)
            extend(used | (1 << v))
            perm.pop()
            cols.pop()

    extend(0)
    assert best is not None
    return tuple(best)


def _min_degree_child(parent, n_parent: int, nb: int) -> bool:
    # Keep a candidate only when the new vertex has minimum degree in the
    # child; every class is still reached (delete a min-degree vertex).
    k = nb.bit_count()
    for v in range(n_parent):
        if parent[v].bit_count() + (nb >> v & 1) < k:
            return False
    return True


@lru_cache(maxsize=None)
def _enumerate_masks(n: int) -> tuple[tuple[int, ...], ...]:
    if n == 1:
        return ((0,),)
    parents = _enumerate_masks(n - 1)
    out: list[tuple[int, ...]] = []
    buckets: dict[tuple, list[tuple]] = {}
    newbit = 1 << (n - 1)
    for parent in parents:
        for nb in range(1 << (n - 1)):
            if not _min_degree_child(parent, n - 1, nb):
                continue
            child = tuple(
                (parent[v] | newbit) if nb >> v & 1 else parent[v] for v in range(n - 1)
            ) + (nb,)
            colors = _refine(child, n)
            key = _invariant(child, n, colors)
            bucket = buckets.setdefault(key, [])
            if not any(_isomorphic(child, colors, seen, sc, n) for seen, sc in bucket):
                bucket.append((child, colors))
                out.append(child)
    return tuple(out)


def enumerate_graphs(n: int) -> Iterator[Graph]:
    """One representative per isomorphism class, deterministic order, n <= 8."""
    if not 1 <= n <= ENUM_MAX_N:
        raise ValueError(f"enumerate_graphs supports 1 <= n <= {ENUM_MAX_N}, got {n}")
    for masks in _enumerate_masks(n):
        yield Graph(n, masks)


# ---------------------------------------------------------------------------
# Seeded generation of H-free / R-free members: complete multipartite core,
# random extra edges, then a witness-repair loop that only ever adds edges.
# ---------------------------------------------------------------------------


def random_class_graph(n: int, class_id, seed: int, density: float = 0.5) -> Graph:
    """Random member of the requested class; deterministic for a fixed seed.

    The multipartite core is class-free for both patterns; extra in-part
    edges may create witnesses, which the repair loop destroys by adding an
    edge inside the witness (so termination is guaranteed).
    """
    from . import class_guard

    if n < 1:
        raise ValueError("n must be >= 1")
    cls = class_guard.ClassId(class_id) if not hasattr(class_id, "value") else class_id
    rng = random.Random(seed)
    parts: list[list[int]] = []
    pool = list(range(n))
    rng.shuffle(pool)
    while pool:
        size = min(len(pool), rng.randint(1, max(1, n // 2)))
        parts.append(pool[:size])
        del pool[:size]
    adj = [0] * n
    part_of = [0] * n
    for pid, part in enumerate(parts):
        for v in part:
            part_of[v] = pid
    for v in range(n):
        for w in range(v + 1, n):
            if part_of[v] != part_of[w]:
                adj[v] |= 1 << w
                adj[w] |= 1 << v
    for v in range(n):
        for w in range(v + 1, n):
            if part_of[v] == part_of[w] and rng.random() < density:
                adj[v] |= 1 << w
                adj[w] |= 1 << v

    finder = (
        class_guard.find_H_witness
        if cls is class_guard.ClassId.H_FREE
        else class_guard.find_R_witness
    )
    while True:
        G = Graph(n, tuple(adj))
        wit = finder(G)
        if wit is None:
            return G
        a, b, c, d = wit.vertices
        if wit.pattern == "H":
            other = rng.choice((a, b, c))
            adj[d] |= 1 << other
            adj[other] |= 1 << d
        else:
            adj[c] |= 1 << d
            adj[d] |= 1 << c
