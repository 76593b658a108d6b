"""Kempe-chain recoloring engine.

The core is a catalog of recoloring schemata, each a guarded move template:
a pattern over the current coloring of the target vertex's neighborhood plus
a short move sequence that frees a color for the target.  Guards are
searched over all role assignments (which neighbor plays which part, in both
orientations of symmetric pairs), candidates are applied to a scratch copy,
and only move sequences that re-verify as proper within budget are
committed.  A bounded breadth-first move search (F) and an exact-solver
fallback (Z) sit behind the catalog; on class inputs with high maximum
degree, Z firing is a theorem-violation alarm, not a normal path.
"""

from __future__ import annotations

import zlib
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .class_guard import ClassId, InducedWitness, is_in_class
from .exact_oracles import (
    UNCOLORED,
    BrooksException,
    Coloring,
    brooks_color,
    is_k_colorable,
    max_clique,
)
from .graph_core import Graph, bits, degree_profile, induced_subgraph

__all__ = [
    "SCHEMA_ORDER",
    "Violation",
    "KempeComponent",
    "ExtensionContext",
    "MoveTrace",
    "BKResult",
    "ExtensionError",
    "InternalVerificationError",
    "coloring_hash",
    "verify_coloring",
    "kempe_component",
    "kempe_swap",
    "neighborhood_palette",
    "build_extension_context",
    "apply_schema",
    "extend_coloring",
    "bk_color",
    "apply_move",
    "trace_to_lines",
]

SCHEMA_ORDER = ("S0", "S1", "S2", "S3", "S4", "S5", "F", "Z")

FALLBACK_DEPTH = 4
FALLBACK_STATE_BUDGET = 20000


class ExtensionError(Exception):
    """No budget-respecting extension exists; carries the exact certificate."""

    def __init__(self, u: int, budget: int, detail: str):
        super().__init__(f"no {budget}-color extension for vertex {u}: {detail}")
        self.u = u
        self.budget = budget
        self.detail = detail


class InternalVerificationError(AssertionError):
    """A committed move sequence failed re-verification: an engine bug."""


@dataclass(frozen=True)
class Violation:
    kind: str  # "uncolored" | "edge_conflict" | "palette"
    vertex: int | None = None
    edge: tuple[int, int] | None = None
    color: int | None = None


@dataclass(frozen=True)
class KempeComponent:
    color_pair: tuple[int, int]
    members: int  # vertex bitmask
    anchor: int


@dataclass(frozen=True)
class ExtensionContext:
    """The proof's cast for one reinsertion step, bound to the live coloring."""

    u: int
    budget: int
    delta: int
    clique: int  # bitmask of a maximum clique of the current graph
    a_labels: dict[int, int]  # color -> lowest-index representative in N(u)
    unique_flags: dict[int, bool]
    repeat_pair: tuple[int, int] | None
    repeat_color: int | None
    outside_vertices: tuple[int, ...]  # repeat-colored vertices outside N[u]

    @property
    def outside_vertex(self) -> int | None:
        return self.outside_vertices[0] if self.outside_vertices else None

    def unique_colors(self) -> list[int]:
        return sorted(c for c, f in self.unique_flags.items() if f)


Move = tuple  # ("assign", v, color) | ("swap", i, j, anchor)


@dataclass(frozen=True)
class MoveTrace:
    schema: str
    moves: tuple[Move, ...]
    pre_hash: int
    step_hashes: tuple[int, ...]

    @property
    def post_hash(self) -> int:
        return self.step_hashes[-1] if self.step_hashes else self.pre_hash


@dataclass(frozen=True)
class BKResult:
    coloring: Coloring
    colors_used: int
    bound: int  # max(omega, delta - 1) of the input
    budget_used: int  # final budget (== bound unless escalation was forced)
    omega: int
    delta: int
    in_class: bool
    witness: InducedWitness | None
    histogram: dict[str, int]
    traces: tuple[MoveTrace, ...]
    base_flags: tuple[BrooksException, ...]


def coloring_hash(colors: Sequence[int]) -> int:
    return zlib.crc32(b"".join(c.to_bytes(2, "big") for c in colors))


# ---------------------------------------------------------------------------
# Soundness gate and elementary moves
# ---------------------------------------------------------------------------


def verify_coloring(G: Graph, c: Coloring | Sequence[int], budget: int) -> list[Violation]:
    """Empty iff the coloring is total, proper, and within budget."""
    colors = c.colors if isinstance(c, Coloring) else tuple(c)
    return _violations(G.adj, colors, budget, G.full_mask)


def _violations(adj, colors, budget: int, alive: int) -> list[Violation]:
    out = []
    for v in bits(alive):
        c = colors[v]
        if c == UNCOLORED:
            out.append(Violation("uncolored", vertex=v))
        elif not 1 <= c <= budget:
            out.append(Violation("palette", vertex=v, color=c))
    for v in bits(alive):
        cv = colors[v]
        if cv == UNCOLORED:
            continue
        higher = adj[v] & alive & ~((1 << (v + 1)) - 1)
        for w in bits(higher):
            if colors[w] == cv:
                out.append(Violation("edge_conflict", edge=(v, w), color=cv))
    return out


def _component_mask(adj, colors, v: int, i: int, j: int) -> int:
    allowed = 0
    for w, cw in enumerate(colors):
        if cw == i or cw == j:
            allowed |= 1 << w
    members = 1 << v
    frontier = members
    while frontier:
        grow = 0
        for w in bits(frontier):
            grow |= adj[w]
        frontier = grow & allowed & ~members
        members |= frontier
    return members


def kempe_component(G: Graph, c: Coloring, v: int, i: int, j: int) -> KempeComponent:
    """Maximal connected set containing v inside the i/j-colored subgraph."""
    if i == j:
        raise ValueError("color pair must be distinct")
    if c.colors[v] not in (i, j):
        raise ValueError(f"vertex {v} is colored {c.colors[v]}, not {i} or {j}")
    return KempeComponent((i, j), _component_mask(G.adj, c.colors, v, i, j), v)


def kempe_swap(G: Graph, c: Coloring, comp: KempeComponent) -> Coloring:
    """Exchange the component's two colors; rejects stale components."""
    i, j = comp.color_pair
    fresh = _component_mask(G.adj, c.colors, comp.anchor, i, j)
    if fresh != comp.members:
        raise ValueError("stale Kempe component: membership is no longer maximal")
    colors = list(c.colors)
    for v in bits(comp.members):
        colors[v] = j if colors[v] == i else i
    return Coloring(tuple(colors), c.k)


@dataclass(frozen=True)
class NeighborhoodPalette:
    counts: dict[int, int]  # color -> multiplicity among colored neighbors
    missing: tuple[int, ...]  # colors 1..budget absent from the closed nbhd
    unique: dict[int, int]  # color -> its single bearer in N(u)


def neighborhood_palette(G: Graph, c: Coloring, u: int) -> NeighborhoodPalette:
    counts: dict[int, int] = {}
    bearer: dict[int, int] = {}
    for w in bits(G.adj[u]):
        cw = c.colors[w]
        if cw == UNCOLORED:
            continue
        counts[cw] = counts.get(cw, 0) + 1
        bearer.setdefault(cw, w)
    closed = set(counts)
    if c.colors[u] != UNCOLORED:
        closed.add(c.colors[u])
    missing = tuple(col for col in range(1, c.k + 1) if col not in closed)
    unique = {col: bearer[col] for col, k in counts.items() if k == 1}
    return NeighborhoodPalette(counts, missing, unique)


def build_extension_context(
    G: Graph,
    c: Coloring,
    u: int,
    T: int,
    clique: int | None = None,
    delta: int | None = None,
    require_full_palette: bool = True,
) -> ExtensionContext:
    """Bind the proof's cast (representatives, repeat pair, outside vertex).

    With the default strict palette check, a color absent from N(u) is an
    error: the extension is then a plain greedy assignment, no cast needed.
    """
    colors = c.colors
    if colors[u] != UNCOLORED:
        raise ValueError(f"target vertex {u} is already colored")
    counts: dict[int, int] = {}
    reps: dict[int, int] = {}
    for w in bits(G.adj[u]):
        cw = colors[w]
        if cw == UNCOLORED:
            continue
        counts[cw] = counts.get(cw, 0) + 1
        reps.setdefault(cw, w)
    if require_full_palette:
        for col in range(1, T + 1):
            if col not in counts:
                raise ValueError(f"color {col} absent from N({u}): extension is greedy")
    unique_flags = {col: counts[col] == 1 for col in counts}
    repeat_colors = [col for col, k in counts.items() if k >= 2]
    repeat_pair = None
    repeat_color = None
    if len(repeat_colors) == 1 and counts[repeat_colors[0]] == 2:
        repeat_color = repeat_colors[0]
        pair = [w for w in bits(G.adj[u]) if colors[w] == repeat_color]
        repeat_pair = (pair[0], pair[1])
    outside: tuple[int, ...] = ()
    if repeat_color is not None:
        closed = G.adj[u] | (1 << u)
        outside = tuple(
            v for v, cv in enumerate(colors) if cv == repeat_color and not closed >> v & 1
        )
    if delta is None:
        delta = G.delta
    if clique is None:
        clique = max_clique(G).members
    return ExtensionContext(
        u=u,
        budget=T,
        delta=delta,
        clique=clique,
        a_labels=reps,
        unique_flags=unique_flags,
        repeat_pair=repeat_pair,
        repeat_color=repeat_color,
        outside_vertices=outside,
    )


# ---------------------------------------------------------------------------
# Schema catalog.  Each generator yields candidate move sequences in a fixed
# deterministic order; _try_moves applies a candidate to scratch state and
# keeps it only if the alive subgraph re-verifies proper within budget.
# ---------------------------------------------------------------------------


def apply_move(G: Graph, colors: list[int], move: Move) -> None:
    """Mutate ``colors`` by one move; swaps recompute their component live."""
    if move[0] == "assign":
        _, v, col = move
        colors[v] = col
    elif move[0] == "swap":
        _, i, j, anchor = move
        if colors[anchor] not in (i, j):
            raise ValueError(f"swap anchor {anchor} is not colored {i} or {j}")
        members = _component_mask(G.adj, colors, anchor, i, j)
        for v in bits(members):
            colors[v] = j if colors[v] == i else i
    else:
        raise ValueError(f"unknown move {move!r}")


def _try_moves(G, colors, alive, T, moves):
    scratch = list(colors)
    for mv in moves:
        apply_move(G, scratch, mv)
    if _violations(G.adj, scratch, T, alive):
        return None
    return scratch


def _class_masks(colors, T: int) -> list[int]:
    masks = [0] * (T + 1)
    for v, c in enumerate(colors):
        if 1 <= c <= T:
            masks[c] |= 1 << v
    return masks


def _gen_S0(G, colors, ctx) -> Iterator[list[Move]]:
    present = {colors[w] for w in bits(G.adj[ctx.u])}
    for col in range(1, ctx.budget + 1):
        if col not in present:
            yield [("assign", ctx.u, col)]
            return


def _gen_S1(G, colors, ctx) -> Iterator[list[Move]]:
    # unique representative whose closed neighborhood misses a color:
    # recolor it there, hand its color to u.
    adj = G.adj
    for i in ctx.unique_colors():
        A = ctx.a_labels[i]
        present = {colors[w] for w in bits(adj[A])}
        present.add(i)
        for r in range(1, ctx.budget + 1):
            if r not in present:
                yield [("assign", A, r), ("assign", ctx.u, i)]


def _gen_S2(G, colors, ctx) -> Iterator[list[Move]]:
    # non-adjacent unique pair whose Kempe component separates: swap the
    # component of one representative, freeing its color at u.
    adj = G.adj
    uniq = ctx.unique_colors()
    for r in uniq:
        Ar = ctx.a_labels[r]
        for s in uniq:
            if s == r:
                continue
            As = ctx.a_labels[s]
            if adj[Ar] >> As & 1:
                continue
            members = _component_mask(adj, colors, Ar, r, s)
            if not members >> As & 1:
                yield [("swap", r, s, Ar), ("assign", ctx.u, r)]


def _gen_S3(G, colors, ctx) -> Iterator[list[Move]]:
    # Kempe path patterns between non-adjacent unique representatives.
    adj = G.adj
    uniq = ctx.unique_colors()
    masks = _class_masks(colors, ctx.budget)
    u = ctx.u
    for r in uniq:
        Ar = ctx.a_labels[r]
        for s in uniq:
            if s == r:
                continue
            As = ctx.a_labels[s]
            if adj[Ar] >> As & 1:
                continue
            # interior repair: the path's second vertex takes a color its
            # closed neighborhood misses, the representative slides over.
            sn = adj[Ar] & masks[s]
            if sn.bit_count() == 1:
                B = sn.bit_length() - 1
                presentB = {colors[w] for w in bits(adj[B])}
                presentB.add(s)
                for t in range(1, ctx.budget + 1):
                    if t not in presentB:
                        yield [("assign", B, t), ("assign", Ar, s), ("assign", u, r)]
            # triple rotation through a mutual unique neighbor.
            for j in uniq:
                if j == r or j == s:
                    continue
                Aj = ctx.a_labels[j]
                if not (adj[Aj] >> Ar & 1 and adj[Aj] >> As & 1):
                    continue
                if adj[Aj] & masks[r] & ~(1 << Ar):
                    continue
                if adj[Ar] & masks[j] & ~(1 << Aj):
                    continue
                if adj[As] & masks[j] & ~(1 << Aj):
                    continue
                yield [
                    ("assign", Aj, r),
                    ("assign", Ar, j),
                    ("assign", As, j),
                    ("assign", u, s),
                ]


def _repeat_orders(ctx) -> list[tuple[int, int]]:
    X, Y = ctx.repeat_pair
    return [(X, Y), (Y, X)]


def _gen_S4(G, colors, ctx) -> Iterator[list[Move]]:
    # repeat-pair endgame: rotate a unique representative onto the repeat
    # color through one member of the pair.
    if ctx.repeat_pair is None:
        return
    adj = G.adj
    rho = ctx.repeat_color
    uniq = ctx.unique_colors()
    masks = _class_masks(colors, ctx.budget)
    u = ctx.u
    for X, _Y in _repeat_orders(ctx):
        for i in uniq:
            Ai = ctx.a_labels[i]
            if adj[X] >> Ai & 1:
                continue
            for m in uniq:
                if m == i:
                    continue
                Am = ctx.a_labels[m]
                if not adj[X] >> Am & 1:
                    continue
                if adj[X] & masks[m] & ~(1 << Am):
                    continue
                if adj[Ai] & masks[m] & ~(1 << Am):
                    continue
                if not adj[Am] & masks[rho] & ~(1 << X):
                    yield [
                        ("assign", Am, rho),
                        ("assign", X, m),
                        ("assign", Ai, m),
                        ("assign", u, i),
                    ]
                # longer variant routed through a second representative
                for l in uniq:
                    if l in (i, m):
                        continue
                    Al = ctx.a_labels[l]
                    if not adj[X] >> Al & 1:
                        continue
                    if adj[Al] & masks[rho] & ~(1 << X):
                        continue
                    if adj[Am] & masks[l] & ~(1 << Al):
                        continue
                    yield [
                        ("assign", Am, l),
                        ("assign", Al, rho),
                        ("assign", X, m),
                        ("assign", Ai, m),
                        ("assign", u, i),
                    ]


def _gen_S5(G, colors, ctx) -> Iterator[list[Move]]:
    """Repeat-pair endgames that route through missing colors on the pair
    itself or through a repeat-colored vertex outside the neighborhood."""
    if ctx.repeat_pair is None:
        return
    adj = G.adj
    rho = ctx.repeat_color
    uniq = ctx.unique_colors()
    masks = _class_masks(colors, ctx.budget)
    u = ctx.u

    def missing_closed(v: int) -> list[int]:
        present = {colors[w] for w in bits(adj[v])}
        present.add(colors[v])
        return [t for t in range(1, ctx.budget + 1) if t not in present]

    orders = _repeat_orders(ctx)

    def clear(v: int, col: int, keep: int) -> bool:
        # v may take col once the vertices in ``keep`` leave that class
        return not adj[v] & masks[col] & ~keep

    # (a) rotate through a representative adjacent to X only
    for X, _Y in orders:
        for i in uniq:
            Ai = ctx.a_labels[i]
            if adj[Ai] & masks[rho] & ~(1 << X):
                continue
            for j in uniq:
                if j == i:
                    continue
                Aj = ctx.a_labels[j]
                if adj[X] >> Aj & 1:
                    continue
                for m in uniq:
                    if m in (i, j):
                        continue
                    Am = ctx.a_labels[m]
                    if not adj[X] >> Am & 1:
                        continue
                    if not clear(Am, j, 1 << Aj):
                        continue
                    if not clear(X, m, 1 << Am):
                        continue
                    if not clear(Aj, m, 1 << Am):
                        continue
                    yield [
                        ("assign", Am, j),
                        ("assign", X, m),
                        ("assign", Aj, m),
                        ("assign", Ai, rho),
                        ("assign", u, i),
                    ]

    # (b) both pair members have a spare color: recolor both, u takes rho
    for X, Y in orders[:1]:
        mx = missing_closed(X)
        my = missing_closed(Y)
        if mx and my:
            yield [("assign", X, mx[0]), ("assign", Y, my[0]), ("assign", u, rho)]

    # (c) X has a spare color and an outside vertex Z hands its color over
    for X, _Y in orders:
        mx = missing_closed(X)
        if not mx:
            continue
        r = mx[0]
        for Z in ctx.outside_vertices:
            for m in uniq:
                Am = ctx.a_labels[m]
                if not clear(Z, m, 1 << Am):
                    continue
                if adj[Am] & masks[rho] & ~(1 << X) & ~(1 << Z):
                    continue
                yield [
                    ("assign", X, r),
                    ("assign", Z, m),
                    ("assign", Am, rho),
                    ("assign", u, m),
                ]

    # (d) X spare + swap a unique pair around Y, u takes rho
    for X, Y in orders:
        mx = missing_closed(X)
        if not mx:
            continue
        r = mx[0]
        for s in uniq:
            As = ctx.a_labels[s]
            if not clear(Y, s, 1 << As):
                continue
            for t in uniq:
                if t == s:
                    continue
                At = ctx.a_labels[t]
                if adj[Y] >> At & 1:
                    continue
                if not clear(As, t, 1 << At):
                    continue
                if not clear(At, s, 1 << As):
                    continue
                yield [
                    ("assign", X, r),
                    ("assign", As, t),
                    ("assign", At, s),
                    ("assign", Y, s),
                    ("assign", u, rho),
                ]

    # (e) three-representative rotation feeding an outside vertex, in two
    # forms: Z inherits a unique color, or Z moves to its own spare color.
    for X, _Y in orders:
        for Z in ctx.outside_vertices:
            mz = missing_closed(Z)
            for i in uniq:
                Ai = ctx.a_labels[i]
                if adj[Ai] & masks[rho] & ~(1 << X) & ~(1 << Z):
                    continue
                z_takes_i = clear(Z, i, 1 << Ai)
                for j in uniq:
                    if j == i:
                        continue
                    Aj = ctx.a_labels[j]
                    if adj[X] >> Aj & 1:
                        continue
                    for m in uniq:
                        if m in (i, j):
                            continue
                        Am = ctx.a_labels[m]
                        if not clear(Am, j, 1 << Aj):
                            continue
                        if not clear(Aj, m, 1 << Am):
                            continue
                        if not clear(X, m, 1 << Am):
                            continue
                        rotation = [
                            ("assign", Am, j),
                            ("assign", Aj, m),
                            ("assign", X, m),
                            ("assign", Ai, rho),
                        ]
                        if z_takes_i:
                            yield rotation + [("assign", Z, i), ("assign", u, i)]
                        if mz:
                            yield [("assign", Z, mz[0])] + rotation + [("assign", u, i)]

    # (f) pull a second representative onto rho via Z
    for X, _Y in orders:
        for j in uniq:
            Aj = ctx.a_labels[j]
            if adj[X] >> Aj & 1:
                continue
            for m in uniq:
                if m == j:
                    continue
                Am = ctx.a_labels[m]
                if not clear(X, m, 1 << Am):
                    continue
                if not clear(Am, j, 1 << Aj):
                    continue
                if not clear(Aj, m, 1 << Am):
                    continue
                for p in uniq:
                    if p in (j, m):
                        continue
                    Ap = ctx.a_labels[p]
                    for Z in ctx.outside_vertices:
                        if adj[Ap] & masks[rho] & ~(1 << X) & ~(1 << Z):
                            continue
                        if not clear(Z, p, 1 << Ap):
                            continue
                        yield [
                            ("assign", X, m),
                            ("assign", Am, j),
                            ("assign", Aj, m),
                            ("assign", Ap, rho),
                            ("assign", Z, p),
                            ("assign", u, p),
                        ]

    # (g) rotations around both pair members at once, u takes rho
    for X, Y in orders:
        for i in uniq:
            Ai = ctx.a_labels[i]
            if adj[Y] >> Ai & 1:
                continue
            for j in uniq:
                if j == i:
                    continue
                Aj = ctx.a_labels[j]
                if adj[X] >> Aj & 1:
                    continue
                for m in uniq:
                    if m in (i, j):
                        continue
                    Am = ctx.a_labels[m]
                    if not clear(Am, i, 1 << Ai):
                        continue
                    if not clear(Ai, j, 1 << Aj):
                        continue
                    if not clear(Aj, m, 1 << Am):
                        continue
                    if not clear(X, m, 1 << Am):
                        continue
                    if not clear(Y, j, 1 << Aj):
                        continue
                    yield [
                        ("assign", Ai, j),
                        ("assign", Aj, m),
                        ("assign", Am, i),
                        ("assign", X, m),
                        ("assign", Y, j),
                        ("assign", u, rho),
                    ]
            # two disjoint transpositions, one per pair member
            for m in uniq:
                if m == i:
                    continue
                Am = ctx.a_labels[m]
                if not clear(Am, i, 1 << Ai):
                    continue
                if not clear(Ai, m, 1 << Am):
                    continue
                if not clear(Y, m, 1 << Am):
                    continue
                for j in uniq:
                    if j in (i, m):
                        continue
                    Aj = ctx.a_labels[j]
                    if adj[X] >> Aj & 1:
                        continue
                    for p in uniq:
                        if p in (i, m, j):
                            continue
                        Ap = ctx.a_labels[p]
                        if not clear(Ap, j, 1 << Aj):
                            continue
                        if not clear(Aj, p, 1 << Ap):
                            continue
                        if not clear(X, p, 1 << Ap):
                            continue
                        yield [
                            ("assign", Am, i),
                            ("assign", Ai, m),
                            ("assign", Y, m),
                            ("assign", Ap, j),
                            ("assign", Aj, p),
                            ("assign", X, p),
                            ("assign", u, rho),
                        ]


def _gen_F(G, colors, ctx, alive: int, state_budget: int) -> list[Move] | None:
    """Bounded breadth-first search over proper recolors and Kempe swaps
    anchored near u; returns a full move list ending in the u-assignment."""
    adj = G.adj
    u, T = ctx.u, ctx.budget
    near = adj[u]
    for w in bits(adj[u]):
        near |= adj[w]
    anchors = sorted(bits(near & alive & ~(1 << u)))
    start = tuple(colors)
    seen = {start}
    queue: deque[tuple[tuple[int, ...], tuple[Move, ...]]] = deque([(start, ())])
    explored = 0

    def u_color(state) -> int | None:
        present = {state[w] for w in bits(adj[u])}
        for col in range(1, T + 1):
            if col not in present:
                return col
        return None

    while queue:
        state, moves = queue.popleft()
        if len(moves) >= FALLBACK_DEPTH:
            continue
        for v in anchors:
            cv = state[v]
            nbr_cols = {state[w] for w in bits(adj[v])}
            for t in range(1, T + 1):
                if t == cv:
                    continue
                candidates: list[Move] = []
                if t not in nbr_cols:
                    candidates.append(("assign", v, t))
                candidates.append(("swap", cv, t, v))
                for mv in candidates:
                    nxt = list(state)
                    apply_move(G, nxt, mv)
                    tup = tuple(nxt)
                    if tup in seen:
                        continue
                    seen.add(tup)
                    explored += 1
                    if explored > state_budget:
                        return None
                    col = u_color(tup)
                    if col is not None:
                        return list(moves) + [mv, ("assign", u, col)]
                    queue.append((tup, moves + (mv,)))
    return None


_SCHEMA_GENERATORS = {
    "S1": _gen_S1,
    "S2": _gen_S2,
    "S3": _gen_S3,
    "S4": _gen_S4,
    "S5": _gen_S5,
}


def apply_schema(
    G: Graph, c: Coloring, ctx: ExtensionContext, schema: str
) -> tuple[Coloring, MoveTrace] | None:
    """Try one schema against the live coloring; None if no pattern matches."""
    colors = list(c.colors)
    alive = _alive_mask(colors, ctx.u, G)
    result = _run_schema(G, colors, ctx, schema, alive)
    if result is None:
        return None
    new_colors, trace = result
    return Coloring(tuple(new_colors), c.k), trace


def _alive_mask(colors, u: int, G: Graph) -> int:
    alive = 1 << u
    for v, cv in enumerate(colors):
        if cv != UNCOLORED:
            alive |= 1 << v
    return alive


def _run_schema(G, colors, ctx, schema: str, alive: int):
    T = ctx.budget
    if schema == "S0":
        gen: Iterable[list[Move]] = _gen_S0(G, colors, ctx)
    elif schema in _SCHEMA_GENERATORS:
        gen = _SCHEMA_GENERATORS[schema](G, colors, ctx)
    elif schema == "F":
        moves = _gen_F(G, colors, ctx, alive, FALLBACK_STATE_BUDGET)
        gen = [moves] if moves is not None else []
    elif schema == "Z":
        moves = _gen_Z(G, colors, ctx, alive)
        gen = [moves] if moves is not None else []
    else:
        raise ValueError(f"unknown schema {schema!r}")
    for candidate in gen:
        final = _try_moves(G, colors, alive, T, candidate)
        if final is not None:
            trace = _make_trace(G, schema, colors, candidate)
            return final, trace
    return None


def _gen_Z(G, colors, ctx, alive: int) -> list[Move] | None:
    sub, remap = induced_subgraph(G, alive)
    sol = is_k_colorable(sub, ctx.budget, time_cap_s=None)
    if sol is None:
        return None
    back = {i: v for v, i in remap.items()}
    return [("assign", back[i], col) for i, col in enumerate(sol.colors)]


def _make_trace(G, schema: str, colors, moves) -> MoveTrace:
    scratch = list(colors)
    pre = coloring_hash(scratch)
    steps = []
    for mv in moves:
        apply_move(G, scratch, mv)
        steps.append(coloring_hash(scratch))
    return MoveTrace(schema, tuple(moves), pre, tuple(steps))


# ---------------------------------------------------------------------------
# Single-vertex extension and the peel-and-reinsert driver
# ---------------------------------------------------------------------------


def extend_coloring(
    G: Graph,
    u: int,
    c: Coloring,
    T: int,
    clique: int | None = None,
    delta: int | None = None,
) -> tuple[Coloring, MoveTrace]:
    """Extend a proper coloring of G-u to all of G within T colors.

    Tries the schema catalog in order, then the bounded move search, then
    the exact solver; raises ExtensionError with the exact certificate when
    no T-coloring of the current graph exists at all.
    """
    colors = list(c.colors)
    alive = _alive_mask(colors, u, G)
    new_colors, trace = _extend(G, colors, alive, u, T, clique, delta)
    return Coloring(tuple(new_colors), c.k), trace


def _extend(G, colors, alive, u, T, clique=None, delta=None):
    present = {colors[w] for w in bits(G.adj[u] & alive)} - {UNCOLORED}
    missing = [col for col in range(1, T + 1) if col not in present]
    if missing:
        moves = [("assign", u, missing[0])]
        final = _try_moves(G, colors, alive, T, moves)
        if final is None:
            raise InternalVerificationError("greedy assignment failed verification")
        return final, _make_trace(G, "S0", colors, moves)
    ctx = build_extension_context(
        G, Coloring(tuple(colors), T), u, T, clique=clique, delta=delta
    )
    for schema in ("S1", "S2", "S3", "S4", "S5", "F", "Z"):
        result = _run_schema(G, colors, ctx, schema, alive)
        if result is not None:
            return result
    raise ExtensionError(u, T, "exact solver found no coloring of the current graph")


def bk_color(G: Graph, class_id: ClassId) -> BKResult:
    """Peel-and-reinsert colorer targeting max(omega, delta-1) colors.

    On class inputs with delta >= 9 the budget holds by the two main
    theorems; off-class inputs are still colored (escalating the budget if
    the exact fallback certifies the target is infeasible).
    """
    degs, delta = degree_profile(G)
    if G.n == 0:
        return BKResult(
            Coloring((), 0), 0, 0, 0, 0, 0, True, None, {}, (), ()
        )
    cq = max_clique(G)
    omega = cq.size
    bound = max(omega, delta - 1)
    in_class, witness = is_in_class(G, class_id)

    budget = bound
    while True:
        try:
            coloring, traces, flags = _pipeline(G, budget, omega, delta)
            break
        except ExtensionError:
            budget += 1

    colors_used = coloring.max_color()
    leftover = verify_coloring(G, coloring, max(colors_used, budget))
    if leftover:
        raise InternalVerificationError(f"final coloring invalid: {leftover[:3]}")
    histogram: dict[str, int] = {}
    for tr in traces:
        if tr.schema in SCHEMA_ORDER:
            histogram[tr.schema] = histogram.get(tr.schema, 0) + 1
    return BKResult(
        coloring=coloring,
        colors_used=colors_used,
        bound=bound,
        budget_used=budget,
        omega=omega,
        delta=delta,
        in_class=in_class,
        witness=witness,
        histogram=histogram,
        traces=tuple(traces),
        base_flags=flags,
    )


def _pipeline(G, T, omega, delta):
    traces: list[MoveTrace] = []
    colors = [UNCOLORED] * G.n

    if omega >= delta:
        base, flags = brooks_color(G)
        colors = list(base.colors)
        traces.append(_base_trace(colors))
        return Coloring(tuple(colors), max(T, base.max_color())), traces, flags

    alive = G.full_mask
    stack: list[tuple[int, int]] = []  # (vertex, clique mask at peel time)
    while True:
        deg_alive = {v: (G.adj[v] & alive).bit_count() for v in bits(alive)}
        cur_delta = max(deg_alive.values(), default=0)
        if cur_delta < 9 or _mask_complete(G, alive):
            break
        sub, remap = induced_subgraph(G, alive)
        cl = max_clique(sub)
        back = {i: v for v, i in remap.items()}
        clique_mask = 0
        for i in bits(cl.members):
            clique_mask |= 1 << back[i]
        u = max(bits(clique_mask), key=lambda v: (deg_alive[v], -v))
        stack.append((u, clique_mask))
        alive &= ~(1 << u)

    sub, remap = induced_subgraph(G, alive)
    base, flags = brooks_color(sub)
    back = {i: v for v, i in remap.items()}
    for i, col in enumerate(base.colors):
        colors[back[i]] = col
    traces.append(_base_trace(colors))

    for u, clique_mask in reversed(stack):
        alive |= 1 << u
        colors, trace = _extend(G, colors, alive, u, T, clique_mask, delta)
        traces.append(trace)

    return Coloring(tuple(colors), T), traces, flags


def _mask_complete(G, alive: int) -> bool:
    k = alive.bit_count()
    return all((G.adj[v] & alive).bit_count() == k - 1 for v in bits(alive))


def _base_trace(colors) -> MoveTrace:
    moves = tuple(
        ("assign", v, col) for v, col in enumerate(colors) if col != UNCOLORED
    )
    zero = [UNCOLORED] * len(colors)
    pre = coloring_hash(zero)
    steps = []
    for mv in moves:
        zero[mv[1]] = mv[2]
        steps.append(coloring_hash(zero))
    return MoveTrace("BASE", moves, pre, tuple(steps))


# ---------------------------------------------------------------------------
# Trace text form: `schema <id>` then one `assign v c` / `swap i j anchor`
# per line.  Replay applies the lines to a coloring state; swaps recompute
# their component from the live state, which is what makes traces portable.
# ---------------------------------------------------------------------------


def trace_to_lines(trace: MoveTrace) -> list[str]:
    out = [f"schema {trace.schema}"]
    for mv in trace.moves:
        if mv[0] == "assign":
            out.append(f"assign {mv[1]} {mv[2]}")
        else:
            out.append(f"swap {mv[1]} {mv[2]} {mv[3]}")
    return out


def parse_move_line(line: str) -> Move:
    parts = line.split()
    if parts[0] == "assign" and len(parts) == 3:
        return ("assign", int(parts[1]), int(parts[2]))
    if parts[0] == "swap" and len(parts) == 4:
        return ("swap", int(parts[1]), int(parts[2]), int(parts[3]))
    raise ValueError(f"bad move line: {line!r}")


def replay_trace(G: Graph, trace: MoveTrace, start: Sequence[int]) -> tuple[int, ...]:
    """Re-execute a trace from a starting coloring; verifies step hashes."""
    colors = list(start)
    if coloring_hash(colors) != trace.pre_hash:
        raise ValueError("starting coloring does not match the trace pre-hash")
    for mv, expect in zip(trace.moves, trace.step_hashes):
        apply_move(G, colors, mv)
        if coloring_hash(colors) != expect:
            raise ValueError(f"replay diverged at move {mv!r}")
    return tuple(colors)
