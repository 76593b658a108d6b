from __future__ import annotations

import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from bkcolor.graph_core import Graph, make_graph


def cycle(n: int) -> Graph:
    return make_graph(n, [(i, (i + 1) % n) for i in range(n)])


def complete(n: int) -> Graph:
    return make_graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def path(n: int) -> Graph:
    return make_graph(n, [(i, i + 1) for i in range(n - 1)])


def petersen() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    spokes = [(i, 5 + i) for i in range(5)]
    return make_graph(10, outer + inner + spokes)


def complete_multipartite(parts: list[int]) -> Graph:
    n = sum(parts)
    part_of = []
    for pid, size in enumerate(parts):
        part_of.extend([pid] * size)
    return make_graph(
        n,
        [
            (v, w)
            for v in range(n)
            for w in range(v + 1, n)
            if part_of[v] != part_of[w]
        ],
    )


@pytest.fixture(scope="session")
def corpus_cache_dir():
    d = os.path.join(os.path.dirname(__file__), "_corpus_cache")
    os.makedirs(d, exist_ok=True)
    return d
