"""Coloring engine and verification harness for the max(omega, Delta-1)
bound on P3+K1-free and K2+2K1-free graphs."""

from .class_guard import ClassId, InducedWitness, find_H_witness, find_R_witness, is_in_class
from .exact_oracles import (
    Coloring,
    CliqueResult,
    OracleTimeout,
    brooks_color,
    chromatic_number,
    greedy_color,
    is_k_colorable,
    max_clique,
)
from .graph_core import (
    Graph,
    delete_vertex,
    degree_profile,
    emit_graph6,
    enumerate_graphs,
    induced_subgraph,
    make_graph,
    neighbors,
    parse_graph6,
    random_class_graph,
)
from .recolor_engine import (
    BKResult,
    ExtensionContext,
    KempeComponent,
    MoveTrace,
    apply_schema,
    bk_color,
    build_extension_context,
    extend_coloring,
    kempe_component,
    kempe_swap,
    neighborhood_palette,
    verify_coloring,
)

__all__ = [
    "ClassId",
    "InducedWitness",
    "find_H_witness",
    "find_R_witness",
    "is_in_class",
    "Coloring",
    "CliqueResult",
    "OracleTimeout",
    "brooks_color",
    "chromatic_number",
    "greedy_color",
    "is_k_colorable",
    "max_clique",
    "Graph",
    "delete_vertex",
    "degree_profile",
    "emit_graph6",
    "enumerate_graphs",
    "induced_subgraph",
    "make_graph",
    "neighbors",
    "parse_graph6",
    "random_class_graph",
    "BKResult",
    "ExtensionContext",
    "KempeComponent",
    "MoveTrace",
    "apply_schema",
    "bk_color",
    "build_extension_context",
    "extend_coloring",
    "kempe_component",
    "kempe_swap",
    "neighborhood_palette",
    "verify_coloring",
]
