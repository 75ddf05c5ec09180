"""Subgroup intersections, cosets and bases in Droms right-angled Artin groups."""

from .graph_core import (NotDroms, SimpleGraph, build_graph, decomposition_tree, is_droms,
                         parse_graph, primary_decomposition)
from .solver import (IntersectionOutcome, Subgroup, esip, esip_direct, esip_free, make_subgroup,
                     membership, subgroup_basis)
from .words import GroupWord, normal_form, parse_word

__all__ = [
    "GroupWord", "IntersectionOutcome", "NotDroms", "SimpleGraph", "Subgroup", "build_graph",
    "decomposition_tree", "esip", "esip_direct", "esip_free", "is_droms", "make_subgroup",
    "membership", "normal_form", "parse_graph", "parse_word", "primary_decomposition",
    "subgroup_basis",
]
