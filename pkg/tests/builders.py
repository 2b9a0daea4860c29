"""Small constructors shared by the test modules."""

import itertools
from typing import Dict, Sequence, Tuple

from fibra.services.algebra import FiniteAlgebra, GroupStructure
from fibra.services.bundle import BaseSpace, BundleAtlas, single_chart_atlas, validate_atlas
from fibra.services.representation import FiberedGroup, make_fibered_group
from fibra.utils.permutations import compose, inverse

POINTS = ("p", "q")


def chain_base(charts: int) -> BaseSpace:
    """Charts U_i = {x_i, x_(i+1)}: consecutive charts overlap, no triple overlaps."""
    points = tuple(f"x{i}" for i in range(charts + 1))
    return BaseSpace(
        points, tuple((f"U{i}", frozenset(points[i : i + 2])) for i in range(charts))
    )


def cycle_base() -> BaseSpace:
    """Three charts around a circle with pairwise single-point overlaps."""
    return BaseSpace(
        ("a", "b", "c"),
        (
            ("U0", frozenset({"a", "b"})),
            ("U1", frozenset({"b", "c"})),
            ("U2", frozenset({"c", "a"})),
        ),
    )


def cycle_atlas(size: int, t01, t12, t20) -> BundleAtlas:
    return validate_atlas(
        cycle_base(), size, {("U0", "U1"): t01, ("U1", "U2"): t12, ("U2", "U0"): t20}
    )


def chain_atlas(size: int, edge_maps: Sequence[Sequence[int]]) -> BundleAtlas:
    """One transition per consecutive chart pair of a chain with len(edge_maps) + 1 charts."""
    base = chain_base(len(edge_maps) + 1)
    transitions = {(f"U{i}", f"U{i + 1}"): m for i, m in enumerate(edge_maps)}
    return validate_atlas(base, size, transitions)


def gauge_atlas(base: BaseSpace, size: int, gauges: Dict[str, Sequence[int]]) -> BundleAtlas:
    """Transitions t(a -> b) = g_b . g_a^-1, which always satisfy the cocycle law."""
    transitions = {}
    for a, b in itertools.product(base.chart_names, repeat=2):
        if a != b and base.overlap(a, b):
            transitions[(a, b)] = compose(gauges[b], inverse(gauges[a]))
    return validate_atlas(base, size, transitions)


def fibered_group(structure: GroupStructure, points: Tuple[str, ...] = POINTS) -> FiberedGroup:
    return make_fibered_group(single_chart_atlas(points, structure.order), structure)


def plain_bundle(size: int, points: Tuple[str, ...] = POINTS) -> BundleAtlas:
    return single_chart_atlas(points, size)


def non_automorphism(alg: FiniteAlgebra, automorphisms) -> Tuple[int, ...]:
    """First bijection of the carrier (lexicographically) that is not an automorphism."""
    for perm in itertools.permutations(range(alg.size)):
        if perm not in automorphisms:
            return perm
    raise ValueError("every bijection is an automorphism")
