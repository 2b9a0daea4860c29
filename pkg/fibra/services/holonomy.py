"""Holonomy of an atlas computed on the nerve of its chart cover.

Transitions are constant on each overlap, so the finest loops the data can
see are closed walks in the nerve graph (one vertex per chart, one edge per
overlapping pair). A two-chart circle whose overlap has two components is
therefore flat here; model circles with at least three charts in a cycle.

The holonomy group at a base chart is generated by one loop per nerve edge
outside a breadth-first spanning tree. Neighbours are visited in cover order.
"""

import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from sympy.combinatorics import Permutation, PermutationGroup

from fibra.services.algebra import FiniteAlgebra, is_automorphism
from fibra.services.bundle import BundleAtlas
from fibra.services.errors import (
    CapExceeded,
    NerveDisconnected,
    NonOverlappingStep,
    NotALoop,
    SizeMismatch,
)
from fibra.services.fibered_algebra import FiberedAlgebra
from fibra.utils.permutations import Perm, compose, identity

logger = logging.getLogger(__name__)

DEFAULT_GROUP_CAP = 10000

HOLONOMIC = "holonomic"
ANHOLONOMIC = "anholonomic"


@dataclass(frozen=True)
class ChartLoop:
    """Closed walk ``c0, c1, ..., ck = c0`` in the nerve; fewer than two charts is empty."""

    charts: Tuple[str, ...] = ()

    def __post_init__(self):
        charts = tuple(str(c) for c in self.charts)
        object.__setattr__(self, "charts", charts)
        if len(charts) > 1 and charts[0] != charts[-1]:
            raise NotALoop(
                f"Loop starts at '{charts[0]}' but ends at '{charts[-1]}'",
                {"charts": list(charts)},
            )

    @property
    def is_empty(self) -> bool:
        return len(self.charts) <= 1

    @property
    def steps(self) -> List[Tuple[str, str]]:
        return list(zip(self.charts, self.charts[1:]))

    def then(self, other: "ChartLoop") -> "ChartLoop":
        """Walk this loop, then ``other`` (which must start where this one does)."""
        if self.is_empty:
            return other
        if other.is_empty:
            return self
        if other.charts[0] != self.charts[-1]:
            raise NotALoop(
                "Loops do not share a base chart",
                {"first": list(self.charts), "second": list(other.charts)},
            )
        return ChartLoop(self.charts + other.charts[1:])


def loop_transport(atlas: BundleAtlas, loop: ChartLoop) -> Perm:
    """Compose the transitions along ``loop``; the empty loop transports by the identity."""
    result = identity(atlas.fiber_size)
    for a, b in loop.steps:
        if not atlas.base.overlap(a, b):
            raise NonOverlappingStep(
                f"Charts '{a}' and '{b}' do not overlap", {"from": a, "to": b}
            )
        result = compose(atlas.transition(a, b), result)
    return result


@dataclass(frozen=True)
class HolonomyReport:
    """Holonomy group at a base chart and, once classified, its verdict."""

    base_chart: str
    generator_loops: Tuple[ChartLoop, ...]
    generators: Tuple[Perm, ...]
    elements: Tuple[Perm, ...]
    verdict: Optional[str] = None
    witness: Dict[str, Any] = field(default_factory=dict)

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def is_trivial(self) -> bool:
        return self.order == 1

    def to_dict(self) -> Dict[str, Any]:
        return {
            "base_chart": self.base_chart,
            "generator_loops": [list(loop.charts) for loop in self.generator_loops],
            "generators": [list(g) for g in self.generators],
            "order": self.order,
            "elements": [list(e) for e in self.elements],
            "verdict": self.verdict,
            "witness": self.witness,
        }


def _spanning_tree(atlas: BundleAtlas, base_chart: str) -> Dict[str, Tuple[str, ...]]:
    """Breadth-first tree paths from ``base_chart`` to every chart."""
    base = atlas.base
    base.chart_index(base_chart)
    paths = {base_chart: (base_chart,)}
    queue = deque([base_chart])
    while queue:
        current = queue.popleft()
        for neighbour in base.chart_names:
            if neighbour in paths or not base.overlap(current, neighbour):
                continue
            paths[neighbour] = paths[current] + (neighbour,)
            queue.append(neighbour)
    unreached = [c for c in base.chart_names if c not in paths]
    if unreached:
        raise NerveDisconnected(
            f"Charts {unreached} cannot be reached from '{base_chart}'",
            {"base_chart": base_chart, "unreached": unreached},
        )
    return paths


def _closure(generators: List[Perm], n: int, cap: int) -> Tuple[Perm, ...]:
    perms = [Permutation(list(g)) for g in generators] or [Permutation(list(identity(n)))]
    group = PermutationGroup(*perms)
    order = int(group.order())
    if order > cap:
        raise CapExceeded(
            f"Holonomy group of order {order} exceeds the cap of {cap}",
            {"order": order, "cap": cap},
        )
    return tuple(sorted(tuple(int(v) for v in p.array_form) for p in group.generate()))


def holonomy_group(
    atlas: BundleAtlas, base_chart: Optional[str] = None, cap: int = DEFAULT_GROUP_CAP
) -> HolonomyReport:
    """Generate the holonomy group at ``base_chart`` (the first chart by default).

    Raises:
        NerveDisconnected: some chart cannot be reached through overlaps
        CapExceeded: the generated group is larger than ``cap``
    """
    base_chart = base_chart or atlas.base.chart_names[0]
    paths = _spanning_tree(atlas, base_chart)
    tree_edges = {frozenset(p[-2:]) for p in paths.values() if len(p) > 1}

    loops = []
    for a, b in atlas.overlapping_pairs():
        if atlas.base.chart_index(a) > atlas.base.chart_index(b):
            continue
        if frozenset((a, b)) in tree_edges:
            continue
        loops.append(ChartLoop(paths[a] + tuple(reversed(paths[b]))))

    generators = [loop_transport(atlas, loop) for loop in loops]
    elements = _closure(generators, atlas.fiber_size, cap)
    logger.info(
        f"Holonomy at '{base_chart}': {len(loops)} generator loops, group of order {len(elements)}"
    )
    return HolonomyReport(base_chart, tuple(loops), tuple(generators), elements)


def classify_holonomic(
    atlas: BundleAtlas,
    fiber: FiniteAlgebra,
    base_chart: Optional[str] = None,
    cap: int = DEFAULT_GROUP_CAP,
) -> HolonomyReport:
    """Decide whether parallel transport around every loop preserves the fiber algebra.

    The atlas is not required to form a valid fibered algebra with ``fiber``;
    a validated one is holonomic by construction.
    """
    if atlas.fiber_size != fiber.size:
        raise SizeMismatch(
            f"Fiber algebra has {fiber.size} elements, atlas fiber has {atlas.fiber_size}",
            {"fiber": fiber.size, "atlas": atlas.fiber_size},
        )
    report = holonomy_group(atlas, base_chart, cap)
    # Automorphisms form a group, so checking the generators covers the closure.
    for loop, generator in zip(report.generator_loops, report.generators):
        if not is_automorphism(fiber, generator):
            logger.warning(f"Loop {list(loop.charts)} transports by a non-automorphism")
            witness = {"loop": list(loop.charts), "permutation": list(generator)}
            return HolonomyReport(
                report.base_chart,
                report.generator_loops,
                report.generators,
                report.elements,
                ANHOLONOMIC,
                witness,
            )
    return HolonomyReport(
        report.base_chart, report.generator_loops, report.generators, report.elements, HOLONOMIC
    )


def classify_fibered_algebra(
    fa: FiberedAlgebra, base_chart: Optional[str] = None, cap: int = DEFAULT_GROUP_CAP
) -> HolonomyReport:
    """Classify a validated fibered algebra.

    Args:
        fa: Fibered algebra; its transitions are already automorphisms
        base_chart: Chart the loops start at (the first chart by default)
        cap: Largest holonomy group order to generate

    Returns:
        HolonomyReport; the verdict is holonomic since every transition is an automorphism
    """
    return classify_holonomic(fa.atlas, fa.fiber, base_chart, cap)
