"""Finite bundles: bases with chart covers, transition data, sections and products.

A bundle over a finite base is described by its atlas. Each chart trivialises
the bundle over its points, and every ordered pair of overlapping charts
``(a, b)`` carries one bijection ``t`` of the fiber carrier that rewrites
coordinates in chart ``a`` as coordinates in chart ``b``. Transitions are
constant on an overlap.

Stored data is always expressed in the canonical chart of a point, which is
the first chart (in cover order) containing it.
"""

import itertools
import logging
from dataclasses import dataclass
from functools import cached_property
from math import prod
from typing import (
    Any,
    Dict,
    FrozenSet,
    Iterable,
    Iterator,
    List,
    Mapping,
    Sequence,
    Tuple,
    Union,
)

import numpy as np

from fibra.services.errors import (
    BaseMapNotBijective,
    BaseMismatch,
    BundleMismatch,
    CapExceeded,
    CocycleViolated,
    ElementOutOfRange,
    EmptyList,
    IdentityLawViolated,
    InverseLawViolated,
    MissingTransition,
    NotABijection,
    NotACover,
    PointNotInChart,
    SchemaViolation,
    SizeMismatch,
    SpuriousTransition,
    UnknownReference,
)
from fibra.utils.permutations import Perm, compose, identity, inverse, is_perm

logger = logging.getLogger(__name__)

DEFAULT_SECTION_CAP = 100000

RawTransitions = Union[
    Mapping[Tuple[str, str], Sequence[int]], Iterable[Tuple[str, str, Sequence[int]]]
]


_NAME_ESCAPES = str.maketrans({"\\": "\\\\", ",": "\\,", "(": "\\(", ")": "\\)"})


def tuple_name(names: Sequence[str]) -> str:
    """Name of a product point or chart, e.g. ``(U0,V1)``.

    Backslash, comma and parentheses inside a component are escaped with a
    backslash, so distinct tuples always get distinct names.
    """
    return "(" + ",".join(str(n).translate(_NAME_ESCAPES) for n in names) + ")"


@dataclass(frozen=True)
class BaseSpace:
    """Finite base points with an ordered chart cover."""

    points: Tuple[str, ...]
    charts: Tuple[Tuple[str, FrozenSet[str]], ...]

    def __post_init__(self):
        points = tuple(str(x) for x in self.points)
        charts = tuple(
            (str(name), frozenset(str(x) for x in members)) for name, members in self.charts
        )
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "charts", charts)

        if not points:
            raise SchemaViolation("Base needs at least one point", {"field": "base.points"})
        if len(set(points)) != len(points):
            raise SchemaViolation("Duplicate point names", {"field": "base.points"})
        names = [name for name, _ in charts]
        if len(set(names)) != len(names):
            duplicate = next(n for n in names if names.count(n) > 1)
            raise SchemaViolation(
                f"Duplicate chart name '{duplicate}'",
                {"field": "base.charts", "chart": duplicate},
            )
        clash = set(names) & set(points)
        if clash:
            raise SchemaViolation(
                f"Names used both for charts and points: {sorted(clash)}",
                {"field": "base.charts", "names": sorted(clash)},
            )
        known = set(points)
        for name, members in charts:
            unknown = sorted(members - known)
            if unknown:
                raise UnknownReference(
                    f"Chart '{name}' contains unknown points {unknown}",
                    {"chart": name, "points": unknown},
                )
        for x in points:
            if not any(x in members for _, members in charts):
                raise NotACover(f"No chart contains point '{x}'", {"point": x})

    @cached_property
    def _point_index(self) -> Dict[str, int]:
        return {x: i for i, x in enumerate(self.points)}

    @cached_property
    def _chart_index(self) -> Dict[str, int]:
        return {name: i for i, (name, _) in enumerate(self.charts)}

    @property
    def chart_names(self) -> Tuple[str, ...]:
        return tuple(name for name, _ in self.charts)

    def point_index(self, x: str) -> int:
        if x not in self._point_index:
            raise UnknownReference(f"Unknown point '{x}'", {"point": x})
        return self._point_index[x]

    def chart_index(self, name: str) -> int:
        if name not in self._chart_index:
            raise UnknownReference(f"Unknown chart '{name}'", {"chart": name})
        return self._chart_index[name]

    def chart_points(self, name: str) -> FrozenSet[str]:
        return self.charts[self.chart_index(name)][1]

    def overlap(self, a: str, b: str) -> FrozenSet[str]:
        return self.chart_points(a) & self.chart_points(b)

    def charts_containing(self, x: str) -> Tuple[str, ...]:
        self.point_index(x)
        return tuple(name for name, members in self.charts if x in members)

    @cached_property
    def _canonical(self) -> Dict[str, str]:
        return {x: next(n for n, m in self.charts if x in m) for x in self.points}

    def canonical_chart(self, x: str) -> str:
        """First chart in cover order that contains ``x``."""
        self.point_index(x)
        return self._canonical[x]


@dataclass(frozen=True, eq=False)
class BundleAtlas:
    """A base, a fiber size and one transition per ordered overlapping chart pair.

    ``transitions`` holds ``((source_chart, target_chart), perm)`` for every
    ordered pair with a non-empty overlap, the diagonal included. The
    constructor checks the identity, inverse and cocycle laws; use
    :func:`validate_atlas` to build from partial raw data.
    """

    base: BaseSpace
    fiber_size: int
    transitions: Tuple[Tuple[Tuple[str, str], Perm], ...]

    def __post_init__(self):
        if isinstance(self.fiber_size, bool) or int(self.fiber_size) < 1:
            raise SchemaViolation("Fiber size must be positive", {"field": "fiber.size"})
        object.__setattr__(self, "fiber_size", int(self.fiber_size))
        index = self.base.chart_index
        ordered = sorted(
            (((str(a), str(b)), tuple(int(v) for v in perm)) for (a, b), perm in self.transitions),
            key=lambda item: (index(item[0][0]), index(item[0][1])),
        )
        object.__setattr__(self, "transitions", tuple(ordered))
        self._check_transitions()

    def _check_transitions(self):
        table = dict(self.transitions)
        n = self.fiber_size
        for (a, b), perm in self.transitions:
            if not self.base.overlap(a, b):
                raise SpuriousTransition(
                    f"Transition given for non-overlapping charts {a} -> {b}",
                    {"from": a, "to": b},
                )
            if len(perm) != n or not is_perm(perm):
                raise NotABijection(
                    f"Transition {a} -> {b} is not a bijection of the fiber",
                    {"from": a, "to": b, "map": list(perm)},
                )
        names = self.base.chart_names
        for a, b in itertools.product(names, repeat=2):
            if self.base.overlap(a, b) and (a, b) not in table:
                raise MissingTransition(
                    f"No transition for overlapping charts {a} -> {b}",
                    {"from": a, "to": b},
                )
        for a in names:
            if (a, a) in table and table[(a, a)] != identity(n):
                raise IdentityLawViolated(
                    f"Transition {a} -> {a} is not the identity", {"chart": a}
                )
        for (a, b), perm in self.transitions:
            if compose(table[(b, a)], perm) != identity(n):
                raise InverseLawViolated(
                    f"Transitions {a} -> {b} and {b} -> {a} are not inverse",
                    {"from": a, "to": b},
                )
        for a, b, c in itertools.permutations(names, 3):
            if not (self.base.overlap(a, b) & self.base.chart_points(c)):
                continue
            if compose(table[(b, c)], table[(a, b)]) != table[(a, c)]:
                raise CocycleViolated(
                    f"Cocycle law fails on charts ({a}, {b}, {c})",
                    {"triple": [a, b, c]},
                )

    @cached_property
    def _table(self) -> Dict[Tuple[str, str], Perm]:
        return dict(self.transitions)

    @cached_property
    def _key(self) -> Tuple[Any, ...]:
        return (self.base, self.fiber_size, self.transitions)

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, BundleAtlas):
            return NotImplemented
        return self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __repr__(self) -> str:
        return (
            f"BundleAtlas(points={len(self.base.points)}, charts={len(self.base.charts)}, "
            f"fiber_size={self.fiber_size})"
        )

    def transition(self, source: str, target: str) -> Perm:
        """Bijection taking coordinates in chart ``source`` to chart ``target``."""
        self.base.chart_index(source)
        self.base.chart_index(target)
        if (source, target) not in self._table:
            raise MissingTransition(
                f"Charts {source} and {target} do not overlap",
                {"from": source, "to": target},
            )
        return self._table[(source, target)]

    def overlapping_pairs(self) -> List[Tuple[str, str]]:
        """Ordered pairs of distinct overlapping charts, in cover order."""
        return [pair for pair, _ in self.transitions if pair[0] != pair[1]]


def _iter_raw(transitions: RawTransitions) -> Iterator[Tuple[str, str, Sequence[int]]]:
    if isinstance(transitions, Mapping):
        for (a, b), perm in transitions.items():
            yield a, b, perm
    else:
        for a, b, perm in transitions:
            yield a, b, perm


def validate_atlas(
    base: BaseSpace, fiber_size: int, transitions: RawTransitions = (), complete: bool = True
) -> BundleAtlas:
    """Build an atlas from raw transition data and check all gluing laws.

    Args:
        base: Base points and chart cover
        fiber_size: Size of the fiber carrier
        transitions: ``(from, to) -> map`` entries; ``map[i]`` is the
            coordinate in chart ``to`` of coordinate ``i`` in chart ``from``
        complete: Fill in diagonal pairs with the identity and reverse pairs
            with the inverse of the given direction

    Raises:
        NotACover, MissingTransition, SpuriousTransition, NotABijection,
        IdentityLawViolated, InverseLawViolated, CocycleViolated
    """
    given: Dict[Tuple[str, str], Perm] = {}
    for a, b, perm in _iter_raw(transitions):
        base.chart_index(a)
        base.chart_index(b)
        values = tuple(int(v) for v in perm)
        if len(values) != fiber_size or not is_perm(values):
            raise NotABijection(
                f"Transition {a} -> {b} is not a bijection of the fiber",
                {"from": a, "to": b, "map": list(values)},
            )
        given[(a, b)] = values

    if complete:
        for a, b in itertools.product(base.chart_names, repeat=2):
            if (a, b) in given or not base.overlap(a, b):
                continue
            if a == b:
                given[(a, b)] = identity(fiber_size)
            elif (b, a) in given:
                given[(a, b)] = inverse(given[(b, a)])

    atlas = BundleAtlas(base, fiber_size, tuple(given.items()))
    logger.debug(f"Validated atlas with {len(atlas.transitions)} transitions")
    return atlas


def single_chart_atlas(points: Sequence[str], fiber_size: int, chart: str = "U0") -> BundleAtlas:
    """The trivial bundle: one chart covering every point."""
    base = BaseSpace(tuple(points), ((chart, frozenset(points)),))
    return validate_atlas(base, fiber_size)


@dataclass(frozen=True)
class TotalPoint:
    """A point of the total space written in one chart."""

    point: str
    chart: str
    value: int


def _check_value(atlas: BundleAtlas, value: int):
    if not 0 <= value < atlas.fiber_size:
        raise ElementOutOfRange(
            f"Fiber value {value} is outside a fiber of size {atlas.fiber_size}",
            {"value": value},
        )


def normalize_point(atlas: BundleAtlas, p: TotalPoint) -> TotalPoint:
    """Rewrite ``p`` in the canonical chart of its base point."""
    if p.point not in atlas.base.chart_points(p.chart):
        raise PointNotInChart(
            f"Point '{p.point}' is not in chart '{p.chart}'",
            {"point": p.point, "chart": p.chart},
        )
    _check_value(atlas, p.value)
    canonical = atlas.base.canonical_chart(p.point)
    return TotalPoint(p.point, canonical, atlas.transition(p.chart, canonical)[p.value])


@dataclass(frozen=True)
class Section:
    """One fiber value per base point, stored in canonical charts."""

    atlas: BundleAtlas
    values: Tuple[int, ...]

    def __post_init__(self):
        values = tuple(int(v) for v in self.values)
        object.__setattr__(self, "values", values)
        if len(values) != len(self.atlas.base.points):
            raise SizeMismatch(
                f"Section has {len(values)} values for {len(self.atlas.base.points)} points",
                {"values": len(values)},
            )
        for value in values:
            _check_value(self.atlas, value)

    def value_at(self, x: str) -> int:
        """Canonical-chart value at ``x``."""
        return self.values[self.atlas.base.point_index(x)]

    def as_dict(self) -> Dict[str, int]:
        return dict(zip(self.atlas.base.points, self.values))


def make_section(atlas: BundleAtlas, values: Union[Mapping[str, int], Sequence[int]]) -> Section:
    """Section from canonical-chart values given by point name or in point order."""
    if isinstance(values, Mapping):
        missing = [x for x in atlas.base.points if x not in values]
        if missing:
            raise SizeMismatch(f"Section misses points {missing}", {"points": missing})
        for x in values:
            atlas.base.point_index(x)
        return Section(atlas, tuple(values[x] for x in atlas.base.points))
    return Section(atlas, tuple(values))


def section_from_charts(atlas: BundleAtlas, values: Mapping[str, Tuple[str, int]]) -> Section:
    """Section from ``point -> (chart, value)`` pairs in arbitrary charts."""
    canonical = {
        x: normalize_point(atlas, TotalPoint(x, chart, value)).value
        for x, (chart, value) in values.items()
    }
    return make_section(atlas, canonical)


def constant_section(atlas: BundleAtlas, value: int) -> Section:
    """The section whose canonical value is ``value`` everywhere."""
    return Section(atlas, (value,) * len(atlas.base.points))


def section_value(s: Section, x: str, chart: str) -> int:
    """Read the value of ``s`` at ``x`` in coordinates of ``chart``."""
    if x not in s.atlas.base.chart_points(chart):
        raise PointNotInChart(
            f"Point '{x}' is not in chart '{chart}'", {"point": x, "chart": chart}
        )
    canonical = s.atlas.base.canonical_chart(x)
    return s.atlas.transition(canonical, chart)[s.value_at(x)]


def count_sections(atlas: BundleAtlas) -> int:
    """Number of sections: fiber size to the power of the point count."""
    return atlas.fiber_size ** len(atlas.base.points)


def check_section_cap(atlas: BundleAtlas, cap: int) -> int:
    """Refuse enumerations larger than ``cap`` before any work is done.

    Args:
        atlas: Bundle whose sections would be enumerated
        cap: Largest allowed number of sections

    Returns:
        The section count

    Raises:
        CapExceeded: the bundle has more than ``cap`` sections
    """
    count = count_sections(atlas)
    if count > cap:
        raise CapExceeded(
            f"{count} sections exceed the enumeration cap of {cap}",
            {"sections": count, "cap": cap},
        )
    return count


def enumerate_sections(atlas: BundleAtlas, cap: int = DEFAULT_SECTION_CAP) -> Iterator[Section]:
    """Iterate every section in lexicographic order of canonical values.

    Raises:
        CapExceeded: fiber_size ** |points| is larger than ``cap`` (raised
            before iteration starts)
    """
    check_section_cap(atlas, cap)
    values = itertools.product(range(atlas.fiber_size), repeat=len(atlas.base.points))
    return (Section(atlas, v) for v in values)


def componentwise_perm(perms: Sequence[Sequence[int]], dims: Tuple[int, ...]) -> Perm:
    """Permutation of encoded tuples acting by ``perms[i]`` on component ``i``."""
    size = prod(dims)
    components = np.unravel_index(np.arange(size), dims)
    moved = tuple(np.asarray(p, dtype=np.int64)[c] for p, c in zip(perms, components))
    return tuple(int(v) for v in np.ravel_multi_index(moved, dims))


def cartesian_product_bundles(bs: Sequence[BundleAtlas]) -> BundleAtlas:
    """Product bundle over the product of the bases.

    Points and charts of the result are tuples of factor points and charts,
    named with :func:`tuple_name`; the fiber is the mixed-radix product.
    """
    if not bs:
        raise EmptyList("Cartesian product of an empty list of bundles")
    dims = tuple(b.fiber_size for b in bs)
    points = tuple(tuple_name(combo) for combo in itertools.product(*[b.base.points for b in bs]))
    chart_combos = list(itertools.product(*[b.base.chart_names for b in bs]))
    charts = tuple(
        (
            tuple_name(combo),
            frozenset(
                tuple_name(xs)
                for xs in itertools.product(
                    *[sorted(b.base.chart_points(c)) for b, c in zip(bs, combo)]
                )
            ),
        )
        for combo in chart_combos
    )
    transitions = []
    for alpha, beta in itertools.product(chart_combos, repeat=2):
        if not all(b.base.overlap(a, c) for b, a, c in zip(bs, alpha, beta)):
            continue
        perms = [b.transition(a, c) for b, a, c in zip(bs, alpha, beta)]
        transitions.append(((tuple_name(alpha), tuple_name(beta)), componentwise_perm(perms, dims)))
    return BundleAtlas(BaseSpace(points, charts), prod(dims), tuple(transitions))


def reduced_product_bundles(bs: Sequence[BundleAtlas]) -> BundleAtlas:
    """Product of bundles over one shared base, pairing fibers over the same point.

    Charts are tuples of factor charts whose intersection is non-empty, in
    lexicographic order of factor chart positions, so the canonical chart of a
    point is the tuple of its canonical factor charts.
    """
    if not bs:
        raise EmptyList("Reduced product of an empty list of bundles")
    base = bs[0].base
    for position, b in enumerate(bs):
        if b.base != base:
            raise BaseMismatch(f"Factor {position} has a different base", {"factor": position})
    dims = tuple(b.fiber_size for b in bs)
    combos = []
    charts = []
    for combo in itertools.product(base.chart_names, repeat=len(bs)):
        members = frozenset.intersection(*[base.chart_points(c) for c in combo])
        if members:
            combos.append(combo)
            charts.append((tuple_name(combo), members))
    product_base = BaseSpace(base.points, tuple(charts))
    transitions = []
    for alpha, beta in itertools.product(combos, repeat=2):
        if not product_base.overlap(tuple_name(alpha), tuple_name(beta)):
            continue
        perms = [b.transition(a, c) for b, a, c in zip(bs, alpha, beta)]
        transitions.append(((tuple_name(alpha), tuple_name(beta)), componentwise_perm(perms, dims)))
    return BundleAtlas(product_base, prod(dims), tuple(transitions))


def bundle_power(b: BundleAtlas, n: int) -> BundleAtlas:
    """``n``-fold reduced product; ``n = 0`` is the identity bundle with a one-point fiber."""
    if n < 0:
        raise SchemaViolation("Bundle power must be non-negative", {"field": "n", "n": n})
    if n == 0:
        names = b.base.chart_names
        transitions = tuple(
            ((a, c), (0,)) for a, c in itertools.product(names, repeat=2) if b.base.overlap(a, c)
        )
        return BundleAtlas(b.base, 1, transitions)
    return reduced_product_bundles([b] * n)


def _check_reduced_product(product: BundleAtlas, factors: Sequence[BundleAtlas]):
    if not factors:
        raise EmptyList("No factors given")
    if product.fiber_size != prod(f.fiber_size for f in factors) or any(
        f.base.points != product.base.points for f in factors
    ):
        raise BundleMismatch("Atlas is not the reduced product of the given factors")


def split_section(
    product: BundleAtlas, factors: Sequence[BundleAtlas], s: Section
) -> Tuple[Section, ...]:
    """Write a section of a reduced product as the tuple of its factor sections."""
    _check_reduced_product(product, factors)
    if s.atlas != product:
        raise BundleMismatch("Section does not belong to the product bundle")
    dims = tuple(f.fiber_size for f in factors)
    decoded = [np.unravel_index(v, dims) for v in s.values]
    return tuple(
        Section(f, tuple(int(d[i]) for d in decoded)) for i, f in enumerate(factors)
    )


def join_sections(product: BundleAtlas, sections: Sequence[Section]) -> Section:
    """Inverse of :func:`split_section`."""
    factors = [s.atlas for s in sections]
    _check_reduced_product(product, factors)
    dims = tuple(f.fiber_size for f in factors)
    values = tuple(
        int(np.ravel_multi_index(tuple(s.values[i] for s in sections), dims))
        for i in range(len(product.base.points))
    )
    return Section(product, values)


def product_section(product: BundleAtlas, sections: Sequence[Section]) -> Section:
    """Section ``(x_1..x_n) -> (s_1(x_1)..s_n(x_n))`` of a Cartesian product bundle."""
    if not sections:
        raise EmptyList("No sections given")
    factors = [s.atlas for s in sections]
    dims = tuple(f.fiber_size for f in factors)
    if product.fiber_size != prod(dims):
        raise BundleMismatch("Atlas is not the Cartesian product of the section bundles")
    by_name = {}
    for combo in itertools.product(*[f.base.points for f in factors]):
        value = np.ravel_multi_index(tuple(s.value_at(x) for s, x in zip(sections, combo)), dims)
        by_name[tuple_name(combo)] = int(value)
    return make_section(product, by_name)


@dataclass(frozen=True)
class FiberedMap:
    """A bundle map: a base map plus one fiber map per source point.

    ``fiber_maps[i]`` sends the canonical coordinate over source point ``i``
    to the canonical coordinate over its image point.
    """

    source: BundleAtlas
    target: BundleAtlas
    base_map: Tuple[str, ...]
    fiber_maps: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        base_map = tuple(str(y) for y in self.base_map)
        fiber_maps = tuple(tuple(int(v) for v in m) for m in self.fiber_maps)
        object.__setattr__(self, "base_map", base_map)
        object.__setattr__(self, "fiber_maps", fiber_maps)
        points = self.source.base.points
        if len(base_map) != len(points) or len(fiber_maps) != len(points):
            raise SizeMismatch("Fibered map must be given for every source point")
        for y in base_map:
            self.target.base.point_index(y)
        for x, m in zip(points, fiber_maps):
            if len(m) != self.source.fiber_size:
                raise SizeMismatch(
                    f"Fiber map over '{x}' has {len(m)} values", {"point": x}
                )
            for v in m:
                _check_value(self.target, v)

    def image(self, x: str) -> str:
        return self.base_map[self.source.base.point_index(x)]

    def fiber_map(self, x: str) -> Tuple[int, ...]:
        return self.fiber_maps[self.source.base.point_index(x)]

    @property
    def is_base_bijective(self) -> bool:
        return sorted(self.base_map) == sorted(self.target.base.points) and len(
            set(self.base_map)
        ) == len(self.base_map)


def make_fibered_map(
    source: BundleAtlas,
    target: BundleAtlas,
    base_map: Mapping[str, str],
    fiber_maps: Mapping[str, Sequence[int]],
) -> FiberedMap:
    """Build a FiberedMap from point-keyed dictionaries."""
    points = source.base.points
    missing = [x for x in points if x not in base_map or x not in fiber_maps]
    if missing:
        raise SizeMismatch(f"Fibered map misses points {missing}", {"points": missing})
    return FiberedMap(
        source,
        target,
        tuple(base_map[x] for x in points),
        tuple(tuple(fiber_maps[x]) for x in points),
    )


def identity_fibered_map(atlas: BundleAtlas) -> FiberedMap:
    points = atlas.base.points
    return FiberedMap(
        atlas, atlas, points, tuple(identity(atlas.fiber_size) for _ in points)
    )


def compose_fibered_maps(g: FiberedMap, f: FiberedMap) -> FiberedMap:
    """Return g . f (apply ``f`` first)."""
    if f.target != g.source:
        raise BundleMismatch("Fibered maps do not compose: f.target != g.source")
    points = f.source.base.points
    return FiberedMap(
        f.source,
        g.target,
        tuple(g.image(f.image(x)) for x in points),
        tuple(compose(g.fiber_map(f.image(x)), f.fiber_map(x)) for x in points),
    )


def pushforward_section(f: FiberedMap, u: Section) -> Section:
    """Transport ``u`` along ``f``: the result at ``y`` is ``f(u(F^-1(y)))``."""
    if u.atlas != f.source:
        raise BundleMismatch("Section does not belong to the source bundle")
    if not f.is_base_bijective:
        raise BaseMapNotBijective(
            "Pushforward needs a bijective base map", {"base_map": list(f.base_map)}
        )
    preimage = {y: x for x, y in zip(f.source.base.points, f.base_map)}
    values = {y: f.fiber_map(x)[u.value_at(x)] for y, x in preimage.items()}
    return make_section(f.target, values)
