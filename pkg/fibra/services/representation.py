"""Transformations of bundles and representations of fibered groups.

A representation assigns to every base point ``x`` and group element ``a`` a
bijection ``rho_x(a)`` of the target fiber over ``x``. Action tables are
stored in canonical charts of both bundles:
``action[i][a]`` is the permutation for the ``i``-th base point.

Variance fixes the composition law:

* covariant:     ``rho(ab) = rho(a) . rho(b)``  (left action)
* contravariant: ``rho(ab) = rho(b) . rho(a)``  (right action read as maps)

Section-level statements use ``f(g)``, the transformation ``x -> rho_x(g(x))``
induced by a section ``g`` of the group bundle.
"""

import itertools
import logging
from collections import Counter
from dataclasses import dataclass
from typing import (
    Any,
    Callable,
    Dict,
    FrozenSet,
    List,
    Mapping,
    Optional,
    Sequence,
    Tuple,
    Union,
)

import numpy as np

from fibra.services.algebra import (
    AlgebraMap,
    FiniteAlgebra,
    GroupStructure,
    Signature,
    homomorphism_violation,
    opposite_group,
)
from fibra.services.bundle import (
    DEFAULT_SECTION_CAP,
    BundleAtlas,
    FiberedMap,
    Section,
    check_section_cap,
    componentwise_perm,
    count_sections,
    enumerate_sections,
    reduced_product_bundles,
)
from fibra.services.errors import (
    BaseMismatch,
    BundleMismatch,
    CapExceeded,
    CompositionLawViolated,
    CriterionDisagreement,
    EquivarianceViolated,
    GroupMismatch,
    IncompleteAction,
    MismatchDetected,
    NotBijective,
    NotClosed,
    NotCovariant,
    NotSingleTransitive,
    PointNotInChart,
    SchemaViolation,
    SignatureMismatch,
    SizeMismatch,
    UnitLawViolated,
)
from fibra.services.fibered_algebra import (
    FiberedAlgebra,
    apply_operation_sections,
    is_fibered_homomorphism,
    make_fibered_algebra,
)
from fibra.utils.permutations import Perm, compose, conjugate, identity, inverse, is_perm

logger = logging.getLogger(__name__)

COVARIANT = "covariant"
CONTRAVARIANT = "contravariant"
VARIANCES = (COVARIANT, CONTRAVARIANT)

RawRows = Union[Sequence[Sequence[int]], Mapping[Any, Sequence[int]]]


# Transformations


@dataclass(frozen=True)
class BundleTransformation:
    """One bijection of the fiber per base point, in canonical charts."""

    bundle: BundleAtlas
    maps: Tuple[Perm, ...]

    def __post_init__(self):
        maps = tuple(tuple(int(v) for v in m) for m in self.maps)
        object.__setattr__(self, "maps", maps)
        points = self.bundle.base.points
        if len(maps) != len(points):
            raise SizeMismatch(
                f"Transformation has {len(maps)} maps for {len(points)} points",
                {"maps": len(maps)},
            )
        for x, m in zip(points, maps):
            if len(m) != self.bundle.fiber_size or not is_perm(m):
                raise NotBijective(
                    f"Transformation over '{x}' is not a bijection of the fiber",
                    {"point": x, "map": list(m)},
                )

    def at(self, x: str) -> Perm:
        return self.maps[self.bundle.base.point_index(x)]


def identity_transformation(b: BundleAtlas) -> BundleTransformation:
    return BundleTransformation(b, (identity(b.fiber_size),) * len(b.base.points))


def apply_transformation(t: BundleTransformation, u: Section) -> Section:
    """Apply ``t`` pointwise: the result at ``x`` is ``t_x(u(x))``."""
    if u.atlas != t.bundle:
        raise BundleMismatch("Section and transformation live on different bundles")
    return Section(u.atlas, tuple(m[v] for m, v in zip(t.maps, u.values)))


def compose_transformations(
    s: BundleTransformation, t: BundleTransformation
) -> BundleTransformation:
    """Return s . t (apply ``t`` first)."""
    if s.bundle != t.bundle:
        raise BundleMismatch("Transformations live on different bundles")
    return BundleTransformation(s.bundle, tuple(compose(a, b) for a, b in zip(s.maps, t.maps)))


def invert_transformation(t: BundleTransformation) -> BundleTransformation:
    return BundleTransformation(t.bundle, tuple(inverse(m) for m in t.maps))


def transformation_algebra(
    transformations: Sequence[BundleTransformation],
    variance: str = COVARIANT,
    mul: str = "*",
    inv: str = "inv",
    unit: str = "e",
) -> GroupStructure:
    """Group structure on a listed set of transformations, indexed by list position.

    The covariant product is ``(t1 t2) mu = t1(t2 mu)``; the contravariant
    product is ``(t2 t1) mu = t1(t2 mu)``.

    Raises:
        NotClosed: the list misses the identity, a product or an inverse
    """
    _check_variance(variance)
    if not transformations:
        raise NotClosed("An empty list has no identity transformation")
    bundle = transformations[0].bundle
    index: Dict[Tuple[Perm, ...], int] = {}
    for position, t in enumerate(transformations):
        if t.bundle != bundle:
            raise BundleMismatch(
                "Transformations live on different bundles", {"position": position}
            )
        if t.maps in index:
            raise SchemaViolation(
                f"Transformation {position} repeats transformation {index[t.maps]}",
                {"position": position},
            )
        index[t.maps] = position

    def position_of(t: BundleTransformation, what: str) -> int:
        if t.maps not in index:
            raise NotClosed(f"The list is not closed: {what} is missing", {"missing": what})
        return index[t.maps]

    n = len(transformations)
    table = np.empty((n, n), dtype=np.int64)
    for i, j in itertools.product(range(n), repeat=2):
        first, second = transformations[i], transformations[j]
        if variance == COVARIANT:
            product = compose_transformations(first, second)
        else:
            product = compose_transformations(second, first)
        table[i, j] = position_of(product, f"product of {i} and {j}")
    inverses = [
        position_of(invert_transformation(t), f"inverse of {i}")
        for i, t in enumerate(transformations)
    ]
    e = position_of(identity_transformation(bundle), "identity")
    signature = Signature(((mul, 2), (inv, 1), (unit, 0)))
    algebra = FiniteAlgebra(signature, n, ((mul, table), (inv, inverses), (unit, e)))
    return GroupStructure(algebra, mul, inv, unit)


# Fibered groups


@dataclass(frozen=True)
class FiberedGroup:
    """A fibered algebra whose fiber is a group; transitions are group automorphisms."""

    fa: FiberedAlgebra
    structure: GroupStructure

    def __post_init__(self):
        if self.structure.algebra != self.fa.fiber:
            raise SignatureMismatch("Group structure does not belong to the fiber algebra")

    @property
    def atlas(self) -> BundleAtlas:
        return self.fa.atlas

    @property
    def order(self) -> int:
        return self.structure.order

    def unit_section(self) -> Section:
        return apply_operation_sections(self.fa, self.structure.unit, [])

    def multiply_sections(self, g: Section, h: Section) -> Section:
        return apply_operation_sections(self.fa, self.structure.mul, [g, h])

    def invert_section(self, g: Section) -> Section:
        return apply_operation_sections(self.fa, self.structure.inv, [g])


def make_fibered_group(atlas: BundleAtlas, structure: GroupStructure) -> FiberedGroup:
    """Fibered group over ``atlas`` with fiber ``structure``.

    Raises:
        TransitionNotHomomorphism: a transition is not a group automorphism
        SizeMismatch: the fiber size of ``atlas`` differs from the group order
    """
    return FiberedGroup(make_fibered_algebra(atlas, structure.algebra), structure)


def is_fibered_group_homomorphism(m: FiberedMap, src: FiberedGroup, dst: FiberedGroup) -> bool:
    return is_fibered_homomorphism(m, src.fa, dst.fa)


def is_fibered_group_antihomomorphism(m: FiberedMap, src: FiberedGroup, dst: FiberedGroup) -> bool:
    """Each fiber map satisfies ``f(ab) = f(b) f(a)``: a homomorphism into the opposite group."""
    flipped = opposite_group(dst.structure)
    return is_fibered_homomorphism(m, src.fa, FiberedAlgebra(dst.atlas, flipped.algebra))


# Representations


def _check_variance(variance: str):
    if variance not in VARIANCES:
        raise SchemaViolation(
            f"Unknown variance '{variance}'", {"field": "variance", "variance": variance}
        )


@dataclass(frozen=True)
class GroupRepresentation:
    """A validated action of a fibered group on a bundle over the same base.

    Construct through :func:`make_representation`; the constructor checks the
    unit and composition laws and bijectivity on every fiber.
    """

    group: FiberedGroup
    target: BundleAtlas
    variance: str
    action: Tuple[Tuple[Perm, ...], ...]

    def __post_init__(self):
        _check_variance(self.variance)
        if self.target.base.points != self.group.atlas.base.points:
            raise BaseMismatch(
                "Group bundle and target bundle have different base points",
                {
                    "group": list(self.group.atlas.base.points),
                    "target": list(self.target.base.points),
                },
            )
        action = tuple(tuple(tuple(int(v) for v in row) for row in rows) for rows in self.action)
        object.__setattr__(self, "action", action)
        self._check_laws()

    def _check_laws(self):
        points = self.target.base.points
        order = self.group.order
        n = self.target.fiber_size
        mul = self.group.structure.mul_table
        unit = self.group.structure.unit_element
        if len(self.action) != len(points):
            raise IncompleteAction("Action tables missing for some points")
        for x, rows in zip(points, self.action):
            if len(rows) != order:
                raise IncompleteAction(
                    f"Action over '{x}' lists {len(rows)} of {order} elements",
                    {"point": x},
                )
            for a, row in enumerate(rows):
                if len(row) != n or not is_perm(row):
                    raise NotBijective(
                        f"rho_{x}({a}) is not a bijection of the fiber",
                        {"point": x, "element": a, "map": list(row)},
                    )
            table = np.asarray(rows, dtype=np.int64)
            if not np.array_equal(table[unit], np.arange(n)):
                raise UnitLawViolated(
                    f"rho_{x}(unit) is not the identity",
                    {"point": x, "map": list(rows[unit])},
                )
            lhs = table[mul]
            g = np.arange(order)
            if self.variance == COVARIANT:
                rhs = table[g[:, None, None], table[None, :, :]]
            else:
                rhs = table[g[None, :, None], table[:, None, :]]
            bad = np.argwhere(lhs != rhs)
            if bad.size:
                a, b, mu = (int(v) for v in bad[0])
                raise CompositionLawViolated(
                    f"{self.variance} composition law fails at point '{x}' "
                    f"for a={a}, b={b}, mu={mu}",
                    {"point": x, "a": a, "b": b, "mu": mu, "variance": self.variance},
                )

    def rho(self, x: str, a: int) -> Perm:
        """Canonical-chart bijection of ``a`` over ``x``."""
        return self.action[self.target.base.point_index(x)][a]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "variance": self.variance,
            "action": {
                x: {str(a): list(row) for a, row in enumerate(rows)}
                for x, rows in zip(self.target.base.points, self.action)
            },
        }


def action_in_charts(
    r: GroupRepresentation, x: str, group_chart: str, target_chart: str
) -> Tuple[Perm, ...]:
    """Action over ``x`` with the group read in ``group_chart`` and the target in ``target_chart``.

    ``rho'(g') = t_A(canonical -> target_chart) . rho(t_G(group_chart -> canonical)(g'))
    . t_A(target_chart -> canonical)``.
    """
    group_atlas = r.group.atlas
    for atlas, chart in ((group_atlas, group_chart), (r.target, target_chart)):
        if x not in atlas.base.chart_points(chart):
            raise PointNotInChart(
                f"Point '{x}' is not in chart '{chart}'", {"point": x, "chart": chart}
            )
    group_canonical = group_atlas.base.canonical_chart(x)
    target_canonical = r.target.base.canonical_chart(x)
    to_group = group_atlas.transition(group_chart, group_canonical)
    outward = r.target.transition(target_canonical, target_chart)
    inward = r.target.transition(target_chart, target_canonical)
    return tuple(
        compose(outward, compose(r.rho(x, to_group[g]), inward)) for g in range(r.group.order)
    )


def _element_key(key: Any, order: int) -> int:
    try:
        value = int(key)
    except (TypeError, ValueError):
        raise IncompleteAction(f"Group element '{key}' is not an index", {"element": key})
    if not 0 <= value < order:
        raise IncompleteAction(f"Group element {value} is out of range", {"element": value})
    return value


def _rows(raw: RawRows, order: int, x: str) -> Tuple[Tuple[int, ...], ...]:
    if isinstance(raw, Mapping):
        by_element = {_element_key(k, order): v for k, v in raw.items()}
        missing = [a for a in range(order) if a not in by_element]
        if missing:
            raise IncompleteAction(
                f"Action over '{x}' misses elements {missing}", {"point": x, "elements": missing}
            )
        return tuple(tuple(by_element[a]) for a in range(order))
    return tuple(tuple(row) for row in raw)


def make_representation(
    g: FiberedGroup,
    target: BundleAtlas,
    variance: str,
    raw_action: Union[Mapping[str, RawRows], Sequence[RawRows]],
    chart_actions: Optional[Mapping[Tuple[str, str, str], RawRows]] = None,
) -> GroupRepresentation:
    """Validate action data and build a representation.

    Args:
        g: The acting fibered group
        target: Bundle acted on; must share the group's base points
        variance: ``"covariant"`` or ``"contravariant"``
        raw_action: point -> rows, where row ``a`` lists ``rho_x(a)`` in
            canonical charts (rows may be a list or an element-keyed dict)
        chart_actions: optional ``(point, group_chart, target_chart) -> rows``
            tables; each must agree with the canonical data transported
            by the transitions

    Raises:
        BaseMismatch, IncompleteAction, NotBijective, UnitLawViolated,
        CompositionLawViolated, EquivarianceViolated
    """
    points = g.atlas.base.points
    if isinstance(raw_action, Mapping):
        unknown = [x for x in raw_action if x not in points]
        if unknown:
            raise BaseMismatch(f"Action given for unknown points {unknown}", {"points": unknown})
        missing = [x for x in points if x not in raw_action]
        if missing:
            raise IncompleteAction(f"Action misses points {missing}", {"points": missing})
        rows = [raw_action[x] for x in points]
    else:
        rows = list(raw_action)
        if len(rows) > len(points):
            raise BaseMismatch(
                f"Action lists {len(rows)} points for a base of {len(points)}",
                {"rows": len(rows), "points": len(points)},
            )
        if len(rows) < len(points):
            raise IncompleteAction(
                f"Action misses points {list(points[len(rows):])}",
                {"points": list(points[len(rows) :])},
            )
    action = tuple(_rows(raw, g.order, x) for x, raw in zip(points, rows))
    r = GroupRepresentation(g, target, variance, action)

    for (x, group_chart, target_chart), raw in (chart_actions or {}).items():
        expected = action_in_charts(r, x, group_chart, target_chart)
        given = _rows(raw, g.order, x)
        for a, (want, got) in enumerate(zip(expected, given)):
            if tuple(got) != want:
                raise EquivarianceViolated(
                    f"Action over '{x}' in charts ({group_chart}, {target_chart}) "
                    f"disagrees with the transported canonical action at element {a}",
                    {
                        "point": x,
                        "group_chart": group_chart,
                        "target_chart": target_chart,
                        "element": a,
                    },
                )
    logger.debug(f"Validated {variance} representation over {len(points)} points")
    return r


def representation_from_function(
    g: FiberedGroup, target: BundleAtlas, variance: str, fn: Callable[[str, int], Sequence[int]]
) -> GroupRepresentation:
    """Build a representation from ``fn(point, element) -> permutation``."""
    action = {x: [tuple(fn(x, a)) for a in range(g.order)] for x in g.atlas.base.points}
    return make_representation(g, target, variance, action)


def trivial_representation(
    g: FiberedGroup, target: BundleAtlas, variance: str = COVARIANT
) -> GroupRepresentation:
    """Every element acts as the identity on every fiber of ``target``.

    Args:
        g: Acting fibered group
        target: Bundle acted on; must share the group's base points
        variance: Either variance; both laws hold trivially

    Returns:
        The trivial representation, whose kernel is every group section
    """
    return representation_from_function(
        g, target, variance, lambda x, a: identity(target.fiber_size)
    )


def shift_representation(g: FiberedGroup, side: str) -> GroupRepresentation:
    """Action of the group on its own bundle by multiplication.

    ``left``: ``rho(a) = (b -> ab)``, covariant. ``right``: ``rho(a) = (b -> ba)``,
    contravariant.
    """
    mul = g.structure.mul_table
    if side == "left":
        return representation_from_function(
            g, g.atlas, COVARIANT, lambda x, a: tuple(int(v) for v in mul[a, :])
        )
    if side == "right":
        return representation_from_function(
            g, g.atlas, CONTRAVARIANT, lambda x, a: tuple(int(v) for v in mul[:, a])
        )
    raise SchemaViolation(f"Unknown shift side '{side}'", {"field": "side", "side": side})


def rep_inverse_image(r: GroupRepresentation, a: int, x: str) -> Perm:
    """``rho_x(a^-1)``, checked against ``rho_x(a)^-1``."""
    direct = r.rho(x, r.group.structure.invert(a))
    inverted = inverse(r.rho(x, a))
    if direct != inverted:
        raise MismatchDetected(
            f"rho_{x}(a^-1) differs from rho_{x}(a)^-1 for a={a}", {"point": x, "element": a}
        )
    return direct


# Section level


def _check_group_section(r: GroupRepresentation, g: Section):
    if g.atlas != r.group.atlas:
        raise BundleMismatch("Section does not belong to the group bundle")


def _check_target_section(r: GroupRepresentation, u: Section):
    if u.atlas != r.target:
        raise BundleMismatch("Section does not belong to the target bundle")


def transformation_of(r: GroupRepresentation, g: Section) -> BundleTransformation:
    """The transformation ``f(g): x -> rho_x(g(x))``."""
    _check_group_section(r, g)
    return BundleTransformation(
        r.target, tuple(rows[value] for rows, value in zip(r.action, g.values))
    )


def act(r: GroupRepresentation, g: Section, u: Section) -> Section:
    """Return ``f(g) u``."""
    _check_target_section(r, u)
    return apply_transformation(transformation_of(r, g), u)


def _fiber_kernels(r: GroupRepresentation) -> List[List[int]]:
    n = r.target.fiber_size
    return [[a for a, row in enumerate(rows) if row == identity(n)] for rows in r.action]


def _is_subgroup(structure: GroupStructure, members: Sequence[int]) -> bool:
    subset = set(members)
    if structure.unit_element not in subset:
        return False
    closed = all(structure.multiply(a, b) in subset for a in subset for b in subset)
    return closed and all(structure.invert(a) in subset for a in subset)


def kernel_of_inefficiency(
    r: GroupRepresentation, cap: int = DEFAULT_SECTION_CAP
) -> FrozenSet[Section]:
    """Group sections acting as the identity transformation.

    Raises:
        CapExceeded: the group bundle has more than ``cap`` sections
    """
    check_section_cap(r.group.atlas, cap)
    kernels = _fiber_kernels(r)
    for x, members in zip(r.target.base.points, kernels):
        if not _is_subgroup(r.group.structure, members):
            raise MismatchDetected(
                f"Kernel over '{x}' is not a subgroup", {"point": x, "kernel": members}
            )
    atlas = r.group.atlas
    return frozenset(Section(atlas, values) for values in itertools.product(*kernels))


def is_effective(r: GroupRepresentation, cap: int = DEFAULT_SECTION_CAP) -> bool:
    """True iff only the unit section acts trivially."""
    return kernel_of_inefficiency(r, cap) == frozenset({r.group.unit_section()})


def orbit(r: GroupRepresentation, u: Section, cap: int = DEFAULT_SECTION_CAP) -> FrozenSet[Section]:
    """``{f(g) u : g a section of the group bundle}``."""
    check_section_cap(r.group.atlas, cap)
    _check_target_section(r, u)
    fiber_orbits = [
        sorted({row[value] for row in rows}) for rows, value in zip(r.action, u.values)
    ]
    return frozenset(Section(r.target, values) for values in itertools.product(*fiber_orbits))


@dataclass(frozen=True)
class OrbitPartition:
    """Disjoint orbits covering every section of the target bundle."""

    blocks: Tuple[FrozenSet[Section], ...]
    section_count: int

    @property
    def count(self) -> int:
        return len(self.blocks)

    @property
    def sizes(self) -> List[int]:
        return [len(block) for block in self.blocks]

    def block_of(self, u: Section) -> FrozenSet[Section]:
        for block in self.blocks:
            if u in block:
                return block
        raise BundleMismatch("Section is not covered by the partition")


def orbit_partition(r: GroupRepresentation, cap: int = DEFAULT_SECTION_CAP) -> OrbitPartition:
    """Partition the target sections into orbits, in section enumeration order.

    Raises:
        MismatchDetected: two orbits overlap without being equal
    """
    check_section_cap(r.group.atlas, cap)
    seen: Dict[Section, int] = {}
    blocks: List[FrozenSet[Section]] = []
    total = 0
    for u in enumerate_sections(r.target, cap):
        total += 1
        if u in seen:
            continue
        block = orbit(r, u, cap)
        if u not in block:
            raise MismatchDetected(
                "Orbit does not contain its own section", {"section": list(u.values)}
            )
        clash = [v for v in block if v in seen]
        if clash:
            raise MismatchDetected(
                "Orbits overlap without being equal",
                {"section": list(u.values), "shared": list(clash[0].values)},
            )
        for v in block:
            seen[v] = len(blocks)
        blocks.append(block)
    logger.info(f"Partitioned {total} sections into {len(blocks)} orbits")
    return OrbitPartition(tuple(blocks), total)


def _fiberwise_transitivity(r: GroupRepresentation) -> Tuple[bool, bool]:
    """Transitive and single-transitive on every fiber."""
    n = r.target.fiber_size
    transitive = True
    single = True
    for rows in r.action:
        table = np.asarray(rows, dtype=np.int64)
        for mu in range(n):
            hits = np.bincount(table[:, mu], minlength=n)
            if (hits == 0).any():
                transitive = False
            if not (hits == 1).all():
                single = False
    return transitive, single


def transitivity_report(r: GroupRepresentation, cap: int = DEFAULT_SECTION_CAP) -> Dict[str, bool]:
    """Transitivity verdicts computed on sections and cross-checked on fibers.

    Section-level single transitivity means every ordered pair of target
    sections ``(a, b)`` has exactly one group section ``g`` with ``a = f(g) b``.

    Raises:
        CapExceeded: |sections(target)| * |sections(group)| exceeds ``cap``
        CriterionDisagreement: the section-level and fiber-level verdicts differ
    """
    group_count = count_sections(r.group.atlas)
    target_count = count_sections(r.target)
    if group_count * target_count > cap:
        raise CapExceeded(
            f"{target_count} x {group_count} section pairs exceed the enumeration cap of {cap}",
            {"sections": target_count * group_count, "cap": cap},
        )
    group_sections = list(itertools.product(range(r.group.order), repeat=len(r.action)))
    transitive = True
    single = True
    for b in enumerate_sections(r.target, cap):
        hits = Counter(
            tuple(rows[gi][bi] for rows, gi, bi in zip(r.action, g, b.values))
            for g in group_sections
        )
        if len(hits) != target_count:
            transitive = False
        if len(hits) != target_count or any(c != 1 for c in hits.values()):
            single = False
    partition = orbit_partition(r, cap)
    if transitive != (partition.count == 1):
        raise CriterionDisagreement(
            "Orbit count disagrees with the transitivity count",
            {"orbits": partition.count, "transitive": transitive},
        )
    fiber_transitive, fiber_single = _fiberwise_transitivity(r)
    if (transitive, single) != (fiber_transitive, fiber_single):
        raise CriterionDisagreement(
            "Section-level and fiber-level transitivity disagree",
            {
                "sections": {"transitive": transitive, "single_transitive": single},
                "fibers": {"transitive": fiber_transitive, "single_transitive": fiber_single},
            },
        )
    return {
        "transitive": transitive,
        "single_transitive": single,
        "effective": is_effective(r, cap),
    }


def is_homogeneous_bundle(r: GroupRepresentation, cap: int = DEFAULT_SECTION_CAP) -> bool:
    """The target is a homogeneous bundle of the group iff the action is single transitive."""
    return transitivity_report(r, cap)["single_transitive"]


def _require_single_transitive(r: GroupRepresentation):
    if not _fiberwise_transitivity(r)[1]:
        raise NotSingleTransitive("Representation is not single transitive")


def coordinates(r: GroupRepresentation, v: Section, w: Section) -> Section:
    """The unique group section ``g`` with ``w = f(g) v``.

    Raises:
        NotSingleTransitive: some fiber action is not single transitive
    """
    _require_single_transitive(r)
    _check_target_section(r, v)
    _check_target_section(r, w)
    values = []
    for rows, start, end in zip(r.action, v.values, w.values):
        values.append(next(a for a, row in enumerate(rows) if row[start] == end))
    return Section(r.group.atlas, tuple(values))


def shift_equivalence(r: GroupRepresentation, reference: Section) -> Tuple[Perm, ...]:
    """Per point, the bijection ``phi_x(g) = rho_x(g)(reference(x))`` from group to fiber.

    ``phi_x`` intertwines the left shift (covariant) or the right shift
    (contravariant) with ``rho_x``.
    """
    _require_single_transitive(r)
    _check_target_section(r, reference)
    mul = r.group.structure.mul_table
    phis = []
    for x, rows, start in zip(r.target.base.points, r.action, reference.values):
        phi = tuple(row[start] for row in rows)
        for a in range(r.group.order):
            shift = mul[a, :] if r.variance == COVARIANT else mul[:, a]
            expected = conjugate(phi, tuple(int(v) for v in shift))
            if expected != rows[a]:
                raise MismatchDetected(
                    f"rho_{x}({a}) is not conjugate to the shift", {"point": x, "element": a}
                )
        phis.append(phi)
    return tuple(phis)


def twin_representation(r: GroupRepresentation, reference: Section) -> GroupRepresentation:
    """The contravariant action commuting with ``r``, built from a reference section.

    ``h_x(a) = phi_x . R_a . phi_x^-1`` where ``R_a`` is right multiplication.
    Different references give conjugate twins.

    Raises:
        NotCovariant: ``r`` is contravariant
        NotSingleTransitive: ``r`` is not single transitive
    """
    if r.variance != COVARIANT:
        raise NotCovariant("Twin representations are built from covariant representations")
    phis = shift_equivalence(r, reference)
    mul = r.group.structure.mul_table
    action = {}
    for x, phi in zip(r.target.base.points, phis):
        action[x] = [
            conjugate(phi, tuple(int(v) for v in mul[:, a]))
            for a in range(r.group.order)
        ]
    twin = make_representation(r.group, r.target, CONTRAVARIANT, action)
    for x, rows, twin_rows in zip(r.target.base.points, r.action, twin.action):
        for a, b in itertools.product(range(r.group.order), repeat=2):
            if compose(twin_rows[b], rows[a]) != compose(rows[a], twin_rows[b]):
                raise MismatchDetected(
                    f"Twin does not commute at point '{x}'", {"point": x, "a": a, "b": b}
                )
    return twin


def direct_product_representations(
    r1: GroupRepresentation, r2: GroupRepresentation
) -> GroupRepresentation:
    """Componentwise action on the reduced product of the two targets.

    Raises:
        GroupMismatch: different groups or different variances
        BaseMismatch: the targets live over different bases
    """
    if r1.group != r2.group:
        raise GroupMismatch("Representations of different fibered groups")
    if r1.variance != r2.variance:
        raise GroupMismatch(
            "Representations of different variance",
            {"first": r1.variance, "second": r2.variance},
        )
    target = reduced_product_bundles([r1.target, r2.target])
    dims = (r1.target.fiber_size, r2.target.fiber_size)
    action = {
        x: [componentwise_perm([rows1[a], rows2[a]], dims) for a in range(r1.group.order)]
        for x, rows1, rows2 in zip(r1.target.base.points, r1.action, r2.action)
    }
    return make_representation(r1.group, target, r1.variance, action)


def to_star_T(r: GroupRepresentation) -> GroupRepresentation:
    """Read the same action tables as a representation of the opposite fibered group.

    Variance flips, so laws proven for one side hold for the other; applying
    twice returns the original representation.
    """
    opposite = opposite_group(r.group.structure)
    group = make_fibered_group(r.group.atlas, opposite)
    variance = CONTRAVARIANT if r.variance == COVARIANT else COVARIANT
    return make_representation(group, r.target, variance, r.action)


def general_representation_validate(
    b: FiberedAlgebra,
    transformations: Sequence[BundleTransformation],
    algebra: FiniteAlgebra,
    map_data: Mapping[str, Sequence[int]],
) -> bool:
    """Check that map data is a fibered homomorphism into an algebra of transformations.

    Only ``algebra``'s tables decide the verdict. The transformations label its
    elements and fix the base; that the tables agree with some action of the
    operations on the transformations is the caller's responsibility (use
    :func:`transformation_algebra` to derive group tables by composition).

    Args:
        b: Fibered algebra being represented
        transformations: The listed transformations; element ``i`` of
            ``algebra`` stands for ``transformations[i]``. Only their number and
            base points are checked
        algebra: Operation tables on the listed transformations
        map_data: point -> list sending each fiber element of ``b`` to a
            position in ``transformations``

    Raises:
        SignatureMismatch: ``algebra`` and ``b`` have different signatures
        SizeMismatch: ``algebra`` does not have one element per transformation
        BaseMismatch: a transformation lives over another base
        NotClosed: the map leaves the listed transformations
        IncompleteAction: a point has no map
    """
    if algebra.signature != b.signature:
        raise SignatureMismatch(
            "Transformation algebra and fibered algebra have different signatures",
            {"algebra": list(algebra.signature.symbols), "fibered": list(b.signature.symbols)},
        )
    if algebra.size != len(transformations):
        raise SizeMismatch(
            f"Transformation algebra has {algebra.size} elements for "
            f"{len(transformations)} transformations"
        )
    for position, t in enumerate(transformations):
        if t.bundle.base.points != b.atlas.base.points:
            raise BaseMismatch(
                f"Transformation {position} lives over another base", {"position": position}
            )
    verdict = True
    for x in b.atlas.base.points:
        if x not in map_data:
            raise IncompleteAction(f"No map over '{x}'", {"point": x})
        mapping = tuple(int(v) for v in map_data[x])
        outside = [v for v in mapping if not 0 <= v < len(transformations)]
        if outside or len(mapping) != b.fiber.size:
            raise NotClosed(
                f"Map over '{x}' leaves the listed transformations", {"point": x}
            )
        if homomorphism_violation(AlgebraMap(b.fiber, algebra, mapping)) is not None:
            verdict = False
    return verdict
