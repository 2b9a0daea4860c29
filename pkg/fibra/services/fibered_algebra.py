"""Fibered algebras: a bundle whose fiber carries an algebra, operated on pointwise."""

import logging
from dataclasses import dataclass
from typing import Iterable, Sequence, Tuple

import numpy as np

from fibra.services.algebra import (
    AlgebraMap,
    FiniteAlgebra,
    Signature,
    evaluate,
    homomorphism_violation,
    product_algebra,
    subalgebra,
    subalgebra_closed,
    trivial_algebra,
)
from fibra.services.bundle import (
    BundleAtlas,
    FiberedMap,
    Section,
    bundle_power,
    constant_section,
    reduced_product_bundles,
    section_value,
)
from fibra.services.errors import (
    ArityMismatch,
    BundleMismatch,
    EmptyList,
    NotAHomomorphism,
    NotClosed,
    SizeMismatch,
    TransitionNotHomomorphism,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FiberedAlgebra:
    """An atlas together with the algebra carried by every fiber.

    Every transition must be an automorphism of the fiber, otherwise the
    pointwise operations would depend on the chart they are computed in.
    """

    atlas: BundleAtlas
    fiber: FiniteAlgebra

    def __post_init__(self):
        if self.atlas.fiber_size != self.fiber.size:
            raise SizeMismatch(
                f"Fiber algebra has {self.fiber.size} elements, atlas fiber has "
                f"{self.atlas.fiber_size}",
                {"fiber": self.fiber.size, "atlas": self.atlas.fiber_size},
            )
        for a, b in self.atlas.overlapping_pairs():
            m = AlgebraMap(self.fiber, self.fiber, self.atlas.transition(a, b))
            violation = homomorphism_violation(m)
            if violation is not None:
                symbol, arguments = violation
                raise TransitionNotHomomorphism(
                    f"Transition {a} -> {b} does not preserve '{symbol}' at {arguments}",
                    {"from": a, "to": b, "symbol": symbol, "arguments": list(arguments)},
                )

    @property
    def signature(self) -> Signature:
        return self.fiber.signature


def make_fibered_algebra(atlas: BundleAtlas, fiber: FiniteAlgebra) -> FiberedAlgebra:
    """Attach ``fiber`` to ``atlas`` after checking every transition is a homomorphism.

    Raises:
        SizeMismatch: fiber carrier and atlas fiber differ in size
        TransitionNotHomomorphism: first offending pair in chart order
    """
    fa = FiberedAlgebra(atlas, fiber)
    logger.debug(f"Fibered algebra over {len(atlas.base.points)} points is valid")
    return fa


def _check_args(fa: FiberedAlgebra, op: str, args: Sequence[Section]) -> int:
    arity = fa.signature.arity(op)
    if len(args) != arity:
        raise ArityMismatch(
            f"'{op}' takes {arity} sections, got {len(args)}",
            {"symbol": op, "arity": arity, "given": len(args)},
        )
    for position, s in enumerate(args):
        if s.atlas != fa.atlas:
            raise BundleMismatch(
                f"Argument {position} is a section of another bundle", {"position": position}
            )
    return arity


def apply_operation_sections(fa: FiberedAlgebra, op: str, args: Sequence[Section]) -> Section:
    """Apply ``op`` pointwise to sections, evaluating in canonical charts."""
    arity = _check_args(fa, op, args)
    if arity == 0:
        return constant_section(fa.atlas, fa.fiber.constant(op))
    table = fa.fiber.table(op)
    columns = tuple(np.asarray(s.values, dtype=np.int64) for s in args)
    return Section(fa.atlas, tuple(int(v) for v in table[columns]))


def operation_value_in_chart(
    fa: FiberedAlgebra, op: str, args: Sequence[Section], x: str, chart: str
) -> int:
    """Evaluate ``op`` at ``x`` on the arguments read in ``chart``."""
    _check_args(fa, op, args)
    return evaluate(fa.fiber, op, [section_value(s, x, chart) for s in args])


def _check_endpoints(m: FiberedMap, src: FiberedAlgebra, dst: FiberedAlgebra):
    if m.source != src.atlas or m.target != dst.atlas:
        raise BundleMismatch("Fibered map endpoints do not match the algebras")


def is_fibered_homomorphism(m: FiberedMap, src: FiberedAlgebra, dst: FiberedAlgebra) -> bool:
    """True iff every fiber map f_x : A_x -> B_F(x) is a homomorphism."""
    _check_endpoints(m, src, dst)
    return all(
        homomorphism_violation(AlgebraMap(src.fiber, dst.fiber, fiber_map)) is None
        for fiber_map in m.fiber_maps
    )


def is_fibered_isomorphism(m: FiberedMap, src: FiberedAlgebra, dst: FiberedAlgebra) -> bool:
    """Homomorphism with a bijective base map and bijective fiber maps."""
    if not is_fibered_homomorphism(m, src, dst):
        return False
    return m.is_base_bijective and all(
        AlgebraMap(src.fiber, dst.fiber, fiber_map).is_bijective for fiber_map in m.fiber_maps
    )


@dataclass(frozen=True)
class FiberedAlgebraMap:
    """A fibered map known to be a homomorphism of fibered algebras."""

    map: FiberedMap
    source: FiberedAlgebra
    target: FiberedAlgebra

    def __post_init__(self):
        if not is_fibered_homomorphism(self.map, self.source, self.target):
            bad = next(
                x
                for x, fiber_map in zip(self.source.atlas.base.points, self.map.fiber_maps)
                if homomorphism_violation(
                    AlgebraMap(self.source.fiber, self.target.fiber, fiber_map)
                )
                is not None
            )
            raise NotAHomomorphism(
                f"Fiber map over '{bad}' is not a homomorphism", {"point": bad}
            )


def _restricted(perm: Sequence[int], elements: Sequence[int]) -> Tuple[int, ...]:
    position = {v: i for i, v in enumerate(elements)}
    return tuple(position[perm[v]] for v in elements)


def is_fibered_subalgebra(sub_carrier: Iterable[int], fa: FiberedAlgebra) -> bool:
    """True iff ``sub_carrier`` is a subalgebra that every transition maps onto itself."""
    members = frozenset(int(v) for v in sub_carrier)
    if not subalgebra_closed(fa.fiber, members):
        return False
    return all(
        frozenset(perm[v] for v in members) == members for _, perm in fa.atlas.transitions
    )


def subalgebra_embedding(
    sub_carrier: Iterable[int], fa: FiberedAlgebra
) -> Tuple[FiberedAlgebra, FiberedMap]:
    """Restrict ``fa`` to an invariant sub-carrier and return it with its inclusion.

    Raises:
        NotClosed: the subset is not a fibered subalgebra
    """
    elements = sorted(set(int(v) for v in sub_carrier))
    if not elements:
        raise EmptyList("A fibered subalgebra needs at least one element")
    if not is_fibered_subalgebra(elements, fa):
        raise NotClosed(
            "Subset is not an invariant subalgebra of the fiber", {"subset": elements}
        )
    sub_fiber, inclusion = subalgebra(fa.fiber, elements)
    transitions = tuple(
        (pair, _restricted(perm, elements)) for pair, perm in fa.atlas.transitions
    )
    sub_atlas = BundleAtlas(fa.atlas.base, len(elements), transitions)
    sub = FiberedAlgebra(sub_atlas, sub_fiber)
    points = fa.atlas.base.points
    embedding = FiberedMap(sub_atlas, fa.atlas, points, (inclusion.mapping,) * len(points))
    return sub, embedding


def reduced_product_algebras(fas: Sequence[FiberedAlgebra]) -> FiberedAlgebra:
    """Reduced product bundle with the product algebra as fiber."""
    if not fas:
        raise EmptyList("Reduced product of an empty list of fibered algebras")
    atlas = reduced_product_bundles([fa.atlas for fa in fas])
    fiber = product_algebra([fa.fiber for fa in fas])
    return FiberedAlgebra(atlas, fiber)


def fibered_power(fa: FiberedAlgebra, n: int) -> FiberedAlgebra:
    """``n``-fold reduced power; ``n = 0`` is the one-element algebra."""
    if n <= 0:
        return FiberedAlgebra(bundle_power(fa.atlas, n), trivial_algebra(1, fa.signature))
    return reduced_product_algebras([fa] * n)
