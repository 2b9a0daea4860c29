import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fibra.services.algebra import automorphism_perms, cyclic_group, direct_product_group
from fibra.services.bundle import (
    BaseSpace,
    enumerate_sections,
    identity_fibered_map,
    make_fibered_map,
    make_section,
    section_value,
    single_chart_atlas,
    validate_atlas,
)
from fibra.services.errors import (
    ArityMismatch,
    BundleMismatch,
    NotAHomomorphism,
    NotClosed,
    SizeMismatch,
    TransitionNotHomomorphism,
)
from fibra.services.fibered_algebra import (
    FiberedAlgebraMap,
    apply_operation_sections,
    fibered_power,
    is_fibered_homomorphism,
    is_fibered_isomorphism,
    is_fibered_subalgebra,
    make_fibered_algebra,
    operation_value_in_chart,
    reduced_product_algebras,
    subalgebra_embedding,
)
from tests.builders import chain_atlas, cycle_atlas, non_automorphism

FIBERS = [
    cyclic_group(3).algebra,
    cyclic_group(4).algebra,
    cyclic_group(5).algebra,
    direct_product_group([cyclic_group(2), cyclic_group(2)]).algebra,
]


def doubled_chart_atlas(size, transition):
    """Two charts that both cover p and q."""
    base = BaseSpace(
        ("p", "q"), (("U0", frozenset({"p", "q"})), ("U1", frozenset({"p", "q"})))
    )
    return validate_atlas(base, size, {("U0", "U1"): transition})


class TestMakeFiberedAlgebra:
    @settings(max_examples=50, deadline=None)
    @given(st.data())
    def test_automorphism_transitions_validate(self, data):
        fiber = data.draw(st.sampled_from(FIBERS))
        autos = sorted(automorphism_perms(fiber))
        edges = data.draw(st.integers(min_value=1, max_value=3))
        maps = [data.draw(st.sampled_from(autos)) for _ in range(edges)]
        fa = make_fibered_algebra(chain_atlas(fiber.size, maps), fiber)
        assert fa.atlas.fiber_size == fiber.size

    @settings(max_examples=50, deadline=None)
    @given(st.data())
    def test_injected_non_automorphism_is_reported(self, data):
        fiber = data.draw(st.sampled_from(FIBERS))
        autos = automorphism_perms(fiber)
        edges = data.draw(st.integers(min_value=1, max_value=3))
        maps = [data.draw(st.sampled_from(sorted(autos))) for _ in range(edges)]
        bad = data.draw(st.integers(min_value=0, max_value=edges - 1))
        maps[bad] = non_automorphism(fiber, autos)
        with pytest.raises(TransitionNotHomomorphism) as excinfo:
            make_fibered_algebra(chain_atlas(fiber.size, maps), fiber)
        witness = excinfo.value.witness
        assert {witness["from"], witness["to"]} == {f"U{bad}", f"U{bad + 1}"}

    def test_translation_on_a_cycle(self, z5):
        atlas = cycle_atlas(5, [1, 2, 3, 4, 0], [0, 1, 2, 3, 4], [0, 1, 2, 3, 4])
        with pytest.raises(TransitionNotHomomorphism) as excinfo:
            make_fibered_algebra(atlas, z5.algebra)
        assert excinfo.value.witness["from"] == "U0"
        assert excinfo.value.witness["to"] == "U1"
        assert not excinfo.value.usage

    def test_size_mismatch(self, z3):
        with pytest.raises(SizeMismatch):
            make_fibered_algebra(single_chart_atlas(["p"], 4), z3.algebra)


class TestSectionOperations:
    def test_pointwise_product(self, z3):
        fa = make_fibered_algebra(single_chart_atlas(["p", "q"], 3), z3.algebra)
        s1 = make_section(fa.atlas, {"p": 1, "q": 2})
        s2 = make_section(fa.atlas, {"p": 2, "q": 2})
        assert apply_operation_sections(fa, "*", [s1, s2]).as_dict() == {"p": 0, "q": 1}
        assert apply_operation_sections(fa, "inv", [s1]).as_dict() == {"p": 2, "q": 1}

    def test_constant_gives_constant_section(self, z3):
        fa = make_fibered_algebra(single_chart_atlas(["p", "q"], 3), z3.algebra)
        assert apply_operation_sections(fa, "e", []).values == (0, 0)

    def test_arity_and_bundle_checks(self, z3):
        fa = make_fibered_algebra(single_chart_atlas(["p", "q"], 3), z3.algebra)
        s = make_section(fa.atlas, [0, 1])
        with pytest.raises(ArityMismatch):
            apply_operation_sections(fa, "*", [s])
        foreign = make_section(single_chart_atlas(["p", "q"], 3, "V0"), [0, 1])
        with pytest.raises(BundleMismatch):
            apply_operation_sections(fa, "inv", [foreign])

    @pytest.mark.parametrize(
        "group_order,transition",
        [(3, [0, 2, 1]), (5, [0, 2, 4, 1, 3]), (5, [0, 3, 1, 4, 2])],
    )
    def test_result_does_not_depend_on_the_chart(self, group_order, transition):
        fiber = cyclic_group(group_order).algebra
        fa = make_fibered_algebra(doubled_chart_atlas(group_order, transition), fiber)
        sections = list(enumerate_sections(fa.atlas))
        for symbol, arity in fiber.signature.ops:
            for args in itertools.product(sections, repeat=arity):
                result = apply_operation_sections(fa, symbol, list(args))
                for x, chart in itertools.product(("p", "q"), ("U0", "U1")):
                    expected = operation_value_in_chart(fa, symbol, list(args), x, chart)
                    assert section_value(result, x, chart) == expected


class TestFiberedHomomorphisms:
    def test_identity(self, z3):
        fa = make_fibered_algebra(doubled_chart_atlas(3, [0, 2, 1]), z3.algebra)
        ident = identity_fibered_map(fa.atlas)
        assert is_fibered_homomorphism(ident, fa, fa)
        assert is_fibered_isomorphism(ident, fa, fa)

    def test_pointwise_automorphisms(self, z5):
        fa = make_fibered_algebra(single_chart_atlas(["p", "q"], 5), z5.algebra)
        doubling = make_fibered_map(
            fa.atlas, fa.atlas, {"p": "p", "q": "q"}, {"p": [0, 2, 4, 1, 3], "q": [0, 3, 1, 4, 2]}
        )
        assert is_fibered_isomorphism(doubling, fa, fa)
        translate = make_fibered_map(
            fa.atlas, fa.atlas, {"p": "p", "q": "q"}, {"p": [0, 2, 4, 1, 3], "q": [1, 2, 3, 4, 0]}
        )
        assert not is_fibered_homomorphism(translate, fa, fa)
        with pytest.raises(NotAHomomorphism) as excinfo:
            FiberedAlgebraMap(translate, fa, fa)
        assert excinfo.value.witness == {"point": "q"}

    def test_reduction_is_homomorphism_but_not_isomorphism(self, z4, z2):
        source = make_fibered_algebra(single_chart_atlas(["p", "q"], 4), z4.algebra)
        target = make_fibered_algebra(single_chart_atlas(["p", "q"], 2), z2.algebra)
        reduce = make_fibered_map(
            source.atlas, target.atlas, {"p": "p", "q": "q"}, {"p": [0, 1, 0, 1], "q": [0, 1, 0, 1]}
        )
        assert is_fibered_homomorphism(reduce, source, target)
        assert not is_fibered_isomorphism(reduce, source, target)

    def test_isomorphism_needs_bijective_base_map(self, z3):
        fa = make_fibered_algebra(single_chart_atlas(["p", "q"], 3), z3.algebra)
        collapse = make_fibered_map(
            fa.atlas, fa.atlas, {"p": "p", "q": "p"}, {"p": [0, 1, 2], "q": [0, 1, 2]}
        )
        assert is_fibered_homomorphism(collapse, fa, fa)
        assert not is_fibered_isomorphism(collapse, fa, fa)


class TestSubalgebras:
    def test_invariant_subgroup(self, z4):
        fa = make_fibered_algebra(doubled_chart_atlas(4, [0, 3, 2, 1]), z4.algebra)
        assert is_fibered_subalgebra({0, 2}, fa)
        assert is_fibered_subalgebra(range(4), fa)
        assert not is_fibered_subalgebra({0, 1}, fa)

    def test_closed_but_not_invariant(self, klein):
        # Swapping the two factors moves the subgroup {(0,0), (0,1)}.
        fa = make_fibered_algebra(doubled_chart_atlas(4, [0, 2, 1, 3]), klein.algebra)
        assert not is_fibered_subalgebra({0, 1}, fa)
        assert is_fibered_subalgebra({0, 3}, fa)

    def test_embedding_is_a_homomorphism(self, z4):
        fa = make_fibered_algebra(doubled_chart_atlas(4, [0, 3, 2, 1]), z4.algebra)
        sub, embedding = subalgebra_embedding({0, 2}, fa)
        assert sub.atlas.fiber_size == 2
        assert embedding.fiber_maps == ((0, 2), (0, 2))
        assert is_fibered_homomorphism(embedding, sub, fa)

    def test_embedding_of_non_subalgebra(self, z4):
        fa = make_fibered_algebra(doubled_chart_atlas(4, [0, 3, 2, 1]), z4.algebra)
        with pytest.raises(NotClosed):
            subalgebra_embedding({0, 1}, fa)


class TestProducts:
    def test_reduced_product_of_fibered_algebras(self, z2, z3):
        first = make_fibered_algebra(doubled_chart_atlas(2, [0, 1]), z2.algebra)
        second = make_fibered_algebra(doubled_chart_atlas(3, [0, 2, 1]), z3.algebra)
        product = reduced_product_algebras([first, second])
        assert product.fiber.size == 6
        assert product.atlas.fiber_size == 6
        assert len(product.atlas.base.charts) == 4

    def test_powers(self, z3):
        fa = make_fibered_algebra(doubled_chart_atlas(3, [0, 2, 1]), z3.algebra)
        assert fibered_power(fa, 0).fiber.size == 1
        assert fibered_power(fa, 2).fiber.size == 9
