import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fibra.services.algebra import (
    AlgebraMap,
    Signature,
    compose_maps,
    cyclic_group,
    decode_index,
    encode_tuple,
    enumerate_automorphisms,
    evaluate,
    identity_map,
    is_automorphism,
    is_group,
    is_homomorphism,
    opposite_group,
    product_algebra,
    projection,
    subalgebra,
    subalgebra_closed,
    trivial_algebra,
    validate_algebra,
)
from fibra.services.errors import (
    ArityMismatch,
    CapExceeded,
    ElementOutOfRange,
    MissingTable,
    NotClosed,
    OutOfRangeEntry,
    SchemaViolation,
    SignatureMismatch,
    UnknownSymbol,
)
from fibra.utils.enumeration_cache import get_enumeration_cache

ADDITIVE = Signature((("+", 2), ("neg", 1), ("0", 0)))


def z_n_tables(n):
    return {
        "+": [[(a + b) % n for b in range(n)] for a in range(n)],
        "neg": [(-a) % n for a in range(n)],
        "0": 0,
    }


class TestValidateAlgebra:
    def test_builds_tables_in_signature_order(self):
        alg = validate_algebra(ADDITIVE, 5, z_n_tables(5))
        assert alg.size == 5
        assert alg.signature.symbols == ("+", "neg", "0")
        assert alg.constant("0") == 0
        assert evaluate(alg, "+", [3, 4]) == 2

    def test_missing_table(self):
        tables = z_n_tables(3)
        del tables["neg"]
        with pytest.raises(MissingTable) as excinfo:
            validate_algebra(ADDITIVE, 3, tables)
        assert excinfo.value.witness["symbol"] == "neg"

    def test_short_row_is_arity_mismatch(self):
        tables = z_n_tables(3)
        tables["+"][1] = [1, 2]
        with pytest.raises(ArityMismatch):
            validate_algebra(ADDITIVE, 3, tables)

    def test_constant_given_as_list_is_arity_mismatch(self):
        tables = z_n_tables(3)
        tables["0"] = [0]
        with pytest.raises(ArityMismatch):
            validate_algebra(ADDITIVE, 3, tables)

    def test_out_of_range_entry(self):
        tables = z_n_tables(3)
        tables["+"][2][2] = 3
        with pytest.raises(OutOfRangeEntry) as excinfo:
            validate_algebra(ADDITIVE, 3, tables)
        assert excinfo.value.witness["index"] == [2, 2]

    def test_unknown_symbol(self):
        tables = z_n_tables(3)
        tables["*"] = [[0] * 3] * 3
        with pytest.raises(UnknownSymbol):
            validate_algebra(ADDITIVE, 3, tables)

    def test_duplicate_symbol_in_signature(self):
        with pytest.raises(SchemaViolation):
            Signature((("+", 2), ("+", 1)))

    def test_tables_are_read_only(self):
        alg = validate_algebra(ADDITIVE, 3, z_n_tables(3))
        with pytest.raises(ValueError):
            alg.table("+")[0, 0] = 1


class TestEvaluate:
    def test_wrong_number_of_arguments(self, z3):
        with pytest.raises(ArityMismatch):
            evaluate(z3.algebra, "*", [1])

    def test_argument_outside_carrier(self, z3):
        with pytest.raises(ElementOutOfRange):
            evaluate(z3.algebra, "inv", [3])


class TestHomomorphisms:
    def test_doubling_is_an_automorphism_of_z5(self):
        z5 = validate_algebra(ADDITIVE, 5, z_n_tables(5))
        assert is_automorphism(z5, [0, 2, 4, 1, 3])

    def test_translation_is_not_a_homomorphism(self):
        z5 = validate_algebra(ADDITIVE, 5, z_n_tables(5))
        assert not is_homomorphism(AlgebraMap(z5, z5, (1, 2, 3, 4, 0)))

    def test_reduction_mod_two(self, z4, z2):
        assert is_homomorphism(AlgebraMap(z4.algebra, z2.algebra, (0, 1, 0, 1)))
        assert not is_homomorphism(AlgebraMap(z4.algebra, z2.algebra, (0, 1, 1, 0)))

    def test_different_signatures(self, z3):
        other = validate_algebra(ADDITIVE, 3, z_n_tables(3))
        with pytest.raises(SignatureMismatch):
            is_homomorphism(AlgebraMap(z3.algebra, other, (0, 1, 2)))

    def test_composition_of_homomorphisms(self, z4, z2):
        reduce = AlgebraMap(z4.algebra, z2.algebra, (0, 1, 0, 1))
        negate = AlgebraMap(z4.algebra, z4.algebra, (0, 3, 2, 1))
        composed = compose_maps(reduce, negate)
        assert composed.mapping == (0, 1, 0, 1)
        assert is_homomorphism(composed)
        assert compose_maps(negate, identity_map(z4.algebra)) == negate

    def test_inverse_of_automorphism(self, z5):
        doubling = AlgebraMap(z5.algebra, z5.algebra, (0, 2, 4, 1, 3))
        assert doubling.inverse().mapping == (0, 3, 1, 4, 2)
        assert is_homomorphism(doubling.inverse())


class TestAutomorphisms:
    def test_z5_has_four(self, z5):
        autos = enumerate_automorphisms(z5.algebra)
        assert [m.mapping for m in autos] == [
            (0, 1, 2, 3, 4),
            (0, 2, 4, 1, 3),
            (0, 3, 1, 4, 2),
            (0, 4, 3, 2, 1),
        ]

    def test_klein_group_has_six(self, klein):
        assert len(enumerate_automorphisms(klein.algebra)) == 6

    def test_s3_automorphisms_are_inner(self, s3):
        assert len(enumerate_automorphisms(s3.algebra)) == 6

    def test_no_operations_gives_every_permutation(self):
        assert len(enumerate_automorphisms(trivial_algebra(4))) == 24

    def test_cap(self):
        with pytest.raises(CapExceeded) as excinfo:
            enumerate_automorphisms(cyclic_group(9).algebra)
        assert excinfo.value.usage
        assert len(enumerate_automorphisms(cyclic_group(7).algebra, cap=7)) == 6

    def test_results_are_cached(self, z4):
        cache = get_enumeration_cache()
        first = enumerate_automorphisms(z4.algebra)
        hits = cache.hits
        second = enumerate_automorphisms(cyclic_group(4).algebra)
        assert cache.hits == hits + 1
        assert first == second


class TestProducts:
    def test_encoding(self):
        assert encode_tuple((2, 3), (1, 2)) == 5
        assert decode_index((2, 3), 5) == (1, 2)
        with pytest.raises(ElementOutOfRange):
            encode_tuple((2, 3), (2, 0))

    @given(st.integers(min_value=0, max_value=23))
    def test_decode_inverts_encode(self, index):
        dims = (2, 3, 4)
        assert encode_tuple(dims, decode_index(dims, index)) == index

    def test_projections_are_homomorphisms(self, z2, z3):
        factors = [z2.algebra, z3.algebra]
        product = product_algebra(factors)
        assert product.size == 6
        for i in range(2):
            assert is_homomorphism(projection(product, factors, i))

    def test_product_is_z6(self, z2, z3):
        product = product_algebra([z2.algebra, z3.algebra])
        assert is_group(product, "*", "inv", "e")
        # (1, 1) generates the whole group
        seen = {0}
        current = encode_tuple((2, 3), (1, 1))
        while current not in seen:
            seen.add(current)
            current = evaluate(product, "*", [current, encode_tuple((2, 3), (1, 1))])
        assert len(seen) == 6

    def test_mixed_signatures(self, z3):
        other = validate_algebra(ADDITIVE, 3, z_n_tables(3))
        with pytest.raises(SignatureMismatch):
            product_algebra([z3.algebra, other])


class TestSubalgebras:
    def test_even_elements_of_z4(self, z4):
        assert subalgebra_closed(z4.algebra, {0, 2})
        assert not subalgebra_closed(z4.algebra, {0, 1})
        assert not subalgebra_closed(z4.algebra, {1, 3})

    def test_reindexed_subalgebra(self, z4):
        sub, inclusion = subalgebra(z4.algebra, [2, 0])
        assert sub.size == 2
        assert inclusion.mapping == (0, 2)
        assert is_homomorphism(inclusion)
        assert evaluate(sub, "*", [1, 1]) == 0

    def test_not_closed(self, z4):
        with pytest.raises(NotClosed):
            subalgebra(z4.algebra, [0, 1])


class TestGroups:
    def test_group_axioms(self, z5, s3):
        assert is_group(z5.algebra, "*", "inv", "e")
        assert is_group(s3.algebra, "*", "inv", "e")

    def test_non_group(self):
        alg = trivial_algebra(2, Signature((("*", 2), ("inv", 1), ("e", 0))))
        assert not is_group(alg, "*", "inv", "e")

    def test_symmetric_group_applies_right_factor_first(self, s3):
        elements = list(itertools.permutations(range(3)))
        a, b = 1, 3
        product = elements[s3.multiply(a, b)]
        assert product == tuple(elements[a][elements[b][i]] for i in range(3))
        assert not s3.is_abelian

    def test_opposite_group(self, s3, z3):
        flipped = opposite_group(s3)
        assert np.array_equal(flipped.mul_table, s3.mul_table.T)
        assert flipped != s3
        assert opposite_group(flipped) == s3
        assert opposite_group(z3) == z3


MIXED = Signature((("f", 2), ("g", 1), ("c", 0)))


@st.composite
def mixed_algebras(draw, max_size=5):
    n = draw(st.integers(min_value=1, max_value=max_size))
    element = st.integers(min_value=0, max_value=n - 1)
    tables = {
        "f": draw(st.lists(st.lists(element, min_size=n, max_size=n), min_size=n, max_size=n)),
        "g": draw(st.lists(element, min_size=n, max_size=n)),
        "c": draw(element),
    }
    return validate_algebra(MIXED, n, tables)


@given(mixed_algebras())
def test_evaluate_stays_in_carrier(alg):
    for symbol, arity in MIXED.ops:
        for args in itertools.product(range(alg.size), repeat=arity):
            assert 0 <= evaluate(alg, symbol, list(args)) < alg.size


@given(mixed_algebras(max_size=4))
def test_automorphisms_form_a_group(alg):
    autos = {m.mapping for m in enumerate_automorphisms(alg)}
    assert identity_map(alg).mapping in autos
    for a, b in itertools.product(autos, repeat=2):
        assert tuple(a[i] for i in b) in autos
    for a in autos:
        assert AlgebraMap(alg, alg, a).inverse().mapping in autos


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_cyclic_automorphisms_form_a_group(n):
    alg = cyclic_group(n).algebra
    autos = enumerate_automorphisms(alg)
    mappings = {m.mapping for m in autos}
    assert identity_map(alg).mapping in mappings
    for a, b in itertools.product(autos, repeat=2):
        assert compose_maps(a, b).mapping in mappings
        assert a.inverse().mapping in mappings


def test_identity_inverse_table_is_not_a_group():
    tables = {
        "*": [[(a + b) % 3 for b in range(3)] for a in range(3)],
        "inv": [0, 1, 2],
        "e": 0,
    }
    alg = validate_algebra(Signature((("*", 2), ("inv", 1), ("e", 0))), 3, tables)
    assert not is_group(alg, "*", "inv", "e")
    assert is_group(cyclic_group(3).algebra, "*", "inv", "e")
