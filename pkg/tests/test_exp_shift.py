import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from fibra.services.errors import NonFinite, NonSquare, SizeMismatch
from fibra.services.exp_shift import (
    exp_shift_section,
    matrix_exp,
    one_parameter_defect,
    sample_grid,
    shift_vector_section,
)

entries = st.floats(min_value=-1.0, max_value=1.0, allow_nan=False, allow_infinity=False)
matrices = st.lists(entries, min_size=4, max_size=4).map(lambda v: [v[:2], v[2:]])
wide_entries = st.floats(min_value=-2.0, max_value=2.0, allow_nan=False, allow_infinity=False)


def square_matrices(max_size):
    return st.integers(min_value=1, max_value=max_size).flatmap(
        lambda n: st.lists(wide_entries, min_size=n * n, max_size=n * n).map(
            lambda v: [v[i * n : (i + 1) * n] for i in range(n)]
        )
    )


parameters = st.sampled_from([0.1, 0.5, 1.0])


class TestMatrixExp:
    def test_nilpotent_generator_is_exact(self):
        result = matrix_exp([[0.0, 1.0], [0.0, 0.0]], 2.0)
        assert np.array_equal(result, np.array([[1.0, 2.0], [0.0, 1.0]]))

    def test_zero_parameter_gives_identity(self):
        assert np.array_equal(matrix_exp([[3.0, -1.0], [2.0, 0.5]], 0.0), np.identity(2))

    def test_rotation(self):
        result = matrix_exp([[0.0, -np.pi], [np.pi, 0.0]])
        assert np.allclose(result, -np.identity(2), atol=1e-12)

    @settings(max_examples=100, deadline=None)
    @given(matrices, parameters, parameters)
    def test_one_parameter_property(self, a, s, t):
        assert one_parameter_defect(a, s, t) <= 1e-9

    @settings(max_examples=100, deadline=None)
    @given(square_matrices(2), parameters, parameters)
    def test_one_parameter_property_on_larger_entries(self, a, s, t):
        assert one_parameter_defect(a, s, t) <= 1e-9

    @settings(max_examples=50, deadline=None)
    @given(square_matrices(3))
    def test_agrees_with_scipy(self, a):
        assert np.allclose(matrix_exp(a), expm(np.asarray(a)), rtol=1e-10, atol=1e-10)

    def test_non_square(self):
        with pytest.raises(NonSquare):
            matrix_exp([[1.0, 2.0, 3.0]])

    def test_non_finite(self):
        with pytest.raises(NonFinite):
            matrix_exp([[float("nan"), 0.0], [0.0, 1.0]])
        with pytest.raises(NonFinite):
            matrix_exp([[1.0]], float("inf"))


class TestShiftSections:
    def test_grid(self):
        assert list(sample_grid(5)) == [-1.0, -0.5, 0.0, 0.5, 1.0]
        with pytest.raises(SizeMismatch):
            sample_grid(0)

    def test_shifted_vector(self):
        grid = sample_grid(5)
        shifted = shift_vector_section([[0.0, 1.0], [0.0, 0.0]], grid, [1.0, 1.0])
        assert shifted.shape == (5, 2)
        assert np.array_equal(shifted[2], np.array([1.0, 1.0]))
        assert np.array_equal(shifted[4], np.array([2.0, 1.0]))
        assert np.array_equal(shifted[0], np.array([0.0, 1.0]))

    def test_group_section_at_zero_is_identity(self):
        shifts = exp_shift_section([[0.3, 0.1], [-0.2, 0.4]], sample_grid(3))
        assert np.array_equal(shifts[1], np.identity(2))

    def test_vector_length(self):
        with pytest.raises(SizeMismatch):
            shift_vector_section([[0.0, 1.0], [0.0, 0.0]], sample_grid(2), [1.0])
