"""Shared fixtures: small groups, fibered groups and representations over two points."""

import os

import pytest

from fibra.services.algebra import cyclic_group, direct_product_group, symmetric_group
from fibra.services.representation import (
    COVARIANT,
    make_representation,
    shift_representation,
    trivial_representation,
)
from tests.builders import fibered_group, plain_bundle


@pytest.fixture
def z2():
    return cyclic_group(2)


@pytest.fixture
def z3():
    return cyclic_group(3)


@pytest.fixture
def z4():
    return cyclic_group(4)


@pytest.fixture
def z5():
    return cyclic_group(5)


@pytest.fixture
def klein():
    return direct_product_group([cyclic_group(2), cyclic_group(2)])


@pytest.fixture
def s3():
    return symmetric_group(3)


@pytest.fixture
def z3_bundle_group(z3):
    return fibered_group(z3)


@pytest.fixture
def s3_bundle_group(s3):
    return fibered_group(s3)


@pytest.fixture
def z4_bundle_group(z4):
    return fibered_group(z4)


@pytest.fixture
def left_regular_z3(z3_bundle_group):
    return shift_representation(z3_bundle_group, "left")


@pytest.fixture
def left_regular_s3(s3_bundle_group):
    return shift_representation(s3_bundle_group, "left")


@pytest.fixture
def trivial_z3(z3_bundle_group):
    return trivial_representation(z3_bundle_group, plain_bundle(2))


@pytest.fixture
def mod2_shift(z4_bundle_group):
    """Z4 acting on a two-element fiber through a -> a mod 2."""
    rows = [[0, 1], [1, 0], [0, 1], [1, 0]]
    return make_representation(
        z4_bundle_group, plain_bundle(2), COVARIANT, {"p": rows, "q": rows}
    )


@pytest.fixture
def plus_two_shift(z2):
    """Z2 acting on a four-element fiber by adding 2."""
    rows = [[0, 1, 2, 3], [2, 3, 0, 1]]
    return make_representation(
        fibered_group(z2), plain_bundle(4), COVARIANT, {"p": rows, "q": rows}
    )


@pytest.fixture(params=["left_regular_z3", "trivial_z3", "mod2_shift"])
def fixture_representation(request):
    return request.getfixturevalue(request.param)


@pytest.fixture
def examples_dir():
    return os.path.join(os.path.dirname(__file__), "..", "fibra", "static", "examples")
