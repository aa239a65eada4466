"""Shared pytest fixtures."""
import pytest

from app.constructions import ConstructionSpec, construct_theorem_c
from app.iet import SignedPermutation, build_iet
from app.models import CapsConfig, Config
from app.scalar import Basis


@pytest.fixture
def q2():
    return Basis.of(2)


@pytest.fixture
def q23():
    return Basis.of(2, 3)


@pytest.fixture
def flip_1iet():
    """x -> 1 - x on (0, 1)."""
    return build_iet([1], SignedPermutation.of(-1))


@pytest.fixture
def swap_2iet():
    return build_iet([1, 1], SignedPermutation.of(2, 1))


@pytest.fixture
def flip_2iet(q2):
    """lengths (sqrt 2, 1), p = (-2, 1)."""
    return build_iet([q2.sqrt(2), q2.one()], SignedPermutation.of(-2, 1))


@pytest.fixture
def rotation_2iet(q2):
    """Oriented rotation with lengths (1, sqrt 2)."""
    return build_iet([q2.one(), q2.sqrt(2)], SignedPermutation.of(2, 1))


@pytest.fixture(scope="session")
def showcase():
    """The seven-interval example with three periodic and two minimal components."""
    return construct_theorem_c(ConstructionSpec(n=7, k=3, ell=2, seed=0))


@pytest.fixture(scope="session")
def showcase_iet(showcase):
    return build_iet(showcase.lengths, showcase.perm)


@pytest.fixture
def default_caps():
    return CapsConfig()


@pytest.fixture
def default_config():
    return Config.default()
