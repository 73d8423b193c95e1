"""common fixtures."""

from pathlib import Path

import pytest

from piggyback_mds.c1_code import C1Spec, c1_spec
from piggyback_mds.c2_code import C2Spec, c2_spec
from piggyback_mds.field import GF256


@pytest.fixture(scope="session")
def repo_root() -> Path:
    """Return the root directory of the piggyback-mds repository."""
    return Path(__file__).parent.parent.resolve()


@pytest.fixture(scope="session")
def package_root(repo_root: Path) -> Path:
    """Return the directory in which the package sources live."""
    return repo_root / "src" / "piggyback_mds"


@pytest.fixture(scope="session")
def c1_golden() -> C1Spec:
    """C1(11,6,4,2), the worked first example."""
    return c1_spec(11, 6, 4, 2)


@pytest.fixture(scope="session")
def c2_golden() -> C2Spec:
    """C2(12,8,16,2), the worked second example."""
    return c2_spec(12, 8, 4, 2)


@pytest.fixture
def random_data():
    """Return a factory for seeded random (k, m, count) data grids."""

    def factory(k: int, m: int, count: int = 1, seed: int = 0):
        return GF256.Random((k, m, count), seed=seed)

    return factory


@pytest.fixture(scope="session")
def c2_mds() -> C2Spec:
    """C2(12,8,16,2) with a theta that passed the any-k check."""
    return c2_spec(12, 8, 4, 2, verify=True)
