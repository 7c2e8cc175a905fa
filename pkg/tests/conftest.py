import pytest

from weyltype import Lattice, Signature
from weyltype.sampling import desk_signature


@pytest.fixture(scope="session")
def desk():
    return desk_signature()


@pytest.fixture(scope="session")
def w10():
    """W(1, 0, Z): one locally finite derivation."""
    return Signature(1, 0, Lattice(1, [(1,)]))


@pytest.fixture(scope="session")
def w01():
    """W(0, 1, Z): one semisimple derivation."""
    return Signature(0, 1, Lattice(1, [(1,)]))


@pytest.fixture(scope="session")
def z2():
    """W(1, 1, Z^2)."""
    return Signature(1, 1, Lattice(2, [(1, 0), (0, 1)]))
