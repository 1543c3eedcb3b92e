import numpy as np
import pytest

from qwalklab import (
    ImplementingTriple,
    build_function_algebra,
    build_group_algebra,
    cyclic_group,
    symmetric_group,
)
from qwalklab.groups import cyclic_character_table, symmetric_sign_character


@pytest.fixture(scope="session")
def z2():
    return cyclic_group(2)


@pytest.fixture(scope="session")
def s3():
    return symmetric_group(3)


@pytest.fixture(scope="session")
def c_z2(z2):
    return build_function_algebra(z2)


@pytest.fixture(scope="session")
def c_s3(s3):
    return build_function_algebra(s3)


@pytest.fixture(scope="session")
def group_z2(z2):
    return build_group_algebra(z2, extra_characters=list(cyclic_character_table(2)[1:]))


@pytest.fixture(scope="session")
def group_s3(s3):
    return build_group_algebra(s3, extra_characters=[symmetric_sign_character(3)])


@pytest.fixture(scope="session")
def all_bialgebras(c_z2, c_s3, group_z2, group_s3):
    return (c_z2, c_s3, group_z2, group_s3)


@pytest.fixture
def z2_sign_triple(group_z2):
    """Sign character as a one-dimensional representation of C[Z2]."""
    pi = group_z2.characters[1].reshape(-1, 1, 1)
    return ImplementingTriple(source=group_z2, pi=pi, xi=np.array([1.5 + 0.0j]))


@pytest.fixture
def c_z2_eval_triple(c_z2):
    """Point evaluation at the nonidentity element of Z2."""
    pi = c_z2.characters[1].reshape(-1, 1, 1)
    return ImplementingTriple(source=c_z2, pi=pi, xi=np.array([1.2 + 0.0j]))


@pytest.fixture
def s3_regular_triple(group_s3):
    """Left regular representation of C[S3] with a generic vector."""
    xi = np.array([0.5, -0.2 + 0.1j, 0.3, 0.1j, -0.4, 0.2], dtype=complex)
    return ImplementingTriple(source=group_s3, pi=group_s3.rep, xi=xi)


@pytest.fixture
def s3_cp_triple(group_s3):
    """Regular representation compressed along the sign eigenvector."""
    sign = np.array([1.0, -1.0, -1.0, 1.0, 1.0, -1.0]) / np.sqrt(6.0)
    w2 = np.array([1.0, 1.0, -1.0, -1.0, 0.0, 0.0]) / 2.0
    xi = 1.6 * (0.95 * sign + np.sqrt(1.0 - 0.95**2) * w2)
    return ImplementingTriple(
        source=group_s3,
        pi=group_s3.rep,
        xi=xi.astype(complex),
        D=sign.reshape(6, 1).astype(complex),
    )
