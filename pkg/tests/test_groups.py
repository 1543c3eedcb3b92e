import numpy as np
import pytest

from qwalklab.groups import (
    FiniteGroup,
    GroupTableError,
    cyclic_character_table,
    cyclic_group,
    symmetric_group,
    symmetric_sign_character,
)


def test_cyclic_group_table():
    g = cyclic_group(4)
    assert g.order == 4
    assert g.identity == 0
    assert g.mult(1, 3) == 0
    assert g.inv(3) == 1
    assert g.is_abelian()


def test_symmetric_group_s3():
    g = symmetric_group(3)
    assert g.order == 6
    assert not g.is_abelian()
    # closure under composition and correct inverses
    for a in range(6):
        assert g.mult(a, g.inv(a)) == g.identity


def test_symmetric_group_composition_convention():
    # elements are the lexicographic permutations; product acts q first, p second
    from itertools import permutations

    perms = list(permutations(range(3)))
    g = symmetric_group(3)
    for a in range(6):
        for b in range(6):
            composed = tuple(perms[a][perms[b][x]] for x in range(3))
            assert perms[g.mult(a, b)] == composed


def test_non_associative_table_rejected():
    table = np.array([[0, 1], [1, 1]])
    with pytest.raises(GroupTableError):
        FiniteGroup(table=table, labels=("e", "g"), name="bad")


def test_non_latin_table_rejected():
    table = np.array([[0, 0], [1, 1]])
    with pytest.raises(GroupTableError):
        FiniteGroup(table=table, labels=("e", "g"), name="bad")


def test_payload_round_trip():
    g = symmetric_group(3)
    payload = g.to_payload()
    back = FiniteGroup.from_payload(payload)
    assert np.array_equal(back.table, g.table)
    assert back.labels == g.labels


def test_cyclic_characters_orthogonal():
    table = cyclic_character_table(5)
    gram = table @ table.conj().T
    assert np.allclose(gram, 5 * np.eye(5), atol=1e-12)


def test_cyclic_characters_multiplicative():
    g = cyclic_group(5)
    table = cyclic_character_table(5)
    for chi in table:
        for a in range(5):
            for b in range(5):
                assert abs(chi[g.mult(a, b)] - chi[a] * chi[b]) < 1e-12


def test_sign_character_multiplicative():
    g = symmetric_group(4)
    sgn = symmetric_sign_character(4)
    for a in range(g.order):
        for b in range(g.order):
            assert sgn[g.mult(a, b)] == sgn[a] * sgn[b]
    assert set(np.unique(sgn.real)) == {-1.0, 1.0}
