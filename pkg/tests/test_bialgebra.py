import numpy as np
import pytest

from qwalklab import (
    AxiomViolation,
    CounitalBialgebra,
    build_function_algebra,
    build_group_algebra,
    load_bialgebra,
    save_bialgebra,
    verify_bialgebra,
)
from qwalklab.bialgebra import bialgebra_from_payload, bialgebra_to_payload
from qwalklab.groups import cyclic_group, symmetric_group

from .oracles import coassoc_residual, counit_residual

AXIOM_TOL = 1e-12


def test_all_builtin_bialgebras_pass(all_bialgebras):
    for b in all_bialgebras:
        report = verify_bialgebra(b)
        assert report.ok(AXIOM_TOL), (b.name, report.first_failure())


def test_residuals_match_loop_oracle(all_bialgebras):
    for b in all_bialgebras:
        assert coassoc_residual(b.coproduct) < AXIOM_TOL
        assert counit_residual(b.coproduct, b.counit) < AXIOM_TOL


def test_function_algebra_is_commutative_group_algebra_cocommutative(c_s3, group_s3):
    assert verify_bialgebra(c_s3).commutative
    assert not verify_bialgebra(c_s3).cocommutative
    assert verify_bialgebra(group_s3).cocommutative
    assert not verify_bialgebra(group_s3).commutative


def test_z2_cases_both_commutative_and_cocommutative(c_z2, group_z2):
    for b in (c_z2, group_z2):
        rep = verify_bialgebra(b)
        assert rep.commutative and rep.cocommutative


def test_function_algebra_pointwise_product(c_s3):
    # indicator basis multiplies diagonally
    expected = np.zeros((6, 6, 6))
    for i in range(6):
        expected[i, i, i] = 1.0
    assert np.array_equal(c_s3.mult, expected)


def test_group_algebra_coproduct_grouplike(group_s3):
    for i in range(6):
        expected = np.zeros((6, 6))
        expected[i, i] = 1.0
        assert np.array_equal(group_s3.coproduct[i], expected)


def test_characters_are_multiplicative(all_bialgebras):
    for b in all_bialgebras:
        for chi in b.characters:
            prod = np.einsum("ijk,k->ij", b.mult, chi)
            outer = np.outer(chi, chi)
            assert np.max(np.abs(prod - outer)) < AXIOM_TOL


def test_counit_is_a_character(all_bialgebras):
    for b in all_bialgebras:
        assert any(np.allclose(chi, b.counit, atol=1e-14) for chi in b.characters)


def test_representation_faithful(all_bialgebras):
    for b in all_bialgebras:
        rep = verify_bialgebra(b)
        assert rep.injectivity_sigma_min > 1e-8


def test_corrupted_coproduct_names_coassociativity(group_z2, tmp_path):
    payload = bialgebra_to_payload(group_z2)
    # break Delta(lambda_g) while keeping shapes valid
    payload["coproduct"][1][0][1] = [0.25, 0.0]
    path = tmp_path / "broken.json"
    from qwalklab.serialize import write_json

    write_json(path, payload)
    with pytest.raises(AxiomViolation) as err:
        load_bialgebra(path)
    assert err.value.axiom == "coassociativity"
    assert "coassociativity" in str(err.value)


def test_violation_message_carries_index_and_residual(c_z2):
    payload = bialgebra_to_payload(c_z2)
    bad = bialgebra_from_payload(payload)
    mult = bad.mult.copy()
    mult[0, 0, 1] += 0.5
    broken = CounitalBialgebra(
        name=bad.name,
        labels=bad.labels,
        mult=mult,
        invol=bad.invol,
        unit=bad.unit,
        coproduct=bad.coproduct,
        counit=bad.counit,
        characters=bad.characters,
        rep=bad.rep,
    )
    report = verify_bialgebra(broken)
    assert not report.ok(AXIOM_TOL)
    failure = report.first_failure()
    assert failure is not None
    axiom, index, residual = failure
    assert axiom == "associativity"
    assert residual > 0.1
    violation = AxiomViolation(axiom, index, residual)
    assert "basis index" in str(violation)


def test_save_load_round_trip(group_s3, tmp_path):
    path = tmp_path / "s3.json"
    save_bialgebra(group_s3, path)
    back = load_bialgebra(path)
    assert np.array_equal(back.mult, group_s3.mult)
    assert np.array_equal(back.coproduct, group_s3.coproduct)
    assert np.array_equal(back.characters, group_s3.characters)
    assert back.labels == group_s3.labels


def test_payload_rejects_shape_mismatch(c_z2):
    payload = bialgebra_to_payload(c_z2)
    payload["unit"] = [[1.0, 0.0]] * 3
    from qwalklab.serialize import FormatError

    with pytest.raises(FormatError):
        bialgebra_from_payload(payload)


def test_star_product_matches_direct_computation(group_s3):
    # (b_i)* b_j expanded through invol then mult
    b = group_s3
    direct = np.einsum("ik,kjl->ijl", b.invol, b.mult)
    for i in range(6):
        for j in range(6):
            coeffs = b.star_product_basis(i, j)
            assert np.allclose(coeffs, direct[i, j], atol=1e-14)


def test_group_algebra_involution_inverse_permutation(s3, group_s3):
    for i in range(s3.order):
        expected = np.zeros(6)
        expected[s3.inv(i)] = 1.0
        assert np.array_equal(group_s3.invol[i], expected)
