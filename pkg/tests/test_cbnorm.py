import numpy as np

from qwalklab import OperatorMap, amplified_norm, sampled_lower_bound, structure_map_from_pair
from qwalklab.cbnorm import AmplifiedMap


def test_dual_basis_pairs_to_identity(all_bialgebras):
    for b in all_bialgebras:
        amap = AmplifiedMap(OperatorMap(b, b.rep))
        gram = np.einsum("iab,jab->ij", np.conjugate(amap.dual), b.rep)
        assert np.max(np.abs(gram - np.eye(b.dim))) < 1e-10


def test_expectation_fixes_the_subalgebra(group_s3):
    amap = AmplifiedMap(OperatorMap(group_s3, group_s3.rep), amp=2)
    rng = np.random.default_rng(7)
    c = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    x = np.kron(group_s3.rep[3], c)
    assert np.max(np.abs(amap.expect(x) - x)) < 1e-12


def test_expectation_is_idempotent(c_s3):
    amap = AmplifiedMap(OperatorMap(c_s3, c_s3.rep), amp=2)
    rng = np.random.default_rng(11)
    n = amap.in_dim
    x = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    ex = amap.expect(x)
    assert np.max(np.abs(amap.expect(ex) - ex)) < 1e-11


def test_unital_homomorphism_has_norm_one(all_bialgebras):
    for b in all_bialgebras:
        norm = amplified_norm(OperatorMap(b, b.rep))
        assert abs(norm - 1.0) < 1e-9


def test_character_times_fixed_matrix(group_z2):
    x0 = np.array([[2.0, 1.0], [0.0, 1.0]], dtype=complex)
    chi = group_z2.characters[1]
    theta = OperatorMap(group_z2, chi[:, None, None] * x0[None, :, :])
    expected = np.linalg.norm(x0, 2)
    assert abs(amplified_norm(theta) - expected) < 1e-9


def test_compression_of_representation(group_s3):
    # theta = S* rho(.) S is completely positive, so the amplified norm
    # is attained at the unit: ||theta|| = ||S* S||
    rng = np.random.default_rng(3)
    s = rng.standard_normal((group_s3.rep_dim, 2)) + 1j * rng.standard_normal(
        (group_s3.rep_dim, 2)
    )
    mats = np.einsum("ab,ibc,cd->iad", s.conj().T, group_s3.rep, s)
    theta = OperatorMap(group_s3, mats)
    expected = np.linalg.norm(s.conj().T @ s, 2)
    assert abs(amplified_norm(theta) - expected) < 1e-8 * expected


def test_zero_map_has_zero_norm(c_z2):
    theta = OperatorMap(c_z2, np.zeros((2, 1, 1), dtype=complex))
    assert amplified_norm(theta) == 0.0


def test_scaling_homogeneity(c_z2, c_z2_eval_triple):
    phi = structure_map_from_pair(c_z2_eval_triple, c_z2.counit)
    one = amplified_norm(phi)
    three = amplified_norm(3.0 * phi)
    assert abs(three - 3.0 * one) < 1e-8 * max(one, 1.0)


def test_sampled_bound_never_exceeds_surrogate(group_s3, s3_regular_triple):
    phi = structure_map_from_pair(s3_regular_triple, group_s3.counit)
    surrogate = amplified_norm(phi)
    sampled = sampled_lower_bound(phi, n_samples=800)
    assert 0.0 < sampled <= surrogate * (1.0 + 1e-9)


def test_amplification_beyond_target_dim_adds_nothing(c_z2, c_z2_eval_triple):
    phi = structure_map_from_pair(c_z2_eval_triple, c_z2.counit)
    base = amplified_norm(phi)
    more = amplified_norm(phi, amp=phi.dim + 2)
    assert more <= base * (1.0 + 1e-9)
    assert more >= base * (1.0 - 1e-9)
