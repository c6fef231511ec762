import numpy as np
import pytest
from hypothesis import given, strategies as st

from mclab.arveson import (DualityFailure, L_matrix, Lstar_series, TruncatedSpace, a_infinity, classify,
                           class_preservation_suite, conjugate, direct_sum, gram, identity_LA_partial,
                           identity_Lth_truncated, kernel, kernel_invariance_checks, lth_exactness_gap,
                           model_space, random_spherical_tuple, rho, shift_matrices, spherical_check,
                           spherical_preservation, theta_zero_multishift_check, truncated_multishift)
from mclab.ball import Automorphism, random_ball_point
from mclab.errors import NotPure, TruncationUnsound
from mclab.opcore import (OperatorTuple, adjoint, defects, opnorm, random_commuting_tuple, random_unitary,
                          validate_tuple, word_trace_invariants)


def test_kernel_and_gram(rng):
    assert abs(kernel([0.5], [0.5]) - 4 / 3) <= 1e-15
    pts = [random_ball_point(2, rng, 0.95) for _ in range(5)]
    assert np.linalg.eigvalsh(gram(pts))[0] >= -1e-12


def test_truncated_space_order_and_weights():
    sp = TruncatedSpace(2, 2)
    assert sp.indices == ((0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2))
    assert abs(sp.weights[sp.position((1, 1))] - 1 / np.sqrt(2)) <= 1e-15


def test_multishift_small_cases():
    S = truncated_multishift(2, 1)
    assert S.dim == 3
    e = np.eye(3)
    assert np.allclose(S[0] @ e[:, 0], e[:, 1])
    assert np.allclose(S[0] @ e[:, 2], 0)
    assert opnorm(np.eye(3) - rho(S, np.eye(3)) - np.diag([1, 0, 0])) <= 1e-15
    S2 = truncated_multishift(2, 2)
    sp = TruncatedSpace(2, 2)
    v = S2[0] @ np.eye(6)[:, sp.position((0, 1))]
    assert abs(v[sp.position((1, 1))] - 1 / np.sqrt(2)) <= 1e-15


@given(st.integers(1, 3), st.integers(0, 4))
def test_multishift_commutes(n, N):
    S = truncated_multishift(n, N)
    assert validate_tuple(S).ok
    P0 = np.zeros((S.dim, S.dim))
    P0[0, 0] = 1
    assert opnorm(np.eye(S.dim) - rho(S, np.eye(S.dim)) - P0) <= 1e-14


def test_a_infinity_cases():
    rep = a_infinity(OperatorTuple([[[1.0]]]))
    assert rep.converged and rep.iterations == 1 and abs(rep.maxEig - 1) <= 1e-15
    T = random_commuting_tuple(3, 2, 1, 0.1)
    rep = a_infinity(T)
    assert rep.converged and rep.maxEig <= 1e-12 and rep.monotoneDefect >= -1e-14
    S = truncated_multishift(2, 3)
    assert a_infinity(S).zeroStep == 4


def test_classification_examples(rng):
    S = truncated_multishift(2, 2)
    Z = random_spherical_tuple(3, 2, rng)
    assert classify(S).flags() == {"isPure": True, "isC1": False, "isCnc": True}
    assert classify(Z).flags() == {"isPure": False, "isC1": True, "isCnc": False}
    assert classify(direct_sum(S, Z)).flags() == {"isPure": False, "isC1": False, "isCnc": False}


def test_classification_indeterminate_flags():
    D = OperatorTuple([np.diag([0.0, 1.0])])
    assert classify(D).isPure is False
    # eigenvalue 1 of A_inf falls inside (tol_zero, 10 tol_zero) when tol_zero = 0.2
    assert classify(D, tol_zero=0.2).isPure is None
    rep = classify(OperatorTuple([[[np.sqrt(1 - 5e-8)]]]), k_max=10)
    assert not rep.converged and rep.flags() == {"isPure": None, "isC1": None, "isCnc": None}


def test_L_matrix_trivial_cases():
    T = OperatorTuple([[[0.0]]])
    L = L_matrix(T, TruncatedSpace(1, 3))
    assert np.allclose(L, [[1, 0, 0, 0]])
    U = random_commuting_tuple(3, 2, 4, 0.2)
    dp = defects(U)
    assert np.allclose(L_matrix(U, TruncatedSpace(2, 0), dp), dp.bigDstar @ dp.basisDstar)


def test_L_intertwines_shift_below_top_degree():
    T = random_commuting_tuple(3, 2, 5, 0.1)
    sp = TruncatedSpace(2, 3)
    dp = defects(T)
    L = L_matrix(T, sp, dp)
    rs = dp.rank_star
    low = np.repeat(~sp.degree_mask(3), rs)
    for i, s in enumerate(shift_matrices(sp)):
        lhs = L @ np.kron(s, np.eye(rs))
        assert opnorm((lhs - T[i] @ L)[:, low]) <= 1e-12


def test_Lstar_series(rng):
    T = random_commuting_tuple(3, 2, 6, 0.1)
    sp = TruncatedSpace(2, 4)
    L = L_matrix(T, sp)
    for _ in range(20):
        h = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        f = rng.standard_normal(L.shape[1]) + 1j * rng.standard_normal(L.shape[1])
        Ls = Lstar_series(T, h, sp)
        assert abs(np.vdot(f, Ls) - np.vdot(L @ f, h)) <= 1e-12
    Z = OperatorTuple([[[0.0]]])
    assert np.allclose(Lstar_series(Z, np.array([2.0]), TruncatedSpace(1, 3)), [2, 0, 0, 0])


def test_Lstar_series_terminates_for_nilpotent():
    T = random_commuting_tuple(3, 2, 7, 0.1, nilpotent=True)
    h = np.array([1.0, 2.0, 3.0])
    small = Lstar_series(T, h, TruncatedSpace(2, 3))
    big = Lstar_series(T, h, TruncatedSpace(2, 5))
    assert np.allclose(big[:small.size], small) and np.allclose(big[small.size:], 0)


def test_Lstar_duality_failure_detected(monkeypatch):
    import mclab.arveson as arv
    T = random_commuting_tuple(2, 1, 1, 0.2)
    monkeypatch.setattr(arv, "L_matrix", lambda *a, **k: np.zeros((2, 4 * defects(T).rank_star)))
    with pytest.raises(DualityFailure):
        Lstar_series(T, np.ones(2), TruncatedSpace(1, 3))


def test_partial_sum_identity_cases():
    U = OperatorTuple([[[np.exp(0.3j)]]])
    assert L_matrix(U, TruncatedSpace(1, 2)).size == 0 or opnorm(L_matrix(U, TruncatedSpace(1, 2))) == 0
    assert identity_LA_partial(U, 2) <= 1e-15


@given(st.integers(0, 10**6), st.integers(0, 6))
def test_partial_sum_identity_property(seed, N):
    T = random_commuting_tuple(4, 3, seed, 0.05)
    assert identity_LA_partial(T, N) <= 1e-11


def test_compressed_identity_cases():
    assert identity_Lth_truncated(OperatorTuple([[[0.0]]]), 4) <= 1e-15
    assert identity_Lth_truncated(OperatorTuple(np.zeros((2, 1, 1))), 3) <= 1e-12


@given(st.integers(0, 10**6), st.integers(0, 4))
def test_compressed_identity_property(seed, N):
    rng = np.random.default_rng(seed)
    T = random_commuting_tuple(int(rng.integers(1, 6)), int(rng.integers(1, 4)), seed, rng.uniform(0, 0.5))
    assert lth_exactness_gap(T, min(N, 3)) <= 1e-12
    assert identity_Lth_truncated(T, N) <= 1e-9


def test_model_space_trivial_and_jordan():
    md = model_space(OperatorTuple([[[0.0]]]), 2)
    assert md.modelTuple.dim == 1 and abs(abs(md.phiMatrix[0, 0]) - 1) <= 1e-12
    J = OperatorTuple([np.array([[0, 0.7], [0, 0]])])
    md = model_space(J, 3)
    assert md.modelTuple.dim == 2
    assert word_trace_invariants(md.modelTuple, 4).distance(word_trace_invariants(J, 4)) <= 1e-9


def test_model_space_commuting_pair():
    T = random_commuting_tuple(3, 2, 12, 0.1, nilpotent=True)
    md = model_space(T, 4)
    assert md.residuals["unitary"] <= 1e-9 and md.residuals["intertwining"] <= 1e-9


def test_model_space_rejects_bad_inputs(rng):
    with pytest.raises(NotPure):
        model_space(random_spherical_tuple(2, 2, rng), 2)
    T = random_commuting_tuple(3, 1, 2, 0.3, nilpotent=True)
    with pytest.raises(TruncationUnsound):
        model_space(T, 1)


def test_multishift_charfn_not_zero():
    vanishes, worst = theta_zero_multishift_check(truncated_multishift(2, 2))
    assert not vanishes and worst > 0.1


def test_spherical_examples(rng):
    Z = OperatorTuple([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])
    assert spherical_check(Z).ok
    Z = random_spherical_tuple(4, 2, rng, conjugate=False)
    assert spherical_preservation(Z, random_ball_point(2, rng, 0.9)).ok
    rep = spherical_check(truncated_multishift(2, 2))
    assert not rep.ok and rep.unitSum > 0.5


def test_kernel_invariance_block_structure(rng):
    P = random_commuting_tuple(2, 2, 3, 0.2)
    Z = random_spherical_tuple(2, 2, rng, conjugate=False)
    T = direct_sum(P, Z)
    res = kernel_invariance_checks(T, random_ball_point(2, rng, 0.7))
    assert max(res.values()) <= 1e-9
    w, V = np.linalg.eigh(a_infinity(T).aInf)
    ker = V[:, w < 1e-8]
    assert opnorm(ker[2:, :]) <= 1e-9          # kernel is the pure summand
    res = kernel_invariance_checks(Z, random_ball_point(2, rng, 0.7))
    assert res["angle"] <= 1e-12


@given(st.integers(0, 10**6))
def test_kernel_invariance_mixed(seed):
    rng = np.random.default_rng(seed)
    M = direct_sum(random_commuting_tuple(2, 2, seed, 0.2), random_spherical_tuple(2, 2, rng))
    T = conjugate(M, random_unitary(4, rng))
    assert max(kernel_invariance_checks(T, random_ball_point(2, rng, 0.7)).values()) <= 1e-8


def test_class_preservation_examples(rng):
    alpha = Automorphism(random_unitary(2, rng), random_ball_point(2, rng, 0.7))
    out = class_preservation_suite(truncated_multishift(2, 2), alpha)
    assert out["agree"] and out["after"]["isPure"]
    out = class_preservation_suite(random_spherical_tuple(3, 2, rng), alpha)
    assert out["agree"] and out["after"]["isC1"]
