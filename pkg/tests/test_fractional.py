import numpy as np
import pytest
from hypothesis import given, strategies as st

from mclab.ball import lift
from mclab.errors import HypothesisViolated, ShapeMismatch, SingularResolvent
from mclab.fractional import (defect_identity_residuals, intertwining_residual, omega_pair,
                              prop_hypotheses, psi, psi_minus_symmetry_residual)
from mclab.opcore import adjoint, opnorm, random_commuting_tuple, random_contraction, random_unitary


def mobius(a, w):
    return (a + w) / (1 + w * np.conj(a))


def test_psi_trivial_cases(rng):
    A = random_contraction(3, 2, rng, 0.7)
    W = random_contraction(3, 2, rng, 0.7)
    assert opnorm(psi(A, np.zeros_like(A)).full - A) <= 1e-15
    assert opnorm(psi(np.zeros_like(W), W).full - W) <= 1e-15


def test_psi_scalar_oracle():
    assert abs(psi([[0.6]], [[0.5]]).full[0, 0] - 1.1 / 1.3) <= 1e-15
    rng = np.random.default_rng(1)
    for _ in range(20):
        a, w = (complex(*rng.uniform(-0.6, 0.6, 2)) for _ in range(2))
        assert abs(psi([[a]], [[w]]).full[0, 0] - mobius(a, w)) <= 1e-14


def test_psi_shape_and_resolvent_errors(rng):
    with pytest.raises(ShapeMismatch):
        psi(np.zeros((2, 2)), np.zeros((2, 3)))
    U = random_unitary(2, rng)
    with pytest.raises(SingularResolvent):
        psi(U, -U)


def test_sign_symmetry_cases(rng):
    assert psi_minus_symmetry_residual([[0.6]], [[0.5]]) <= 1e-12
    W = random_contraction(3, 3, rng, 0.8)
    assert psi_minus_symmetry_residual(np.zeros((3, 3)), W) == 0.0


@given(st.integers(0, 10**6))
def test_sign_symmetry_property(seed):
    rng = np.random.default_rng(seed)
    A, W = (random_contraction(3, 3, rng, rng.uniform(0.05, 0.9)) for _ in range(2))
    assert psi_minus_symmetry_residual(A, W) <= 1e-10


def test_defect_identities_special_cases(rng):
    A = random_contraction(3, 2, rng, 0.6)
    Q = np.linalg.qr(rng.standard_normal((3, 2)) + 1j * rng.standard_normal((3, 2)))[0]
    P = psi(A, Q).full
    assert opnorm(np.eye(2) - adjoint(P) @ P) <= 1e-10
    assert max(defect_identity_residuals(A, Q)) <= 1e-10
    assert max(defect_identity_residuals(A, np.zeros_like(A))) <= 1e-12


@given(st.integers(0, 10**6))
def test_defect_identities_property(seed):
    rng = np.random.default_rng(seed)
    A, W = (random_contraction(4, 4, rng, rng.uniform(0.05, 0.9)) for _ in range(2))
    r1, r2 = defect_identity_residuals(A, W)
    assert max(r1, r2) <= 1e-9
    assert opnorm(psi(A, W).full) <= 1 + 1e-12


def test_omega_for_zero_A_is_basis_change(rng):
    W = random_contraction(3, 2, rng, 0.7)
    pair = omega_pair(np.zeros_like(W), W)
    for X in (pair.omega, pair.omegaStar):
        assert opnorm(adjoint(X) @ X - np.eye(X.shape[1])) <= 1e-10


def test_omega_unitary_in_automorphism_setup(rng):
    T = random_commuting_tuple(3, 2, 4, 0.2)
    pair = omega_pair(lift([0.3, 0.2j], 3), -T.row)
    assert pair.isUnitary


@given(st.integers(0, 10**6))
def test_omega_is_isometric(seed):
    rng = np.random.default_rng(seed)
    A = random_contraction(3, 2, rng, rng.uniform(0.05, 0.9))
    W = random_contraction(3, 2, rng, rng.uniform(0.05, 0.9))
    pair = omega_pair(A, W)
    assert pair.omegaIsometry <= 1e-9 and pair.omegaStarIsometry <= 1e-9


def test_intertwining_scalar_triple():
    assert intertwining_residual([[0.3]], [[0.4]], [[0.2]]) <= 1e-12
    # both sides are unimodular multiples of the same Moebius compositions
    lhs = psi(psi([[0.3]], [[0.4]]).full, [[0.2]]).full[0, 0]
    rhs = psi([[0.4]], psi([[0.3]], [[0.2]]).full).full[0, 0]
    assert abs(abs(lhs) - abs(mobius(mobius(0.3, 0.4), 0.2))) <= 1e-15
    assert abs(abs(rhs) - abs(mobius(0.4, mobius(0.3, 0.2)))) <= 1e-15


def test_intertwining_with_zero_V(rng):
    A, W = (random_contraction(3, 3, rng, 0.6) for _ in range(2))
    assert intertwining_residual(A, W, np.zeros((3, 3))) <= 1e-10


@given(st.integers(0, 10**6))
def test_intertwining_property(seed):
    rng = np.random.default_rng(seed)
    A, W, V = (random_contraction(3, 3, rng, 0.7) for _ in range(3))
    assert intertwining_residual(A, W, V) <= 1e-9


def test_hypothesis_violation_detected(rng):
    U = random_unitary(2, rng)
    with pytest.raises(HypothesisViolated):
        prop_hypotheses(U, random_contraction(2, 2, rng, 0.5), -U)
    with pytest.raises(HypothesisViolated):
        intertwining_residual(U, -U, random_contraction(2, 2, rng, 0.5))
