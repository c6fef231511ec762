import numpy as np
import pytest
from hypothesis import given, strategies as st

from mclab.errors import IndefiniteMatrix, NonHermitian
from mclab.opcore import (OperatorTuple, adjoint, defects, opnorm, psd_sqrt, random_commuting_tuple,
                          random_unitary, row_norm, validate_tuple, word_trace_invariants)


def test_psd_sqrt_identity_and_diagonal():
    assert np.allclose(psd_sqrt(np.eye(2)), np.eye(2))
    assert np.allclose(psd_sqrt(np.diag([4.0, 0.0])), np.diag([2.0, 0.0]))


def test_psd_sqrt_square_and_compare(rng):
    Q = random_unitary(2, rng)
    M = Q @ np.diag([0.25, 0.81]) @ adjoint(Q)
    R = psd_sqrt(M)
    assert opnorm(R @ R - M) <= 1e-12
    assert opnorm(R - Q @ np.diag([0.5, 0.9]) @ adjoint(Q)) <= 1e-12


def test_psd_sqrt_rejects_bad_input():
    with pytest.raises(NonHermitian):
        psd_sqrt(np.array([[1.0, 1.0], [0.0, 1.0]]))
    with pytest.raises(IndefiniteMatrix):
        psd_sqrt(np.diag([1.0, -0.1]))


def test_psd_sqrt_ulp_eigenvalues_vanish():
    # roots of rounding-level eigenvalues must not leave the numerical range
    M = np.diag([1.0, 2e-16])
    assert psd_sqrt(M)[1, 1] == 0.0


def test_defects_scalar_cases():
    dp = defects(OperatorTuple(np.zeros((1, 1, 1))))
    assert np.allclose(dp.bigD, [[1]]) and np.allclose(dp.bigDstar, [[1]])
    assert dp.rank == dp.rank_star == 1
    dp = defects(OperatorTuple(np.zeros((2, 1, 1))))
    assert np.allclose(dp.bigD, np.eye(2)) and np.allclose(dp.bigDstar, [[1]])
    assert (dp.rank, dp.rank_star) == (2, 1)
    dp = defects(OperatorTuple([[[0.6]]]))
    assert np.allclose(dp.bigD, [[0.8]]) and np.allclose(dp.bigDstar, [[0.8]])


@given(st.integers(0, 10**6))
def test_defect_bases_are_orthonormal_and_span_ranges(seed):
    T = random_commuting_tuple(3, 2, seed, margin=0.0)
    dp = defects(T)
    for Q, D in ((dp.basisD, dp.bigD), (dp.basisDstar, dp.bigDstar)):
        assert opnorm(adjoint(Q) @ Q - np.eye(Q.shape[1])) <= 1e-12
        assert opnorm(Q @ adjoint(Q) @ D - D) <= 1e-10


def test_validate_tuple_cases(rng):
    J = np.diag([1.0, 1.0], k=1) / 2
    d = validate_tuple(OperatorTuple([J, J]))
    assert d.ok
    X, Y = rng.standard_normal((2, 3, 3)) * 0.2
    d = validate_tuple(OperatorTuple([X, Y]))
    assert not d.commute_ok and d.max_commutator > 1e-3


def test_generator_contract():
    T = random_commuting_tuple(4, 2, 7, 0.1)
    assert abs(row_norm(T) - 0.9) <= 1e-10
    assert validate_tuple(T).max_commutator < 1e-12
    S = random_commuting_tuple(1, 3, 0, 0.5)
    assert abs(np.linalg.norm(S.ops.ravel()) - 0.5) <= 1e-12
    assert np.array_equal(random_commuting_tuple(4, 2, 7, 0.1).ops, T.ops)


def test_nilpotent_generator():
    T = random_commuting_tuple(4, 2, 3, 0.2, nilpotent=True)
    P = np.eye(4)
    for k in range(4):
        P = P @ T[k % 2]
    assert opnorm(P) <= 1e-14


def test_word_traces_scalar_and_negation():
    T = OperatorTuple([[[0.5]]])
    w = word_trace_invariants(T, 2)
    table = dict(zip(w.words, w.traces))
    assert table[("1",)] == 0.5
    assert table[("1", "1*")] == 0.25
    assert table[()] == 1
    neg = word_trace_invariants(-T, 1)
    assert neg.traces[1] == -0.5


def test_word_traces_unitary_invariance(rng):
    T = random_commuting_tuple(3, 2, 11, 0.1)
    U = random_unitary(3, rng)
    C = OperatorTuple(adjoint(U)[None] @ T.ops @ U[None])
    assert word_trace_invariants(T, 3).distance(word_trace_invariants(C, 3)) <= 1e-12


def test_operator_tuple_is_read_only():
    T = OperatorTuple(np.zeros((1, 2, 2)))
    with pytest.raises(ValueError):
        T.ops[0, 0, 0] = 1
