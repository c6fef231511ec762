"""Characteristic function of a commuting multicontraction.

    theta_T(z) = -T + D_{T*} (I - z T*)^{-1} z D_T : D_T -> D_{T*},

where ``z = (z_1 I ... z_n I)``.  Values are returned as matrices between
the orthonormal defect bases produced by :func:`mclab.opcore.defects`.
"""
from dataclasses import dataclass, field

import numpy as np

from . import multiindex as mi
from .ball import apply_unitary, as_point, lift, phi_point, phi_tuple
from .errors import ShapeMismatch, SingularResolvent, ToleranceAmbiguous, UnitarityFailure
from .fractional import check_resolvent, omega_pair
from .opcore import DefectPair, adjoint, as_tuple, defects, opnorm

SURJ_TOL = 1e-8


@dataclass(frozen=True)
class CharacteristicFunction:
    """Evaluator ``z -> theta_T(z)`` bound to fixed defect bases."""

    T: object
    dp: DefectPair = None

    def __post_init__(self):
        T = as_tuple(self.T)
        object.__setattr__(self, "T", T)
        if self.dp is None:
            object.__setattr__(self, "dp", defects(T))

    @property
    def shape(self):
        return self.dp.rank_star, self.dp.rank

    def ambient(self, z):
        """``theta_T(z)`` as the full ``d x n*d`` matrix."""
        T, dp = self.T, self.dp
        z = as_point(z)
        if z.shape[0] != T.n:
            raise ShapeMismatch(f"z has {z.shape[0]} coordinates, T has {T.n} operators")
        if np.linalg.norm(z) >= 1:
            raise SingularResolvent(f"|z| = {np.linalg.norm(z):.6f} is not inside the ball")
        Z = lift(z, T.dim)
        R = np.eye(T.dim) - Z @ adjoint(T.row)
        check_resolvent(R, "I - z T*")
        return -T.row + dp.bigDstar @ np.linalg.solve(R, Z @ dp.bigD)

    def __call__(self, z):
        return adjoint(self.dp.basisDstar) @ self.ambient(z) @ self.dp.basisD


def theta_eval(T, z):
    return CharacteristicFunction(T)(z)


@dataclass
class TaylorTable:
    """Coefficients ``Theta_alpha`` of ``theta_T(z) = sum Theta_alpha z^alpha``."""

    n: int
    maxDegree: int
    coeffs: dict = field(default_factory=dict)

    def __call__(self, z):
        z = as_point(z)
        out = None
        for alpha, C in self.coeffs.items():
            term = np.prod(z ** np.array(alpha)) * C
            out = term if out is None else out + term
        return out

    def __getitem__(self, alpha):
        return self.coeffs[tuple(alpha)]


def _adjoint_powers(T, indices):
    """``T*^beta`` for every ``beta`` in ``indices`` (graded order, so parents come first)."""
    Ts = adjoint(T.ops)
    out = {indices[0]: np.eye(T.dim, dtype=complex)}
    for beta in indices[1:]:
        j = next(i for i, b in enumerate(beta) if b > 0)
        out[beta] = out[mi.sub(beta, mi.unit(T.n, j))] @ Ts[j]
    return out


def theta_taylor(T, max_degree, dp=None):
    """Power series coefficients of ``theta_T`` up to total degree ``max_degree``.

    Expanding the Neumann series with commuting ``T_i*`` gives, for ``|alpha| >= 1``,

        Theta_alpha = D_{T*} sum_{j: alpha_j >= 1} c(alpha - e_j) T*^(alpha - e_j) D_T[block row j]

    with ``c(beta) = |beta|! / beta!``; ``Theta_0 = -T``.  Everything is then
    compressed to the defect bases.
    """
    T = as_tuple(T)
    dp = dp or defects(T)
    d, n = T.dim, T.n
    Qs, Q = dp.basisDstar, dp.basisD
    idx = mi.graded_indices(n, max_degree)
    powers = _adjoint_powers(T, mi.graded_indices(n, max(max_degree - 1, 0)))
    rows = [dp.bigD[j * d:(j + 1) * d, :] @ Q for j in range(n)]
    left = adjoint(Qs) @ dp.bigDstar
    table = TaylorTable(n, max_degree)
    table.coeffs[idx[0]] = -adjoint(Qs) @ T.row @ Q
    for alpha in idx[1:]:
        acc = np.zeros((d, Q.shape[1]), complex)
        for j in range(n):
            if alpha[j] == 0:
                continue
            beta = mi.sub(alpha, mi.unit(n, j))
            acc += mi.multinomial(beta) * (powers[beta] @ rows[j])
        table.coeffs[alpha] = left @ acc
    return table


@dataclass(frozen=True)
class CoincidenceCertificate:
    omega1: np.ndarray
    omega2: np.ndarray
    samplePoints: list
    maxResidual: float
    omega1Unitarity: float = 0.0
    omega2Unitarity: float = 0.0


def _unitarity(X):
    if X.shape[0] != X.shape[1]:
        return np.inf
    k = X.shape[0]
    return max(opnorm(adjoint(X) @ X - np.eye(k)), opnorm(X @ adjoint(X) - np.eye(k)))


def coincidence_residual(theta_a, theta_b, omega1, omega2, samples):
    """Max over samples of ``||omega2 theta_a(z) - theta_b(z) omega1||``.

    Only certifies given unitaries; it never searches for them.  A wrong
    pair simply produces a large residual.
    """
    omega1 = np.asarray(omega1, dtype=complex)
    omega2 = np.asarray(omega2, dtype=complex)
    worst = 0.0
    for z in samples:
        a, b = theta_a(z), theta_b(z)
        if omega2.shape[1] != a.shape[0] or omega1.shape[0] != b.shape[1] \
                or omega2.shape[0] != b.shape[0] or omega1.shape[1] != a.shape[1]:
            raise ShapeMismatch(
                f"incompatible shapes: theta_a {a.shape}, theta_b {b.shape}, "
                f"omega1 {omega1.shape}, omega2 {omega2.shape}")
        worst = max(worst, opnorm(omega2 @ a - b @ omega1))
    return CoincidenceCertificate(omega1, omega2, [as_point(z) for z in samples], worst,
                                  _unitarity(omega1), _unitarity(omega2))


def theorem_theta_check(T, lam, samples, iso_tol=1e-9):
    """Certify that ``theta_{phi_lambda(T)}`` coincides with ``theta_T o phi_lambda``.

    The unitaries are ``Omega``, ``Omega_*`` from :func:`omega_pair` with
    ``A = lambda (x) 1`` and ``W = -T``.  Carried through the sign identities
    the relation reads ``Omega_* theta_{phi(T)}(z) = -theta_T(phi(z)) Omega``,
    so the domain unitary of the certificate is ``-Omega``.
    """
    T = as_tuple(T)
    lam = as_point(lam)
    pair = omega_pair(lift(lam, T.dim), -T.row, iso_tol=iso_tol)
    if not (pair.omegaUnitary and pair.omegaStarUnitary):
        raise UnitarityFailure(
            f"Omega unitary: {pair.omegaUnitary} (iso {pair.omegaIsometry:.2e}), "
            f"Omega_* unitary: {pair.omegaStarUnitary} (iso {pair.omegaStarIsometry:.2e})")
    R = phi_tuple(lam, T)
    # psiDefects are the defects of Psi_lambda(-T) = phi_lambda(T); wDefects those of -T,
    # which coincide with the defects of T
    theta_R = CharacteristicFunction(R, pair.psiDefects)
    theta_T = CharacteristicFunction(T, pair.wDefects)
    return coincidence_residual(theta_R, lambda z: theta_T(phi_point(lam, z)),
                                -pair.omega, pair.omegaStar, samples)


def lemma_omega_check(T, omega, samples):
    """Certify that ``theta_{T'}(z)`` coincides with ``theta_T(z omega*)`` for ``T' = T (1 (x) omega)``.

    Domain unitary: ``1 (x) omega`` restricted to ``D_{T'} -> D_T``; codomain
    unitary: the change of basis inside ``D_{T'*} = D_{T*}``.
    """
    T = as_tuple(T)
    omega = np.asarray(omega, dtype=complex)
    Tp = apply_unitary(T, omega)
    dT, dTp = defects(T), defects(Tp)
    K = np.kron(omega, np.eye(T.dim))
    om1 = adjoint(dT.basisD) @ K @ dTp.basisD
    om2 = adjoint(dT.basisDstar) @ dTp.basisDstar
    th, thp = CharacteristicFunction(T, dT), CharacteristicFunction(Tp, dTp)
    return coincidence_residual(thp, lambda z: th(as_point(z) @ adjoint(omega)), om1, om2, samples)


def right_spectrum_gap(T, lam):
    """Smallest eigenvalue of ``sum (T_i - lambda_i)(T_i - lambda_i)*``."""
    T = as_tuple(T)
    lam = as_point(lam)
    shifted = T.ops - lam[:, None, None] * np.eye(T.dim)[None]
    G = np.einsum("iab,icb->ac", shifted, np.conj(shifted))
    return float(np.linalg.eigvalsh((G + adjoint(G)) / 2)[0])


def sigma_r_member(T, lam, tol=SURJ_TOL):
    """``(lambda in sigma_r(T), witness)`` with the witness the smallest eigenvalue."""
    gap = right_spectrum_gap(T, lam)
    return gap <= tol, gap


def surjectivity_gap(theta_value):
    """Smallest eigenvalue of ``theta theta*`` (``inf`` for an empty codomain)."""
    if theta_value.shape[0] == 0:
        return np.inf
    if theta_value.shape[1] == 0:
        return 0.0
    G = theta_value @ adjoint(theta_value)
    return float(np.linalg.eigvalsh((G + adjoint(G)) / 2)[0])


def _decide(value, tol, label):
    if tol < value < 10 * tol:
        raise ToleranceAmbiguous(f"{label} = {value:.3e} lies in the ambiguity band ({tol:g}, {10 * tol:g})")
    return value <= tol


def spectrum_charfn_consistency(T, lam, tol=SURJ_TOL):
    """Does ``lambda in sigma_r(T)`` agree with non-surjectivity of ``theta_T(lambda)``?

    ``phi_lambda`` sends ``lambda`` to ``0`` and the coincidence of
    ``theta_{phi_lambda(T)}`` with ``theta_T o phi_lambda`` at ``z = 0``
    evaluates ``theta_T`` at ``phi_lambda(0) = lambda``.
    """
    lam = as_point(lam)
    if np.linalg.norm(lam) >= 1:
        raise ValueError("lambda must lie in the open ball")
    in_spec = _decide(right_spectrum_gap(T, lam), tol, "right spectrum gap")
    not_surj = _decide(surjectivity_gap(theta_eval(T, lam)), tol, "surjectivity gap")
    return in_spec == not_surj
