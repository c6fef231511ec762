"""Automorphisms of the unit ball of C^n and their action on operator tuples.

Points are 1-D complex arrays, read as ``1 x n`` row vectors.  The unitary
part of an automorphism acts by right multiplication, on points as
``z @ omega`` and on tuples as ``T'_k = sum_j omega[j, k] T_j``, so the two
actions agree on ``1 x 1`` tuples.
"""
from dataclasses import dataclass

import numpy as np

from .errors import CommutativityLost, NotUnitary, PoleHit
from .fractional import psi
from .opcore import TOL_COMMUTE, TOL_CONTRACT, OperatorTuple, adjoint, as_tuple, opnorm, validate_tuple

POLE_TOL = 1e-12
UNITARY_TOL = 1e-10


def as_point(z):
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if z.ndim != 1:
        raise ValueError("a ball point is a 1-D vector")
    return z


def inner(z, w):
    """``<z, w> = sum z_i conj(w_i)``."""
    return complex(np.sum(as_point(z) * np.conj(as_point(w))))


def check_unitary(omega, tol=UNITARY_TOL):
    omega = np.asarray(omega, dtype=complex)
    if omega.ndim != 2 or omega.shape[0] != omega.shape[1]:
        raise NotUnitary(f"omega must be square, got shape {omega.shape}")
    err = opnorm(adjoint(omega) @ omega - np.eye(omega.shape[0]))
    if err > tol:
        raise NotUnitary(f"||omega* omega - I|| = {err:.3e}")
    return omega


@dataclass(frozen=True)
class Automorphism:
    """``alpha = omega o phi_lambda``."""

    unitary: np.ndarray
    center: np.ndarray

    def __post_init__(self):
        c = as_point(self.center)
        if np.linalg.norm(c) >= 1:
            raise ValueError("center must lie in the open ball")
        w = check_unitary(self.unitary)
        if w.shape[0] != c.shape[0]:
            raise ValueError("unitary and center dimensions differ")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "unitary", w)

    @property
    def n(self):
        return self.center.shape[0]

    @classmethod
    def identity_unitary(cls, lam):
        lam = as_point(lam)
        return cls(np.eye(lam.shape[0], dtype=complex), lam)


def phi_point(lam, z, pole_tol=POLE_TOL):
    """Involutive automorphism ``phi_lambda`` exchanging ``0`` and ``lambda``.

    For ``lambda = 0`` the projection onto ``span(lambda)`` is taken to be 0,
    giving ``phi_0(z) = -z``.
    """
    lam, z = as_point(lam), as_point(z)
    nl2 = float(np.vdot(lam, lam).real)
    if nl2 >= 1:
        raise ValueError("lambda must lie in the open ball")
    s = np.sqrt(1 - nl2)
    ip = inner(z, lam)
    if abs(1 - ip) <= pole_tol:
        raise PoleHit(f"<z, lambda> = {ip} is too close to 1")
    Pz = ip / nl2 * lam if nl2 > 0 else np.zeros_like(z)
    return lam - s / (1 - ip) * (z - (1 - s) * Pz)


def phi_psi_agreement(lam, z):
    """``|phi_lambda(z) - Psi_lambda(-z)|`` with points read as ``1 x n`` contractions."""
    lam, z = as_point(lam), as_point(z)
    return float(np.linalg.norm(phi_point(lam, z) - psi(lam[None], -z[None]).full[0]))


def lift(lam, dim):
    """``lambda (x) 1_H`` as the ``d x n*d`` block row ``(lambda_1 I ... lambda_n I)``."""
    return np.kron(as_point(lam)[None, :], np.eye(dim))


def phi_tuple(lam, T, tol_commute=TOL_COMMUTE, tol_contract=TOL_CONTRACT):
    """``phi_lambda(T) = Psi_{lambda (x) 1}(-T)``, split back into ``n`` operators."""
    T = as_tuple(T)
    lam = as_point(lam)
    if lam.shape[0] != T.n:
        raise ValueError(f"lambda has {lam.shape[0]} coordinates but T has {T.n} operators")
    out = OperatorTuple.from_row(psi(lift(lam, T.dim), -T.row).full, T.n)
    diag = validate_tuple(out, tol_commute, tol_contract)
    if not diag.ok:
        raise CommutativityLost(
            f"phi_lambda(T) is not a commuting contraction "
            f"(commutator {diag.max_commutator:.3e}, row norm {diag.row_norm:.12f})")
    return out


def apply_unitary(T, omega):
    """``T (1_H (x) omega)``, i.e. ``T'_k = sum_j omega[j, k] T_j``."""
    T = as_tuple(T)
    omega = check_unitary(omega)
    return OperatorTuple(np.einsum("jk,jab->kab", omega, T.ops))


def apply_automorphism(alpha, T):
    return apply_unitary(phi_tuple(alpha.center, T), alpha.unitary)


def eval_automorphism(alpha, z):
    return phi_point(alpha.center, z) @ alpha.unitary


def eval_inverse(alpha, z):
    """``alpha^{-1}(z) = phi_lambda(z omega*)``."""
    return phi_point(alpha.center, as_point(z) @ adjoint(alpha.unitary))


def random_ball_point(n, rng, radius=None):
    """Uniform direction, radius uniform in ``[0, radius)`` (``radius`` defaults to 1)."""
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    v /= np.linalg.norm(v)
    r = rng.uniform(0, 1.0 if radius is None else radius)
    return r * v


def random_sphere_point(n, rng):
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return v / np.linalg.norm(v)
