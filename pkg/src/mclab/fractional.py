"""Fractional transforms of contractions.

For contractions ``A, W : E1 -> E2`` with ``I + W A*`` invertible,

    Psi_A(W) = A + D_{A*} (I + W A*)^{-1} W D_A,

and ``psi_A(W)`` is its restriction ``D_A -> D_{A*}`` written on orthonormal
defect bases.  The module also builds the isometries ``Omega``, ``Omega_*``
that identify the defect spaces of ``Psi_A(W)`` with those of ``W`` and
measures the residuals of the identities these objects satisfy.
"""
from dataclasses import dataclass

import numpy as np

from .errors import HypothesisViolated, InconsistentDefinition, ShapeMismatch, SingularResolvent
from .opcore import RANK_TOL, DefectPair, adjoint, defect_pair, opnorm

INV_TOL = 1e-12
MAX_COND = 1e8
ISO_TOL = 1e-9


@dataclass(frozen=True)
class FractionalResult:
    full: np.ndarray
    restricted: np.ndarray
    condNumber: float
    defectsA: DefectPair


@dataclass(frozen=True)
class OmegaPair:
    omega: np.ndarray
    omegaStar: np.ndarray
    omegaIsometry: float
    omegaStarIsometry: float
    omegaUnitary: bool
    omegaStarUnitary: bool
    psiDefects: DefectPair
    wDefects: DefectPair

    @property
    def isUnitary(self):
        return self.omegaUnitary, self.omegaStarUnitary


def _as_matrix(M):
    M = np.asarray(M, dtype=complex)
    if M.ndim == 1:
        M = M[None, :]
    return M


def check_resolvent(M, name="I + W A*", inv_tol=INV_TOL, max_cond=MAX_COND):
    """Return the condition number of ``M``; raise if it is numerically singular."""
    if M.shape[0] == 0:
        return 1.0
    s = np.linalg.svd(M, compute_uv=False)
    cond = s[0] / s[-1] if s[-1] > 0 else np.inf
    if s[-1] <= inv_tol or cond > max_cond:
        raise SingularResolvent(
            f"{name} is singular or ill-conditioned (sigma_min={s[-1]:.3e}, cond={cond:.3e})",
            sigma_min=s[-1], cond=cond)
    return float(cond)


def psi(A, W, inv_tol=INV_TOL, max_cond=MAX_COND, rank_tol=RANK_TOL):
    """Fractional transform ``Psi_A(W)`` together with its defect-space restriction."""
    A = _as_matrix(A)
    W = _as_matrix(W)
    if A.shape != W.shape:
        raise ShapeMismatch(f"A has shape {A.shape} but W has shape {W.shape}")
    m2, m1 = A.shape
    dA = defect_pair(A, rank_tol)
    R = np.eye(m2) + W @ adjoint(A)
    cond = check_resolvent(R, "I + W A*", inv_tol, max_cond)
    full = A + dA.bigDstar @ np.linalg.solve(R, W @ dA.bigD)
    restricted = adjoint(dA.basisDstar) @ full @ dA.basisD
    return FractionalResult(full, restricted, cond, dA)


def psi_minus_symmetry_residual(A, W, **kw):
    """``||Psi_{-A}(-W) + Psi_A(W)||`` and the same for the restricted forms."""
    A = _as_matrix(A)
    W = _as_matrix(W)
    p = psi(A, W, **kw)
    m = psi(-A, -W, **kw)
    full = opnorm(m.full + p.full)
    # D_A = D_{-A}, so both restrictions live on the same bases
    restricted = opnorm(adjoint(p.defectsA.basisDstar) @ m.full @ p.defectsA.basisD + p.restricted)
    return max(full, restricted)


def defect_identity_residuals(A, W, **kw):
    """Residuals of the two defect identities of the fractional transform.

    ``I - Psi*Psi = D_A (I + W*A)^{-1} (I - W*W) (I + A*W)^{-1} D_A`` and the
    codomain-side companion with ``A*``, ``W*``.
    """
    A = _as_matrix(A)
    W = _as_matrix(W)
    res = psi(A, W, **kw)
    P, dA = res.full, res.defectsA
    m2, m1 = A.shape
    I1, I2 = np.eye(m1), np.eye(m2)
    Ah, Wh = adjoint(A), adjoint(W)
    left = (dA.bigD @ np.linalg.inv(I1 + Wh @ A) @ (I1 - Wh @ W)
            @ np.linalg.inv(I1 + Ah @ W) @ dA.bigD)
    right = (dA.bigDstar @ np.linalg.inv(I2 + W @ Ah) @ (I2 - W @ Wh)
             @ np.linalg.inv(I2 + A @ Wh) @ dA.bigDstar)
    r1 = opnorm(I1 - adjoint(P) @ P - left)
    r2 = opnorm(I2 - P @ adjoint(P) - right)
    return r1, r2


def _intertwiner(span_src, basis_src, target, basis_tgt, tol, label):
    """Matrix ``X`` with ``X (basis_src* span_src) = basis_tgt* target``.

    ``span_src`` is a matrix whose columns span the source defect space and
    ``target`` holds the prescribed images of those columns.
    """
    Xs = adjoint(basis_src) @ span_src
    Yt = adjoint(basis_tgt) @ target
    p, q = basis_src.shape[1], basis_tgt.shape[1]
    scale = max(1.0, opnorm(target))
    # the prescribed images must already lie in the target defect space
    leak = opnorm(basis_tgt @ Yt - target) if target.size else 0.0
    if p == 0:
        if opnorm(target) > tol * scale:
            raise InconsistentDefinition(f"{label}: nonzero images for an empty defect space")
        return np.zeros((q, 0), complex)
    X = adjoint(np.linalg.lstsq(adjoint(Xs), adjoint(Yt), rcond=None)[0])
    resid = opnorm(X @ Xs - Yt)
    if max(resid, leak) > tol * scale:
        raise InconsistentDefinition(
            f"{label}: defining relation not solvable on the defect basis "
            f"(residual {resid:.3e}, leak {leak:.3e})")
    return X


def omega_pair(A, W, rank_tol=RANK_TOL, tol=1e-8, iso_tol=ISO_TOL, **kw):
    """The isometries ``Omega : D_Psi -> D_W`` and ``Omega_* : D_{Psi*} -> D_{W*}``.

    Both are determined by their values on the spanning vectors ``D_Psi e_k``
    (resp. ``D_{Psi*} e_k``)::

        Omega   D_Psi  x = D_W   (I + A*W)^{-1} D_A  x
        Omega_* D_Psi* x = D_W*  (I + AW*)^{-1} D_A* x

    and are returned as matrices between orthonormal defect bases.
    """
    A = _as_matrix(A)
    W = _as_matrix(W)
    res = psi(A, W, rank_tol=rank_tol, **kw)
    m2, m1 = A.shape
    dA = res.defectsA
    dP = defect_pair(res.full, rank_tol)
    dW = defect_pair(W, rank_tol)
    img = dW.bigD @ np.linalg.solve(np.eye(m1) + adjoint(A) @ W, dA.bigD)
    img_s = dW.bigDstar @ np.linalg.solve(np.eye(m2) + A @ adjoint(W), dA.bigDstar)
    om = _intertwiner(dP.bigD, dP.basisD, img, dW.basisD, tol, "Omega")
    om_s = _intertwiner(dP.bigDstar, dP.basisDstar, img_s, dW.basisDstar, tol, "Omega_*")

    def iso(X):
        return opnorm(adjoint(X) @ X - np.eye(X.shape[1]))

    def unitary(X):
        return X.shape[0] == X.shape[1] and iso(X) <= iso_tol and \
            opnorm(X @ adjoint(X) - np.eye(X.shape[0])) <= iso_tol

    return OmegaPair(om, om_s, iso(om), iso(om_s), unitary(om), unitary(om_s), dP, dW)


def prop_hypotheses(A, V, W, inv_tol=INV_TOL, max_cond=MAX_COND):
    """Check invertibility of the four resolvents needed by the composition identity.

    Returns ``(Psi_A(V), Psi_A(W))``; raises :class:`HypothesisViolated`
    naming the first singular resolvent.
    """
    A, V, W = _as_matrix(A), _as_matrix(V), _as_matrix(W)
    m2 = A.shape[0]
    I2 = np.eye(m2)

    def need(M, name):
        try:
            check_resolvent(M, name, inv_tol, max_cond)
        except SingularResolvent as exc:
            raise HypothesisViolated(str(exc), which=name) from exc

    need(I2 + V @ adjoint(A), "I + V A*")
    need(I2 + W @ adjoint(A), "I + W A*")
    PV = psi(A, V, inv_tol, max_cond).full
    PW = psi(A, W, inv_tol, max_cond).full
    need(I2 + PV @ adjoint(W), "I + Psi_A(V) W*")
    need(I2 + V @ adjoint(PW), "I + V Psi_A(W)*")
    return PV, PW


def intertwining_residual(A, W, V, rank_tol=RANK_TOL, **kw):
    """``||Omega_* psi_{Psi_A(W)}(V) - psi_W(Psi_A(V)) Omega||`` on defect bases.

    ``Omega`` and ``Omega_*`` come from :func:`omega_pair` applied to ``(A, W)``
    and do not depend on ``V``.
    """
    A, V, W = _as_matrix(A), _as_matrix(V), _as_matrix(W)
    PV, PW = prop_hypotheses(A, V, W, **kw)
    pair = omega_pair(A, W, rank_tol=rank_tol, **kw)
    dP, dW = pair.psiDefects, pair.wDefects
    lhs_core = psi(PW, V, rank_tol=rank_tol, **kw).full
    rhs_core = psi(W, PV, rank_tol=rank_tol, **kw).full
    lhs = pair.omegaStar @ (adjoint(dP.basisDstar) @ lhs_core @ dP.basisD)
    rhs = (adjoint(dW.basisDstar) @ rhs_core @ dW.basisD) @ pair.omega
    return opnorm(lhs - rhs)
