"""Truncated Drury-Arveson space machinery.

The space ``H`` of analytic functions on the ball with kernel
``1 / (1 - <z, w>)`` has orthonormal basis ``e_alpha = z^alpha / w_alpha``
with ``w_alpha^2 = alpha! / |alpha|!``.  Everything here works with the
finite-dimensional span of ``e_alpha, |alpha| <= N`` (tensored with a
coefficient space), where the identities checked below hold exactly rather
than approximately:

* ``L_N L_N* + rho_T^{N+1}(I) = I`` for the degree-``N`` part ``L_N`` of ``L``;
* ``L_N* L_N + M_N M_N* = I`` because ``M*`` never raises the degree.

It also provides the iteration for ``A_infinity``, the pure/C1/c.n.c.
classification, and the functional model of a pure, jointly nilpotent tuple.
"""
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import subspace_angles

from . import multiindex as mi
from .ball import apply_automorphism, inner, phi_tuple
from .charfn import CharacteristicFunction, theta_taylor
from .errors import (Indeterminate, MclabError, NotPure, PoleHit, PreconditionUnclassified,
                     ShapeMismatch, TruncationUnsound)
from .opcore import OperatorTuple, adjoint, as_tuple, defects, opnorm, random_unitary, validate_tuple

TOL_ZERO = 1e-8
TOL_ONE = 1e-8
ITER_TOL = 1e-13
K_MAX = 200_000


class DualityFailure(MclabError):
    """The series for ``L* h`` disagrees with the adjoint of the matrix of ``L``."""


@dataclass(frozen=True)
class TruncatedSpace:
    n: int
    maxDegree: int
    indices: tuple = ()
    weights: np.ndarray = None

    def __post_init__(self):
        idx = tuple(mi.graded_indices(self.n, self.maxDegree))
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "weights", np.array([mi.weight(a) for a in idx]))
        object.__setattr__(self, "_pos", {a: k for k, a in enumerate(idx)})

    @property
    def dim(self):
        return len(self.indices)

    def position(self, alpha):
        return self._pos[tuple(alpha)]

    def degree_mask(self, k):
        return np.array([sum(a) == k for a in self.indices])


def kernel(z, w, pole_tol=1e-12):
    """Reproducing kernel ``k(z, w) = 1 / (1 - <z, w>)``."""
    ip = inner(z, w)
    if abs(1 - ip) <= pole_tol or abs(ip) >= 1:
        raise PoleHit(f"<z, w> = {ip} outside the unit disc")
    return 1.0 / (1.0 - ip)


def gram(points):
    return np.array([[kernel(p, q) for q in points] for p in points])


def shift_matrices(space):
    """Compressions of ``M_{z_i}`` to polynomials of degree ``<= N`` (multiplicity one)."""
    n, D = space.n, space.dim
    S = np.zeros((n, D, D))
    for k, alpha in enumerate(space.indices):
        if sum(alpha) == space.maxDegree:
            continue
        for i in range(n):
            beta = mi.add(alpha, mi.unit(n, i))
            S[i, space.position(beta), k] = mi.weight(beta) / mi.weight(alpha)
    return S


def truncated_multishift(n, N, m=1):
    """``S_i (x) I_m`` compressed to degree ``<= N``; basis index ``(alpha, k) -> pos(alpha)*m + k``."""
    if N < 0 or m < 1:
        raise ValueError("need N >= 0 and m >= 1")
    S = shift_matrices(TruncatedSpace(n, N))
    return OperatorTuple(np.array([np.kron(s, np.eye(m)) for s in S]))


def rho(T, X):
    """Completely positive map ``X -> sum T_i X T_i*``."""
    T = as_tuple(T)
    return np.einsum("iab,bc,idc->ad", T.ops, X, np.conj(T.ops))


@dataclass
class ClassificationReport:
    aInf: np.ndarray
    iterations: int
    converged: bool
    lastDelta: float
    minEig: float
    maxEig: float
    monotoneDefect: float = 0.0
    zeroStep: int = None
    isPure: bool = None
    isC1: bool = None
    isCnc: bool = None

    def flags(self):
        return {"isPure": self.isPure, "isC1": self.isC1, "isCnc": self.isCnc}

    @property
    def determinate(self):
        return None not in self.flags().values()


def a_infinity(T, tol=ITER_TOL, k_max=K_MAX, zero_tol=0.0):
    """Iterate ``X_{k+1} = rho_T(X_k)`` from ``X_0 = I`` until the step is below ``tol``.

    ``zeroStep`` is the first ``k`` with ``||X_k|| <= zero_tol``;
    ``monotoneDefect`` the most negative eigenvalue of ``X_k - X_{k+1}`` seen.
    Non-convergence is reported through ``converged``, never raised.
    """
    T = as_tuple(T)
    X = np.eye(T.dim, dtype=complex)
    monotone = 0.0
    zero_step = None
    delta = np.inf
    k = 0
    while k < k_max:
        Xn = rho(T, X)
        k += 1
        diff = X - Xn
        delta = opnorm(diff)
        monotone = min(monotone, float(np.linalg.eigvalsh((diff + adjoint(diff)) / 2)[0]))
        if zero_step is None and opnorm(Xn) <= zero_tol:
            zero_step = k
        X = Xn
        if delta < tol:
            break
    X = (X + adjoint(X)) / 2
    ev = np.linalg.eigvalsh(X)
    return ClassificationReport(X, k, bool(delta < tol), float(delta), float(ev[0]), float(ev[-1]),
                                monotone, zero_step)


def _band(value, low, high):
    """True below ``low``, False above ``high``, None in between."""
    if value <= low:
        return True
    if value >= high:
        return False
    return None


def classify(T, tol_zero=TOL_ZERO, tol_one=TOL_ONE, **kw):
    """Pure / C1 / c.n.c. flags from the spectrum of ``A_infinity``; None marks indeterminate."""
    rep = a_infinity(T, **kw)
    if not rep.converged:
        return rep
    rep.isPure = _band(rep.maxEig, tol_zero, 10 * tol_zero)
    below = _band(rep.minEig, tol_zero, 10 * tol_zero)
    rep.isC1 = None if below is None else not below
    above = _band(-rep.maxEig, -(1 - 10 * tol_one), -(1 - tol_one))
    rep.isCnc = None if above is None else not above
    return rep


def monomial_powers(T, indices):
    """``T^alpha`` for ``alpha`` in graded order."""
    T = as_tuple(T)
    out = {indices[0]: np.eye(T.dim, dtype=complex)}
    for alpha in indices[1:]:
        j = next(i for i, a in enumerate(alpha) if a > 0)
        out[alpha] = T.ops[j] @ out[mi.sub(alpha, mi.unit(T.n, j))]
    return out


def L_matrix(T, space, dp=None):
    """Matrix of ``L : e_alpha (x) xi -> w_alpha^{-1} T^alpha D_{T*} xi`` on degree ``<= N``.

    Columns are ordered ``(alpha, j) -> pos(alpha) * r_* + j`` with ``xi_j`` the
    orthonormal basis of ``D_{T*}``.
    """
    T = as_tuple(T)
    dp = dp or defects(T)
    DQ = dp.bigDstar @ dp.basisDstar
    pw = monomial_powers(T, space.indices)
    blocks = [pw[a] @ DQ / w for a, w in zip(space.indices, space.weights)]
    return np.concatenate(blocks, axis=1)


def Lstar_series(T, h, space, dp=None, check_tol=1e-12):
    """Coordinates of the degree-``<= N`` part of ``z -> D_{T*} (I - z T*)^{-1} h``.

    The series is expanded with ``c_0 = h``, ``c_alpha = sum_j T_j* c_{alpha - e_j}``
    (the coefficient of ``z^alpha``) and then written in the orthonormal basis.
    The result is compared with ``L_matrix(T)* h``.
    """
    T = as_tuple(T)
    dp = dp or defects(T)
    h = np.asarray(h, dtype=complex)
    Ts = adjoint(T.ops)
    c = {space.indices[0]: h}
    for alpha in space.indices[1:]:
        c[alpha] = sum(Ts[j] @ c[mi.sub(alpha, mi.unit(T.n, j))]
                       for j in range(T.n) if alpha[j] > 0)
    proj = adjoint(dp.basisDstar) @ dp.bigDstar
    out = np.concatenate([w * (proj @ c[a]) for a, w in zip(space.indices, space.weights)])
    ref = adjoint(L_matrix(T, space, dp)) @ h
    gap = float(np.linalg.norm(out - ref))
    if gap > check_tol * max(1.0, np.linalg.norm(h)):
        raise DualityFailure(f"series and adjoint of L differ by {gap:.3e}")
    return out


def _rho_power(T, k):
    T = as_tuple(T)
    X = np.eye(T.dim, dtype=complex)
    for _ in range(k):
        X = rho(T, X)
    return X


def identity_LA_partial(T, N):
    """Residual of ``L_N L_N* + rho_T^{N+1}(I) = I``."""
    T = as_tuple(T)
    L = L_matrix(T, TruncatedSpace(T.n, N))
    return opnorm(L @ adjoint(L) + _rho_power(T, N + 1) - np.eye(T.dim))


def multiplier_matrix(table, space):
    """Matrix of ``M_theta`` compressed to degree ``<= N``.

    Block ``(beta', beta)`` equals ``(w_beta' / w_beta) Theta_{beta' - beta}``
    when ``beta' >= beta`` componentwise and vanishes otherwise.
    """
    if table.maxDegree < space.maxDegree or table.n != space.n:
        raise ShapeMismatch("Taylor table does not cover the truncated space")
    rs, r = next(iter(table.coeffs.values())).shape
    D = space.dim
    M = np.zeros((D * rs, D * r), complex)
    for q, (bp, wp) in enumerate(zip(space.indices, space.weights)):
        for p, (b, w) in enumerate(zip(space.indices, space.weights)):
            if mi.dominates(bp, b):
                M[q * rs:(q + 1) * rs, p * r:(p + 1) * r] = (wp / w) * table[mi.sub(bp, b)]
    return M


def _lth_pieces(T, N):
    T = as_tuple(T)
    dp = defects(T)
    space = TruncatedSpace(T.n, N)
    L = L_matrix(T, space, dp)
    M = multiplier_matrix(theta_taylor(T, N, dp), space)
    return L, M, dp, space


def identity_Lth_truncated(T, N):
    """Residual of ``L_N* L_N + M_N M_N* = I`` on the degree-``<= N`` part of ``H(D_{T*})``."""
    L, M, _, _ = _lth_pieces(T, N)
    return opnorm(adjoint(L) @ L + M @ adjoint(M) - np.eye(L.shape[1]))


def lth_exactness_gap(T, N):
    """``||P_N M_{2N} M_{2N}* P_N - M_N M_N*||``: zero when ``M*`` preserves degree ``<= N``."""
    T = as_tuple(T)
    dp = defects(T)
    small, big = TruncatedSpace(T.n, N), TruncatedSpace(T.n, 2 * N)
    table = theta_taylor(T, 2 * N, dp)
    Mn = multiplier_matrix(table, small)
    Mb = multiplier_matrix(table, big)
    rows = small.dim * dp.rank_star
    top = Mb[:rows, :]
    return opnorm(top @ adjoint(top) - Mn @ adjoint(Mn))


@dataclass
class ModelData:
    basisHT: np.ndarray
    modelTuple: OperatorTuple
    phiMatrix: np.ndarray
    residuals: dict = field(default_factory=dict)


def model_space(T, N, rank_tol=1e-8, classify_kw=None):
    """Functional model of a pure tuple inside degree-``<= N`` polynomials with values in ``D_{T*}``.

    The model space is the orthogonal complement of ``range(M_N)``; the model
    tuple is the compression of the shift, and ``Phi`` is determined by
    ``Phi(L f) = P f`` (``P`` the projection onto the model space).  Exact when
    ``T`` is jointly nilpotent of order ``m`` and ``N >= m + 1``; otherwise the
    dimension test fails and :class:`TruncationUnsound` is raised.
    """
    T = as_tuple(T)
    rep = classify(T, **(classify_kw or {}))
    if rep.isPure is not True:
        raise NotPure(f"A_infinity has largest eigenvalue {rep.maxEig:.3e}")
    L, M, dp, space = _lth_pieces(T, N)
    big = L.shape[1]
    if M.shape[1] == 0:
        B = np.eye(big, dtype=complex)
    else:
        U, s, _ = np.linalg.svd(M, full_matrices=True)
        rank = int(np.sum(s > rank_tol))
        B = U[:, rank:]
    if B.shape[1] != T.dim:
        raise TruncationUnsound(f"model space has dimension {B.shape[1]}, expected {T.dim}")
    S = shift_matrices(space)
    rs = dp.rank_star
    model = OperatorTuple(np.array([adjoint(B) @ np.kron(s, np.eye(rs)) @ B for s in S]))
    Phi = adjoint(np.linalg.lstsq(adjoint(L), B, rcond=None)[0])
    I = np.eye(T.dim)
    res = {
        "definition": opnorm(Phi @ L - adjoint(B)),
        "unitary": max(opnorm(adjoint(Phi) @ Phi - I), opnorm(Phi @ adjoint(Phi) - I)),
        "adjoint_L": opnorm(B @ Phi - adjoint(L)),
        "intertwining": max(opnorm(Phi @ adjoint(T[i]) - adjoint(model[i]) @ Phi)
                            for i in range(T.n)),
        "similarity": max(opnorm(Phi @ T[i] @ adjoint(Phi) - model[i]) for i in range(T.n)),
        "model_commutator": validate_tuple(model).max_commutator,
    }
    return ModelData(B, model, Phi, res)


def default_samples(n, count=8, radius=0.9, seed=0):
    rng = np.random.default_rng(seed)
    pts = []
    for _ in range(count):
        v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        pts.append(rng.uniform(0, radius) * v / np.linalg.norm(v))
    return pts


def theta_zero_multishift_check(T, tol=1e-8, samples=None, classify_kw=None):
    """Is ``theta_T`` numerically zero on the sample points?

    Only meaningful for pure or c.n.c. tuples, for which ``theta_T = 0``
    characterises the multishift.  In finite dimensions the answer is
    always negative; the check is kept to document that caveat.
    Returns ``(vanishes, max ||theta_T(z)||)``.
    """
    T = as_tuple(T)
    rep = classify(T, **(classify_kw or {}))
    if not (rep.isPure is True or rep.isCnc is True):
        raise PreconditionUnclassified(f"tuple is neither pure nor c.n.c. ({rep.flags()})")
    th = CharacteristicFunction(T)
    samples = default_samples(T.n) if samples is None else samples
    worst = max(opnorm(th(z)) for z in samples)
    return worst <= tol, worst


@dataclass(frozen=True)
class SphericalReport:
    normality: float
    commutator: float
    unitSum: float
    ok: bool


def spherical_check(Z, tol=1e-9):
    """Normality, commutativity and ``sum Z_i Z_i* = I`` residuals."""
    Z = as_tuple(Z)
    normal = max(opnorm(z @ adjoint(z) - adjoint(z) @ z) for z in Z)
    comm = validate_tuple(Z).max_commutator
    unit = opnorm(rho(Z, np.eye(Z.dim)) - np.eye(Z.dim))
    return SphericalReport(normal, comm, unit, max(normal, comm, unit) <= tol)


def spherical_preservation(Z, lam, tol=1e-9):
    return spherical_check(phi_tuple(lam, Z), tol)


def random_spherical_tuple(dim, n, rng, conjugate=True):
    """Diagonal tuple whose joint eigenvalues lie on the unit sphere, optionally unitarily rotated."""
    V = rng.standard_normal((dim, n)) + 1j * rng.standard_normal((dim, n))
    V /= np.linalg.norm(V, axis=1, keepdims=True)
    ops = np.array([np.diag(V[:, i]) for i in range(n)])
    if conjugate:
        U = random_unitary(dim, rng)
        ops = U[None] @ ops @ adjoint(U)[None]
    return OperatorTuple(ops)


def direct_sum(A, B):
    A, B = as_tuple(A), as_tuple(B)
    if A.n != B.n:
        raise ShapeMismatch("direct sum needs tuples of equal length")
    da, db = A.dim, B.dim
    ops = np.zeros((A.n, da + db, da + db), complex)
    ops[:, :da, :da] = A.ops
    ops[:, da:, da:] = B.ops
    return OperatorTuple(ops)


def conjugate(T, U):
    T = as_tuple(T)
    return OperatorTuple(U[None] @ T.ops @ adjoint(U)[None])


def _eigenspaces(A, tol):
    w, V = np.linalg.eigh((A + adjoint(A)) / 2)
    if np.any((w > tol) & (w < 10 * tol)) or np.any((w > 1 - 10 * tol) & (w < 1 - tol)):
        raise Indeterminate(f"eigenvalues of A_infinity not separated from 0/1: {w}")
    return V[:, w <= tol], V[:, w >= 1 - tol]


def kernel_invariance_checks(T, lam, tol=1e-8, **kw):
    """Residuals for the invariant subspaces attached to ``A_infinity``.

    ``kernel``: ``max ||A_inf T_i* x||`` over unit ``x`` in ``ker A_inf``.
    ``unit``: the same for ``I - A_inf`` on ``ker(I - A_inf)``.
    ``angle``: largest principal angle between ``ker(I - A_inf(T))`` and
    ``ker(I - A_inf(phi_lambda(T)))`` (``pi/2`` if the dimensions differ).
    """
    T = as_tuple(T)
    rep_t = a_infinity(T, **kw)
    rep_p = a_infinity(phi_tuple(lam, T), **kw)
    if not (rep_t.converged and rep_p.converged):
        raise Indeterminate("A_infinity iteration did not converge")
    A = rep_t.aInf
    K0, K1 = _eigenspaces(A, tol)
    _, P1 = _eigenspaces(rep_p.aInf, tol)
    Ts = adjoint(T.ops)
    ker_res = max((opnorm(A @ t @ K0) for t in Ts), default=0.0) if K0.shape[1] else 0.0
    one = np.eye(T.dim) - A
    unit_res = max((opnorm(one @ t @ K1) for t in Ts), default=0.0) if K1.shape[1] else 0.0
    if K1.shape[1] != P1.shape[1]:
        angle = np.pi / 2
    elif K1.shape[1] == 0:
        angle = 0.0
    else:
        angle = float(np.max(subspace_angles(K1, P1)))
    return {"kernel": ker_res, "unit": unit_res, "angle": angle}


def class_preservation_suite(T, alpha, **kw):
    """Classification flags of ``T`` and ``alpha(T)``; raises :class:`Indeterminate` on ambiguity."""
    before = classify(T, **kw)
    after = classify(apply_automorphism(alpha, T), **kw)
    if not (before.determinate and after.determinate):
        raise Indeterminate(f"flags before {before.flags()}, after {after.flags()}")
    return {"before": before.flags(), "after": after.flags(),
            "agree": before.flags() == after.flags()}
