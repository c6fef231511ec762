"""Dense complex matrix substrate.

Operator tuples, positive square roots, defect operators and defect spaces,
validation diagnostics, a seeded generator of commuting tuples and a family
of unitary invariants (traces of words in the operators and their adjoints).

Conventions
-----------
A tuple ``T = (T_1, ..., T_n)`` of ``d x d`` matrices is identified with the
row operator ``(T_1 ... T_n)`` of shape ``(d, n*d)``.  Vectors of ``H^n`` are
stored block by block: coordinate ``j*d + k`` is component ``k`` of block ``j``.
"""
from dataclasses import dataclass, field
import itertools

import numpy as np

from .errors import IndefiniteMatrix, NonHermitian, ShapeMismatch

TOL_COMMUTE = 1e-8
TOL_CONTRACT = 1e-8
CLAMP_TOL = 1e-10
RANK_TOL = 1e-8


def adjoint(M):
    return np.conj(np.swapaxes(M, -1, -2))


def opnorm(M):
    """Spectral norm; 0 for matrices with an empty dimension."""
    M = np.asarray(M)
    if M.size == 0:
        return 0.0
    return float(np.linalg.norm(M, 2))


def _readonly(a):
    a = np.array(a, dtype=complex)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class OperatorTuple:
    """``n`` square matrices of common size ``dim``, held read-only."""

    ops: np.ndarray

    def __post_init__(self):
        ops = np.asarray(self.ops, dtype=complex)
        if ops.ndim == 2:
            ops = ops[None]
        if ops.ndim != 3 or ops.shape[1] != ops.shape[2] or ops.shape[0] < 1:
            raise ShapeMismatch(f"expected n square matrices, got shape {ops.shape}")
        if not np.all(np.isfinite(ops)):
            raise ValueError("operator entries must be finite")
        object.__setattr__(self, "ops", _readonly(ops))

    @classmethod
    def from_row(cls, row, n):
        row = np.asarray(row, dtype=complex)
        d = row.shape[0]
        if row.shape[1] != n * d:
            raise ShapeMismatch(f"row of shape {row.shape} does not split into {n} blocks")
        return cls(np.stack([row[:, j * d:(j + 1) * d] for j in range(n)]))

    @property
    def n(self):
        return self.ops.shape[0]

    @property
    def dim(self):
        return self.ops.shape[1]

    @property
    def row(self):
        """The row operator ``(T_1 ... T_n)``, shape ``(d, n*d)``."""
        return np.concatenate(list(self.ops), axis=1)

    def sharp(self):
        """The adjoint tuple ``(T_1*, ..., T_n*)``."""
        return OperatorTuple(adjoint(self.ops))

    def __neg__(self):
        return OperatorTuple(-self.ops)

    def __len__(self):
        return self.n

    def __getitem__(self, i):
        return self.ops[i]

    def __iter__(self):
        return iter(self.ops)


def as_tuple(T):
    return T if isinstance(T, OperatorTuple) else OperatorTuple(T)


def psd_sqrt(M, clamp_tol=CLAMP_TOL):
    """Hermitian positive square root of a numerically PSD matrix.

    Eigenvalues in ``[-clamp_tol, 0)`` are treated as rounding noise and set
    to zero before taking roots, as are positive ones at the level of a few
    ulps (their roots would otherwise leak ~1e-8 outside the numerical range).
    """
    M = np.asarray(M, dtype=complex)
    if M.shape[0] == 0:
        return M.copy()
    herm_err = opnorm(M - adjoint(M))
    if herm_err > clamp_tol:
        raise NonHermitian(f"matrix is not Hermitian (||M - M*|| = {herm_err:.3e})")
    w, V = np.linalg.eigh((M + adjoint(M)) / 2)
    if w[0] < -clamp_tol:
        raise IndefiniteMatrix(f"smallest eigenvalue {w[0]:.3e} < -{clamp_tol:g}")
    floor = 64 * np.finfo(float).eps * max(1.0, abs(w[-1]))
    w = np.where(w <= floor, 0.0, w)
    return (V * np.sqrt(w)) @ adjoint(V)


@dataclass(frozen=True)
class DefectPair:
    """Defect operators of a contraction ``C`` and orthonormal bases of their ranges.

    ``bigD = (I - C*C)^{1/2}`` acts on the domain of ``C``,
    ``bigDstar = (I - CC*)^{1/2}`` on its codomain.
    """

    bigD: np.ndarray
    bigDstar: np.ndarray
    basisD: np.ndarray
    basisDstar: np.ndarray
    rankTolerance: float = RANK_TOL

    @property
    def rank(self):
        return self.basisD.shape[1]

    @property
    def rank_star(self):
        return self.basisDstar.shape[1]


def _range_basis(D2, rank_tol):
    w, V = np.linalg.eigh((D2 + adjoint(D2)) / 2)
    # descending by defect size; the stable sort keeps ties in eigh order
    keep = np.flatnonzero(w > rank_tol)
    order = keep[np.argsort(-w[keep], kind="stable")]
    return V[:, order]


def defect_pair(C, rank_tol=RANK_TOL, clamp_tol=CLAMP_TOL):
    """Defect data of an arbitrary (rectangular) contraction ``C``."""
    C = np.asarray(C, dtype=complex)
    m2, m1 = C.shape
    D2 = np.eye(m1) - adjoint(C) @ C
    D2s = np.eye(m2) - C @ adjoint(C)
    return DefectPair(
        bigD=psd_sqrt(D2, clamp_tol),
        bigDstar=psd_sqrt(D2s, clamp_tol),
        basisD=_range_basis(D2, rank_tol),
        basisDstar=_range_basis(D2s, rank_tol),
        rankTolerance=rank_tol,
    )


def defects(T, rank_tol=RANK_TOL, clamp_tol=CLAMP_TOL):
    """``D_T`` on ``H^n`` and ``D_{T*}`` on ``H`` for the row operator of ``T``."""
    return defect_pair(as_tuple(T).row, rank_tol, clamp_tol)


@dataclass(frozen=True)
class TupleDiagnostics:
    max_commutator: float
    row_norm: float
    commute_ok: bool
    contract_ok: bool

    @property
    def ok(self):
        return self.commute_ok and self.contract_ok


def commutator_residual(T):
    T = as_tuple(T)
    worst = 0.0
    for i, j in itertools.combinations(range(T.n), 2):
        worst = max(worst, opnorm(T[i] @ T[j] - T[j] @ T[i]))
    return worst


def row_norm(T):
    return opnorm(as_tuple(T).row)


def validate_tuple(T, tol_commute=TOL_COMMUTE, tol_contract=TOL_CONTRACT):
    """Commutator and row-norm residuals; never raises."""
    c = commutator_residual(T)
    r = row_norm(T)
    return TupleDiagnostics(c, r, c <= tol_commute, r <= 1 + tol_contract)


def random_unitary(k, rng):
    """Haar-distributed ``k x k`` unitary."""
    Z = (rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    ph = np.diag(R) / np.abs(np.diag(R))
    return Q * ph


def random_contraction(rows, cols, rng, norm=None):
    """Gaussian matrix rescaled to spectral norm ``norm`` (uniform in (0, 1] if omitted)."""
    G = rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))
    if norm is None:
        norm = rng.uniform(0.05, 1.0)
    return G * (norm / opnorm(G))


def random_commuting_tuple(dim, n, seed, margin=0.1, nilpotent=False):
    """Seeded commuting tuple with row norm exactly ``1 - margin``.

    Each ``T_i`` is a random polynomial in one random upper-triangular matrix
    ``B``; the family is then conjugated by a shared Haar unitary.  Polynomials
    in a single matrix commute exactly, and ``B`` is in general non-normal.
    With ``nilpotent=True`` the diagonal of ``B`` and the constant terms vanish,
    so ``T^alpha = 0`` whenever ``|alpha| >= dim``.
    """
    if dim < 1 or n < 1:
        raise ValueError("dim and n must be positive")
    if not 0 <= margin < 1:
        raise ValueError("margin must lie in [0, 1)")
    rng = np.random.default_rng(seed)
    B = np.triu(rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim)))
    if nilpotent:
        B = B - np.diag(np.diag(B))
    nb = opnorm(B)
    if nb > 0:
        B = B / nb
    powers = [np.eye(dim, dtype=complex)]
    for _ in range(dim - 1):
        powers.append(powers[-1] @ B)
    start = 1 if nilpotent else 0
    coeffs = rng.standard_normal((n, dim)) + 1j * rng.standard_normal((n, dim))
    ops = np.array([sum(coeffs[i, k] * powers[k] for k in range(start, dim))
                    if dim > start else np.zeros((dim, dim), complex)
                    for i in range(n)])
    Q = random_unitary(dim, rng)
    ops = Q[None] @ ops @ adjoint(Q)[None]
    r = opnorm(np.concatenate(list(ops), axis=1))
    if r > 0:
        ops = ops * ((1 - margin) / r)
    return OperatorTuple(ops)


@dataclass(frozen=True)
class WordInvariantVector:
    words: list = field(default_factory=list)
    traces: np.ndarray = None

    def distance(self, other):
        if self.words != other.words:
            raise ShapeMismatch("word lists differ")
        if len(self.traces) == 0:
            return 0.0
        return float(np.max(np.abs(self.traces - other.traces)))


def word_labels(n):
    return [str(i + 1) for i in range(n)] + [f"{i + 1}*" for i in range(n)]


def word_trace_invariants(T, max_len):
    """Traces of all words of length ``0..max_len`` in ``T_i`` and ``T_i*``.

    Words are listed by length, then lexicographically over the alphabet
    ``T_1 < ... < T_n < T_1* < ... < T_n*``.  The empty word contributes
    ``tr(I) = dim``.
    """
    if max_len < 1:
        raise ValueError("max_len must be at least 1")
    T = as_tuple(T)
    letters = np.concatenate([T.ops, adjoint(T.ops)])
    labels = word_labels(T.n)
    words = [()]
    traces = [complex(T.dim)]
    level = np.eye(T.dim, dtype=complex)[None]
    level_words = [()]
    for _ in range(max_len):
        level = (level[:, None] @ letters[None]).reshape(-1, T.dim, T.dim)
        level_words = [w + (labels[c],) for w in level_words for c in range(len(labels))]
        words.extend(level_words)
        traces.extend(np.trace(level, axis1=1, axis2=2))
    return WordInvariantVector(words, np.array(traces))
