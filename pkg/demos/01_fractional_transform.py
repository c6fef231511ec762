"""The fractional transform Psi_A(W) and its defect identities.

For scalars the transform is the disc automorphism (A + W) / (1 + W conj(A)).
For matrices it still maps contractions to contractions, and isometries to
isometries, with explicit formulas for the defects.
"""
import numpy as np

from mclab.fractional import defect_identity_residuals, intertwining_residual, omega_pair, psi
from mclab.opcore import opnorm, random_contraction

rng = np.random.default_rng(0)

print("scalar: Psi_0.6(0.5) =", psi([[0.6]], [[0.5]]).full[0, 0].real, " (1.1/1.3 =", 1.1 / 1.3, ")")

A = random_contraction(4, 3, rng, 0.8)
W = random_contraction(4, 3, rng, 0.9)
P = psi(A, W)
print(f"||A|| = {opnorm(A):.3f}, ||W|| = {opnorm(W):.3f}, ||Psi_A(W)|| = {opnorm(P.full):.3f}")
print("defect identity residuals:", ["%.1e" % r for r in defect_identity_residuals(A, W)])

# an isometric W gives an isometric transform
Q = np.linalg.qr(rng.standard_normal((4, 3)) + 1j * rng.standard_normal((4, 3)))[0]
PQ = psi(A, Q).full
print(f"W isometric: ||I - Psi* Psi|| = {opnorm(np.eye(3) - PQ.conj().T @ PQ):.1e}")

pair = omega_pair(A, W)
print(f"Omega isometry defect {pair.omegaIsometry:.1e}, Omega_* isometry defect {pair.omegaStarIsometry:.1e}")

V = random_contraction(4, 3, rng, 0.7)
print(f"composition intertwining residual: {intertwining_residual(A, W, V):.1e}")
