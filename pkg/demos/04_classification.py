"""Pure, C1 and completely non-coisometric tuples, before and after an automorphism.

A_infinity is the limit of rho_T^k(I).  It vanishes for pure tuples, is the
identity for spherical ones and has both eigenvalues 0 and 1 for a direct sum.
"""
import numpy as np

from mclab.arveson import (class_preservation_suite, classify, direct_sum, kernel_invariance_checks,
                           random_spherical_tuple, truncated_multishift)
from mclab.ball import Automorphism, random_ball_point
from mclab.opcore import random_unitary

rng = np.random.default_rng(3)
S = truncated_multishift(2, 3)
Z = random_spherical_tuple(3, 2, rng)
M = direct_sum(S, Z)

for name, T in (("multishift", S), ("spherical", Z), ("direct sum", M)):
    rep = classify(T)
    print(f"{name:>11}: eig(A_inf) in [{rep.minEig:.2f}, {rep.maxEig:.2f}] after {rep.iterations:3d} "
          f"steps -> {rep.flags()}")

alpha = Automorphism(random_unitary(2, rng), random_ball_point(2, rng, 0.7))
for name, T in (("multishift", S), ("spherical", Z), ("direct sum", M)):
    out = class_preservation_suite(T, alpha)
    print(f"{name:>11}: flags preserved by alpha: {out['agree']}")

print("invariant-subspace residuals:", {k: "%.1e" % v for k, v in
                                        kernel_invariance_checks(M, alpha.center).items()})
