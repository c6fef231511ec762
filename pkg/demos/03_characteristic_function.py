"""The characteristic function and how it transforms under ball automorphisms.

theta_{phi_lambda(T)} agrees with theta_T o phi_lambda up to constant unitaries
on the defect spaces.  The unitaries come from the fractional-transform
machinery; a random unitary in their place fails the check.
"""
import numpy as np

from mclab.ball import phi_point, random_ball_point
from mclab.charfn import (CharacteristicFunction, coincidence_residual, spectrum_charfn_consistency,
                          theorem_theta_check, theta_taylor)
from mclab.opcore import OperatorTuple, random_commuting_tuple, random_unitary

rng = np.random.default_rng(2)
T = random_commuting_tuple(4, 2, seed=5, margin=0.1)
th = CharacteristicFunction(T)
print("theta_T maps D_T (dim %d) to D_T* (dim %d)" % (th.shape[1], th.shape[0]))

z = random_ball_point(2, rng, 0.4)
table = theta_taylor(T, 25)
print(f"Taylor series vs direct evaluation: {np.linalg.norm(table(z) - th(z), 2):.1e}")

lam = random_ball_point(2, rng, 0.8)
samples = [random_ball_point(2, rng, 0.95) for _ in range(20)]
cert = theorem_theta_check(T, lam, samples)
print(f"coincidence residual {cert.maxResidual:.1e}, unitarity {cert.omega1Unitarity:.1e}, "
      f"{cert.omega2Unitarity:.1e}")

wrong = coincidence_residual(CharacteristicFunction(T), lambda w: th(phi_point(lam, w)),
                             random_unitary(th.shape[1], rng), np.eye(th.shape[0]), samples)
print(f"with a random unitary instead: {wrong.maxResidual:.2f}")

D = OperatorTuple([np.diag([0.3, 0.5j])])
print("0.3 in the right spectrum <-> theta_T(0.3) not onto:", spectrum_charfn_consistency(D, [0.3]))
