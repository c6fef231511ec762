"""Automorphisms of the unit ball acting on points and on commuting tuples.

phi_lambda swaps 0 and lambda, is its own inverse, keeps the sphere on the
sphere, and is the fractional transform of the point read as a 1 x n row.
Applied to a tuple it produces another commuting row contraction.
"""
import numpy as np

from mclab.ball import (Automorphism, apply_automorphism, phi_point, phi_psi_agreement, phi_tuple,
                        random_ball_point, random_sphere_point)
from mclab.opcore import random_commuting_tuple, random_unitary, row_norm, validate_tuple

rng = np.random.default_rng(1)
lam = np.array([0.5, 0.0])
print("phi_(0.5,0)(0, 0.5) =", np.round(phi_point(lam, [0, 0.5]), 10))

lam = random_ball_point(3, rng, 0.9)
z = random_ball_point(3, rng)
s = random_sphere_point(3, rng)
print(f"|phi(phi(z)) - z| = {np.linalg.norm(phi_point(lam, phi_point(lam, z)) - z):.1e}")
print(f"|phi(s)| - 1 on the sphere = {np.linalg.norm(phi_point(lam, s)) - 1:.1e}")
print(f"phi vs fractional form: {phi_psi_agreement(lam, z):.1e}")

T = random_commuting_tuple(5, 3, seed=4, margin=0.05)
R = phi_tuple(lam, T)
d = validate_tuple(R)
print(f"row norm {row_norm(T):.3f} -> {d.row_norm:.3f}, commutator {d.max_commutator:.1e}")
back = phi_tuple(lam, R)
print(f"phi_lambda(phi_lambda(T)) - T: {np.max(np.abs(back.ops - T.ops)):.1e}")

alpha = Automorphism(random_unitary(3, rng), lam)
print("alpha(T) still a commuting contraction:", validate_tuple(apply_automorphism(alpha, T)).ok)
