"""The Drury-Arveson identities, checked exactly on degree-N polynomials.

L L* + rho^{N+1}(I) = I telescopes, and L* L + M_theta M_theta* = I holds on
the degree-N part because M_theta* never raises the degree.
"""
from mclab.arveson import identity_LA_partial, identity_Lth_truncated, lth_exactness_gap
from mclab.opcore import random_commuting_tuple

T = random_commuting_tuple(4, 2, seed=6, margin=0.05)
for N in range(6):
    print(f"N={N}: |L L* + rho^(N+1)(I) - I| = {identity_LA_partial(T, N):.1e}   "
          f"|L* L + M M* - I| = {identity_Lth_truncated(T, N):.1e}")
print(f"degree-2N compression gap at N=3: {lth_exactness_gap(T, 3):.1e}")
