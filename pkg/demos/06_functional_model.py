"""A jointly nilpotent tuple is unitarily equivalent to a compressed shift.

The model space is the orthocomplement of the range of M_theta inside
degree-N polynomials with values in D_T*, and Phi is the unitary carrying
T to the compression of the shift.
"""
from mclab.arveson import model_space
from mclab.opcore import random_commuting_tuple, word_trace_invariants

T = random_commuting_tuple(4, 2, seed=7, margin=0.1, nilpotent=True)
md = model_space(T, N=4)
print("model space dimension:", md.modelTuple.dim, "in", md.basisHT.shape[0])
for k, v in md.residuals.items():
    print(f"  {k:>16}: {v:.1e}")
d = word_trace_invariants(md.modelTuple, 5).distance(word_trace_invariants(T, 5))
print(f"word traces up to length 5 agree to {d:.1e}")
