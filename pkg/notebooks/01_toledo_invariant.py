"""
Toledo invariants of surface group representations
===================================================

The Toledo invariant of a representation of the genus-2 surface group into
Sp(2n,R) is an integer bounded by n |chi| = 2n.  Representations reaching the
bound are maximal.  Here we compute it for a few examples.
"""

import numpy as np

from maxrep.hyperbolic import octagon_hyperbolization
from maxrep.max_reps import (
    compose_rep,
    conjugate_rep,
    diagonal_embedding,
    direct_sum,
    irreducible_embedding,
    milnor_wood_bound,
    toledo_details,
    trivial_rep,
)
from maxrep.symplectic import random_symplectic

# the regular octagon gives a Fuchsian representation into SL(2,R)
h = octagon_hyperbolization()
print("relator residual of the octagon group:", h.relator_residual())

# composing with the diagonal and irreducible embeddings gives maximal representations
for emb in (diagonal_embedding(1), diagonal_embedding(2), diagonal_embedding(3),
            irreducible_embedding(2), irreducible_embedding(3)):
    rep = compose_rep(h, emb, compute_toledo=False)
    res = toledo_details(rep)
    print(f"{emb!r:26s} toledo {res.value:2d}  bound {milnor_wood_bound(rep.n, 2)}  "
          f"winding {res.winding:+.6f}")

# the trivial representation has Toledo invariant 0
print("trivial:", toledo_details(trivial_rep(2)).value)

# the invariant is additive under direct sums ...
d1 = compose_rep(h, diagonal_embedding(1))
print("diagonal(1) + trivial(1):", toledo_details(direct_sum(d1, trivial_rep(1))).value)
print("diagonal(1) + diagonal(1):", toledo_details(direct_sum(d1, d1)).value)

# ... and unchanged by conjugation in Sp(4,R).  Conjugating by a badly conditioned
# element inflates the rounding error of the relator product; once it passes 1e-7
# the computation refuses to run, so moderate conjugators are used here
rng = np.random.default_rng(0)
irr2 = compose_rep(h, irreducible_embedding(2))
print("conjugates of irreducible(2):",
      [toledo_details(conjugate_rep(irr2, random_symplectic(2, rng, scale=0.3))).value for _ in range(5)])
