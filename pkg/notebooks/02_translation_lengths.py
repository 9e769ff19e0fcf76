"""
Translation lengths in the Siegel space
=======================================

For a maximal representation rho and a closed curve gamma we compare the
translation length of rho(gamma) on Sp(2n,R)/U(n) with the hyperbolic length
of gamma.  The diagonal embedding reproduces the hyperbolic length exactly;
the irreducible embedding of Sp(4,R) lands between 2 and 3 times it.
"""

import numpy as np

from maxrep import properness
from maxrep.hyperbolic import octagon_hyperbolization, translation_length_h
from maxrep.max_reps import compose_rep, diagonal_embedding, irreducible_embedding, translation_length_sp

h = octagon_hyperbolization()
diag = compose_rep(h, diagonal_embedding(2))
irr = compose_rep(h, irreducible_embedding(2))

words = properness.sample_words(h, 12, 6, seed=0)
rng = np.random.default_rng(0)
print(f"{'word':28s} {'tr_h':>10s} {'diagonal':>10s} {'irreducible':>12s} {'ratio':>7s}")
for w in words:
    th = translation_length_h(h(w))
    td = translation_length_sp(diag, w, rng).value
    ti = translation_length_sp(irr, w, rng).value
    print(f"{str(w):28s} {th:10.5f} {td:10.5f} {ti:12.5f} {ti / th:7.4f}")

# quasi-isometry constants fitted on a larger sample
for name, rep in (("diagonal", diag), ("irreducible", irr)):
    est = properness.qi_estimate(rep, h, 30, 8, seed=0)
    print(f"{name}: A = {est.A:.6f}, B = {est.B:.2e} on {est.samples} words")
