"""
Lengths along a mapping class orbit
===================================

Pulling a maximal representation back by powers of a Dehn twist changes the
lengths of a fixed system of curves.  Properness of the mapping class group
action shows up as length sums that eventually grow without bound, while the
identity leaves them constant.
"""

from maxrep import properness
from maxrep.hyperbolic import octagon_hyperbolization
from maxrep.max_reps import compose_rep, diagonal_embedding
from maxrep.surface_group import builtin_twist, curve_system, identity_automorphism

h = octagon_hyperbolization()
rep = compose_rep(h, diagonal_embedding(2))
system = curve_system(2)
print("curves:", ", ".join(system.labels))

for psi in (builtin_twist("a1", 2), builtin_twist("sep", 2), identity_automorphism(2)):
    probe = properness.orbit_probe(rep, psi, system, k_max=6, seed=0)
    sums = "  ".join(f"{s:8.3f}" for s in probe.sums)
    print(f"{probe.label:10s} {sums}  increasing from {probe.k0}, diverges {probe.diverges}")
