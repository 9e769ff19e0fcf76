"""Maximal representations of surface groups into Sp(2n, R).

Modules:

* :mod:`maxrep.surface_group` words, automorphisms, Dehn twists, curve systems
* :mod:`maxrep.hyperbolic` Fuchsian representations and hyperbolic geometry
* :mod:`maxrep.symplectic` compatible complex structures, Lagrangians, cones
* :mod:`maxrep.max_reps` maximal representations, Toledo invariant, translation lengths
* :mod:`maxrep.properness` comparison experiments and orbit probes
* :mod:`maxrep.runner` command line front end
"""

__version__ = "0.1.0"
