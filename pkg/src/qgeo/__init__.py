"""Computational geometry on quantum state spaces.

Smallest enclosing balls under the quantum divergence (Welzl/LP-type),
Holevo channel capacity estimation, and numerical verification of
Voronoi-bisector coincidence and non-coincidence across state-space
distances.
"""

__version__ = "0.1.0"
