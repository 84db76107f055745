"""
square-minors package.

Constructive checks around clique minors of locally finite graphs: K_m minor
models in the square of a graph built from disjoint rays, clique-minor bounds
from quasi-isometries to trees, and a branch-and-bound minor oracle that
verifies both at desk scale on finite windows of infinite graph families.

Version: 0.1.0
"""

__version__ = "0.1.0"
