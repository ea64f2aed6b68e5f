"""Exact arithmetic for mod-p reductions of slope-one crystalline
two-dimensional local Galois representations.

Subpackages: capped-precision p-adic numbers, finite-field arithmetic,
symmetric-power modules with their filtration structure, mechanically
verified binomial congruences, Hecke-operator computations on the tree,
and the reduction/ramification/LLC engine exposed through the CLI.
"""

__version__ = "0.1.0"
