"""Certified two-sided maximum estimates from exact even-power moments.

Two concrete engines share one idea: compute the exact integral (or
group average) of the 2k-th power of an objective, take a single
floating root, and multiply by an exact combinatorial factor to certify
``lower <= max <= upper``.

* :mod:`orbitmax.sphere` — homogeneous polynomials on the unit sphere,
  including the fewnomial (1+eps)-approximation and a feasibility
  reduction for polynomial systems.
* :mod:`orbitmax.assign` — the d-dimensional assignment problem over
  the symmetric group, with coset-conditional moments, greedy
  permutation extraction and a brute-force oracle.
* :mod:`orbitmax.hypergraph` — hypergraph alignment encoded as an
  assignment problem.
* :mod:`orbitmax.sandwich` — exact verification of the sandwich
  inequalities for finite orbits, including orbit span dimensions.
"""

from . import assign, exact, hypergraph, sandwich, sphere
from .assign import DenseTensor, PartialAssignment, Permutation
from .bounds import Interval
from .errors import BudgetError
from .hypergraph import Hypergraph
from .sphere import SparsePoly

__all__ = [
    "assign",
    "exact",
    "hypergraph",
    "sandwich",
    "sphere",
    "DenseTensor",
    "PartialAssignment",
    "Permutation",
    "Interval",
    "BudgetError",
    "Hypergraph",
    "SparsePoly",
]

__version__ = "0.1.0"
