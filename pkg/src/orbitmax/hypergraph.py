"""Hypergraph alignment as a tensor assignment problem.

Two hypergraphs on the same vertex set are encoded as adjacency tensors
so that the assignment objective <B, gA> counts (or weight-scores) the
edges matched by the vertex bijection g.  Bounding and extracting the
best bijection then reuses the assignment machinery.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, NamedTuple, Sequence

from . import assign
from .bounds import Interval
from .exact import format_rational, parse_rational

__all__ = [
    "Hypergraph",
    "AlignResult",
    "adjacency_tensor",
    "matched_edges",
    "align",
    "hypergraph_to_json",
    "hypergraph_from_json",
]


@dataclass(frozen=True)
class Hypergraph:
    """n vertices (0-based) and multiset edges of exactly d vertices each.

    Shorter edges must be padded to size d by repeating vertices, which
    changes their symmetrisation weight accordingly.  Edges are stored
    sorted; duplicates (as multisets) are rejected.  ``weights`` are
    optional per-edge prices, defaulting to 1.
    """

    n: int
    d: int
    edges: tuple[tuple[int, ...], ...]
    weights: tuple[Fraction, ...] = ()

    def __post_init__(self) -> None:
        if self.n < 1 or self.d < 1:
            raise ValueError("hypergraph needs n >= 1 and d >= 1")
        if not self.weights:
            object.__setattr__(self, "weights", (Fraction(1),) * len(self.edges))
        if len(self.weights) != len(self.edges):
            raise ValueError("weights must parallel edges")
        canon = []
        for e in self.edges:
            if len(e) != self.d:
                raise ValueError(
                    f"edge {e} has {len(e)} vertices (with multiplicity), "
                    f"expected exactly {self.d}; pad shorter edges explicitly")
            if any(not 0 <= v < self.n for v in e):
                raise ValueError(f"edge {e} has a vertex outside 0..{self.n - 1}")
            canon.append(tuple(sorted(e)))
        if len(set(canon)) != len(canon):
            raise ValueError("duplicate edges are not allowed")
        object.__setattr__(self, "edges", tuple(canon))

    @classmethod
    def from_edges(cls, n: int, d: int, edges: Sequence[Sequence[int]],
                   weights: Sequence[Fraction | int] | None = None) -> "Hypergraph":
        w = tuple(Fraction(x) for x in weights) if weights is not None else ()
        return cls(n, d, tuple(tuple(e) for e in edges), w)

    @property
    def uniform(self) -> bool:
        """True when every edge has d distinct vertices."""
        return all(len(set(e)) == self.d for e in self.edges)


class AlignResult(NamedTuple):
    permutation: assign.Permutation
    matched: Fraction
    bounds: Interval


def adjacency_tensor(h: Hypergraph, role: str) -> assign.DenseTensor:
    """Order-d tensor with entries at every ordered arrangement of each edge.

    role "source": entry = edge weight (1 for unweighted).
    role "target": entry = weight * (k_1! ... k_r!) / d! where the k_i
    are the multiplicities inside the edge, so each matched edge pair
    contributes exactly weight_source * weight_target to <B, gA>.
    """
    if role not in ("source", "target"):
        raise ValueError(f"role must be 'source' or 'target', got {role!r}")
    items: dict[tuple[int, ...], Fraction] = {}
    for edge, w in zip(h.edges, h.weights):
        if role == "source":
            value = w
        else:
            mult_prod = 1
            for c in Counter(edge).values():
                mult_prod *= math.factorial(c)
            value = w * Fraction(mult_prod, math.factorial(h.d))
        for arrangement in set(itertools.permutations(edge)):
            items[arrangement] = value
    return assign.DenseTensor.from_sparse(h.n, h.d, items)


def matched_edges(h1: Hypergraph, h2: Hypergraph,
                  g: assign.Permutation) -> Fraction:
    """Weighted count of h1 edges that g maps onto edges of h2.

    Equals <B, gA> for the source tensor of h1 and target tensor of h2;
    an exact non-negative integer when both hypergraphs are unweighted.
    """
    if h1.n != h2.n or h1.d != h2.d:
        raise ValueError(
            f"hypergraph shapes differ: (n={h1.n}, d={h1.d}) vs (n={h2.n}, d={h2.d})")
    return assign.matrix_element(
        adjacency_tensor(h1, "source"), adjacency_tensor(h2, "target"), g)


def align(h1: Hypergraph, h2: Hypergraph, k: int,
          visit_budget: int | None = None) -> AlignResult:
    """Certified bounds on the best matched-edge count plus a greedy bijection.

    The returned permutation's exact matched count is at least the
    certified lower bound (2k-th root of the exact moment).
    """
    if h1.n != h2.n or h1.d != h2.d:
        raise ValueError(
            f"hypergraph shapes differ: (n={h1.n}, d={h1.d}) vs (n={h2.n}, d={h2.d})")
    a = adjacency_tensor(h1, "source")
    b = adjacency_tensor(h2, "target")
    bounds = assign.sup_bounds(a, b, k, visit_budget)
    greedy = assign.greedy_extract(a, b, k, visit_budget)
    return AlignResult(greedy.permutation, greedy.value, bounds)


def hypergraph_to_json(h: Hypergraph) -> dict:
    out = {
        "n": h.n,
        "d": h.d,
        "edges": [[v + 1 for v in e] for e in h.edges],
    }
    if any(w != 1 for w in h.weights):
        out["weights"] = [format_rational(w) for w in h.weights]
    return out


def hypergraph_from_json(obj: Mapping) -> Hypergraph:
    try:
        n = int(obj["n"])
        d = int(obj["d"])
        edges = [tuple(int(v) - 1 for v in e) for e in obj["edges"]]
        weights = [parse_rational(w) for w in obj.get("weights", [])]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed hypergraph object: {exc}") from exc
    return Hypergraph.from_edges(n, d, edges, weights or None)
