"""Independent oracles and random-instance generators for the test suite.

Everything here is deliberately coded against different derivations than
the library paths it checks: the monomial integrator uses the
integration-by-parts recurrence, polynomial powers are expanded by
literal repeated distribution, and group averages enumerate all n!
permutations.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from orbitmax import assign
from orbitmax.hypergraph import Hypergraph
from orbitmax.sphere import SparsePoly


def oracle_monomial_moment(alpha, n: int) -> Fraction:
    """Sphere average of a monomial via the recurrence
    m(alpha) = m(alpha - 2 e_i) * (alpha_i - 1) / (n + |alpha| - 2)."""
    alpha = list(alpha)
    if any(a % 2 for a in alpha):
        return Fraction(0)
    total = sum(alpha)
    if total == 0:
        return Fraction(1)
    i = next(j for j, a in enumerate(alpha) if a)
    ai = alpha[i]
    alpha[i] -= 2
    return oracle_monomial_moment(alpha, n) * Fraction(ai - 1, n + total - 2)


def naive_poly_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            key = tuple(x + y for x, y in zip(e1, e2))
            out[key] = out.get(key, Fraction(0)) + c1 * c2
    return {e: c for e, c in out.items() if c != 0}


def naive_pow(p: SparsePoly, m: int) -> dict:
    """p**m by literal repeated distribution (no multinomial shortcut)."""
    acc = {(0,) * p.n: Fraction(1)}
    # degree bookkeeping is irrelevant here; only the term map matters
    for _ in range(m):
        acc = naive_poly_mul(acc, p.terms)
    return acc


def oracle_sphere_moment_2k(p: SparsePoly, k: int) -> Fraction:
    """Integral of p**(2k): naive expansion + recurrence integrator."""
    total = Fraction(0)
    for exps, coef in naive_pow(p, 2 * k).items():
        total += coef * oracle_monomial_moment(exps, p.n)
    return total


def wallis_circle_average(a: int, b: int) -> Fraction:
    """Average of cos**a * sin**b over the full circle, by the Wallis
    recursion W(a, b) = (a-1)/(a+b) * W(a-2, b)."""
    if a % 2 or b % 2:
        return Fraction(0)
    if a == 0 and b == 0:
        return Fraction(1)
    if a >= 2:
        return wallis_circle_average(a - 2, b) * Fraction(a - 1, a + b)
    return wallis_circle_average(b, a)


def brute_group_moment(a: assign.DenseTensor, b: assign.DenseTensor,
                       k: int) -> Fraction:
    total = Fraction(0)
    count = 0
    for images in itertools.permutations(range(a.n)):
        g = assign.Permutation(images)
        total += assign.matrix_element(a, b, g) ** (2 * k)
        count += 1
    return total / count


def brute_coset_average(a: assign.DenseTensor, b: assign.DenseTensor, k: int,
                        prefix: assign.PartialAssignment) -> Fraction:
    pairs = dict(prefix.pairs)
    total = Fraction(0)
    count = 0
    for images in itertools.permutations(range(a.n)):
        if any(images[p] != q for p, q in pairs.items()):
            continue
        g = assign.Permutation(images)
        total += assign.matrix_element(a, b, g) ** (2 * k)
        count += 1
    return total / count


def combinatorial_matched(h1: Hypergraph, h2: Hypergraph,
                          g: assign.Permutation) -> Fraction:
    """Map each h1 edge through g and look it up among h2's edges."""
    h2_weight = {e: w for e, w in zip(h2.edges, h2.weights)}
    total = Fraction(0)
    for e, w in zip(h1.edges, h1.weights):
        image = tuple(sorted(g.images[v] for v in e))
        if image in h2_weight:
            total += w * h2_weight[image]
    return total


def random_fraction(rng: random.Random, lo: int = -9, hi: int = 9,
                    max_den: int = 9) -> Fraction:
    return Fraction(rng.randint(lo, hi), rng.randint(1, max_den))


def random_poly(rng: random.Random, n: int, d: int, max_terms: int,
                nonzero: bool = True) -> SparsePoly:
    items = []
    for _ in range(rng.randint(1 if nonzero else 0, max_terms)):
        exps = [0] * n
        for _ in range(d):
            exps[rng.randrange(n)] += 1
        coef = random_fraction(rng)
        if coef == 0:
            coef = Fraction(1)
        items.append((tuple(exps), coef))
    p = SparsePoly.from_terms(n, d, items)
    if nonzero and p.is_zero:
        exps = [d] + [0] * (n - 1)
        p = SparsePoly.from_terms(n, d, [(tuple(exps), 1)])
    return p


def random_int_tensor(rng: random.Random, n: int, d: int,
                      lo: int = -9, hi: int = 9) -> assign.DenseTensor:
    return assign.DenseTensor.from_entries(
        n, d, [rng.randint(lo, hi) for _ in range(n ** d)])


def random_rational_tensor(rng: random.Random, n: int, d: int) -> assign.DenseTensor:
    return assign.DenseTensor.from_entries(
        n, d, [random_fraction(rng, -5, 5, 6) for _ in range(n ** d)])


def random_hypergraph(rng: random.Random, n: int, d: int,
                      max_edges: int) -> Hypergraph:
    pool = list(itertools.combinations_with_replacement(range(n), d))
    rng.shuffle(pool)
    count = rng.randint(0, min(max_edges, len(pool)))
    return Hypergraph.from_edges(n, d, pool[:count])


def random_permutation(rng: random.Random, n: int) -> assign.Permutation:
    images = list(range(n))
    rng.shuffle(images)
    return assign.Permutation(tuple(images))
