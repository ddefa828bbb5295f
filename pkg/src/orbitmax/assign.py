"""The d-dimensional assignment problem over the symmetric group.

For order-d tensors A, B with side n, the objective f(g) = <B, gA> over
permutations g generalises linear (d = 1) and quadratic (d = 2)
assignment.  This module computes the exact average of f**(2k) over all
of S_n (or over a coset fixing a partial assignment) without touching
the n! permutations, certifies two-sided bounds on max |f|, extracts a
permutation greedily coset-by-coset, and provides a brute-force oracle.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple, Sequence

from . import _typesweep
from .bounds import Interval
from .errors import BudgetError
from .exact import format_rational, parse_rational

__all__ = [
    "DEFAULT_VISIT_BUDGET",
    "DEFAULT_BRUTE_CAP",
    "DenseTensor",
    "Permutation",
    "PartialAssignment",
    "GreedyResult",
    "BruteResult",
    "index_type",
    "apply_perm",
    "matrix_element",
    "moment_2k",
    "sup_bounds",
    "coset_moment",
    "greedy_extract",
    "brute_max",
    "tensor_to_json",
    "tensor_from_json",
    "permutation_to_json",
    "permutation_from_json",
]

DEFAULT_VISIT_BUDGET = 10 ** 8
DEFAULT_BRUTE_CAP = 9


@dataclass(frozen=True)
class DenseTensor:
    """Order-d array with side n over exact rationals, row-major, 0-based."""

    n: int
    d: int
    entries: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if self.n < 1 or self.d < 1:
            raise ValueError("tensor needs n >= 1 and d >= 1")
        if len(self.entries) != self.n ** self.d:
            raise ValueError(
                f"expected {self.n ** self.d} entries, got {len(self.entries)}")

    @classmethod
    def from_entries(cls, n: int, d: int,
                     values: Iterable[Fraction | int]) -> "DenseTensor":
        return cls(n, d, tuple(Fraction(v) for v in values))

    @classmethod
    def from_sparse(cls, n: int, d: int,
                    items: Mapping[tuple[int, ...], Fraction | int]) -> "DenseTensor":
        flat = [Fraction(0)] * n ** d
        for idx, val in items.items():
            flat[_flat_index(idx, n, d)] = Fraction(val)
        return cls(n, d, tuple(flat))

    @classmethod
    def zeros(cls, n: int, d: int) -> "DenseTensor":
        return cls(n, d, (Fraction(0),) * n ** d)

    def get(self, idx: Sequence[int]) -> Fraction:
        return self.entries[_flat_index(tuple(idx), self.n, self.d)]

    @property
    def is_zero_one(self) -> bool:
        return all(v == 0 or v == 1 for v in self.entries)


def _flat_index(idx: tuple[int, ...], n: int, d: int) -> int:
    if len(idx) != d:
        raise ValueError(f"index of length {len(idx)}, expected {d}")
    flat = 0
    for i in idx:
        if not 0 <= i < n:
            raise ValueError(f"index entry {i} out of range 0..{n - 1}")
        flat = flat * n + i
    return flat


@dataclass(frozen=True)
class Permutation:
    """A bijection of {0..n-1}; images[i] = g(i)."""

    images: tuple[int, ...]

    def __post_init__(self) -> None:
        n = len(self.images)
        if sorted(self.images) != list(range(n)):
            raise ValueError(f"not a permutation of 0..{n - 1}: {self.images}")

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(n)))

    @property
    def n(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i]

    def apply_index(self, idx: Sequence[int]) -> tuple[int, ...]:
        return tuple(self.images[i] for i in idx)

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for i, j in enumerate(self.images):
            inv[j] = i
        return Permutation(tuple(inv))

    def __mul__(self, other: "Permutation") -> "Permutation":
        """Composition: (g * h)(i) = g(h(i))."""
        return Permutation(tuple(self.images[other.images[i]]
                                 for i in range(self.n)))


@dataclass(frozen=True)
class PartialAssignment:
    """Injective prefix of a permutation: ordered (position, image) pairs."""

    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        pos = [p for p, _ in self.pairs]
        img = [q for _, q in self.pairs]
        if len(set(pos)) != len(pos):
            raise ValueError("positions in a partial assignment must be distinct")
        if len(set(img)) != len(img):
            raise ValueError("images in a partial assignment must be distinct")

    @classmethod
    def empty(cls) -> "PartialAssignment":
        return cls(())

    def extended(self, position: int, image: int) -> "PartialAssignment":
        return PartialAssignment(self.pairs + ((position, image),))

    def __len__(self) -> int:
        return len(self.pairs)

    @property
    def positions(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.pairs)

    @property
    def images(self) -> tuple[int, ...]:
        return tuple(q for _, q in self.pairs)


class GreedyResult(NamedTuple):
    permutation: Permutation
    value: Fraction
    abs_value: float


class BruteResult(NamedTuple):
    permutation: Permutation
    abs_value: Fraction


def index_type(seq: Sequence[int], n: int | None = None) -> tuple[tuple[int, ...], ...]:
    """Equality partition of positions 0..l-1 induced by the values of seq.

    Blocks are ordered by smallest element; two sequences related by any
    relabelling of values have equal types.
    """
    if n is not None:
        for v in seq:
            if not 0 <= v < n:
                raise ValueError(f"value {v} out of range 0..{n - 1}")
    first: dict[int, int] = {}
    blocks: list[list[int]] = []
    for pos, v in enumerate(seq):
        b = first.get(v)
        if b is None:
            first[v] = len(blocks)
            blocks.append([pos])
        else:
            blocks[b].append(pos)
    return tuple(tuple(b) for b in blocks)


def _check_shapes(a: DenseTensor, b: DenseTensor) -> None:
    if a.n != b.n or a.d != b.d:
        raise ValueError(
            f"tensor shapes differ: (n={a.n}, d={a.d}) vs (n={b.n}, d={b.d})")


def apply_perm(g: Permutation, x: DenseTensor) -> DenseTensor:
    """Relabelled tensor gX with (gX)[g(i1),...,g(id)] = X[i1,...,id]."""
    if g.n != x.n:
        raise ValueError(f"permutation on {g.n} points, tensor side {x.n}")
    n, d = x.n, x.d
    out = [Fraction(0)] * n ** d
    for flat, val in enumerate(x.entries):
        rem, new = flat, 0
        for p in range(d - 1, -1, -1):
            rem, dig = divmod(rem, n)
            new += g.images[dig] * n ** (d - 1 - p)
        out[new] = val
    return DenseTensor(n, d, tuple(out))


def matrix_element(a: DenseTensor, b: DenseTensor, g: Permutation) -> Fraction:
    """Exact inner product <B, gA> = sum_I a_I * b_{g(I)}."""
    _check_shapes(a, b)
    if g.n != a.n:
        raise ValueError(f"permutation on {g.n} points, tensors on {a.n}")
    n, d = a.n, a.d
    total = Fraction(0)
    for flat, val in enumerate(a.entries):
        if not val:
            continue
        rem, gflat, mult = flat, 0, 1
        for _ in range(d):
            rem, dig = divmod(rem, n)
            gflat += g.images[dig] * mult
            mult *= n
        total += val * b.entries[gflat]
    return total


def _int_scaled(t: DenseTensor) -> tuple[list[int], int]:
    """Clear denominators: returns (integer entries of L*t, L)."""
    scale = 1
    for v in t.entries:
        scale = scale * v.denominator // math.gcd(scale, v.denominator)
    return [int(v * scale) for v in t.entries], scale


def moment_2k(a: DenseTensor, b: DenseTensor, k: int,
              visit_budget: int | None = None) -> Fraction:
    """Exact average of <B, gA>**(2k) over all n! permutations g.

    Runs in O(n**(2kd)) sequence visits via type-grouped sums of the
    virtual tensor powers, never materialising them.
    """
    _check_shapes(a, b)
    if k < 1:
        raise ValueError("k must be >= 1")
    budget = DEFAULT_VISIT_BUDGET if visit_budget is None else visit_budget
    m = 2 * k
    ints_a, la = _int_scaled(a)
    ints_b, lb = _int_scaled(b)
    ta, tb = _typesweep.moment_tables(ints_a, ints_b, a.n, a.d, m, budget)
    total = _typesweep.combine(ta, tb, a.n, a.d, m, 0)
    return total / (Fraction(la) ** m * Fraction(lb) ** m)


def bound_factor_exact(a: DenseTensor, b: DenseTensor, k: int) -> int:
    """Exact 2k-th power of the moment-to-max factor for this pair.

    sum_{j=1}^{k} C(n**d, j) when either tensor is 0/1-valued, else the
    generic C(n**d + k - 1, k).
    """
    nd = a.n ** a.d
    if a.is_zero_one or b.is_zero_one:
        return sum(math.comb(nd, j) for j in range(1, k + 1))
    return math.comb(nd + k - 1, k)


def sup_bounds(a: DenseTensor, b: DenseTensor, k: int,
               visit_budget: int | None = None) -> Interval:
    """Certified interval around max_g |<B, gA>| from the exact 2k moment."""
    moment = moment_2k(a, b, k, visit_budget)
    return Interval.from_moment(moment, bound_factor_exact(a, b, k), k)


def _nonzero_digit_entries(flat_ints: Sequence[int], n: int,
                           d: int) -> list[tuple[tuple[int, ...], int]]:
    out = []
    for flat, val in enumerate(flat_ints):
        if val:
            digits = []
            rem = flat
            for _ in range(d):
                rem, dig = divmod(rem, n)
                digits.append(dig)
            out.append((tuple(reversed(digits)), val))
    return out


def _enumerate_coset_power_sums(nz_a, flat_b: Sequence[int], n: int, d: int,
                                m: int, pairs, split_pos: int | None):
    """Sum of <B, gA>**m over the coset fixed by ``pairs``; with
    ``split_pos`` set, one sum per value of g(split_pos) instead."""
    fixed = dict(pairs)
    free_pos = [p for p in range(n) if p not in fixed]
    used = set(fixed.values())
    free_val = [v for v in range(n) if v not in used]
    img = [0] * n
    for p, q in fixed.items():
        img[p] = q
    split: dict[int, int] = {}
    total = 0
    for perm in itertools.permutations(free_val):
        for p, v in zip(free_pos, perm):
            img[p] = v
        f = 0
        for digits, val in nz_a:
            gflat = 0
            for dig in digits:
                gflat = gflat * n + img[dig]
            f += val * flat_b[gflat]
        fp = f ** m
        if split_pos is None:
            total += fp
        else:
            key = img[split_pos]
            split[key] = split.get(key, 0) + fp
    return split if split_pos is not None else total


def _enumeration_cheaper(n: int, d: int, m: int, npins: int, nnz: int) -> bool:
    """Direct coset enumeration beats the type sweep when the coset is
    small: (n - T)! * nnz Python operations against n**(2kd) vectorised
    visits (plus the pattern tables, which stop compressing as T grows)."""
    brute_cost = math.factorial(n - npins) * max(nnz, 1)
    return brute_cost <= max(200_000, _typesweep.sequence_count(n, d, m) // 4)


def coset_moment(a: DenseTensor, b: DenseTensor, k: int,
                 prefix: PartialAssignment,
                 visit_budget: int | None = None,
                 method: str = "auto") -> Fraction:
    """Exact average of <B, gA>**(2k) over {g : g(p) = q for (p, q) in prefix}.

    The empty prefix recovers the full-group moment; a length-n prefix
    pins a single permutation and returns f(g)**(2k) exactly.

    ``method`` selects the algorithm: "typesweep" refines the type
    classes with pin patterns (polynomial in n for fixed k, d),
    "enumerate" averages over the coset directly, and "auto" picks
    whichever is cheaper.  All produce identical exact values.
    """
    _check_shapes(a, b)
    if k < 1:
        raise ValueError("k must be >= 1")
    if method not in ("auto", "typesweep", "enumerate"):
        raise ValueError(f"unknown method {method!r}")
    n = a.n
    for p, q in prefix.pairs:
        if not (0 <= p < n and 0 <= q < n):
            raise ValueError(f"prefix pair ({p}, {q}) out of range 0..{n - 1}")
    budget = DEFAULT_VISIT_BUDGET if visit_budget is None else visit_budget
    m = 2 * k
    ints_a, la = _int_scaled(a)
    ints_b, lb = _int_scaled(b)
    scale = Fraction(la) ** m * Fraction(lb) ** m
    nnz = sum(1 for v in ints_a if v)
    if method == "enumerate" or (
            method == "auto"
            and _enumeration_cheaper(n, a.d, m, len(prefix), nnz)):
        cost = math.factorial(n - len(prefix)) * max(nnz, 1)
        if cost > budget:
            raise BudgetError(
                f"coset enumeration needs {cost} evaluations, budget is {budget}",
                required=cost, budget=budget, k=k)
        nz_a = _nonzero_digit_entries(ints_a, n, a.d)
        total = _enumerate_coset_power_sums(nz_a, ints_b, n, a.d, m,
                                            prefix.pairs, None)
        return Fraction(total, math.factorial(n - len(prefix))) / scale
    if not prefix.pairs:
        return moment_2k(a, b, k, visit_budget)
    ta = _typesweep.side_table(ints_a, n, a.d, m, prefix.positions, budget)
    tb = _typesweep.side_table(ints_b, n, a.d, m, prefix.images, budget)
    total = _typesweep.combine(ta, tb, n, a.d, m, len(prefix))
    return total / scale


def greedy_extract(a: DenseTensor, b: DenseTensor, k: int,
                   visit_budget: int | None = None) -> GreedyResult:
    """Fix g(0), g(1), ... successively, each time entering the coset with
    the largest exact conditional moment (ties to the smallest image).

    Since the best child coset is at least as good as its parent's
    average, the returned permutation satisfies f(g)**(2k) >= the full
    moment, i.e. |f(g)| >= the certified lower bound.
    """
    _check_shapes(a, b)
    if k < 1:
        raise ValueError("k must be >= 1")
    budget = DEFAULT_VISIT_BUDGET if visit_budget is None else visit_budget
    n, d, m = a.n, a.d, 2 * k
    ints_a, _ = _int_scaled(a)
    ints_b, _ = _int_scaled(b)
    nnz = sum(1 for v in ints_a if v)
    nz_a = _nonzero_digit_entries(ints_a, n, d)
    chosen: list[int] = []
    for t in range(1, n + 1):
        cands = tuple(j for j in range(n) if j not in chosen)
        pairs = tuple((i, chosen[i]) for i in range(t - 1))
        best_j = None
        if _enumeration_cheaper(n, d, m, t - 1, nnz):
            # one pass over the parent coset, split by the new image;
            # children share the denominator (n-t)!, so compare raw sums
            cost = math.factorial(n - t + 1) * max(nnz, 1)
            if cost > budget:
                raise BudgetError(
                    f"coset enumeration needs {cost} evaluations, "
                    f"budget is {budget}", required=cost, budget=budget, k=k)
            sums = _enumerate_coset_power_sums(nz_a, ints_b, n, d, m,
                                               pairs, t - 1)
            best_val = None
            for j in cands:
                val = sums.get(j, 0)
                if best_val is None or val > best_val:
                    best_val, best_j = val, j
        else:
            table_a = _typesweep.side_table(ints_a, n, d, m,
                                            tuple(range(t)), budget)
            tables_b = _typesweep.candidate_side_tables(
                ints_b, n, d, m, tuple(chosen), cands, budget)
            best_frac: Fraction | None = None
            for j in cands:
                val = _typesweep.combine(table_a, tables_b[j], n, d, m, t)
                if best_frac is None or val > best_frac:
                    best_frac, best_j = val, j
        chosen.append(best_j)
    g = Permutation(tuple(chosen))
    value = matrix_element(a, b, g)
    return GreedyResult(g, value, float(abs(value)))


def brute_max(a: DenseTensor, b: DenseTensor,
              cap: int = DEFAULT_BRUTE_CAP) -> BruteResult:
    """Exact argmax of |<B, gA>| over all n! permutations.

    Ties resolve to the lexicographically smallest image tuple.  Runtime
    grows as n! * n**d; refuse above ``cap``.
    """
    _check_shapes(a, b)
    n, d = a.n, a.d
    if n > cap:
        raise ValueError(f"brute force cap is n <= {cap}, got n = {n}")
    # decode non-zero entries of A once
    nz: list[tuple[tuple[int, ...], Fraction]] = []
    for flat, val in enumerate(a.entries):
        if not val:
            continue
        digits = []
        rem = flat
        for _ in range(d):
            rem, dig = divmod(rem, n)
            digits.append(dig)
        nz.append((tuple(reversed(digits)), val))
    best_g: tuple[int, ...] | None = None
    best: Fraction | None = None
    for g in itertools.permutations(range(n)):
        s = Fraction(0)
        for digits, val in nz:
            gflat = 0
            for dig in digits:
                gflat = gflat * n + g[dig]
            s += val * b.entries[gflat]
        s = abs(s)
        if best is None or s > best:
            best, best_g = s, g
    return BruteResult(Permutation(best_g), best)


def tensor_to_json(t: DenseTensor) -> dict:
    """Sparse JSON form with 1-based indices; omitted entries are zero."""
    items = []
    n, d = t.n, t.d
    for flat, val in enumerate(t.entries):
        if not val:
            continue
        digits = []
        rem = flat
        for _ in range(d):
            rem, dig = divmod(rem, n)
            digits.append(dig + 1)
        items.append({"index": list(reversed(digits)),
                      "value": format_rational(val)})
    return {"n": n, "d": d, "entries": items}


def tensor_from_json(obj: Mapping) -> DenseTensor:
    try:
        n = int(obj["n"])
        d = int(obj["d"])
        raw = obj.get("entries", [])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed tensor object: {exc}") from exc
    items: dict[tuple[int, ...], Fraction] = {}
    for ent in raw:
        idx = tuple(int(i) - 1 for i in ent["index"])
        if idx in items:
            raise ValueError(f"duplicate tensor index {list(ent['index'])}")
        items[idx] = parse_rational(ent["value"])
    return DenseTensor.from_sparse(n, d, items)


def permutation_to_json(g: Permutation) -> dict:
    return {"images": [i + 1 for i in g.images]}


def permutation_from_json(obj: Mapping) -> Permutation:
    try:
        images = tuple(int(i) - 1 for i in obj["images"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed permutation object: {exc}") from exc
    return Permutation(images)
