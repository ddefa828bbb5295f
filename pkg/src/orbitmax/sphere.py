"""Homogeneous polynomials on the unit sphere: exact even-power moments,
certified two-sided maximum bounds, the fewnomial approximation scheme,
and a feasibility reduction for square systems of polynomial equations.

A polynomial is a collected map from exponent vectors to exact rational
coefficients; all moments are exact, and floats appear only in the final
root extraction of an interval end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .bounds import Interval
from .errors import BudgetError
from .exact import format_rational, parse_rational, root_2k

__all__ = [
    "DEFAULT_TERM_BUDGET",
    "SparsePoly",
    "pow_collect",
    "integrate_on_sphere",
    "moment_2k",
    "norm_2k",
    "sup_bounds",
    "choose_k",
    "fewnomial_sup",
    "sample_lower_bound",
    "system_reduce",
    "SystemReduction",
    "permute_variables",
    "poly_to_json",
    "poly_from_json",
]

DEFAULT_TERM_BUDGET = 5_000_000


@dataclass(frozen=True, eq=True)
class SparsePoly:
    """Homogeneous polynomial of degree d in n variables.

    ``terms`` maps exponent tuples (length n, entries summing to d) to
    non-zero Fraction coefficients.  The zero polynomial is the empty
    map with a declared (n, d).  Instances are canonical on
    construction: no zero coefficients, no duplicate exponent vectors.
    """

    n: int
    d: int
    terms: dict[tuple[int, ...], Fraction] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.d < 1:
            raise ValueError("d must be >= 1 (homogeneous, non-constant)")
        for exps, coef in self.terms.items():
            if len(exps) != self.n:
                raise ValueError(
                    f"exponent vector {exps} has length {len(exps)}, expected {self.n}")
            if any(e < 0 for e in exps):
                raise ValueError(f"negative exponent in {exps}")
            if sum(exps) != self.d:
                raise ValueError(
                    f"term {exps} has total degree {sum(exps)}, expected {self.d}")
            if coef == 0:
                raise ValueError("zero coefficients must not be stored")

    @classmethod
    def from_terms(cls, n: int, d: int,
                   items: Iterable[tuple[Sequence[int], Fraction | int | str]]
                   ) -> "SparsePoly":
        """Collect (exponents, coefficient) pairs, summing duplicates."""
        acc: dict[tuple[int, ...], Fraction] = {}
        for exps, coef in items:
            key = tuple(int(e) for e in exps)
            acc[key] = acc.get(key, Fraction(0)) + parse_rational(coef)
        return cls(n, d, {e: c for e, c in acc.items() if c != 0})

    @classmethod
    def monomial(cls, n: int, exps: Sequence[int],
                 coef: Fraction | int = 1) -> "SparsePoly":
        return cls.from_terms(n, sum(exps), [(exps, coef)])

    @classmethod
    def variable(cls, n: int, i: int) -> "SparsePoly":
        exps = [0] * n
        exps[i] = 1
        return cls.from_terms(n, 1, [(exps, 1)])

    @classmethod
    def zero(cls, n: int, d: int) -> "SparsePoly":
        return cls(n, d, {})

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def num_terms(self) -> int:
        return len(self.terms)

    def __mul__(self, other: "SparsePoly | Fraction | int") -> "SparsePoly":
        if isinstance(other, SparsePoly):
            if other.n != self.n:
                raise ValueError("polynomial product needs matching n")
            acc: dict[tuple[int, ...], Fraction] = {}
            for e1, c1 in self.terms.items():
                for e2, c2 in other.terms.items():
                    key = tuple(a + b for a, b in zip(e1, e2))
                    acc[key] = acc.get(key, Fraction(0)) + c1 * c2
            return SparsePoly(self.n, self.d + other.d,
                              {e: c for e, c in acc.items() if c != 0})
        c = Fraction(other)
        if c == 0:
            return SparsePoly.zero(self.n, self.d)
        return SparsePoly(self.n, self.d,
                          {e: cf * c for e, cf in self.terms.items()})

    __rmul__ = __mul__

    def __add__(self, other: "SparsePoly") -> "SparsePoly":
        if other.n != self.n or other.d != self.d:
            raise ValueError("polynomial sum needs matching n and d")
        acc = dict(self.terms)
        for e, c in other.terms.items():
            acc[e] = acc.get(e, Fraction(0)) + c
        return SparsePoly(self.n, self.d, {e: c for e, c in acc.items() if c != 0})

    def __sub__(self, other: "SparsePoly") -> "SparsePoly":
        return self + (other * Fraction(-1))

    def __pow__(self, m: int) -> "SparsePoly":
        return pow_collect(self, m)

    def evaluate(self, point: Sequence[float]) -> float:
        """Floating evaluation at a point (for sampling diagnostics)."""
        total = 0.0
        for exps, coef in self.terms.items():
            v = float(coef)
            for x, e in zip(point, exps):
                if e:
                    v *= x ** e
            total += v
        return total


def permute_variables(p: SparsePoly, sigma: Sequence[int]) -> SparsePoly:
    """Rename variable i to sigma[i] (sigma a permutation of 0..n-1)."""
    if sorted(sigma) != list(range(p.n)):
        raise ValueError("sigma must be a permutation of 0..n-1")
    out: dict[tuple[int, ...], Fraction] = {}
    for exps, coef in p.terms.items():
        new = [0] * p.n
        for i, e in enumerate(exps):
            new[sigma[i]] = e
        out[tuple(new)] = coef
    return SparsePoly(p.n, p.d, out)


def _compositions(total: int, parts: int):
    """Weak compositions of ``total`` into ``parts`` non-negative parts."""
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _compositions(total - head, parts - 1):
            yield (head,) + rest


def pow_collect(p: SparsePoly, m: int,
                term_budget: int | None = None) -> SparsePoly:
    """p**m with terms collected, via direct multinomial expansion.

    The enumeration visits C(m + t - 1, t - 1) compositions for a
    t-term polynomial, which stays polynomial in m for fixed t; the
    projected count is checked against the term budget up front.
    """
    if m < 1:
        raise ValueError("exponent m must be >= 1")
    budget = DEFAULT_TERM_BUDGET if term_budget is None else term_budget
    if p.is_zero:
        return SparsePoly.zero(p.n, p.d * m)
    mono = list(p.terms.items())
    t = len(mono)
    comps = math.comb(m + t - 1, t - 1)
    if comps > budget:
        raise BudgetError(
            f"expanding a {t}-term polynomial to power {m} needs {comps} "
            f"collected terms, budget is {budget}",
            required=comps, budget=budget)
    # coefficient power tables, built incrementally
    pows: list[list[Fraction]] = []
    for _, coef in mono:
        row = [Fraction(1)]
        for _ in range(m):
            row.append(row[-1] * coef)
        pows.append(row)
    n = p.n
    acc: dict[tuple[int, ...], Fraction] = {}
    for comp in _compositions(m, t):
        c = 1
        rem = m
        for r in comp[:-1]:
            c = c * math.comb(rem, r)
            rem -= r
        coef = Fraction(c)
        exps = [0] * n
        for (e, _), r, row in zip(mono, comp, pows):
            if r:
                coef *= row[r]
                for i, ei in enumerate(e):
                    if ei:
                        exps[i] += r * ei
        key = tuple(exps)
        acc[key] = acc.get(key, Fraction(0)) + coef
    return SparsePoly(p.n, p.d * m, {e: c for e, c in acc.items() if c != 0})


_ODD_DF_TABLE = [1]  # (2b - 1)!! by index b; the Gaussian moment E[g**(2b)]


def _odd_double_factorial(b: int) -> int:
    while len(_ODD_DF_TABLE) <= b:
        _ODD_DF_TABLE.append(_ODD_DF_TABLE[-1] * (2 * len(_ODD_DF_TABLE) - 1))
    return _ODD_DF_TABLE[b]


def integrate_on_sphere(p: SparsePoly) -> Fraction:
    """Exact average of a homogeneous polynomial over the unit sphere.

    Equals the term-by-term monomial integral; computed with the shared
    denominator prod_{j<D/2} (n + 2j) factored out of the term loop.
    """
    if p.is_zero or p.d % 2:
        return Fraction(0)
    half = p.d // 2
    num = Fraction(0)
    for exps, coef in p.terms.items():
        if any(e % 2 for e in exps):
            continue
        w = 1
        for e in exps:
            if e:
                w *= _odd_double_factorial(e // 2)
        num += coef * w
    den = 1
    for j in range(half):
        den *= p.n + 2 * j
    return num / den


def moment_2k(p: SparsePoly, k: int, term_budget: int | None = None) -> Fraction:
    """Exact integral of p**(2k) over the unit sphere (before the root)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if p.is_zero:
        return Fraction(0)
    budget = DEFAULT_TERM_BUDGET if term_budget is None else term_budget
    t = p.num_terms
    comps = math.comb(2 * k + t - 1, t - 1)
    if comps > budget:
        raise BudgetError(
            f"moment at k={k} needs {comps} collected terms for the "
            f"{t}-term polynomial, budget is {budget}",
            required=comps, budget=budget, k=k)
    return integrate_on_sphere(pow_collect(p, 2 * k, budget))


def norm_2k(p: SparsePoly, k: int, term_budget: int | None = None) -> float:
    """The 2k-norm of p on the sphere: moment_2k(p, k) ** (1/(2k))."""
    return root_2k(moment_2k(p, k, term_budget), k)


def sup_bounds(p: SparsePoly, k: int,
               term_budget: int | None = None) -> Interval:
    """Certified interval around max |p| on the sphere at moment order k.

    The exact factor is C(kd + n - 1, kd), the dimension of degree-kd
    forms in n variables; the zero polynomial yields the degenerate
    [0, 0] interval.
    """
    moment = moment_2k(p, k, term_budget)
    factor = math.comb(k * p.d + p.n - 1, k * p.d)
    return Interval.from_moment(moment, factor, k)


def choose_k(n: int, d: int, eps: float) -> int:
    """Smallest k >= 1 with (n-1)/(2k) * ln(kd+1) < ln(1+eps).

    At this k the sup_bounds factor is below 1 + eps, so the interval
    ratio is guaranteed; k grows like eps**-1 * n**2 * ln(d).
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if n < 1 or d < 1:
        raise ValueError("need n >= 1 and d >= 1")
    if n == 1:
        return 1
    target = math.log1p(eps)
    k = 1
    while (n - 1) / (2 * k) * math.log(k * d + 1) >= target:
        k += 1
    return k


def fewnomial_sup(p: SparsePoly, eps: float,
                  term_budget: int | None = None) -> Interval:
    """Interval with guaranteed ratio upper/lower <= 1 + eps.

    Chooses k via :func:`choose_k`; the expansion cost is polynomial in
    k for a fixed number of monomials, and the term budget turns any
    blow-up into a clean error naming the offending k.
    """
    k = choose_k(p.n, p.d, eps)
    return sup_bounds(p, k, term_budget)


def sample_lower_bound(p: SparsePoly, trials: int, seed: int) -> float:
    """Max |p| over pseudo-random sphere points (normalised Gaussians).

    Deterministic per seed.  Never exceeds the true maximum, so it
    cross-checks any certified upper bound from below.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if p.is_zero:
        return 0.0
    rng = np.random.default_rng(seed)
    pts = rng.standard_normal((trials, p.n))
    norms = np.linalg.norm(pts, axis=1)
    norms[norms == 0] = 1.0
    pts /= norms[:, None]
    vals = np.zeros(trials)
    for exps, coef in p.terms.items():
        term = np.full(trials, float(coef))
        for i, e in enumerate(exps):
            if e:
                term *= pts[:, i] ** e
        vals += term
    return float(np.max(np.abs(vals)))


@dataclass(frozen=True)
class SystemReduction:
    """Outcome of the feasibility reduction for p_i(x) = 0 on the sphere."""

    gamma: float
    gamma_exact: Fraction
    p: SparsePoly
    interval: Interval
    verdict: str                     # "possibly solvable" | "certified gap"
    certified_min_q: float | None    # > 0 lower bound on min q when gapped

    def to_json(self) -> dict:
        return {
            "gamma": self.gamma,
            "gamma_exact": format_rational(self.gamma_exact),
            "verdict": self.verdict,
            "certified_min_q": self.certified_min_q,
            "interval": self.interval.to_json(),
            "p": poly_to_json(self.p),
        }


def system_reduce(system: Sequence[SparsePoly], k: int, delta: float = 0.01,
                  term_budget: int | None = None) -> SystemReduction:
    """Test whether p_1 = ... = p_s = 0 can have a nonzero real solution.

    Builds q = sum p_i**2, picks a rational gamma certified to exceed
    max q on the sphere (by factor 1 + delta over the certified upper
    bound, with an exact 2k-power check), and bounds p = gamma*|x|**(2d)
    - q.  A solution would force max |p| = gamma; if the certified upper
    bound stays below gamma*(1 - delta) the system is reported as a
    certified gap with min q >= gamma - upper > 0.
    """
    if not system:
        raise ValueError("system must contain at least one polynomial")
    if delta <= 0:
        raise ValueError("delta must be positive")
    n, d = system[0].n, system[0].d
    for q_i in system[1:]:
        if q_i.n != n or q_i.d != d:
            raise ValueError(
                f"system degrees/variables differ: (n={q_i.n}, d={q_i.d}) "
                f"vs (n={n}, d={d})")
    q = SparsePoly.zero(n, 2 * d)
    for p_i in system:
        if not p_i.is_zero:
            q = q + p_i * p_i
    qb = sup_bounds(q, k, term_budget)
    if q.is_zero:
        gamma_exact = Fraction(0)
    else:
        gamma_exact = Fraction(float((1.0 + delta) * qb.upper))
        # exact guarantee gamma**(2k) >= factor * moment, i.e. gamma >= max q
        bump = 1 + Fraction(1, 1 << 20)
        while gamma_exact ** (2 * k) < qb.upper_exact:
            gamma_exact *= bump
    norm_power = pow_collect(
        SparsePoly.from_terms(
            n, 2, [(tuple(2 if j == i else 0 for j in range(n)), 1)
                   for i in range(n)]),
        d, term_budget)
    p = norm_power * gamma_exact - q
    pb = sup_bounds(p, k, term_budget)
    gamma = float(gamma_exact)
    if pb.upper >= gamma * (1.0 - delta):
        return SystemReduction(gamma, gamma_exact, p, pb,
                               "possibly solvable", None)
    return SystemReduction(gamma, gamma_exact, p, pb,
                           "certified gap", gamma - pb.upper)


def poly_to_json(p: SparsePoly) -> dict:
    """Canonical JSON form: exponent vectors sorted lexicographically."""
    return {
        "n": p.n,
        "d": p.d,
        "terms": [{"exps": list(exps), "coef": format_rational(p.terms[exps])}
                  for exps in sorted(p.terms)],
    }


def poly_from_json(obj: Mapping) -> SparsePoly:
    try:
        n = int(obj["n"])
        d = int(obj["d"])
        raw = obj.get("terms", [])
        items = [(tuple(int(e) for e in t["exps"]), parse_rational(t["coef"]))
                 for t in raw]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed polynomial object: {exc}") from exc
    return SparsePoly.from_terms(n, d, items)
