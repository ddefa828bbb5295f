"""Desk-scale exact verification of the moment-to-maximum sandwich over S_n.

For f(g) = <ell, gv> with S_n permuting coordinates, everything is
finitely enumerable: the sup norm, the even moments, and the dimension
of the span of the orbit of the k-th tensor power of v.  This module
computes all of them exactly and checks the resulting inequalities at
the 2k-th-power level, where every comparison is between rationals.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .exact import bound_factor, format_rational

__all__ = [
    "DEFAULT_GROUP_CAP",
    "InequalityCheck",
    "SandwichReport",
    "Cor16Check",
    "Cor16Report",
    "orbit_span_dim",
    "verify_sandwich",
    "cor16_factor_check",
]

DEFAULT_GROUP_CAP = 7


@dataclass(frozen=True)
class InequalityCheck:
    inequality: str
    lhs: Fraction
    rhs: Fraction
    holds: bool
    tight: bool

    @property
    def margin(self) -> Fraction:
        return self.rhs - self.lhs

    def to_json(self) -> dict:
        return {
            "inequality": self.inequality,
            "lhs": format_rational(self.lhs),
            "rhs": format_rational(self.rhs),
            "holds": self.holds,
            "tight": self.tight,
            "margin": format_rational(self.margin),
        }


@dataclass(frozen=True)
class SandwichReport:
    n: int
    k: int
    span_dim: int
    sup_abs: Fraction
    moment_2k: Fraction
    moment_2: Fraction
    checks: tuple[InequalityCheck, ...]

    @property
    def all_hold(self) -> bool:
        return all(c.holds for c in self.checks)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "span_dim": self.span_dim,
            "sup_abs": format_rational(self.sup_abs),
            "moment_2k": format_rational(self.moment_2k),
            "moment_2": format_rational(self.moment_2),
            "all_hold": self.all_hold,
            "checks": [c.to_json() for c in self.checks],
        }


def _primitive_ints(v: Sequence[Fraction | int]) -> list[int]:
    vals = [Fraction(x) for x in v]
    scale = 1
    for x in vals:
        scale = scale * x.denominator // math.gcd(scale, x.denominator)
    ints = [int(x * scale) for x in vals]
    g = 0
    for x in ints:
        g = math.gcd(g, abs(x))
    return [x // g for x in ints] if g > 1 else ints


def _int_row_rank(rows: Sequence[tuple[int, ...]], ncols: int) -> int:
    """Exact rank over Q of integer rows, by fraction-free elimination.

    Each incoming row is reduced by cross-multiplication against the
    basis row sharing its leading column (never any division except by
    the row gcd), so all arithmetic stays in the integers.
    """
    basis: dict[int, list[int]] = {}
    rank = 0
    for row in rows:
        r = list(row)
        while True:
            lead = next((i for i, x in enumerate(r) if x), None)
            if lead is None:
                break
            b = basis.get(lead)
            if b is None:
                g = 0
                for x in r:
                    g = math.gcd(g, abs(x))
                if g > 1:
                    r = [x // g for x in r]
                basis[lead] = r
                rank += 1
                break
            bl, rl = b[lead], r[lead]
            r = [x * bl - y * rl for x, y in zip(r, b)]
            g = 0
            for x in r:
                g = math.gcd(g, abs(x))
            if g > 1:
                r = [x // g for x in r]
        if rank == ncols:
            break
    return rank


def orbit_span_dim(v: Sequence[Fraction | int], k: int,
                   cap: int = DEFAULT_GROUP_CAP) -> int:
    """Exact dimension of span{ (gv)**(tensor k) : g in S_n } over Q.

    The tensor power of a vector is symmetric, so columns at permuted
    multi-indices are identical across all rows; one column per k-multiset
    of coordinates preserves the row-space rank and keeps the
    elimination small.  Invariant under permuting or rescaling v.
    """
    n = len(v)
    if n > cap:
        raise ValueError(f"orbit span cap is n <= {cap}, got n = {n}")
    if k < 1:
        raise ValueError("k must be >= 1")
    ints = _primitive_ints(v)
    if all(x == 0 for x in ints):
        raise ValueError("v must be non-zero")
    combos = list(itertools.combinations_with_replacement(range(n), k))
    rows = set()
    for w in set(itertools.permutations(ints)):
        rows.add(tuple(math.prod(w[i] for i in combo) for combo in combos))
    return _int_row_rank(sorted(rows), len(combos))


def verify_sandwich(v: Sequence[Fraction | int], ell: Sequence[Fraction | int],
                    k: int, cap: int = DEFAULT_GROUP_CAP) -> SandwichReport:
    """Enumerate f(g) = <ell, gv> over all of S_n and check the sandwich.

    All four inequalities are verified at the 2k-th-power level with
    exact rational comparisons:

      moment_2k <= sup**(2k)              (norm below max)
      sup**(2k) <= D_k * moment_2k        (max below span-dim factor)
      moment_2  <= sup**2                 (the k = 1 case)
      sup**2    <= n * moment_2           (max below sqrt(dim) factor)
    """
    n = len(v)
    if len(ell) != n:
        raise ValueError("v and ell must have equal length")
    if n > cap:
        raise ValueError(f"group enumeration cap is n <= {cap}, got n = {n}")
    if k < 1:
        raise ValueError("k must be >= 1")
    vv = [Fraction(x) for x in v]
    ll = [Fraction(x) for x in ell]
    s2k = Fraction(0)
    s2 = Fraction(0)
    sup = Fraction(0)
    count = 0
    for g in itertools.permutations(range(n)):
        # <ell, gv> with (gv)[g(i)] = v[i]
        f = sum((vv[i] * ll[g[i]] for i in range(n)), Fraction(0))
        f2 = f * f
        s2 += f2
        s2k += f2 ** k
        if abs(f) > sup:
            sup = abs(f)
        count += 1
    m2k = s2k / count
    m2 = s2 / count
    if any(x != 0 for x in vv):
        span = orbit_span_dim(vv, k, cap)
    else:
        span = 0
    sup_2k = sup ** (2 * k)
    sup_2 = sup * sup
    checks = (
        InequalityCheck("moment_2k <= sup_abs^2k", m2k, sup_2k,
                        m2k <= sup_2k, m2k == sup_2k),
        InequalityCheck("sup_abs^2k <= span_dim * moment_2k", sup_2k,
                        span * m2k, sup_2k <= span * m2k,
                        sup_2k == span * m2k),
        InequalityCheck("moment_2 <= sup_abs^2", m2, sup_2,
                        m2 <= sup_2, m2 == sup_2),
        InequalityCheck("sup_abs^2 <= dim * moment_2", sup_2, n * m2,
                        sup_2 <= n * m2, sup_2 == n * m2),
    )
    return SandwichReport(n, k, span, sup, m2k, m2, checks)


@dataclass(frozen=True)
class Cor16Check:
    dim: int
    factor: float
    threshold: float
    holds: bool
    applicable: bool

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "factor": self.factor,
            "threshold": self.threshold,
            "holds": self.holds,
            "applicable": self.applicable,
        }


@dataclass(frozen=True)
class Cor16Report:
    eps: float
    k0: int
    checks: tuple[Cor16Check, ...]

    @property
    def all_hold(self) -> bool:
        return all(c.holds for c in self.checks if c.applicable)

    def to_json(self) -> dict:
        return {
            "eps": self.eps,
            "k0": self.k0,
            "all_hold": self.all_hold,
            "checks": [c.to_json() for c in self.checks],
        }


def cor16_factor_check(dim: int, eps: float) -> Cor16Report:
    """Smallest k0 with (k0!)**(1/k0) > 2/eps**2, then verify the bound
    factor is below eps * sqrt(dim) at k0 for sampled dimensions >= k0.

    Both the search and the verification compare exact integers at the
    k0-th-power level; the floats in the report are informational.  The
    factor inequality requires dim >= k0, so smaller dimensions are
    reported as not applicable.
    """
    if dim < 1:
        raise ValueError("dim must be >= 1")
    if eps <= 0:
        raise ValueError("eps must be positive")
    eps_exact = Fraction(eps)
    k0 = 1
    while not math.factorial(k0) * eps_exact ** (2 * k0) > 2 ** k0:
        k0 += 1
    dims = sorted({dim, k0, 2 * k0, 10 * k0})
    checks = []
    for dm in dims:
        applicable = dm >= k0
        holds = math.comb(dm + k0 - 1, k0) <= eps_exact ** (2 * k0) * dm ** k0
        checks.append(Cor16Check(
            dim=dm,
            factor=bound_factor(dm, k0),
            threshold=eps * math.sqrt(dm),
            holds=bool(holds),
            applicable=applicable,
        ))
    return Cor16Report(eps, k0, tuple(checks))
