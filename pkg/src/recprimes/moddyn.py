"""Periods of u_n mod m, forbidden residue classes, and the period-ordered
prime supports R_y, L_y.

A sequence mod m is eventually periodic; we keep the preperiod as a
first-class value (it is nonzero exactly when the trailing coefficient
shares a factor with m, or an initial segment is atypical, e.g. a+b even
for a geometric shift with a, b odd).  Divisibility by p is then a union
of residue classes of n modulo the period, computed by one pass over the
periodic part.

The support of bound y collects every prime whose exact period is <= y,
grouped by period; the counting window for densities is L_y = lcm[1..y],
a multiple of every period in the table.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm

from . import arith
from .arith import DomainError, factorize, is_probable_prime, prime_sieve
from .bigseq import LinearRecurrence


class NotInvertible(ValueError):
    """g has no multiplicative order mod m (gcd(g, m) > 1)."""


class IncompleteSupport(RuntimeError):
    """A period table could not be completed (factoring failure or
    degenerate candidate); carried rather than silently dropped."""


def multiplicative_order(g: int, m: int) -> int:
    """Least t >= 1 with g^t = 1 mod m, via the factored Carmichael bound."""
    if m == 1:
        return 1
    if gcd(g, m) != 1:
        raise NotInvertible(f"gcd({g}, {m}) > 1")
    lam = 1
    for p, e in arith._prime_exponents(m).items():
        if p == 2:
            block = 1 if e == 1 else (2 if e == 2 else 1 << (e - 2))
        else:
            block = p ** (e - 1) * (p - 1)
        lam = lcm(lam, block)
    t = lam
    for q in set(factorize(lam).factors):
        while t % q == 0 and pow(g, t // q, m) == 1:
            t //= q
    return t


@dataclass(frozen=True)
class PeriodRecord:
    modulus: int
    preperiod: int  # rho
    period: int  # pi, minimal


def period_mod(rec: LinearRecurrence, m: int, max_steps: int = 10_000_000) -> PeriodRecord:
    """Exact (preperiod, period) of the state-vector orbit mod m."""
    if m < 2:
        raise DomainError("modulus must be >= 2")
    k = rec.order
    state = tuple(u % m for u in rec.initial)
    seen = {state: 0}
    coeffs = tuple(reversed(rec.coeffs))
    n = 0
    while n < max_steps:
        nxt = sum(a * u for a, u in zip(coeffs, state)) % m
        state = state[1:] + (nxt,)
        n += 1
        first = seen.get(state)
        if first is not None:
            return PeriodRecord(m, first, n - first)
        seen[state] = n
    raise RuntimeError(f"no cycle within {max_steps} steps mod {m}")


@dataclass(frozen=True)
class ForbiddenClasses:
    """Residues of n mod period where p divides u_n (valid past the
    preperiod), plus the explicit pre-periodic exceptions."""

    prime: int
    preperiod: int
    period: int
    residues: frozenset[int]
    exceptions: tuple[tuple[int, bool], ...] = ()

    def divides_at(self, n: int) -> bool:
        if n < self.preperiod:
            for idx, div in self.exceptions:
                if idx == n:
                    return div
            raise DomainError(f"index {n} missing from preperiod exceptions")
        return (n % self.period) in self.residues


def forbidden_classes(rec: LinearRecurrence, p: int) -> ForbiddenClasses:
    pr = period_mod(rec, p)
    residues = set()
    exceptions = []
    it = rec.iter_terms(0, pr.preperiod + pr.period, modulus=p)
    for n, u in enumerate(it):
        if n < pr.preperiod:
            exceptions.append((n, u == 0))
        elif u == 0:
            residues.add(n % pr.period)
    return ForbiddenClasses(p, pr.preperiod, pr.period, frozenset(residues), tuple(exceptions))


@dataclass
class PeriodTable:
    """All primes of exact period <= y for one sequence, grouped by period."""

    spec: str
    y: int
    Ly: int
    groups: dict[int, tuple[int, ...]]
    complete: bool = True

    def primes(self) -> list[int]:
        return sorted(p for ps in self.groups.values() for p in ps)

    def period_of(self, p: int) -> int:
        for m, ps in self.groups.items():
            if p in ps:
                return m
        raise KeyError(p)

    def phi_ratio(self) -> Fraction:
        """phi(R_y)/R_y over the support primes."""
        out = Fraction(1)
        for p in self.primes():
            out *= Fraction(p - 1, p)
        return out

    def to_json(self) -> str:
        return json.dumps(
            {
                "spec": self.spec,
                "y": self.y,
                "Ly": self.Ly,
                "complete": self.complete,
                "groups": [
                    {"m": m, "primes": list(ps)} for m, ps in sorted(self.groups.items())
                ],
            }
        )

    @staticmethod
    def from_json(text: str) -> "PeriodTable":
        d = json.loads(text)
        groups = {g["m"]: tuple(g["primes"]) for g in d["groups"]}
        return PeriodTable(d["spec"], d["y"], d["Ly"], groups, d.get("complete", True))


def _lcm_upto(y: int) -> int:
    out = 1
    for i in range(2, y + 1):
        out = lcm(out, i)
    return out


def _geom_candidates(rec: LinearRecurrence, y: int, cache) -> set[int]:
    a, b = rec.params
    cands = {2}
    for v in (abs(a), gcd(a, b)):
        if v > 1:
            fr = factorize(v, cache=cache)
            if not fr.complete:
                raise IncompleteSupport(f"cannot factor |a| = {v}")
            cands.update(fr.factors)
    for m in range(2, y + 1):
        v = (1 << m) - 1
        fr = factorize(v, cache=cache)
        if not fr.complete:
            raise IncompleteSupport(f"cannot factor 2^{m}-1")
        cands.update(fr.factors)
    return cands


def _window_gcd_candidates(
    rec: LinearRecurrence, y: int, cache, scan_bound: int
) -> tuple[set[int], bool]:
    """Prime factors of G_m = gcd(u_{o+m+i} - u_{o+i}, i < 2k) for m <= y.

    p | G_m exactly when the orbit mod p has period dividing m on the window,
    so the union over m <= y is a candidate superset; every candidate is
    verified by period_mod afterwards.  G_m = 0 (a periodic integer
    sequence) degenerates to scanning small primes directly.
    """
    k = rec.order
    offset = 2 * k + 16
    terms = list(rec.iter_terms(offset, offset + y + 2 * k))
    cands: set[int] = set()
    complete = True
    for m in range(1, y + 1):
        g = 0
        for i in range(2 * k):
            g = gcd(g, terms[m + i] - terms[i])
        if g == 0:
            for p in prime_sieve(scan_bound).tolist():
                pr = period_mod(rec, int(p))
                if pr.period <= y:
                    cands.add(int(p))
            complete = False
            break
        if g > 1:
            fr = factorize(g, cache=cache)
            if not fr.complete:
                raise IncompleteSupport(f"cannot factor difference gcd G_{m} = {g}")
            cands.update(fr.factors)
    return cands, complete


def period_support(
    rec: LinearRecurrence,
    y: int,
    cache: arith.FactorCache | None = None,
    scan_bound: int = 1_000_000,
) -> PeriodTable:
    """Every prime with exact period <= y, each verified by period_mod."""
    if y < 1:
        raise DomainError("y must be >= 1")
    if cache is None:
        cache = arith.default_cache()
    complete = True
    if rec.tag == "geom":
        cands = _geom_candidates(rec, y, cache)
    else:
        cands, complete = _window_gcd_candidates(rec, y, cache, scan_bound)
        cands.add(2)
    groups: dict[int, list[int]] = {}
    for p in sorted(cands):
        if not is_probable_prime(p).is_prime:
            continue
        pr = period_mod(rec, p)
        if pr.period <= y:
            groups.setdefault(pr.period, []).append(p)
    return PeriodTable(
        rec.spec_string(),
        y,
        _lcm_upto(y),
        {m: tuple(ps) for m, ps in groups.items()},
        complete=complete,
    )


__all__ = [
    "NotInvertible",
    "IncompleteSupport",
    "PeriodRecord",
    "ForbiddenClasses",
    "PeriodTable",
    "multiplicative_order",
    "period_mod",
    "forbidden_classes",
    "period_support",
]
