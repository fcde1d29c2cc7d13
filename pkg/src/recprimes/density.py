"""Exact density constants for coprimality to period-ordered supports.

delta(rec, y) counts, over one full window of length L_y = lcm[1..y] past
the preperiod, the indices n whose term avoids every forbidden residue
class of the support primes, normalized by L_y * phi(R_y)/R_y.  Everything
is exact rational until report formatting.

Two independent counting strategies are kept: a segmented bit sieve over
the window (the default; linear scan, deterministic under any segment
split) and inclusion-exclusion over the forbidden classes (exact CRT
bookkeeping, used to cross-check the sieve at small y).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, log

import numpy as np

from .arith import DomainError, prime_sieve
from .bigseq import CharPoly, LinearRecurrence
from .moddyn import IncompleteSupport, PeriodTable, forbidden_classes, period_support

EULER_GAMMA = 0.5772156649015328606


class NotExponentiallyGrowing(ValueError):
    """Predictions need a dominant root above 1."""


@dataclass(frozen=True)
class DensityReport:
    y: int
    coprime_count: int
    window_length: int  # L_y
    window_start: int
    phi_ratio: Fraction  # phi(R_y)/R_y
    delta: Fraction  # exact
    support: PeriodTable

    @property
    def delta_float(self) -> float:
        return float(self.delta)

    def formatted(self, places: int = 4) -> str:
        return f"{float(self.delta):.{places}f}"


def delta_mod(rec: LinearRecurrence, m: int) -> Fraction:
    """Prob(gcd(u_n, m) = 1) over one period past the preperiod, divided by
    phi(m)/m."""
    if m < 2:
        raise DomainError("modulus must be >= 2")
    from .moddyn import period_mod
    from .arith import euler_phi

    pr = period_mod(rec, m)
    count = 0
    for u in rec.iter_terms(pr.preperiod, pr.preperiod + pr.period, modulus=m):
        if gcd(u, m) == 1:
            count += 1
    return Fraction(count, pr.period) / Fraction(euler_phi(m), m)


def _forbidden_pairs(rec: LinearRecurrence, table: PeriodTable):
    """(modulus, residue) pairs plus the largest preperiod over the support."""
    pairs = []
    rho_max = 0
    for p in table.primes():
        fc = forbidden_classes(rec, p)
        rho_max = max(rho_max, fc.preperiod)
        for s in sorted(fc.residues):
            pairs.append((fc.period, s))
    return pairs, rho_max


def _count_sieve(pairs, start: int, length: int, segment: int = 1 << 22) -> int:
    """Allowed indices in [start, start+length), by segmented strided marking."""
    count = 0
    lo = start
    end = start + length
    while lo < end:
        hi = min(lo + segment, end)
        allowed = np.ones(hi - lo, dtype=bool)
        for m, s in pairs:
            first = (s - lo) % m
            allowed[first::m] = False
        count += int(np.count_nonzero(allowed))
        lo = hi
    return count


def _count_inclusion_exclusion(pairs, start: int, length: int) -> int:
    """Same count by signed CRT enumeration; every modulus divides length."""
    for m, _ in pairs:
        if length % m:
            raise DomainError("window must be a multiple of every period")
    total = 0

    def go(idx: int, mod: int, res: int, sign: int):
        nonlocal total
        total += sign * (length // mod)
        for j in range(idx, len(pairs)):
            m, s = pairs[j]
            g = gcd(mod, m)
            if (s - res) % g:
                continue  # incompatible congruences contribute nothing
            mm = mod // g * m
            # CRT merge of (res mod mod) and (s mod m)
            t = ((s - res) // g * pow(mod // g, -1, m // g)) % (m // g)
            go(j + 1, mm, (res + mod * t) % mm, -sign)

    go(0, 1, 0, 1)
    return total


def window_count(
    rec: LinearRecurrence,
    table: PeriodTable,
    multiplier: int = 1,
    strategy: str = "sieve",
) -> tuple[int, int]:
    """(allowed count, window start) over `multiplier` full windows."""
    pairs, rho_max = _forbidden_pairs(rec, table)
    L = table.Ly
    start = 1
    while start < rho_max:
        start += L
    if strategy == "sieve":
        return _count_sieve(pairs, start, L * multiplier), start
    if strategy == "ie":
        return _count_inclusion_exclusion(pairs, start, L * multiplier), start
    raise DomainError(f"unknown strategy {strategy!r}")


def delta(rec: LinearRecurrence, y: int, strategy: str = "sieve") -> DensityReport:
    """delta_u(R_y), exact; the conjectured c_u is its large-y limit."""
    table = period_support(rec, y)
    if not table.complete:
        raise IncompleteSupport(f"support at y = {y} is incomplete")
    count, start = window_count(rec, table, strategy=strategy)
    phi_ratio = table.phi_ratio()
    d = Fraction(count, table.Ly) / phi_ratio
    return DensityReport(y, count, table.Ly, start, phi_ratio, d, table)


def predict_count(rec: LinearRecurrence, N: int, y: int) -> float:
    """delta_u(R_y) * log_alpha N, the prediction for Pi_u(N)."""
    alpha = CharPoly.from_recurrence(rec).dominant_root
    if alpha <= 1.0:
        raise NotExponentiallyGrowing(f"dominant root {alpha} <= 1")
    d = delta(rec, y)
    return d.delta_float * log(N) / log(alpha)


def mersenne_style_prediction(N: int, alpha: float) -> float:
    """e^gamma * log_alpha N, the prediction for division-sequence censuses."""
    if alpha <= 1 or N < 2:
        raise DomainError("need alpha > 1 and N >= 2")
    import math

    return math.exp(EULER_GAMMA) * log(N) / log(alpha)


@dataclass(frozen=True)
class KappaEstimate:
    value: float
    p_max: int
    fixed_prime: int | None = None  # set when some delta(f, p) vanishes


def kappa_f(poly, y: int) -> KappaEstimate:
    """Truncated product of (p - omega(p))/(p - 1) over p <= y, with omega(p)
    the number of roots of the polynomial mod p (coefficients ascending)."""
    if y < 2:
        raise DomainError("need y >= 2")
    coeffs = [int(c) for c in poly]
    value = 1.0
    for p in prime_sieve(y + 1).tolist():
        xs = np.arange(p, dtype=np.int64)
        acc = np.zeros(p, dtype=np.int64)
        for c in reversed(coeffs):
            acc = (acc * xs + c % p) % p
        omega = int(np.count_nonzero(acc == 0))
        if p == omega:
            return KappaEstimate(0.0, int(p), fixed_prime=int(p))
        if p > 2:
            value *= (p - omega) / (p - 1)
        # p = 2 contributes (2 - omega)/(2 - 1) = 2 - omega
        else:
            value *= 2 - omega
    return KappaEstimate(value, y)


__all__ = [
    "NotExponentiallyGrowing",
    "DensityReport",
    "KappaEstimate",
    "EULER_GAMMA",
    "delta_mod",
    "delta",
    "window_count",
    "predict_count",
    "mersenne_style_prediction",
    "kappa_f",
]
