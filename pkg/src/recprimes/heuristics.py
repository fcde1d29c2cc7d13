"""Numeric constants and statistical experiments: the twin-prime constant
and its order-weighted variants, the extreme-value roots beta_k < k <
gamma_k, exact sieve identities over period-ordered supports, average
prime-factor-count experiments, and empirical moments of the census counts.

Constants are evaluated with 30-digit working precision (mpmath) at a
stated truncation; no extrapolation beyond the truncation is asserted.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm

import mpmath as mp

from .arith import (
    DEFAULT_POLICY,
    DomainError,
    FactorizationResult,
    PrpPolicy,
    factorize,
    phi2,
    prime_sieve,
)
from .bigseq import LinearRecurrence, divisors, make_geometric_shift, phi_decomposition
from .census import CensusConfig, DEFAULT_CONFIG, census
from .moddyn import forbidden_classes, multiplicative_order, period_support

mp.mp.dps = 30


@dataclass(frozen=True)
class ConstantEstimate:
    value: float
    value_str: str  # 30-digit working value at the stated truncation
    truncation: int
    direction: str  # "increasing" | "decreasing" | "oscillating"
    tail_bound: float | None = None

    def __float__(self) -> float:
        return self.value


def _estimate(v: mp.mpf, truncation: int, direction: str, tail=None) -> ConstantEstimate:
    return ConstantEstimate(float(v), mp.nstr(v, 20), truncation, direction, tail)


def twin_constant(p_max: int) -> ConstantEstimate:
    """2 * prod_{3 <= p <= p_max} (1 - 1/(p-1)^2), decreasing in p_max."""
    if p_max < 3:
        raise DomainError("p_max must be >= 3")
    acc = mp.mpf(2)
    for p in prime_sieve(p_max + 1).tolist():
        if p > 2:
            acc *= 1 - mp.mpf(1) / (p - 1) ** 2
    return _estimate(acc, p_max, "decreasing")


_C2_CACHE: dict[int, mp.mpf] = {}


def _c2(p_max: int = 1_000_000) -> mp.mpf:
    v = _C2_CACHE.get(p_max)
    if v is None:
        v = mp.mpf(twin_constant(p_max).value_str)
        _C2_CACHE[p_max] = v
    return v


def ord2(d: int) -> int:
    """ord_d(2) for odd d (1 for d = 1)."""
    return multiplicative_order(2, d)


def cv_constant(d_max: int, c2_p_max: int = 1_000_000) -> ConstantEstimate:
    """C_2 * sum over odd squarefree d <= d_max of 1/(phi2(d) * ord_d(2))."""
    if d_max < 1:
        raise DomainError("d_max must be >= 1")
    total = mp.mpf(0)
    for d in range(1, d_max + 1, 2):
        if d > 1:
            fr = factorize(d)
            if len(set(fr.factors)) != len(fr.factors):
                continue
        total += mp.mpf(1) / (phi2(d) * ord2(d))
    return _estimate(_c2(c2_p_max) * total, d_max, "increasing")


def cv_lower_bound(p_max: int) -> ConstantEstimate:
    """prod_{p <= p_max} (1 + 1/(p-1)^3), increasing in p_max."""
    if p_max < 2:
        raise DomainError("p_max must be >= 2")
    acc = mp.mpf(1)
    for p in prime_sieve(p_max + 1).tolist():
        acc *= 1 + mp.mpf(1) / (p - 1) ** 3
    return _estimate(acc, p_max, "increasing")


def ck_constant(k: int, p_max: int) -> ConstantEstimate:
    """2^{k-1} * prod_{3 <= p <= p_max} (1 - k_p/p)/(1 - 1/p)^k, where
    k_p = min(k, ord_p(2))."""
    if k < 1:
        raise DomainError("k must be >= 1")
    acc = mp.mpf(2) ** (k - 1)
    for p in prime_sieve(p_max + 1).tolist():
        if p == 2:
            continue
        kp = min(k, multiplicative_order(2, int(p)))
        acc *= (1 - mp.mpf(kp) / p) / (1 - mp.mpf(1) / p) ** k
    return _estimate(acc, p_max, "oscillating")


def beta_gamma(k: int) -> tuple[float, float]:
    """The two roots of t*(1 + log k - log t) = k - 1 with beta_k < k < gamma_k."""
    if k < 1:
        raise DomainError("k must be >= 1")
    if k == 1:
        return 0.0, math.e

    def g(t):
        return t * (1 + mp.log(k) - mp.log(t)) - (k - 1)

    beta = mp.findroot(g, _bisect_seed(g, mp.mpf("1e-12"), mp.mpf(k)))
    gamma = mp.findroot(g, _bisect_seed(g, mp.mpf(k), mp.mpf(k) * mp.e))
    assert abs(g(beta)) < 1e-12 and abs(g(gamma)) < 1e-12
    return float(beta), float(gamma)


def _bisect_seed(g, lo, hi, steps: int = 80):
    flo = g(lo)
    for _ in range(steps):
        mid = (lo + hi) / 2
        if (g(mid) > 0) == (flo > 0):
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


# ---------------------------------------------------------------------------
# exact sieve identities over the period-ordered support
# ---------------------------------------------------------------------------


def _odd_support_primes(y: int) -> list[tuple[int, int]]:
    """(p, ord_p(2)) for odd p with ord_p(2) <= y."""
    table = period_support(make_geometric_shift(1, -1), y)
    return [(p, table.period_of(p)) for p in table.primes() if p != 2]


def sieve_identity_check(y: int) -> tuple[Fraction, Fraction]:
    """lhs = sum over odd squarefree d | R_y of mu(d)/ord_d(2);
    rhs = prod_{p <= y} (1 - 1/p).  They agree exactly: the lhs is the
    density of integers divisible by no period <= y, i.e. by no integer in
    (1, y], i.e. by no prime <= y."""
    if not 2 <= y <= 30:
        raise DomainError("supported for 2 <= y <= 30")
    support = _odd_support_primes(y)
    lhs = Fraction(0)
    for mask in range(1 << len(support)):
        sign = 1
        order = 1
        for i, (p, m) in enumerate(support):
            if mask >> i & 1:
                sign = -sign
                order = lcm(order, m)
        lhs += Fraction(sign, order)
    rhs = Fraction(1)
    for p in prime_sieve(y + 1).tolist():
        rhs *= Fraction(p - 1, p)
    return lhs, rhs


def _class_intersection_nonempty(classes) -> bool:
    """Is there an n with n mod pi_p in S_p for every listed prime?"""

    def go(idx, mod, res):
        if idx == len(classes):
            return True
        pi, residues = classes[idx]
        for s in residues:
            g = gcd(mod, pi)
            if (s - res) % g:
                continue
            mm = mod // g * pi
            t = ((s - res) // g * pow(mod // g, -1, pi // g)) % (pi // g)
            if go(idx + 1, mm, (res + mod * t) % mm):
                return True
        return False

    return go(0, 1, 0)


def eta_sum(rec: LinearRecurrence, y: int, primes=None) -> Fraction:
    """sum over odd squarefree d of mu(d) * eta_d / m_d, with eta_d = 1 when
    some index n has d dividing u_n (nonempty CRT intersection of the
    forbidden classes), and m_d the period of the sequence mod d.

    `primes` restricts the support to a subset (the default is every odd
    support prime of bound y)."""
    if primes is None:
        table = period_support(rec, y)
        primes = [p for p in table.primes() if p != 2]
    info = []
    for p in primes:
        fc = forbidden_classes(rec, p)
        info.append((fc.period, tuple(sorted(fc.residues))))
    total = Fraction(0)
    for mask in range(1 << len(info)):
        chosen = [info[i] for i in range(len(info)) if mask >> i & 1]
        sign = -1 if len(chosen) % 2 else 1
        m_d = 1
        for pi, _ in chosen:
            m_d = lcm(m_d, pi)
        eta = 1 if _class_intersection_nonempty(chosen) else 0
        if eta:
            total += Fraction(sign, m_d)
    return total


# ---------------------------------------------------------------------------
# average number of prime factors
# ---------------------------------------------------------------------------


@dataclass
class OmegaReport:
    spec: str
    N: int
    convention: str  # "dyadic": N < n <= 2N;  "upto": 1 <= n <= N
    observed: float  # mean of Omega(u_n); a lower bound when flagged
    prediction: float
    flagged_lower_bound: bool
    values: dict[int, int]
    incomplete_indices: tuple[int, ...] = ()


def _omega_window(N: int, convention: str) -> range:
    if convention == "dyadic":
        return range(N + 1, 2 * N + 1)
    if convention == "upto":
        return range(1, N + 1)
    raise DomainError(f"unknown range convention {convention!r}")


def mean_omega_experiment(
    rec: LinearRecurrence,
    N: int,
    range_convention: str = "dyadic",
    effort: int = 1 << 26,
    prediction_offset: float = 0.0,
) -> OmegaReport:
    """Mean Omega(u_n) over the window, against 0.5*(log N)^2 for strong
    division sequences and log N (+offset) otherwise.

    Unfactored cofactors are composite, so they contribute 2 to Omega as a
    lower bound; the report is flagged when any remain."""
    window = _omega_window(N, range_convention)
    values: dict[int, int] = {}
    incomplete = []
    if rec.is_division_sequence:
        piece_cache: dict[int, FactorizationResult] = {}
        for d in range(1, max(window) + 1):
            piece_cache[d] = factorize(phi_decomposition(rec, d), effort=effort)
        for n in window:
            om = 0
            bad = False
            for d in divisors(n):
                fr = piece_cache[d]
                om += fr.omega_lower_bound
                bad = bad or not fr.complete
            values[n] = om
            if bad:
                incomplete.append(n)
        prediction = 0.5 * math.log(N) ** 2
    else:
        for n in window:
            fr = factorize(rec.eval(n), effort=effort)
            values[n] = fr.omega_lower_bound
            if not fr.complete:
                incomplete.append(n)
        prediction = math.log(N) + prediction_offset
    observed = sum(values.values()) / len(values)
    return OmegaReport(
        rec.spec_string(),
        N,
        range_convention,
        observed,
        prediction,
        bool(incomplete),
        values,
        tuple(incomplete),
    )


# ---------------------------------------------------------------------------
# moments of the census counts over shifting b
# ---------------------------------------------------------------------------


@dataclass
class MomentReport:
    N: int
    B: int
    k: int
    empirical: float  # (1/B) * sum over odd 3 <= b <= B of count^k
    prediction: float
    per_b: dict[int, int]
    partial: bool = False
    completed_b: int = 0

    def recompute(self) -> float:
        return sum(c**self.k for c in self.per_b.values()) / self.B


def _census_count(args) -> tuple[int, int]:
    b, N, policy, config = args
    rec = make_geometric_shift(1, b)
    return b, census(rec, N, policy=policy, config=config).count


def empirical_moments(
    N: int,
    B: int,
    k: int,
    policy: PrpPolicy = DEFAULT_POLICY,
    config: CensusConfig = DEFAULT_CONFIG,
    workers: int = 1,
    max_seconds: float | None = None,
    cv_d_max: int = 2000,
) -> MomentReport:
    """k-th moment (1/B) sum_{odd b <= B, b != 1} Pi_{1,b}(N)^k.

    The b = 1 case is excluded (its indices collapse to powers of two), and
    even b never produce odd terms, so the normalization is by B while only
    odd b are run."""
    t0 = time.time()
    bs = [b for b in range(3, B + 1, 2)]
    per_b: dict[int, int] = {}
    partial = False
    jobs = [(b, N, policy, config) for b in bs]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for b, c in pool.map(_census_count, jobs, chunksize=16):
                per_b[b] = c
                if max_seconds is not None and time.time() - t0 > max_seconds:
                    partial = True
                    break
    else:
        for job in jobs:
            b, c = _census_count(job)
            per_b[b] = c
            if max_seconds is not None and time.time() - t0 > max_seconds:
                partial = b != bs[-1]
                break
    log2N = math.log2(N)
    prediction = log2N**k if k == 1 else float(cv_constant(cv_d_max).value) * log2N**k
    empirical = sum(c**k for c in per_b.values()) / B
    return MomentReport(N, B, k, empirical, prediction, per_b, partial, max(per_b) if per_b else 0)


__all__ = [
    "ConstantEstimate",
    "twin_constant",
    "cv_constant",
    "cv_lower_bound",
    "ck_constant",
    "beta_gamma",
    "ord2",
    "sieve_identity_check",
    "eta_sum",
    "OmegaReport",
    "mean_omega_experiment",
    "MomentReport",
    "empirical_moments",
]
