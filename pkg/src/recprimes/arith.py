"""Big-integer primality, staged trial division, factorization, and the
classical arithmetic functions.

Everything here is exact and deterministic: probable-prime verdicts below
2^64 use a fixed Miller-Rabin witness set (sufficient far beyond 2^64), and
above it a strong base-2 test plus seeded random-base rounds, so a verdict
is reproducible from (n, policy).  Factorization is trial division to a
bound, a light Pollard p-1 stage, then Brent-cycle Pollard rho with a
bounded iteration budget; cofactors that survive the budget are returned
flagged, never silently dropped.
"""

from __future__ import annotations

import os
import random
import threading
from dataclasses import dataclass
from math import gcd, lcm, prod

import gmpy2
import numpy as np

mpz = gmpy2.mpz

# Valid for all n < 3.3e24, comfortably above the 2^64 policy threshold.
_MR_DETERMINISTIC_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

_TINY_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)


class DomainError(ValueError):
    """Argument outside a function's mathematical domain."""


class IncompleteFactorization(ValueError):
    """An exact answer was requested from a factorization with a flagged cofactor."""


def prime_sieve(limit: int) -> np.ndarray:
    """All primes < limit as an int64 array (plain sieve of Eratosthenes)."""
    if limit < 3:
        return np.array([2] if limit == 2 else [], dtype=np.int64)
    flags = np.ones(limit, dtype=bool)
    flags[:2] = False
    for p in range(2, int(limit**0.5) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.flatnonzero(flags).astype(np.int64)


_SMALL_PRIME_CACHE: dict[int, list[int]] = {}


def _small_primes(limit: int = 100_000) -> list[int]:
    ps = _SMALL_PRIME_CACHE.get(limit)
    if ps is None:
        ps = prime_sieve(limit).tolist()
        _SMALL_PRIME_CACHE[limit] = ps
    return ps


# ---------------------------------------------------------------------------
# modular exponentiation with a fast path for 2^K +- 1 moduli
# ---------------------------------------------------------------------------


def _special_form(n):
    """Return (K, +1) if n = 2^K+1, (K, -1) if n = 2^K-1 (K >= 8), else None."""
    for sign in (1, -1):
        m = n - sign
        K = m.bit_length() - 1
        if K >= 8 and m == mpz(1) << K:
            return K, sign
    return None


def _mod_fold(x, K, mask, n, sign):
    # reduce mod 2^K + sign without division: 2^K = -sign (mod n)
    while x.bit_length() > K:
        if sign > 0:
            x = (x & mask) - (x >> K)
        else:
            x = (x & mask) + (x >> K)
    while x < 0:
        x += n
    if x >= n:
        x -= n
    return x


def powmod(base, exp, n):
    """base**exp mod n; folds the reduction when n = 2^K +- 1."""
    n = mpz(n)
    form = _special_form(n)
    if form is None:
        return gmpy2.powmod(base, exp, n)
    K, sign = form
    mask = (mpz(1) << K) - 1
    result = mpz(1)
    b = _mod_fold(mpz(base), K, mask, n, sign)
    for bit in bin(int(exp))[2:]:
        result = _mod_fold(result * result, K, mask, n, sign)
        if bit == "1":
            result = _mod_fold(result * b, K, mask, n, sign)
    return result


def strong_probable_prime(n, base: int) -> bool:
    """One strong (Miller-Rabin) round; n odd > 2."""
    n = mpz(n)
    d = n - 1
    s = 0
    while d % 2 == 0:
        d >>= 1
        s += 1
    b = base % n
    if b in (0, 1, n - 1):
        return True
    x = powmod(b, d, n)
    if x == 1 or x == n - 1:
        return True
    form = _special_form(n)
    if form is not None:
        K, sign = form
        mask = (mpz(1) << K) - 1
        for _ in range(s - 1):
            x = _mod_fold(x * x, K, mask, n, sign)
            if x == n - 1:
                return True
        return False
    for _ in range(s - 1):
        x = (x * x) % n
        if x == n - 1:
            return True
    return False


# ---------------------------------------------------------------------------
# verdicts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Verdict:
    """Outcome of a primality check, with evidence for composites."""

    kind: str  # "composite" | "probable-prime" | "proven-prime"
    method: str
    evidence: int | str | None = None  # witness base or factor when composite
    rounds: int = 0

    @property
    def is_prime(self) -> bool:
        return self.kind != "composite"

    @staticmethod
    def composite(evidence, method: str) -> "Verdict":
        return Verdict("composite", method, evidence)

    @staticmethod
    def probable(rounds: int, method: str = "strong-prp") -> "Verdict":
        return Verdict("probable-prime", method, rounds=rounds)

    @staticmethod
    def proven(method: str) -> "Verdict":
        return Verdict("proven-prime", method)


@dataclass(frozen=True)
class PrpPolicy:
    """Probable-prime testing policy.

    Below `deterministic_below` the fixed witness set proves the verdict.
    Above it: one strong base-2 round plus `rounds` random bases drawn from
    a generator seeded by (seed, n), so reruns reproduce the verdict bit
    for bit.  An explicit `bases` tuple replaces that schedule entirely
    (used where a particular base is decisive, e.g. base 3 for 2^2^m + 1).
    """

    rounds: int = 24
    deterministic_below: int = 1 << 64
    seed: int = 0
    bases: tuple[int, ...] = ()

    def fingerprint(self) -> str:
        extra = f"bases={list(self.bases)}" if self.bases else f"rounds={self.rounds}"
        return f"mr<2^{self.deterministic_below.bit_length() - 1};{extra};seed={self.seed}"

    def random_bases(self, n) -> list[int]:
        rng = random.Random(f"{self.seed}:{int(n) % (1 << 64)}:{int(n).bit_length()}")
        return [rng.randrange(3, 1 << 48) for _ in range(self.rounds)]


DEFAULT_POLICY = PrpPolicy()


def is_probable_prime(n, policy: PrpPolicy = DEFAULT_POLICY) -> Verdict:
    """Primality verdict for any integer; n < 2 is composite by convention."""
    n = mpz(n)
    if n < 2:
        return Verdict.composite(f"{int(n)} < 2", "convention")
    for p in _TINY_PRIMES:
        if n == p:
            return Verdict.proven("trial")
        if n % p == 0:
            return Verdict.composite(p, "trial")
    if n < policy.deterministic_below:
        for b in _MR_DETERMINISTIC_BASES:
            if not strong_probable_prime(n, b):
                return Verdict.composite(b, "mr-witness")
        return Verdict.proven("mr-deterministic")
    bases = list(policy.bases) if policy.bases else [2] + policy.random_bases(n)
    for b in bases:
        if not strong_probable_prime(n, b):
            return Verdict.composite(b, "mr-witness")
    return Verdict.probable(len(bases))


# ---------------------------------------------------------------------------
# trial division
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TrialConfig:
    """Staged trial-division configuration.

    `plain_bound` sweeps all primes below the bound (smallest factor first).
    When `kp1_exponent` is set, candidate divisors are restricted to the
    progression k*p+1, k = 1..k_bound, optionally filtered to q = +-1 mod 8
    (the divisor shape for terms of two-term sequences at prime index p).
    """

    plain_bound: int = 0
    kp1_exponent: int | None = None
    k_bound: int = 0
    mod8_filter: bool = False


def trial_division(n, config: TrialConfig):
    """First factor of n found under `config`, or None."""
    n = mpz(n)
    if n <= 1:
        raise DomainError("trial division requires n > 1")
    if config.plain_bound:
        for p in _small_primes(min(config.plain_bound, 100_000)):
            if p >= config.plain_bound:
                break
            if p * p > n:
                return None
            if n % p == 0:
                return int(p)
        if config.plain_bound > 100_000:
            p = mpz(100_003)
            while p < config.plain_bound and p * p <= n:
                if n % p == 0:
                    return int(p)
                p = gmpy2.next_prime(p)
    if config.kp1_exponent:
        p = config.kp1_exponent
        for k in range(1, config.k_bound + 1):
            q = k * p + 1
            if config.mod8_filter and q % 8 not in (1, 7):
                continue
            if q * q > n:
                break
            if n % q == 0:
                return int(q)
    return None


# ---------------------------------------------------------------------------
# factorization: gcd-block trial division, p-1, Brent rho
# ---------------------------------------------------------------------------

_GCD_BLOCKS: list[tuple[int, int, object]] = []  # (lo, hi, product) over _small_primes


def _gcd_blocks():
    if not _GCD_BLOCKS:
        ps = _small_primes()
        step = 2000
        for i in range(0, len(ps), step):
            chunk = ps[i : i + step]
            _GCD_BLOCKS.append((i, i + len(chunk), mpz(prod(chunk))))
    return _GCD_BLOCKS


def _strip_small(n):
    """Divide out all prime factors < 1e5 via gcds with prime-block products."""
    out = []
    ps = _small_primes()
    for p in ps[:25]:
        while n % p == 0:
            out.append(p)
            n //= p
    if n == 1:
        return out, n
    for lo, hi, block in _gcd_blocks():
        g = gmpy2.gcd(n, block)
        if g > 1:
            for p in ps[lo:hi]:
                while n % p == 0:
                    out.append(p)
                    n //= p
        if n == 1:
            break
    return out, n


def _pollard_pm1(n, b1: int = 50_000):
    a = mpz(2)
    for p in _small_primes(b1):
        pe = p
        while pe * p <= b1:
            pe *= p
        a = gmpy2.powmod(a, pe, n)
    g = gmpy2.gcd(a - 1, n)
    return int(g) if 1 < g < n else None


def brent_rho(n, budget: int = 1 << 26, seed: int = 1):
    """Brent-cycle rho with batched gcds; a nontrivial factor or None."""
    n = mpz(n)
    if n % 2 == 0:
        return 2
    rng = random.Random(f"rho:{seed}:{int(n) % (1 << 64)}")
    used = 0
    while used < budget:
        y = mpz(rng.randrange(1, n))
        c = mpz(rng.randrange(1, n))
        m = 256
        g, r, q = mpz(1), 1, mpz(1)
        while g == 1 and used < budget:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = gmpy2.gcd(q, n)
                k += m
                used += 2 * min(m, r - k + m)
            r *= 2
        if g == n:
            g = mpz(1)
            y = ys
            while g == 1:
                y = (y * y + c) % n
                g = gmpy2.gcd(abs(x - y), n)
        if 1 < g < n:
            return int(g)
    return None


@dataclass(frozen=True)
class FactorizationResult:
    """Prime factors with multiplicity, plus any cofactor that resisted the
    effort budget (always composite, never silently dropped)."""

    n: int
    sign: int
    factors: tuple[int, ...]  # sorted, with multiplicity, each probably prime
    cofactor: int | None = None

    @property
    def complete(self) -> bool:
        return self.cofactor is None

    @property
    def omega(self) -> int:
        """Omega(|n|); raises if a flagged cofactor remains."""
        if not self.complete:
            raise IncompleteFactorization(f"unfactored cofactor of {self.n}")
        return len(self.factors)

    @property
    def omega_lower_bound(self) -> int:
        # a flagged cofactor is composite, hence contributes at least 2
        return len(self.factors) + (2 if self.cofactor else 0)

    def reconstruct(self) -> int:
        v = prod(self.factors) * (self.cofactor or 1)
        return self.sign * v


class FactorCache:
    """File-backed map n -> complete factorization, `n f1 f2 ...` per line.

    Behaves as a single atomic get-or-compute map: all access goes through
    one lock, and writes are appended immediately.
    """

    def __init__(self, path: str | None = None):
        self.path = path
        self._lock = threading.Lock()
        self._map: dict[int, tuple[int, ...]] = {}
        if path and os.path.exists(path):
            with open(path) as fh:
                for line in fh:
                    parts = line.split()
                    if len(parts) >= 2:
                        self._map[int(parts[0])] = tuple(int(x) for x in parts[1:])

    def get(self, n: int):
        with self._lock:
            return self._map.get(n)

    def put(self, n: int, factors: tuple[int, ...]):
        with self._lock:
            if n in self._map:
                return
            self._map[n] = factors
            if self.path:
                with open(self.path, "a") as fh:
                    fh.write(f"{n} {' '.join(map(str, factors))}\n")


_default_cache: FactorCache | None = None


def default_cache() -> FactorCache:
    global _default_cache
    if _default_cache is None:
        cache_dir = os.environ.get("RECPRIMES_CACHE")
        path = None
        if cache_dir:
            os.makedirs(cache_dir, exist_ok=True)
            path = os.path.join(cache_dir, "factors.txt")
        _default_cache = FactorCache(path)
    return _default_cache


def factorize(
    n,
    effort: int = 1 << 26,
    seed: int = 1,
    cache: FactorCache | None = None,
    policy: PrpPolicy = DEFAULT_POLICY,
) -> FactorizationResult:
    """Factor n: trial division, a p-1 stage, then budgeted Brent rho."""
    n = int(n)
    if n == 0:
        raise DomainError("cannot factor 0")
    sign = -1 if n < 0 else 1
    m = abs(n)
    if m == 1:
        return FactorizationResult(n, sign, ())
    if cache is None:
        cache = default_cache()
    cached = cache.get(m)
    if cached is not None:
        return FactorizationResult(n, sign, cached)

    factors, rest = _strip_small(mpz(m))
    stack = [rest] if rest > 1 else []
    hard = []
    while stack:
        v = mpz(stack.pop())
        if v == 1:
            continue
        if is_probable_prime(v, policy).is_prime:
            factors.append(int(v))
            continue
        root, exact = gmpy2.iroot(v, 2)
        if exact:
            stack += [root, root]
            continue
        f = _pollard_pm1(v) or brent_rho(v, budget=effort, seed=seed)
        if f is None:
            hard.append(int(v))
            continue
        stack += [f, v // f]
    factors.sort()
    if hard:
        return FactorizationResult(n, sign, tuple(factors), cofactor=prod(hard))
    result = FactorizationResult(n, sign, tuple(factors))
    cache.put(m, result.factors)
    return result


# ---------------------------------------------------------------------------
# arithmetic functions
# ---------------------------------------------------------------------------


def _prime_exponents(n: int) -> dict[int, int]:
    if n < 1:
        raise DomainError("n must be >= 1")
    fr = factorize(n)
    if not fr.complete:
        raise IncompleteFactorization(f"cannot fully factor {n}")
    exps: dict[int, int] = {}
    for p in fr.factors:
        exps[p] = exps.get(p, 0) + 1
    return exps


def moebius(n: int) -> int:
    exps = _prime_exponents(n)
    if any(e > 1 for e in exps.values()):
        return 0
    return -1 if len(exps) % 2 else 1


def euler_phi(n: int) -> int:
    out = n
    for p in _prime_exponents(n):
        out = out // p * (p - 1)
    return out


def phi2(n: int) -> int:
    """Multiplicative with phi2(p) = p-2; defined on odd squarefree n."""
    if n % 2 == 0:
        raise DomainError("phi2 requires odd n")
    exps = _prime_exponents(n)
    if any(e > 1 for e in exps.values()):
        raise DomainError("phi2 requires squarefree n")
    return prod(p - 2 for p in exps)


def tau(n: int) -> int:
    return prod(e + 1 for e in _prime_exponents(n).values())


def omega_big(fr: FactorizationResult) -> int:
    """Omega: prime divisors counted with multiplicity."""
    return fr.omega


def omega_p(fr: FactorizationResult, p: int) -> int:
    """Prime powers of primes >= p dividing |n|, with multiplicity."""
    if not fr.complete:
        raise IncompleteFactorization(f"unfactored cofactor of {fr.n}")
    return sum(1 for q in fr.factors if q >= p)


__all__ = [
    "DomainError",
    "IncompleteFactorization",
    "Verdict",
    "PrpPolicy",
    "DEFAULT_POLICY",
    "TrialConfig",
    "FactorizationResult",
    "FactorCache",
    "prime_sieve",
    "powmod",
    "strong_probable_prime",
    "is_probable_prime",
    "trial_division",
    "brent_rho",
    "factorize",
    "default_cache",
    "moebius",
    "euler_phi",
    "phi2",
    "tau",
    "omega_big",
    "omega_p",
    "gcd",
    "lcm",
]
