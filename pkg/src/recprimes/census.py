"""Prime censuses Pi_u(N) over linear recurrence sequences.

The per-index pipeline is: cheap residue pre-filter from the forbidden
classes of small-period support primes, then trial division (a gcd against
a primorial block, plus k*n+1 candidates at prime index n, where the
divisors of terms of two-term sequences live), then a strong probable-prime
test under the report's recorded policy.  A term counts as a hit only when
it is positive and (probably) prime; n runs from 1.

Work is distributed over blocks of 64 indices and merged in index order, so
the report is bit-identical for any worker count.  An append-only verdict
log keyed by the sequence spec makes long censuses resumable.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from math import prod

import gmpy2

from .arith import (
    DEFAULT_POLICY,
    DomainError,
    PrpPolicy,
    Verdict,
    is_probable_prime,
    prime_sieve,
)
from .bigseq import LinearRecurrence
from .moddyn import IncompleteSupport, forbidden_classes, period_support

BLOCK = 64


@dataclass(frozen=True)
class Hit:
    n: int
    digits: int
    verdict: str  # "probable-prime" | "proven-prime"
    method: str


@dataclass
class CensusReport:
    spec: str
    N: int
    hits: list[Hit]
    checkpoints: dict[int, int]
    policy_fingerprint: str
    wall_time: float
    pruned: bool = False
    abs_mode: bool = False
    tested: int = 0

    @property
    def count(self) -> int:
        return len(self.hits)

    @property
    def hit_indices(self) -> list[int]:
        return [h.n for h in self.hits]


@dataclass(frozen=True)
class CensusConfig:
    filter_y: int = 24  # support bound for the residue pre-filter
    trial_bound: int = 100_000  # primorial gcd covers primes below this
    kp1_k_bound: int = 4096  # k*n+1 candidates at prime index n
    use_prefilter: bool = True

    def fingerprint(self) -> str:
        return f"filter_y={self.filter_y};trial<{self.trial_bound};k<={self.kp1_k_bound}"


DEFAULT_CONFIG = CensusConfig()

_PRIMORIAL_CACHE: dict[int, object] = {}


def _primorial(bound: int):
    v = _PRIMORIAL_CACHE.get(bound)
    if v is None:
        v = gmpy2.mpz(prod(prime_sieve(bound).tolist()))
        _PRIMORIAL_CACHE[bound] = v
    return v


def _prefilter_classes(rec: LinearRecurrence, config: CensusConfig):
    """(p, preperiod, period, residues) for support primes that forbid something."""
    if not config.use_prefilter:
        return []
    y = config.filter_y
    while y >= 2:
        try:
            table = period_support(rec, y)
            break
        except IncompleteSupport:
            y -= 4
    else:
        return []
    out = []
    for p in table.primes():
        fc = forbidden_classes(rec, p)
        if fc.residues:
            out.append((p, fc.preperiod, fc.period, fc.residues))
    return out


def _mod8_applicable(rec: LinearRecurrence) -> bool:
    # divisors q of 2^p - 1 have 2 as a quadratic residue, so q = +-1 mod 8
    return (rec.tag == "twoterm" and rec.params[:2] == (2, 1)) or (
        rec.tag == "geom" and rec.params == (1, -1)
    )


def _test_one(n, u, classes, config, policy, n_is_prime, mod8):
    """Verdict for u = u_n > 1 through the staged pipeline."""
    for p, rho, pi, residues in classes:
        if n >= rho and (n % pi) in residues and u > p:
            return Verdict.composite(p, "class-filter")
    if u.bit_length() <= 64:
        return is_probable_prime(u, policy)
    g = gmpy2.gcd(u, _primorial(config.trial_bound))
    if g > 1:
        if g == u:
            return is_probable_prime(u, policy)  # u itself is tiny-smooth
        for p in prime_sieve(config.trial_bound).tolist():
            if g % p == 0:
                return Verdict.composite(int(p), "trial")
    if n_is_prime and config.kp1_k_bound:
        for k in range(1, config.kp1_k_bound + 1):
            q = k * n + 1
            if q * q > u:
                break
            if mod8 and q % 8 not in (1, 7):
                continue
            if u % q == 0:
                return Verdict.composite(q, "trial-kn+1")
    return is_probable_prime(u, policy)


def _run_block(rec, ns, classes, config, policy, prime_flags, abs_mode):
    mod8 = _mod8_applicable(rec)
    out = []
    it = rec.iter_terms(ns[0], ns[-1] + 1)
    wanted = set(ns)
    for n, u in zip(range(ns[0], ns[-1] + 1), it):
        if n not in wanted:
            continue
        v = abs(u) if abs_mode else u
        if v <= 1:
            out.append((n, 0, "composite", "unit-or-nonpositive"))
            continue
        verdict = _test_one(n, gmpy2.mpz(v), classes, config, policy, prime_flags.get(n, False), mod8)
        digits = int(gmpy2.num_digits(gmpy2.mpz(v), 10))
        out.append((n, digits, verdict.kind, verdict.method))
    return out


def _load_log(path, header):
    done = {}
    if path and os.path.exists(path):
        with open(path) as fh:
            first = fh.readline().rstrip("\n")
            if first != header:
                raise DomainError(f"resume log header mismatch: {first!r}")
            for line in fh:
                parts = line.split()
                if len(parts) == 4:
                    done[int(parts[0])] = (int(parts[0]), int(parts[1]), parts[2], parts[3])
    return done


def census(
    rec: LinearRecurrence,
    N: int,
    policy: PrpPolicy = DEFAULT_POLICY,
    config: CensusConfig = DEFAULT_CONFIG,
    workers: int = 1,
    resume_path: str | None = None,
    abs_mode: bool = False,
    indices=None,
    pruned: bool = False,
) -> CensusReport:
    """Count 1 <= n <= N with u_n a positive (probable) prime."""
    if N < 1:
        raise DomainError("N must be >= 1")
    t0 = time.time()
    ns = sorted(set(indices)) if indices is not None else list(range(1, N + 1))
    ns = [n for n in ns if 1 <= n <= N]
    classes = _prefilter_classes(rec, config)
    prime_flags = {int(p): True for p in prime_sieve(N + 1).tolist()}

    header = f"# census spec={rec.spec_string()} policy={policy.fingerprint()} abs={int(abs_mode)}"
    done = _load_log(resume_path, header)
    todo = [n for n in ns if n not in done]

    blocks = [todo[i : i + BLOCK] for i in range(0, len(todo), BLOCK)]
    results = dict(done)
    log_fh = None
    if resume_path:
        newfile = not os.path.exists(resume_path)
        log_fh = open(resume_path, "a")
        if newfile:
            log_fh.write(header + "\n")

    def consume(rows):
        for row in rows:
            results[row[0]] = row
            if log_fh:
                log_fh.write("%d %d %s %s\n" % row)
        if log_fh:
            log_fh.flush()

    if workers > 1 and len(blocks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_run_block, rec, b, classes, config, policy, prime_flags, abs_mode)
                for b in blocks
            ]
            for fut in futures:  # merged in submission (index) order
                consume(fut.result())
    else:
        for b in blocks:
            consume(_run_block(rec, b, classes, config, policy, prime_flags, abs_mode))
    if log_fh:
        log_fh.close()

    hits = [
        Hit(n, digits, kind, method)
        for n, digits, kind, method in (results[n] for n in ns)
        if kind != "composite"
    ]
    checkpoints = {}
    mark = 100
    while mark <= N:
        checkpoints[mark] = sum(1 for h in hits if h.n <= mark)
        mark *= 10
    return CensusReport(
        spec=rec.spec_string(),
        N=N,
        hits=hits,
        checkpoints=checkpoints,
        policy_fingerprint=f"{policy.fingerprint()};{config.fingerprint()}",
        wall_time=time.time() - t0,
        pruned=pruned or indices is not None,
        abs_mode=abs_mode,
        tested=len(ns),
    )


def division_seq_census(
    rec: LinearRecurrence,
    N: int,
    n0: int | None = None,
    policy: PrpPolicy = DEFAULT_POLICY,
    config: CensusConfig = DEFAULT_CONFIG,
    workers: int = 1,
) -> CensusReport:
    """Census pruned to prime n and n <= (n0-1)^2; valid when terms are
    increasing and > 1 from n0 on."""
    if not rec.is_division_sequence:
        raise DomainError("sequence is not tagged as a division sequence")
    if n0 is None:
        raise DomainError("the increasing-from threshold n0 must be supplied")
    small = range(1, min((n0 - 1) ** 2, N) + 1)
    idx = sorted(set(small) | {int(p) for p in prime_sieve(N + 1).tolist()})
    return census(rec, N, policy=policy, config=config, workers=workers, indices=idx, pruned=True)


def power_indices(base: int, N: int) -> list[int]:
    """{base^m <= N}: candidate indices for sequences where any other index
    forces an algebraic factor (2^n + 1, repunit ratios)."""
    out = []
    v = 1
    while v <= N:
        out.append(v)
        v *= base
    return out


def simultaneous_census(
    rec1: LinearRecurrence,
    rec2: LinearRecurrence,
    N: int,
    policy: PrpPolicy = DEFAULT_POLICY,
    config: CensusConfig = DEFAULT_CONFIG,
) -> list[int]:
    """Indices n <= N where both terms are positive (probable) primes."""
    if rec1.spec_string() == rec2.spec_string():
        raise DomainError("sequences must be distinct")
    c1 = _prefilter_classes(rec1, config)
    c2 = _prefilter_classes(rec2, config)
    prime_flags = {int(p): True for p in prime_sieve(N + 1).tolist()}
    out = []
    it1 = rec1.iter_terms(1, N + 1)
    it2 = rec2.iter_terms(1, N + 1)
    for n, (u, v) in enumerate(zip(it1, it2), start=1):
        if u <= 1 or v <= 1:
            continue
        small, big = (u, v) if u <= v else (v, u)
        csmall = c1 if u <= v else c2
        cbig = c2 if u <= v else c1
        m8s = _mod8_applicable(rec1 if u <= v else rec2)
        m8b = _mod8_applicable(rec2 if u <= v else rec1)
        ok = _test_one(n, gmpy2.mpz(small), csmall, config, policy, n in prime_flags, m8s)
        if not ok.is_prime:
            continue
        if _test_one(n, gmpy2.mpz(big), cbig, config, policy, n in prime_flags, m8b).is_prime:
            out.append(n)
    return out


# ---------------------------------------------------------------------------
# OEIS b-file cross-checks
# ---------------------------------------------------------------------------


class BFileError(ValueError):
    def __init__(self, lineno: int, text: str):
        super().__init__(f"b-file line {lineno}: {text!r}")
        self.lineno = lineno


def parse_bfile(text: str) -> list[tuple[int, int]]:
    """Parse `k a(k)` lines; `#` comments and blank lines are skipped."""
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise BFileError(lineno, raw)
        try:
            out.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise BFileError(lineno, raw) from None
    return out


@dataclass(frozen=True)
class CrosscheckDiff:
    limit: int
    only_in_report: tuple[int, ...]
    only_in_bfile: tuple[int, ...]

    @property
    def empty(self) -> bool:
        return not self.only_in_report and not self.only_in_bfile


def oeis_crosscheck(report: CensusReport, entries: list[tuple[int, int]]) -> CrosscheckDiff:
    """Symmetric difference of hit indices within [1, min(N, b-file max)]."""
    values = [v for _, v in entries]
    limit = min(report.N, max(values)) if values else report.N
    mine = {n for n in report.hit_indices if 1 <= n <= limit}
    theirs = {v for v in values if 1 <= v <= limit}
    return CrosscheckDiff(
        limit,
        tuple(sorted(mine - theirs)),
        tuple(sorted(theirs - mine)),
    )


__all__ = [
    "Hit",
    "CensusReport",
    "CensusConfig",
    "DEFAULT_CONFIG",
    "census",
    "division_seq_census",
    "power_indices",
    "simultaneous_census",
    "BFileError",
    "parse_bfile",
    "CrosscheckDiff",
    "oeis_crosscheck",
]
