"""Covering systems of congruences that force every term of a sequence to
have a factor from a fixed prime set.

A system is a list of (residue, modulus, prime) triples.  Verification has
two halves: the congruence classes must cover all of Z (checked exactly over
one window lcm of the moduli), and each class must actually deliver its
prime, i.e. p | u_n on the whole class.  The divisibility half runs through
the period-aware forbidden classes, never through term evaluation, so
windows in the hundreds cost nothing even when terms have thousands of
digits.

The named systems from the literature on Sierpinski and Riesel numbers ship
as JSON fixtures carrying only the prime sets; the residues are recomputed
at load time by scanning one period per prime.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from math import gcd, lcm

from .arith import DomainError
from .bigseq import LinearRecurrence, make_geometric_shift, parse_seq_spec
from .moddyn import forbidden_classes

_DATA_DIR = os.path.join(os.path.dirname(__file__), "data")


@dataclass(frozen=True)
class Congruence:
    residue: int
    modulus: int
    prime: int | None = None

    def covers(self, n: int) -> bool:
        return n % self.modulus == self.residue % self.modulus


@dataclass(frozen=True)
class CoveringSystem:
    congruences: tuple[Congruence, ...]
    note: str = ""

    @property
    def window(self) -> int:
        out = 1
        for c in self.congruences:
            out = lcm(out, c.modulus)
        return out

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(c.prime for c in self.congruences if c.prime)


@dataclass(frozen=True)
class CoverageResult:
    covers: bool
    first_uncovered: int | None = None

    def __bool__(self) -> bool:
        return self.covers


def verify_covers(system: CoveringSystem) -> CoverageResult:
    """Exact coverage check over [0, window)."""
    if not system.congruences:
        raise DomainError("empty system")
    if any(c.modulus <= 0 for c in system.congruences):
        raise DomainError("zero modulus")
    w = system.window
    hit = bytearray(w)
    for c in system.congruences:
        for n in range(c.residue % c.modulus, w, c.modulus):
            hit[n] = 1
    for n in range(w):
        if not hit[n]:
            return CoverageResult(False, n)
    return CoverageResult(True)


@dataclass(frozen=True)
class SequenceCoveringResult:
    ok: bool
    coverage: CoverageResult
    failed_congruence: Congruence | None = None
    failed_index: int | None = None

    def __bool__(self) -> bool:
        return self.ok


def verify_sequence_covering(rec: LinearRecurrence, system: CoveringSystem) -> SequenceCoveringResult:
    """True iff the system covers and each class really divides the sequence."""
    cov = verify_covers(system)
    classes = {}
    for c in system.congruences:
        if c.prime is None:
            raise DomainError("sequence verification needs a prime on every congruence")
        if c.prime not in classes:
            classes[c.prime] = forbidden_classes(rec, c.prime)
    for c in system.congruences:
        fc = classes[c.prime]
        w = lcm(system.window, fc.period)
        for n in range(c.residue % c.modulus, w, c.modulus):
            if not fc.divides_at(n):
                return SequenceCoveringResult(False, cov, c, n)
    return SequenceCoveringResult(bool(cov), cov, None if cov else system.congruences[0])


def system_from_primes(rec: LinearRecurrence, primes, note: str = "", allow_idle: bool = False) -> CoveringSystem:
    """Build the congruence list by scanning one period per prime.

    A prime that divides no term contributes no congruence; that is an error
    unless `allow_idle` (the published prime set for one side of the Brier
    constant carries such passengers)."""
    congruences = []
    for p in primes:
        fc = forbidden_classes(rec, p)
        if not fc.residues:
            if allow_idle:
                continue
            raise DomainError(f"{p} divides no term of {rec.spec_string()}")
        for s in sorted(fc.residues):
            congruences.append(Congruence(s, fc.period, p))
    return CoveringSystem(tuple(congruences), note)


def load_system(path: str, rec: LinearRecurrence | None = None) -> tuple[CoveringSystem, LinearRecurrence | None]:
    """Load a JSON system: either explicit congruences or a prime set to be
    residue-scanned against its sequence."""
    with open(path) as fh:
        doc = json.load(fh)
    note = doc.get("note", "")
    if "sequence" in doc and rec is None:
        rec = parse_seq_spec(doc["sequence"])
    if "congruences" in doc:
        sys_ = CoveringSystem(
            tuple(Congruence(c["residue"], c["modulus"], c.get("prime")) for c in doc["congruences"]),
            note,
        )
        return sys_, rec
    if "primes" in doc:
        if rec is None:
            raise DomainError("prime-set fixture needs a sequence")
        return system_from_primes(rec, doc["primes"], note, allow_idle=doc.get("allow_idle", False)), rec
    raise DomainError(f"no congruences or primes in {path}")


def named_fixture_path(name: str) -> str:
    return os.path.join(_DATA_DIR, f"{name}.json")


# ---------------------------------------------------------------------------
# the classical constructions
# ---------------------------------------------------------------------------

# F_0..F_4 are prime; F_5 = 641 * 6700417; the product of all seven is 2^64-1.
_FERMAT_PRIMES = (3, 5, 17, 257, 65537)
ERDOS_PRIMES = _FERMAT_PRIMES + (641, 6700417)
ERDOS_MODULUS = (1 << 64) - 1

SELFRIDGE_K = 78557
SELFRIDGE_PRIMES = (3, 5, 7, 13, 19, 37, 73)
RIESEL_K = 509203
RIESEL_PRIMES = (3, 5, 7, 13, 17, 241)
BRIER_K = 3316923598096294713661
BRIER_PLUS_PRIMES = (3, 5, 7, 13, 17, 19, 31, 97, 151, 241, 673)
BRIER_MINUS_PRIMES = (3, 7, 11, 19, 31, 37, 41, 73, 109, 151, 331, 1321)

FIBONACCI_COVERING_MODULUS = 2 * 3 * 7 * 17 * 19 * 23  # 312018
FIBONACCI_COVERING_PRIMES = (2, 3, 7, 17, 19, 23)
FIBONACCI_COVERING_RESIDUES = (93687, 103377)


def erdos_residue() -> int:
    """The CRT residue r mod 2^64-1 with r = 1 mod p_0..p_5 and r = -1 mod p_6."""
    m1 = 1
    for p in ERDOS_PRIMES[:-1]:
        m1 *= p
    p6 = ERDOS_PRIMES[-1]
    # r = 1 + m1*t with m1*t = -2 mod p6
    t = (-2) * pow(m1, -1, p6) % p6
    r = 1 + m1 * t
    assert r % p6 == p6 - 1
    return r


@dataclass(frozen=True)
class ErdosConstruction:
    a: int
    b: int
    residue: int
    modulus: int
    system: CoveringSystem
    verified: bool


def erdos_construction(a_choice: int | None = None, b_choice: int | None = None) -> ErdosConstruction:
    """A pair (a, b) with a = r*b mod 2^64-1, so gcd(a*2^n + b, 2^64-1) > 1
    for every n; verified by a 64-point gcd scan."""
    r = erdos_residue()
    M = ERDOS_MODULUS
    if b_choice is not None:
        b = b_choice % M or M
        a = a_choice if a_choice is not None else r * b % M
    else:
        a = a_choice if a_choice is not None else 1
        b = a * pow(r, -1, M) % M  # r is its own inverse mod M, kept explicit
    verified = all(gcd(a * (1 << n) + b, M) > 1 for n in range(64))
    congruences = [Congruence(1 << k, 1 << (k + 1), ERDOS_PRIMES[k]) for k in range(6)]
    congruences.append(Congruence(0, 64, ERDOS_PRIMES[6]))
    return ErdosConstruction(a, b, r, M, CoveringSystem(tuple(congruences), "Fermat-prime cover"), verified)


def selfridge_check() -> SequenceCoveringResult:
    rec = make_geometric_shift(1, SELFRIDGE_K)
    return verify_sequence_covering(rec, system_from_primes(rec, SELFRIDGE_PRIMES))


def riesel_check() -> SequenceCoveringResult:
    rec = make_geometric_shift(RIESEL_K, -1)
    return verify_sequence_covering(rec, system_from_primes(rec, RIESEL_PRIMES))


def brier_check() -> tuple[bool, bool]:
    """Both gcd conditions for the Brier constant (2^n + k and 2^n - k)."""
    plus = make_geometric_shift(1, BRIER_K)
    minus = make_geometric_shift(1, -BRIER_K)
    ok_plus = verify_sequence_covering(plus, system_from_primes(plus, BRIER_PLUS_PRIMES, allow_idle=True))
    ok_minus = verify_sequence_covering(minus, system_from_primes(minus, BRIER_MINUS_PRIMES, allow_idle=True))
    return bool(ok_plus), bool(ok_minus)


def fibonacci_shift_family(a: int, b: int) -> LinearRecurrence:
    """a*F_n + b as an order-3 recurrence (coefficients 2, 0, -1)."""
    return LinearRecurrence((2, 0, -1), (b, a + b, a + b))


def fibonacci_covering_check(a: int = 1, residue_choice: int = 0) -> SequenceCoveringResult:
    """Verify gcd(a*F_n + b, 312018) > 1 with b = 93687*a or 103377*a mod 312018."""
    b = FIBONACCI_COVERING_RESIDUES[residue_choice] * a % FIBONACCI_COVERING_MODULUS
    rec = fibonacci_shift_family(a, b)
    return verify_sequence_covering(rec, system_from_primes(rec, FIBONACCI_COVERING_PRIMES))


__all__ = [
    "Congruence",
    "CoveringSystem",
    "CoverageResult",
    "SequenceCoveringResult",
    "verify_covers",
    "verify_sequence_covering",
    "system_from_primes",
    "load_system",
    "named_fixture_path",
    "erdos_residue",
    "erdos_construction",
    "ErdosConstruction",
    "selfridge_check",
    "riesel_check",
    "brier_check",
    "fibonacci_shift_family",
    "fibonacci_covering_check",
    "SELFRIDGE_K",
    "SELFRIDGE_PRIMES",
    "RIESEL_K",
    "RIESEL_PRIMES",
    "BRIER_K",
    "BRIER_PLUS_PRIMES",
    "BRIER_MINUS_PRIMES",
    "ERDOS_PRIMES",
    "ERDOS_MODULUS",
    "FIBONACCI_COVERING_MODULUS",
    "FIBONACCI_COVERING_PRIMES",
    "FIBONACCI_COVERING_RESIDUES",
]
