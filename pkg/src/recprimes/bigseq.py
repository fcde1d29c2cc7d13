"""Exact construction and evaluation of integer linear recurrence sequences.

A sequence is held as (coefficients a_1..a_k, initial terms u_0..u_{k-1})
plus a structural tag for the special families: geometric shifts a*2^n+b,
two-term sequences alpha^n-beta^n (optionally divided by alpha-beta), Lucas
sequences, Fibonacci shifts F_n+c, repunit ratios, and q-combinations that
interleave several sequences.  Tagged families get closed-form fast paths;
everything also evaluates through binary powering of the companion matrix,
and the two routes must agree.

Values are immutable after construction and safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt

import numpy as np

from .arith import DomainError, moebius


@dataclass(frozen=True)
class LinearRecurrence:
    """Order-k integer recurrence u_{n+k} = a_1 u_{n+k-1} + ... + a_k u_n."""

    coeffs: tuple[int, ...]  # a_1..a_k, a_k != 0
    initial: tuple[int, ...]  # u_0..u_{k-1}
    tag: str = "generic"
    params: tuple[int, ...] = ()
    parts: tuple["LinearRecurrence", ...] = ()

    def __post_init__(self):
        if len(self.coeffs) != len(self.initial):
            raise DomainError("need as many initial terms as coefficients")
        if not self.coeffs or self.coeffs[-1] == 0:
            raise DomainError("a_k must be nonzero (order must be genuine)")

    @property
    def order(self) -> int:
        return len(self.coeffs)

    # -- evaluation ---------------------------------------------------------

    def eval(self, n: int) -> int:
        """Exact u_n, using the tag's closed form when there is one."""
        if n < 0:
            raise DomainError("indices start at 0")
        if self.tag == "geom":
            a, b = self.params
            return a * (1 << n) + b
        if self.tag == "twoterm":
            alpha, beta, divide = self.params
            v = alpha**n - beta**n
            return v // (alpha - beta) if divide else v
        if self.tag == "fibshift":
            return fibonacci(n) + self.params[0]
        if self.tag == "repunit":
            p, base = self.params
            if n == 0:
                return p
            return (base ** (p * n) - 1) // (base**n - 1)
        if self.tag == "combine":
            q = self.params[0]
            return self.parts[n % q].eval(n // q)
        return self._companion_eval(n)

    def _companion_eval(self, n: int) -> int:
        k = self.order
        if n < k:
            return self.initial[n]
        M = _companion_power(self.coeffs, n)
        return sum(M[0][j] * self.initial[j] for j in range(k))

    def iter_terms(self, start: int = 0, stop: int | None = None, modulus: int | None = None):
        """Yield u_start, u_{start+1}, ... (mod `modulus` if given), iteratively."""
        k = self.order
        if modulus is None:
            state = [self._companion_eval(start + i) if start else self.initial[i] for i in range(k)]
        else:
            state = [self._companion_eval(start + i) % modulus if start else self.initial[i] % modulus for i in range(k)]
        n = start
        while stop is None or n < stop:
            yield state[0]
            nxt = sum(a * u for a, u in zip(reversed(self.coeffs), state))
            if modulus is not None:
                nxt %= modulus
            state = state[1:] + [nxt]
            n += 1

    # -- structure ----------------------------------------------------------

    @property
    def is_division_sequence(self) -> bool:
        """True for the tagged families with x_m | x_n whenever m | n."""
        if self.tag in ("twoterm", "lucas"):
            return True
        if self.tag == "geom":
            return self.params == (1, -1)
        if self.tag == "fibshift":
            return self.params[0] == 0
        return False

    def char_poly(self) -> "CharPoly":
        return CharPoly.from_recurrence(self)

    def spec_string(self) -> str:
        """Canonical mini-grammar form (round-trips through parse_seq_spec)."""
        if self.tag == "geom":
            return "geom:%d,%d" % self.params
        if self.tag == "twoterm":
            a, b, d = self.params
            return f"twoterm:{a},{b},div" if d else f"twoterm:{a},{b}"
        if self.tag == "lucas":
            return "lucas:%d,%d" % self.params
        if self.tag == "fibshift":
            return "fibshift:%d" % self.params
        if self.tag == "repunit":
            return "repunit:%d,%d" % self.params
        if self.tag == "combine":
            return f"combine:{self.params[0]};" + ";".join(p.spec_string() for p in self.parts)
        cs = ",".join(map(str, self.coeffs))
        us = ",".join(map(str, self.initial))
        return f"custom:[{cs}];[{us}]"


def _mat_mul(A, B):
    k = len(A)
    return [[sum(A[i][t] * B[t][j] for t in range(k)) for j in range(k)] for i in range(k)]


def _companion_power(coeffs, n):
    """Companion matrix of the recurrence raised to the n-th power."""
    k = len(coeffs)
    C = [[1 if j == i + 1 else 0 for j in range(k)] for i in range(k - 1)]
    C.append([coeffs[k - 1 - j] for j in range(k)])
    R = [[int(i == j) for j in range(k)] for i in range(k)]
    while n:
        if n & 1:
            R = _mat_mul(R, C)
        C = _mat_mul(C, C)
        n >>= 1
    return R


@dataclass(frozen=True)
class CharPoly:
    """f(T) = T^k - a_1 T^{k-1} - ... - a_k and its dominant root size."""

    coefficients: tuple[int, ...]  # descending, leading 1
    dominant_root: float
    error_bound: float = 1e-9

    @staticmethod
    def from_recurrence(rec: LinearRecurrence) -> "CharPoly":
        coeffs = (1,) + tuple(-a for a in rec.coeffs)
        return CharPoly(coeffs, _dominant_root(coeffs))

    def eval_at(self, t: int) -> int:
        v = 0
        for c in self.coefficients:
            v = v * t + c
        return v


def _dominant_root(coeffs: tuple[int, ...]) -> float:
    """|alpha_1| to within 1e-9; exact when the dominant root is an integer."""
    roots = np.roots(np.array(coeffs, dtype=float))
    amax = max(abs(r) for r in roots)
    # integer dominant root: verify exactly against the integer polynomial
    cand = round(amax)
    if cand >= 1:
        for r in (cand, -cand):
            v = 0
            for c in coeffs:
                v = v * r + c
            if v == 0 and abs(abs(r) - amax) < 1e-6 * max(amax, 1.0):
                return float(cand)
    # refine a real dominant root by Newton on the exact polynomial
    real = [r.real for r in roots if abs(r.imag) <= 1e-8 * (1 + abs(r)) and abs(abs(r) - amax) <= 1e-6 * amax]
    if real:
        x = max(real, key=abs)
        deriv = [c * (len(coeffs) - 1 - i) for i, c in enumerate(coeffs[:-1])]
        for _ in range(60):
            fx = 0.0
            for c in coeffs:
                fx = fx * x + c
            dx = 0.0
            for c in deriv:
                dx = dx * x + c
            if dx == 0:
                break
            step = fx / dx
            x -= step
            if abs(step) < 1e-13 * max(1.0, abs(x)):
                break
        return abs(x)
    return float(amax)


# ---------------------------------------------------------------------------
# constructors for the named families
# ---------------------------------------------------------------------------


def make_geometric_shift(a: int, b: int) -> LinearRecurrence:
    """The sequence a*2^n + b (order 2, u_{n+2} = 3u_{n+1} - 2u_n)."""
    if a == 0:
        raise DomainError("a = 0 degenerates to a constant sequence")
    return LinearRecurrence((3, -2), (a + b, 2 * a + b), tag="geom", params=(a, b))


def make_two_term(alpha: int, beta: int, divide: bool = False) -> LinearRecurrence:
    """alpha^n - beta^n, divided by alpha-beta when `divide` is set."""
    if alpha == beta:
        raise DomainError("alpha = beta is degenerate")
    if not alpha > abs(beta) >= 1:
        raise DomainError("need alpha > |beta| >= 1")
    if gcd(alpha, beta) != 1:
        raise DomainError("alpha, beta must be coprime")
    u1 = 1 if divide else alpha - beta
    return LinearRecurrence(
        (alpha + beta, -alpha * beta), (0, u1), tag="twoterm", params=(alpha, beta, int(divide))
    )


def make_lucas(a: int, b: int) -> LinearRecurrence:
    """Lucas sequence u_0=0, u_1=1, u_n = a u_{n-1} + b u_{n-2}; needs a^2+4b > 0."""
    if a * a + 4 * b <= 0:
        raise DomainError("discriminant a^2+4b must be positive")
    return LinearRecurrence((a, b), (0, 1), tag="lucas", params=(a, b))


def make_fibonacci_shift(c: int) -> LinearRecurrence:
    """F_n + c as an order-3 recurrence with coefficients (2, 0, -1)."""
    return LinearRecurrence((2, 0, -1), (c, 1 + c, 1 + c), tag="fibshift", params=(c,))


def make_repunit_ratio(p: int, base: int = 2) -> LinearRecurrence:
    """(base^{pn} - 1)/(base^n - 1), u_0 = p; roots are base^j, j < p."""
    if p < 2 or base < 2:
        raise DomainError("need p >= 2 and base >= 2")
    poly = [Fraction(1)]
    for j in range(p):
        poly = _poly_mul(poly, [Fraction(-(base**j)), Fraction(1)])
    coeffs = tuple(int(-poly[p - 1 - i]) for i in range(p))
    seq = lambda n: p if n == 0 else (base ** (p * n) - 1) // (base**n - 1)
    return LinearRecurrence(coeffs, tuple(seq(n) for n in range(p)), tag="repunit", params=(p, base))


def make_custom(coeffs, initial) -> LinearRecurrence:
    return LinearRecurrence(tuple(int(c) for c in coeffs), tuple(int(u) for u in initial))


def combine(parts) -> LinearRecurrence:
    """Interleave q sequences: eval(combine(parts), a + m*q) = eval(parts[a], m).

    The characteristic polynomial is the lcm over the parts of f_a(x^q),
    computed as a polynomial lcm in the variable y = x^q.
    """
    parts = tuple(parts)
    q = len(parts)
    if q < 2:
        raise DomainError("a combination needs at least two parts")
    L = [Fraction(1)]
    for part in parts:
        fa = [Fraction(c) for c in reversed(part.char_poly().coefficients)]  # ascending
        L = _poly_lcm(L, fa)
    # substitute y = x^q: spread coefficients q apart
    spread = [Fraction(0)] * ((len(L) - 1) * q + 1)
    for i, c in enumerate(L):
        spread[i * q] = c
    den = 1
    for c in spread:
        den = den * c.denominator // gcd(den, c.denominator)
    ints = [int(c * den) for c in spread]
    lead = ints[-1]
    if any(v % lead for v in ints):  # keep monic integer form
        raise DomainError("combination lcm is not monic integer")
    ints = [v // lead for v in ints]
    k = len(ints) - 1
    coeffs = tuple(-ints[k - 1 - i] for i in range(k))
    initial = tuple(parts[n % q].eval(n // q) for n in range(k))
    return LinearRecurrence(coeffs, initial, tag="combine", params=(q,), parts=parts)


def _poly_mul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _poly_divmod(a, b):
    a = list(a)
    q = [Fraction(0)] * max(1, len(a) - len(b) + 1)
    while len(a) >= len(b) and any(a):
        if a[-1] == 0:
            a.pop()
            continue
        f = a[-1] / b[-1]
        d = len(a) - len(b)
        q[d] = f
        for i, c in enumerate(b):
            a[d + i] -= f * c
        a.pop()
    while len(a) > 1 and a[-1] == 0:
        a.pop()
    return q, a


def _poly_gcd(a, b):
    a, b = list(a), list(b)
    while any(c != 0 for c in b):
        _, r = _poly_divmod(a, b)
        a, b = b, r if any(r) else [Fraction(0)]
    return [c / a[-1] for c in a]  # monic


def _poly_lcm(a, b):
    if len(a) == 1:
        return [c / b[-1] for c in b]
    g = _poly_gcd(a, b)
    q, r = _poly_divmod(_poly_mul(a, b), g)
    assert not any(r)
    return [c / q[-1] for c in q]


def combination_oracle(parts, q: int, n: int) -> int:
    """Root-of-unity cross-check for combine(): sum over q-th roots of unity.

    The inner averaged sum is 1 exactly when q | n - a, so this reproduces the
    interleaving semantics through the complex formula; used only by tests.
    """
    total = 0.0
    for a in range(q):
        picker = sum(
            (np.exp(-2j * np.pi * a * j / q) * np.exp(2j * np.pi * n * j / q)) for j in range(q)
        ) / q
        if abs(picker.imag) > 1e-9 or abs(picker.real) < 1e-9:
            continue
        total += round(picker.real) * parts[a].eval((n - a) // q)
    return round(total)


# ---------------------------------------------------------------------------
# Fibonacci / Lucas helpers and the F_n +- 1 factorization table
# ---------------------------------------------------------------------------


def fibonacci(n: int) -> int:
    """F_n by fast doubling."""
    def pair(m):
        if m == 0:
            return (0, 1)
        a, b = pair(m >> 1)
        c = a * (2 * b - a)
        d = a * a + b * b
        return (d, c + d) if m & 1 else (c, d)

    return pair(n)[0]


def lucas_number(n: int) -> int:
    """L_n = F_{n+1} + F_{n-1}, with L_0 = 2."""
    if n == 0:
        return 2
    return fibonacci(n + 1) + fibonacci(n - 1)


# (n mod 4, sign) -> (fib index, lucas index) as functions of t = n // 4
_FIB_SHIFT_TABLE = {
    (0, -1): lambda t: (2 * t + 1, 2 * t - 1),
    (0, +1): lambda t: (2 * t - 1, 2 * t + 1),
    (1, -1): lambda t: (2 * t, 2 * t + 1),
    (1, +1): lambda t: (2 * t + 1, 2 * t),
    (2, -1): lambda t: (2 * t, 2 * t + 2),
    (2, +1): lambda t: (2 * t + 2, 2 * t),
    (3, -1): lambda t: (2 * t + 2, 2 * t + 1),
    (3, +1): lambda t: (2 * t + 1, 2 * t + 2),
}


def fibonacci_shift_identity(n: int, sign: int) -> tuple[int, int]:
    """Indices (i, j) with F_n + sign = F_i * L_j, from the eight-case table."""
    if n < 1:
        raise DomainError("n must be >= 1")
    if sign not in (1, -1):
        raise DomainError("sign must be +1 or -1")
    return _FIB_SHIFT_TABLE[(n % 4, sign)](n // 4)


# ---------------------------------------------------------------------------
# the Moebius-product pieces of a strong division sequence
# ---------------------------------------------------------------------------


def divisors(n: int) -> list[int]:
    out = []
    for d in range(1, isqrt(n) + 1):
        if n % d == 0:
            out.append(d)
            if d != n // d:
                out.append(n // d)
    return sorted(out)


def phi_decomposition(rec: LinearRecurrence, n: int) -> int:
    """The piece phi_n with x_n = prod_{d|n} phi_d, via the Moebius product
    phi_n = prod_{m|n} x_m^{mu(n/m)}.

    A non-integral product means the sequence is not a strong division
    sequence at n, which is reported as a DomainError.
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    num = 1
    den = 1
    for m in divisors(n):
        x = rec.eval(m)
        if x == 0:
            raise DomainError(f"x_{m} = 0: decomposition undefined at n = {n}")
        e = moebius(n // m)
        if e == 1:
            num *= x
        elif e == -1:
            den *= x
    if num % den:
        raise DomainError(f"phi_{n} is not integral: not a strong division sequence here")
    return num // den


# ---------------------------------------------------------------------------
# sequence mini-grammar:  geom:a,b | twoterm:a,b[,div] | lucas:a,b |
# fibshift:c | repunit:p,base | custom:[a1,..];[u0,..] | combine:q;spec;...
# ---------------------------------------------------------------------------


def parse_seq_spec(spec: str) -> LinearRecurrence:
    """Parse the whitespace-free sequence grammar used by the CLI and configs."""
    tokens = spec.strip().split(";")
    try:
        rec, nxt = _parse_tokens(tokens, 0)
    except DomainError:
        raise
    except (ValueError, IndexError) as e:
        raise DomainError(f"malformed sequence spec {spec!r}: {e}") from e
    if nxt != len(tokens):
        raise DomainError(f"trailing tokens in sequence spec: {spec!r}")
    return rec


def _ints(s: str) -> list[int]:
    try:
        return [int(x) for x in s.split(",") if x != ""]
    except ValueError as e:
        raise DomainError(f"bad integer list {s!r}") from e


def _parse_tokens(tokens: list[str], i: int):
    if i >= len(tokens):
        raise DomainError("sequence spec ended early")
    tok = tokens[i]
    head, _, rest = tok.partition(":")
    if head == "geom":
        a, b = _ints(rest)
        return make_geometric_shift(a, b), i + 1
    if head == "twoterm":
        fields = rest.split(",")
        divide = fields[-1] == "div"
        nums = _ints(",".join(fields[:-1] if divide else fields))
        return make_two_term(nums[0], nums[1], divide), i + 1
    if head == "lucas":
        a, b = _ints(rest)
        return make_lucas(a, b), i + 1
    if head == "fibshift":
        (c,) = _ints(rest)
        return make_fibonacci_shift(c), i + 1
    if head == "repunit":
        p, base = _ints(rest)
        return make_repunit_ratio(p, base), i + 1
    if head == "custom":
        if i + 1 >= len(tokens):
            raise DomainError("custom spec needs two bracketed lists")
        cs, us = tok.partition(":")[2], tokens[i + 1]
        if not (cs.startswith("[") and cs.endswith("]") and us.startswith("[") and us.endswith("]")):
            raise DomainError(f"malformed custom spec near {tok!r}")
        return make_custom(_ints(cs[1:-1]), _ints(us[1:-1])), i + 2
    if head == "combine":
        q = int(rest)
        parts = []
        j = i + 1
        for _ in range(q):
            part, j = _parse_tokens(tokens, j)
            parts.append(part)
        return combine(parts), j
    raise DomainError(f"unknown sequence family {head!r}")


__all__ = [
    "LinearRecurrence",
    "CharPoly",
    "make_geometric_shift",
    "make_two_term",
    "make_lucas",
    "make_fibonacci_shift",
    "make_repunit_ratio",
    "make_custom",
    "combine",
    "combination_oracle",
    "fibonacci",
    "lucas_number",
    "fibonacci_shift_identity",
    "phi_decomposition",
    "divisors",
    "parse_seq_spec",
]
