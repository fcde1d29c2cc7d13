from math import gcd

import pytest
from hypothesis import given, settings, strategies as st

from recprimes.arith import DomainError
from recprimes.bigseq import (
    CharPoly,
    combination_oracle,
    combine,
    fibonacci,
    fibonacci_shift_identity,
    lucas_number,
    make_custom,
    make_fibonacci_shift,
    make_geometric_shift,
    make_lucas,
    make_repunit_ratio,
    make_two_term,
    parse_seq_spec,
    phi_decomposition,
)

from _oracles import phi_piece_oracle, unrolled


def test_geometric_shift_examples():
    assert make_geometric_shift(1, -1).eval(7) == 127
    assert make_geometric_shift(3, 5).eval(4) == 53
    assert make_geometric_shift(1, 78557).eval(1) == 78559
    with pytest.raises(DomainError):
        make_geometric_shift(0, 5)


def test_geometric_shift_structure():
    rec = make_geometric_shift(2, 9)
    assert rec.coeffs == (3, -2)
    assert rec.initial == (11, 13)
    for n in range(50):
        assert rec.eval(n) == 2 * 2**n + 9


def test_two_term_examples():
    assert make_two_term(2, 1, divide=True).eval(5) == 31
    assert make_two_term(3, 1, divide=True).eval(3) == 13
    assert make_two_term(5, 3, divide=True).eval(2) == 8
    assert make_two_term(3, 2).eval(4) == 81 - 16
    with pytest.raises(DomainError):
        make_two_term(6, 3, divide=True)
    with pytest.raises(DomainError):
        make_two_term(4, 4)
    with pytest.raises(DomainError):
        make_two_term(2, 3)


def test_lucas_and_shift_examples():
    assert make_lucas(1, 1).eval(10) == 55
    assert make_fibonacci_shift(-4).eval(10) == 51
    assert make_fibonacci_shift(2).eval(3) == 4
    with pytest.raises(DomainError):
        make_lucas(1, -1)


def test_fibonacci_shift_recurrence_form():
    rec = make_fibonacci_shift(7)
    assert rec.coeffs == (2, 0, -1)
    got = unrolled([2, 0, -1], rec.initial, 40)
    assert got == [fibonacci(n) + 7 for n in range(40)]


def test_eval_examples_and_fast_doubling_oracle():
    assert make_geometric_shift(1, -1).eval(13) == 8191
    assert make_geometric_shift(1, -7).eval(2) == -3
    fib = make_lucas(1, 1)
    assert fib.eval(100) == 354224848179261915075
    naive = unrolled([1, 1], [0, 1], 101)
    assert fib.eval(100) == naive[100]
    assert fibonacci(100) == naive[100]


def test_companion_eval_matches_iteration():
    rec = make_custom([2, 0, -1, 3], [1, 0, 2, -1])
    vals = unrolled(rec.coeffs, rec.initial, 60)
    assert [rec.eval(n) for n in range(60)] == vals
    assert list(rec.iter_terms(0, 60)) == vals
    assert list(rec.iter_terms(17, 30)) == vals[17:30]


@settings(max_examples=60, deadline=None)
@given(
    k=st.integers(1, 4),
    data=st.data(),
)
def test_recurrence_law_property(k, data):
    coeffs = [data.draw(st.integers(-5, 5)) for _ in range(k - 1)]
    coeffs.append(data.draw(st.integers(-5, 5).filter(lambda x: x != 0)))
    initial = [data.draw(st.integers(-5, 5)) for _ in range(k)]
    rec = make_custom(coeffs, initial)
    vals = list(rec.iter_terms(0, 500 + k))
    for n in range(500):
        assert vals[n + k] == sum(a * vals[n + k - 1 - i] for i, a in enumerate(coeffs))
    for n in (0, 3, 97, 499):
        assert rec.eval(n) == vals[n]


def test_tagged_families_satisfy_their_recurrence():
    for rec in (
        make_geometric_shift(3, -5),
        make_two_term(7, 4, divide=True),
        make_lucas(2, 1),
        make_fibonacci_shift(-3),
        make_repunit_ratio(3, 2),
        make_repunit_ratio(5, 2),
    ):
        vals = [rec.eval(n) for n in range(40)]
        k = rec.order
        for n in range(40 - k):
            assert vals[n + k] == sum(
                a * vals[n + k - 1 - i] for i, a in enumerate(rec.coeffs)
            ), rec.spec_string()


def test_combine_interleaving_contract():
    mersenne = make_geometric_shift(1, -1)
    fermat = make_geometric_shift(1, 1)
    fib = make_lucas(1, 1)
    zero = make_custom([1], [0])
    for parts in ((mersenne, fermat), (fib, fib), (mersenne, fib, fermat), (mersenne, zero, fermat, fib)):
        U = combine(parts)
        q = len(parts)
        for a in range(q):
            for m in range(50):
                assert U.eval(a + m * q) == parts[a].eval(m)
    # the q = 2 double-Fibonacci example collapses to F_{n//2}
    UF = combine((fib, fib))
    assert UF.eval(5) == fibonacci(2) == 1


def test_combine_alternating_sign_family():
    # U_n = 2^n + (-1)^n: even part 4^m + 1, odd part 2*4^m - 1
    even = make_custom([5, -4], [2, 5])
    odd = make_custom([5, -4], [1, 7])
    U = combine((even, odd))
    assert U.eval(3) == 7
    assert U.eval(4) == 17
    for n in range(60):
        assert U.eval(n) == 2**n + (-1) ** n


def test_combine_with_zero_part():
    mersenne = make_geometric_shift(1, -1)
    fermat = make_geometric_shift(1, 1)
    zero = make_custom([1], [0])
    U = combine((mersenne, fermat, zero))
    assert U.eval(7) == fermat.eval(2) == 5
    assert U.eval(6) == mersenne.eval(2) == 3
    assert U.eval(8) == 0


def test_combine_matches_root_of_unity_oracle():
    parts = (make_geometric_shift(1, -1), make_lucas(1, 1), make_geometric_shift(1, 1))
    U = combine(parts)
    for n in range(40):
        assert U.eval(n) == combination_oracle(parts, 3, n)


def test_combine_char_poly_annihilates():
    parts = (make_geometric_shift(1, -1), make_geometric_shift(1, 1))
    U = combine(parts)
    k = U.order
    vals = [U.eval(n) for n in range(3 * k + 20)]
    for n in range(len(vals) - k):
        assert vals[n + k] == sum(a * vals[n + k - 1 - i] for i, a in enumerate(U.coeffs))


@settings(max_examples=25, deadline=None)
@given(data=st.data())
def test_combine_interleaving_property(data):
    q = data.draw(st.integers(2, 4))
    pool = [
        make_geometric_shift(1, -1),
        make_geometric_shift(1, 1),
        make_geometric_shift(3, 5),
        make_lucas(1, 1),
        make_custom([1], [0]),
        make_two_term(3, 2),
    ]
    parts = [pool[data.draw(st.integers(0, len(pool) - 1))] for _ in range(q)]
    U = combine(parts)
    a = data.draw(st.integers(0, q - 1))
    m = data.draw(st.integers(0, 50))
    assert U.eval(a + m * q) == parts[a].eval(m)


def test_combine_rejects_too_few_parts():
    with pytest.raises(DomainError):
        combine([])
    with pytest.raises(DomainError):
        combine([make_lucas(1, 1)])


def test_char_poly_and_dominant_root():
    cp = CharPoly.from_recurrence(make_geometric_shift(1, 3))
    assert cp.coefficients == (1, -3, 2)
    assert cp.dominant_root == 2.0
    fib = CharPoly.from_recurrence(make_lucas(1, 1))
    assert abs(fib.dominant_root - (1 + 5**0.5) / 2) < 1e-9
    shift = CharPoly.from_recurrence(make_fibonacci_shift(5))
    assert abs(shift.dominant_root - (1 + 5**0.5) / 2) < 1e-9
    three = CharPoly.from_recurrence(make_two_term(3, 2))
    assert three.dominant_root == 3.0


def test_char_poly_annihilates_window():
    rec = make_custom([1, 1, -1], [2, 0, 1])
    cp = CharPoly.from_recurrence(rec)
    k = rec.order
    vals = [rec.eval(n) for n in range(3 * k + 1)]
    # f applied to the shift operator kills the sequence on the window
    for n in range(2 * k + 1):
        acc = sum(c * vals[n + k - i] for i, c in enumerate(cp.coefficients))
        assert acc == 0


def test_strong_division_gcd_law():
    mersenne = make_geometric_shift(1, -1)
    fib = make_lucas(1, 1)
    for rec in (mersenne, fib):
        vals = [rec.eval(n) for n in range(201)]
        for m in range(1, 201, 7):
            for n in range(1, 201, 5):
                assert gcd(vals[m], vals[n]) == vals[gcd(m, n)]


def test_repunit_division_property():
    for p in (3, 5):
        rec = make_repunit_ratio(p, 2)
        vals = {n: rec.eval(n) for n in range(1, 101)}
        for d in range(1, 101):
            for a in range(2, 100 // d + 1):
                n = a * d
                if gcd(a, p) == 1:
                    assert vals[n] % vals[d] == 0, (p, d, n)


def test_ritt_factorable_identity():
    # roots {15, 5, 3, 1}: the sum splits as (3^n + 2)(5^n - 1)
    lhs = make_custom([24, -158, 360, -225], [0, 20, 264, 3596])
    for n in range(201):
        assert lhs.eval(n) == 15**n + 2 * 5**n - 3**n - 2
        assert lhs.eval(n) == (3**n + 2) * (5**n - 1)


def test_phi_decomposition_examples():
    mersenne = make_geometric_shift(1, -1)
    assert phi_decomposition(mersenne, 6) == 3
    assert phi_decomposition(mersenne, 4) == 5
    assert phi_decomposition(mersenne, 1) == mersenne.eval(1) == 1
    fib = make_lucas(1, 1)
    assert phi_decomposition(fib, 1) == 1
    for n in (2, 3, 4, 6, 12, 30):
        expected = phi_piece_oracle(lambda m: mersenne.eval(m), n)
        assert expected.denominator == 1
        assert phi_decomposition(mersenne, n) == expected.numerator


def test_phi_decomposition_reconstruction():
    mersenne = make_geometric_shift(1, -1)
    fib = make_lucas(1, 1)
    for rec in (mersenne, fib):
        for n in range(1, 40):
            prod = 1
            for d in range(1, n + 1):
                if n % d == 0:
                    prod *= phi_decomposition(rec, d)
            assert prod == rec.eval(n)


def test_phi_decomposition_rejects_non_division_sequence():
    rec = make_geometric_shift(1, 3)  # x_1 = 5, x_2 = 7: phi_2 = 7/5
    with pytest.raises(DomainError):
        phi_decomposition(rec, 2)


def test_fibonacci_shift_identity_examples():
    i, j = fibonacci_shift_identity(8, -1)
    assert (i, j) == (5, 3) and fibonacci(5) * lucas_number(3) == 20 == fibonacci(8) - 1
    i, j = fibonacci_shift_identity(9, -1)
    assert (i, j) == (4, 5) and fibonacci(4) * lucas_number(5) == 33 == fibonacci(9) - 1
    i, j = fibonacci_shift_identity(10, 1)
    assert (i, j) == (6, 4) and fibonacci(6) * lucas_number(4) == 56 == fibonacci(10) + 1


def test_fibonacci_shift_identity_all_cases_to_500():
    for n in range(1, 501):
        for sign in (1, -1):
            i, j = fibonacci_shift_identity(n, sign)
            assert fibonacci(i) * lucas_number(j) == fibonacci(n) + sign, (n, sign)


def test_spec_grammar_round_trip():
    specs = [
        "geom:1,-1",
        "geom:3,5",
        "twoterm:5,3,div",
        "twoterm:3,2",
        "lucas:1,1",
        "fibshift:-4",
        "repunit:3,2",
        "custom:[1,1];[0,1]",
        "combine:2;geom:1,-1;geom:1,1",
        "combine:2;combine:2;geom:1,-1;geom:1,1;lucas:1,1",
    ]
    for s in specs:
        rec = parse_seq_spec(s)
        assert rec.spec_string() == s
        assert parse_seq_spec(rec.spec_string()).spec_string() == s


def test_spec_grammar_semantics():
    assert parse_seq_spec("geom:1,-7").eval(2) == -3
    assert parse_seq_spec("custom:[1,1];[0,1]").eval(10) == 55
    U = parse_seq_spec("combine:2;geom:1,-1;geom:1,1")
    assert U.eval(4) == 3  # parts[0] at m = 2


def test_spec_grammar_errors():
    for bad in ("geom:1", "nosuch:2,3", "combine:3;geom:1,1;geom:1,-1", "custom:[1,1]", "twoterm:2,1,xyz"):
        with pytest.raises((DomainError, ValueError)):
            parse_seq_spec(bad)


def test_order_must_be_genuine():
    with pytest.raises(DomainError):
        make_custom([1, 0], [0, 1])
    with pytest.raises(DomainError):
        make_custom([], [])
