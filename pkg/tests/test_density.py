from fractions import Fraction
from math import gcd, log

import pytest

from recprimes.bigseq import make_custom, make_geometric_shift, make_lucas
from recprimes.density import (
    NotExponentiallyGrowing,
    delta,
    delta_mod,
    kappa_f,
    mersenne_style_prediction,
    predict_count,
    window_count,
)
from recprimes.moddyn import period_support


def test_delta_mod_table_values():
    assert delta_mod(make_geometric_shift(1, -7), 15) == Fraction(15, 32)
    assert delta_mod(make_geometric_shift(1, 7), 15) == Fraction(15, 16)
    assert delta_mod(make_geometric_shift(1, 3), 3) == Fraction(3, 2)


def test_delta_mod_not_multiplicative():
    for b in (7, -7):
        rec = make_geometric_shift(1, b)
        assert delta_mod(rec, 15) != delta_mod(rec, 3) * delta_mod(rec, 5)


def test_delta_mod_brute_force():
    # oracle: count gcd(u_n, m) = 1 directly over a long window
    for a, b, m in ((1, 3, 15), (3, 5, 21), (1, -5, 9), (5, 3, 35)):
        rec = make_geometric_shift(a, b)
        window = 5040
        count = sum(1 for n in range(1, window + 1) if gcd(a * 2**n + b, m) == 1)
        from recprimes.arith import euler_phi

        expected = Fraction(count, window) / Fraction(euler_phi(m), m)
        assert delta_mod(rec, m) == expected


def test_delta_y5_exact_values():
    d = delta(make_geometric_shift(1, 3), 5)
    assert d.delta == Fraction(217, 96)
    assert d.coprime_count == 30 and d.window_length == 60
    assert d.phi_ratio == Fraction(48, 217)
    assert f"{float(d.delta):.2f}" == "2.26"
    d35 = delta(make_geometric_shift(3, 5), 5)
    assert f"{float(d35.delta):.2f}" == "4.52"


def test_delta_fermat_small():
    d = delta(make_geometric_shift(1, 1), 2)
    assert d.delta == Fraction(3, 2)


def test_strategy_equivalence():
    for a, b in ((1, 3), (1, -3), (1, 5), (1, -7), (3, 5), (3, -5)):
        rec = make_geometric_shift(a, b)
        for y in (5, 8, 12):
            assert delta(rec, y).delta == delta(rec, y, strategy="ie").delta, (a, b, y)


def test_strategy_equivalence_fibonacci():
    fib = make_lucas(1, 1)
    for y in (5, 10):
        assert delta(fib, y).delta == delta(fib, y, strategy="ie").delta


def test_symmetry_in_a_b():
    # swap symmetry at finite y needs the two supports to coincide, which
    # holds once every prime factor of a*b has order <= y (here 3, 5, 7, 11
    # have orders 2, 4, 3, 10, all <= 10)
    pairs = [
        (1, 3), (1, 5), (3, 5), (1, 7), (3, 7), (5, 7), (1, 9), (5, 9),
        (1, 11), (3, 11), (5, 11), (7, 11), (9, 11), (1, 15), (1, 21),
        (5, 21), (1, 33), (1, 35), (3, 35), (11, 15),
    ]
    assert len(pairs) == 20
    for a, b in pairs:
        assert gcd(a, b) == 1
        y = 10
        assert delta(make_geometric_shift(a, b), y).delta == delta(make_geometric_shift(b, a), y).delta
        assert delta(make_geometric_shift(a, -b), y).delta == delta(make_geometric_shift(b, -a), y).delta


def test_divergent_case_identity():
    # for 2^n - 1 the window count collapses to (n, L_y) = 1
    for y in (4, 8, 12):
        d = delta(make_geometric_shift(1, -1), y)
        expected = Fraction(1)
        for p in d.support.primes():
            if p > y:
                expected *= Fraction(p, p - 1)
        assert d.delta == expected


def test_sieve_segment_size_invariance():
    from recprimes.density import _count_sieve, _forbidden_pairs

    rec = make_geometric_shift(1, 3)
    table = period_support(rec, 10)
    pairs, _ = _forbidden_pairs(rec, table)
    expected = _count_sieve(pairs, 1, table.Ly)
    for segment in (64, 997, 4096, 10**6):
        assert _count_sieve(pairs, 1, table.Ly, segment=segment) == expected


def test_incomplete_support_propagates(monkeypatch):
    import recprimes.density as density_mod
    from recprimes.moddyn import IncompleteSupport, period_support as support

    periodic = make_custom([-1], [5])  # 5, -5, 5, ... is periodic: G_2 = 0
    table = support(periodic, 3, scan_bound=50)
    assert not table.complete
    monkeypatch.setattr(density_mod, "period_support", lambda rec, y: table)
    with pytest.raises(IncompleteSupport):
        delta(periodic, 3)


def test_window_doubling():
    rec = make_geometric_shift(1, 3)
    table = period_support(rec, 8)
    c1, _ = window_count(rec, table, multiplier=1)
    c2, _ = window_count(rec, table, multiplier=2)
    assert c2 == 2 * c1


def test_predict_count_formula():
    rec = make_geometric_shift(1, 3)
    d = delta(rec, 5)
    assert predict_count(rec, 10**6, 5) == pytest.approx(float(d.delta) * log(10**6) / log(2))


def test_predict_requires_growth():
    periodic = make_custom([1], [5])
    with pytest.raises(NotExponentiallyGrowing):
        predict_count(periodic, 100, 3)


def test_mersenne_style_prediction_values():
    assert mersenne_style_prediction(10**6, 2) == pytest.approx(35.5, abs=0.05)
    phi = (1 + 5**0.5) / 2
    assert mersenne_style_prediction(10**6, phi) == pytest.approx(51.1, abs=0.2)
    assert mersenne_style_prediction(10**2, 2) == pytest.approx(11.8, abs=0.05)


def test_kappa_quadratic():
    k = kappa_f((1, 0, 1), 20)  # x^2 + 1
    # p = 3 contributes 3/2, p = 5 contributes 3/4
    manual = 1.0  # p = 2: one root
    for p in (3, 5, 7, 11, 13, 17, 19):
        omega = sum(1 for n in range(p) if (n * n + 1) % p == 0)
        assert omega == (2 if p % 4 == 1 else 0)
        manual *= (p - omega) / (p - 1)
    assert k.value == pytest.approx(manual)
    assert k.fixed_prime is None


def test_kappa_fixed_divisor():
    k = kappa_f((2, 1, 1), 50)  # x^2 + x + 2 is always even
    assert k.value == 0.0 and k.fixed_prime == 2


def test_kappa_x2_plus_1_convergence():
    k = kappa_f((1, 0, 1), 10**4)
    assert k.value == pytest.approx(1.372, abs=0.01)


@pytest.mark.slow
def test_extreme_pair_predictions_y25():
    assert predict_count(make_geometric_shift(1, 39), 10**6, 25) == pytest.approx(78, abs=1.0)
    assert predict_count(make_geometric_shift(1, 47), 10**6, 25) == pytest.approx(5.4, abs=0.3)
