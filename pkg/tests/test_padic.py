from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from qck.padic import (
    LogBranch,
    NotRationalError,
    PadicNumber,
    deserialize,
    log_rational,
    padic_from_rational,
    padic_log,
    rational_reconstruct,
    serialize,
    teichmuller,
    valuation,
)

PRIMES = [3, 5, 7, 11, 61]


def test_zero_is_exact_infinity():
    z = padic_from_rational(0, 61, 5)
    assert z.is_zero()
    assert z.val == float("inf")


def test_two_thirds_digits_mod_125():
    x = padic_from_rational(Fraction(2, 3), 5, 3)
    assert x.digits() == [4, 1, 3]
    # independent check: 3^{-1} mod 125 by extended Euclid
    assert (3 * x.residue()) % 125 == 2


def test_negative_valuation_round_trip():
    a00 = Fraction(58, 61) + 19 + 2 * 61 + 43 * 61**2
    x = padic_from_rational(a00, 61, 3)
    assert x.val == -1
    assert x.digits() == [58, 19, 2, 43]
    assert deserialize(serialize(x)) == x
    assert x.lift() == a00


def test_rejects_composite_and_nonpositive_precision():
    with pytest.raises(ValueError):
        padic_from_rational(1, 6, 3)
    with pytest.raises(ValueError):
        padic_from_rational(1, 5, 0)


def test_arithmetic_precision_tracking():
    p = 7
    a = PadicNumber.from_int(p, p, 5)  # 7 + O(7^5)
    b = PadicNumber.from_int(3, p, 5)
    assert (a * b).prec == 5
    assert (PadicNumber.from_int(p, p, 9) * b).prec == 6
    q = b / a
    assert q.val == -1 and q.prec == 3


def test_log_of_one_is_zero():
    assert padic_log(PadicNumber.from_int(1, 61, 6)).is_zero()


def test_log_61_of_2_matches_series_on_one_unit():
    p, N = 61, 6
    u = pow(2, p - 1, p**(N + 4))
    w = Fraction(u - 1)
    series = sum(Fraction((-1) ** (k + 1)) * w**k / k for k in range(1, 30))
    ref = PadicNumber.from_rational(series, p, N) / PadicNumber.from_int(p - 1, p, N)
    assert padic_log(PadicNumber.from_int(2, p, N)) == ref


def test_log_of_roots_of_unity_vanishes():
    p, N = 11, 8
    for a in range(1, p):
        w = teichmuller(a, p, N)
        assert pow(w, p - 1, p**N) == 1
        assert w % p == a
        assert padic_log(PadicNumber.from_int(w, p, N)).is_zero()


def test_log_branch_on_p():
    p, N = 5, 6
    assert log_rational(5, p, N).is_zero()
    br = LogBranch(p, Fraction(3))
    assert log_rational(25, p, N, br) == PadicNumber.from_int(6, p, N)


@st.composite
def unit_pairs(draw):
    p = draw(st.sampled_from(PRIMES))
    N = draw(st.integers(2, 10))
    a = draw(st.integers(1, p**N - 1).filter(lambda n: n % p))
    b = draw(st.integers(1, p**N - 1).filter(lambda n: n % p))
    return p, N, a, b


@given(unit_pairs())
def test_log_is_a_homomorphism(data):
    p, N, a, b = data
    A, B = PadicNumber.from_int(a, p, N), PadicNumber.from_int(b, p, N)
    assert padic_log(A * B) == padic_log(A) + padic_log(B)


@given(unit_pairs())
def test_log_of_square(data):
    p, N, a, _ = data
    A = PadicNumber.from_int(a, p, N)
    assert padic_log(A * A) == padic_log(A) * 2


@given(st.sampled_from(PRIMES), st.integers(-10**6, 10**6), st.integers(1, 10**6), st.integers(1, 12))
def test_rational_round_trip_and_field_axioms(p, n, d, N):
    q = Fraction(n, d)
    if q == 0 or valuation(d, p) > 0:
        return
    x = padic_from_rational(q, p, N)
    y = padic_from_rational(Fraction(p * d + 1), p, N)
    assert (x + y) - y == x
    assert (x * y) / y == x
    assert deserialize(serialize(x)) == x


def test_rational_reconstruction_examples():
    assert rational_reconstruct(padic_from_rational(Fraction(2, 3), 61, 5), 100) == Fraction(2, 3)
    assert rational_reconstruct(PadicNumber.from_residue(-4, 29, 4), 10) == -4


def test_rational_reconstruction_rejects_large_height():
    x = padic_from_rational(Fraction(999983, 1000003), 61, 5)
    with pytest.raises(NotRationalError, match="not recognizably rational"):
        rational_reconstruct(x, 10)


def test_rational_reconstruction_bound_too_large_for_precision():
    with pytest.raises(NotRationalError):
        rational_reconstruct(PadicNumber.from_int(2, 5, 2), 10)


@given(st.integers(-50, 50), st.integers(1, 50))
def test_rational_reconstruction_recovers_small_fractions(n, d):
    q = Fraction(n, d)
    if q.denominator % 61 == 0:
        return
    x = padic_from_rational(q, 61, 4)
    assert rational_reconstruct(x, 50) == q
