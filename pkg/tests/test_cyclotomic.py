"""Tests for exact cyclotomic arithmetic.

The trace oracle here is deliberately independent of the package: it sums
Galois conjugates as an integer coefficient vector and reduces it with its
own synthetic division against sympy's cyclotomic polynomials.
"""

import random
from fractions import Fraction
from math import gcd

import pytest
import sympy

from zgunits.cyclotomic import (
    CyclotomicNumber,
    compress,
    cyc_add,
    cyc_conjugate,
    cyc_equal,
    cyc_from_payload,
    cyc_mul,
    cyc_neg,
    cyc_pow,
    cyc_sum,
    cyc_to_payload,
    cyclotomic_polynomial,
    from_rational,
    galois_apply,
    gauss_sqrt,
    lift,
    root_trace,
    trace_times_root,
    trace_to_rationals,
    zeta,
)
from zgunits.errors import CyclotomicFormatError, UnsupportedInputError
from zgunits.numtheory import euler_phi


def sympy_cyclotomic_coeffs(n):
    poly = sympy.Poly(sympy.cyclotomic_poly(n, sympy.Symbol("x")))
    return [int(c) for c in reversed(poly.all_coeffs())]


def brute_trace(n, a):
    """Sum zeta_n^(a*b) over b coprime to n, reduced by synthetic division
    against sympy's cyclotomic polynomial.  Returns an integer."""
    vec = [0] * n
    for b in range(1, n + 1):
        if gcd(b, n) == 1:
            vec[(a * b) % n] += 1
    phi_poly = sympy_cyclotomic_coeffs(n)
    deg = len(phi_poly) - 1
    for e in range(n - 1, deg - 1, -1):
        c = vec[e]
        if c:
            vec[e] = 0
            for i in range(deg):
                vec[e - deg + i] -= c * phi_poly[i]
    assert all(v == 0 for v in vec[1:deg]), "trace should be rational"
    return vec[0]


def random_cyclotomic(rng, conductors=(1, 3, 4, 5, 8, 12, 15)):
    n = rng.choice(conductors)
    coeffs = {}
    for _ in range(rng.randrange(4)):
        coeffs[rng.randrange(n)] = Fraction(rng.randrange(-4, 5),
                                            rng.randrange(1, 4))
    return CyclotomicNumber(n, coeffs)


# ---------------------------------------------------------------------------
# cyclotomic polynomials and canonical form


@pytest.mark.parametrize("n", list(range(1, 61)))
def test_cyclotomic_polynomial_matches_sympy(n):
    assert list(cyclotomic_polynomial(n)) == sympy_cyclotomic_coeffs(n)


def test_canonical_exponent_range():
    x = CyclotomicNumber(12, {11: Fraction(1), 7: Fraction(2)})
    assert all(0 <= e < euler_phi(12) for e in x.coeffs)


def test_canonicalization_is_idempotent():
    rng = random.Random(7)
    for _ in range(50):
        x = random_cyclotomic(rng)
        again = CyclotomicNumber(x.conductor, x.coeffs)
        assert again.coeffs == x.coeffs


def test_zero_has_empty_coefficients():
    x = cyc_add(zeta(5), cyc_neg(zeta(5)))
    assert x.is_zero() and x.coeffs == {}


def test_equality_across_conductors():
    # zeta_6 = -zeta_3^2
    assert cyc_equal(zeta(6), cyc_neg(zeta(3, 2)))
    assert zeta(8, 2) == zeta(4)
    assert not cyc_equal(zeta(8), zeta(4))


def test_equality_consistent_with_arithmetic():
    rng = random.Random(11)
    for _ in range(30):
        x, y, z = (random_cyclotomic(rng) for _ in range(3))
        if cyc_equal(x, y):
            assert cyc_equal(cyc_add(x, z), cyc_add(y, z))
            assert cyc_equal(cyc_mul(x, z), cyc_mul(y, z))


def test_ring_laws_on_random_values():
    rng = random.Random(13)
    for _ in range(25):
        x, y, z = (random_cyclotomic(rng) for _ in range(3))
        assert cyc_equal(cyc_add(x, y), cyc_add(y, x))
        assert cyc_equal(cyc_mul(x, y), cyc_mul(y, x))
        assert cyc_equal(cyc_mul(x, cyc_add(y, z)),
                         cyc_add(cyc_mul(x, y), cyc_mul(x, z)))
        assert cyc_equal(cyc_mul(cyc_mul(x, y), z), cyc_mul(x, cyc_mul(y, z)))


def test_power_basis_identity():
    assert cyc_equal(cyc_mul(zeta(8), zeta(8)), zeta(4))
    assert cyc_equal(cyc_pow(zeta(5), 5), from_rational(1))


# ---------------------------------------------------------------------------
# traces


def test_root_trace_frozen_values():
    assert root_trace(1, 0) == 1
    assert root_trace(3, 1) == -1
    assert root_trace(12, 2) == 2   # brute conjugate sum of zeta_12^2
    for q in (3, 5, 7, 11, 13):
        for a in range(1, q):
            assert root_trace(q, a) == -1
        assert root_trace(q, 0) == q - 1


def test_root_trace_against_brute_force_small():
    # the full n <= 100 sweep runs in the acceptance suite
    oracle_cache = {}
    for n in range(1, 41):
        for a in range(n):
            key = (n, gcd(a, n))
            if key not in oracle_cache:
                oracle_cache[key] = brute_trace(n, a)
            assert root_trace(n, a) == oracle_cache[key], (n, a)


def test_trace_to_rationals_frozen_values():
    assert trace_to_rationals(from_rational(1)) == 1
    assert trace_to_rationals(lift(from_rational(1), 12)) == euler_phi(12)
    assert trace_to_rationals(cyc_add(zeta(5), zeta(5, 4))) == -2
    assert trace_to_rationals(cyc_add(zeta(5), cyc_neg(zeta(5)))) == 0


def test_trace_is_conductor_independent():
    rng = random.Random(17)
    for _ in range(30):
        x = random_cyclotomic(rng)
        assert trace_to_rationals(lift(x, x.conductor * 4)) == \
            Fraction(euler_phi(x.conductor * 4), euler_phi(x.conductor)) \
            * trace_to_rationals(x)


def test_trace_invariant_under_conjugation():
    rng = random.Random(19)
    for _ in range(30):
        x = random_cyclotomic(rng)
        assert trace_to_rationals(cyc_conjugate(x)) == trace_to_rationals(x)
        assert trace_to_rationals(cyc_mul(x, from_rational(1))) == \
            trace_to_rationals(x)


def test_root_trace_agrees_with_linear_trace():
    for n in (1, 2, 6, 9, 12, 20):
        for a in range(n):
            assert root_trace(n, a) == trace_to_rationals(zeta(n, a))


def test_trace_times_root_matches_slow_path():
    rng = random.Random(23)
    for _ in range(40):
        x = random_cyclotomic(rng)
        m = rng.choice((1, 2, 4, 6, 10))
        j = rng.randrange(m)
        assert trace_times_root(x, m, j) == \
            trace_to_rationals(cyc_mul(x, zeta(m, j)))


# ---------------------------------------------------------------------------
# Galois action and conjugation


def test_conjugate_is_involution_and_hom():
    rng = random.Random(29)
    for _ in range(20):
        x, y = random_cyclotomic(rng), random_cyclotomic(rng)
        assert cyc_equal(cyc_conjugate(cyc_conjugate(x)), x)
        assert cyc_equal(cyc_conjugate(cyc_mul(x, y)),
                         cyc_mul(cyc_conjugate(x), cyc_conjugate(y)))


def test_conjugate_fixes_symmetric_values():
    x = cyc_add(zeta(7, 2), zeta(7, 5))
    assert cyc_equal(cyc_conjugate(x), x)


def test_galois_apply_respects_products():
    x = cyc_add(zeta(12, 1), from_rational(2))
    y = cyc_sum([zeta(12, 5), zeta(12, 7)])
    for j in (5, 7, 11):
        assert cyc_equal(galois_apply(cyc_mul(x, y), j),
                         cyc_mul(galois_apply(x, j), galois_apply(y, j)))
    with pytest.raises(ValueError):
        galois_apply(zeta(12), 4)


# ---------------------------------------------------------------------------
# Gauss sums


def test_gauss_sqrt_squares():
    for q in (3, 5, 7, 9, 11, 13, 25, 27, 49, 81):
        delta = 1 if q % 4 == 1 else -1
        g = gauss_sqrt(q)
        assert cyc_equal(cyc_mul(g, g), from_rational(delta * q)), q
        assert cyc_equal(gauss_sqrt(q, delta), g)


def test_gauss_sqrt_known_form_for_three():
    g = gauss_sqrt(3)
    assert cyc_equal(g, cyc_add(zeta(3), cyc_neg(zeta(3, 2))))


def test_gauss_sum_identity_for_five():
    s = cyc_sum([zeta(5, 1), cyc_neg(zeta(5, 2)), cyc_neg(zeta(5, 3)),
                 zeta(5, 4)])
    assert cyc_equal(cyc_mul(s, s), from_rational(5))


def test_gauss_sqrt_rejects_bad_input():
    with pytest.raises(UnsupportedInputError):
        gauss_sqrt(4)
    with pytest.raises(UnsupportedInputError):
        gauss_sqrt(15)
    with pytest.raises(UnsupportedInputError):
        gauss_sqrt(7, 1)   # 7 = 3 mod 4 forces the minus sign


# ---------------------------------------------------------------------------
# compression and serialization


def test_compress_finds_minimal_conductor():
    assert compress(cyc_mul(zeta(12, 3), zeta(12, 9))).conductor == 1
    assert compress(lift(zeta(4), 12)).conductor == 4
    # zeta_12^2 - zeta_12^10 is a square root of -3, so it lives at conductor 3
    x = compress(cyc_add(zeta(12, 2), cyc_neg(zeta(12, 10))))
    assert x.conductor == 3
    assert cyc_equal(x, gauss_sqrt(3))
    assert compress(from_rational(0)).conductor == 1


def test_compress_round_trips_random_values():
    rng = random.Random(31)
    for _ in range(25):
        x = random_cyclotomic(rng)
        lifted = lift(x, x.conductor * rng.choice((2, 3, 4)))
        small = compress(lifted)
        assert cyc_equal(small, x)
        assert lifted.conductor % small.conductor == 0


def test_payload_round_trip():
    rng = random.Random(37)
    for _ in range(25):
        x = random_cyclotomic(rng)
        assert cyc_equal(cyc_from_payload(cyc_to_payload(x)), x)


def test_payload_orders_exponents_ascending():
    x = cyc_sum([zeta(12, 5), zeta(12, 2), from_rational(3)])
    exps = [int(t[0]) for t in cyc_to_payload(x)["coefficients"]]
    assert exps == sorted(exps)


@pytest.mark.parametrize("doc", [
    {"conductor": "12"},
    {"conductor": "x", "coefficients": []},
    {"conductor": "12", "coefficients": [["1", "1"]]},
    {"conductor": "12", "coefficients": [["1", "1", "0"]]},
    {"conductor": "12", "coefficients": [["1", "1", "-2"]]},
    {"conductor": "12", "coefficients": [["1", "1", "1"], ["1", "2", "1"]]},
    {"conductor": "12", "coefficients": [["1", "1.5", "1"]]},
])
def test_payload_rejects_malformed_documents(doc):
    with pytest.raises(CyclotomicFormatError):
        cyc_from_payload(doc)
