from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from motiveforge.core import (HypergeometricData, apply_operator, classify_primes, cyclotomic_polynomial,
                              gamma_vectors, hypergeometric_coefficients, ode_residual, parse_hypergeometric,
                              root_polynomial)
from motiveforge.errors import LengthMismatch, NotCyclotomic, Overlap, ZeroArgument
from motiveforge.matcher import _load_json

ONES5 = "1,1,1,1,1"
SEXTIC = "1/2,1/3,2/3,1/6,5/6"

# defined-over-Q parameter packets: all k/n with gcd(k, n) = 1
PACKETS = {1: [1], 2: ["1/2"], 3: ["1/3", "2/3"], 4: ["1/4", "3/4"], 6: ["1/6", "5/6"],
           5: ["1/5", "2/5", "3/5", "4/5"], 8: ["1/8", "3/8", "5/8", "7/8"]}


def test_gamma_vectors_sextic():
    # Phi2 Phi3 Phi6 / Phi1^5 = (x^6 - 1) / (x - 1)^6
    data = parse_hypergeometric(SEXTIC, ONES5)
    P, Q = gamma_vectors(data)
    assert P == [6] and Q == [1] * 6
    assert data.M == 6 ** 6


def test_gamma_vectors_known():
    # alpha = 1/2 x5: (x^2-1)^5 / (x-1)^10
    data = parse_hypergeometric("1/2,1/2,1/2,1/2,1/2", ONES5)
    assert data.gammaP == (2, 2, 2, 2, 2)
    assert data.gammaQ == (1,) * 10
    assert data.M == 2 ** 10
    # Phi2 Phi4 / Phi1^3 = (x^4 - 1) / (x - 1)^4
    k3 = parse_hypergeometric("1/2,1/4,3/4", "1,1,1")
    assert k3.gammaP == (4,)
    assert k3.gammaQ == (1, 1, 1, 1)
    assert k3.M == 256


def test_sextic_M_is_1728():
    data = parse_hypergeometric("1/2,1/6,5/6", "1,1,1")
    assert data.M == 1728


def test_parse_errors():
    with pytest.raises(NotCyclotomic):
        parse_hypergeometric("1/3,1/2", "1,1")
    with pytest.raises(Overlap):
        parse_hypergeometric("1/2,1", "1,1")
    with pytest.raises(LengthMismatch):
        parse_hypergeometric("1/2", "1,1")
    with pytest.raises(ValueError):
        parse_hypergeometric("3/2", "1")
    with pytest.raises(ZeroArgument):
        classify_primes(parse_hypergeometric("1/2", "1"), 0)


def test_serialize_roundtrip_and_order():
    data = parse_hypergeometric("5/6,1/2,1/6,2/3,1/3", ONES5)
    assert data.serialize() == "alpha=1/6,1/3,1/2,2/3,5/6;beta=1,1,1,1,1"
    assert HypergeometricData.deserialize(data.serialize()) == data


def test_cyclotomic_polynomials():
    assert cyclotomic_polynomial(1) == [-1, 1]
    assert cyclotomic_polynomial(6) == [1, -1, 1]
    assert cyclotomic_polynomial(12) == [1, 0, -1, 0, 1]
    assert root_polynomial([Fraction(1, 3), Fraction(2, 3)]) == [1, 1, 1]


def test_classify_primes_sextic():
    data = parse_hypergeometric(SEXTIC, ONES5)
    spec = classify_primes(data, Fraction(-1, 512000))
    # 7^2 divides 1 - t
    assert {2, 3, 5, 7} <= spec.excludedPrimes
    assert 7 in spec.degeneratePrimes
    assert spec.is_good(11) and spec.is_good(13)
    assert not spec.is_good(7) and spec.is_good(7, allow_degenerate=True)
    assert not spec.is_good(5, allow_degenerate=True)


def test_coefficients_closed_form():
    data = parse_hypergeometric("1/2", "1")
    A = hypergeometric_coefficients(data, 6).coeffs
    # (1/2)_n / n! = binom(2n, n) / 4^n
    from math import comb
    assert list(A) == [Fraction(comb(2 * n, n), 4 ** n) for n in range(7)]


def test_ode_detects_corruption():
    data = parse_hypergeometric(SEXTIC, ONES5)
    A = list(hypergeometric_coefficients(data, 12).coeffs)
    assert ode_residual(data, 12, A)
    A[5] += Fraction(1, 10 ** 9)
    assert not ode_residual(data, 12, A)


def test_ode_all_table_rows_order_30():
    rows = _load_json("table1_rows.json")
    for r in rows["rows"]:
        data = parse_hypergeometric(r["alpha"], rows["beta"])
        assert ode_residual(data, 30), r["id"]


def _packet_lists():
    keys = sorted(PACKETS)
    return st.lists(st.sampled_from(keys), min_size=1, max_size=3)


@settings(max_examples=40, deadline=None)
@given(_packet_lists())
def test_ode_annihilates_random_data(dens):
    alpha = [x for n in dens for x in PACKETS[n] if n != 1]
    if not alpha:
        return
    beta = [1] * len(alpha)
    data = parse_hypergeometric(alpha, beta)
    assert ode_residual(data, 20)
    res = apply_operator(data, list(hypergeometric_coefficients(data, 20).coeffs))
    assert all(r == 0 for r in res[:21])


@settings(max_examples=40, deadline=None)
@given(_packet_lists())
def test_gamma_vector_balance(dens):
    alpha = [x for n in dens for x in PACKETS[n] if n != 1]
    if not alpha:
        return
    data = parse_hypergeometric(alpha, [1] * len(alpha))
    assert sum(data.gammaP) == sum(data.gammaQ)
    assert len(data.alpha) == data.degree
