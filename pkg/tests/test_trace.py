from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from motiveforge.core import parse_hypergeometric
from motiveforge.errors import BadPrime, DivisibilityFails, TooLarge
from motiveforge.ffield import build_field
from motiveforge.poly import coeffs_to_power_sums, exp_log_series, pmul, power_sums_to_coeffs
from motiveforge.series import bp_cm
from motiveforge.ntheory import kronecker
from motiveforge.trace import (LocalEulerFactor, degenerate_completion, hq_basic, hq_general,
                               local_factor_direct, local_factor_selfdual, trace_sequence,
                               weil_integrality_check)

from oracle import hp_basic, naive_power_sums_to_factor

ONES5 = "1,1,1,1,1"
SEXTIC = parse_hypergeometric("1/2,1/3,2/3,1/6,5/6", ONES5)
HALVES = parse_hypergeometric("1/2,1/2,1/2,1/2,1/2", ONES5)
K3 = parse_hypergeometric("1/2,1/4,3/4", "1,1,1")
T_SEXTIC = Fraction(-1, 512000)

# H_p frozen from the brute-force oracle in tests/oracle.py
ORACLE_H = {
    ("halves", Fraction(-1, 4)): {3: -1, 5: 20, 7: 39, 11: 105, 13: 299, 17: 99},
    ("sextic", T_SEXTIC): {7: 35, 13: -105, 19: 291, 31: 1015},
    ("k3", Fraction(-1, 48)): {5: 3, 13: 3, 17: -33, 29: -69},
}
DATA = {"halves": HALVES, "sextic": SEXTIC, "k3": K3}


@pytest.mark.parametrize("key", list(ORACLE_H))
def test_frozen_oracle_values(key):
    name, t = key
    for p, H in ORACLE_H[key].items():
        assert hq_general(DATA[name], t, build_field(p)) == H, (name, p)


@pytest.mark.parametrize("name,t,p", [("halves", Fraction(-1, 4), 11), ("sextic", T_SEXTIC, 13),
                                      ("k3", Fraction(-1, 48), 13)])
def test_live_oracle(name, t, p):
    data = DATA[name]
    assert hp_basic(data.alpha, data.beta, t, p) == hq_general(data, t, build_field(p))


def overlap_cases():
    """(data, t, q) where the direct Gauss-sum definition applies."""
    out = []
    for t in (Fraction(-1, 4), Fraction(1, 3), Fraction(5, 7)):
        for p, f in ((3, 1), (5, 1), (11, 1), (13, 1), (3, 2), (5, 2)):
            if (t.numerator * t.denominator) % p and (t - 1).numerator % p:
                out.append((HALVES, t, p, f))
    for t in (T_SEXTIC, Fraction(-27, 5)):
        for p, f in ((7, 1), (13, 1), (19, 1), (11, 2)):
            if (t.numerator * t.denominator) % p:
                out.append((SEXTIC, t, p, f))
    return out


def test_basic_equals_general_on_overlap():
    cases = overlap_cases()
    assert len(cases) >= 20
    for data, t, p, f in cases:
        ctx = build_field(p, f)
        assert hq_basic(data, t, ctx) == hq_general(data, t, ctx), (data, t, p, f)


def test_basic_rejects_nondivisible_q():
    with pytest.raises(DivisibilityFails):
        hq_basic(SEXTIC, T_SEXTIC, build_field(11))


@pytest.mark.parametrize("p,f", [(5, 1), (7, 1), (11, 1), (3, 2), (5, 2), (13, 1), (7, 2), (3, 3), (11, 2), (17, 1)])
def test_generator_invariance(p, f):
    t = Fraction(-1, 4)
    vals = {hq_general(HALVES, t, build_field(p, f, seed=s)) for s in range(3)}
    assert len(vals) == 1


def test_complex_backend_matches_modular():
    for p, f in ((7, 1), (13, 1), (11, 2)):
        ctx = build_field(p, f)
        a = hq_general(SEXTIC, T_SEXTIC, ctx, backend="modular")
        b = hq_general(SEXTIC, T_SEXTIC, ctx, backend="complex")
        assert a == b
        report = {}
        hq_basic(HALVES, Fraction(-1, 4), ctx, backend="complex", report=report)
        assert report["gap"] < 0.01


def test_direct_factor_halves_p3_against_oracle_sums():
    seq = trace_sequence(HALVES, Fraction(-1, 4), 3, 5)
    fac = local_factor_direct(HALVES, Fraction(-1, 4), 3)
    assert list(fac.coeffs) == [int(c) for c in naive_power_sums_to_factor(list(seq.values))]
    assert weil_integrality_check(fac)["pass"]


def test_sextic_L7_completed():
    # (1 + 7^2 T)(1 - 7^4 T^2)(1 - 35 T + 7^4 T^2)
    fac = local_factor_direct(SEXTIC, T_SEXTIC, 7, allow_degenerate=True)
    expected = pmul(pmul([1, 49], [1, 0, -7 ** 4]), [1, -35, 7 ** 4])
    assert list(fac.coeffs) == expected
    assert {"degenerate", "completed"} <= fac.flags
    with pytest.raises(BadPrime):
        local_factor_direct(SEXTIC, T_SEXTIC, 7)


def test_sextic_L13():
    # (1 + 13^2 T)(1 - 64 T - 1758*13 T^2 - 64*13^4 T^3 + 13^8 T^4)
    fac = local_factor_direct(SEXTIC, T_SEXTIC, 13)
    expected = pmul([1, 169], [1, -64, -1758 * 13, -64 * 13 ** 4, 13 ** 8])
    assert list(fac.coeffs) == expected


def test_sextic_L11_sign_of_quadratic():
    # computed factor carries 1 + 30T + 11^4 T^2 where the printed one has 1 - 30T + 11^4 T^2
    fac = local_factor_direct(SEXTIC, T_SEXTIC, 11)
    ours = pmul(pmul([1, -121], [1, 0, -11 ** 4]), [1, 30, 11 ** 4])
    printed = pmul(pmul([1, -121], [1, 0, -11 ** 4]), [1, -30, 11 ** 4])
    assert list(fac.coeffs) == ours
    assert list(fac.coeffs) != printed


def test_selfdual_matches_direct():
    for p in (11, 13):
        d = local_factor_direct(SEXTIC, T_SEXTIC, p)
        s = local_factor_selfdual(SEXTIC, T_SEXTIC, p, 3)
        assert s.coeffs == d.coeffs


def test_k3_factor_shape():
    for p in (5, 11, 13, 17, 19):
        fac = local_factor_direct(K3, Fraction(-1, 48), p, weight=2)
        quad = pmul([1, -kronecker(-3, p) * p], [1, -bp_cm(p), kronecker(-4, p) * p * p])
        assert list(fac.coeffs) == quad


def test_degenerate_completion_noop_when_not_applicable():
    coeffs, extra = degenerate_completion(SEXTIC, T_SEXTIC, 11, [1, 2, 3, 4, 5, 6], 4)
    assert not extra and coeffs == [1, 2, 3, 4, 5, 6]


def test_weil_check_rejects_corruption():
    good = local_factor_direct(HALVES, Fraction(-1, 4), 7)
    c = list(good.coeffs)
    c[2] += 5
    bad = LocalEulerFactor(p=7, coeffs=tuple(c), weight=4)
    assert weil_integrality_check(good)["pass"]
    assert not weil_integrality_check(bad)["pass"]


def test_errors():
    with pytest.raises(BadPrime):
        trace_sequence(SEXTIC, T_SEXTIC, 5, 1)
    with pytest.raises(TooLarge):
        trace_sequence(HALVES, Fraction(-1, 4), 101, 5, size_cap=10 ** 6)
    with pytest.raises(ValueError):
        local_factor_selfdual(SEXTIC, T_SEXTIC, 11, 2)


@settings(max_examples=80, deadline=None)
@given(st.lists(st.integers(-10 ** 6, 10 ** 6), min_size=1, max_size=7))
def test_newton_identities_roundtrip(coeffs):
    poly = [1] + coeffs
    d = len(coeffs)
    sums = coeffs_to_power_sums(poly, d)
    assert power_sums_to_coeffs(sums) == poly
    assert exp_log_series(sums, d) == poly
