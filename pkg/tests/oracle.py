"""Naive reference computations over prime fields, independent of the package internals.

Plain complex arithmetic and brute-force character tables; only usable for small p.
"""
import cmath
from fractions import Fraction
from math import gcd


def primitive_root(p: int, skip: int = 0) -> int:
    """The (skip+1)-th smallest primitive root mod p."""
    n = p - 1
    fac = [q for q in range(2, n + 1) if n % q == 0 and all(q % r for r in range(2, q))]
    found = 0
    for g in range(2, p):
        if all(pow(g, n // q, p) != 1 for q in fac):
            if found == skip:
                return g
            found += 1
    if p == 2:
        return 1
    raise ValueError("no primitive root")


def gauss_sums(p: int, gen: int) -> list:
    """g(m) = sum_{x != 0} omega(x)^m exp(2 pi i x / p) with omega(gen) = exp(2 pi i/(p-1))."""
    n = p - 1
    logs = {}
    x = 1
    for k in range(n):
        logs[x] = k
        x = x * gen % p
    out = []
    for m in range(n):
        s = 0
        for x, k in logs.items():
            s += cmath.exp(2j * cmath.pi * (k * m / n + x / p))
        out.append(s)
    return out, logs


def hp_basic(alpha, beta, t, p: int, skip: int = 0) -> Fraction:
    """Finite hypergeometric sum over F_p from its Gauss-sum definition; needs (p-1)alpha integral."""
    n = p - 1
    gen = primitive_root(p, skip)
    g, logs = gauss_sums(p, gen)
    a = [Fraction(x) * n for x in alpha]
    b = [Fraction(x) * n for x in beta]
    if any(x.denominator != 1 for x in a + b):
        raise ValueError("basic definition needs p = 1 mod every denominator")
    a = [int(x) % n for x in a]
    b = [int(x) % n for x in b]
    d = len(a)
    t = Fraction(t)
    arg = (-1) ** d * t
    r = arg.numerator * pow(arg.denominator, -1, p) % p
    lz = logs[r]
    norm = 1
    for j in range(d):
        norm *= g[a[j]] * g[(-b[j]) % n]
    total = 0
    for m in range(n):
        term = cmath.exp(2j * cmath.pi * lz * m / n)
        for j in range(d):
            term *= g[(m + a[j]) % n] * g[(-m - b[j]) % n]
        total += term
    val = total / norm / (1 - p)
    re = round(val.real)
    assert abs(val.real - re) < 1e-6 and abs(val.imag) < 1e-6, val
    return Fraction(re)


def naive_power_sums_to_factor(H: list) -> list:
    """exp(-sum H_r T^r / r) truncated at degree len(H), exact rationals."""
    d = len(H)
    c = [Fraction(1)] + [Fraction(0)] * d
    for k in range(1, d + 1):
        c[k] = -sum(Fraction(H[i - 1]) * c[k - i] for i in range(1, k + 1)) / k
    return c


def is_coprime(a: int, b: int) -> bool:
    return gcd(a, b) == 1
