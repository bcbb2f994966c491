"""Small elementary number theory helpers on top of sympy."""
from __future__ import annotations

from fractions import Fraction
from math import gcd

from sympy import factorint, isprime, primerange
from sympy.functions.combinatorial.numbers import jacobi_symbol
from sympy.ntheory.residue_ntheory import sqrt_mod

__all__ = [
    "factorint", "isprime", "primerange", "kronecker", "squarefree_part",
    "fundamental_discriminant", "is_fundamental_discriminant", "ord_p",
    "prime_divisors", "sqrt_mod_prime_power", "parse_fraction",
]


def parse_fraction(text) -> Fraction:
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    return Fraction(str(text).strip())


def kronecker(D: int, n: int) -> int:
    """Kronecker symbol (D|n) for integers D and n."""
    if n == 0:
        return 1 if abs(D) == 1 else 0
    result = 1
    if n < 0:
        n = -n
        if D < 0:
            result = -result
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v:
        if D % 2 == 0:
            return 0
        if v % 2 and D % 8 in (3, 5):
            result = -result
    if n == 1:
        return result
    return result * jacobi_symbol(D % n, n)


def squarefree_part(n: int) -> int:
    """Signed squarefree kernel: n = s * k^2 with s squarefree."""
    if n == 0:
        raise ValueError("zero has no squarefree part")
    s = -1 if n < 0 else 1
    for prime, e in factorint(abs(n)).items():
        if e % 2:
            s *= prime
    return s


def fundamental_discriminant(n: int) -> int:
    """Discriminant of Q(sqrt(n)); 1 when n is a square."""
    s = squarefree_part(n)
    if s == 1:
        return 1
    return s if s % 4 == 1 else 4 * s


def is_fundamental_discriminant(D: int) -> bool:
    if D == 1:
        return True
    if D == 0:
        return False
    return fundamental_discriminant(D) == D


def ord_p(x, p: int) -> int:
    """p-adic valuation of a nonzero integer or rational."""
    x = Fraction(x)
    if x == 0:
        raise ValueError("valuation of zero")
    v = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def prime_divisors(n: int) -> set:
    n = abs(int(n))
    if n <= 1:
        return set()
    return set(factorint(n))


def sqrt_mod_prime_power(a: int, p: int, N: int) -> list:
    """All square roots of a unit a modulo p^N (p odd), by Hensel lifting."""
    if p == 2:
        raise ValueError("odd primes only")
    mod = p ** N
    a %= mod
    if a % p == 0:
        raise ValueError("not a p-adic unit")
    roots = sqrt_mod(a % p, p, all_roots=True) or []
    out = []
    for r in roots:
        x = r
        k = 1
        while k < N:
            k = min(2 * k, N)
            m = p ** k
            x = (x - (x * x - a) * pow(2 * x, -1, m)) % m
        out.append(x % mod)
    return sorted(set(out))


def lcm(*xs: int) -> int:
    out = 1
    for x in xs:
        out = out * x // gcd(out, x)
    return out
