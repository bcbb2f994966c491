"""Hypergeometric data: validation, gamma vectors, series coefficients, prime classification."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from .errors import LengthMismatch, NotCyclotomic, Overlap, ZeroArgument
from .ntheory import lcm, ord_p, parse_fraction, prime_divisors
from .poly import exact_div, pmul


def _fmt(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class HypergeometricData:
    alpha: tuple
    beta: tuple
    gammaP: tuple
    gammaQ: tuple
    M: Fraction
    lcmDen: int

    @property
    def degree(self) -> int:
        return len(self.alpha)

    def __str__(self) -> str:
        return self.serialize()

    def serialize(self) -> str:
        """Canonical text form used in reports and fixtures."""
        a = ",".join(_fmt(x) for x in self.alpha)
        b = ",".join(_fmt(x) for x in self.beta)
        return f"alpha={a};beta={b}"

    @classmethod
    def deserialize(cls, text: str) -> "HypergeometricData":
        parts = dict(piece.split("=", 1) for piece in text.split(";"))
        return parse_hypergeometric(parse_params(parts["alpha"]), parse_params(parts["beta"]))


@dataclass(frozen=True)
class SpecializationPoint:
    t: Fraction
    excludedPrimes: frozenset
    degeneratePrimes: frozenset

    def is_good(self, p: int, allow_degenerate: bool = False) -> bool:
        if p not in self.excludedPrimes:
            return True
        return allow_degenerate and p in self.degeneratePrimes


@dataclass(frozen=True)
class SeriesTruncation:
    data: HypergeometricData
    coeffs: tuple = field(default_factory=tuple)


def parse_params(spec) -> list:
    """Accepts "1/2,1/3,2/3" or an iterable of fraction-like values."""
    if isinstance(spec, str):
        spec = [s for s in spec.replace(" ", "").split(",") if s]
    return [parse_fraction(x) for x in spec]


def _cyclotomic_exponents(params, label: str) -> Counter:
    """Multiplicity of each cyclotomic polynomial Phi_n in prod (x - e^{2 pi i a})."""
    counts = Counter(params)
    by_den = {}
    for x in counts:
        by_den.setdefault(x.denominator, []).append(x)
    out = Counter()
    for n, members in by_den.items():
        mults = {counts[x] for x in members}
        full = [Fraction(k, n) if k < n else Fraction(1) for k in range(1, n + 1) if gcd(k, n) == 1]
        missing = [x for x in full if counts[x] == 0]
        if missing or len(mults) != 1:
            raise NotCyclotomic(
                f"{label}: denominator {n} packet incomplete (need all of "
                f"{', '.join(_fmt(x) for x in full)} with equal multiplicity)"
            )
        out[n] = mults.pop()
    return out


def _divisors(n: int) -> list:
    return [d for d in range(1, n + 1) if n % d == 0]


def _gamma_from_exponents(expo: Counter) -> tuple:
    e = Counter({n: k for n, k in expo.items() if k})
    P, Q = [], []
    while e:
        n = max(e)
        k = e[n]
        (P if k > 0 else Q).extend([n] * abs(k))
        for d in _divisors(n):
            e[d] -= k
            if e[d] == 0:
                del e[d]
    common = Counter(P) & Counter(Q)
    P = sorted((Counter(P) - common).elements(), reverse=True)
    Q = sorted((Counter(Q) - common).elements(), reverse=True)
    return tuple(P), tuple(Q)


def parse_hypergeometric(alphaSpec, betaSpec) -> HypergeometricData:
    alpha = parse_params(alphaSpec)
    beta = parse_params(betaSpec)
    if not alpha or len(alpha) != len(beta):
        raise LengthMismatch(f"|alpha|={len(alpha)} and |beta|={len(beta)} must be equal and positive")
    for x in alpha + beta:
        if not (0 < x <= 1):
            raise ValueError(f"parameter {x} outside (0,1]")
    if set(alpha) & set(beta):
        raise Overlap(f"alpha and beta share {sorted(set(alpha) & set(beta))}")
    ea = _cyclotomic_exponents(alpha, "alpha")
    eb = _cyclotomic_exponents(beta, "beta")
    expo = Counter(ea)
    expo.subtract(eb)
    P, Q = _gamma_from_exponents(expo)
    M = Fraction(1)
    for x in P:
        M *= Fraction(x) ** x
    for x in Q:
        M /= Fraction(x) ** x
    return HypergeometricData(
        alpha=tuple(sorted(alpha)),
        beta=tuple(sorted(beta)),
        gammaP=P,
        gammaQ=Q,
        M=M,
        lcmDen=lcm(*(x.denominator for x in alpha + beta)),
    )


def gamma_vectors(data: HypergeometricData) -> tuple:
    return list(data.gammaP), list(data.gammaQ)


def cyclotomic_polynomial(n: int) -> list:
    """Integer coefficients of Phi_n, constant first (exact division of x^n - 1)."""
    f = [-1] + [0] * (n - 1) + [1]
    for d in _divisors(n)[:-1]:
        f = exact_div(f, cyclotomic_polynomial(d))
    return [int(c) for c in f]


def root_polynomial(params) -> list:
    """prod over the multiset of (x - e^{2 pi i a}), assembled from cyclotomic factors."""
    out = [1]
    for n, k in _cyclotomic_exponents(list(params), "params").items():
        for _ in range(k):
            out = pmul(out, cyclotomic_polynomial(n))
    return out


def hypergeometric_coefficients(data: HypergeometricData, N: int) -> SeriesTruncation:
    if N < 0:
        raise ValueError("N must be nonnegative")
    A = [Fraction(1)]
    for n in range(N):
        num = Fraction(1)
        den = Fraction(1)
        for a in data.alpha:
            num *= a + n
        for b in data.beta:
            den *= b + n
        A.append(A[-1] * num / den)
    return SeriesTruncation(data=data, coeffs=tuple(A))


def hypergeometric_operator(data: HypergeometricData) -> tuple:
    """(P1, P0) as polynomials in theta with D = z*P1(theta) - P0(theta)."""
    P1 = [Fraction(1)]
    for a in data.alpha:
        P1 = pmul(P1, [a, Fraction(1)])
    P0 = [Fraction(1)]
    for b in data.beta:
        P0 = pmul(P0, [b - 1, Fraction(1)])
    return P1, P0


def _eval(poly, x):
    acc = 0
    for c in reversed(poly):
        acc = acc * x + c
    return acc


def apply_operator(data: HypergeometricData, coeffs) -> list:
    """Coefficients of D applied to sum coeffs[n] z^n, up to z^len(coeffs)."""
    P1, P0 = hypergeometric_operator(data)
    N = len(coeffs) - 1
    out = []
    for k in range(N + 2):
        val = Fraction(0)
        if 1 <= k <= N + 1:
            val += coeffs[k - 1] * _eval(P1, k - 1)
        if k <= N:
            val -= coeffs[k] * _eval(P0, k)
        out.append(val)
    return out


def ode_residual(data: HypergeometricData, N: int, coeffs=None) -> bool:
    """True iff D annihilates the truncated series through z^(N-d)."""
    if N < data.degree:
        raise ValueError("N must be at least the degree")
    if coeffs is None:
        coeffs = hypergeometric_coefficients(data, N).coeffs
    res = apply_operator(data, list(coeffs)[: N + 1])
    return all(r == 0 for r in res[: N - data.degree + 1])


def classify_primes(data: HypergeometricData, t) -> SpecializationPoint:
    t = parse_fraction(t)
    if t == 0:
        raise ZeroArgument("specialization point must be nonzero")
    u = t - 1
    bad = set(prime_divisors(data.lcmDen))
    for x in (data.M, t):
        bad |= prime_divisors(x.numerator) | prime_divisors(x.denominator)
    if u != 0:
        bad |= prime_divisors(u.numerator) | prime_divisors(u.denominator)
    degenerate = set()
    if u != 0:
        degenerate = {p for p in prime_divisors(u.numerator) if ord_p(u, p) >= 2}
    return SpecializationPoint(t=t, excludedPrimes=frozenset(bad), degeneratePrimes=frozenset(degenerate))
