"""Finite-field hypergeometric sums and local Euler factors assembled from them."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, comb, gcd, isqrt, log2

import mpmath

from .core import HypergeometricData, classify_primes
from .errors import (BadPrime, DenominatorUnresolved, DivisibilityFails, NonIntegral, RoundingGap,
                     TooLarge, WeilFail, Ambiguous)
from .ffield import (DEFAULT_SIZE_CAP, FieldContext, _chirp_table, _cmul, build_field,
                     gauss_table, modular_gauss_table)
from .ntheory import factorint, kronecker, ord_p, parse_fraction
from .poly import (exp_log_series, format_poly, pmul, power_sums_to_coeffs)

log = logging.getLogger(__name__)

ROUNDING_GAP = 0.01


@dataclass(frozen=True)
class LocalEulerFactor:
    p: int
    coeffs: tuple
    weight: int
    provenance: str = "direct"  # direct | selfdual-completed | fixture | asai
    flags: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if not self.coeffs or self.coeffs[0] != 1:
            raise ValueError("local factor must have constant term 1")

    @property
    def degree(self) -> int:
        c = list(self.coeffs)
        while len(c) > 1 and c[-1] == 0:
            c.pop()
        return len(c) - 1

    def __str__(self) -> str:
        return format_poly(self.coeffs)

    def to_dict(self) -> dict:
        return {"p": self.p, "coeffs": list(self.coeffs), "weight": self.weight,
                "provenance": self.provenance, "flags": sorted(self.flags)}


@dataclass(frozen=True)
class TraceSequence:
    data: HypergeometricData
    t: Fraction
    p: int
    values: tuple

    def to_dict(self) -> dict:
        return {"alpha": [str(a) for a in self.data.alpha], "beta": [str(b) for b in self.data.beta],
                "t": str(self.t), "p": self.p, "H": [str(v) for v in self.values]}


# ---------------------------------------------------------------- helpers

def _divisors(n: int) -> list:
    ds = [1]
    for prime, e in factorint(n).items():
        ds = [d * prime ** k for d in ds for k in range(e + 1)]
    return sorted(ds)


def _totient(n: int) -> int:
    out = n
    for prime in factorint(n):
        out = out // prime * (prime - 1)
    return out


def _s_by_order(data: HypergeometricData, o: int) -> int:
    """Multiplicity of a primitive o-th root of unity in gcd(prod(x^p-1), prod(x^q-1))."""
    a = sum(1 for x in data.gammaP if x % o == 0)
    b = sum(1 for x in data.gammaQ if x % o == 0)
    return min(a, b)


def s_function(data: HypergeometricData, m: int, n: int) -> int:
    return _s_by_order(data, n // gcd(m, n))


def _general_argument(data: HypergeometricData, t: Fraction) -> Fraction:
    eps = -1 if sum(data.gammaQ) % 2 else 1
    return eps * t / data.M


def _general_bound(data: HypergeometricData, q: int) -> int:
    """Upper bound for |sum_m q^{s(m)} prod g(p_j m) prod g(-q_j m)|."""
    n = q - 1
    root = isqrt(q) + 1
    total = 0
    for o in _divisors(n):
        nz = sum(1 for x in data.gammaP if x % o) + sum(1 for x in data.gammaQ if x % o)
        total += _totient(o) * q ** _s_by_order(data, o) * root ** nz
    return total


def _symmetric(x: int, ell: int) -> int:
    x %= ell
    return x - ell if x > ell // 2 else x


def basic_applicable(data: HypergeometricData, q: int) -> bool:
    return all((x * (q - 1)).denominator == 1 for x in data.alpha + data.beta)


def _check_field(data: HypergeometricData, t: Fraction, ctx: FieldContext) -> None:
    if data.lcmDen % ctx.p == 0:
        raise DivisibilityFails(f"q={ctx.q} is not coprime to the denominators")
    if t.denominator % ctx.p == 0 or t.numerator % ctx.p == 0:
        raise ValueError(f"t={t} does not reduce to a unit modulo {ctx.p}")


def default_precision(data: HypergeometricData, q: int, weight: int | None = None) -> int:
    w = data.degree - 1 if weight is None else weight
    return max(192, ceil(data.degree * w / 2 * log2(q)) + 64)


# ---------------------------------------------------------------- modular evaluation

def _hq_basic_modular(data, t, ctx) -> Fraction:
    n, q = ctx.n, ctx.q
    d = data.degree
    a = [int(x * n) % n for x in data.alpha]
    b = [int(x * n) % n for x in data.beta]
    nz0 = sum(1 for x in a if x) + sum(1 for x in b if x)
    bound = n * (isqrt(q) + 1) ** (2 * d - nz0)
    kmax = d
    tab = modular_gauss_table(ctx, (2 * bound * q ** kmax).bit_length() + 8)
    ell, g = tab.ell, tab.values
    z = pow(tab.zeta_n, ctx.log_rational((-1) ** d * t), ell)
    D0 = 1
    for j in range(d):
        D0 = D0 * g[a[j]] % ell * g[-b[j] % n] % ell
    S = 0
    c = 1
    for m in range(n):
        term = c
        for j in range(d):
            term = term * g[(m + a[j]) % n] % ell * g[(-m - b[j]) % n] % ell
        S += term
        c = c * z % ell
    S = S % ell * pow(D0, -1, ell) % ell
    for k in range(kmax + 1):
        y = _symmetric(S * pow(q, k, ell), ell)
        if abs(y) <= bound * q ** k:
            return Fraction(y, (1 - q) * q ** k)
    raise RoundingGap("modular reconstruction of the basic sum failed")


def _hq_general_modular(data, t, ctx) -> tuple:
    """Returns (Y, s0) with H = (-1)^{r+s} Y / ((1-q) q^{s0})."""
    n, q = ctx.n, ctx.q
    bound = _general_bound(data, q)
    tab = modular_gauss_table(ctx, (2 * bound).bit_length() + 8)
    ell, g = tab.ell, tab.values
    z = pow(tab.zeta_n, ctx.log_rational(_general_argument(data, t)), ell)
    P = {}
    for x in data.gammaP:
        P[x] = P.get(x, 0) + 1
    Q = {}
    for x in data.gammaQ:
        Q[x] = Q.get(x, 0) + 1
    qpow = {}
    s_cache = {}
    Y = 0
    c = 1
    for m in range(n):
        o = n // gcd(m, n)
        s = s_cache.get(o)
        if s is None:
            s = s_cache[o] = _s_by_order(data, o)
            qpow[s] = pow(q, s, ell)
        term = c * qpow[s] % ell
        for x, k in P.items():
            v = g[(x * m) % n]
            term = term * (v if k == 1 else pow(v, k, ell)) % ell
        for x, k in Q.items():
            v = g[(-x * m) % n]
            term = term * (v if k == 1 else pow(v, k, ell)) % ell
        Y += term
        c = c * z % ell
    Y = _symmetric(Y, ell)
    if abs(Y) > bound:
        raise RoundingGap("modular value exceeds the a priori bound")
    return Y, _s_by_order(data, 1)


# ---------------------------------------------------------------- complex evaluation

def _fixed_to_mpc(x: tuple, scale: int):
    return mpmath.mpc(mpmath.ldexp(x[0], -scale), mpmath.ldexp(x[1], -scale))


def _hq_general_complex(data, t, ctx, precisionBits: int):
    n, q = ctx.n, ctx.q
    tab = gauss_table(ctx, precisionBits, "dft")
    B = tab.scale
    g = list(zip(tab.re, tab.im))
    zeta = _chirp_table(n, B)
    L = ctx.log_rational(_general_argument(data, t))
    acc_r = acc_i = 0
    for m in range(n):
        term = zeta[(L * m) % n]
        for x in data.gammaP:
            term = _cmul(term, g[(x * m) % n], B)
        for x in data.gammaQ:
            term = _cmul(term, g[(-x * m) % n], B)
        k = q ** s_function(data, m, n)
        acc_r += term[0] * k
        acc_i += term[1] * k
    sign = (-1) ** (len(data.gammaP) + len(data.gammaQ))
    s0 = _s_by_order(data, 1)
    with mpmath.workprec(B + 64):
        Y = sign * _fixed_to_mpc((acc_r, acc_i), B)
        return Y / ((1 - q) * mpmath.mpf(q) ** s0), s0


def _hq_basic_complex(data, t, ctx, precisionBits: int):
    n, q = ctx.n, ctx.q
    d = data.degree
    a = [int(x * n) % n for x in data.alpha]
    b = [int(x * n) % n for x in data.beta]
    tab = gauss_table(ctx, precisionBits, "dft")
    B = tab.scale
    g = list(zip(tab.re, tab.im))
    zeta = _chirp_table(n, B)
    L = ctx.log_rational((-1) ** d * t)
    acc_r = acc_i = 0
    for m in range(n):
        term = zeta[(L * m) % n]
        for j in range(d):
            term = _cmul(term, g[(m + a[j]) % n], B)
            term = _cmul(term, g[(-m - b[j]) % n], B)
        acc_r += term[0]
        acc_i += term[1]
    with mpmath.workprec(B + 64):
        D0 = mpmath.mpc(1)
        for j in range(d):
            D0 *= _fixed_to_mpc(g[a[j]], B) * _fixed_to_mpc(g[-b[j] % n], B)
        return _fixed_to_mpc((acc_r, acc_i), B) / D0 / (1 - q)


def _round_value(val, q: int, s0: int, gaps: list):
    """Round a complex approximation to an integer, else to a fraction with denominator q^k."""
    re = val.real
    k = 0
    while True:
        x = re * mpmath.mpf(q) ** k
        r = int(mpmath.nint(x))
        gap = float(abs(val.imag) * mpmath.mpf(q) ** k + abs(x - r))
        if k == 0:
            gaps.append(gap)
        if gap < ROUNDING_GAP:
            return Fraction(r, q ** k)
        k += 1
        if k > s0:
            return None


# ---------------------------------------------------------------- public sums

def _normalize(value: Fraction):
    return int(value) if value.denominator == 1 else value


def hq_basic(data: HypergeometricData, t, ctx: FieldContext, backend: str = "modular",
             precisionBits: int | None = None, report: dict | None = None):
    """The direct Gauss-sum definition, valid when alpha(q-1), beta(q-1) are integers."""
    t = parse_fraction(t)
    _check_field(data, t, ctx)
    if not basic_applicable(data, ctx.q):
        raise DivisibilityFails(f"q-1={ctx.q - 1} is not divisible by every denominator")
    if backend == "modular":
        val = _hq_basic_modular(data, t, ctx)
        if report is not None:
            report.update(backend="modular", gap=0.0)
        return _normalize(val)
    prec = precisionBits or default_precision(data, ctx.q)
    gaps = []
    for _ in range(4):
        approx = _hq_basic_complex(data, t, ctx, prec)
        val = _round_value(approx, ctx.q, 0, gaps)
        if val is not None:
            if report is not None:
                report.update(backend="complex", gap=gaps[-1], precisionBits=prec)
            return _normalize(val)
        prec *= 2
    raise RoundingGap(f"rounding gap {gaps[-1]:.3g} after precision retries")


def hq_general(data: HypergeometricData, t, ctx: FieldContext, backend: str = "modular",
               precisionBits: int | None = None, report: dict | None = None):
    """Gamma-vector form of the sum, valid for every q coprime to the denominators."""
    t = parse_fraction(t)
    _check_field(data, t, ctx)
    q = ctx.q
    sign = (-1) ** (len(data.gammaP) + len(data.gammaQ))
    if backend == "modular":
        Y, s0 = _hq_general_modular(data, t, ctx)
        val = Fraction(sign * Y, (1 - q) * q ** s0)
        if report is not None:
            report.update(backend="modular", gap=0.0, s0=s0)
    else:
        prec = precisionBits or default_precision(data, q)
        gaps = []
        val = None
        s0 = _s_by_order(data, 1)
        for _ in range(4):
            approx, s0 = _hq_general_complex(data, t, ctx, prec)
            val = _round_value(approx, q, 0, gaps)
            if val is not None:
                break
            prec *= 2
        if val is None:
            val = _round_value(approx, q, s0, gaps)
        if val is None:
            raise DenominatorUnresolved(f"value not integral nor with denominator dividing q^{s0}")
        if report is not None:
            report.update(backend="complex", gap=gaps[-1], precisionBits=prec, s0=s0)
    if val.denominator != 1:
        den = val.denominator
        while den % ctx.p == 0:
            den //= ctx.p
        if den != 1:
            raise DenominatorUnresolved(f"H_q={val} has denominator outside powers of q")
        log.warning("non-integral H_%d = %s", q, val)
    return _normalize(val)


# ---------------------------------------------------------------- local factors

def _require_prime(data, t, p, allow_degenerate: bool):
    spec = classify_primes(data, t)
    if not spec.is_good(p, allow_degenerate):
        kind = "degenerate" if p in spec.degeneratePrimes else "bad"
        raise BadPrime(f"p={p} is {kind} for t={t}")
    return spec


def trace_sequence(data: HypergeometricData, t, p: int, rmax: int, allow_degenerate: bool = False,
                   seed: int = 0, size_cap: int = DEFAULT_SIZE_CAP, backend: str = "modular") -> TraceSequence:
    t = parse_fraction(t)
    _require_prime(data, t, p, allow_degenerate)
    if p ** rmax > size_cap:
        raise TooLarge(f"p^{rmax} exceeds the size cap")
    vals = []
    for r in range(1, rmax + 1):
        ctx = build_field(p, r, seed=seed, size_cap=size_cap)
        vals.append(hq_general(data, t, ctx, backend=backend))
    return TraceSequence(data=data, t=t, p=p, values=tuple(vals))


def weil_integrality_check(factor: LocalEulerFactor) -> dict:
    """Integrality, coefficient bounds and root moduli |rho| = p^{w/2}."""
    if factor.provenance == "fixture" or "degenerate" in factor.flags:
        return {"status": "skipped", "reason": "bad or degenerate factor", "pass": True}
    c = list(factor.coeffs)
    d = len(c) - 1
    while d > 0 and c[d] == 0:
        d -= 1
    p, w = factor.p, factor.weight
    detail = {"integral": all(Fraction(x).denominator == 1 for x in c)}
    detail["bounds"] = all(abs(c[i]) <= comb(d, i) * p ** (w * i / 2) * (1 + 1e-12) for i in range(d + 1))
    if d == 0:
        detail["roots"] = True
    else:
        with mpmath.workdps(60):
            scale = mpmath.sqrt(mpmath.mpf(p)) ** w
            # reciprocal roots of L are the roots of T^d L(1/T)
            coeffs = [mpmath.mpf(int(c[i])) / scale ** i for i in range(d + 1)]
            try:
                roots = mpmath.polyroots(coeffs, maxsteps=400, extraprec=400)
            except mpmath.libmp.NoConvergence:
                roots = [complex(r) for r in __import__("numpy").roots([float(x) for x in coeffs])]
            detail["max_modulus_error"] = float(max(abs(abs(r) - 1) for r in roots))
            detail["roots"] = detail["max_modulus_error"] < 1e-6
    detail["pass"] = detail["integral"] and detail["bounds"] and detail["roots"]
    detail["status"] = "pass" if detail["pass"] else "fail"
    return detail


def _finish_factor(p, coeffs, weight, provenance, flags, check: bool) -> LocalEulerFactor:
    if not all(Fraction(x).denominator == 1 for x in coeffs):
        raise NonIntegral(f"non-integral coefficients at p={p}: {coeffs}")
    fac = LocalEulerFactor(p=p, coeffs=tuple(int(x) for x in coeffs), weight=weight,
                           provenance=provenance, flags=frozenset(flags))
    if check and "degenerate" not in flags:
        rep = weil_integrality_check(fac)
        if not rep["pass"]:
            raise WeilFail(f"p={p}: {rep}")
    return fac


def local_factor_direct(data: HypergeometricData, t, p: int, weight: int | None = None,
                        allow_degenerate: bool = False, seed: int = 0,
                        size_cap: int = DEFAULT_SIZE_CAP) -> LocalEulerFactor:
    """Degree-d factor from H_{p^r}, r = 1..d, via Newton's identities."""
    t = parse_fraction(t)
    w = data.degree - 1 if weight is None else weight
    spec = _require_prime(data, t, p, allow_degenerate)
    d = data.degree
    seq = trace_sequence(data, t, p, d, allow_degenerate=allow_degenerate, seed=seed, size_cap=size_cap)
    coeffs = power_sums_to_coeffs(list(seq.values))
    if exp_log_series(list(seq.values), d) != coeffs:
        raise NonIntegral("exp-log round trip failed")
    flags = set()
    if p in spec.excludedPrimes:
        flags.add("degenerate")
        coeffs, extra = degenerate_completion(data, t, p, coeffs, w)
        if extra:
            flags.add("completed")
    return _finish_factor(p, coeffs, w, "direct", flags, check=True)


def _selfdual_fill(known: list, d: int, w: int, p: int, eta: int):
    """Fill c_0..c_d from c_0..c_k with c_{d-i} = eta p^{w(d/2-i)} c_i; None if inconsistent."""
    k = len(known) - 1
    out = [None] * (d + 1)
    for i in range(min(k, d) + 1):
        out[i] = Fraction(known[i])
    for i in range(d + 1):
        j = d - i
        e2 = w * (d - 2 * i)  # twice the exponent of p
        if e2 % 2:
            return None
        fac = Fraction(p) ** (e2 // 2)
        if out[i] is not None:
            val = eta * fac * out[i]
            if out[j] is None:
                out[j] = val
            elif out[j] != val:
                return None
    if any(x is None for x in out):
        return None
    return out


def local_factor_selfdual(data: HypergeometricData, t, p: int, rmax: int, weight: int | None = None,
                          require_unique: bool = False, seed: int = 0,
                          size_cap: int = DEFAULT_SIZE_CAP) -> LocalEulerFactor:
    """Degree-d factor from traces r <= rmax plus the self-duality c_{d-i} = eta p^{w(d/2-i)} c_i."""
    t = parse_fraction(t)
    d = data.degree
    w = d - 1 if weight is None else weight
    if 2 * rmax < d:
        raise ValueError("rmax must be at least ceil(degree/2)")
    _require_prime(data, t, p, False)
    rmax = min(rmax, d)
    seq = trace_sequence(data, t, p, rmax, seed=seed, size_cap=size_cap)
    known = power_sums_to_coeffs(list(seq.values))
    survivors = []
    for eta in (1, -1):
        filled = _selfdual_fill(known, d, w, p, eta)
        if filled is None or not all(x.denominator == 1 for x in filled):
            continue
        cand = LocalEulerFactor(p=p, coeffs=tuple(int(x) for x in filled), weight=w,
                                provenance="selfdual-completed")
        if weil_integrality_check(cand)["pass"]:
            survivors.append(cand)
    if not survivors:
        raise WeilFail(f"no self-dual completion at p={p} passes integrality and Weil checks")
    if len(survivors) == 2 and survivors[0].coeffs != survivors[1].coeffs:
        if require_unique:
            raise Ambiguous(f"both signs consistent at p={p}")
        return LocalEulerFactor(p=p, coeffs=survivors[0].coeffs, weight=w,
                                provenance="selfdual-completed", flags=frozenset({"provisional"}))
    return survivors[0]


def degenerate_completion(data: HypergeometricData, t, p: int, coeffs: list, weight: int):
    """Restore the linear factor lost at a prime with v_p(t-1) >= 2.

    The sums see only a degree d-1 piece Q. When d is odd and v_p(1-t) is even, the
    missing factor is 1 - s p^{w/2} T, and s follows from the determinant character
    chi_{1-t} of the whole motive: det = s * det(Q), det(Q) = eta_Q p^{w(d-1)/2}.
    Returns (coefficients, whether a factor was appended).
    """
    t = parse_fraction(t)
    d = data.degree
    c = [Fraction(x) for x in coeffs]
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    u = 1 - t
    v = ord_p(u, p)
    if d % 2 == 0 or weight % 2 or v < 2 or v % 2 or len(c) - 1 != d - 1:
        return [int(x) if x.denominator == 1 else x for x in c], False
    unit = u / Fraction(p) ** v
    chi = kronecker(unit.numerator * unit.denominator, p)
    eta_q = c[-1] / Fraction(p) ** (weight * (d - 1) // 2)
    if abs(eta_q) != 1:
        return [int(x) if x.denominator == 1 else x for x in c], False
    s = int(chi * eta_q)
    full = pmul(c, [1, -s * p ** (weight // 2)])
    return [int(x) if x.denominator == 1 else x for x in full], True
