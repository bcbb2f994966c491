"""Finite fields F_q, discrete logarithms, additive characters and Gauss-sum tables.

Two Gauss-sum backends share one indexing contract, g(m) for m modulo q-1:

* ``gauss_table``: high-precision complex values (naive summation or a
  Bluestein chirp transform carried out in fixed point).
* ``modular_gauss_table``: exact images of the Gauss sums in F_ell for a
  prime ell = 1 mod lcm(2(q-1), p), via the same chirp transform.  Integer
  results bounded by B are recovered exactly once ell > 2B.
"""
from __future__ import annotations

import logging
import random
from collections import OrderedDict
from dataclasses import dataclass, field
from math import ceil, isqrt, log2

import gmpy2
import mpmath
import numpy as np
from sympy import primitive_root
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_irreducible_p, gf_pow_mod

from .convolve import convolve_mod, convolve_signed
from .errors import NotPrime, PrecisionTooLow, TooLarge
from .ntheory import factorint, isprime, lcm

log = logging.getLogger(__name__)

DEFAULT_SIZE_CAP = 2 ** 23


@dataclass(frozen=True, eq=False)
class FieldContext:
    p: int
    f: int
    q: int
    modulus: tuple  # monic, constant term first; (0, 1) style for f = 1
    generator: int  # encoded element sum a_i p^i
    seed: int
    encodings: np.ndarray = field(repr=False)  # encodings[k] = code of generator^k
    traces: np.ndarray = field(repr=False)  # traces[k] = Tr(generator^k) in [0, p)
    logTable: np.ndarray = field(repr=False)  # code -> discrete log, -1 at zero
    traceTable: np.ndarray = field(repr=False)  # code -> trace

    @property
    def n(self) -> int:
        return self.q - 1

    def log(self, code: int) -> int:
        k = int(self.logTable[code])
        if k < 0:
            raise ValueError("log of zero")
        return k

    def log_rational(self, t) -> int:
        """Discrete log of a p-integral rational with nonzero reduction (it lies in F_p)."""
        from fractions import Fraction

        t = Fraction(t)
        r = t.numerator * pow(t.denominator, -1, self.p) % self.p
        if r == 0:
            raise ValueError("argument reduces to zero")
        return self.log(r)

    def trace(self, code: int) -> int:
        return int(self.traceTable[code])

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self.encodings[(self.log(a) + self.log(b)) % self.n])

    def describe(self) -> dict:
        return {"p": self.p, "f": self.f, "q": self.q, "modulus": list(self.modulus),
                "generator": self.generator, "seed": self.seed}


def _is_primitive_poly(coeffs_high: list, p: int, n: int) -> bool:
    if not gf_irreducible_p(coeffs_high, p, ZZ):
        return False
    x = [1, 0]
    if gf_pow_mod(x, n, coeffs_high, p, ZZ) != [1]:
        return False
    for r in factorint(n):
        if gf_pow_mod(x, n // r, coeffs_high, p, ZZ) == [1]:
            return False
    return True


def _powers_matrix(mod_low: list, p: int, f: int, n: int) -> np.ndarray:
    """Coordinates of x^0..x^(n-1) modulo the monic polynomial, shape (n, f)."""
    C = np.zeros((f, f), dtype=np.int64)
    for j in range(f - 1):
        C[j + 1, j] = 1
    for i in range(f):
        C[i, f - 1] = (-mod_low[i]) % p
    block = min(n, 2048)
    V0 = np.zeros((f, block), dtype=np.int64)
    v = np.zeros(f, dtype=np.int64)
    v[0] = 1
    for k in range(block):
        V0[:, k] = v
        v = (C @ v) % p
    # C^block by squaring
    CB = np.eye(f, dtype=np.int64)
    base, e = C.copy(), block
    while e:
        if e & 1:
            CB = (CB @ base) % p
        base = (base @ base) % p
        e >>= 1
    out = np.empty((n, f), dtype=np.int64)
    V = V0
    for start in range(0, n, block):
        stop = min(n, start + block)
        out[start:stop] = V[:, : stop - start].T
        V = (CB @ V) % p
    return out


def _newton_traces(mod_low: list, p: int, f: int) -> list:
    """Tr(x^i) for i < f: power sums of the roots of the monic modulus."""
    a = mod_low  # x^f + a_{f-1} x^{f-1} + ... + a_0
    s = [f % p]
    for k in range(1, f):
        acc = k * a[f - k]
        for i in range(1, k):
            acc += a[f - i] * s[k - i]
        s.append((-acc) % p)
    return s


_FIELD_CACHE: "OrderedDict[tuple, FieldContext]" = OrderedDict()


def build_field(p: int, f: int = 1, seed: int = 0, size_cap: int = DEFAULT_SIZE_CAP) -> FieldContext:
    """Build F_{p^f} with a primitive modulus found by seeded random search."""
    if not isprime(p):
        raise NotPrime(f"{p} is not prime")
    if f < 1:
        raise ValueError("degree must be positive")
    q = p ** f
    if q > size_cap:
        raise TooLarge(f"q={q} exceeds the size cap {size_cap}")
    key = (p, f, seed)
    if key in _FIELD_CACHE:
        _FIELD_CACHE.move_to_end(key)
        return _FIELD_CACHE[key]
    n = q - 1
    rng = random.Random(seed)
    if f == 1:
        if seed == 0:
            g = int(primitive_root(p)) if p > 2 else 1
        else:
            while True:
                g = rng.randrange(1, p)
                if p == 2 or all(pow(g, n // r, p) != 1 for r in factorint(n)):
                    break
        mod_low = [(-g) % p]
        powers = np.empty((n, 1), dtype=np.int64)
        acc = 1
        for k in range(n):
            powers[k, 0] = acc
            acc = acc * g % p
        trbasis = [1]
        generator = g
    else:
        while True:
            mod_low = [rng.randrange(1, p)] + [rng.randrange(p) for _ in range(f - 1)]
            if _is_primitive_poly([1] + mod_low[::-1], p, n):
                break
        powers = _powers_matrix(mod_low, p, f, n)
        trbasis = _newton_traces(mod_low, p, f)
        generator = p  # the class of x
    weights = np.array([p ** i for i in range(f)], dtype=np.int64)
    enc = powers @ weights
    traces = (powers @ np.array(trbasis, dtype=np.int64)) % p
    logt = np.full(q, -1, dtype=np.int64)
    logt[enc] = np.arange(n, dtype=np.int64)
    if int((logt >= 0).sum()) != n:
        raise RuntimeError("generator does not have full order")
    trt = np.zeros(q, dtype=np.int64)
    trt[enc] = traces
    ctx = FieldContext(p=p, f=f, q=q, modulus=tuple(mod_low) + (1,), generator=int(generator), seed=seed,
                       encodings=enc, traces=traces, logTable=logt, traceTable=trt)
    _FIELD_CACHE[key] = ctx
    while len(_FIELD_CACHE) > 64:
        _FIELD_CACHE.popitem(last=False)
    log.debug("built field q=%d modulus=%s", q, ctx.modulus)
    return ctx


# ---------------------------------------------------------------- modular backend

@dataclass(frozen=True, eq=False)
class ModularGaussTable:
    ctx: FieldContext
    ell: int
    zeta_n: int  # image of e^{2 pi i/(q-1)}
    values: list = field(repr=False)  # values[m] = image of g(m)

    def __call__(self, m: int) -> int:
        return self.values[m % self.ctx.n]


def _find_prime(L: int, bits: int) -> int:
    k = (1 << bits) // L + 1
    while True:
        ell = k * L + 1
        if gmpy2.is_prime(ell, 30):
            return ell
        k += 1


def _root_of_unity(L: int, ell: int) -> int:
    primes = list(factorint(L))
    a = 2
    while True:
        u = pow(a, (ell - 1) // L, ell)
        if all(pow(u, L // r, ell) != 1 for r in primes):
            return u
        a += 1


def _modular_values(ctx: FieldContext, ell: int, u: int, L: int, method: str) -> list:
    n, p = ctx.n, ctx.p
    zp = pow(u, L // p, ell)
    psi = [1] * p
    for t in range(1, p):
        psi[t] = psi[t - 1] * zp % ell
    tr = ctx.traces.tolist()
    c = [psi[t] for t in tr]
    if method == "naive":
        zn = pow(u, L // n, ell)
        zpow = [1] * n
        for e in range(1, n):
            zpow[e] = zpow[e - 1] * zn % ell
        return [sum(c[k] * zpow[(k * m) % n] for k in range(n)) % ell for m in range(n)]
    # Bluestein: km = (k^2 + m^2 - (m-k)^2)/2 with w of order 2n
    w = pow(u, L // (2 * n), ell)
    two_n = 2 * n
    W = [1] * two_n
    for e in range(1, two_n):
        W[e] = W[e - 1] * w % ell
    A = [c[k] * W[(k * k) % two_n] % ell for k in range(n)]
    B = [W[(-(j * j)) % two_n] for j in range(-(n - 1), n)]
    conv = convolve_mod(A, B, ell)
    return [W[(m * m) % two_n] * conv[m + n - 1] % ell for m in range(n)]


_MOD_CACHE: "OrderedDict[tuple, ModularGaussTable]" = OrderedDict()
_MOD_CACHE_BUDGET = 3_000_000  # total table entries kept alive


def modular_gauss_table(ctx: FieldContext, bits: int, method: str = "dft") -> ModularGaussTable:
    """Gauss sums modulo a prime ell > 2^bits; cached per field and reused for smaller requests."""
    key = (ctx.p, ctx.f, ctx.seed, method)
    for k, tab in list(_MOD_CACHE.items()):
        if k[:4] == key and tab.ell.bit_length() > bits and tab.ctx is ctx:
            _MOD_CACHE.move_to_end(k)
            return tab
    bits = 64 * ceil((bits + 1) / 64)
    n = ctx.n
    L = lcm(2 * n, ctx.p)
    ell = _find_prime(L, bits)
    u = _root_of_unity(L, ell)
    values = _modular_values(ctx, ell, u, L, method)
    tab = ModularGaussTable(ctx=ctx, ell=ell, zeta_n=pow(u, L // n, ell), values=values)
    _MOD_CACHE[key + (bits,)] = tab
    total = sum(t.ctx.n for t in _MOD_CACHE.values())
    while total > _MOD_CACHE_BUDGET and len(_MOD_CACHE) > 1:
        _, old = _MOD_CACHE.popitem(last=False)
        total -= old.ctx.n
    return tab


def clear_caches() -> None:
    _FIELD_CACHE.clear()
    _MOD_CACHE.clear()


# ---------------------------------------------------------------- complex backend

@dataclass(frozen=True, eq=False)
class GaussTable:
    """g(m) = sum_x omega(x)^m psi_q(x) as fixed-point Gaussian integers re/im scaled by 2^scale."""
    ctx: FieldContext
    precisionBits: int
    method: str
    scale: int
    re: list = field(repr=False)
    im: list = field(repr=False)

    def value(self, m: int):
        m %= self.ctx.n
        with mpmath.workprec(self.scale + 16):
            return mpmath.mpc(mpmath.ldexp(self.re[m], -self.scale), mpmath.ldexp(self.im[m], -self.scale))

    @property
    def values(self) -> list:
        return [self.value(m) for m in range(self.ctx.n)]

    def __call__(self, m: int):
        return self.value(m)


def _fixed_unit(num: int, den: int, bits: int) -> tuple:
    """Fixed-point (cos, sin) of 2 pi num/den scaled by 2^bits."""
    with mpmath.workprec(bits + 32):
        x = mpmath.mpf(2 * num) / den
        return (int(mpmath.nint(mpmath.ldexp(mpmath.cospi(x), bits))),
                int(mpmath.nint(mpmath.ldexp(mpmath.sinpi(x), bits))))


def _round_shift(x: int, s: int) -> int:
    return (x + (1 << (s - 1))) >> s if s > 0 else x


def _cmul(a: tuple, b: tuple, s: int) -> tuple:
    ar, ai = a
    br, bi = b
    return _round_shift(ar * br - ai * bi, s), _round_shift(ar * bi + ai * br, s)


def _chirp_table(n2: int, bits: int) -> list:
    """(cos, sin) fixed point of e^{2 pi i e/n2} for every e, via baby-step/giant-step products."""
    step = isqrt(n2) + 1
    guard = bits + 12
    baby = [_fixed_unit(e, n2, guard) for e in range(step)]
    giant = [_fixed_unit(a * step, n2, guard) for a in range(n2 // step + 1)]
    out = []
    for e in range(n2):
        a, b = divmod(e, step)
        r, i = _cmul(giant[a], baby[b], guard)
        out.append((_round_shift(r, 12), _round_shift(i, 12)))
    return out


def gauss_table(ctx: FieldContext, precisionBits: int = 192, method: str = "dft") -> GaussTable:
    if precisionBits < 64:
        raise PrecisionTooLow(f"precisionBits={precisionBits} < 64")
    n, p = ctx.n, ctx.p
    tr = ctx.traces.tolist()
    B = precisionBits + ceil(log2(max(n, 2))) + 8
    psi = [_fixed_unit(t, p, B) for t in range(p)]
    if method == "naive":
        zeta = [_fixed_unit(e, n, B) for e in range(n)]
        re, im = [], []
        for m in range(n):
            sr = si = 0
            for k in range(n):
                zr, zi = zeta[(k * m) % n]
                cr, ci = psi[tr[k]]
                sr += cr * zr - ci * zi
                si += cr * zi + ci * zr
            re.append(_round_shift(sr, B))
            im.append(_round_shift(si, B))
        return GaussTable(ctx, precisionBits, method, B, re, im)
    if method != "dft":
        raise ValueError(f"unknown method {method}")
    two_n = 2 * n
    W = _chirp_table(two_n, B)
    A = [_cmul(psi[tr[k]], W[(k * k) % two_n], B) for k in range(n)]
    Bs = []
    for j in range(-(n - 1), n):
        r, i = W[(j * j) % two_n]
        Bs.append((r, -i))
    ar = [x[0] for x in A]
    ai = [x[1] for x in A]
    br = [x[0] for x in Bs]
    bi = [x[1] for x in Bs]
    lim = 1 << (B + 1)
    t1 = convolve_signed(ar, br, lim, lim)
    t2 = convolve_signed(ai, bi, lim, lim)
    t3 = convolve_signed([x + y for x, y in zip(ar, ai)], [x + y for x, y in zip(br, bi)], 2 * lim, 2 * lim)
    re, im = [], []
    for m in range(n):
        idx = m + n - 1
        cr = t1[idx] - t2[idx]
        ci = t3[idx] - t1[idx] - t2[idx]
        r, i = _cmul((cr, ci), W[(m * m) % two_n], B)
        re.append(_round_shift(r, B))
        im.append(_round_shift(i, B))
    return GaussTable(ctx, precisionBits, method, B, re, im)
