"""Integer and rational polynomials as coefficient lists, constant term first."""
from __future__ import annotations

from fractions import Fraction


def trim(a: list) -> list:
    a = list(a)
    while len(a) > 1 and a[-1] == 0:
        a.pop()
    return a


def pmul(a: list, b: list) -> list:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def pprod(polys) -> list:
    out = [1]
    for f in polys:
        out = pmul(out, f)
    return out


def padd(a: list, b: list) -> list:
    n = max(len(a), len(b))
    return trim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])


def pscale_var(a: list, c) -> list:
    """f(T) -> f(c*T)."""
    out = []
    cp = 1
    for x in a:
        out.append(x * cp)
        cp *= c
    return out


def pdivmod(a: list, b: list):
    """Long division over the rationals; returns (quotient, remainder)."""
    a = [Fraction(x) for x in trim(a)]
    b = [Fraction(x) for x in trim(b)]
    if b == [0]:
        raise ZeroDivisionError("polynomial division by zero")
    if len(a) < len(b):
        return [Fraction(0)], a
    q = [Fraction(0)] * (len(a) - len(b) + 1)
    r = a[:]
    lead = b[-1]
    for k in range(len(q) - 1, -1, -1):
        c = r[k + len(b) - 1] / lead
        q[k] = c
        if c:
            for j, y in enumerate(b):
                r[k + j] -= c * y
    return trim(q), trim(r[: len(b) - 1] or [Fraction(0)])


def exact_div(a: list, b: list):
    """Exact quotient a/b or None when b does not divide a (integer output when possible)."""
    q, r = pdivmod(a, b)
    if any(x != 0 for x in r):
        return None
    return [int(x) if x.denominator == 1 else x for x in q]


def power_sums_to_coeffs(sums: list, degree: int | None = None) -> list:
    """Newton identities: p_1..p_n of reciprocal roots -> 1 - e1 T + e2 T^2 - ..."""
    n = len(sums) if degree is None else degree
    e = [Fraction(1)]
    for k in range(1, n + 1):
        acc = Fraction(0)
        for i in range(1, k + 1):
            acc += (-1) ** (i - 1) * e[k - i] * Fraction(sums[i - 1])
        e.append(acc / k)
    return [(-1) ** k * e[k] for k in range(n + 1)]


def coeffs_to_power_sums(coeffs: list, count: int) -> list:
    """Power sums of the reciprocal roots of 1 + c1 T + ... + cd T^d."""
    c = [Fraction(x) for x in coeffs]
    d = len(c) - 1
    sums = []
    for k in range(1, count + 1):
        # log-derivative recursion for L(T) = prod (1 - rho T)
        acc = -k * (c[k] if k <= d else 0)
        for i in range(1, k):
            if k - i <= d:
                acc -= c[k - i] * sums[i - 1]
        sums.append(acc)
    return sums


def exp_log_series(sums: list, order: int) -> list:
    """Truncation of exp(-sum_{r>=1} H_r T^r / r) to degree `order`."""
    log = [Fraction(0)] + [-Fraction(sums[r - 1]) / r for r in range(1, order + 1)]
    out = [Fraction(1)] + [Fraction(0)] * order
    # f' = log' f
    dlog = [r * log[r] for r in range(order + 1)]
    for n in range(1, order + 1):
        out[n] = sum(dlog[k] * out[n - k] for k in range(1, n + 1)) / n
    return out


def series_inverse(a: list, order: int) -> list:
    """Power series 1/a(T) to degree `order` (a[0] = +-1)."""
    inv = [Fraction(0)] * (order + 1)
    a0 = Fraction(a[0])
    inv[0] = 1 / a0
    for n in range(1, order + 1):
        acc = Fraction(0)
        for k in range(1, min(n, len(a) - 1) + 1):
            acc += a[k] * inv[n - k]
        inv[n] = -acc / a0
    return inv


def is_integral(coeffs) -> bool:
    return all(Fraction(x).denominator == 1 for x in coeffs)


def as_ints(coeffs) -> list:
    return [int(Fraction(x)) for x in coeffs]


def format_poly(coeffs, var: str = "T") -> str:
    terms = []
    for i, c in enumerate(coeffs):
        if c == 0:
            continue
        mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
        if mono and abs(c) == 1:
            body = mono
        elif mono:
            body = f"{abs(c)}*{mono}"
        else:
            body = str(abs(c))
        sign = "-" if c < 0 else "+"
        terms.append((sign, body))
    if not terms:
        return "0"
    head = ("-" if terms[0][0] == "-" else "") + terms[0][1]
    return head + "".join(f" {s} {b}" for s, b in terms[1:])
