"""Arbitrary-precision Ramanujan-type series, CM modular parametrizations, supercongruences."""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt
from pathlib import Path

import mpmath

from .core import HypergeometricData, hypergeometric_coefficients, parse_hypergeometric, parse_params
from .errors import Divergent, NoRepresentation, NonConvergent, NotPIntegral, NotUpperHalfPlane
from .ntheory import isprime, parse_fraction, primerange

log = logging.getLogger(__name__)

REGISTRY_PATH = Path(__file__).parent / "data" / "series_registry.json"
MAX_DIGITS = 1000
GUARD_DIGITS = 20
K3_ALPHA = "1/2,1/4,3/4"
K3_Z = Fraction(-1, 48)


# ---------------------------------------------------------------- closed forms

@dataclass(frozen=True)
class ClosedForm:
    """Expression tree: {"rat"}, {"pi": k}, {"pow": [base, exp]}, {"gamma": a, "exp": k}, {"mul": [...]}."""
    tree: dict

    def value(self, digits: int = 50):
        with mpmath.workdps(digits + GUARD_DIGITS):
            return +_eval_node(self.tree)

    def methods(self) -> list:
        out = set()
        _collect_methods(self.tree, out)
        return sorted(out)

    def __str__(self) -> str:
        return _render(self.tree)


def _gamma_value(a: Fraction):
    # Gamma(1/4) via the arithmetic-geometric mean, Gamma(3/4) by reflection
    if a == Fraction(1, 4):
        return mpmath.sqrt(2 * mpmath.sqrt(2 * mpmath.pi) * mpmath.pi / mpmath.agm(1, mpmath.sqrt(2)))
    if a == Fraction(3, 4):
        return mpmath.pi * mpmath.sqrt(2) / _gamma_value(Fraction(1, 4))
    return mpmath.gamma(mpmath.mpf(a.numerator) / a.denominator)


def _mpf(x: Fraction):
    return mpmath.mpf(x.numerator) / x.denominator


def _eval_node(node: dict):
    if "rat" in node:
        return _mpf(Fraction(node["rat"]))
    if "pi" in node:
        return mpmath.pi ** int(node["pi"])
    if "pow" in node:
        b, e = (Fraction(x) for x in node["pow"])
        return _mpf(b) ** _mpf(e)
    if "gamma" in node:
        return _gamma_value(Fraction(node["gamma"])) ** int(node.get("exp", 1))
    if "mul" in node:
        out = mpmath.mpf(1)
        for sub in node["mul"]:
            out *= _eval_node(sub)
        return out
    raise ValueError(f"unknown closed-form node {node}")


def _collect_methods(node: dict, out: set):
    if "gamma" in node:
        a = Fraction(node["gamma"])
        out.add("gamma: agm" if a in (Fraction(1, 4), Fraction(3, 4)) else "gamma: mpmath")
    for sub in node.get("mul", []):
        _collect_methods(sub, out)


def _render(node: dict) -> str:
    if "rat" in node:
        return node["rat"]
    if "pi" in node:
        return f"pi^{node['pi']}"
    if "pow" in node:
        return f"{node['pow'][0]}^({node['pow'][1]})"
    if "gamma" in node:
        return f"Gamma({node['gamma']})^{node.get('exp', 1)}"
    return " * ".join(_render(s) for s in node["mul"])


# ---------------------------------------------------------------- series specs

@dataclass(frozen=True)
class RamanujanSeries:
    id: str
    numParams: tuple
    denParams: tuple
    poly: tuple
    z: object  # Fraction, or (x, y, d) meaning x + y sqrt(d)
    target: ClosedForm | None = None
    proven: bool = False

    def __post_init__(self):
        if len(self.numParams) != len(self.denParams):
            raise ValueError("series must be of pFp-1 type with n! counted in denParams")

    def z_value(self):
        return _z_value(self.z)

    def label(self) -> str:
        return "proven identity" if self.proven else "numerical confirmation (identity conjectural)"


def _z_value(z):
    if isinstance(z, tuple):
        x, y, d = z
        return _mpf(Fraction(x)) + _mpf(Fraction(y)) * mpmath.sqrt(d)
    if isinstance(z, (complex, mpmath.mpc)):
        return mpmath.mpc(z)
    if isinstance(z, mpmath.mpf):
        return z
    return _mpf(parse_fraction(z))


def load_registry(path=None) -> dict:
    with open(path or REGISTRY_PATH) as fh:
        raw = json.load(fh)
    out = {}
    for rec in raw["series"]:
        out[rec["id"]] = RamanujanSeries(
            id=rec["id"], numParams=tuple(parse_params(rec["num"])), denParams=tuple(parse_params(rec["den"])),
            poly=tuple(rec["poly"]), z=parse_fraction(rec["z"]), target=ClosedForm(rec["target"]),
            proven=bool(rec["proven"]))
    return out


def get_series(sid: str) -> RamanujanSeries:
    reg = load_registry()
    if sid not in reg:
        raise KeyError(f"unknown series id {sid}; known: {', '.join(sorted(reg))}")
    return reg[sid]


# ---------------------------------------------------------------- evaluation

@dataclass
class SeriesValue:
    value: object
    terms: int
    tailBound: object
    digits: int


def _ratio_bound(spec: RamanujanSeries, K: int, absz) -> object:
    """Upper bound for |h_{m+1} Pabs(m+1)| / |h_m Pabs(m)| over all m >= K."""
    # pair parameters; each (a+m)/(b+m) is monotone in m with limit 1, hence at most
    # max(1, (a+K)/(b+K)) for all m >= K
    hi = mpmath.mpf(1)
    for a, b in zip(sorted(spec.numParams), sorted(spec.denParams)):
        hi *= max(mpmath.mpf(1), (_mpf(a) + K) / (_mpf(b) + K))
    deg = len(spec.poly) - 1
    return absz * hi * (1 + mpmath.mpf(1) / K) ** deg


def evaluate_series(spec: RamanujanSeries, digits: int = 40, max_terms: int = 10 ** 6) -> SeriesValue:
    """Partial sum with a ratio-test tail bound below 10^-(digits+5)."""
    if digits > MAX_DIGITS:
        raise ValueError(f"digits must be at most {MAX_DIGITS}")
    with mpmath.workdps(digits + GUARD_DIGITS):
        z = spec.z_value()
        absz = abs(z)
        if absz >= 1:
            raise Divergent(f"|z| = {mpmath.nstr(absz, 8)} >= 1")
        eps = mpmath.mpf(10) ** (-(digits + 5))
        num = [_mpf(a) for a in spec.numParams]
        den = [_mpf(b) for b in spec.denParams]
        pabs = [abs(c) for c in spec.poly]
        h = mpmath.mpf(1)  # hypergeometric part times z^n
        total = mpmath.mpf(0)
        n = 0
        while True:
            P = sum(c * n ** i for i, c in enumerate(spec.poly))
            total += h * P
            # advance to term n+1
            for a in num:
                h *= a + n
            for b in den:
                h /= b + n
            h *= z
            n += 1
            if n >= 2:
                rho = _ratio_bound(spec, n, absz)
                if rho < 1:
                    Pk = sum(c * n ** i for i, c in enumerate(pabs))
                    tail = abs(h) * Pk / (1 - rho)
                    if tail < eps:
                        return SeriesValue(value=+total, terms=n, tailBound=tail, digits=digits)
            if n > max_terms:
                raise Divergent("term budget exhausted before the tail bound converged")


def evaluate_hypergeometric(alpha, beta, z, digits: int = 40) -> SeriesValue:
    """F(alpha, beta | z) with beta including the trailing 1; z rational, (x, y, d), or complex."""
    spec = RamanujanSeries(id="F", numParams=tuple(parse_params(alpha)), denParams=tuple(parse_params(beta)),
                           poly=(1,), z=z)
    return evaluate_series(spec, digits)


def evaluate_target(spec: RamanujanSeries, digits: int = 40):
    if spec.target is None:
        raise ValueError(f"series {spec.id} has no closed-form target")
    return spec.target.value(digits)


@dataclass
class IdentityCheck:
    id: str
    passed: bool
    residual: object
    digits: int
    label: str
    methods: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"id": self.id, "pass": self.passed, "residual": mpmath.nstr(self.residual, 5),
                "digits": self.digits, "label": self.label, "methods": self.methods}


def check_identity(spec: RamanujanSeries, digits: int = 40) -> IdentityCheck:
    with mpmath.workdps(digits + GUARD_DIGITS):
        s = evaluate_series(spec, digits).value
        t = evaluate_target(spec, digits)
        res = abs(s - t)
        ok = bool(res < mpmath.mpf(10) ** (-digits + 2))
    label = spec.label()
    if ok and not spec.proven:
        label = f"confirmed numerically to {digits} digits (identity conjectural)"
    elif ok:
        label = f"proven identity, matched to {digits} digits"
    return IdentityCheck(id=spec.id, passed=ok, residual=res, digits=digits, label=label,
                         methods=spec.target.methods())


# ---------------------------------------------------------------- modular side

def _check_tau(tau):
    tau = mpmath.mpc(tau)
    if tau.imag <= 0:
        raise NotUpperHalfPlane(f"Im(tau) = {tau.imag} <= 0")
    return tau


def eta(tau, digits: int = 30):
    """Dedekind eta by the pentagonal-number series."""
    with mpmath.workdps(digits + GUARD_DIGITS):
        tau = _check_tau(tau)
        q = mpmath.exp(2j * mpmath.pi * tau)
        aq = abs(q)
        eps = mpmath.mpf(10) ** (-(digits + 10))
        total = mpmath.mpc(1)
        k = 1
        while True:
            e1 = k * (3 * k - 1) // 2
            e2 = k * (3 * k + 1) // 2
            if aq ** e1 < eps:
                break
            sign = -1 if k % 2 else 1
            total += sign * (q ** e1 + q ** e2)
            k += 1
        return +(mpmath.exp(2j * mpmath.pi * tau / 24) * total)


def rho_modular(tau, digits: int = 30):
    with mpmath.workdps(digits + GUARD_DIGITS):
        e1 = eta(tau, digits) ** 24
        e2 = eta(2 * mpmath.mpc(tau), digits) ** 24
        return +(256 * e1 * e2 / (e1 + 64 * e2) ** 2)


@dataclass
class ModularCheck:
    tau: object
    rho: object
    lhs: object
    rhs: object
    residual: object
    passed: bool

    def to_dict(self) -> dict:
        return {k: (mpmath.nstr(v, 20) if not isinstance(v, bool) else v) for k, v in self.__dict__.items()}


def check_can0tau(tau, digits: int = 30) -> ModularCheck:
    """Compare the 3F2 at rho(tau) with its eta-quotient parametrization."""
    with mpmath.workdps(digits + GUARD_DIGITS):
        tau = _check_tau(tau)
        r = rho_modular(tau, digits)
        if abs(r) >= 1:
            raise NonConvergent(f"|rho(tau)| = {mpmath.nstr(abs(r), 8)} >= 1")
        z = r.real if abs(r.imag) < mpmath.mpf(10) ** (-(digits + 10)) else r
        lhs = evaluate_hypergeometric(K3_ALPHA, "1,1,1", z, digits).value
        a = eta(tau, digits)
        b = eta(2 * tau, digits)
        rhs = mpmath.sqrt(a ** 16 / b ** 8 + 64 * b ** 16 / a ** 8)
        res = abs(lhs - rhs)
        ok = bool(res < mpmath.mpf(10) ** (-digits + 2))
        return ModularCheck(tau=tau, rho=r, lhs=lhs, rhs=rhs, residual=res, passed=ok)


# ---------------------------------------------------------------- CM coefficients and congruences

def _two_squares(n: int, order: str = "x"):
    """All (x, y) >= 0 with x^2 + y^2 = n; search driven by x or by y."""
    out = []
    for u in range(isqrt(n) + 1):
        r = n - u * u
        v = isqrt(r)
        if v * v == r:
            out.append((u, v) if order == "x" else (v, u))
    return out


def bp_cm(p: int, order: str = "x") -> int:
    """Integer b_p attached to the CM form of the K3 row."""
    if p < 5 or not isprime(p):
        raise ValueError("p must be a prime >= 5")
    if p % 4 == 3:
        return 0
    n = p if p % 12 == 1 else 2 * p
    for x, y in _two_squares(n, order):
        if y % 3 == 0 and x % 3:
            return 2 * (x * x - y * y) if p % 12 == 1 else -(x * x - y * y)
        if x % 3 == 0 and y % 3:
            return 2 * (y * y - x * x) if p % 12 == 1 else -(y * y - x * x)
    raise NoRepresentation(f"no representation of {n} with a coordinate divisible by 3")


def truncated_hyp_mod(data: HypergeometricData, z, p: int, e: int) -> int:
    """sum_{n<p} A_n z^n reduced mod p^e, exact rationals throughout."""
    if p < 5:
        raise ValueError("p must be at least 5")
    z = parse_fraction(z)
    coeffs = hypergeometric_coefficients(data, p - 1).coeffs
    total = Fraction(0)
    zn = Fraction(1)
    for n, A in enumerate(coeffs):
        term = A * zn
        if term.denominator % p == 0:
            raise NotPIntegral(f"term n={n} has denominator divisible by {p}")
        total += term
        zn *= z
    mod = p ** e
    return total.numerator * pow(total.denominator, -1, mod) % mod


def _truncated_mod_direct(alpha, z: Fraction, p: int, e: int) -> int:
    """Independent path: term recurrence carried out in Z/p^e."""
    mod = p ** e
    zr = z.numerator * pow(z.denominator, -1, mod) % mod
    term = 1
    total = 1
    for n in range(p - 1):
        num = 1
        den = 1
        for a in alpha:
            num = num * (a.numerator + n * a.denominator) % mod
            den = den * a.denominator % mod
        den = den * pow(n + 1, len(alpha), mod) % mod
        term = term * num * pow(den, -1, mod) * zr % mod
        total = (total + term) % mod
    return total


def supercongruence_scan(pmax: int = 97, pmin: int = 5) -> dict:
    """Check the truncated K3 series at -1/48 against b_p mod p^2."""
    data = parse_hypergeometric(K3_ALPHA, "1,1,1")
    alpha = parse_params(K3_ALPHA)
    rows = []
    for p in primerange(max(5, pmin), pmax + 1):
        val = truncated_hyp_mod(data, K3_Z, p, 2)
        b = bp_cm(p)
        ok = (val - b) % (p * p) == 0
        rec = {"p": p, "residue": val, "b_p": b, "pass": ok}
        if not ok:
            alt = _truncated_mod_direct(alpha, K3_Z, p, 2)
            rec["status"] = "congruence violated" if alt == val else "arithmetic error"
        rows.append(rec)
    return {"pmax": pmax, "rows": rows, "pass": all(r["pass"] for r in rows)}
