"""Dirichlet coefficients from Euler factors and numerical functional-equation checks.

Lambda(s) = N^{s/2} prod Gamma_R(s + mu_j) L(s) is evaluated by a smoothed approximate
functional equation: for a test function h with h(0) = 1,

    Lambda(s0) = sum_n a_n [I_h(s0, n) + eps I_h~(w - s0, n)] - sum_poles r h(rho - s0) / (rho - s0)

with I_h(a, n) = (1/2 pi) int gamma(a+c+iy) (sqrt(N)/n)^{a+c+iy} h(c+iy)/(c+iy) dy and
h~(z) = h(-z). Two different test functions give two evaluations that agree only when the
assumed conductor, gamma factor, sign and reflection point are right.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import floor, log
from pathlib import Path

import mpmath
import numpy as np
from scipy.special import loggamma

from .core import HypergeometricData, classify_primes
from .errors import InsufficientCutoff, MissingFactor
from .ffield import DEFAULT_SIZE_CAP
from .ntheory import kronecker, parse_fraction, primerange
from .poly import exp_log_series, pmul, series_inverse
from .trace import local_factor_direct, trace_sequence

log_ = logging.getLogger(__name__)

CONFIG_PATH = Path(__file__).parent / "data" / "lfunc_configs.json"


# ---------------------------------------------------------------- types

@dataclass(frozen=True)
class Pole:
    location: complex
    residue: object  # complex, or "fit"; "mirror" means -eps times the fitted residue


@dataclass(frozen=True)
class LFunctionConfig:
    degree: int
    conductor: int
    gammaShifts: tuple
    reflectionPoint: float
    sign: object = 1  # +-1, complex, or "fit"
    cutoff: int = 1000
    poles: tuple = ()
    label: str = ""

    def __post_init__(self):
        if len(self.gammaShifts) != self.degree:
            raise ValueError("degree must equal the number of Gamma_R factors")

    def to_dict(self) -> dict:
        return {"degree": self.degree, "conductor": self.conductor, "gamma_shifts": list(self.gammaShifts),
                "reflection_point": self.reflectionPoint, "sign": self.sign, "cutoff": self.cutoff,
                "poles": [[str(p.location), str(p.residue)] for p in self.poles], "label": self.label}


@dataclass(frozen=True)
class DirichletCoefficients:
    values: tuple  # a_1 .. a_B

    @property
    def B(self) -> int:
        return len(self.values)

    def __getitem__(self, n: int) -> int:
        return self.values[n - 1]


# ---------------------------------------------------------------- Dirichlet coefficients

def dirichlet_series(localFactors, B: int) -> DirichletCoefficients:
    """a_n for n <= B from Euler factors.

    localFactors: mapping p -> polynomial L_p(T) (constant first), or p -> ("inverse", series)
    already giving 1/L_p(T) to sufficient order; or a callable p -> either form.
    """
    get = localFactors if callable(localFactors) else localFactors.get
    a = [0] * (B + 1)
    a[1] = 1
    for p in primerange(2, B + 1):
        fac = get(p)
        if fac is None:
            raise MissingFactor(f"no Euler factor for p={p}")
        kmax = int(floor(log(B) / log(p) + 1e-12))
        while p ** (kmax + 1) <= B:
            kmax += 1
        while p ** kmax > B:
            kmax -= 1
        if isinstance(fac, tuple) and fac and fac[0] == "inverse":
            inv = list(fac[1])
            if len(inv) < kmax + 1:
                raise MissingFactor(f"series at p={p} too short for B={B}")
        else:
            inv = series_inverse([Fraction(x) for x in fac], kmax)
        inv = [int(x) for x in inv[: kmax + 1]]
        # extend multiplicatively: n built from smaller primes only
        for n in range(B // p, 0, -1):
            if a[n] == 0 or n % p == 0:
                continue
            m = n * p
            k = 1
            while m <= B:
                a[m] = a[n] * inv[k]
                m *= p
                k += 1
    return DirichletCoefficients(values=tuple(a[1:]))


def zeta_factors(B: int) -> dict:
    return {p: [1, -1] for p in primerange(2, B + 1)}


def hgm_factor_source(data: HypergeometricData, z, badFactors: dict, chi_disc: int = 1,
                      chi_power: int = 2, include_chi: bool = True, weight: int = 4,
                      size_cap: int = DEFAULT_SIZE_CAP, B: int | None = None):
    """Callable p -> Euler data for an HGM specialization with fixture bad factors.

    Bad fixtures hold the quartic part; the full factor is (1 - chi(p) p^k T) * entry when
    include_chi is set.
    """
    z = parse_fraction(z)
    spec = classify_primes(data, z)
    d = data.degree

    def source(p: int):
        if p in badFactors:
            entry = list(badFactors[p])
            if include_chi:
                entry = pmul([1, -kronecker(chi_disc, p) * p ** chi_power], entry)
            return entry
        if p in spec.excludedPrimes and p not in spec.degeneratePrimes:
            return None
        kmax = 1
        while B is not None and p ** (kmax + 1) <= B:
            kmax += 1
        # full factor only when the cutoff needs every coefficient or the prime is degenerate
        if kmax >= d or p in spec.degeneratePrimes:
            if p ** d > size_cap:
                return None
            return list(local_factor_direct(data, z, p, weight=weight, allow_degenerate=True,
                                            size_cap=size_cap).coeffs)
        seq = trace_sequence(data, z, p, kmax, size_cap=size_cap)
        inv = exp_log_series([-h for h in seq.values], kmax)
        return ("inverse", [int(x) for x in inv])

    return source


# ---------------------------------------------------------------- Lambda evaluation

@dataclass
class _Quadrature:
    ys: np.ndarray
    weights: np.ndarray


def _quadrature(degree: int, b: float, step: float = 0.1, tol: float = 1e-18) -> _Quadrature:
    # integrand decays like exp(-(pi d / 4 - |b|) |y|) up to polynomial factors; the nearest
    # singularity sits at distance >= c from the real y-axis, so the trapezoid error is
    # about exp(-2 pi c / step)
    rate = np.pi * degree / 4 - abs(b)
    if rate <= 0.2:
        raise ValueError("smoothing parameter too large for this degree")
    Y = (-np.log(tol) + 10 * np.log(10)) / rate + 5
    ys = np.arange(-Y, Y + step / 2, step)
    return _Quadrature(ys=ys, weights=np.full(ys.shape, step))


def _incomplete(config: LFunctionConfig, a, b: float, sign_b: int, xs: np.ndarray, c: float,
                quad: _Quadrature) -> np.ndarray:
    """I(a, n) for all x_n = sqrt(N)/n with h(z) = exp(i sign_b b z)."""
    zs = c + 1j * quad.ys
    ss = complex(a) + zs
    logg = np.zeros(zs.shape, dtype=complex)
    lpi = np.log(np.pi)
    for mu in config.gammaShifts:
        u = ss + mu
        logg += -u / 2 * lpi + loggamma(u / 2)
    G = np.exp(logg + 1j * sign_b * b * zs) / zs * quad.weights
    a_c = complex(a) + c
    logx = np.log(xs)
    # sum_k G_k x^{a+c+i y_k}
    phase = np.exp(1j * np.outer(logx, quad.ys))
    return np.exp(a_c * logx) * (phase @ G) / (2 * np.pi)


@dataclass
class LambdaEvaluation:
    value: complex
    tailEstimate: float
    residueFit: complex | None = None


def _pole_sum(config: LFunctionConfig, s0, b: float, eps, r_fit):
    total = 0j
    for pole in config.poles:
        if pole.residue == "fit":
            r = r_fit
        elif pole.residue == "mirror":
            r = -eps * r_fit
        else:
            r = complex(pole.residue)
        if r is None:
            continue
        u = complex(pole.location) - complex(s0)
        total += r * complex(mpmath.exp(1j * b * u)) / u
    return total


def _pole_basis(config: LFunctionConfig, s0, b: float, eps) -> complex:
    """Coefficient of the fitted residue in the pole sum."""
    total = 0j
    for pole in config.poles:
        u = complex(pole.location) - complex(s0)
        hv = complex(mpmath.exp(1j * b * u)) / u
        if pole.residue == "fit":
            total += hv
        elif pole.residue == "mirror":
            total += -eps * hv
    return total


def _smoothed_parts(config, coeffs: DirichletCoefficients, s0, b: float, eps, c: float):
    """(sum over n, tail estimate) for test function exp(i b z)."""
    B = coeffs.B
    n = np.arange(1, B + 1, dtype=float)
    xs = np.sqrt(float(config.conductor)) / n
    an = np.array([float(x) for x in coeffs.values])
    quad = _quadrature(config.degree, b)
    I1 = _incomplete(config, s0, b, 1, xs, c, quad)
    I2 = _incomplete(config, config.reflectionPoint - s0, b, -1, xs, c, quad)
    terms = an * (I1 + eps * I2)
    tail = float(np.sum(np.abs(terms[B // 2:])))
    return complex(np.sum(terms)), tail


def lambda_value(config: LFunctionConfig, coefficients: DirichletCoefficients, s, b: float = 0.0,
                 eps=None, residue=None, c: float = 1.5) -> LambdaEvaluation:
    """Lambda(s) by the smoothed approximate functional equation with h(z) = exp(i b z)."""
    eps = config.sign if eps is None else eps
    if eps == "fit":
        raise ValueError("resolve the sign first (fe_residual fits it)")
    S, tail = _smoothed_parts(config, coefficients, complex(s), b, eps, c)
    val = S - _pole_sum(config, s, b, eps, residue)
    return LambdaEvaluation(value=val, tailEstimate=tail, residueFit=residue)


def _fit_residue(config, coefficients, s_aux, eps, c, b1, b2):
    """Residue making the two smoothings agree at an auxiliary point."""
    if not any(p.residue in ("fit", "mirror") for p in config.poles):
        return None
    S1, _ = _smoothed_parts(config, coefficients, s_aux, b1, eps, c)
    S2, _ = _smoothed_parts(config, coefficients, s_aux, b2, eps, c)
    P1 = _pole_basis(config, s_aux, b1, eps)
    P2 = _pole_basis(config, s_aux, b2, eps)
    return (S1 - S2) / (P1 - P2)


@dataclass
class FEReport:
    residual: float
    sign: object
    residue: complex | None
    points: list
    values: list
    config: dict
    tail: float
    perPoint: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"residual": self.residual, "sign": _jsonable(self.sign),
                "residue": None if self.residue is None else [self.residue.real, self.residue.imag],
                "points": [[p.real, p.imag] for p in self.points],
                "per_point": self.perPoint, "tail": self.tail, "config": self.config}


def _jsonable(x):
    if isinstance(x, complex):
        return [x.real, x.imag]
    return x


def _residual_for_sign(config, coefficients, points, eps, c, b1, b2, s_aux):
    r = _fit_residue(config, coefficients, s_aux, eps, c, b1, b2)
    per = []
    vals = []
    tail = 0.0
    w = config.reflectionPoint
    for s in points:
        L1 = lambda_value(config, coefficients, s, b=b1, eps=eps, residue=r, c=c)
        s_ref = w - complex(s).conjugate()
        L2 = lambda_value(config, coefficients, s_ref, b=b2, eps=eps, residue=r, c=c)
        num = abs(L1.value - eps * L2.value.conjugate())
        den = abs(L1.value)
        per.append(num / den if den else float("inf"))
        vals.append(L1.value)
        tail = max(tail, L1.tailEstimate / den if den else float("inf"))
    return max(per), per, vals, r, tail


def fe_residual(config: LFunctionConfig, coefficients: DirichletCoefficients, testPoints,
                c: float = 1.5, b1: float = 0.0, b2: float | None = None, s_aux=None,
                strict: bool = False, tol: float = 1e-5) -> FEReport:
    """Max relative |Lambda(s) - eps conj(Lambda(w - conj s))| / |Lambda(s)| over test points."""
    points = [complex(s) for s in testPoints]
    if b2 is None:
        b2 = min(1.0, np.pi * config.degree / 8)
    if s_aux is None:
        s_aux = complex(config.reflectionPoint / 2, 0.37)
    if config.sign == "fit":
        best = None
        for eps in (1, -1):
            res = _residual_for_sign(config, coefficients, points[:1], eps, c, b1, b2, s_aux)
            if best is None or res[0] < best[1]:
                best = (eps, res[0])
        eps = best[0]
    else:
        eps = config.sign
    worst, per, vals, r, tail = _residual_for_sign(config, coefficients, points, eps, c, b1, b2, s_aux)
    if strict and tail > tol:
        raise InsufficientCutoff(f"tail estimate {tail:.3g} exceeds tolerance {tol:.3g}; raise the cutoff")
    return FEReport(residual=worst, sign=eps, residue=r, points=points, values=vals,
                    config=config.to_dict(), tail=tail, perPoint=per)


# ---------------------------------------------------------------- configurations

def zeta_config(cutoff: int = 60) -> LFunctionConfig:
    return LFunctionConfig(degree=1, conductor=1, gammaShifts=(0,), reflectionPoint=1.0, sign=1,
                           cutoff=cutoff, poles=(Pole(1, 1), Pole(0, -1)), label="zeta")


def load_configs(path=None) -> dict:
    with open(path or CONFIG_PATH) as fh:
        return json.load(fh)


def hgm_configs(row: int, path=None) -> list:
    """All candidate configurations for a row: gamma shifts x reflection points."""
    raw = load_configs(path)["rows"][str(row)]
    out = []
    for w in raw["reflection_points"]:
        for shifts in raw["gamma_candidates"]:
            mu = tuple(float(x) for x in shifts)
            # the Tate-twisted Dirichlet line contributes poles at its edge of the critical strip
            pl = []
            for spec in raw.get("poles", []):
                at = spec["at"]
                loc = w - float(spec["of"]) if at == "reflect" else float(at)
                pl.append(Pole(loc, spec["residue"]))
            out.append(LFunctionConfig(degree=len(mu), conductor=raw["N"], gammaShifts=mu, reflectionPoint=float(w),
                                       sign="fit", cutoff=raw.get("cutoff", 1500), poles=tuple(pl),
                                       label=f"row {row} mu={list(mu)} w={w}"))
    return out


def row_coefficients(row: int, B: int, include_chi: bool = True, fixtures=None) -> DirichletCoefficients:
    from .matcher import load_match_row
    mrow = load_match_row(row, fixtures)
    bad = {p: f.coeffs for p, f in mrow.badFactors.items()}
    src = hgm_factor_source(mrow.data, mrow.z, bad, chi_disc=mrow.chi.disc, include_chi=include_chi, B=B)
    return dirichlet_series(src, B)


def check_row(row: int, cutoff: int | None = None, testPoints=None, include_chi: bool = True,
              fixtures=None) -> dict:
    """Search the configured gamma/reflection space; report the best configuration."""
    configs = hgm_configs(row)
    B = cutoff or configs[0].cutoff
    coeffs = row_coefficients(row, B, include_chi=include_chi, fixtures=fixtures)
    results = []
    for cfg in configs:
        w = cfg.reflectionPoint
        pts = testPoints or [complex(w / 2, t) for t in (1.0, 2.0, 3.0)]
        rep = fe_residual(cfg, coeffs, pts)
        results.append(rep)
    best = min(results, key=lambda r: r.residual)
    return {"row": row, "cutoff": B, "best": best.to_dict(),
            "tried": [{"label": r.config["label"], "residual": r.residual, "sign": r.sign} for r in results]}
