"""Match hypergeometric L-factors against Asai factors of Hilbert eigenforms.

Pipeline: infer the quadratic character and the real quadratic field from computed
factors, read off ordinarity from Newton slopes, split ordinary quartics p-adically,
recover Hecke eigenvalues up to sign, and verify rows of the fixture tables.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from pathlib import Path

from .core import HypergeometricData, classify_primes, parse_hypergeometric
from .errors import (NoCandidate, NoConsistentCharacter, NotDivisible,
                     NotOrdinary, NotSquare, PrecisionLoss)
from .ffield import DEFAULT_SIZE_CAP
from .hilbert import (DATA_DIR, HilbertEigenform, QuadCharacter, asai_factor, splitting_type,
                      tate_twist, twist_char)
from .ntheory import (fundamental_discriminant, is_fundamental_discriminant, kronecker, ord_p,
                      parse_fraction, prime_divisors, primerange, sqrt_mod_prime_power, squarefree_part)
from .poly import format_poly, pdivmod, pmul, trim
from .trace import LocalEulerFactor, local_factor_direct, local_factor_selfdual, trace_sequence

log = logging.getLogger(__name__)

DEFAULT_PADIC_PRECISION = 20
MAX_CHAR_DISC = 500
REPORT_SCHEMA = 1


# ---------------------------------------------------------------- types

@dataclass(frozen=True)
class PAdicElement:
    p: int
    N: int
    value: int
    valuation: int

    def __post_init__(self):
        if not 0 <= self.valuation <= self.N:
            raise ValueError("valuation out of range")
        if not 0 <= self.value < self.p ** self.N:
            raise ValueError("value not reduced")


@dataclass(frozen=True)
class SlopeProfile:
    p: int
    slopes: tuple  # sorted multiset of Fractions

    @property
    def degree(self) -> int:
        return len(self.slopes)

    def multiplicities(self) -> dict:
        out = {}
        for s in self.slopes:
            out[s] = out.get(s, 0) + 1
        return out

    def __str__(self) -> str:
        return "{" + ",".join(str(s) for s in self.slopes) + "}"


@dataclass(frozen=True)
class MatchRow:
    id: int
    data: HypergeometricData
    z: Fraction
    chi: QuadCharacter
    chiProvisional: bool
    fieldDisc: int
    levelNorm: int | None
    psi: int | None
    eps: int | None
    epsProvisional: bool = False
    epsAlternatives: tuple = ()
    badFactors: dict = field(default_factory=dict)  # p -> LocalEulerFactor
    conductor: int | None = None

    def __post_init__(self):
        if self.levelNorm and self.conductor and _coprime(self.fieldDisc, self.levelNorm):
            if self.conductor != self.fieldDisc * self.levelNorm:
                raise ValueError(f"row {self.id}: N={self.conductor} differs from d_F * Nm(level)")

    @property
    def provisional(self) -> bool:
        return self.chiProvisional or self.epsProvisional or self.levelNorm is None


def _coprime(a: int, b: int) -> bool:
    return gcd(a, b) == 1


@dataclass
class MatchReport:
    row: int
    mode: str
    verdicts: list
    chi: int
    fieldDisc: int
    sigma: int | None
    eps: int
    epsPrinted: int | None
    provisional: bool = False
    notes: list = field(default_factory=list)

    @property
    def eps_refit(self) -> bool:
        return self.epsPrinted is not None and self.eps != self.epsPrinted

    @property
    def passed(self) -> bool:
        return all(v["pass"] for v in self.verdicts if v["status"] != "skipped")

    @property
    def checked(self) -> list:
        return [v for v in self.verdicts if v["status"] != "skipped"]

    def summary(self) -> str:
        n = len(self.checked)
        ok = sum(v["pass"] for v in self.checked)
        return f"row {self.row} {self.mode}: {ok}/{n} primes pass"

    def to_dict(self) -> dict:
        return {
            "schema": REPORT_SCHEMA,
            "row": self.row,
            "mode": self.mode,
            "chi": self.chi,
            "field_disc": self.fieldDisc,
            "sigma": self.sigma,
            "eps": self.eps,
            "eps_printed": self.epsPrinted,
            "eps_refit": self.eps_refit,
            "provisional": self.provisional,
            "verdicts": self.verdicts,
            "notes": self.notes,
            "passed": self.passed,
            "summary": self.summary(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True)

    def to_table(self) -> str:
        lines = [f"row {self.row}  mode={self.mode}  chi={self.chi}  d_F={self.fieldDisc}  "
                 f"sigma={self.sigma}  eps={self.eps}" + ("  (refit)" if self.eps_refit else "")]
        skipped = {}
        for v in self.verdicts:
            if v["status"] == "skipped":
                skipped.setdefault(v["details"], []).append(v["p"])
                continue
            mark = "PASS" if v["pass"] else "FAIL"
            lines.append(f"  p={v['p']:<4} {mark:<5} {v.get('details', '')}")
        for why, ps in sorted(skipped.items()):
            lines.append(f"  skipped ({why}): {len(ps)} primes, {ps[0]}..{ps[-1]}")
        lines.extend(f"  note: {n}" for n in self.notes)
        lines.append(self.summary())
        return "\n".join(lines)


# ---------------------------------------------------------------- fixture rows

def _load_json(name: str, fixtures=None):
    base = Path(fixtures) if fixtures else DATA_DIR
    with open(base / name) as fh:
        return json.load(fh)


def load_match_row(row: int, fixtures=None) -> MatchRow:
    t1json = _load_json("table1_rows.json", fixtures)
    beta = t1json["beta"]
    t1 = {r["id"]: r for r in t1json["rows"]}
    t2 = {r["id"]: r for r in _load_json("table2_forms.json", fixtures)["rows"]}
    t3 = _load_json("table3_badfactors.json", fixtures)
    if row not in t1:
        raise KeyError(f"unknown row {row}")
    r1 = t1[row]
    if not r1["rational"]:
        raise ValueError(f"row {row} has an irrational argument; series evaluation only")
    data = parse_hypergeometric(r1["alpha"], beta)
    r2 = t2.get(row, {})
    bad = {}
    conductor = None
    r3 = t3["rows"].get(str(row))
    if r3:
        conductor = r3["N"]
        for p, entry in r3["factors"].items():
            flags = {"suspect"} if entry.get("suspect") else set()
            bad[int(p)] = LocalEulerFactor(p=int(p), coeffs=tuple(entry["coeffs"]), weight=t3["weight"],
                                           provenance="fixture", flags=frozenset(flags))
    chi = r2.get("chi")
    return MatchRow(
        id=row, data=data, z=parse_fraction(r1["z"]),
        chi=QuadCharacter(chi if chi is not None else 1),
        chiProvisional=bool(r2.get("chi_provisional", True)),
        fieldDisc=r2.get("field_disc", 1), levelNorm=r2.get("level_norm"),
        psi=r2.get("psi"), eps=r2.get("eps"), epsProvisional=bool(r2.get("eps_provisional", True)),
        epsAlternatives=tuple(r2.get("eps_alternatives", [])),
        badFactors=bad, conductor=conductor,
    )


# ---------------------------------------------------------------- character and field inference

def _linear_multiplicity(coeffs, root_coeff: int) -> int:
    """Multiplicity of (1 + root_coeff T) in the polynomial."""
    c = trim([Fraction(x) for x in coeffs])
    m = 0
    lin = [Fraction(1), Fraction(root_coeff)]
    while len(c) > 1:
        q, r = pdivmod(c, lin)
        if any(x != 0 for x in trim(r)):
            break
        c = trim(q)
        m += 1
    return m


def character_signs(factors, k: int) -> dict:
    """p -> +1/-1 when one of (1 -+ p^k T) divides more often than the other; ambiguous primes omitted."""
    out = {}
    for f in factors:
        p = f.p
        plus = _linear_multiplicity(f.coeffs, -p ** k)
        minus = _linear_multiplicity(f.coeffs, p ** k)
        if plus != minus:
            out[p] = 1 if plus > minus else -1
    return out


def _fundamental_discs(bound: int) -> list:
    out = [1]
    for n in range(2, bound + 1):
        for D in (-n, n):
            if is_fundamental_discriminant(D):
                out.append(D)
    return sorted(out, key=lambda D: (abs(D), -D))


def infer_chi(factors, k: int, bound: int = MAX_CHAR_DISC) -> QuadCharacter:
    """Smallest-|D| Kronecker character matching the signs of the linear factors."""
    signs = character_signs(factors, k)
    if not signs:
        raise NoConsistentCharacter("no prime determines a sign")
    for D in _fundamental_discs(bound):
        if all(kronecker(D, p) == s for p, s in signs.items()):
            return QuadCharacter(D)
    raise NoConsistentCharacter(f"no discriminant |D| <= {bound} matches signs {signs}")


def strip_linear(factor: LocalEulerFactor, chi: QuadCharacter, k: int) -> LocalEulerFactor:
    p = factor.p
    lin = [1, -chi(p) * p ** k]
    q, r = pdivmod([Fraction(x) for x in factor.coeffs], [Fraction(x) for x in lin])
    if any(x != 0 for x in trim(r)) or any(Fraction(x).denominator != 1 for x in q):
        raise NotDivisible(f"(1 - {chi(p) * p ** k}T) does not divide {format_poly(factor.coeffs)}")
    return LocalEulerFactor(p=p, coeffs=tuple(int(x) for x in trim(q)), weight=factor.weight,
                            provenance=factor.provenance, flags=factor.flags)


def has_inert_signature(quartic: LocalEulerFactor) -> bool:
    p = quartic.p
    _, r = pdivmod([Fraction(x) for x in quartic.coeffs], [Fraction(1), Fraction(0), Fraction(-p ** 4)])
    return all(x == 0 for x in trim(r))


def disc_candidates(z) -> list:
    """Fundamental discriminants from numerator/denominator of 1 - z and z, in preference order."""
    z = parse_fraction(z)
    u = 1 - z
    out = []
    for n in (u.numerator, u.denominator, z.numerator, z.denominator):
        if n == 0:
            continue
        D = fundamental_discriminant(abs(n))
        if D not in out:
            out.append(D)
    return out


def infer_disc(z, factors, chi: QuadCharacter | None = None, k: int = 2) -> list:
    """Ranked [(D, score, total)] by agreement of the inert signature with Kronecker(D|p) = -1."""
    if chi is None:
        chi = infer_chi(factors, k)
    quartics = []
    for f in factors:
        try:
            quartics.append(strip_linear(f, chi, k))
        except NotDivisible:
            log.debug("skipping p=%s: linear factor absent", f.p)
    if not quartics:
        raise NoCandidate("no quartic parts available")
    cands = disc_candidates(z)
    if not cands:
        raise NoCandidate("no candidate discriminants")
    scored = []
    for rank, D in enumerate(cands):
        score = sum(has_inert_signature(q) == (kronecker(D, q.p) == -1) for q in quartics)
        scored.append((D, score, len(quartics), rank))
    scored.sort(key=lambda x: (-x[1], x[3]))
    return [(D, s, n) for D, s, n, _ in scored]


def inference_factors(row: MatchRow, count: int = 15, rmax: int = 3, size_cap: int = DEFAULT_SIZE_CAP) -> list:
    """Self-dual factors at the first `count` good primes p >= 5 away from the fixture primes."""
    spec = classify_primes(row.data, row.z)
    out = []
    for p in primerange(5, 10 ** 5):
        if p in spec.excludedPrimes or p in row.badFactors:
            continue
        out.append(local_factor_selfdual(row.data, row.z, p, rmax, weight=4, size_cap=size_cap))
        if len(out) >= count:
            break
    return out


def infer_row(row: MatchRow, count: int = 15, size_cap: int = DEFAULT_SIZE_CAP) -> dict:
    """Infer (chi, d_F) for a row from computed factors and compare with the table."""
    facs = inference_factors(row, count, size_cap=size_cap)
    chi = infer_chi(facs, 2)
    ranked = infer_disc(row.z, facs, chi)
    return {"row": row.id, "primes": [f.p for f in facs], "chi": chi.disc, "disc_ranking": ranked,
            "expected": {"chi": row.chi.disc, "field_disc": row.fieldDisc, "provisional": row.provisional},
            "match": chi.disc == row.chi.disc and ranked[0][0] == row.fieldDisc}


# ---------------------------------------------------------------- Newton slopes

def newton_slopes(factor) -> SlopeProfile:
    """Slopes of the lower convex hull of (i, ord_p c_i)."""
    p = factor.p
    pts = [(i, ord_p(c, p)) for i, c in enumerate(factor.coeffs) if c != 0]
    hull = []
    for pt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop the middle point if it lies on or above the segment to pt
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    slopes = []
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        slopes.extend([Fraction(y2 - y1, x2 - x1)] * (x2 - x1))
    return SlopeProfile(p=p, slopes=tuple(slopes))


ORDINARY_SLOPES = (Fraction(0), Fraction(1), Fraction(3), Fraction(4))


def is_ordinary(quartic) -> bool:
    return newton_slopes(quartic).slopes == ORDINARY_SLOPES


# ---------------------------------------------------------------- p-adic splitting

def _newton_root(f, df, x0: int, mod_p: int, p: int, k_target: int) -> int:
    """Hensel lift of a simple root x0 of f mod p to precision p^k_target."""
    x = x0
    k = 1
    while k < k_target:
        k = min(2 * k, k_target)
        m = p ** k
        d = df(x) % m
        if d % p == 0:
            raise PrecisionLoss("derivative is not a unit during lifting")
        x = (x - f(x) * pow(d, -1, m)) % m
    return x % p ** k_target


def _horner(coeffs, x, m=None):
    acc = 0
    for c in reversed(coeffs):
        acc = acc * x + c
        if m:
            acc %= m
    return acc


def slope_factors(quartic, p: int | None = None, N: int = DEFAULT_PADIC_PRECISION):
    """Low (slopes 0,1) and high (slopes 3,4) monic quadratics with roots the reciprocal roots, mod p^N.

    Returns (low, high, delta0, delta1) with polynomials in X, constant first.
    """
    p = p or quartic.p
    c = list(quartic.coeffs)
    if len(c) != 5 or newton_slopes(LocalEulerFactor(p=p, coeffs=tuple(c), weight=4)).slopes != ORDINARY_SLOPES:
        raise NotOrdinary(f"quartic at p={p} is not ordinary")
    if N < 2:
        raise PrecisionLoss("precision too small")
    M = N + 10
    mod = p ** M
    # reverse polynomial P(X) = X^4 + c1 X^3 + c2 X^2 + c3 X + c4 has the reciprocal roots
    P = [c[4], c[3], c[2], c[1], 1]
    dP = [P[1], 2 * P[2], 3 * P[3], 4 * P[4]]
    d0 = _newton_root(lambda x: _horner(P, x), lambda x: _horner(dP, x), (-c[1]) % p, p, p, M)
    # delta1 = p Y with F(Y) = P(pY) / p^3
    F = [Fraction(P[i] * p ** i, p ** 3) for i in range(5)]
    if any(x.denominator != 1 for x in F):
        raise NotOrdinary("unexpected valuations in the rescaled polynomial")
    F = [int(x) for x in F]
    dF = [F[1], 2 * F[2], 3 * F[3], 4 * F[4]]
    y0 = (-(c[2] // p) * pow(c[1], -1, p)) % p
    y = _newton_root(lambda x: _horner(F, x), lambda x: _horner(dF, x), y0, p, p, M - 1)
    d1 = (p * y) % mod
    low = [(d0 * d1) % mod, (-(d0 + d1)) % mod, 1]
    high, rem = _pdivmod_mod(P, low, mod)
    if any(r % p ** N for r in rem):
        raise PrecisionLoss("slope factorization does not divide the quartic")
    modN = p ** N
    return [x % modN for x in low], [x % modN for x in high], d0 % modN, d1 % modN


def _pdivmod_mod(a, b, mod):
    """Division by a monic polynomial modulo mod."""
    a = [x % mod for x in a]
    q = [0] * (len(a) - len(b) + 1)
    for i in range(len(a) - len(b), -1, -1):
        coef = a[i + len(b) - 1]
        q[i] = coef
        for j, bj in enumerate(b):
            a[i + j] = (a[i + j] - coef * bj) % mod
    return q, a[: len(b) - 1]


def slope_split(quartic, p: int | None = None, N: int = DEFAULT_PADIC_PRECISION) -> PAdicElement:
    """delta0 * delta1 mod p^N for an ordinary quartic."""
    p = p or quartic.p
    low, _, _, _ = slope_factors(quartic, p, N)
    val = low[0]
    v = ord_p(val, p) if val else N
    if v != 1:
        raise PrecisionLoss(f"ord_p(delta0 delta1) = {v}, expected 1")
    return PAdicElement(p=p, N=N, value=val, valuation=v)


def recover_ap(quartic, p: int | None = None, N: int = DEFAULT_PADIC_PRECISION, w0: int = 3) -> tuple:
    """Hecke eigenvalue candidates alpha + p^w0 / alpha, alpha^2 = delta0 delta1 / p, mod p^N."""
    p = p or quartic.p
    prod = slope_split(quartic, p, N + 1)
    u = (prod.value // p) % p ** N
    try:
        roots = sqrt_mod_prime_power(u, p, N)
    except ValueError as exc:
        raise NotSquare(str(exc)) from None
    if not roots:
        raise NotSquare(f"delta0 delta1 / p is not a square mod {p}")
    mod = p ** N
    vals = sorted({(a + p ** w0 * pow(a, -1, mod)) % mod for a in roots})
    if len(vals) == 1:
        vals = vals * 2
    return tuple(vals)


def embed_quadratic(x: Fraction, y: Fraction, D: int, p: int, N: int) -> list:
    """Images of x + y sqrt(D) in Z/p^N under both p-adic square roots of D."""
    mod = p ** N
    roots = sqrt_mod_prime_power(D, p, N)
    out = []
    for r in roots:
        val = (Fraction(x) + Fraction(y) * r)
        out.append(val.numerator * pow(val.denominator, -1, mod) % mod)
    return out


def match_candidates(candidates, target_vals, p: int, N: int) -> bool:
    """True when some candidate equals +-target modulo p^N."""
    mod = p ** N
    cset = {c % mod for c in candidates}
    return any(t % mod in cset or (-t) % mod in cset for t in target_vals)


# ---------------------------------------------------------------- row verification

def _eps_character(eps: int) -> QuadCharacter:
    return QuadCharacter(eps)


def _asai_with_sign(form: HilbertEigenform, p: int, sigma: int) -> LocalEulerFactor:
    fac = asai_factor(form, p)
    if splitting_type(form.field, p) != "inert" or sigma == 1:
        return fac
    # inert sign flips the degree-2 piece carrying a_p
    a = -fac.coeffs[1]
    w = 2 * form.w0
    coeffs = pmul([1, a, p ** w], [1, 0, -form.centralChar(p) * p ** w])
    return LocalEulerFactor(p=p, coeffs=tuple(coeffs), weight=fac.weight, provenance="asai", flags=fac.flags)


def predicted_factor(row: MatchRow, form: HilbertEigenform, p: int, eps: int, sigma: int) -> list:
    """(1 - chi(p) p^2 T) * L_p(f, T/p, Asai, eps)."""
    asai = tate_twist(_asai_with_sign(form, p, sigma), 1)
    twisted = twist_char(asai, _eps_character(eps))
    return pmul([1, -row.chi(p) * p ** 2], list(twisted.coeffs))


def predicted_trace(row: MatchRow, form: HilbertEigenform, p: int, eps: int, sigma: int) -> Fraction:
    """chi(p) p^2 + eps(p) A_p / p."""
    A = -_asai_with_sign(form, p, sigma).coeffs[1]
    return row.chi(p) * p ** 2 + _eps_character(eps)(p) * Fraction(A, p)


def hgm_factor(row: MatchRow, p: int, size_cap: int = DEFAULT_SIZE_CAP) -> LocalEulerFactor:
    return local_factor_direct(row.data, row.z, p, weight=4, allow_degenerate=True, size_cap=size_cap)


def hgm_trace_value(row: MatchRow, p: int, size_cap: int = DEFAULT_SIZE_CAP) -> Fraction:
    spec = classify_primes(row.data, row.z)
    if p in spec.degeneratePrimes:
        # the sum sees only part of the motive; use the completed factor
        return Fraction(-hgm_factor(row, p, size_cap).coeffs[1])
    return trace_sequence(row.data, row.z, p, 1).values[0]


def _is_good(row: MatchRow, form: HilbertEigenform, p: int) -> bool:
    spec = classify_primes(row.data, row.z)
    if p in row.badFactors:
        return False
    if not spec.is_good(p, allow_degenerate=True):
        return False
    return form.levelNorm % p != 0 and kronecker(form.field.disc, p) != 0


def _eps_options(row: MatchRow) -> list:
    printed = row.eps if row.eps is not None else 1
    out = [printed]
    out.extend(e for e in row.epsAlternatives if e not in out)
    return out


def verify_row(row: MatchRow, form: HilbertEigenform, pmax: int = 200, mode: str = "trace",
               primes=None, size_cap: int = DEFAULT_SIZE_CAP, fit_eps: bool = True) -> MatchReport:
    """Check the row against the form prime by prime.

    primes: explicit list to check (a missing eigenvalue is then a failure); otherwise all
    good p <= pmax, skipping those without eigenvalue data.
    The inert sign sigma and, when fit_eps is set, the twist among the listed alternatives
    are fitted jointly: the first pair consistent at every checked prime wins.
    """
    if mode not in ("trace", "full"):
        raise ValueError("mode must be trace or full")
    explicit = primes is not None
    plist = sorted(primes) if explicit else list(primerange(2, pmax + 1))
    verdicts = {}
    observed = {}
    for p in plist:
        if not _is_good(row, form, p):
            if explicit:
                verdicts[p] = {"p": p, "mode": mode, "status": "checked", "pass": False,
                               "details": "not a good prime for this row"}
            else:
                verdicts[p] = {"p": p, "mode": mode, "status": "skipped", "pass": True, "details": "bad prime"}
            continue
        if not form.has_eigenvalues(p):
            if explicit:
                verdicts[p] = {"p": p, "mode": mode, "status": "checked", "pass": False,
                               "details": "missing eigenvalue"}
            else:
                verdicts[p] = {"p": p, "mode": mode, "status": "skipped", "pass": True,
                               "details": "no eigenvalue data"}
            continue
        if mode == "full":
            if p ** row.data.degree > size_cap:
                verdicts[p] = {"p": p, "mode": mode, "status": "skipped", "pass": True,
                               "details": "above size cap"}
                continue
            observed[p] = list(hgm_factor(row, p, size_cap).coeffs)
        else:
            observed[p] = hgm_trace_value(row, p, size_cap)

    def check(p, eps, sigma):
        if mode == "full":
            return trim(predicted_factor(row, form, p, eps, sigma)) == trim(observed[p])
        return predicted_trace(row, form, p, eps, sigma) == observed[p]

    eps_opts = _eps_options(row) if fit_eps else [_eps_options(row)[0]]
    inert = [p for p in observed if splitting_type(form.field, p) == "inert"]
    chosen = None
    for eps in eps_opts:
        for sigma in (-1, 1):
            if all(check(p, eps, sigma) for p in observed):
                chosen = (eps, sigma)
                break
        if chosen:
            break
    notes = []
    if chosen is None:
        chosen = (eps_opts[0], -1)
        notes.append("no (eps, sigma) pair is consistent at every checked prime")
    eps, sigma = chosen
    if chosen[0] != eps_opts[0]:
        notes.append(f"twist refit: listed eps={eps_opts[0]} fails, eps={eps} matches")
    if not inert:
        sigma_out = None
        notes.append("no inert prime with data; sigma undetermined")
    else:
        sigma_out = sigma
    for p in observed:
        ok = check(p, eps, sigma)
        if mode == "full":
            exp = predicted_factor(row, form, p, eps, sigma)
            det = f"{format_poly(observed[p])}" + ("" if ok else f" != {format_poly(exp)}")
        else:
            exp = predicted_trace(row, form, p, eps, sigma)
            det = f"H={observed[p]} predicted={exp}"
        verdicts[p] = {"p": p, "mode": mode, "status": "checked", "pass": bool(ok),
                       "split": splitting_type(form.field, p), "details": det}
    return MatchReport(row=row.id, mode=mode, verdicts=[verdicts[p] for p in sorted(verdicts)],
                       chi=row.chi.disc, fieldDisc=form.field.disc, sigma=sigma_out, eps=eps,
                       epsPrinted=row.eps, provisional=row.provisional, notes=notes)


# ---------------------------------------------------------------- conductor heuristics

def conductor_heuristic(row: MatchRow) -> dict:
    z = row.z
    u = 1 - z
    N1_primes = set(prime_divisors(row.data.lcmDen)) | prime_divisors(z.numerator) | prime_divisors(z.denominator)
    N1 = 1
    for p in N1_primes:
        N1 *= p
    N2 = abs(squarefree_part(u.numerator)) if u != 0 else 1
    sp = {}
    for p in sorted(N1_primes):
        sp[p] = str(sum((Fraction(ord_p(a, p)) + Fraction(1, p - 1) for a in row.data.alpha), Fraction(0)))
    record = {"row": row.id, "N1": N1, "N1_primes": sorted(N1_primes), "N2": N2,
              "prediction": N1 * N2, "s_p": sp, "comments": []}
    c = record["comments"]
    if row.conductor:
        N = row.conductor
        record["observed"] = N
        record["N2_divides_N"] = N % N2 == 0
        extra = prime_divisors(N) - N1_primes - prime_divisors(N2)
        record["unexpected_primes"] = sorted(extra)
        for p in sorted(prime_divisors(N)):
            c.append(f"p={p}: ord_p(N)={ord_p(N, p)}" + (" (from 1-z)" if N2 % p == 0 else ""))
    return record
