"""Real quadratic fields, Hilbert eigenform data, and Asai local factors."""
from __future__ import annotations

import hashlib
import json
import logging
import os
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import httpx
from filelock import FileLock

from .errors import (MissingEigenvalue, NetworkError, NonIntegralCoefficient, NotDivisible, NotFound,
                     ParseError, RamifiedTwist)
from .ntheory import is_fundamental_discriminant, kronecker
from .poly import pmul
from .trace import LocalEulerFactor

log = logging.getLogger(__name__)

DEFAULT_LMFDB_URL = "https://www.lmfdb.org/api"
DATA_DIR = Path(__file__).parent / "data"


@dataclass(frozen=True)
class QuadField:
    disc: int

    def __post_init__(self):
        if self.disc <= 1 or not is_fundamental_discriminant(self.disc):
            raise ValueError(f"{self.disc} is not a positive fundamental discriminant")


@dataclass(frozen=True)
class QuadCharacter:
    disc: int = 1

    def __post_init__(self):
        if self.disc != 1 and not is_fundamental_discriminant(self.disc):
            raise ValueError(f"{self.disc} is not a fundamental discriminant")

    def __call__(self, n: int) -> int:
        return 1 if self.disc == 1 else kronecker(self.disc, n)

    @property
    def trivial(self) -> bool:
        return self.disc == 1

    def __str__(self) -> str:
        return str(self.disc)


@dataclass(frozen=True)
class QuadElement:
    """x + y*w in the ring with discriminant disc; w = (1+sqrt(disc))/2 for odd disc, else sqrt(disc/4)."""
    x: Fraction
    y: Fraction
    disc: int = 1

    @property
    def _radicand(self) -> int:
        return self.disc if self.disc % 2 else self.disc // 4

    def _ab(self):
        """(a, b) with value a + b*sqrt(radicand)."""
        if self.disc % 2:
            return self.x + self.y / 2, self.y / 2
        return self.x, self.y

    @classmethod
    def _from_ab(cls, a, b, disc):
        if disc % 2:
            return cls(a - b, 2 * b, disc)
        return cls(a, b, disc)

    def __add__(self, other):
        other = self._coerce(other)
        return QuadElement(self.x + other.x, self.y + other.y, self.disc)

    def __neg__(self):
        return QuadElement(-self.x, -self.y, self.disc)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __mul__(self, other):
        other = self._coerce(other)
        a1, b1 = self._ab()
        a2, b2 = other._ab()
        r = self._radicand
        return self._from_ab(a1 * a2 + r * b1 * b2, a1 * b2 + a2 * b1, self.disc)

    __rmul__ = __mul__
    __radd__ = __add__

    def _coerce(self, other):
        if isinstance(other, QuadElement):
            if other.disc != self.disc and other.y and self.y:
                raise ValueError("elements of different fields")
            return QuadElement(other.x, other.y, max(self.disc, other.disc) if other.y else self.disc)
        return QuadElement(Fraction(other), Fraction(0), self.disc)

    def conj(self):
        a, b = self._ab()
        return self._from_ab(a, -b, self.disc)

    @property
    def is_rational(self) -> bool:
        return self.y == 0

    def rational(self) -> Fraction:
        if self.y:
            raise ValueError(f"{self} is irrational")
        return self.x

    def to_float(self) -> float:
        a, b = self._ab()
        return float(a) + float(b) * self._radicand ** 0.5

    def embed_mod(self, root: int, modulus: int) -> int:
        """Image in Z/modulus given a square root of the radicand modulo `modulus`."""
        a, b = self._ab()
        val = Fraction(a) + Fraction(b) * root
        return val.numerator * pow(val.denominator, -1, modulus) % modulus

    def __str__(self) -> str:
        if not self.y:
            return str(self.x)
        return f"{self.x}{'+' if self.y > 0 else '-'}{abs(self.y)}w"


@dataclass(frozen=True)
class HilbertEigenform:
    field: QuadField
    levelNorm: int
    weight: tuple = (2, 4)
    centralChar: QuadCharacter = QuadCharacter(1)
    coeffDisc: int = 1
    eigenvalues: dict = field(default_factory=dict)  # (p, conj) -> QuadElement
    source: str = "manual"
    label: str = ""
    levelDescription: str = ""

    @property
    def w0(self) -> int:
        return max(self.weight) - 1

    def eigenvalue(self, p: int, conj: int = 0) -> QuadElement:
        try:
            return self.eigenvalues[(p, conj)]
        except KeyError:
            raise MissingEigenvalue(f"no eigenvalue for the prime {p} (conj={conj})") from None

    def has_eigenvalues(self, p: int) -> bool:
        kind = splitting_type(self.field, p)
        need = [(p, 0), (p, 1)] if kind == "split" else [(p, 0)]
        return all(k in self.eigenvalues for k in need)

    def primes(self) -> list:
        return sorted({p for p, _ in self.eigenvalues})

    def to_dict(self) -> dict:
        return {
            "field_disc": self.field.disc,
            "level_norm": self.levelNorm,
            "level": self.levelDescription,
            "weight": list(self.weight),
            "central_char_disc": self.centralChar.disc,
            "coeff_field_disc": self.coeffDisc,
            "label": self.label,
            "eigenvalues": [{"label": {"p": p, "conj": c}, "a": [str(v.x), str(v.y)]}
                            for (p, c), v in sorted(self.eigenvalues.items())],
            "source": self.source,
        }


def splitting_type(F: QuadField, p: int) -> str:
    k = kronecker(F.disc, p)
    return {1: "split", -1: "inert", 0: "ramified"}[k]


# ---------------------------------------------------------------- Asai factors

def asai_split_coeffs(s, s2, n, n2) -> list:
    """Coefficients of prod (1 - rT) over r in {aa', ab', ba', bb'} from a+b=s, ab=n, a'+b'=s2, a'b'=n2.

    Symmetric-function expansion: e1 = s s2, e2 = n2 s^2 + n s2^2 - 2 n n2,
    e3 = n n2 s s2, e4 = (n n2)^2.
    """
    e1 = s * s2
    e2 = n2 * s * s + n * s2 * s2 - 2 * n * n2
    e3 = n * n2 * s * s2
    e4 = (n * n2) ** 2
    return [1, -e1, e2, -e3, e4]


def _to_int(c, what: str) -> int:
    if isinstance(c, QuadElement):
        if not c.is_rational:
            raise NonIntegralCoefficient(f"{what} is irrational: {c}")
        c = c.x
    c = Fraction(c)
    if c.denominator != 1:
        raise NonIntegralCoefficient(f"{what} is not an integer: {c}")
    return int(c)


def asai_factor(form: HilbertEigenform, p: int) -> LocalEulerFactor:
    """Degree-4 Asai factor at a prime p coprime to the level norm."""
    if form.levelNorm % p == 0:
        raise ValueError(f"p={p} divides the level norm")
    w0 = form.w0
    kind = splitting_type(form.field, p)
    psi = form.centralChar
    if kind == "split":
        a = form.eigenvalue(p, 0)
        b = form.eigenvalue(p, 1)
        n = p ** w0
        # only a*a' and a^2 + a'^2 enter, so these must be rational
        coeffs = [_to_int(c, f"Asai coefficient c_{i} at {p}")
                  for i, c in enumerate(asai_split_coeffs(a, b, n, n))]
    elif kind == "inert":
        a = _to_int(form.eigenvalue(p, 0), f"a_p at {p}")
        coeffs = pmul([1, -a, p ** (2 * w0)], [1, 0, -psi(p) * p ** (2 * w0)])
    else:
        a = _to_int(form.eigenvalue(p, 0), f"a_p at {p}")
        n = p ** w0
        coeffs = pmul([1, -(a * a - 2 * n), n * n], [1, -psi(p) * n])
    return LocalEulerFactor(p=p, coeffs=tuple(coeffs), weight=2 * w0, provenance="asai",
                            flags=frozenset())


def asai_trace(form: HilbertEigenform, p: int) -> int:
    """Trace of Frobenius on the Asai factor (minus the linear coefficient)."""
    return -asai_factor(form, p).coeffs[1]


def twist_char(factor: LocalEulerFactor, eps: QuadCharacter) -> LocalEulerFactor:
    """Quadratic twist of an Euler factor: T -> eps(p) T."""
    e = eps(factor.p)
    if e == 0:
        raise RamifiedTwist(f"eps={eps.disc} is ramified at p={factor.p}")
    coeffs = tuple(c * e ** i for i, c in enumerate(factor.coeffs))
    return LocalEulerFactor(p=factor.p, coeffs=coeffs, weight=factor.weight,
                            provenance=factor.provenance, flags=factor.flags)


def tate_twist(factor: LocalEulerFactor, k: int) -> LocalEulerFactor:
    """T -> T/p^k: c_i -> c_i / p^(ik), weight lowered by 2k."""
    p = factor.p
    out = []
    for i, c in enumerate(factor.coeffs):
        d = p ** (i * k)
        if c % d:
            raise NotDivisible(f"p^{i * k} does not divide c_{i}={c}")
        out.append(c // d)
    return LocalEulerFactor(p=p, coeffs=tuple(out), weight=factor.weight - 2 * k,
                            provenance=factor.provenance, flags=factor.flags)


# ---------------------------------------------------------------- fixtures

def _parse_form(obj: dict, source_hint: str = "manual") -> HilbertEigenform:
    try:
        F = QuadField(int(obj["field_disc"]))
        coeff = int(obj.get("coeff_field_disc", 1))
        ev = {}
        for entry in obj["eigenvalues"]:
            lab = entry["label"]
            x, y = entry["a"]
            key = (int(lab["p"]), int(lab.get("conj", 0)))
            if key in ev:
                raise ParseError(f"duplicate eigenvalue label {key}")
            ev[key] = QuadElement(Fraction(x), Fraction(y), coeff)
        weight = tuple(obj.get("weight", [2, 4]))
        return HilbertEigenform(
            field=F,
            levelNorm=int(obj["level_norm"]),
            weight=weight,
            centralChar=QuadCharacter(int(obj.get("central_char_disc", 1))),
            coeffDisc=coeff,
            eigenvalues=ev,
            source=obj.get("source", source_hint),
            label=obj.get("label", ""),
            levelDescription=obj.get("level", ""),
        )
    except ParseError:
        raise
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"malformed eigenform record: {exc}") from exc


def load_fixture(path) -> HilbertEigenform:
    path = Path(path)
    try:
        obj = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    return _parse_form(obj, "fixture")


def fixture_dir(override=None) -> Path:
    """Eigenform directory inside a data directory (the bundled one by default)."""
    return (Path(override) if override else DATA_DIR) / "eigenforms"


def load_row_form(row: int, fixtures=None):
    """Eigenform fixture for a row id, or None when none is bundled."""
    index = json.loads((fixture_dir(fixtures) / "index.json").read_text())
    name = index.get(str(row))
    if name is None:
        return None
    return load_fixture(fixture_dir(fixtures) / name)


def cache_dir() -> Path:
    return Path(os.environ.get("MOTIVEFORGE_CACHE", Path.home() / ".cache" / "motiveforge"))


def _convert_lmfdb(record: dict) -> dict:
    """Map an LMFDB Hilbert-form record onto the fixture schema."""
    field_label = record["field_label"]  # e.g. "2.2.5.1"
    disc = int(field_label.split(".")[2])
    ev = []
    primes = record.get("primes") or []
    values = record.get("hecke_eigenvalues") or []
    seen = {}
    for prime, val in zip(primes, values):
        p = int(prime["p"]) if isinstance(prime, dict) else int(prime)
        conj = seen.get(p, 0)
        seen[p] = conj + 1
        if isinstance(val, (list, tuple)):
            a = [str(Fraction(val[0])), str(Fraction(val[1]) if len(val) > 1 else 0)]
        else:
            a = [str(Fraction(val)), "0"]
        ev.append({"label": {"p": p, "conj": conj}, "a": a})
    return {
        "field_disc": disc,
        "level_norm": int(record["level_norm"]),
        "weight": record.get("weight", [2, 4]),
        "central_char_disc": 1,
        "coeff_field_disc": int(record.get("hecke_field_disc", disc)),
        "label": record.get("label", ""),
        "eigenvalues": ev,
        "source": "lmfdb",
    }


def fetch_lmfdb(label: str, base_url: str | None = None, offline: bool = False,
                transport: httpx.BaseTransport | None = None, cache: Path | None = None) -> HilbertEigenform:
    """Fetch a Hilbert newform by label, caching the raw response on disk."""
    base_url = base_url or os.environ.get("MOTIVEFORGE_LMFDB_URL", DEFAULT_LMFDB_URL)
    cache = Path(cache) if cache else cache_dir()
    cache.mkdir(parents=True, exist_ok=True)
    key = hashlib.sha256(f"{base_url}|hmf_forms|{label}".encode()).hexdigest()[:32]
    path = cache / f"lmfdb-{key}.json"
    with FileLock(str(path) + ".lock"):
        if path.exists():
            body = json.loads(path.read_text())
        elif offline:
            raise NotFound(f"{label} not in cache and offline mode is on")
        else:
            url = f"{base_url.rstrip('/')}/hmf_forms/"
            try:
                with httpx.Client(transport=transport, timeout=30.0) as client:
                    resp = client.get(url, params={"label": label, "_format": "json"})
            except httpx.HTTPError as exc:
                raise NetworkError(f"LMFDB request failed: {exc}") from exc
            if resp.status_code == 404:
                raise NotFound(f"no form with label {label}")
            if resp.status_code != 200:
                raise NetworkError(f"LMFDB returned HTTP {resp.status_code}")
            body = resp.json()
            path.write_text(json.dumps(body, sort_keys=True))
    records = body.get("data", body if isinstance(body, list) else [])
    if not records:
        raise NotFound(f"no form with label {label}")
    return _parse_form(_convert_lmfdb(records[0]), "lmfdb")
