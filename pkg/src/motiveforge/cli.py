"""Command-line entry point: motiveforge <group> <command> [options]."""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

from . import __version__
from .core import parse_hypergeometric
from .errors import MotiveForgeError
from .ffield import DEFAULT_SIZE_CAP
from .poly import format_poly

log = logging.getLogger("motiveforge")

REPORT_SCHEMA = 1
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


@dataclass
class RunConfig:
    command: str
    row: int | None = None
    alpha: str | None = None
    beta: str | None = None
    z: str | None = None
    primes: list = field(default_factory=list)
    pmax: int | None = None
    mode: str | None = None
    allow_degenerate: bool = False
    offline: bool = False
    precision_bits: int | None = None
    size_cap: int = DEFAULT_SIZE_CAP
    fixtures: str | None = None
    cache: str | None = None
    format: str = "table"
    jobs: int = 1
    options: dict = field(default_factory=dict)


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- argument parsing

def _primes(text: str) -> list:
    out = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part:
            lo, hi = part.split("-")
            from .ntheory import primerange
            out.extend(primerange(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    return out


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--format", choices=["json", "table"], default="table", help="output format")
    p.add_argument("--fixtures", help="data directory with tables and eigenforms/ (default: bundled)")
    p.add_argument("--cache", help="LMFDB cache directory (default: $MOTIVEFORGE_CACHE)")
    p.add_argument("--offline", action="store_true", help="never touch the network")
    p.add_argument("--jobs", type=int, default=1, help="worker processes over primes")
    p.add_argument("--size-cap", type=int, default=DEFAULT_SIZE_CAP, help="largest finite field allowed")
    p.add_argument("--compare", action="store_true", help="omit the timestamp header for byte comparison")
    p.add_argument("-v", "--verbose", action="store_true")


def _add_data(p: argparse.ArgumentParser, need_z: bool = True):
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--row", type=int, help="row id from the bundled tables")
    g.add_argument("--alpha", help='e.g. "1/2,1/3,2/3,1/6,5/6"')
    p.add_argument("--beta", default=None, help="defaults to all ones")
    if need_z:
        p.add_argument("--z", help="specialization point t (rational)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="motiveforge", description=__doc__)
    ap.add_argument("--version", action="version", version=__version__)
    groups = ap.add_subparsers(dest="group", required=True)

    hgm = groups.add_parser("hgm", help="finite-field hypergeometric sums").add_subparsers(dest="cmd", required=True)
    p = hgm.add_parser("trace", help="H_{p^r} for r = 1..rmax")
    _add_data(p)
    p.add_argument("--p", required=True, type=_primes)
    p.add_argument("--rmax", type=int, default=1)
    p.add_argument("--allow-degenerate", action="store_true")
    p.add_argument("--backend", choices=["modular", "complex"], default="modular")
    p.add_argument("--precision-bits", type=int)
    _add_common(p)
    p = hgm.add_parser("lfactor", help="local Euler factor at p")
    _add_data(p)
    p.add_argument("--p", required=True, type=_primes)
    p.add_argument("--method", choices=["direct", "selfdual"], default="direct")
    p.add_argument("--rmax", type=int, help="traces used by the self-dual method")
    p.add_argument("--weight", type=int)
    p.add_argument("--allow-degenerate", action="store_true")
    _add_common(p)

    asai = groups.add_parser("asai", help="Asai factors").add_subparsers(dest="cmd", required=True)
    p = asai.add_parser("factor", help="Asai factor of an eigenform at p")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--row", type=int)
    g.add_argument("--form", help="eigenform JSON file")
    p.add_argument("--p", required=True, type=_primes)
    p.add_argument("--eps", type=int, default=1, help="twist discriminant (1 = none)")
    p.add_argument("--tate", type=int, default=0, help="Tate twist T -> T/p^k")
    _add_common(p)

    match = groups.add_parser("match", help="conjecture verification").add_subparsers(dest="cmd", required=True)
    p = match.add_parser("verify", help="check a row against its eigenform")
    p.add_argument("--row", type=int, required=True)
    p.add_argument("--pmax", type=int, default=200)
    p.add_argument("--primes", type=_primes, help="explicit primes (missing data then fails)")
    p.add_argument("--mode", choices=["trace", "full"], default="trace")
    p.add_argument("--no-eps-fit", action="store_true", help="use only the listed twist")
    _add_common(p)
    p = match.add_parser("recover", help="recover a Hecke eigenvalue up to sign from the quartic at p")
    p.add_argument("--row", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--N", type=int, default=20, help="p-adic precision")
    _add_common(p)
    p = match.add_parser("infer", help="infer chi and d_F from computed factors")
    p.add_argument("--row", type=int, required=True)
    p.add_argument("--count", type=int, default=15, help="number of good primes")
    _add_common(p)
    p = match.add_parser("conductor", help="conductor heuristics for a row")
    p.add_argument("--row", type=int, required=True)
    _add_common(p)

    series = groups.add_parser("series", help="Ramanujan-type series").add_subparsers(dest="cmd", required=True)
    for name in ("eval", "check"):
        p = series.add_parser(name)
        p.add_argument("--id", required=True, help='registry id, or "all" for check')
        p.add_argument("--digits", type=int, default=40)
        _add_common(p)
    p = series.add_parser("modular", help="rho and the eta-quotient parametrization at tau")
    p.add_argument("--tau", default="0.5+1.5j")
    p.add_argument("--digits", type=int, default=30)
    _add_common(p)

    cong = groups.add_parser("congruence", help="supercongruences").add_subparsers(dest="cmd", required=True)
    p = cong.add_parser("scan")
    p.add_argument("--pmax", type=int, default=97)
    _add_common(p)

    lf = groups.add_parser("lfunc", help="functional equation checks").add_subparsers(dest="cmd", required=True)
    p = lf.add_parser("check")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--row", type=int)
    g.add_argument("--zeta", action="store_true", help="Riemann zeta sanity configuration")
    p.add_argument("--digits", type=int, default=5, help="required agreement in decimal digits")
    p.add_argument("--cutoff", type=int, help="number of Dirichlet coefficients")
    _add_common(p)

    fx = groups.add_parser("fixtures", help="eigenform data").add_subparsers(dest="cmd", required=True)
    p = fx.add_parser("fetch", help="fetch a Hilbert newform from LMFDB into the cache")
    p.add_argument("--label", required=True)
    p.add_argument("--url", help="API base (default: $MOTIVEFORGE_LMFDB_URL or the public site)")
    _add_common(p)
    return ap


def resolve_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(command=f"{args.group} {args.cmd}")
    for name in ("row", "alpha", "z", "pmax", "mode", "offline", "fixtures", "cache", "format", "jobs",
                 "allow_degenerate", "precision_bits", "size_cap"):
        if hasattr(args, name) and getattr(args, name) is not None:
            setattr(cfg, name, getattr(args, name))
    if getattr(args, "alpha", None):
        n = len([x for x in args.alpha.split(",") if x.strip()])
        cfg.beta = args.beta or ",".join(["1"] * n)
        if not getattr(args, "z", None):
            raise UsageError("--z is required with --alpha")
    p = getattr(args, "p", None)
    if p is not None:
        cfg.primes = p if isinstance(p, list) else [p]
    if getattr(args, "primes", None):
        cfg.primes = args.primes
    skip = {"group", "cmd", "row", "alpha", "beta", "z", "p", "primes", "pmax", "mode", "offline", "fixtures",
            "cache", "format", "jobs", "allow_degenerate", "precision_bits", "size_cap", "verbose", "compare"}
    cfg.options = {k: v for k, v in sorted(vars(args).items()) if k not in skip and v is not None}
    return cfg


def _data_and_z(cfg: RunConfig):
    if cfg.row is not None:
        from .matcher import load_match_row
        row = load_match_row(cfg.row, cfg.fixtures)
        return row.data, row.z
    from .ntheory import parse_fraction
    return parse_hypergeometric(cfg.alpha, cfg.beta), parse_fraction(cfg.z)


# ---------------------------------------------------------------- command bodies

def _lfactor_job(job):
    from .trace import local_factor_direct, local_factor_selfdual
    data_text, z, p, method, rmax, weight, allow_deg, cap = job
    from .core import HypergeometricData
    data = HypergeometricData.deserialize(data_text)
    if method == "direct":
        f = local_factor_direct(data, z, p, weight=weight, allow_degenerate=allow_deg, size_cap=cap)
    else:
        f = local_factor_selfdual(data, z, p, rmax or (data.degree + 1) // 2, weight=weight, size_cap=cap)
    return f.to_dict()


def cmd_hgm_trace(cfg: RunConfig):
    from .trace import trace_sequence
    data, z = _data_and_z(cfg)
    rows = []
    for p in cfg.primes:
        seq = trace_sequence(data, z, p, cfg.options.get("rmax", 1), allow_degenerate=cfg.allow_degenerate,
                             size_cap=cfg.size_cap, backend=cfg.options.get("backend", "modular"))
        rows.append({"p": p, "H": [str(v) for v in seq.values]})
    body = {"data": data.serialize(), "z": str(z), "traces": rows}
    text = "\n".join(f"p={r['p']}: H = {', '.join(r['H'])}" for r in rows)
    return body, text, True


def cmd_hgm_lfactor(cfg: RunConfig):
    data, z = _data_and_z(cfg)
    jobs = [(data.serialize(), str(z), p, cfg.options.get("method", "direct"), cfg.options.get("rmax"),
             cfg.options.get("weight"), cfg.allow_degenerate, cfg.size_cap) for p in cfg.primes]
    if cfg.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(_lfactor_job, jobs))
    else:
        results = [_lfactor_job(j) for j in jobs]
    body = {"data": data.serialize(), "z": str(z), "factors": results}
    lines = []
    for r in results:
        flags = f"  [{', '.join(r['flags'])}]" if r["flags"] else ""
        lines.append(f"L_{r['p']}(T) = {format_poly(r['coeffs'])}{flags}")
    return body, "\n".join(lines), True


def cmd_asai_factor(cfg: RunConfig):
    from .hilbert import QuadCharacter, asai_factor, load_fixture, load_row_form, tate_twist, twist_char
    if cfg.row is not None:
        form = load_row_form(cfg.row, cfg.fixtures)
        if form is None:
            raise MotiveForgeError(f"no eigenform bundled for row {cfg.row}")
    else:
        form = load_fixture(cfg.options["form"])
    out = []
    for p in cfg.primes:
        f = asai_factor(form, p)
        if cfg.options.get("tate"):
            f = tate_twist(f, cfg.options["tate"])
        if cfg.options.get("eps", 1) != 1:
            f = twist_char(f, QuadCharacter(cfg.options["eps"]))
        out.append(f.to_dict())
    text = "\n".join(f"p={r['p']}: {format_poly(r['coeffs'])}" for r in out)
    return {"form": form.label, "factors": out}, text, True


def cmd_match_verify(cfg: RunConfig):
    from .hilbert import load_row_form
    from .matcher import load_match_row, verify_row
    row = load_match_row(cfg.row, cfg.fixtures)
    form = load_row_form(cfg.row, cfg.fixtures)
    if form is None:
        body = {"row": cfg.row, "provisional": row.provisional, "note": "no eigenform data for this row"}
        return body, f"row {cfg.row}: no eigenform data; nothing to verify", True
    rep = verify_row(row, form, pmax=cfg.pmax or 200, mode=cfg.mode or "trace",
                     primes=cfg.primes or None, size_cap=cfg.size_cap, fit_eps=not cfg.options.get("no_eps_fit"))
    ok = rep.passed or rep.provisional
    return rep.to_dict(), rep.to_table(), ok


def cmd_match_recover(cfg: RunConfig):
    from .hilbert import load_row_form
    from .matcher import (embed_quadratic, hgm_factor, is_ordinary, load_match_row, match_candidates,
                          newton_slopes, recover_ap, strip_linear)
    from .hilbert import splitting_type
    row = load_match_row(cfg.row, cfg.fixtures)
    p, N = cfg.primes[0], cfg.options.get("N", 20)
    quartic = strip_linear(hgm_factor(row, p, cfg.size_cap), row.chi, 2)
    slopes = newton_slopes(quartic)
    body = {"row": cfg.row, "p": p, "N": N, "quartic": list(quartic.coeffs), "slopes": [str(s) for s in slopes.slopes],
            "ordinary": is_ordinary(quartic)}
    ok = True
    if body["ordinary"]:
        cands = recover_ap(quartic, p, N)
        body["candidates"] = [str(c) for c in cands]
        form = load_row_form(cfg.row, cfg.fixtures)
        if form is not None and form.has_eigenvalues(p) and splitting_type(form.field, p) == "split":
            hits = []
            for conj in (0, 1):
                a = form.eigenvalue(p, conj)
                D = form.field.disc
                # a = x + y w with w = (1 + sqrt d)/2 or sqrt(d/4)
                if D % 4 == 1:
                    x, y, rad = a.x + a.y / 2, a.y / 2, D
                else:
                    x, y, rad = a.x, a.y, D // 4
                imgs = embed_quadratic(x, y, rad, p, N)
                if match_candidates(cands, imgs, p, N):
                    hits.append(str(a))
            body["matches_fixture"] = hits
            ok = bool(hits)
    text = (f"row {cfg.row} p={p}: quartic {format_poly(quartic.coeffs)}\n  slopes {slopes}"
            + (f"\n  candidates mod {p}^{N}: {', '.join(body.get('candidates', []))}" if body["ordinary"] else
               "\n  not ordinary")
            + (f"\n  matches fixture eigenvalue(s): {', '.join(body['matches_fixture'])}"
               if "matches_fixture" in body else ""))
    return body, text, ok


def cmd_match_infer(cfg: RunConfig):
    from .matcher import infer_row, load_match_row
    row = load_match_row(cfg.row, cfg.fixtures)
    body = infer_row(row, cfg.options.get("count", 15), cfg.size_cap)
    exp = body["expected"]
    text = (f"row {cfg.row}: chi={body['chi']} d_F candidates " +
            ", ".join(f"{D} ({s}/{n})" for D, s, n in body["disc_ranking"]) +
            f"  table: chi={exp['chi']} d_F={exp['field_disc']}")
    return body, text, body["match"] or row.provisional


def cmd_match_conductor(cfg: RunConfig):
    from .matcher import conductor_heuristic, load_match_row
    rec = conductor_heuristic(load_match_row(cfg.row, cfg.fixtures))
    text = (f"row {cfg.row}: N1={rec['N1']} N2={rec['N2']} prediction={rec['prediction']}"
            + (f" observed={rec['observed']}" if "observed" in rec else ""))
    return rec, text, True


def cmd_series(cfg: RunConfig, check: bool):
    import mpmath
    from .series import check_identity, evaluate_series, get_series, load_registry
    sid = cfg.options["id"]
    digits = cfg.options.get("digits", 40)
    if not check:
        spec = get_series(sid)
        val = evaluate_series(spec, digits)
        body = {"id": sid, "value": mpmath.nstr(val.value, digits), "terms": val.terms,
                "tail_bound": mpmath.nstr(val.tailBound, 5)}
        return body, f"{sid} = {body['value']}  ({val.terms} terms, tail < {body['tail_bound']})", True
    specs = list(load_registry().values()) if sid == "all" else [get_series(sid)]
    results = [check_identity(s, digits) for s in specs]
    body = {"checks": [r.to_dict() for r in results]}
    text = "\n".join(f"{r.id}: {'pass' if r.passed else 'FAIL'}  residual {mpmath.nstr(r.residual, 3)}  {r.label}"
                     for r in results)
    return body, text, all(r.passed for r in results)


def cmd_series_modular(cfg: RunConfig):
    from .series import check_can0tau
    tau = complex(cfg.options["tau"].replace(" ", ""))
    res = check_can0tau(tau, cfg.options.get("digits", 30))
    d = res.to_dict()
    return d, f"tau={d['tau']}: rho={d['rho']} residual={d['residual']} {'pass' if res.passed else 'FAIL'}", res.passed


def cmd_congruence_scan(cfg: RunConfig):
    from .series import supercongruence_scan
    rep = supercongruence_scan(cfg.pmax or 97)
    bad = [r for r in rep["rows"] if not r["pass"]]
    text = f"{len(rep['rows'])} primes checked, {len(bad)} failures" + "".join(
        f"\n  p={r['p']}: residue {r['residue']} vs b_p {r['b_p']} ({r['status']})" for r in bad)
    return rep, text, rep["pass"]


def cmd_lfunc_check(cfg: RunConfig):
    from .lfunc import check_row, dirichlet_series, fe_residual, zeta_config, zeta_factors
    tol = 10.0 ** (-cfg.options.get("digits", 5))
    if cfg.options.get("zeta"):
        B = cfg.options.get("cutoff") or 60
        rep = fe_residual(zeta_config(B), dirichlet_series(zeta_factors(B), B), [0.5 + 1j, 0.5 + 2j, 0.5 + 3j])
        body = rep.to_dict()
        return body, f"zeta: residual {rep.residual:.3e}", rep.residual < tol
    res = check_row(cfg.row, cutoff=cfg.options.get("cutoff"))
    best = res["best"]
    text = "\n".join([f"row {cfg.row} cutoff={res['cutoff']}"] +
                     [f"  {t['label']}: residual {t['residual']:.3e} sign {t['sign']}" for t in res["tried"]] +
                     [f"best: {best['config']['label']} residual {best['residual']:.3e} sign {best['sign']}"])
    return res, text, best["residual"] < tol


def cmd_fixtures_fetch(cfg: RunConfig):
    from .hilbert import fetch_lmfdb
    form = fetch_lmfdb(cfg.options["label"], base_url=cfg.options.get("url"), offline=cfg.offline, cache=cfg.cache)
    d = form.to_dict()
    return d, f"{form.label}: field disc {form.field.disc}, {len(form.eigenvalues)} eigenvalues", True


DISPATCH = {
    "hgm trace": cmd_hgm_trace,
    "hgm lfactor": cmd_hgm_lfactor,
    "asai factor": cmd_asai_factor,
    "match verify": cmd_match_verify,
    "match recover": cmd_match_recover,
    "match infer": cmd_match_infer,
    "match conductor": cmd_match_conductor,
    "series eval": lambda c: cmd_series(c, False),
    "series check": lambda c: cmd_series(c, True),
    "series modular": cmd_series_modular,
    "congruence scan": cmd_congruence_scan,
    "lfunc check": cmd_lfunc_check,
    "fixtures fetch": cmd_fixtures_fetch,
}


# ---------------------------------------------------------------- entry points

def _emit(cfg: RunConfig, body, text: str, ok: bool, compare: bool, out):
    header = {"schema": REPORT_SCHEMA, "version": __version__}
    if not compare:
        header["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
    if cfg.format == "json":
        doc = {"header": header, "config": asdict(cfg), "result": body, "ok": ok}
        out.write(json.dumps(doc, indent=1, sort_keys=True, default=str) + "\n")
    else:
        out.write("# config " + json.dumps(asdict(cfg), sort_keys=True, default=str) + "\n")
        out.write(text + "\n")


VALUE_FLAGS = ("--z", "--alpha", "--beta", "--eps", "--tau")


def _join_negative_values(argv):
    # argparse treats "-1/512000" as an option; rewrite "--z -1/..." as "--z=-1/..."
    out, i = [], 0
    while i < len(argv):
        a = argv[i]
        if a in VALUE_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-") and len(argv[i + 1]) > 1 \
                and (argv[i + 1][1].isdigit() or argv[i + 1][1] == "."):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
            continue
        out.append(a)
        i += 1
    return out


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    argv = _join_negative_values(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if getattr(args, "verbose", False) else logging.WARNING)
    try:
        cfg = resolve_config(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"motiveforge: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        body, text, ok = DISPATCH[cfg.command](cfg)
    except (MotiveForgeError, KeyError, ValueError, OSError) as exc:
        diag = {"error": type(exc).__name__, "message": str(exc), "command": cfg.command}
        if cfg.format == "json":
            out.write(json.dumps({"config": asdict(cfg), "diagnostic": diag, "ok": False}, sort_keys=True,
                                 default=str) + "\n")
        else:
            print(f"motiveforge: {diag['error']}: {diag['message']}", file=sys.stderr)
        return EXIT_FAIL
    _emit(cfg, body, text, ok, getattr(args, "compare", False), out)
    return EXIT_OK if ok else EXIT_FAIL


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
