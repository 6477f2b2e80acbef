"""Command-line front end: family scans, verification suites and the class-group cache."""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import os
import platform
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from . import __version__
from .arith import is_fundamental_discriminant
from .cache import ClassGroupCache
from .characters import QuadraticCharacter, bernoulli1, bernoulli1_ord3, units_count
from .classgroups import class_group, fundamental_discriminants, preload_h3
from .curves import curve_by_label, load_curve_table, sextic_curve
from .eisenstein import check_eisenstein_congruence, congruence_rhs_nontrivial, congruence_rhs_trivial
from .lfunc import InfeasibleError, check_twist, write_report
from .rootnumbers import quadratic_twist_root_number, sextic_root_number
from .scanner import (
    cubic_hypotheses,
    cubic_prime_set,
    cubic_scan,
    cubic_twists,
    evaluate_quadratic_twists,
    quadratic_density,
    scan_sextic,
    sextic_criterion,
    sextic_density,
)

ENV_PREFIX = "GL_"


@dataclass
class Config:
    X: int = 10**4
    cap: int = 10**4
    cache: str | None = None
    workers: int = 1
    slack: float = 0.05
    precision: int = 20
    out: str | None = None
    curve: str = "19a1"
    curves_file: str | None = None
    d: int = 108
    K: int = -23
    bound: int = 500
    max: int = 10**4
    domain: str = "fundamental"
    family: str = "sextic"

    def validate(self) -> "Config":
        for name in ("X", "cap", "precision", "bound", "max"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")
        if not 0 <= self.slack < 1:
            raise ValueError("slack must lie in [0, 1)")
        return self


_FIELDS = {f.name: f for f in dataclasses.fields(Config)}


def _coerce(name: str, raw: str):
    kind = _FIELDS[name].type
    if "int" in kind:
        return int(raw)
    if "float" in kind:
        return float(raw)
    return raw


def read_config_file(path: str | Path) -> dict:
    """key = value lines; blank lines and lines starting with # are ignored."""
    out = {}
    for i, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{i}: expected key = value")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key not in _FIELDS:
            raise ValueError(f"{path}:{i}: unknown key {key!r}")
        out[key] = _coerce(key, raw)
    return out


def resolve_config(args: argparse.Namespace, environ=None) -> Config:
    """Defaults, then the config file, then GL_* variables, then command-line flags."""
    environ = os.environ if environ is None else environ
    values = {}
    if getattr(args, "config", None):
        values.update(read_config_file(args.config))
    for name in _FIELDS:
        raw = environ.get(ENV_PREFIX + name.upper())
        if raw is not None:
            values[name] = _coerce(name, raw)
    for name in _FIELDS:
        v = getattr(args, name, None)
        if v is not None:
            values[name] = v
    return Config(**values).validate()


# ------------------------------------------------------------------ output helpers


class Output:
    def __init__(self, cfg: Config, stem: str, stdout=None):
        self.cfg = cfg
        self.stem = stem
        self.stdout = stdout or sys.stdout
        self.dir = Path(cfg.out) if cfg.out else None
        if self.dir:
            self.dir.mkdir(parents=True, exist_ok=True)

    def path(self, suffix: str) -> Path | None:
        return self.dir / f"{self.stem}{suffix}" if self.dir else None

    def jsonl(self, rows) -> None:
        lines = [json.dumps(r, sort_keys=True) for r in rows]
        p = self.path(".jsonl")
        if p:
            p.write_text("".join(line + "\n" for line in lines))
        else:
            for line in lines:
                print(line, file=self.stdout)

    def table(self, suffix: str, fields: list[str], rows: list[dict]) -> None:
        p = self.path(suffix)
        if not p:
            return
        with p.open("w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=fields, lineterminator="\n")
            w.writeheader()
            w.writerows(rows)

    def meta(self, command: list[str], summary: dict, started: float) -> None:
        p = self.path(".meta.json")
        if not p:
            return
        meta = {
            "command": command,
            "config": dataclasses.asdict(self.cfg),
            "version": __version__,
            "python": platform.python_version(),
            "started": time.strftime("%Y-%m-%dT%H:%M:%S", time.localtime(started)),
            "seconds": round(time.time() - started, 3),
            "summary": summary,
        }
        p.write_text(json.dumps(meta, indent=2, sort_keys=True, default=str) + "\n")


DENSITY_FIELDS = ["family", "X", "sign", "total", "statistic", "count", "empirical", "bound", "slack", "pass", "fit_constant"]


def _curve(cfg: Config):
    extra = load_curve_table(cfg.curves_file) if cfg.curves_file else None
    return curve_by_label(cfg.curve, extra)


# ------------------------------------------------------------------ scan


def cmd_scan(family: str, cfg: Config, out: Output) -> tuple[int, dict]:
    if family == "quadratic":
        E = _curve(cfg)
        records = evaluate_quadratic_twists(E, cfg.X, cfg.domain)
        passing = [r for r in records if r.passed]
        out.jsonl(r.to_json() | {"rank": r.rank} for r in passing)
        reports = quadratic_density(E, cfg.X, cfg.slack, records) if cfg.domain == "fundamental" else []
        summary = {
            "family": family,
            "curve": cfg.curve,
            "X": cfg.X,
            "domain": cfg.domain,
            "rank1_positive": [r.d for r in passing if r.d > 0 and r.rank == 1],
            "rank0_negative": [r.d for r in passing if r.d < 0 and r.rank == 0],
            "passing": len(passing),
        }
        if len(summary["rank1_positive"]) > 50:
            summary["rank1_positive"] = summary["rank1_positive"][:50]
            summary["rank0_negative"] = summary["rank0_negative"][:50]
            summary["truncated"] = True
    elif family == "sextic":
        records = scan_sextic(cfg.X, cfg.cap, cfg.workers)
        out.jsonl(r.to_json() | {"rank": r.rank, "root_number": r.root_number} for r in records if r.passed)
        reports = sextic_density(cfg.X, cfg.slack, cfg.cap, records=records)
        summary = {"family": family, "X": cfg.X, "passing": sum(r.passed for r in records), "scanned": len(records)}
    elif family == "cubic":
        hyp = cubic_hypotheses(cfg.d, cfg.K)
        twists = cubic_twists(cfg.d, cfg.K, cfg.X)
        out.jsonl(
            {"D": t.D, "d": cfg.d, "family": "cubic", "heegner_field": cfg.K, "root_number": t.root_number, "rank": t.rank}
            for t in twists
        )
        reports = [cubic_scan(cfg.d, cfg.K, cfg.X, cfg.slack)]
        summary = {
            "family": family,
            "d": cfg.d,
            "K": cfg.K,
            "X": cfg.X,
            "hypotheses": {c.id: c.holds for c in hyp},
            "primes": cubic_prime_set(cfg.d, cfg.K, min(cfg.X, 500)),
            "counts": reports[0].counts,
            "fit_constant": reports[0].fit_constant,
        }
    else:
        raise ValueError(f"unknown family {family!r}")
    if reports:
        out.table("_density.csv", DENSITY_FIELDS, [r.to_row() for r in reports])
        summary["density"] = [r.to_row() for r in reports]
    return 0, summary


# ------------------------------------------------------------------ verify


def verify_congruence(cfg: Config) -> tuple[bool, dict]:
    E = _curve(cfg)
    if cfg.curve.startswith("E_"):
        psi = QuadraticCharacter.of_field(int(cfg.curve[2:]))
    else:
        psi = QuadraticCharacter(1)
    ok, first = check_eisenstein_congruence(E, psi, cfg.bound)
    info = {"curve": cfg.curve, "psi": repr(psi), "bound": cfg.bound, "holds": ok, "first_failure": first}
    if cfg.K and cfg.K < 0 and is_fundamental_discriminant(cfg.K):
        try:
            if psi.is_trivial:
                rhs = congruence_rhs_trivial(cfg.K, k=cfg.precision)
                info["rhs"] = {"K": cfg.K, "alpha": list(rhs.alpha), "ord3": rhs.ord3}
            else:
                rhs = congruence_rhs_nontrivial(E, psi, cfg.K)
                info["rhs"] = {"K": cfg.K, "ord3": rhs.ord3}
        except ValueError as exc:
            info["rhs"] = {"K": cfg.K, "skipped": str(exc)}
    return ok, info


def class_number_rows(max_abs: int, groups: dict | None = None) -> list[dict]:
    """Bernoulli identity and 3-adic checks for every negative fundamental d with |d| < max_abs."""
    rows = []
    for d in fundamental_discriminants(-(max_abs - 1), -1)[::-1].tolist():
        g = groups.get(d) if groups else None
        g = g or class_group(d)
        chi = QuadraticCharacter(d)
        b = bernoulli1(chi)
        ident = b == Fraction(-2 * g.h, units_count(d))
        v = bernoulli1_ord3(chi)
        rows.append({
            "d": d,
            "h": g.h,
            "h3": g.h3,
            "B1": str(b),
            "identity": ident,
            "ord3": v,
            "integral": d == -3 or v >= 0,
            "h3_implies_unit": g.h3 != 1 or d == -3 or v == 0,
        })
    return rows


def verify_classnumbers(cfg: Config) -> tuple[bool, dict, list[dict]]:
    groups = ClassGroupCache(cfg.cache).load() if cfg.cache else None
    rows = class_number_rows(cfg.max, groups)
    bad = [r["d"] for r in rows if not (r["identity"] and r["integral"] and r["h3_implies_unit"])]
    return not bad, {"checked": len(rows), "failures": bad[:20], "failure_count": len(bad), "cache": cfg.cache}, rows


def rank_items(family: str, max_abs: int, curve_label: str, cap: int = 10**4):
    """(d, twisted curve, closed-form root number, predicted rank or None) for 0 < |d| <= max_abs."""
    if family == "sextic":
        for d in fundamental_discriminants(-max_abs, max_abs).tolist():
            if d % 3 == 1 or d % 9 == 0:
                continue
            rep = sextic_criterion(d, None, cap)
            yield d, sextic_curve(d), sextic_root_number(d).w_global, rep.predicted_rank
    elif family == "quadratic":
        E = curve_by_label(curve_label)
        ranks = {r.d: r.rank for r in evaluate_quadratic_twists(E, max_abs + 1)}
        for d in fundamental_discriminants(-max_abs, max_abs).tolist():
            yield d, E.quadratic_twist(d), quadratic_twist_root_number(E, d), ranks.get(d)
    else:
        raise ValueError(f"rank verification covers sextic and quadratic families, not {family!r}")


def rank_check(d: int, E, w: int, predicted_rank: int | None) -> dict:
    try:
        rv = check_twist(E, w, predicted_rank, label=f"d={d}")
    except InfeasibleError as exc:
        return {"d": d, "w": w, "verdict": "infeasible", "note": str(exc), "result": None}
    return {"d": d, "w": w, "inferred": rv.inferred_root_number, "verdict": rv.verdict, "conductor": rv.conductor, "result": rv}


def verify_ranks(cfg: Config, out: Output) -> tuple[bool, dict]:
    rows = [rank_check(*item) for item in rank_items(cfg.family, cfg.max, cfg.curve, cfg.cap)]
    tally: dict[str, int] = {}
    for r in rows:
        tally[r["verdict"]] = tally.get(r["verdict"], 0) + 1
    p = out.path("_ranks.csv")
    if p:
        write_report([(r["d"], r["result"]) for r in rows if r["result"] is not None], p)
    refuted = [r["d"] for r in rows if r["verdict"] == "refuted"]
    return not refuted, {"family": cfg.family, "max": cfg.max, "verdicts": tally, "refuted": refuted}


def cmd_verify(what: str, cfg: Config, out: Output) -> tuple[int, dict]:
    if what == "congruence":
        ok, info = verify_congruence(cfg)
        keys = ["curve", "psi", "bound", "holds", "first_failure"]
        out.table(".csv", keys, [{k: info[k] for k in keys}])
    elif what == "classnumbers":
        ok, info, rows = verify_classnumbers(cfg)
        if out.dir:
            out.table(".csv", list(rows[0]) if rows else ["d"], rows)
    elif what == "ranks":
        ok, info = verify_ranks(cfg, out)
    else:
        raise ValueError(f"unknown check {what!r}")
    info["what"] = what
    info["pass"] = ok
    return (0 if ok else 1), info


# ------------------------------------------------------------------ cache


def cmd_cache(action: str, cfg: Config, out: Output) -> tuple[int, dict]:
    if not cfg.cache:
        raise ValueError("--cache PATH is required")
    cache = ClassGroupCache(cfg.cache)
    if action == "build":
        n = cache.build(cfg.max, cfg.workers)
        return 0, {"action": action, "rows": n, "max": cfg.max, "path": cfg.cache}
    if action == "stats":
        stats = cache.stats()
        bad = cache.verify(sample=min(100, stats["unique"]))
        stats.update({"action": action, "path": cfg.cache, "sampled_mismatches": bad})
        return (1 if bad else 0), stats
    if action == "vacuum":
        removed = cache.vacuum()
        return 0, {"action": action, "removed": removed, "path": cfg.cache}
    raise ValueError(f"unknown cache action {action!r}")


# ------------------------------------------------------------------ entry point


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--X", type=int, help="scan bound")
    common.add_argument("--curve", help="curve label (builtin table, or E_<d>)")
    common.add_argument("--curves-file", dest="curves_file", help="extra curve table: label | a1 a2 a3 a4 a6")
    common.add_argument("--d", type=int, help="sextic parameter d")
    common.add_argument("--K", type=int, help="imaginary quadratic discriminant")
    common.add_argument("--bound", type=int, help="q-expansion bound")
    common.add_argument("--max", type=int, help="|d| bound for verification and cache builds")
    common.add_argument("--cap", type=int, help="search cap for Heegner fields")
    common.add_argument("--workers", type=int, help="worker processes")
    common.add_argument("--cache", help="class-group cache CSV")
    common.add_argument("--out", help="output directory (stdout when omitted)")
    common.add_argument("--precision", type=int, help="3-adic precision exponent")
    common.add_argument("--slack", type=float, help="relative slack for density bounds")
    common.add_argument("--domain", choices=["fundamental", "printed"], help="discriminant domain for quadratic scans")
    common.add_argument("--family", choices=["sextic", "quadratic"], help="family for rank verification")
    common.add_argument("--config", help="key = value configuration file")

    parser = argparse.ArgumentParser(prog="goldfeld", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("scan", parents=[common], help="scan a twist family")
    p.add_argument("target", choices=["quadratic", "sextic", "cubic"])
    p = sub.add_parser("verify", parents=[common], help="run a verification suite")
    p.add_argument("target", choices=["congruence", "ranks", "classnumbers"])
    p = sub.add_parser("cache", parents=[common], help="maintain the class-group cache")
    p.add_argument("target", choices=["build", "stats", "vacuum"])
    return parser


COMMANDS = {"scan": cmd_scan, "verify": cmd_verify, "cache": cmd_cache}


def main(argv: list[str] | None = None, environ=None, stdout=None, stderr=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    started = time.time()
    summary: dict = {"command": args.command, "target": args.target}
    try:
        cfg = resolve_config(args, environ)
        out = Output(cfg, f"{args.command}_{args.target}", stdout)
        if args.command != "cache" and cfg.cache and Path(cfg.cache).exists():
            summary["cache_entries"] = preload_h3({D: g.h3 for D, g in ClassGroupCache(cfg.cache).load().items()})
        code, info = COMMANDS[args.command](args.target, cfg, out)
        summary.update(info)
        summary["status"] = "ok" if code == 0 else "refuted"
        out.meta(argv, summary, started)
    except Exception as exc:  # noqa: BLE001 - every failure is reported as a structured summary
        code = 2
        summary.update({"status": "error", "error": type(exc).__name__, "message": str(exc)})
    summary["exit_code"] = code
    print(json.dumps(summary, sort_keys=True, default=str), file=stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
