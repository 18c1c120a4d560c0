"""Command line entry point: list, verify, report and eval.

    qchaundy list [--identity GLOB]
    qchaundy verify [--identity GLOB] [--trials N] [--tol T] [--seed S] [--workers W]
    qchaundy report [--identity GLOB] ...      verify plus the specialization lattice
    qchaundy eval poly --family cqh --n 1 --z 2 --q 0.5
    qchaundy eval phi --numer 0.5,0.25 --denom 0.125 --q 0.5 --z 0.3
    qchaundy eval identity --identity cqHgf --q 0.5 --z 1.2 --t 0.3

The default tolerance of ``verify`` is the identity's own (1e-10, or 1e-9
for identities with fractional q-powers); the environment variable
QCHAUNDY_TOL overrides it, and ``--tol`` overrides both.

Structured output (``--output json``) is one JSON document holding one
record per identity in registry order.  Wall times are left out unless
``--timing`` is given, so identical arguments give byte-identical output.
The exit status is 0 iff nothing failed.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from . import genfun, phi, polys
from .errors import QSeriesError

TOL_ENV = "QCHAUNDY_TOL"


@dataclass(frozen=True)
class RunConfig:
    command: str
    identity: str | None = None
    trials: int = 50
    tol: float | None = None
    seed: int = 0
    backend: str = "float"
    output: str = "human"
    workers: int = 1
    timing: bool = False

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.tol is not None and not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")


def resolve_tol(cli_tol: float | None) -> float | None:
    if cli_tol is not None:
        return cli_tol
    env = os.environ.get(TOL_ENV)
    return float(env) if env else None


def parse_scalar(text: str, backend: str = "float"):
    """'1/3' -> Fraction in exact mode; otherwise float or complex ('1+2j')."""
    text = text.strip()
    if backend == "exact":
        return Fraction(text)
    try:
        return float(text)
    except ValueError:
        return complex(text.replace(" ", ""))


def parse_list(text: str | None, backend: str) -> list:
    if not text:
        return []
    return [parse_scalar(x, backend) for x in text.split(",")]


def format_scalar(x) -> str:
    if isinstance(x, complex):
        return str(x.real) if x.imag == 0 else str(x)
    return str(x)


def _verify_one(args):
    ident_id, trials, tol, seed = args
    return genfun.verify(ident_id, trials=trials, tol=tol, seed=seed)


def run_verify(cfg: RunConfig, idents: list) -> list:
    tol = resolve_tol(cfg.tol)
    jobs = [(i.id, cfg.trials, tol, cfg.seed) for i in idents]
    if cfg.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            return list(pool.map(_verify_one, jobs))  # map keeps registry order
    return [_verify_one(j) for j in jobs]


def _human_line(r: genfun.VerificationReport, timing: bool) -> str:
    status = "PASS" if r.passed else "FAIL"
    line = (f"{status}  {r.id:<40} trials={r.trials:<4d} max_rel_err={r.max_rel_err:.2e} "
            f"mean_rel_err={r.mean_rel_err:.2e} degree={r.lhs_degree_used}")
    if timing and r.wall_time is not None:
        line += f" time={r.wall_time:.2f}s"
    for f in r.failures[:3]:
        line += f"\n      {f['error']} at {f['point']}"
    return line


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _document(cfg: RunConfig, sections: dict) -> str:
    doc = {
        "schema_version": genfun.SCHEMA_VERSION,
        "command": cfg.command,
        "config": {"identity": cfg.identity, "trials": cfg.trials, "tol": resolve_tol(cfg.tol), "seed": cfg.seed},
    }
    for name, reports in sections.items():
        doc[name] = [r.to_record(cfg.timing) for r in reports]
    doc["passed"] = all(r.passed for reports in sections.values() for r in reports)
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def cmd_list(cfg: RunConfig, out: str | None) -> int:
    idents = genfun.select(cfg.identity)
    if not idents:
        print(f"no identity matches {cfg.identity!r}", file=sys.stderr)
        return 2
    if cfg.output == "json":
        recs = [{"id": i.id, "anchor": i.anchor, "family": i.family, "inverse": i.inverse,
                 "params": list(i.params), "aliases": list(i.aliases)} for i in idents]
        _emit(json.dumps({"schema_version": genfun.SCHEMA_VERSION, "identities": recs}, indent=1) + "\n", out)
    else:
        lines = []
        for i in idents:
            fam = polys.FAMILY_NAMES[i.family] + (" (q-inverse)" if i.inverse else "")
            extra = f"  aliases: {', '.join(i.aliases)}" if i.aliases else ""
            lines.append(f"{i.id:<14} anchor={i.anchor or '-':<12} {fam}{extra}")
        _emit("\n".join(lines) + "\n", out)
    return 0


def cmd_verify(cfg: RunConfig, out: str | None, with_specializations: bool = False) -> int:
    if cfg.backend != "float":
        print("verify compares infinite products and nonterminating series; only the float backend applies",
              file=sys.stderr)
        return 2
    idents = genfun.select(cfg.identity)
    if not idents:
        print(f"no identity matches {cfg.identity!r}", file=sys.stderr)
        return 2
    sections = {"reports": run_verify(cfg, idents)}
    if with_specializations:
        ids = {i.id for i in idents}
        specs = [s for s in genfun.SPECIALIZATIONS if s.parent in ids or s.child in ids]
        sections["specializations"] = [genfun.specialization_check(s, trials=min(cfg.trials, 10), seed=cfg.seed)
                                       for s in specs]
    if cfg.output == "json":
        _emit(_document(cfg, sections), out)
    else:
        lines = [_human_line(r, cfg.timing) for reports in sections.values() for r in reports]
        nfail = sum(not r.passed for reports in sections.values() for r in reports)
        total = sum(len(reports) for reports in sections.values())
        lines.append(f"{total - nfail}/{total} passed")
        _emit("\n".join(lines) + "\n", out)
    return 0 if all(r.passed for reports in sections.values() for r in reports) else 1


def cmd_eval(ns, cfg: RunConfig) -> int:
    b = cfg.backend
    if ns.what == "poly":
        value = polys.poly(ns.family, ns.n, parse_scalar(ns.z, b), parse_scalar(ns.q, b),
                           parse_list(ns.params, b), inverse=ns.inverse, rep=ns.rep)
        result = {"value": value}
    elif ns.what == "phi":
        value = phi.phi(parse_list(ns.numer, b), parse_list(ns.denom, b), parse_scalar(ns.q, b),
                        parse_scalar(ns.z, b), m=ns.m)
        result = {"value": value}
    else:
        if b != "float":
            print("identity evaluation needs the float backend", file=sys.stderr)
            return 2
        ident = genfun.get(ns.identity)
        kw = {}
        for item in parse_assignments(ns.params):
            kw[item[0]] = parse_scalar(item[1])
        missing = [p for p in ident.params if p not in kw]
        if missing:
            print(f"{ident.id} needs parameters {', '.join(missing)} (use --params a=0.3,b=0.2)", file=sys.stderr)
            return 2
        c = genfun.make_point(parse_scalar(ns.q), parse_scalar(ns.z), parse_scalar(ns.t), **kw)
        lhs, degree = genfun.lhs_adaptive(ident, c, 1e-12)
        rhs = genfun.rhs_eval(ident, c, 1e-12)
        result = {"lhs": complex(lhs), "rhs": complex(rhs), "degree": degree}
    if cfg.output == "json":
        print(json.dumps({k: _jsonable(v) for k, v in result.items()}, sort_keys=True))
    else:
        for k, v in result.items():
            print(format_scalar(v) if k == "value" and len(result) == 1 else f"{k} = {format_scalar(v)}")
    return 0


def parse_assignments(text: str | None) -> list:
    if not text:
        return []
    pairs = []
    for part in text.split(","):
        name, _, val = part.partition("=")
        if not val:
            raise ValueError(f"expected name=value, got {part!r}")
        pairs.append((name.strip(), val))
    return pairs


def _jsonable(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, complex):
        return [v.real, v.imag]
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--identity", help="glob over identity ids and aliases, e.g. 'cqH*'")
    common.add_argument("--trials", type=int, default=50)
    common.add_argument("--tol", type=float, default=None,
                        help=f"relative tolerance (default: per identity, or ${TOL_ENV})")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--backend", choices=("float", "exact"), default="float")
    common.add_argument("--output", choices=("human", "json"), default="human")
    common.add_argument("--out", help="write the report to this file instead of stdout")
    common.add_argument("--workers", type=int, default=1, help="parallel worker processes")
    common.add_argument("--timing", action="store_true", help="include wall times (breaks byte-identity)")

    p = argparse.ArgumentParser(prog="qchaundy", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("list", parents=[common], help="print the identity registry")
    sub.add_parser("verify", parents=[common], help="verify identities at random points")
    sub.add_parser("report", parents=[common], help="verify plus the specialization lattice")

    ev = sub.add_parser("eval", parents=[common], help="evaluate one polynomial, series or identity")
    ev.add_argument("what", choices=("poly", "phi", "identity"))
    ev.add_argument("--family", default="cqh")
    ev.add_argument("--n", type=int, default=0)
    ev.add_argument("--z", default="1")
    ev.add_argument("--q", default="0.5")
    ev.add_argument("--t", default="0.1")
    ev.add_argument("--params", help="comma separated; name=value pairs for 'eval identity'")
    ev.add_argument("--inverse", action="store_true")
    ev.add_argument("--rep")
    ev.add_argument("--numer")
    ev.add_argument("--denom")
    ev.add_argument("--m", type=int, default=0)
    return p


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        cfg = RunConfig(ns.command, ns.identity, ns.trials, ns.tol, ns.seed, ns.backend, ns.output,
                        ns.workers, ns.timing)
        if ns.command == "list":
            return cmd_list(cfg, ns.out)
        if ns.command == "verify":
            return cmd_verify(cfg, ns.out)
        if ns.command == "report":
            return cmd_verify(cfg, ns.out, with_specializations=True)
        return cmd_eval(ns, cfg)
    except KeyError as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return 2
    except (ValueError, QSeriesError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
