"""``lefschetz-lab`` command line.

Exit codes: 0 when nothing failed, 1 when a check failed, 2 on malformed input.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from lefschetz_lab import __version__, inverse, lefschetz, quadrics, reports
from lefschetz_lab.algebra import Instance, build, koszul_hf, regularity
from lefschetz_lab.errors import LefschetzLabError
from lefschetz_lab.linalg import FieldSpec
from lefschetz_lab.seeding import fresh_seed, stream

CHECKS = {
    "wlp": ["wlp"],
    "slp": ["slp"],
    "injectivity": ["injectivity"],
    "duality": ["duality"],
    "lemmas": ["lemmas"],
}


class InputError(Exception):
    pass


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def _field(text: str) -> FieldSpec:
    try:
        return FieldSpec.parse(text)
    except LefschetzLabError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _add_instance(p: argparse.ArgumentParser):
    p.add_argument("--instance", type=Path, help="instance file")
    p.add_argument("--monomial", action="store_true", help="use (x0^d, ..., xm^d) instead of a file")
    p.add_argument("--m", type=int, help="projective dimension (with --monomial)")
    p.add_argument("--d", type=int, help="generator degree (with --monomial)")
    p.add_argument("--field", type=_field, default=FieldSpec.prime(), help="prime:P or rational")


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--seed", type=int, help="root seed (generated and echoed when absent)")
    p.add_argument("--trials", type=_positive, default=8)
    p.add_argument("--out", type=Path, help="write the structured report here")
    p.add_argument("--json", action="store_true", help="print the structured report instead of a table")
    p.add_argument("--timings", action="store_true", help="include elapsed times in the report")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lefschetz-lab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="sample a regular instance")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--field", type=_field, default=FieldSpec.prime())
    p.add_argument("--seed", type=int)
    p.add_argument("--out", type=Path)

    p = sub.add_parser("hilbert", help="Hilbert function against the Koszul prediction")
    _add_instance(p)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("verify", help="run verification suites")
    _add_instance(p)
    _add_common(p)
    p.add_argument("--suites", default="all", help=f"comma list from {','.join(reports.REGISTRY)}")
    p.add_argument("--samples", type=_positive, default=200)
    p.add_argument("--workers", type=_positive, default=1)

    p = sub.add_parser("inverse", help="inverse system dimensions and the dual socle generator")
    _add_instance(p)
    p.add_argument("--socle", action="store_true", help="print only g")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("strata", help="Gram-rank histogram, pencils and Veronese scan (d = 2)")
    _add_instance(p)
    _add_common(p)
    p.add_argument("--samples", type=_positive, default=200)
    p.add_argument("--pencils", type=_positive, default=4)
    p.add_argument("--scan-prime", type=int)
    p.add_argument("--budget", type=_positive, default=100_000)

    p = sub.add_parser("locus", help="scan lines or planes of P(A_1) for non-injective z")
    _add_instance(p)
    _add_common(p)
    p.add_argument("--mode", choices=["line", "plane"], default="line")
    p.add_argument("--samples", type=_positive, default=4, help="number of lines or planes")
    p.add_argument("--degree", type=int, help="source degree (default: critical degree)")
    p.add_argument("--max-pairs", type=_positive, default=64)

    p = sub.add_parser("check", help="run one suite")
    p.add_argument("which", choices=sorted(CHECKS))
    _add_instance(p)
    _add_common(p)
    p.add_argument("--samples", type=_positive, default=200)
    return parser


def _load(args) -> Instance:
    if args.instance and args.monomial:
        raise InputError("give either --instance or --monomial")
    if args.instance:
        try:
            return Instance.loads(args.instance.read_text())
        except OSError as exc:
            raise InputError(f"cannot read {args.instance}: {exc}") from exc
    if args.monomial:
        if args.m is None or args.d is None:
            raise InputError("--monomial needs --m and --d")
        return Instance.monomial(args.m, args.d, args.field)
    raise InputError("need --instance FILE or --monomial --m M --d D")


def _seed(args) -> int:
    if args.seed is None:
        args.seed = fresh_seed()
        print(f"seed: {args.seed}", file=sys.stderr)
    if args.seed < 0:
        raise InputError("seed must be nonnegative")
    return args.seed


def _emit(args, payload: dict, text: str):
    body = json.dumps(reports._plain(payload), indent=2) + "\n"
    if getattr(args, "out", None):
        args.out.write_text(body)
    print(body if getattr(args, "json", False) else text, end="" if getattr(args, "json", False) else "\n")


def cmd_gen(args) -> int:
    seed = _seed(args)
    gen = reports.generate(args.m, args.d, args.field, seed)
    print(f"attempts: {gen.attempts}", file=sys.stderr)
    text = gen.instance.dumps()
    if args.out:
        args.out.write_text(text)
    else:
        print(text, end="")
    return 0


def cmd_hilbert(args) -> int:
    inst = _load(args)
    A = build(inst)
    verdict = regularity(A)
    rows = [{"k": k, "hf": A.hf(k), "koszul": koszul_hf(inst.m, inst.d, k)} for k in range(A.M + 2)]
    lines = [f"{'k':>3} {'HF':>6} {'koszul':>7}"]
    lines += [f"{r['k']:>3} {r['hf']:>6} {r['koszul']:>7}{'' if r['hf'] == r['koszul'] else '  *'}"
              for r in rows]
    lines.append(f"verdict: {verdict}")
    _emit(args, {"digest": inst.digest(), "rows": rows, "verdict": str(verdict)}, "\n".join(lines))
    return 0 if verdict.regular else 1


def _config(args) -> reports.Config:
    return reports.Config(trials=args.trials, samples=getattr(args, "samples", 200))


def _run_verify(args, suites) -> int:
    inst = _load(args)
    seed = _seed(args)
    rep = reports.verify(inst, seed, suites, _config(args), getattr(args, "workers", 1))
    _emit(args, rep.to_dict(args.timings), rep.table())
    return rep.exit_code


def cmd_verify(args) -> int:
    return _run_verify(args, reports.parse_suites(args.suites))


def cmd_check(args) -> int:
    return _run_verify(args, CHECKS[args.which])


def cmd_inverse(args) -> int:
    inst = _load(args)
    A = build(inst)
    g = inverse.dual_socle_generator(A).g
    if args.socle:
        _emit(args, {"g": g.to_text()}, f"g = {g.to_text()}")
        return 0
    dims = [inverse.annihilator(A, k).dim for k in range(A.M + 1)]
    spans = [inverse.derivative_span_check(A, k, g) for k in range(A.M + 1)]
    lines = [f"{'k':>3} {'dim I^-1_k':>11} {'HF':>5} {'partials':>9}"]
    lines += [f"{k:>3} {dims[k]:>11} {A.hf(k):>5} {str(spans[A.M - k]):>9}" for k in range(A.M + 1)]
    lines.append(f"g = {g.to_text()}")
    _emit(args, {"dims": dims, "derivative_spans": spans, "g": g.to_text()}, "\n".join(lines))
    return 0 if all(spans) else 1


def cmd_strata(args) -> int:
    inst = _load(args)
    seed = _seed(args)
    A = build(inst)
    h = quadrics.stratum_sample(A, args.samples, seed)
    payload = {"seed": seed, "histogram": h.to_dict()}
    lines = [f"rank histogram ({args.samples} samples): "
             + " ".join(f"{k}:{v}" for k, v in sorted(h.histogram.items())),
             f"full rank fraction {h.full_rank_fraction:.4f} (threshold {h.threshold:.4f})"
             + ("  ANOMALY" if h.anomaly else "")]
    status = 0
    if A.field.is_prime:
        rng = stream(seed, "cli", "pencils")
        payload["pencils"] = []
        for i in range(args.pencils):
            Q1, Q2 = quadrics.random_pencil(A, rng)
            pr = quadrics.pencil_profile(A, Q1, Q2, seed=seed + i)
            payload["pencils"].append(pr.to_dict())
            lines.append(f"pencil {i}: {pr.method}, generic rank {pr.generic_rank}, "
                         f"{pr.degenerate_count} degenerate "
                         + " ".join(f"{pt}:{r}" for pt, r in pr.degenerate))
            if not pr.identically_singular and (pr.degenerate_count > A.nvars or pr.min_rank < A.m):
                status = 1
    if A.field.is_prime or args.scan_prime:
        v = quadrics.veronese_scan(A, args.scan_prime, args.budget, args.samples, seed)
        payload["veronese"] = v.to_dict()
        lines.append(f"veronese scan over F_{v.scan_prime} ({'exhaustive' if v.exhaustive else 'sampled'}, "
                     f"{v.points} points): {len(v.hits)} rank-1 members")
        lines += [f"  {q}" for q in v.hit_quadrics]
    _emit(args, payload, "\n".join(lines))
    return status


def cmd_locus(args) -> int:
    inst = _load(args)
    seed = _seed(args)
    A = build(inst)
    scan = lefschetz.locus_scan(A, args.mode, args.samples, seed, args.degree, args.max_pairs)
    payload = {
        "seed": seed, "mode": scan.mode, "degree": scan.degree, "bound": scan.bound,
        "lines": [x.to_dict() for x in scan.lines],
        "pairs": [pr.to_dict(A.field) for pr in scan.pairs],
        "truncated": scan.truncated, "notes": list(scan.notes),
    }
    lines = [f"{scan.mode} scan at degree {scan.degree}"
             + (f", per-line bound {scan.bound}" if scan.bound is not None else "")]
    for x in scan.lines:
        lines.append(f"  {x.index}: {x.points} points, {len(x.hits)} hits"
                     + ("  (identically singular)" if x.identically_singular else ""))
    for pr in scan.pairs:
        lines.append(f"  pair dimQz={pr.dimQz} dimZQ={pr.dimZQ} z={list(map(int, pr.z.coords))}")
    _emit(args, payload, "\n".join(lines))
    return 0 if scan.bound_respected() else 1


COMMANDS = {
    "gen": cmd_gen,
    "hilbert": cmd_hilbert,
    "verify": cmd_verify,
    "check": cmd_check,
    "inverse": cmd_inverse,
    "strata": cmd_strata,
    "locus": cmd_locus,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (InputError, LefschetzLabError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
