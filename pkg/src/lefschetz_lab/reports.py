"""Verification suites and structured reports.

Suites run in a fixed registry order and draw randomness from streams keyed
by (seed, suite, ...), so results do not depend on which suites were
selected or on how many worker threads ran them.
"""
from __future__ import annotations

import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field
from math import comb
from typing import Callable

import numpy as np

from lefschetz_lab import __version__, _kernels
from lefschetz_lab import inverse, lefschetz, quadrics
from lefschetz_lab.algebra import (
    Algebra,
    Instance,
    build,
    duality_pairing,
    koszul_hf,
    regularity,
    symmetry_check,
)
from lefschetz_lab.errors import MalformedInputError
from lefschetz_lab.linalg import FieldSpec, rank
from lefschetz_lab.seeding import stream

log = logging.getLogger(__name__)

PASS, FAIL, INCONCLUSIVE, DEGENERATE = "pass", "fail", "inconclusive", "degenerate"
STATUSES = (PASS, FAIL, INCONCLUSIVE, DEGENERATE)


@dataclass
class CheckRecord:
    name: str
    params: dict
    status: str
    data: dict
    elapsed: float | None = None

    def to_dict(self, timings: bool = False) -> dict:
        out = {"name": self.name, "params": self.params, "status": self.status, "data": self.data}
        if timings and self.elapsed is not None:
            out["elapsed"] = round(self.elapsed, 6)
        return out


@dataclass
class Report:
    instance: Instance
    seed: int
    config: dict
    checks: list[CheckRecord] = dc_field(default_factory=list)
    skipped: list[dict] = dc_field(default_factory=list)

    @property
    def status(self) -> str:
        statuses = {c.status for c in self.checks}
        if FAIL in statuses:
            return FAIL
        return PASS

    @property
    def exit_code(self) -> int:
        return 1 if self.status == FAIL else 0

    def check(self, name: str) -> CheckRecord:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self, timings: bool = False) -> dict:
        return {
            "tool": "lefschetz-lab",
            "version": __version__,
            "instance": {
                "digest": self.instance.digest(),
                "m": self.instance.m,
                "d": self.instance.d,
                "field": str(self.instance.field),
            },
            "seed": self.seed,
            "config": self.config,
            "status": self.status,
            "checks": [c.to_dict(timings) for c in self.checks],
            "skipped": self.skipped,
        }

    def dumps(self, timings: bool = False) -> str:
        return json.dumps(_plain(self.to_dict(timings)), indent=2) + "\n"

    def table(self) -> str:
        width = max([len(c.name) for c in self.checks] + [10])
        lines = [f"instance {self.instance.digest()[:12]}  m={self.instance.m} d={self.instance.d} "
                 f"field={self.instance.field}  seed={self.seed}"]
        for c in self.checks:
            lines.append(f"  {c.name:<{width}}  {c.status:<12}  {_summary(c.data)}")
        for s in self.skipped:
            lines.append(f"  {s['name']:<{width}}  {'skipped':<12}  {s['reason']}")
        lines.append(f"overall: {self.status}")
        return "\n".join(lines)


def _plain(obj):
    """JSON-safe copy: numpy scalars to int, tuples to lists."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _summary(data: dict) -> str:
    parts = []
    for k, v in data.items():
        if isinstance(v, (int, float, str, bool)) or v is None:
            parts.append(f"{k}={v}")
        elif isinstance(v, (list, tuple)) and len(v) <= 12 and all(isinstance(x, (int, str)) for x in v):
            parts.append(f"{k}=[{','.join(str(x) for x in v)}]")
    text = " ".join(parts)
    return text if len(text) <= 100 else text[:97] + "..."


# --------------------------------------------------------------------------
# suites


@dataclass(frozen=True)
class Config:
    trials: int = 8
    samples: int = 200
    pencils: int = 4
    lines: int = 4
    pair_samples: int = 1000
    points: int = 10
    max_pairs: int = 64
    scan_budget: int = 100_000

    def to_dict(self) -> dict:
        return dict(self.__dict__)


class Skip(Exception):
    """Raised by a suite that does not apply to the algebra."""


Suite = Callable[[Algebra, int, Config], list[CheckRecord]]


def _timed(name: str, params: dict, fn) -> CheckRecord:
    t0 = time.perf_counter()
    status, data = fn()
    return CheckRecord(name, params, status, data, time.perf_counter() - t0)


def suite_hilbert(A: Algebra, seed: int, cfg: Config) -> list[CheckRecord]:
    def hf():
        rows = [{"k": k, "hf": A.hf(k), "koszul": koszul_hf(A.m, A.d, k)} for k in range(A.M + 2)]
        ok = all(r["hf"] == r["koszul"] for r in rows)
        return (PASS if ok else FAIL), {"hf": [r["hf"] for r in rows],
                                        "koszul": [r["koszul"] for r in rows]}
    return [_timed("hilbert_function", {}, hf)]


def suite_duality(A: Algebra, seed: int, cfg: Config) -> list[CheckRecord]:
    def pairing():
        ranks = [rank(duality_pairing(A, k)) for k in range(A.M + 1)]
        ok = all(r == A.hf(k) for k, r in enumerate(ranks))
        return (PASS if ok else FAIL), {"ranks": ranks}

    out = [_timed("duality_pairing", {}, pairing)]
    if A.M % 2 == 1:
        def symmetry():
            results = [symmetry_check(A, lefschetz.random_linear(A, stream(seed, "symmetry", t)))
                       for t in range(cfg.trials)]
            return (PASS if all(results) else FAIL), {"forms": len(results), "symmetric": sum(results)}
        out.append(_timed("symmetry", {"trials": cfg.trials}, symmetry))
    return out


def _lefschetz_record(name, fn, params):
    def run():
        rep = fn()
        return rep.verdict, {"records": [r.to_dict() for r in rep.records], "notes": list(rep.notes)}
    return _timed(name, params, run)


def suite_wlp(A: Algebra, seed: int, cfg: Config) -> list[CheckRecord]:
    return [_lefschetz_record("wlp", lambda: lefschetz.wlp_check(A, cfg.trials, seed),
                              {"trials": cfg.trials})]


def suite_slp(A: Algebra, seed: int, cfg: Config) -> list[CheckRecord]:
    return [_lefschetz_record("slp", lambda: lefschetz.slp_check(A, cfg.trials, seed),
                              {"trials": cfg.trials})]


def suite_injectivity(A: Algebra, seed: int, cfg: Config) -> list[CheckRecord]:
    if A.hf(A.d - 1) > A.hf(A.d):
        raise Skip("A_{d-1} is larger than A_d when m = 1")

    def run():
        rec = lefschetz.injectivity_lemma_check(A, cfg.trials, seed)
        return rec.verdict, rec.to_dict()
    return [_timed("injectivity", {"trials": cfg.trials}, run)]


def suite_inverse(A: Algebra, seed: int, cfg: Config) -> list[CheckRecord]:
    n = A.nvars

    def dims():
        rows = []
        for k in range(A.M + 1):
            ann = inverse.annihilator(A, k).dim
            rows.append({"k": k, "annihilator": ann, "ideal": A.piece(k).ideal.dim})
        ok = all(r["annihilator"] + r["ideal"] == comb(A.m + r["k"], r["k"]) for r in rows)
        ok &= all(r["annihilator"] == A.hf(r["k"]) for r in rows)
        expected = comb(A.m + A.d, A.d) - A.m - 1
        ok &= rows[A.d]["annihilator"] == expected if A.d <= A.M else True
        return (PASS if ok else FAIL), {"dims": [r["annihilator"] for r in rows],
                                        "expected_degree_d": expected}

    def socle():
        g = inverse.dual_socle_generator(A).g
        spans = [inverse.derivative_span_check(A, k, g) for k in range(A.M + 1)]
        return (PASS if all(spans) else FAIL), {"g": g.to_text(), "derivative_spans": spans}

    def certificate():
        rng = stream(seed, "inverse", "points")
        agree = 0
        for _ in range(cfg.points):
            pt = A.field.random_elements(rng, n)
            if not any(pt):
                pt[0] = A.field.one
            agree += inverse.veronese_certificate(A.instance, pt) == \
                inverse.evaluation_certificate(A.instance, pt)
        return (PASS if agree == cfg.points else FAIL), {"points": cfg.points, "agree": agree}

    return [
        _timed("inverse_dims", {}, dims),
        _timed("dual_socle_generator", {}, socle),
        _timed("veronese_certificate", {"points": cfg.points}, certificate),
    ]


def suite_strata(A: Algebra, seed: int, cfg: Config) -> list[CheckRecord]:
    if A.d != 2:
        raise Skip("quadric strata need d = 2")
    out = []

    def histogram():
        h = quadrics.stratum_sample(A, cfg.samples, seed)
        return (INCONCLUSIVE if h.anomaly else PASS), h.to_dict()

    out.append(_timed("stratum_sample", {"samples": cfg.samples}, histogram))
    if A.field.is_prime:
        def pencils():
            rng = stream(seed, "strata", "pencils")
            profiles = []
            status = PASS
            for i in range(cfg.pencils):
                Q1, Q2 = quadrics.random_pencil(A, rng)
                pr = quadrics.pencil_profile(A, Q1, Q2, seed=seed + i)
                profiles.append(pr.to_dict())
                if pr.identically_singular:
                    status = DEGENERATE if status == PASS else status
                elif pr.degenerate_count > A.nvars or pr.min_rank < A.m:
                    status = FAIL
            return status, {"bound": A.nvars, "profiles": profiles}

        out.append(_timed("pencil_profile", {"pencils": cfg.pencils}, pencils))

        def veronese():
            v = quadrics.veronese_scan(A, None, cfg.scan_budget, cfg.samples, seed)
            return INCONCLUSIVE, v.to_dict()

        out.append(_timed("veronese_scan", {"budget": cfg.scan_budget}, veronese))
    return out


def _harvest(A: Algebra, seed: int, cfg: Config, label: str):
    return lefschetz.locus_scan(A, "line", cfg.lines, stream(seed, label).integers(2**31),
                                max_pairs=cfg.max_pairs)


def _vertex_agrees(A: Algebra, Q) -> bool:
    return inverse.vertex_space(A, Q).space == lefschetz.Z_of_Q(A, Q)


def suite_locus(A: Algebra, seed: int, cfg: Config) -> list[CheckRecord]:
    if not A.field.is_prime:
        raise Skip("locus scans need a prime field")

    def lines():
        scan = _harvest(A, seed, cfg, "locus")
        agree = sum(_vertex_agrees(A, pr.Q) for pr in scan.pairs)
        ok = scan.bound_respected() and agree == len(scan.pairs)
        return (PASS if ok else FAIL), {
            "degree": scan.degree,
            "bound": scan.bound,
            "hits_per_line": [len(x.hits) for x in scan.lines],
            "singular_lines": [x.index for x in scan.lines if x.identically_singular],
            "pairs": [pr.to_dict(A.field) for pr in scan.pairs],
            "truncated": scan.truncated,
            "vertex_agree": agree,
        }

    def plane():
        scan = lefschetz.locus_scan(A, "plane", 1, seed, degree=A.d - 1)
        hits = scan.total_hits
        return (PASS if hits == 0 else INCONCLUSIVE), {
            "degree": scan.degree, "points": sum(x.points for x in scan.lines), "hits": hits}

    out = [_timed("locus_line", {"lines": cfg.lines}, lines)]
    # a locus of dimension <= 1 misses a general plane only from P^4 on
    if A.m >= 4 and A.hf(A.d - 1) <= A.hf(A.d):
        out.append(_timed("locus_plane_injectivity", {}, plane))
    return out


def suite_lemmas(A: Algebra, seed: int, cfg: Config) -> list[CheckRecord]:
    out = []
    pairs = list(_harvest(A, seed, cfg, "lemmas").pairs) if A.field.is_prime else []
    rng = stream(seed, "lemmas", "random_Q")
    randoms = []
    for _ in range(cfg.trials):
        coords = A.field.random_elements(rng, A.hf(A.s))
        if any(coords):
            randoms.append(A.element_from_coords(A.s, coords))
    qs = [pr.Q for pr in pairs] + randoms

    def cokernels():
        results = [lefschetz.cokernel_duality_check(A, Q) for Q in qs]
        vertex = sum(_vertex_agrees(A, Q) for Q in qs)
        ok = all(r.holds for r in results) and vertex == len(qs)
        return (PASS if ok else FAIL), {"checked": len(results), "harvested": len(pairs),
                                        "cokernels": [r.coker for r in results],
                                        "vertex_agree": vertex}

    out.append(_timed("cokernel_duality", {}, cokernels))
    if (A.m, A.d) == (4, 2):
        def vertex_bound():
            res = lefschetz.vertex_bound_check(A, pairs)
            status = (PASS if res.holds else FAIL) if not res.vacuous else INCONCLUSIVE
            return status, res.to_dict()

        def inclusions():
            res = [lefschetz.kernel_inclusion_check(A, pr) for pr in pairs]
            if not res:
                return INCONCLUSIVE, {"checked": 0}
            return (PASS if all(r.holds for r in res) else FAIL), {
                "checked": len(res), "square_zero": sum(bool(r.square_zero) for r in res)}

        out.append(_timed("vertex_bound", {}, vertex_bound))
        out.append(_timed("kernel_inclusion", {}, inclusions))
    if A.d == 2 and A.m >= 2:
        def pair_spans():
            zs = list(dict.fromkeys(pr.z for pr in pairs))
            res = lefschetz.pair_span_check(A, cfg.pair_samples, seed, extra=list(zip(zs, zs[1:])))
            return (PASS if res.holds else FAIL), res.to_dict()

        def vanishing_span():
            prng = stream(seed, "lemmas", "points")
            res = []
            for _ in range(cfg.points):
                pt = A.field.random_elements(prng, A.nvars)
                if not any(pt):
                    pt[0] = A.field.one
                res.append(lefschetz.vanishing_span_check(A, pt).holds)
            return (PASS if all(res) else FAIL), {"points": len(res), "holds": sum(res)}

        out.append(_timed("pair_spans", {"samples": cfg.pair_samples}, pair_spans))
        out.append(_timed("vanishing_span", {"points": cfg.points}, vanishing_span))
    if pairs and 2 * A.s <= A.up_to:
        def probe():
            seen, rows = set(), []
            for pr in pairs:
                key = pr.z.coords
                if key in seen:
                    continue
                seen.add(key)
                products = lefschetz.pair_product_probe(A, pr.z)
                rows.append({"zero": sum(x["zero"] for x in products), "products": len(products)})
            return INCONCLUSIVE, {"points": rows}

        out.append(_timed("pair_product_probe", {}, probe))
    return out


REGISTRY: dict[str, Suite] = {
    "hilbert": suite_hilbert,
    "duality": suite_duality,
    "wlp": suite_wlp,
    "slp": suite_slp,
    "injectivity": suite_injectivity,
    "inverse": suite_inverse,
    "strata": suite_strata,
    "locus": suite_locus,
    "lemmas": suite_lemmas,
}


def parse_suites(text: str | None) -> list[str]:
    if not text or text == "all":
        return list(REGISTRY)
    names = [x.strip() for x in text.split(",") if x.strip()]
    unknown = [x for x in names if x not in REGISTRY]
    if unknown:
        raise MalformedInputError(f"unknown suites {unknown}; choose from {list(REGISTRY)}")
    return [x for x in REGISTRY if x in names]


def verify(instance: Instance, seed: int, suites=None, config: Config | None = None,
           workers: int = 1, algebra: Algebra | None = None) -> Report:
    """Run the selected suites; a non-regular instance fails and skips the rest."""
    cfg = config or Config()
    names = parse_suites(suites) if not isinstance(suites, list) else suites
    report = Report(instance, seed, {"suites": names, **cfg.to_dict()})
    t0 = time.perf_counter()
    A = algebra or build(instance)
    verdict = regularity(A)
    report.checks.append(CheckRecord(
        "regularity", {}, PASS if verdict.regular else FAIL,
        {"verdict": str(verdict), "hf": list(A.hilbert_function)}, time.perf_counter() - t0))
    if not verdict.regular:
        report.skipped = [{"name": n, "reason": "instance is not a complete intersection"} for n in names]
        return report

    def run(name):
        try:
            return REGISTRY[name](A, seed, cfg), None
        except Skip as exc:
            return [], {"name": name, "reason": str(exc)}

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(run, names))
    else:
        results = [run(n) for n in names]
    for checks, skip in results:
        report.checks.extend(checks)
        if skip:
            report.skipped.append(skip)
    return report


# --------------------------------------------------------------------------
# instance generation


@dataclass(frozen=True)
class Generated:
    instance: Instance
    attempts: int


def generate(m: int, d: int, field: FieldSpec, seed: int, max_attempts: int = 1000) -> Generated:
    """Random forms, redrawn until they form a regular sequence."""
    for attempt in range(1, max_attempts + 1):
        inst = Instance.random(m, d, field, stream(seed, "gen", attempt))
        if regularity(build(inst)).regular:
            log.info("regular instance after %d attempt(s)", attempt)
            return Generated(inst, attempt)
        log.info("attempt %d is not regular, redrawing", attempt)
    raise MalformedInputError(f"no regular instance within {max_attempts} attempts")


def backend() -> str:
    return _kernels.BACKEND
