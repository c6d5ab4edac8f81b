"""Command-line entry point: ``cleangraph <analyze|verify|distance|matching|export|bench>``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import random
import re
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

from . import __version__
from .errors import BudgetExceeded, CleanGraphError, DomainError, InvalidInput, Unsupported
from .graph import (
    DEFAULT_VERTEX_BUDGET,
    EXPORT_FORMATS,
    CleanGraph,
    CleanVertex,
    bfs_distances,
    build_clean_graph,
    closed_form_distance,
    diameter,
    export_graph,
    is_connected,
)
from .matching import (
    DEFAULT_MATCHING_BUDGET,
    construct_matching,
    matching_number_closed_form,
    maximum_matching_oracle,
    verify_matching,
)
from .oracles import brute_idempotent_count, brute_idempotents_mod, brute_self_inverse_count
from .rings import FactoredRing, count_self_inverse_closed_form, factorize, parse_ring_spec
from .wiener import VARIANTS, wiener_case, wiener_closed_form, wiener_oracle, wiener_zn

EXIT_OK, EXIT_MISMATCH, EXIT_PARSE, EXIT_DOMAIN, EXIT_BUDGET, EXIT_IO = 0, 1, 2, 3, 4, 5

CHECKS = ("wiener", "distance", "diameter", "connectivity", "self-inverse-count", "idempotent-count", "matching")
CSV_HEADER = ["ring", "check", "formula", "oracle", "match", "erratum", "formula_ms", "oracle_ms"]

# Values printed in worked examples that the oracle refutes, keyed by modulus.
PRINTED_WIENER_VALUES = {15: 332}


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    return str(x)


@dataclass
class VerificationRecord:
    ring: str
    check: str
    formula: str
    oracle: str
    match: str  # "true", "false", or "" when the oracle was skipped
    erratum: str = ""
    formula_ms: str = ""
    oracle_ms: str = ""

    def row(self) -> list[str]:
        return [self.ring, self.check, self.formula, self.oracle, self.match, self.erratum, self.formula_ms, self.oracle_ms]

    @property
    def failed(self) -> bool:
        return self.match == "false" and not self.erratum


def _record(ring, check, formula, oracle, erratum="", fms=None, oms=None) -> VerificationRecord:
    if oracle is None:
        match = ""
        oracle_s = "skipped"
    else:
        match = _fmt(formula == oracle)
        oracle_s = _fmt(oracle)
    if match != "false":
        erratum = ""
    ms = lambda t: "" if t is None else f"{t * 1000:.3f}"
    return VerificationRecord(ring, check, _fmt(formula), oracle_s, match, erratum, ms(fms), ms(oms))


def _timed(fn, *args):
    t0 = time.perf_counter()
    val = fn(*args)
    return val, time.perf_counter() - t0


def _is_canonical_zn(ring: FactoredRing) -> bool:
    return ring.has_crt and list(ring.factors) == factorize(ring.modulus)


def _wiener_erratum(ring: FactoredRing, variant: str) -> str:
    if variant == "statement" and wiener_case(ring.phi, ring.self_inverse_count) == 2:
        return "statement-case2"
    if variant in ("proof", "statement") and ring.n >= 3 and ring.phi >= 2:
        return "orthogonal-pairs"
    return ""


def _sample_pairs(ring: FactoredRing, nv: int, samples: int, seed: int) -> list[tuple[int, int]]:
    total = nv * (nv - 1) // 2
    if total <= samples:
        return [(a, b) for a in range(nv) for b in range(a + 1, nv)]
    rng = random.Random(f"{ring.label}:{seed}")
    out = []
    while len(out) < samples:
        a, b = rng.randrange(nv), rng.randrange(nv)
        if a != b:
            out.append((a, b))
    return out


def distance_agreement(g: CleanGraph, pairs) -> tuple[str, str]:
    """Histogram strings of closed-form vs BFS distances over the given pairs."""
    ring = g.ring
    formula_hist: dict[int, int] = {}
    oracle_hist: dict[int, int] = {}
    mismatched = 0
    by_source: dict[int, object] = {}
    for a, b in pairs:
        cf = closed_form_distance(ring, g.vertex(a), g.vertex(b))
        if a not in by_source:
            by_source[a] = bfs_distances(g, a)
        d = int(by_source[a][b])
        d = math.inf if d < 0 else d
        formula_hist[cf] = formula_hist.get(cf, 0) + 1
        oracle_hist[d] = oracle_hist.get(d, 0) + 1
        mismatched += cf != d
    fmt = lambda h: ";".join(f"{_fmt(k)}:{v}" for k, v in sorted(h.items()))
    oracle_s = fmt(oracle_hist)
    if mismatched and formula_hist == oracle_hist:
        oracle_s += f";mismatched:{mismatched}"
    return fmt(formula_hist), oracle_s


def run_checks(spec: str, checks, variant="proof", budget=DEFAULT_VERTEX_BUDGET, samples=1000, seed=0) -> list[VerificationRecord]:
    """Evaluate each requested check on one ring, formula side next to oracle side."""
    ring = parse_ring_spec(spec)
    label = ring.label
    records: list[VerificationRecord] = []
    graph_box: list[CleanGraph | None] = []

    def graph():
        if not graph_box:
            try:
                graph_box.append(build_clean_graph(ring, budget))
            except BudgetExceeded:
                graph_box.append(None)
        return graph_box[0]

    def oracle_side(fn):
        t0 = time.perf_counter()
        g = graph()
        if g is None:
            return None, None
        val = fn(g)
        return val, time.perf_counter() - t0

    for check in checks:
        if check == "wiener":
            if _is_canonical_zn(ring):
                formula, fms = _timed(wiener_zn, ring.modulus, variant)
            elif ring.n < 2:
                formula, fms = math.inf, 0.0
            else:
                formula, fms = _timed(wiener_closed_form, ring, variant)
            oracle, oms = oracle_side(wiener_oracle)
            records.append(_record(label, check, formula, oracle, _wiener_erratum(ring, variant), fms, oms))
            printed = PRINTED_WIENER_VALUES.get(ring.modulus) if _is_canonical_zn(ring) else None
            if printed is not None:
                records.append(_record(label, "wiener-example", printed, oracle, "printed-example", 0.0, oms))
        elif check == "distance":
            if ring.n < 2:
                continue
            g = graph()
            if g is None:
                records.append(_record(label, check, "", None))
                continue
            t0 = time.perf_counter()
            formula, oracle = distance_agreement(g, _sample_pairs(ring, g.num_vertices, samples, seed))
            records.append(_record(label, check, formula, oracle, fms=None, oms=time.perf_counter() - t0))
        elif check == "diameter":
            formula = math.inf if ring.n < 2 else (3 if ring.phi >= 2 else 1)
            oracle, oms = oracle_side(diameter)
            records.append(_record(label, check, formula, oracle, fms=0.0, oms=oms))
        elif check == "connectivity":
            oracle, oms = oracle_side(is_connected)
            records.append(_record(label, check, ring.n >= 2, oracle, fms=0.0, oms=oms))
        elif check == "self-inverse-count":
            if _is_canonical_zn(ring):
                formula, fms = _timed(count_self_inverse_closed_form, ring.modulus)
                oracle, oms = _timed(brute_self_inverse_count, ring.modulus)
            else:
                formula, fms = ring.self_inverse_count, 0.0
                oracle, oms = _timed(lambda: sum(1 for x in ring.elements() if (x * x).is_one()))
            records.append(_record(label, check, formula, oracle, fms=fms, oms=oms))
        elif check == "idempotent-count":
            formula, fms = _timed(lambda: len(ring.idempotents))
            if ring.has_crt:
                oracle, oms = _timed(lambda: len(brute_idempotents_mod(ring.modulus)))
            else:
                oracle, oms = _timed(brute_idempotent_count, ring)
            records.append(_record(label, check, formula, oracle, fms=fms, oms=oms))
        elif check == "matching":
            if ring.n < 2:
                continue
            formula, fms = _timed(matching_number_closed_form, ring)
            g = graph()
            if g is None or g.num_vertices > DEFAULT_MATCHING_BUDGET:
                oracle = oms = None
            else:
                res, oms = _timed(maximum_matching_oracle, g)
                oracle = res.size if verify_matching(g, res) else "invalid"
            records.append(_record(label, check, formula, oracle, fms=fms, oms=oms))
            if g is not None:
                m, cms = _timed(construct_matching, ring)
                built = m.size if verify_matching(g, m) else "invalid"
                records.append(_record(label, "matching-construction", formula, built, fms=fms, oms=cms))
        else:
            raise InvalidInput(f"unknown check {check!r}")
    return records


# -- argument parsing helpers ----------------------------------------------


def _parse_range(text: str) -> range:
    mt = re.fullmatch(r"\s*(\d+)\s*\.\.\s*(\d+)\s*", text)
    if not mt:
        raise InvalidInput(f"range must look like a..b, got {text!r}")
    a, b = int(mt.group(1)), int(mt.group(2))
    if a < 2 or b < a:
        raise InvalidInput(f"range {text!r} must satisfy 2 <= a <= b")
    return range(a, b + 1)


def parse_vertex(g: CleanGraph, text: str) -> CleanVertex:
    """``(e,u)`` with residues mod n, or ``e#i,u#j`` with table indices."""
    s = text.strip()
    mt = re.fullmatch(r"e#(\d+)\s*,\s*u#(\d+)", s)
    if mt:
        v = CleanVertex(int(mt.group(1)), int(mt.group(2)))
        g.vertex_id(v)
        return v
    mt = re.fullmatch(r"\(\s*(-?\d+)\s*,\s*(-?\d+)\s*\)", s)
    if mt:
        if not g.ring.has_crt:
            raise InvalidInput(f"ring {g.ring.label} has no Z/n view; use the e#i,u#j form")
        ring = g.ring
        try:
            return g.vertex_of(ring(int(mt.group(1))), ring(int(mt.group(2))))
        except DomainError as exc:
            raise InvalidInput(f"{text!r} is not a vertex of {ring.label}: {exc}") from exc
    raise InvalidInput(f"cannot parse vertex {text!r}; expected (e,u) or e#i,u#j")


def _ring_specs(args) -> list[str]:
    specs = list(args.ring or [])
    if getattr(args, "range", None):
        min_k = getattr(args, "min_primes", 1)
        for n in _parse_range(args.range):
            if len(factorize(n)) >= min_k:
                specs.append(str(n))
    if not specs:
        raise InvalidInput("give at least one --ring or a --range")
    return specs


# -- subcommands ------------------------------------------------------------


def cmd_analyze(args, out) -> int:
    ring = parse_ring_spec(args.ring[0])
    summary: dict = {
        "ring": ring.label,
        "n": ring.n,
        "k": ring.k,
        "phi": ring.phi,
        "r": ring.self_inverse_count,
        "paired_units": ring.phi - ring.self_inverse_count,
        "num_vertices": ring.num_vertices,
    }
    notes = []
    try:
        g = build_clean_graph(ring, args.budget)
    except BudgetExceeded as exc:
        g = None
        notes.append(f"oracle skipped: {exc}")
    connected = ring.n >= 2
    summary["connected"] = connected if g is None else is_connected(g)
    summary["diameter"] = _fmt((3 if ring.phi >= 2 else 1) if connected else math.inf) if g is None else _fmt(diameter(g))
    summary["wiener_case"] = wiener_case(ring.phi, ring.self_inverse_count)
    if ring.n < 2:
        summary["wiener_formula"] = "inf"
        summary["matching_number"] = None
    else:
        summary["wiener_formula"] = str(wiener_closed_form(ring, args.variant))
        summary["matching_number"] = matching_number_closed_form(ring)
    summary["wiener_oracle"] = None if g is None else _fmt(wiener_oracle(g))
    summary["notes"] = notes

    if args.json:
        out.write(json.dumps(summary) + "\n")
        return EXIT_OK
    w = out.write
    w(f"ring {ring.label}: n={ring.n} local factors, k={ring.k} distinct primes\n")
    w(f"units phi={ring.phi}, self-inverse r={summary['r']}, |U''|={summary['paired_units']}\n")
    w(f"Cl2 vertices N={ring.num_vertices}\n")
    if not summary["connected"]:
        w(f"disconnected; Wiener = {summary['wiener_oracle'] or summary['wiener_formula']}\n")
    else:
        w(f"connected, diameter {summary['diameter']}\n")
        w(f"Wiener (case {summary['wiener_case']}, {args.variant}): formula {summary['wiener_formula']}")
        w(f", oracle {summary['wiener_oracle']}\n" if g is not None else ", oracle skipped\n")
        w(f"matching number {summary['matching_number']}\n")
    for note in notes:
        w(f"note: {note}\n")
    return EXIT_OK


def _verify_one(job):
    spec, checks, variant, budget, samples, seed = job
    return [asdict(r) for r in run_checks(spec, checks, variant, budget, samples, seed)]


def cmd_verify(args, out) -> int:
    specs = _ring_specs(args)
    checks = [c.strip() for c in args.checks.split(",")] if args.checks else list(CHECKS)
    for c in checks:
        if c not in CHECKS:
            raise InvalidInput(f"unknown check {c!r}; expected some of {', '.join(CHECKS)}")

    cache: dict[tuple, list[dict]] = {}
    cache_path = Path(args.cache) if args.cache else None
    if cache_path and cache_path.exists():
        for line in cache_path.read_text().splitlines():
            if line.strip():
                entry = json.loads(line)
                cache[tuple(entry["key"])] = entry["records"]

    def key(spec, check):
        return (parse_ring_spec(spec).label, check, __version__, args.variant, args.samples, args.seed, args.budget)

    results: dict[tuple, list[dict]] = {}
    todo = []
    for spec in specs:
        missing = [c for c in checks if key(spec, c) not in cache]
        for c in checks:
            if key(spec, c) in cache:
                results[key(spec, c)] = cache[key(spec, c)]
        if missing:
            todo.append((spec, missing))

    jobs = [(s, m, args.variant, args.budget, args.samples, args.seed) for s, m in todo]
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            computed = list(pool.map(_verify_one, jobs, chunksize=4))
    else:
        computed = [_verify_one(j) for j in jobs]

    new_entries = []
    for (spec, missing), recs in zip(todo, computed):
        for c in missing:
            mine = [r for r in recs if r["check"] == c or r["check"].startswith(c + "-")]
            results[key(spec, c)] = mine
            new_entries.append({"key": list(key(spec, c)), "records": mine})
    if cache_path and new_entries:
        with cache_path.open("a") as fh:
            for entry in new_entries:
                fh.write(json.dumps(entry) + "\n")

    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    failed = False
    for spec in specs:
        for c in checks:
            for r in results[key(spec, c)]:
                rec = VerificationRecord(**r)
                if args.no_timings:
                    rec.formula_ms = rec.oracle_ms = ""
                writer.writerow(rec.row())
                failed |= rec.failed
    return EXIT_MISMATCH if failed else EXIT_OK


def cmd_distance(args, out) -> int:
    ring = parse_ring_spec(args.ring[0])
    g = build_clean_graph(ring, args.budget)
    a, b = parse_vertex(g, args.v1), parse_vertex(g, args.v2)
    d = int(bfs_distances(g, a)[g.vertex_id(b)])
    out.write(f"bfs: {_fmt(math.inf if d < 0 else d)}\n")
    if a == b:
        out.write("closed-form: 0\n")
    elif ring.n < 2:
        out.write("closed-form: unsupported (single local factor, graph disconnected)\n")
    else:
        out.write(f"closed-form: {closed_form_distance(ring, a, b)}\n")
    return EXIT_OK


def cmd_matching(args, out) -> int:
    ring = parse_ring_spec(args.ring[0])
    m = construct_matching(ring)
    g = build_clean_graph(ring, args.budget)
    ok = verify_matching(g, m)
    if args.json:
        out.write(m.to_json() + "\n")
        return EXIT_OK if ok else EXIT_MISMATCH
    out.write(f"constructed matching: size {m.size}, perfect {_fmt(m.is_perfect)}, valid {_fmt(ok)}\n")
    out.write(f"closed form: {matching_number_closed_form(ring)}\n")
    if g.num_vertices <= DEFAULT_MATCHING_BUDGET:
        out.write(f"exact oracle: {maximum_matching_oracle(g).size}\n")
    else:
        out.write(f"exact oracle: skipped (N={g.num_vertices} > {DEFAULT_MATCHING_BUDGET})\n")
    if m.unsaturated:
        out.write("unsaturated: " + ", ".join(f"e#{v // ring.phi},u#{v % ring.phi}" for v in m.unsaturated) + "\n")
    return EXIT_OK if ok else EXIT_MISMATCH


def cmd_export(args, out) -> int:
    ring = parse_ring_spec(args.ring[0])
    data = export_graph(build_clean_graph(ring, args.budget), args.format)
    if args.output:
        Path(args.output).write_bytes(data)
    else:
        out.write(data.decode())
    return EXIT_OK


def cmd_bench(args, out) -> int:
    specs = list(args.specs) + list(args.ring or [])
    if not specs:
        raise InvalidInput("bench needs at least one ring spec")
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["ring", "num_vertices", "closed_form", "closed_form_ms", "oracle", "oracle_ms", "note"])
    for spec in specs:
        ring = parse_ring_spec(spec)
        if ring.n < 2:
            writer.writerow([ring.label, ring.num_vertices, "inf", "", "", "", "single local factor"])
            continue
        best = math.inf
        for _ in range(args.repeat):
            value, dt = _timed(wiener_closed_form, ring, args.variant)
            best = min(best, dt)
        try:
            g, build_t = _timed(build_clean_graph, ring, args.budget)
        except BudgetExceeded as exc:
            writer.writerow([ring.label, ring.num_vertices, value, f"{best * 1000:.4f}", "", "", f"oracle skipped: {exc}"])
            continue
        oracle, dt = _timed(wiener_oracle, g)
        writer.writerow([ring.label, ring.num_vertices, value, f"{best * 1000:.4f}", _fmt(oracle), f"{(dt + build_t) * 1000:.3f}", ""])
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cleangraph", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, ring_required=True):
        p.add_argument("--ring", action="append", required=ring_required, help='ring spec, e.g. "15" or "2^1*2^1"')
        p.add_argument("--budget", type=int, default=DEFAULT_VERTEX_BUDGET, help="vertex budget for graph oracles")
        p.add_argument("--variant", choices=VARIANTS, default="proof", help="Wiener closed-form variant")

    p = sub.add_parser("analyze", help="summarise a ring and its clean graph")
    common(p)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("verify", help="check formulas against oracles over rings, emit CSV")
    common(p, ring_required=False)
    p.add_argument("--range", help="moduli a..b")
    p.add_argument("--min-primes", type=int, default=1, help="keep only moduli with at least this many distinct primes")
    p.add_argument("--checks", help=f"comma list from {','.join(CHECKS)}")
    p.add_argument("--samples", type=int, default=1000, help="sampled vertex pairs for the distance check")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cache", help="JSON-lines result cache")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--output", help="write CSV here instead of stdout")
    p.add_argument("--no-timings", action="store_true", help="leave timing columns empty (byte-stable output)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("distance", help="distance between two vertices")
    common(p)
    p.add_argument("v1")
    p.add_argument("v2")
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("matching", help="constructed matching vs closed form vs exact oracle")
    common(p)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_matching)

    p = sub.add_parser("export", help="write the graph as dot, json or csv-edges")
    common(p)
    p.add_argument("--format", choices=EXPORT_FORMATS, default="dot")
    p.add_argument("--output", help="file path (default stdout)")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("bench", help="time closed-form vs exhaustive Wiener")
    common(p, ring_required=False)
    p.add_argument("specs", nargs="*")
    p.add_argument("--repeat", type=int, default=5)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    out = sys.stdout
    handle = None
    try:
        if getattr(args, "output", None) and args.command == "verify":
            handle = open(args.output, "w", newline="")
            out = handle
        return args.func(args, out)
    except InvalidInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (DomainError, Unsupported) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except CleanGraphError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    finally:
        if handle is not None:
            handle.close()


if __name__ == "__main__":
    sys.exit(main())
