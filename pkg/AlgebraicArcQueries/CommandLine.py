#Command line front end: instance generation, lens cutting, structure building, batch queries, intersection
#counting, ray shooting, oracle verification with shrinking, and benchmarks.
#Exit codes: 0 success, 2 verification mismatch, 3 input error.
import argparse
import csv
import json
import logging
import operator
import sys
from concurrent.futures import ThreadPoolExecutor
from itertools import combinations

from AlgebraicArcQueries.Algebra import format_rational, geometry_error
from AlgebraicArcQueries.Arcs import point2
from AlgebraicArcQueries.Bench import (OPERATIONS, bench_point, plot_records, run_suite, standard_suite,
                                       write_csv)
from AlgebraicArcQueries.Cutting import cutting
from AlgebraicArcQueries.Instances import (generate_arcs, generate_points, generate_ranges, generate_rays,
                                           generate_segments, instance_format_error, instance_spec, read_arcs,
                                           read_queries, read_ranges, write_arcs, write_queries, write_ranges)
from AlgebraicArcQueries.IntersectionCounting import (build_once_counter, offline_intersection_count,
                                                      query_once_count, verify_pseudoseg_arrangement)
from AlgebraicArcQueries.LensCut import STRATEGIES as CUT_STRATEGIES, cut_to_pseudosegments, depth_cycle_witness
from AlgebraicArcQueries.Oracle import (oracle_below_count, oracle_bichromatic_intersections, oracle_first_hit,
                                        oracle_once_count, oracle_segment_count, oracle_stab_count, oracle_stab_fold,
                                        oracle_stab_report, oracle_total_intersections, segment_arc)
from AlgebraicArcQueries.PseudoStructures import (STRATEGIES as PARTITION_STRATEGIES, pseg_count_below,
                                                  pseudo_segment_tree)
from AlgebraicArcQueries.RayShooting import query_through_vertex, ray_structure
from AlgebraicArcQueries.Stabbing import build_stab_count, build_stab_report

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_MISMATCH, EXIT_INPUT = 0, 2, 3

SKIPPED = "degenerate"

RANGE_KINDS = ("stab-count", "stab-report", "semigroup")
VERIFY_KINDS = RANGE_KINDS + ("intersections", "lens-cut", "pseg-count", "once-count", "depth-cycle", "rayshoot")


def _maximum(a, b):
    return b if a is None else max(a, b)


def _minimum(a, b):
    return b if a is None else min(a, b)


COMBINERS = {"sum": (operator.add, 0), "max": (_maximum, None), "min": (_minimum, None)}


def _text(value):
    """Answers as JSON-friendly values, rationals as "p/q"."""
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, (list, tuple)):
        return [_text(v) for v in value]
    return format_rational(value)


def _emit(args, rows, columns):
    """Writes rows as JSON lines or CSV to --out or standard output."""
    handle = open(args.out, "w", newline="") if getattr(args, "out", None) else sys.stdout
    try:
        if args.format == "csv":
            writer = csv.DictWriter(handle, fieldnames=columns, extrasaction="ignore")
            writer.writeheader()
            for row in rows:
                writer.writerow({key: json.dumps(_text(row.get(key))) if isinstance(row.get(key), (list, tuple))
                                 else _text(row.get(key)) for key in columns})
        else:
            for row in rows:
                handle.write(json.dumps({key: _text(row.get(key)) for key in columns}, sort_keys=True) + "\n")
    finally:
        if handle is not sys.stdout:
            handle.close()


def _fan_out(function, items, workers):
    """Answers in input order, computed on a thread pool when workers > 1."""
    if workers <= 1:
        return [function(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(function, items))


def _spec(args, n=None, queries=None, seed=None):
    mix = tuple(float(w) for w in args.mix.split(",")) if getattr(args, "mix", None) else (1, 1, 1)
    return instance_spec(args.n if n is None else n, seed=args.seed if seed is None else seed, mix=mix,
                         extent=args.extent, denominator=args.denominator,
                         queries=args.queries if queries is None else queries)


# gen

def command_gen(args):
    spec = _spec(args, queries=args.n if args.kind in ("points", "segments", "rays") else args.queries)
    header = {"spec": spec.to_record()}
    if args.kind == "arcs":
        write_arcs(args.out, generate_arcs(spec), **header)
    elif args.kind == "ranges":
        kinds = tuple(args.range_kinds.split(",")) if args.range_kinds else ("disk", "parabola_region", "sandwich")
        write_ranges(args.out, generate_ranges(spec, kinds), **header)
    elif args.kind == "points":
        write_queries(args.out, generate_points(spec), **header)
    elif args.kind == "segments":
        write_queries(args.out, generate_segments(spec), **header)
    else:
        write_queries(args.out, generate_rays(spec), **header)
    logger.info("wrote %d %s to %s", args.n, args.kind, args.out)
    return EXIT_OK


# lens-cut

def command_lens_cut(args):
    arcs = read_arcs(args.input)
    pieces, plan, stats = cut_to_pseudosegments(arcs, strategy=args.strategy, mode=args.mode)
    if args.pieces:
        write_arcs(args.pieces, pieces, stats=stats)
    stats["within_bound"] = stats["cuts"] <= stats["lenses"]
    _emit(args, [stats], ("n", "pairs", "lenses", "cuts", "pieces", "verify", "within_bound"))
    return EXIT_OK if stats.get("verify", True) else EXIT_MISMATCH


# build

def _build(args, items):
    if args.structure == "cutting":
        return cutting(items, args.r or 1, seed=args.seed, with_rays=args.with_rays, strict=False)
    if args.structure == "stab-count":
        return build_stab_count(items, m=args.m, seed=args.seed, strategy=args.partition)
    if args.structure in ("stab-report", "semigroup"):
        return build_stab_report(items, t=args.t, seed=args.seed, strategy=args.partition)
    return ray_structure(items, strategy=args.partition, seed=args.seed)


def _load(args, path):
    if args.structure in RANGE_KINDS:
        return read_ranges(path)
    return read_arcs(path)


def command_build(args):
    items = _load(args, args.input)
    structure = _build(args, items)
    if args.structure == "cutting":
        stats = {"n": len(items), "r": structure.r, "cells": len(structure.cells),
                 "max_crossing": max((int(mask.sum()) for mask in structure.crossing_masks), default=0)}
        if args.dump:
            with open(args.dump, "w") as handle:
                for record in structure.dump_cells():
                    handle.write(json.dumps(_text_record(record), sort_keys=True) + "\n")
    elif args.structure == "stab-count" or args.structure == "ray":
        stats = dict(structure.stats)
    else:
        stats = {"n": len(items), "t": structure.t, "r": structure.r}
    stats["structure"] = args.structure
    _emit(args, [stats], sorted(stats))
    return EXIT_OK


def _text_record(record):
    return {key: value if isinstance(value, (str, int, type(None))) else _text(value) for key, value in record.items()}


# query

def _stab_answer(args, structure, ranges, q):
    """(answer, probes) from the structure, or from the oracle under --oracle."""
    if args.structure == "stab-count":
        return (oracle_stab_count(ranges, q), len(ranges)) if args.oracle else structure.query(q)
    if args.structure == "stab-report":
        return (oracle_stab_report(ranges, q), len(ranges)) if args.oracle else structure.report(q)
    combine, identity = COMBINERS[args.combine]
    if args.oracle:
        return oracle_stab_fold(ranges, q, combine, identity), len(ranges)
    return structure.fold(q, combine, identity), None


def command_query(args):
    ranges = read_ranges(args.input)
    queries = read_queries(args.queries_file)
    if any(not isinstance(q, point2) for q in queries):
        raise instance_format_error("stabbing queries must be points")
    structure = None if args.oracle else _build(args, ranges)
    answers = _fan_out(lambda q: _stab_answer(args, structure, ranges, q), queries, args.workers)
    rows = [{"query": k, "answer": answer, "probes": probes} for k, (answer, probes) in enumerate(answers)]
    _emit(args, rows, ("query", "answer", "probes"))
    return EXIT_OK


# count-intersections

def command_count_intersections(args):
    arcs = read_arcs(args.input)
    other = read_arcs(args.other) if args.other else None
    if args.oracle:
        total = (oracle_total_intersections(arcs, args.mode) if other is None
                 else oracle_bichromatic_intersections(arcs, other, args.mode))
        _emit(args, [{"total": total}], ("total",))
        return EXIT_OK
    report = offline_intersection_count(arcs, other, mode=args.mode, seed=args.seed, strategy=args.strategy)
    if args.cells:
        _emit(args, report.cells, sorted(report.cells[0]) if report.cells else ("id",))
    else:
        record = report.to_record()
        _emit(args, [record], tuple(record))
    return EXIT_OK


# rayshoot

def _ray_answer(structure, arcs, query, oracle):
    """(answer, probes, oracle answer or None) for a ray or a segment query."""
    first, second = query
    try:
        if isinstance(second, point2):
            answer, probes = structure.count_segment(first, second)
            expected = oracle_segment_count(arcs, first, second) if oracle else None
        else:
            answer, probes = structure.first_hit(first, second)
            expected = oracle_first_hit(arcs, first, second)[0] if oracle else None
    except query_through_vertex as error:
        logger.debug("query skipped: %s", error)
        return SKIPPED, None, None
    return answer, probes, expected


def command_rayshoot(args):
    arcs = read_arcs(args.input)
    queries = read_queries(args.queries_file)
    if any(isinstance(q, point2) for q in queries):
        raise instance_format_error("ray shooting queries must be rays or segments")
    structure = ray_structure(arcs, strategy=args.partition, seed=args.seed)
    answers = _fan_out(lambda q: _ray_answer(structure, arcs, q, args.verify), queries, args.workers)
    rows, mismatches = [], 0
    for k, (answer, probes, expected) in enumerate(answers):
        row = {"ray": k, "answer": answer, "probes": probes}
        if args.verify and answer != SKIPPED:
            row["oracle"] = expected
            mismatches += answer != expected
        rows.append(row)
    _emit(args, rows, ("ray", "answer", "probes", "oracle") if args.verify else ("ray", "answer", "probes"))
    if mismatches:
        logger.error("%d ray shooting answers differ from the oracle", mismatches)
        return EXIT_MISMATCH
    return EXIT_OK


# verify

class _checker:
    """Builds one structure kind over an instance and answers a batch of queries next to the oracle.

    Arguments:
        kind {str} -- One of VERIFY_KINDS

    Keyword Arguments:
        mode {str} -- distinct or multiplicity (default: {"distinct"})
        fault {bool} -- Add one to every structure answer (default: {False})
        seed {int} -- Structure seed (default: {0})
    """

    def __init__(self, kind, mode="distinct", fault=False, seed=0):
        self.kind = kind
        self.mode = mode
        self.fault = fault
        self.seed = seed

    def instance(self, spec):
        if self.kind in RANGE_KINDS:
            items = generate_ranges(spec)
        elif self.kind == "once-count":
            # query segments meet input segments at most once
            items = generate_arcs(instance_spec(spec.n, seed=spec.seed, mix=(1, 0, 0), extent=spec.extent,
                                                denominator=spec.denominator, queries=spec.queries))
        else:
            items = generate_arcs(spec)
        return items, self.queries(items, spec)

    def queries(self, items, spec):
        """Generated queries for an instance; depth-cycle queries are the pairs of input ids."""
        if self.kind in RANGE_KINDS or self.kind == "pseg-count":
            return generate_points(spec)
        if self.kind == "rayshoot":
            return generate_segments(spec) + generate_rays(spec)
        if self.kind == "once-count":
            return generate_segments(spec)
        if self.kind == "depth-cycle":
            return [(a.id, b.id) for a, b in combinations(items, 2)]
        return [None]

    def answers(self, items, queries):
        answers = self._answers(items, queries)
        return [self._faulty(a) if self.fault and a != SKIPPED else a for a in answers]

    def _answers(self, items, queries):
        if self.kind == "stab-count":
            structure = build_stab_count(items, seed=self.seed)
            return [structure.query(q)[0] for q in queries]
        if self.kind == "stab-report":
            structure = build_stab_report(items, seed=self.seed)
            return [structure.report(q)[0] for q in queries]
        if self.kind == "semigroup":
            structure = build_stab_report(items, seed=self.seed)
            return [structure.fold(q, operator.add, 0) for q in queries]
        if self.kind == "intersections":
            return [offline_intersection_count(items, mode=self.mode, seed=self.seed).total]
        if self.kind == "lens-cut":
            pieces, _, _ = cut_to_pseudosegments(items, mode=self.mode, verify=False)
            return [(verify_pseudoseg_arrangement(pieces, seed=self.seed),
                     oracle_total_intersections(pieces, self.mode))]
        if self.kind == "pseg-count":
            pieces, _, _ = cut_to_pseudosegments(items, verify=False)
            structure = pseudo_segment_tree(pieces, seed=self.seed)
            return [pseg_count_below(pieces, q, structure)[0] for q in queries]
        if self.kind == "once-count":
            structure = build_once_counter(items)
            return [self._once_answer(structure, items, q) for q in queries]
        if self.kind == "depth-cycle":
            arcs = {arc.id: arc for arc in items}
            return [depth_cycle_witness(arcs[i], arcs[j]) if i in arcs and j in arcs else SKIPPED
                    for i, j in queries]
        structure = ray_structure(items, seed=self.seed)
        return [_ray_answer(structure, items, q, False)[0] for q in queries]

    @staticmethod
    def _once_answer(structure, items, query):
        segment = segment_arc(*query)
        if any(arc.curve.key() == segment.curve.key() for arc in items):
            return SKIPPED
        return query_once_count(structure, segment)

    def expected(self, items, query):
        if self.kind == "stab-count":
            return oracle_stab_count(items, query)
        if self.kind == "stab-report":
            return oracle_stab_report(items, query)
        if self.kind == "semigroup":
            return oracle_stab_fold(items, query, operator.add, 0)
        if self.kind == "intersections":
            return oracle_total_intersections(items, self.mode)
        if self.kind == "lens-cut":
            return True, oracle_total_intersections(items, self.mode)
        if self.kind == "pseg-count":
            return oracle_below_count(cut_to_pseudosegments(items, verify=False)[0], query)
        if self.kind == "once-count":
            return oracle_once_count(items, segment_arc(*query))
        if self.kind == "depth-cycle":
            pair = [arc for arc in items if arc.id in query]
            return oracle_total_intersections(pair) >= 2
        first, second = query
        if isinstance(second, point2):
            return oracle_segment_count(items, first, second)
        return oracle_first_hit(items, first, second)[0]

    @staticmethod
    def _faulty(answer):
        if isinstance(answer, bool):
            return not answer
        if isinstance(answer, list):
            return answer + [-1]
        if isinstance(answer, tuple):
            return (_checker._faulty(answer[0]),) + answer[1:]
        return -1 if answer is None else answer + 1

    def mismatches(self, items, queries):
        """Indices of the queries where the structure and the oracle disagree."""
        answers = self.answers(items, queries)
        return [k for k, (q, a) in enumerate(zip(queries, answers)) if a != SKIPPED and a != self.expected(items, q)]

    def shrink(self, items, query):
        """Greedily drops inputs while the query still fails, returning a minimal failing instance."""
        current = list(items)
        progress = True
        while progress:
            progress = False
            for k in range(len(current)):
                trial = current[:k] + current[k + 1:]
                if trial and self.mismatches(trial, [query]):
                    current, progress = trial, True
                    break
        return current


def _witness_record(items, query):
    """The ids of a failing instance with its query, rationals as "p/q"."""
    record = {"inputs": [item.id for item in items], "query": None}
    if isinstance(query, point2):
        record["query"] = _text([query.x, query.y])
    elif isinstance(query, tuple) and all(isinstance(v, int) for v in query):
        record["query"] = list(query)
    elif query is not None:
        first, second = query
        second = list(second) if isinstance(second, tuple) else [second.x, second.y]
        record["query"] = _text([[first.x, first.y], second])
    return record


def command_verify(args):
    checker = _checker(args.structure, args.mode, args.inject_fault, args.seed)
    rows, failed = [], False
    if args.input:
        items = _load(args, args.input)
        queries = read_queries(args.queries_file) if args.queries_file else checker.queries(items, _spec(args))
        instances = [(items, queries)]
    else:
        instances = (checker.instance(_spec(args, seed=args.seed + k)) for k in range(args.instances))
    for k, (items, queries) in enumerate(instances):
        bad = checker.mismatches(items, queries)
        row = {"instance": k, "queries": len(queries), "mismatches": len(bad), "witness": None}
        if bad:
            failed = True
            query = queries[bad[0]]
            witness = checker.shrink(items, query)
            row["witness"] = json.dumps(_witness_record(witness, query), sort_keys=True)
            logger.error("instance %d: %d mismatches; minimal witness %s", k, len(bad), row["witness"])
        rows.append(row)
        if failed and not args.keep_going:
            break
    _emit(args, rows, ("instance", "queries", "mismatches", "witness"))
    return EXIT_MISMATCH if failed else EXIT_OK


# bench

def command_bench(args):
    if args.operation:
        suite = [bench_point(args.operation, args.n, m=args.m, r=args.r, strategy=args.partition,
                             queries=args.queries)]
    elif args.suite == "standard":
        suite = standard_suite(args.queries)
    else:
        suite = []
    records = run_suite(suite, seed=args.seed)
    write_csv(args.csv, records)
    if args.svg:
        fits = plot_records(args.svg, records)
        logger.info("fitted exponents: %s", fits)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="arcqueries", description="Exact range searching, intersection counting "
                                     "and ray shooting over algebraic arcs.")
    parser.add_argument("--seed", type=int, default=0, help="Seed of every random choice (default: 0).")
    parser.add_argument("--mode", choices=("distinct", "multiplicity"), default="distinct",
                        help="How intersection points are counted.")
    parser.add_argument("--oracle", action="store_true", help="Answer with the brute-force oracle.")
    parser.add_argument("--format", choices=("json", "csv"), default="json", help="Output format.")
    parser.add_argument("--out", help="Output file (default: standard output).")
    parser.add_argument("--workers", type=int, default=1, help="Threads answering batch queries.")
    parser.add_argument("-v", "--verbose", action="store_true", help="Log at debug level.")
    commands = parser.add_subparsers(dest="command", required=True)

    def instance_options(command, n=64):
        command.add_argument("--n", type=int, default=n, help=f"Instance size (default: {n}).")
        command.add_argument("--queries", type=int, default=100, help="Number of queries (default: 100).")
        command.add_argument("--mix", help="Weights of segments,circles,parabolas (default: 1,1,1).")
        command.add_argument("--extent", type=int, default=8, help="Coordinate range [-extent, extent].")
        command.add_argument("--denominator", type=int, default=16, help="Grid denominator of coordinates.")

    def structure_options(command, choices):
        command.add_argument("--structure", choices=choices, required=True)
        command.add_argument("--partition", choices=PARTITION_STRATEGIES, default="signature_lex")
        command.add_argument("--r", type=int, help="Cutting parameter.")
        command.add_argument("--m", type=int, help="Space parameter of stab-count, in [n^(3/2), n^2].")
        command.add_argument("--t", type=int, help="Stop size parameter of stab-report (default: ceil(n^(1/4))).")

    gen = commands.add_parser("gen", help="Generate a seeded instance file.")
    gen.add_argument("kind", choices=("arcs", "ranges", "points", "segments", "rays"))
    gen.add_argument("--range-kinds", help="Comma separated subset of disk,parabola_region,sandwich.")
    gen.add_argument("--output", dest="out", required=True)
    instance_options(gen)
    gen.set_defaults(handler=command_gen)

    lens = commands.add_parser("lens-cut", help="Cut arcs into pseudo-segments.")
    lens.add_argument("input")
    lens.add_argument("--strategy", choices=CUT_STRATEGIES, default="smaller_id")
    lens.add_argument("--pieces", help="Write the pseudo-segments to this arcs file.")
    lens.set_defaults(handler=command_lens_cut)

    build = commands.add_parser("build", help="Build a structure and print its statistics.")
    build.add_argument("input")
    structure_options(build, ("cutting", "stab-count", "stab-report", "ray"))
    build.add_argument("--with-rays", action="store_true", help="Cut vertical walls through every arc end too.")
    build.add_argument("--dump", help="Write the cutting cells as JSON lines.")
    build.set_defaults(handler=command_build)

    query = commands.add_parser("query", help="Answer point stabbing queries over ranges.")
    query.add_argument("input")
    query.add_argument("queries_file")
    structure_options(query, ("stab-count", "stab-report", "semigroup"))
    query.add_argument("--combine", choices=sorted(COMBINERS), default="sum", help="Semigroup of range weights.")
    query.set_defaults(handler=command_query)

    count = commands.add_parser("count-intersections", help="Count the intersections among arcs offline.")
    count.add_argument("input")
    count.add_argument("--other", help="Second arcs file; only pairs across the two files count.")
    count.add_argument("--strategy", choices=CUT_STRATEGIES, default="smaller_id")
    count.add_argument("--cells", action="store_true", help="Print the per-cell breakdown.")
    count.set_defaults(handler=command_count_intersections)

    ray = commands.add_parser("rayshoot", help="First hits of rays and segment intersection counts.")
    ray.add_argument("input")
    ray.add_argument("queries_file")
    ray.add_argument("--partition", choices=PARTITION_STRATEGIES, default="signature_lex")
    ray.add_argument("--verify", action="store_true", help="Cross-check every answer against the oracle.")
    ray.set_defaults(handler=command_rayshoot)

    verify = commands.add_parser("verify", help="Compare a structure with its oracle on seeded instances.")
    verify.add_argument("--structure", required=True, choices=VERIFY_KINDS)
    verify.add_argument("--input", help="Instance file instead of generated instances.")
    verify.add_argument("--queries-file", help="Queries for --input (default: generated).")
    verify.add_argument("--instances", type=int, default=10, help="Generated instances (default: 10).")
    verify.add_argument("--inject-fault", action="store_true", help="Add one to every structure answer.")
    verify.add_argument("--keep-going", action="store_true", help="Check every instance after a mismatch.")
    instance_options(verify, n=16)
    verify.set_defaults(handler=command_verify)

    bench = commands.add_parser("bench", help="Measure probe and time scaling.")
    bench.add_argument("--suite", choices=("standard", "empty"), default="standard")
    bench.add_argument("--operation", choices=OPERATIONS, help="Measure a single point instead of a suite.")
    bench.add_argument("--n", type=int, default=256)
    bench.add_argument("--m", type=int)
    bench.add_argument("--r", type=int)
    bench.add_argument("--partition", choices=PARTITION_STRATEGIES, default="signature_lex")
    bench.add_argument("--queries", type=int, default=50)
    bench.add_argument("--csv", required=True, help="CSV output path.")
    bench.add_argument("--svg", help="SVG plot output path.")
    bench.set_defaults(handler=command_bench)
    return parser


def main(argv=None):
    """Runs one command and returns its exit code."""
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as stop:
        # argparse exits with 2 on usage errors, which count as input errors here
        return EXIT_INPUT if stop.code == 2 else stop.code
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.handler(args)
    except (geometry_error, OSError) as error:
        logger.error("input error: %s", error)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
