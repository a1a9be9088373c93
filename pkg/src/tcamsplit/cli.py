"""Command line entry point: ``tcamsplit <command> ...``.

Exit status is 0 on success, 1 for bad input, 2 when an internal consistency
check fails.
"""
from __future__ import annotations

import argparse
import json
import re
import sys
from pathlib import Path
from typing import Sequence

from . import __version__
from .bitmatcher import complexity, realize_sequence, synthesize
from .errors import InvariantViolation, TcamError
from .forcing import clique_partition, clique_pairs, force_sequence, forced_transactions
from .harness import DEFAULT_BUDGET, segment_optimality_report
from .model import (
    LeafColoring,
    apply_sequence,
    coloring_from_table,
    conflicts,
    format_partition,
    induced_partition,
    parse_partition,
    parse_sequence,
    parse_table,
    sequence_from_coloring,
    source_weights,
    table_from_coloring,
)
from .oracles import DEFAULT_MAX_SUM, LambdaOracle
from .ordering import derandomized_order, exhaustive_best_order, greedy_order
from .segments import color_segments_full
from .structure import fragmentation, transactions_graph


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        print(json.dumps(payload, indent=2))
    else:
        print(text)


def _partition(args, text: str):
    return parse_partition(text, args.width)


def _parse_order(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise TcamError(f"cannot parse order {text!r}") from exc


def _parse_pairs(text: str) -> list[tuple[int, int]]:
    pairs = re.findall(r"\(\s*(\d+)\s*,\s*(\d+)\s*\)", text)
    leftover = re.sub(r"\(\s*\d+\s*,\s*\d+\s*\)|[;\s]", "", text)
    if leftover:
        raise TcamError(f"cannot parse pairs {text!r}; expected '(i,j);(i,j)'")
    return [(int(a), int(b)) for a, b in pairs]


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise TcamError(f"cannot read {path}: {exc.strerror}") from exc


# --------------------------------------------------------------------------
# Commands
# --------------------------------------------------------------------------


def cmd_synth(args) -> int:
    p = _partition(args, args.partition)
    table = synthesize(p)
    if len(table) != complexity(p):
        raise InvariantViolation(f"synthesized {len(table)} rules for a partition of complexity {complexity(p)}")
    _emit(args, {"partition": list(p.weights), "lambda": len(table), "rules": table.to_text().splitlines()},
          table.to_text())
    return 0


def cmd_segmented(args) -> int:
    p = _partition(args, args.partition)
    lam = complexity(p)
    if args.order:
        order = _parse_order(args.order)
    elif args.search == "derand":
        order = derandomized_order(p)
    elif args.search == "greedy":
        order = greedy_order(p)
    elif args.search == "exhaustive":
        order = exhaustive_best_order(p).best_order
    else:
        order = tuple(range(1, p.k + 1))
    c = color_segments_full(LeafColoring.from_partition(p, order))
    table = table_from_coloring(c)
    if induced_partition(c, p.k) != list(p.weights):
        raise InvariantViolation("segmented table does not reproduce the partition")
    n = len(table)
    payload = {"partition": list(p.weights), "order": list(order), "rules": table.to_text().splitlines(),
               "n": n, "lambda": lam, "gap": n - lam}
    note = f"# order {','.join(map(str, order))}: {n} rules, optimum {lam}, gap={n - lam}"
    _emit(args, payload, table.to_text() + "\n" + note)
    return 0


def cmd_lambda(args) -> int:
    p = _partition(args, args.partition)
    lam = complexity(p)
    payload = {"partition": list(p.weights), "lambda": lam}
    text = str(lam)
    if args.brute:
        brute = LambdaOracle(args.max_oracle_sum)(p)
        payload["brute"] = brute
        text += f"\nexhaustive search: {brute}"
        if brute != lam:
            raise InvariantViolation(f"Bit Matcher gives {lam}, exhaustive search gives {brute}")
    _emit(args, payload, text)
    return 0


def cmd_analyze(args) -> int:
    if bool(args.sequence) == bool(args.table):
        raise TcamError("give exactly one of --sequence or --table")
    coloring = None
    if args.table:
        table = parse_table(_read(args.table), args.width)
        coloring = coloring_from_table(table)
        seq = sequence_from_coloring(coloring)
    else:
        seq = parse_sequence(_read(args.sequence))
        if not seq:
            raise TcamError("empty sequence")
    k = args.k
    weights = source_weights(seq, k)
    graph = transactions_graph(seq, weights)
    payload = {"partition": weights, "length": len(seq), "graph": graph.to_dict()}
    lines = [f"partition {format_partition(weights)}", f"transactions {len(seq)}", graph.to_text()]
    if coloring is None:
        width = (sum(weights)).bit_length() - 1
        try:
            coloring = realize_sequence(seq, width, len(weights))
        except TcamError as exc:
            lines.append(f"fragmentation unavailable: {exc}")
    if coloring is not None:
        frag = fragmentation(coloring, len(weights))
        payload["fragmentation"] = frag.to_dict()
        lines.append(f"segments {' '.join(map(str, frag.counts))}")
        lines.append(f"M {frag.maximum}")
    _emit(args, payload, "\n".join(lines))
    return 0


def _forced_payload(p0, pairs, q) -> tuple[dict, str]:
    forced = forced_transactions(pairs)
    after = apply_sequence(q.weights, forced)
    scale = 8 ** len(pairs)
    if after != [scale * x for x in p0.weights]:
        raise InvariantViolation("forced transactions do not lead back to the scaled base")
    payload = {"partition": list(q.weights), "width": q.width, "forced": [str(t) for t in forced]}
    text = "\n".join([format_partition(q.weights), f"# width {q.width}"] + [f"# forced {t}" for t in forced])
    return payload, text


def cmd_force(args) -> int:
    p0 = _partition(args, args.base)
    pairs = _parse_pairs(args.pairs)
    q = force_sequence(p0, pairs)
    _emit(args, *_forced_payload(p0, pairs, q))
    return 0


def cmd_clique(args) -> int:
    p0 = _partition(args, args.base)
    q = clique_partition(args.k, p0)
    _emit(args, *_forced_payload(p0, clique_pairs(args.k), q))
    return 0


def cmd_enumerate(args) -> int:
    if args.width is None:
        raise TcamError("enumerate needs --width")
    if args.k != "all" and not args.k.isdigit():
        raise TcamError(f"--k must be a positive integer or 'all', got {args.k!r}")
    k = args.k if args.k == "all" else int(args.k)
    report = segment_optimality_report(args.width, k, budget=args.budget, jobs=args.jobs)
    if args.json:
        print(json.dumps(report.to_dict(), indent=2))
    else:
        sys.stdout.write(report.to_csv())
    return 0


def cmd_verify(args) -> int:
    table = parse_table(_read(args.table), args.width)
    p = parse_partition(args.partition, table.width)
    c = coloring_from_table(table)
    got = induced_partition(c, p.k)
    n = conflicts(c)[0]
    ok = got == list(p.weights) and sum(got) == p.total
    payload = {"rules": len(table), "conflicts": n, "partition": got, "expected": list(p.weights),
               "lambda": complexity(p), "match": ok}
    text = (f"{len(table)} rules, induces {format_partition(got)}, optimum {complexity(p)}: "
            + ("match" if ok else f"MISMATCH (expected {p})"))
    _emit(args, payload, text)
    return 0 if ok else 1


# --------------------------------------------------------------------------
# Parser
# --------------------------------------------------------------------------


def _add_globals(parser: argparse.ArgumentParser, top: bool) -> None:
    default = (lambda v: v) if top else (lambda v: argparse.SUPPRESS)
    parser.add_argument("--json", action="store_true", default=default(False), help="structured output")
    parser.add_argument("--width", type=int, default=default(None), help="address width W")
    parser.add_argument("--max-oracle-sum", type=int, default=default(DEFAULT_MAX_SUM),
                        help="largest partition sum the exhaustive oracle will accept")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tcamsplit", description="LPM rule tables for traffic splitting.")
    ap.add_argument("--version", action="version", version=__version__)
    _add_globals(ap, top=True)
    sub = ap.add_subparsers(dest="command", required=True)

    def cmd(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        _add_globals(sp, top=False)
        sp.set_defaults(func=func)
        return sp

    sp = cmd("synth", cmd_synth, "smallest LPM table for a partition")
    sp.add_argument("partition")

    sp = cmd("segmented", cmd_segmented, "smallest table with one segment per target")
    sp.add_argument("partition")
    how = sp.add_mutually_exclusive_group()
    how.add_argument("--order", help="segment order as target ids, e.g. 1,3,2")
    how.add_argument("--search", choices=("exhaustive", "derand", "greedy"))

    sp = cmd("lambda", cmd_lambda, "size of the smallest LPM table")
    sp.add_argument("partition")
    sp.add_argument("--brute", action="store_true", help="also run the exhaustive oracle")

    sp = cmd("analyze", cmd_analyze, "transactions-graph and fragmentation of a sequence or table")
    sp.add_argument("--sequence")
    sp.add_argument("--table")
    sp.add_argument("--k", type=int, help="number of targets (default: largest id used)")

    sp = cmd("force", cmd_force, "partition forcing a list of transactions")
    sp.add_argument("--base", required=True)
    sp.add_argument("--pairs", required=True, help='e.g. "(2,1);(3,2)"')

    sp = cmd("clique-partition", cmd_clique, "partition whose transactions-graph is a clique")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--base", required=True)

    sp = cmd("enumerate", cmd_enumerate, "partitions with no optimal segmented table")
    sp.add_argument("--k", default="all")
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--budget", type=int, default=DEFAULT_BUDGET)

    sp = cmd("verify", cmd_verify, "check a table against a partition")
    sp.add_argument("--table", required=True)
    sp.add_argument("--partition", required=True)
    return ap


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # usage errors are input errors; --help and --version exit cleanly
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except InvariantViolation as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 2
    except TcamError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
