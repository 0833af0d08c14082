"""khmseg command line interface.

Subcommands: normalize, clusters, label, build-sdb, segment, segment-words,
eval, review-export.  All files are UTF-8.  Exit codes: 0 success, 1 input
error, 2 database-invariant violation.
"""

from __future__ import annotations

import argparse
import sys
from typing import List, Optional

from .cluster_grammar import render_clusters, split_clusters
from .errors import InputError, InvariantError, KhmsegError
from .labeler import FallbackClusterDatabase, TrainingDatabase, label_clusters
from .normalizer import Diagnostic, normalize_text
from .script_model import default_tables, load_tables
from .sdb_pipeline import (
    build_cluster_inventory,
    build_sdb,
    ingest_lexicon,
    load_sdb,
    persist_labeled_clusters,
    persist_review_queue,
    persist_sdb,
    seed_fallback_db,
    write_fallback_skeleton,
)
from .segmenter import DEFAULT_SEPARATOR, evaluate, segment_syllables, segment_words


def _add_shared(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--tables", metavar="FILE", help="script tables file (default: shipped tables)")
    parser.add_argument("--tdb", metavar="FILE", help="training database TSV")
    parser.add_argument("--fallback", metavar="FILE", help="fallback cluster database TSV")
    parser.add_argument("--sdb", metavar="FILE", help="syllable database TSV")
    parser.add_argument("--lexicon", metavar="FILE", help="lexicon TSV")
    parser.add_argument("--in", dest="infile", metavar="FILE", help="input file (default: stdin)")
    parser.add_argument("--out", dest="outfile", metavar="FILE", help="output file (default: stdout)")
    parser.add_argument("--sep", default=DEFAULT_SEPARATOR, help="unit separator (default: |)")
    parser.add_argument("--lenient", action="store_true", help="repair instead of failing on bad input")
    parser.add_argument("--diagnostics", metavar="FILE", help="write diagnostics TSV here")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="khmseg",
        description="Khmer text normalization, cluster splitting and syllable segmentation",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (
        ("normalize", "normalize keystroke-order text line by line"),
        ("clusters", "split lines into component clusters ([x]+[y])"),
        ("label", "split and label lines ([x:LL]+[y:RR])"),
        ("build-sdb", "build the syllable database from a lexicon"),
        ("segment", "segment lines into syllables"),
        ("segment-words", "segment lines into lexicon words"),
        ("eval", "compare predicted segmentation against gold"),
        ("review-export", "export fallback-db skeleton and ambiguity queue"),
    ):
        p = sub.add_parser(name, help=helptext)
        _add_shared(p)
        if name == "eval":
            p.add_argument("--gold", metavar="FILE", required=True)
            p.add_argument("--pred", metavar="FILE", required=True)
        if name == "build-sdb":
            p.add_argument("--db6", metavar="FILE", help="write labeled clusters (DB 6) here")
            p.add_argument("--report", metavar="FILE", help="write the pipeline report here")
            p.add_argument("--review", metavar="FILE", help="write the review queue here")
    return parser


def _read_lines(args) -> List[str]:
    if args.infile:
        with open(args.infile, "r", encoding="utf-8") as f:
            return f.read().splitlines()
    return sys.stdin.read().splitlines()


def _write_out(args, text: str) -> None:
    if args.outfile:
        with open(args.outfile, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _load_dbs(args, tables, with_sdb=True):
    tdb = fallback = sdb = None
    if args.tdb:
        with open(args.tdb, "r", encoding="utf-8") as f:
            tdb = TrainingDatabase.load(f, tables)
    if args.fallback:
        with open(args.fallback, "r", encoding="utf-8") as f:
            fallback = FallbackClusterDatabase.load(f, tables)
    if with_sdb and args.sdb:
        with open(args.sdb, "r", encoding="utf-8") as f:
            sdb = load_sdb(f, tables)
    return tdb, fallback, sdb


def _write_diagnostics(args, rows: List[str]) -> None:
    if args.diagnostics:
        with open(args.diagnostics, "w", encoding="utf-8") as f:
            f.writelines(rows)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except InvariantError as exc:
        print(f"khmseg: {exc}", file=sys.stderr)
        return 2
    except (InputError, OSError) as exc:
        print(f"khmseg: {exc}", file=sys.stderr)
        return 1
    except KhmsegError as exc:
        print(f"khmseg: {exc}", file=sys.stderr)
        return 1


def _dispatch(args) -> int:
    if args.tables:
        with open(args.tables, "rb") as f:
            tables = load_tables(f)
    else:
        tables = default_tables()

    if args.command == "normalize":
        out_lines = []
        diag_rows = []
        for line_no, line in enumerate(_read_lines(args), start=1):
            diags: List[Diagnostic] = []
            out_lines.append(normalize_text(line, tables, lenient=args.lenient, diagnostics=diags))
            diag_rows.extend(
                f"{line_no}\t{d.column}\t{d.code}\t{d.message}\n" for d in diags
            )
        _write_out(args, "".join(l + "\n" for l in out_lines))
        _write_diagnostics(args, diag_rows)
        return 0

    if args.command == "clusters":
        out = []
        for line in _read_lines(args):
            canon = normalize_text(line, tables, lenient=True)
            out.append(render_clusters(split_clusters(canon, tables)))
        _write_out(args, "".join(l + "\n" for l in out))
        return 0

    if args.command == "label":
        tdb, fallback, sdb = _load_dbs(args, tables)
        out = []
        for line in _read_lines(args):
            canon = normalize_text(line, tables, lenient=True)
            clusters = split_clusters(canon, tables)
            labeled, _records = label_clusters(clusters, tables, tdb, fallback, sdb=sdb)
            out.append("+".join(f"[{lc.cluster.text}:{lc.label.value}]" for lc in labeled))
        _write_out(args, "".join(l + "\n" for l in out))
        return 0

    if args.command == "build-sdb":
        if not args.lexicon:
            raise InputError("build-sdb needs --lexicon")
        with open(args.lexicon, "rb") as f:
            entries = ingest_lexicon(f)
        tdb, fallback, _sdb = _load_dbs(args, tables, with_sdb=False)
        result = build_sdb(entries, tables, tdb, fallback)
        sdb_text = persist_sdb(result.sdb)
        if args.sdb:
            with open(args.sdb, "w", encoding="utf-8") as f:
                f.write(sdb_text)
        else:
            sys.stdout.write(sdb_text)
        if args.db6:
            with open(args.db6, "w", encoding="utf-8") as f:
                f.write(persist_labeled_clusters(result.labeled_entries))
        if args.report:
            with open(args.report, "w", encoding="utf-8") as f:
                f.write(result.report.render_tsv())
        if args.review:
            with open(args.review, "w", encoding="utf-8") as f:
                f.write(persist_review_queue(result.review_queue))
        _write_diagnostics(args, [d + "\n" for d in result.diagnostics])
        return 0

    if args.command in ("segment", "segment-words"):
        tdb, fallback, sdb = _load_dbs(args, tables)
        lexicon = None
        if args.command == "segment-words":
            if not args.lexicon:
                raise InputError("segment-words needs --lexicon")
            with open(args.lexicon, "rb") as f:
                lexicon = ingest_lexicon(f)
        out = []
        diag_rows = []
        for line_no, line in enumerate(_read_lines(args), start=1):
            diags: List[str] = []
            if lexicon is None:
                seg = segment_syllables(line, tables, tdb, fallback, sdb, args.sep, diags)
            else:
                seg = segment_words(line, lexicon, tables, tdb, fallback, sdb, args.sep, diags)
            out.append(seg.rendered)
            diag_rows.extend(f"{line_no}\t0\tsegment\t{d}\n" for d in diags)
        _write_out(args, "".join(l + "\n" for l in out))
        _write_diagnostics(args, diag_rows)
        return 0

    if args.command == "eval":
        with open(args.gold, "r", encoding="utf-8") as f:
            gold = f.read().splitlines()
        with open(args.pred, "r", encoding="utf-8") as f:
            pred = f.read().splitlines()
        report = evaluate(gold, pred, sep=args.sep)
        _write_out(args, report.render_tsv())
        return 0

    if args.command == "review-export":
        if not args.lexicon:
            raise InputError("review-export needs --lexicon")
        with open(args.lexicon, "rb") as f:
            entries = ingest_lexicon(f)
        tdb, fallback, _sdb = _load_dbs(args, tables, with_sdb=False)
        inventory = build_cluster_inventory(entries, tables)
        skeleton = write_fallback_skeleton(seed_fallback_db(inventory, tdb))
        _write_out(args, skeleton)
        if args.diagnostics:
            # The ambiguity queue from a labeling pass goes to --diagnostics.
            result = build_sdb(entries, tables, tdb, fallback)
            _write_diagnostics(args, [persist_review_queue(result.review_queue)])
        return 0

    raise InputError(f"unknown command {args.command}")


if __name__ == "__main__":
    sys.exit(main())
