"""Command-line front door: indexing, evaluation, experiments, serving."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import __version__
from .config import ServiceConfig, load_config
from .corpus import (
    FORMATS,
    TREC_SGML,
    DuplicateDocumentError,
    ParseError,
    build_index,
    load_corpus,
    save_archive,
)
from .delivery import ProfileStore
from .evaluation import evaluate_run, format_results_table, load_qrels, load_run
from .experiments import format_merge_table, merge_rows_csv, run_merge_experiment
from .synthetic import DEFAULT_SEED, synthetic_collection


def cmd_index(args: argparse.Namespace) -> int:
    path = Path(args.corpus)
    if not path.exists():
        print(f"error: corpus path {path} does not exist", file=sys.stderr)
        return 2
    try:
        docs = load_corpus(path, args.format)
    except (ParseError, DuplicateDocumentError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    index = build_index(docs)
    save_archive(args.out, docs)
    if index.doc_count == 0:
        print("warning: corpus contained no documents", file=sys.stderr)
    print(f"indexed {index.doc_count} documents, vocabulary size {len(index.vocabulary)}")
    print(f"wrote {args.out}")
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    try:
        run = load_run(args.run)
        qrels = load_qrels(args.qrels)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    results = evaluate_run(run, qrels)
    print(format_results_table(results))
    return 0


def _parse_floats(text: str) -> list[float]:
    return [float(part) for part in text.split(",") if part]


def _parse_ints(text: str) -> list[int]:
    return [int(part) for part in text.split(",") if part]


def cmd_merge_experiment(args: argparse.Namespace) -> int:
    collection = synthetic_collection(args.collection_seed)
    index = build_index(list(collection.docs))
    rows = run_merge_experiment(
        collection,
        index,
        accuracies=_parse_floats(args.accuracies),
        recognizer_counts=_parse_ints(args.recognizers),
        trials=args.trials,
        seed=args.seed,
    )
    print(format_merge_table(rows))
    if args.out:
        Path(args.out).write_text(merge_rows_csv(rows), "utf-8")
        print(f"wrote {args.out}")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    from .service import run_service

    try:
        config = load_config(args.config) if args.config else ServiceConfig()
    except (OSError, ValueError) as exc:
        print(f"error: bad config: {exc}", file=sys.stderr)
        return 1
    if config.corpus_path is None and config.index_path is None:
        print("error: config must name a corpus_path or index_path", file=sys.stderr)
        return 1
    kwargs = {}
    if config.index_path is not None:
        from .corpus import load_archive

        archive = Path(config.index_path)
        if not archive.exists():
            print(f"error: index file {archive} does not exist", file=sys.stderr)
            return 1
        docs, index = load_archive(archive)
        kwargs = {"docs": docs, "index": index}
    try:
        run_service(config, **kwargs)
    except KeyboardInterrupt:
        pass
    finally:
        logging.shutdown()
    return 0


def cmd_add_user(args: argparse.Namespace) -> int:
    store = ProfileStore(args.profiles)
    addresses = {}
    if args.email:
        addresses["email"] = args.email
    if args.fax:
        addresses["fax"] = args.fax
    if args.postal:
        addresses["postal"] = args.postal
    try:
        store.add_user(
            args.user,
            args.pin,
            delivery_address=addresses,
            preferred_format=args.format,
            preferred_threshold=args.threshold,
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"stored profile for {args.user} in {args.profiles}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spokensearch",
        description="Interactive retrieval over noisy spoken queries",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_index = sub.add_parser("index", help="parse a corpus and write an index archive")
    p_index.add_argument("--corpus", required=True, help="corpus file or directory")
    p_index.add_argument("--format", choices=FORMATS, default=TREC_SGML)
    p_index.add_argument("--out", default="index.json", help="archive output path")
    p_index.set_defaults(func=cmd_index)

    p_eval = sub.add_parser("eval", help="score a run file against qrels")
    p_eval.add_argument("--run", required=True, help="TSV: query_id, doc_id, rank")
    p_eval.add_argument("--qrels", required=True, help="TSV: query_id, doc_id")
    p_eval.set_defaults(func=cmd_eval)

    p_merge = sub.add_parser(
        "merge-experiment",
        help="corrupt/merge/retrieve the synthetic query set and report WER and MAP",
    )
    p_merge.add_argument("--accuracies", default="0.8", help="comma-separated, e.g. 0.6,0.8,1.0")
    p_merge.add_argument("--recognizers", default="1,2,3", help="comma-separated counts")
    p_merge.add_argument("--trials", type=int, default=10)
    p_merge.add_argument("--seed", type=int, default=7)
    p_merge.add_argument("--collection-seed", type=int, default=DEFAULT_SEED)
    p_merge.add_argument("--out", help="also write a CSV here")
    p_merge.set_defaults(func=cmd_merge_experiment)

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--config", help="JSON config file")
    p_serve.set_defaults(func=cmd_serve)

    p_user = sub.add_parser("add-user", help="create or update a user profile")
    p_user.add_argument("--profiles", required=True, help="profile store file")
    p_user.add_argument("--user", required=True)
    p_user.add_argument("--pin", required=True, help="digits only")
    p_user.add_argument("--email")
    p_user.add_argument("--fax")
    p_user.add_argument("--postal")
    p_user.add_argument("--format", default="ascii")
    p_user.add_argument("--threshold", type=float, default=None)
    p_user.set_defaults(func=cmd_add_user)

    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
