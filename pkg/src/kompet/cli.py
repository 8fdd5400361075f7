"""Command-line entry point: one subcommand per pipeline stage.

Exit codes: 0 success, 1 usage error, 2 input/format error, 3 runtime or
network error. Every command is deterministic for fixed inputs and --seed;
--json switches to machine-readable output.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import (
    agreement,
    corpus as corpus_mod,
    evaluate as evaluate_mod,
    review,
    significance,
    supervise as supervise_mod,
    taxonomy as taxonomy_mod,
)
from .errors import ApiError, InputError


def _dump_json(obj, out) -> None:
    out.write(json.dumps(obj, ensure_ascii=False, indent=2) + "\n")


def read_config(path: str | Path) -> dict[str, str]:
    """Parse a key=value config file; '#' starts a comment, quotes are stripped."""
    values: dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise InputError(f"config line {lineno}: expected key=value")
        key, _, value = stripped.partition("=")
        values[key.strip()] = value.strip().strip("\"'")
    return values


def _cfg(args, key: str, default, cast=str):
    """Resolve an option: flag wins, then config file, then default."""
    flag = getattr(args, key, None)
    if flag is not None:
        return flag
    config = getattr(args, "_config", {})
    if key in config:
        return cast(config[key])
    return default


def _base_url(args):
    # The environment variable overrides the API base; config supplies a
    # default when it is unset.
    return os.environ.get(taxonomy_mod.ESCO_BASE_URL_ENV) or _cfg(args, "esco_base_url", None)


# ---------------------------------------------------------------------------
# subcommand implementations


def _cmd_taxonomy_validate(args, out) -> int:
    language = _cfg(args, "language", "da")
    index = taxonomy_mod.load_taxonomy(args.file, language)
    kinds: dict[str, int] = {}
    for c in index:
        kinds[c.kind] = kinds.get(c.kind, 0) + 1
    if args.json:
        _dump_json(
            {
                "concepts": len(index),
                "language": language,
                "kinds": {k: kinds[k] for k in sorted(kinds)},
            },
            out,
        )
    else:
        out.write(f"ok: {len(index)} concepts, language {language}\n")
        for k in sorted(kinds):
            out.write(f"  {k}: {kinds[k]}\n")
    return 0


def _cmd_taxonomy_fetch(args, out) -> int:
    language = _cfg(args, "language", "da")
    limit = _cfg(args, "limit", 100, int)
    base_url = _base_url(args)
    concepts = taxonomy_mod.fetch_online(
        args.query,
        args.kind,
        language,
        limit=limit,
        base_url=base_url,
        timeout=args.timeout,
    )
    taxonomy_mod.write_taxonomy(concepts, out)
    return 0


def _cmd_stats(args, out) -> int:
    stats = corpus_mod.corpus_stats(corpus_mod.parse_corpus(args.corpus))
    if args.json:
        _dump_json(stats.to_dict(), out)
        return 0

    def fmt_mean(v):
        return f"{v:.2f}" if v is not None else "n/a"

    def fmt_int(v):
        return str(v) if v is not None else "n/a"

    def fmt_range(v):
        return f"[{v[0]}, {v[1]}]" if v is not None else "n/a"

    rows = [
        ("# Posts", str(stats.posts)),
        ("# Sentences", str(stats.sentences)),
        ("# Tokens", str(stats.tokens)),
        ("# Skill Spans", str(stats.skill_spans)),
        ("# Knowledge Spans", str(stats.knowledge_spans)),
        ("Mean Skill Span", fmt_mean(stats.skill_mean)),
        ("Mean Knowledge Span", fmt_mean(stats.knowledge_mean)),
        ("Median Skill Span", fmt_int(stats.skill_median)),
        ("Median Knowledge Span", fmt_int(stats.knowledge_median)),
        ("Skill [90%]", fmt_range(stats.skill_p90)),
        ("Knowledge [90%]", fmt_range(stats.knowledge_p90)),
    ]
    width = max(len(name) for name, _ in rows)
    for name, value in rows:
        out.write(f"{name:<{width}}  {value}\n")
    return 0


def _cmd_split(args, out) -> int:
    seed = _cfg(args, "seed", 0, int)
    try:
        sizes = tuple(int(x) for x in args.sizes.split(","))
    except ValueError:
        raise InputError(f"--sizes must be three comma-separated integers, got {args.sizes!r}")
    if len(sizes) != 3:
        raise InputError(f"--sizes must have exactly three parts, got {args.sizes!r}")
    corpus = corpus_mod.parse_corpus(args.corpus)
    train, dev, test = corpus_mod.split_corpus(corpus, sizes, seed)
    if args.json:
        _dump_json({"train": train, "dev": dev, "test": test, "seed": seed}, out)
    else:
        for name, ids in (("train", train), ("dev", dev), ("test", test)):
            out.write(f"{name} ({len(ids)}): {' '.join(ids)}\n")
    return 0


def _load_corpus_and_index(args):
    corpus = corpus_mod.parse_corpus(args.corpus)
    language = _cfg(args, "language", None)
    if language is None:
        if not corpus.postings:
            raise InputError("empty corpus and no --language given")
        language = corpus.postings[0].lang
    return corpus, taxonomy_mod.load_taxonomy(args.taxonomy, language)


def _cmd_supervise(args, out) -> int:
    corpus, index = _load_corpus_and_index(args)
    k = _cfg(args, "k", 100, int)
    retriever = None
    if args.online:
        base_url = _base_url(args)

        def retriever(surface: str, span_kind: str):
            api_kind = "knowledge" if span_kind == "KNOWLEDGE" else "skill"
            return taxonomy_mod.fetch_online(
                surface, api_kind, index.language, limit=k, base_url=base_url
            )

    labeled = supervise_mod.distant_label(corpus.spans, index, k=k, retriever=retriever)
    if args.out:
        supervise_mod.write_labeled(labeled, args.out)
    else:
        supervise_mod.write_labeled(labeled, out)
    return 0


def _cmd_distribution(args, out) -> int:
    rows = supervise_mod.read_labeled(args.labeled)
    hist = supervise_mod.label_distribution(rows)
    if args.json:
        _dump_json(hist, out)
    else:
        for tag, count in hist.items():
            out.write(f"{tag}\t{count}\n")
    return 0


def _cmd_evaluate(args, out) -> int:
    predictions = evaluate_mod.read_predictions(args.pred)
    if args.gold:
        gold_rows = supervise_mod.read_labeled(args.gold)
        gold, pred = evaluate_mod.join_gold(predictions, gold_rows)
    else:
        if any(p["gold"] is None for p in predictions):
            raise InputError("predictions file has no gold column; pass --gold")
        gold = [p["gold"] for p in predictions]
        pred = [p["pred"] for p in predictions]
    report = evaluate_mod.weighted_macro_f1(gold, pred)
    payload = report.to_dict()
    if args.confusion:
        payload["confusion"] = evaluate_mod.confusion_matrix(gold, pred, args.normalize).to_dict()
    if args.json:
        _dump_json(payload, out)
        return 0
    out.write(
        f"n: {report.n}  accuracy: {report.accuracy:.4f}"
        f"  weighted macro-F1: {report.weighted_macro_f1:.4f}\n"
    )
    out.write("label\tprecision\trecall\tf1\tsupport\n")
    for tag, m in report.per_class.items():
        out.write(f"{tag}\t{m.precision:.4f}\t{m.recall:.4f}\t{m.f1:.4f}\t{m.support}\n")
    if args.confusion:
        cm = evaluate_mod.confusion_matrix(gold, pred, args.normalize)
        out.write("gold\\pred\t" + "\t".join(cm.labels) + "\n")
        for i, tag in enumerate(cm.labels):
            if cm.normalization == "row":
                cells = "\t".join(f"{v:.4f}" for v in cm.counts[i])
            else:
                cells = "\t".join(str(int(v)) for v in cm.counts[i])
            out.write(f"{tag}\t{cells}\n")
    return 0


def _cmd_compare(args, out) -> int:
    samples = significance.read_runs(args.runs)
    alpha = _cfg(args, "alpha", 0.05, float)
    seed = _cfg(args, "seed", 0, int)
    matrix = significance.compare_all(
        samples,
        alpha,
        bootstrap_iters=args.bootstrap,
        grid_size=args.grid,
        seed=seed,
    )
    if args.report:
        Path(args.report).write_text(
            json.dumps(matrix.to_dict(), ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
        )
    if args.json:
        _dump_json(matrix.to_dict(), out)
    else:
        out.write(matrix.to_tsv())
    return 0


def _cmd_agreement(args, out) -> int:
    views = [
        agreement.AnnotatorView(annotator_id=Path(path).stem, corpus=corpus_mod.parse_corpus(path))
        for path in args.views
    ]
    if len(views) < 2:
        raise InputError("agreement needs at least 2 annotator files")
    statistic = args.statistic
    payload: dict = {"level": args.level, "annotators": [v.annotator_id for v in views]}
    if statistic in ("cohen", "both"):
        pairs = {}
        for i in range(len(views)):
            for j in range(i + 1, len(views)):
                key = f"{views[i].annotator_id}|{views[j].annotator_id}"
                pairs[key] = agreement.cohen_kappa(views[i], views[j], args.level)
        payload["cohen"] = pairs
    if statistic in ("fleiss", "both"):
        payload["fleiss"] = agreement.fleiss_kappa(views, args.level)
    if args.json:
        _dump_json(payload, out)
    else:
        for key, value in payload.get("cohen", {}).items():
            a, b = key.split("|")
            out.write(f"cohen\t{a}\t{b}\t{args.level}\t{value:.6f}\n")
        if "fleiss" in payload:
            out.write(f"fleiss\t{'|'.join(payload['annotators'])}\t{args.level}\t{payload['fleiss']:.6f}\n")
    return 0


def _cmd_serve(args, out) -> int:
    rows = supervise_mod.read_labeled(args.silver)
    corpus = corpus_mod.parse_corpus(args.corpus) if args.corpus else None
    index = None
    if args.taxonomy:
        language = _cfg(args, "language", None)
        if language is None:
            if corpus is not None and corpus.postings:
                language = corpus.postings[0].lang
            else:
                raise InputError("--taxonomy needs --language (or a --corpus to infer it)")
        index = taxonomy_mod.load_taxonomy(args.taxonomy, language)
    log_path = args.log or (str(args.silver) + ".decisions.jsonl")
    store = review.ReviewStore(rows, log_path, corpus=corpus, index=index)
    assets = args.assets
    if assets is None:
        bundled = Path(__file__).parent / "ui"
        assets = bundled if bundled.is_dir() else None
    port = _cfg(args, "port", 7860, int)
    server = review.ReviewServer(store, port=port, assets_dir=assets)
    out.write(f"serving review API on http://127.0.0.1:{server.port} (log: {log_path})\n")
    out.flush()
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        server.shutdown()
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kompet",
        description="Distant supervision and measurement toolkit for skill-span labeling.",
    )
    parser.add_argument("--config", help="key=value config file; flags win over config")
    sub = parser.add_subparsers(dest="command", required=True)

    p_tax = sub.add_parser("taxonomy", help="taxonomy snapshot utilities")
    tax_sub = p_tax.add_subparsers(dest="tax_command", required=True)
    p_val = tax_sub.add_parser("validate", help="load and validate a snapshot")
    p_val.add_argument("--file", required=True)
    p_val.add_argument("--language", default=None)
    p_val.add_argument("--json", action="store_true")
    p_val.set_defaults(func=_cmd_taxonomy_validate)
    p_fetch = tax_sub.add_parser("fetch", help="query the live ESCO API")
    p_fetch.add_argument("--query", required=True)
    p_fetch.add_argument("--kind", choices=("skill", "knowledge"), default="skill")
    p_fetch.add_argument("--language", default=None)
    p_fetch.add_argument("--limit", type=int, default=None)
    p_fetch.add_argument("--timeout", type=float, default=10.0)
    p_fetch.set_defaults(func=_cmd_taxonomy_fetch)

    p_stats = sub.add_parser("stats", help="corpus statistics")
    p_stats.add_argument("--corpus", required=True)
    p_stats.add_argument("--json", action="store_true")
    p_stats.set_defaults(func=_cmd_stats)

    p_split = sub.add_parser("split", help="deterministic train/dev/test split")
    p_split.add_argument("--corpus", required=True)
    p_split.add_argument("--sizes", required=True, help="train,dev,test posting counts")
    p_split.add_argument("--seed", type=int, default=None)
    p_split.add_argument("--json", action="store_true")
    p_split.set_defaults(func=_cmd_split)

    p_sup = sub.add_parser("supervise", help="distantly label corpus spans")
    p_sup.add_argument("--corpus", required=True)
    p_sup.add_argument("--taxonomy", required=True)
    p_sup.add_argument("--language", default=None)
    p_sup.add_argument("--k", type=int, default=None, help="candidates per query (default 100)")
    p_sup.add_argument("--online", action="store_true", help="retrieve candidates from the live API")
    p_sup.add_argument("--out", default=None, help="write silver file here instead of stdout")
    p_sup.set_defaults(func=_cmd_supervise)

    p_dist = sub.add_parser("distribution", help="label histogram of a silver/gold file")
    p_dist.add_argument("--labeled", required=True)
    p_dist.add_argument("--json", action="store_true")
    p_dist.set_defaults(func=_cmd_distribution)

    p_eval = sub.add_parser("evaluate", help="score predictions against gold labels")
    p_eval.add_argument("--pred", required=True, help="TSV or JSON-lines predictions")
    p_eval.add_argument("--gold", default=None, help="gold silver-format file to join on span_id")
    p_eval.add_argument("--confusion", action="store_true")
    p_eval.add_argument("--normalize", choices=("none", "row"), default="none")
    p_eval.add_argument("--json", action="store_true")
    p_eval.set_defaults(func=_cmd_evaluate)

    p_cmp = sub.add_parser("compare", help="all-pairs ASO significance matrix")
    p_cmp.add_argument("--runs", required=True, help='JSON [{"model", "scores"}]')
    p_cmp.add_argument("--alpha", type=float, default=None)
    p_cmp.add_argument("--bootstrap", type=int, default=1000)
    p_cmp.add_argument("--grid", type=int, default=1000)
    p_cmp.add_argument("--seed", type=int, default=None)
    p_cmp.add_argument("--report", default=None, help="also write the JSON report here")
    p_cmp.add_argument("--json", action="store_true")
    p_cmp.set_defaults(func=_cmd_compare)

    p_agr = sub.add_parser("agreement", help="inter-annotator kappa statistics")
    p_agr.add_argument("--level", choices=("token", "span"), default="token")
    p_agr.add_argument("--views", nargs="+", required=True, help="one corpus file per annotator")
    p_agr.add_argument("--statistic", choices=("cohen", "fleiss", "both"), default="both")
    p_agr.add_argument("--json", action="store_true")
    p_agr.set_defaults(func=_cmd_agreement)

    p_srv = sub.add_parser("serve", help="run the review service")
    p_srv.add_argument("--silver", required=True)
    p_srv.add_argument("--corpus", default=None, help="corpus file for sentence context")
    p_srv.add_argument("--taxonomy", default=None, help="snapshot for alternative suggestions")
    p_srv.add_argument("--language", default=None)
    p_srv.add_argument("--log", default=None, help="decision log path (append-only JSON-lines)")
    p_srv.add_argument("--port", type=int, default=None)
    p_srv.add_argument("--assets", default=None, help="directory with compiled UI assets")
    p_srv.set_defaults(func=_cmd_serve)

    return parser


def dispatch(argv: list[str], out=None) -> int:
    """Run one command; returns the exit code instead of exiting."""
    out = out if out is not None else sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    if args.config:
        try:
            args._config = read_config(args.config)
        except FileNotFoundError:
            print(f"error: config file not found: {args.config}", file=sys.stderr)
            return 2
        except InputError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
    else:
        args._config = {}
    try:
        return args.func(args, out) or 0
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        name = exc.filename or exc
        print(f"error: file not found: {name}", file=sys.stderr)
        return 2
    except IsADirectoryError as exc:
        print(f"error: expected a file, got a directory: {exc.filename}", file=sys.stderr)
        return 2
    except ApiError as exc:
        status = f" (HTTP {exc.status})" if exc.status else ""
        print(f"error: {exc}{status}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
