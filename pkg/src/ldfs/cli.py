"""Command-line entry points: score, meta-eval, iaa, bench.

Identical inputs, flags, and offline backends produce byte-identical primary
outputs; only manifest timestamps and benchmark wall-clock columns vary
between runs. Exit codes: 0 success, 2 input error, 3 config error,
4 backend error.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time
from pathlib import Path

from . import baselines, corpus, segmenter, stats, synthetic
from .core import score_corpus, score_summary_exhaustive
from .client import ModelServerClient
from .embedding import CountingEmbedding, HashedEmbedding, RemoteEmbedding
from .errors import ConfigError, InputError, LdfsError
from .manifest import RunManifest, file_digest, utc_now
from .output import atomic_write_text, fmt4, markdown_table, write_csv, write_json, write_jsonl
from .retrieval import FULL_SCAN, MetricConfig
from .scoring import ConstantScorer, CountingScorer, LexicalScorer, RemoteScorer, truncating_baseline_score

SERVER_URL_ENV = "LDFS_SERVER_URL"

METRICS = ("ldfs", "truncating-baseline", "rouge1", "rouge2", "rougeL", "embed-greedy")
STATISTICS = ("kendall", "spearman", "pearson")

EXIT_CODES = {"input": 2, "config": 3, "backend": 4}

# Timings reported by the original study for 15 long-document samples on a
# GPU; printed as context next to benchmark results, never asserted.
REFERENCE_TIMINGS = "top-3 retrieval ~8 s, full scan ~134 s, full scan without similarity ~125 s"


def _parse_k(value: str) -> int | None:
    if value == FULL_SCAN:
        return None
    try:
        return int(value)
    except ValueError:
        raise ConfigError(f"--k expects a positive integer or {FULL_SCAN!r}, got {value!r}") from None


def _parse_offsets(value: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in value.split(","))
    except ValueError:
        raise ConfigError(f"--offsets expects comma-separated integers, got {value!r}") from None


def _abbreviations(args) -> tuple[str, ...]:
    if getattr(args, "abbrev_file", None):
        return segmenter.load_abbreviations(args.abbrev_file)
    return segmenter.DEFAULT_ABBREVIATIONS


def _server_client(args) -> ModelServerClient:
    url = getattr(args, "server_url", None) or os.environ.get(SERVER_URL_ENV)
    if not url:
        raise ConfigError(
            f"a remote backend needs --server-url or the {SERVER_URL_ENV} environment variable"
        )
    return ModelServerClient(url, max_in_flight=max(1, getattr(args, "jobs", 1)))


def _embed_backend(args) -> CountingEmbedding:
    if args.embed == "hashed":
        return CountingEmbedding(HashedEmbedding())
    return CountingEmbedding(RemoteEmbedding(_server_client(args)))


def _score_backend(args, token_limit: int | None = None) -> CountingScorer:
    latency = getattr(args, "latency", 0.0) or 0.0
    if latency > 0.0 and args.scorer != "noop":
        raise ConfigError("--latency only applies to the noop scorer")
    if args.scorer == "lexical":
        return CountingScorer(LexicalScorer(token_limit=token_limit))
    if args.scorer == "noop":
        return CountingScorer(ConstantScorer(latency_s=latency, token_limit=token_limit))
    return CountingScorer(RemoteScorer(_server_client(args)))


def _manifest_path(args, out: str) -> str:
    return getattr(args, "manifest", None) or f"{out}.manifest.json"


def _resolved_flags(args) -> dict:
    skip = {"func"}
    return {k: (str(v) if isinstance(v, Path) else v) for k, v in vars(args).items() if k not in skip}


# ---------------------------------------------------------------- score ----


def _baseline_rows(args, documents, summaries, embed_backend, score_backend):
    by_id = {d.doc_id: d for d in documents}
    rows = []
    for summary in summaries:
        document = by_id[summary.doc_id]
        if args.metric == "truncating-baseline":
            value = truncating_baseline_score(score_backend, summary.summary_text, document)
            detail = {"token_limit": score_backend.token_limit, "score_backend_id": score_backend.backend_id}
        elif args.metric == "rouge1":
            prf = baselines.rouge_n(summary.summary_text, document.text, 1)
            value, detail = prf.f1, {"variant": "rouge1-f1-nostem", "precision": prf.precision, "recall": prf.recall}
        elif args.metric == "rouge2":
            prf = baselines.rouge_n(summary.summary_text, document.text, 2)
            value, detail = prf.f1, {"variant": "rouge2-f1-nostem", "precision": prf.precision, "recall": prf.recall}
        elif args.metric == "rougeL":
            prf = baselines.rouge_l(summary.summary_text, document.text)
            value, detail = prf.f1, {"variant": "rougeL-f1-nostem", "precision": prf.precision, "recall": prf.recall}
        else:  # embed-greedy
            value = baselines.greedy_embedding_fscore(summary.summary_text, document.text, embed_backend)
            detail = {"variant": "embed-greedy-f", "embed_backend_id": embed_backend.backend_id}
        rows.append(
            {
                "doc_id": summary.doc_id,
                "system_id": summary.system_id,
                "metric": args.metric,
                "summary_score": value,
                **detail,
            }
        )
    return rows


def cmd_score(args) -> int:
    started = utc_now()
    abbreviations = _abbreviations(args)
    documents, summaries = corpus.load_corpus(
        args.documents, args.summaries, abbreviations=abbreviations
    )
    embed_backend = _embed_backend(args)
    needs_limit = args.metric == "truncating-baseline"
    score_backend = _score_backend(args, token_limit=args.token_limit if needs_limit else None)

    if args.metric == "ldfs":
        config = MetricConfig(
            k=_parse_k(args.k),
            neighbor_offsets=_parse_offsets(args.offsets),
            embed_backend_id=embed_backend.backend_id,
            score_backend_id=score_backend.backend_id,
        )
        reports = score_corpus(
            documents, summaries, config, embed_backend, score_backend,
            strict=args.strict, jobs=args.jobs,
        )
        rows = [{"metric": "ldfs", **r.to_json()} for r in reports]
    else:
        rows = _baseline_rows(args, documents, summaries, embed_backend, score_backend)

    write_jsonl(args.out, rows)
    scores = [row["summary_score"] for row in rows]
    manifest = RunManifest(
        command="score",
        config=_resolved_flags(args),
        backends={
            "embed_backend_id": embed_backend.backend_id,
            "score_backend_id": score_backend.backend_id,
            "score_variant": score_backend.variant,
        },
        input_digests={str(args.documents): file_digest(args.documents),
                       str(args.summaries): file_digest(args.summaries)},
        started_at=started,
        finished_at=utc_now(),
        embed_texts=embed_backend.texts,
        scorer_pairs=score_backend.pairs,
    )
    manifest.write(_manifest_path(args, args.out))
    print(f"{args.metric}: {len(rows)} summaries scored, mean {fmt4(math.fsum(scores) / len(scores))}")
    print(f"wrote {args.out}")
    return 0


# ------------------------------------------------------------ meta-eval ----


def _read_score_file(path: str) -> tuple[str, dict[tuple[str, str], float]]:
    metric = None
    column: dict[tuple[str, str], float] = {}
    for lineno, obj in corpus._iter_jsonl(path):
        for fld in ("doc_id", "system_id", "summary_score"):
            if fld not in obj:
                raise InputError(f"{path}:{lineno}: missing field {fld!r}")
        key = (obj["doc_id"], obj["system_id"])
        if key in column:
            raise InputError(f"{path}:{lineno}: duplicate score for {key!r}")
        column[key] = float(obj["summary_score"])
        row_metric = obj.get("metric")
        if metric is None:
            metric = row_metric
        elif row_metric is not None and row_metric != metric:
            raise InputError(f"{path}:{lineno}: mixed metrics in one file ({metric!r} vs {row_metric!r})")
    if not column:
        raise InputError(f"{path}: no records")
    return metric or Path(path).stem, column


def _statistic_fn(name: str):
    if name == "kendall":
        return "kendall-tau-b", stats.kendall_tau_b
    return name, lambda x, y: stats.rank_corr(x, y, name)


def cmd_meta_eval(args) -> int:
    started = utc_now()
    annotations = corpus.load_annotations(args.annotations)
    if args.summaries:
        summaries = corpus.load_summaries(args.summaries, abbreviations=_abbreviations(args))
        for warning in corpus.check_annotation_indices(annotations, summaries, strict=not args.lenient):
            print(f"warning: {warning}", file=sys.stderr)

    columns: dict[str, dict[tuple[str, str], float]] = {}
    digests = {str(args.annotations): file_digest(args.annotations)}
    for path in args.scores:
        metric, column = _read_score_file(path)
        if metric in columns:
            raise InputError(f"metric {metric!r} appears in more than one score file")
        columns[metric] = column
        digests[str(path)] = file_digest(path)

    keys = sorted({(r.doc_id, r.system_id) for r in annotations})
    for metric, column in columns.items():
        missing = [k for k in keys if k not in column]
        extra = [k for k in column if k not in set(keys)]
        if missing or extra:
            raise InputError(
                f"key mismatch for metric {metric!r}: missing {missing or 'none'}, "
                f"unannotated {extra or 'none'}"
            )
    if len(keys) < 2:
        raise InputError(f"need at least 2 shared summaries to correlate, got {len(keys)}")

    human = [corpus.summary_level_human_score(annotations, *key) for key in keys]
    table = {metric: [column[k] for k in keys] for metric, column in columns.items()}
    table["human"] = human

    label, fn = _statistic_fn(args.statistic)
    pair_rows = []
    names = list(table)
    matrix = [[1.0] * len(names) for _ in names]
    for i, a in enumerate(names):
        for j in range(i + 1, len(names)):
            value = fn(table[a], table[names[j]])
            matrix[i][j] = matrix[j][i] = value
            pair_rows.append(
                {"metric_a": a, "metric_b": names[j], "statistic": label, "value": value, "n": len(keys)}
            )

    out_dir = Path(args.out_dir)
    write_csv(out_dir / "correlations.csv", ["metric", *names], [[a, *row] for a, row in zip(names, matrix)])
    write_jsonl(out_dir / "pairs.jsonl", pair_rows)
    human_rows = [
        [metric, label, fmt4(matrix[i][names.index("human")]), len(keys)]
        for i, metric in enumerate(names)
        if metric != "human"
    ]
    report = markdown_table(["metric", "statistic", "vs human", "n"], human_rows)
    atomic_write_text(out_dir / "report.md", report)
    RunManifest(
        command="meta-eval",
        config=_resolved_flags(args),
        input_digests=digests,
        started_at=started,
        finished_at=utc_now(),
    ).write(out_dir / "manifest.json")
    print(report, end="")
    print(f"wrote {out_dir}/correlations.csv, pairs.jsonl, report.md")
    return 0


# ------------------------------------------------------------------ iaa ----


def _iaa_rows(annotations: corpus.AnnotationSet):
    fine: dict[str, dict] = {}
    per_summary: dict[str, dict] = {}
    for r in annotations:
        fine.setdefault(r.annotator_id, {})[(r.doc_id, r.system_id, r.sentence_index)] = r.label
        per_summary.setdefault(r.annotator_id, {}).setdefault((r.doc_id, r.system_id), []).append(r.label)
    summary_level = {
        annotator: {key: math.fsum(labels) / len(labels) for key, labels in items.items()}
        for annotator, items in per_summary.items()
    }
    return list(fine.values()), list(summary_level.values())


def cmd_iaa(args) -> int:
    started = utc_now()
    annotations = corpus.load_annotations(args.annotations)
    if args.summaries:
        summaries = corpus.load_summaries(args.summaries, abbreviations=_abbreviations(args))
        for warning in corpus.check_annotation_indices(annotations, summaries, strict=not args.lenient):
            print(f"warning: {warning}", file=sys.stderr)
    fine_rows, summary_rows = _iaa_rows(annotations)
    result = {
        "fine_grained": {
            "level": "nominal",
            "alpha": stats.krippendorff_alpha(fine_rows, level="nominal"),
        },
        "summary_level": {
            "level": "interval",
            "alpha": stats.krippendorff_alpha(summary_rows, level="interval"),
        },
        "n_annotators": len(annotations.annotator_ids()),
        "n_summaries": len(annotations.keys()),
    }
    write_json(args.out, result)
    RunManifest(
        command="iaa",
        config=_resolved_flags(args),
        input_digests={str(args.annotations): file_digest(args.annotations)},
        started_at=started,
        finished_at=utc_now(),
    ).write(_manifest_path(args, args.out))
    print(
        markdown_table(
            ["granularity", "level", "alpha"],
            [
                ["fine-grained", "nominal", fmt4(result["fine_grained"]["alpha"])],
                ["summary-level", "interval", fmt4(result["summary_level"]["alpha"])],
            ],
        ),
        end="",
    )
    print(f"wrote {args.out}")
    return 0


# ---------------------------------------------------------------- bench ----


def _bench_corpus(args):
    if args.documents and args.summaries:
        return corpus.load_corpus(args.documents, args.summaries)
    return synthetic.synthetic_corpus(
        args.docs, args.doc_sentences, args.summary_sentences, seed=args.seed
    )


def _bench_row(label, k, offsets, documents, summaries, args, human):
    embed_backend = _embed_backend(args)
    score_backend = _score_backend(args)
    start = time.perf_counter()
    if k == "nosim":
        config = MetricConfig(k=None, neighbor_offsets=offsets)
        by_id = {d.doc_id: d for d in documents}
        reports = [
            score_summary_exhaustive(by_id[s.doc_id], s, config, score_backend)
            for s in summaries
        ]
        k_label = FULL_SCAN
    else:
        config = MetricConfig(k=k, neighbor_offsets=offsets)
        reports = score_corpus(documents, summaries, config, embed_backend, score_backend, jobs=args.jobs)
        k_label = FULL_SCAN if k is None else k
    wall = time.perf_counter() - start
    scores = [r.summary_score for r in reports]
    if human is not None:
        try:
            tau = stats.kendall_tau_b(scores, human)
            tau_text = repr(tau)
        except InputError:
            tau_text = ""
    else:
        tau_text = ""
    return {
        "label": label,
        "k": k_label,
        "offsets": ",".join(str(o) for o in offsets),
        "n_docs": len(documents),
        "n_summaries": len(summaries),
        "scorer_pairs": score_backend.pairs,
        "embed_texts": embed_backend.texts,
        "mean_summary_score": math.fsum(scores) / len(scores),
        "kendall_vs_human": tau_text,
        "wall_clock_s": wall,
    }


def cmd_bench(args) -> int:
    started = utc_now()
    documents, summaries = _bench_corpus(args)
    default_offsets = _parse_offsets(args.offsets)

    human = None
    digests = {}
    if args.annotations:
        annotations = corpus.load_annotations(args.annotations)
        keys = [(s.doc_id, s.system_id) for s in summaries]
        missing = [k for k in keys if k not in set(annotations.keys())]
        if missing:
            raise InputError(f"annotations missing for benchmark summaries: {missing}")
        human = [corpus.summary_level_human_score(annotations, *k) for k in keys]
        digests[str(args.annotations)] = file_digest(args.annotations)

    plans = []
    if args.sweep_k:
        for raw in args.sweep_k.split(","):
            k = _parse_k(raw.strip())
            plans.append((f"K={FULL_SCAN if k is None else k}", k, default_offsets))
    if args.sweep_offsets:
        for raw in args.sweep_offsets.split(";"):
            offsets = _parse_offsets(raw.strip())
            plans.append((f"offsets={raw.strip()}", _parse_k(args.k), offsets))
    if not plans:
        base_k = _parse_k(args.k)
        plans = [
            (f"K={FULL_SCAN if base_k is None else base_k}", base_k, default_offsets),
            (f"K={FULL_SCAN}", None, default_offsets),
            (f"K={FULL_SCAN}-nosim", "nosim", default_offsets),
        ]

    rows = [_bench_row(label, k, offsets, documents, summaries, args, human) for label, k, offsets in plans]
    header = list(rows[0])
    write_csv(args.out, header, [[row[h] for h in header] for row in rows])
    if args.documents:
        digests[str(args.documents)] = file_digest(args.documents)
        digests[str(args.summaries)] = file_digest(args.summaries)
    RunManifest(
        command="bench",
        config=_resolved_flags(args),
        input_digests=digests,
        started_at=started,
        finished_at=utc_now(),
        embed_texts=sum(r["embed_texts"] for r in rows),
        scorer_pairs=sum(r["scorer_pairs"] for r in rows),
    ).write(_manifest_path(args, args.out))
    print(
        markdown_table(
            ["run", "scorer pairs", "embed texts", "wall clock (s)"],
            [[r["label"], r["scorer_pairs"], r["embed_texts"], f"{r['wall_clock_s']:.2f}"] for r in rows],
        ),
        end="",
    )
    print(f"reference timings from the original study (GPU, 15 samples): {REFERENCE_TIMINGS}")
    print(f"wrote {args.out}")
    return 0


# ----------------------------------------------------------------- main ----


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ldfs", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    score = sub.add_parser("score", help="score summaries against their source documents")
    score.add_argument("--documents", required=True)
    score.add_argument("--summaries", required=True)
    score.add_argument("--out", required=True)
    score.add_argument("--metric", choices=METRICS, default="ldfs")
    score.add_argument("--k", default="3", help=f"top-K candidates, or {FULL_SCAN} for a full scan")
    score.add_argument("--offsets", default="-1,0,1", help="neighbor offsets, e.g. -1,0,1")
    score.add_argument("--embed", choices=("hashed", "remote"), default="hashed")
    score.add_argument("--scorer", choices=("lexical", "remote", "noop"), default="lexical")
    score.add_argument("--token-limit", type=int, default=1024)
    score.add_argument("--jobs", type=int, default=1)
    score.add_argument("--strict", action="store_true")
    score.add_argument("--server-url")
    score.add_argument("--abbrev-file")
    score.add_argument("--manifest")
    score.set_defaults(func=cmd_score)

    meta = sub.add_parser("meta-eval", help="correlate metric scores with human annotations")
    meta.add_argument("--scores", action="append", required=True)
    meta.add_argument("--annotations", required=True)
    meta.add_argument("--statistic", choices=STATISTICS, default="kendall")
    meta.add_argument("--out-dir", required=True)
    meta.add_argument("--summaries")
    meta.add_argument("--lenient", action="store_true")
    meta.add_argument("--abbrev-file")
    meta.set_defaults(func=cmd_meta_eval)

    iaa = sub.add_parser("iaa", help="inter-annotator agreement (Krippendorff's alpha)")
    iaa.add_argument("--annotations", required=True)
    iaa.add_argument("--out", required=True)
    iaa.add_argument("--summaries")
    iaa.add_argument("--lenient", action="store_true")
    iaa.add_argument("--abbrev-file")
    iaa.add_argument("--manifest")
    iaa.set_defaults(func=cmd_iaa)

    bench = sub.add_parser("bench", help="efficiency benchmark and parameter sweeps")
    bench.add_argument("--documents")
    bench.add_argument("--summaries")
    bench.add_argument("--docs", type=int, default=15)
    bench.add_argument("--doc-sentences", type=int, default=200)
    bench.add_argument("--summary-sentences", type=int, default=10)
    bench.add_argument("--seed", type=int, default=synthetic.DEFAULT_SEED)
    bench.add_argument("--k", default="3")
    bench.add_argument("--offsets", default="-1,0,1")
    bench.add_argument("--sweep-k", help=f"comma-separated K values, e.g. 1,3,5,7,9,11,{FULL_SCAN}")
    bench.add_argument("--sweep-offsets", help='semicolon-separated offset lists, e.g. "0;-1,0,1;-2,0,2"')
    bench.add_argument("--embed", choices=("hashed", "remote"), default="hashed")
    bench.add_argument("--scorer", choices=("lexical", "noop", "remote"), default="lexical")
    bench.add_argument("--latency", type=float, default=0.0, help="simulated seconds per noop scorer call")
    bench.add_argument("--annotations")
    bench.add_argument("--jobs", type=int, default=1)
    bench.add_argument("--server-url")
    bench.add_argument("--out", required=True)
    bench.add_argument("--manifest")
    bench.set_defaults(func=cmd_bench)

    return parser


_DASH_VALUE_FLAGS = ("--offsets", "--sweep-offsets")


def _join_dash_values(argv: list[str]) -> list[str]:
    # argparse would read "--offsets -1,0,1" as two flags; fold the value in.
    out = []
    i = 0
    while i < len(argv):
        if argv[i] in _DASH_VALUE_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(_join_dash_values(argv if argv is not None else sys.argv[1:]))
    try:
        return args.func(args)
    except LdfsError as exc:
        print(f"{exc.category} error: {exc}", file=sys.stderr)
        return EXIT_CODES.get(exc.category, 1)


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
