#!/usr/bin/env python3
"""Generate a seeded synthetic corpus (documents, summaries, annotations)
for demos and benchmarks.

Example:
    python scripts/make_fixture_corpus.py --out-dir fixtures --docs 15 \
        --doc-sentences 200 --summary-sentences 10 --systems 3 --seed 42
"""

import argparse
from pathlib import Path

from ldfs.corpus import save_annotations, save_documents, save_summaries
from ldfs.synthetic import synthetic_annotations, synthetic_corpus


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", required=True)
    parser.add_argument("--docs", type=int, default=15)
    parser.add_argument("--doc-sentences", type=int, default=200)
    parser.add_argument("--summary-sentences", type=int, default=10)
    parser.add_argument("--systems", type=int, default=3)
    parser.add_argument("--annotators", type=int, default=3)
    parser.add_argument("--seed", type=int, default=42)
    args = parser.parse_args()

    documents, summaries = synthetic_corpus(
        args.docs,
        args.doc_sentences,
        args.summary_sentences,
        seed=args.seed,
        summaries_per_doc=args.systems,
    )
    annotations = synthetic_annotations(summaries, n_annotators=args.annotators, seed=args.seed)

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    save_documents(documents, out_dir / "documents.jsonl")
    save_summaries(summaries, out_dir / "summaries.jsonl")
    save_annotations(annotations, out_dir / "annotations.jsonl")
    print(f"wrote {len(documents)} documents, {len(summaries)} summaries, "
          f"{len(annotations)} annotations to {out_dir}/")


if __name__ == "__main__":
    main()
