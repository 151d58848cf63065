"""Build judging pools from ranked runs, search results and noise docs.

The script generates a small self-consistent corpus, writes it to disk in
the toolkit's file formats, then re-reads those files and rebuilds the
pools from scratch the way the command-line `pool` subcommand does. The
rebuilt pools must match the stored ones byte for byte, which is the
whole point: pooling is a pure function of the input files and the seed.

Run from the repository root after installing the package:

    python3 demos/01_build_pools.py --out demo-output
"""

import argparse
from pathlib import Path

from pooleval.formats import parse_manifest, parse_run, parse_topics
from pooleval.pooling import build_pools, overlap_report, write_pools
from pooleval.synthetic import make_collection, materialize


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="demo-output", help="work directory")
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    root = Path(args.out) / "collection"
    print(f"generating a small corpus under {root} ...")
    collection = make_collection(
        topic_count=6,
        noise_topic_count=2,
        pooling_system_count=5,
        scored_system_count=6,
        docs_per_topic=120,
        k=40,
        k_google=8,
        k_noise=8,
        seed=args.seed,
    )
    paths = materialize(collection, root)
    print(f"  {len(collection.contents)} documents, "
          f"{len(collection.topics)} topics "
          f"({len(collection.noise_topic_ids)} of them noise-only)")

    # Reload everything from the files we just wrote, exactly as the CLI
    # would, and pool again.
    topics = parse_topics(paths["topics"].read_text(encoding="utf-8"))
    real_ids = [topic.id for topic in topics if not topic.is_noise]
    noise_ids = {topic.id for topic in topics if topic.is_noise}
    google = parse_run(paths["google"].read_text(encoding="utf-8"))
    google_top = {tid: google.ranking(tid) for tid in google.topics()}
    noise_candidates = sorted(
        entry.doc_id
        for entry in parse_manifest(paths["manifest"].read_text(encoding="utf-8"))
        if entry.source_topics & noise_ids
    )
    pooling_runs = [
        parse_run((root / "runs" / f"{run.system_id}.run").read_text(encoding="utf-8"))
        for run in collection.pooling_runs
    ]

    pools = build_pools(
        real_ids,
        pooling_runs,
        google_top,
        noise_candidates,
        k=collection.k,
        k_google=collection.k_google,
        k_noise=collection.k_noise,
        seed=collection.seed,
    )

    stored = paths["pools"].read_text(encoding="utf-8")
    rebuilt = write_pools(pools)
    assert rebuilt == stored, "pool rebuild from files diverged from stored pools"
    print("rebuilt pools from the on-disk files: byte-identical to pools.tsv")

    print()
    print(f"{'topic':<10} {'size':>4} {'google':>6} {'noise':>5} "
          f"{'pooled':>6} {'depth':>5}  exhausted")
    for pool in pools:
        google_count = sum(1 for e in pool.entries if e.provenance == "google")
        noise_count = len(pool.noise_doc_ids())
        pooled_count = pool.size - google_count - noise_count
        print(f"{pool.topic_id:<10} {pool.size:>4} {google_count:>6} "
              f"{noise_count:>5} {pooled_count:>6} {pool.depth:>5}  "
              f"{'yes' if pool.exhausted else 'no'}")

    report = overlap_report(pools)
    extra = sum((m - 1) * c for m, c in report.histogram.items())
    print()
    print(f"sum of pool sizes: {report.sum_of_pool_sizes}")
    print(f"unique documents:  {report.unique_docs}")
    for multiplicity, count in report.histogram.items():
        print(f"  in {multiplicity} pool(s): {count}")
    print(f"identity: {report.unique_docs} unique + {extra} repeat slots "
          f"= {report.unique_docs + extra}")


if __name__ == "__main__":
    main()
