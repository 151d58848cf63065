"""Check how sensitive system scores are to the size of the judging pool.

Pools grown to different sizes from the same runs nest inside each
other, so qrels restricted to each pool size simulate a cheaper judging
campaign. The analysis scores every system once per pool size and
reports, for each adjacent pair of sizes, how much the mean score moved.
If the movement keeps shrinking as pools grow, the full-size pool was
deep enough that further judging would barely change the results.

Run from the repository root after installing the package:

    python3 demos/04_reliability.py
"""

import argparse

from pooleval.reliability import (
    IncrementConfig,
    increment_analysis,
    write_increment_table,
)
from pooleval.synthetic import make_collection


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=3)
    args = parser.parse_args()

    collection = make_collection(
        topic_count=12,
        noise_topic_count=2,
        pooling_system_count=8,
        scored_system_count=8,
        docs_per_topic=200,
        k=60,
        k_google=10,
        k_noise=10,
        seed=args.seed,
    )
    config = IncrementConfig(
        min_size=20,
        max_size=60,
        step=5,
        k_google=collection.k_google,
        k_noise=collection.k_noise,
        seed=collection.seed,
    )
    sizes = config.sizes()
    print(f"{len(collection.scored_runs)} systems, "
          f"{len(collection.real_topic_ids)} topics, "
          f"pool sizes {sizes[0]}..{sizes[-1]} step {config.step}")

    table = increment_analysis(
        list(collection.scored_runs),
        collection.qrels,
        list(collection.pooling_runs),
        collection.google_top,
        list(collection.noise_candidates),
        config,
    )
    print()
    print(write_increment_table(table), end="")
    if table.diagnostics:
        print(f"\n{len(table.diagnostics)} diagnostic(s):")
        for line in table.diagnostics:
            print(f"  {line}")

    first, last = table.rows[0], table.rows[-1]
    print()
    print("settling check (mean absolute change in the mean score):")
    for label in table.measures:
        early = first.cells[label]
        late = last.cells[label]
        if early.undefined or late.undefined:
            print(f"  {label}: undefined at one end, see diagnostics")
            continue
        verdict = "settling" if late.mean_pct < early.mean_pct else "still moving"
        print(f"  {label}: {first.from_size}->{first.to_size} moved "
              f"{early.mean_pct:.2f}%, {last.from_size}->{last.to_size} moved "
              f"{late.mean_pct:.2f}% ({verdict})")


if __name__ == "__main__":
    main()
