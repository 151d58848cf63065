"""Simulate a judging campaign, export qrels and audit the noise docs.

Two assessors split the topics. The first one reads carefully and grades
each pooled document with the grade the corpus planted for it. The
second one rubber-stamps: nearly everything gets marked relevant,
including the injected noise documents that have nothing to do with any
topic. Every judgment goes through the append-only event log, one of the
documents is re-judged to show that the latest event wins, and the audit
step flags the rubber-stamper from the noise-document grades alone.

Run from the repository root after installing the package:

    python3 demos/02_judge_and_audit.py --out demo-output
"""

import argparse
import random
from pathlib import Path

from pooleval.audit import noise_audit, write_audit_text
from pooleval.judging import (
    EventLog,
    JudgmentEvent,
    export_qrels,
    progress,
    utc_now_iso,
)
from pooleval.formats import write_qrels
from pooleval.synthetic import make_collection


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="demo-output", help="work directory")
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    log_path = out / "judging.log"
    if log_path.exists():
        log_path.unlink()

    collection = make_collection(
        topic_count=4,
        noise_topic_count=2,
        pooling_system_count=4,
        scored_system_count=4,
        docs_per_topic=100,
        k=30,
        k_google=6,
        k_noise=6,
        seed=args.seed,
    )
    pools = {pool.topic_id: pool for pool in collection.pools}
    topics = sorted(pools)
    careful_topics, sloppy_topics = topics[: len(topics) // 2], topics[len(topics) // 2 :]
    print(f"assessor-a (careful) judges {', '.join(careful_topics)}")
    print(f"assessor-b (sloppy)  judges {', '.join(sloppy_topics)}")

    log = EventLog(log_path)
    rng = random.Random(args.seed)

    # The careful assessor reproduces the planted grades.
    for topic_id in careful_topics:
        planted = collection.qrels.grades_for(topic_id)
        for doc_id in pools[topic_id].presentation_order:
            log.append(JudgmentEvent(
                assessor_id="assessor-a",
                topic_id=topic_id,
                doc_id=doc_id,
                grade=planted.get(doc_id, 0),
                timestamp=utc_now_iso(),
            ))

    # The sloppy assessor marks almost everything at least somewhat
    # relevant, noise docs included.
    for topic_id in sloppy_topics:
        for doc_id in pools[topic_id].presentation_order:
            grade = 2 if rng.random() < 0.3 else 1
            if rng.random() < 0.1:
                grade = 0
            log.append(JudgmentEvent(
                assessor_id="assessor-b",
                topic_id=topic_id,
                doc_id=doc_id,
                grade=grade,
                timestamp=utc_now_iso(),
            ))

    # One second thought: the careful assessor revisits a document.
    revisit_topic = careful_topics[0]
    revisit_doc = pools[revisit_topic].presentation_order[0]
    log.append(JudgmentEvent(
        assessor_id="assessor-a",
        topic_id=revisit_topic,
        doc_id=revisit_doc,
        grade=2,
        timestamp=utc_now_iso(),
    ))

    events = log.events()
    print(f"\n{len(events)} events in {log_path}")
    sizes = {topic_id: pool.size for topic_id, pool in pools.items()}
    for topic_id, (done, total) in sorted(progress(events, sizes).items()):
        print(f"  {topic_id}: {done}/{total} judged")

    qrels = export_qrels(events)
    final = qrels.entries[(revisit_topic, revisit_doc)]
    print(f"re-judged {revisit_doc} on {revisit_topic}: final grade {final} "
          "(latest event wins)")
    qrels_path = out / "judged-qrels.txt"
    qrels_path.write_text(write_qrels(qrels), encoding="utf-8")
    print(f"exported {len(qrels)} judgments to {qrels_path}")

    noise_by_topic = {
        topic_id: sorted(pool.noise_doc_ids()) for topic_id, pool in pools.items()
    }
    report = noise_audit(events, noise_by_topic)
    print()
    print(write_audit_text(report), end="")


if __name__ == "__main__":
    main()
