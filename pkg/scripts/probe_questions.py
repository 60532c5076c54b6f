"""Run the two open-question probes and summarize what they recorded.

q1: do pairs related by ~P (or ~H) admit a common <-P interlacer?
q2: is the double-slice coefficient determinant of a random Ppos_3 member stable?
"""

import argparse
import collections
import json
from pathlib import Path

from stablepoly.factcheck import probe_question


def summarize_q1(records) -> dict:
    out = collections.Counter()
    for r in records:
        out[f"psim={r['psim']} hsim={r['hsim']} interlacer={r['interlacer'].split(' ')[0]}"] += 1
    out["flagged"] = sum(r["flagged"] for r in records)
    return dict(out)


def summarize_q2(records) -> dict:
    by_size = collections.defaultdict(collections.Counter)
    for r in records:
        by_size[r["size"]][r["verdict"]] += 1
    worst = min((r["margin"] for r in records if r["margin"] is not None), default=None)
    return {"by_size": {k: dict(v) for k, v in sorted(by_size.items())}, "most_negative_margin": worst}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--budget", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", type=Path, default=None, help="write the raw records here as JSON")
    a = ap.parse_args()
    raw = {}
    for q, summarize in (("q1", summarize_q1), ("q2", summarize_q2)):
        rep = probe_question(q, a.budget, a.seed)
        raw[q] = rep.to_json(timing=False)
        print(f"{q}: {rep.passes} records, {rep.skips} skipped")
        print(json.dumps(summarize(rep.records), indent=1, sort_keys=True))
    if a.out:
        a.out.write_text(json.dumps(raw, indent=1, sort_keys=True))


if __name__ == "__main__":
    main()
