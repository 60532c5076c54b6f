"""Run every registered fact suite (or a chosen subset) and print a summary table.

    python3 scripts/run_registry.py                 # all suites, default trials
    python3 scripts/run_registry.py onevar-3 --trials 400 --seed 2 --out reports/
"""

import argparse
import time
from dataclasses import dataclass
from pathlib import Path

from stablepoly.factcheck import REGISTRY, corpus_save, run_suite


@dataclass
class RunConfig:
    suites: list
    seed: int = 0
    trials: int | None = None
    out: Path | None = None
    show: int = 2


def parse() -> RunConfig:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("suites", nargs="*", help="suite ids (default: all)")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--trials", type=int, default=None, help="override each suite's trial count")
    ap.add_argument("--out", type=Path, default=None, help="directory for JSON reports")
    ap.add_argument("--show", type=int, default=2, help="refutations to print per suite")
    a = ap.parse_args()
    unknown = [s for s in a.suites if s not in REGISTRY]
    if unknown:
        ap.error(f"unknown suites: {unknown}")
    return RunConfig(a.suites or list(REGISTRY), a.seed, a.trials, a.out, a.show)


def main() -> None:
    cfg = parse()
    if cfg.out:
        cfg.out.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    failed = []
    for sid in cfg.suites:
        r = run_suite(sid, trials=cfg.trials, seed=cfg.seed)
        tag = "probe" if r.probe else ("ok" if r.ok else "REFUTED")
        print(f"{sid:22s} {tag:8s} trials={r.trials:4d} pass={r.passes:4d} skip={r.skips:3d} "
              f"ref={len(r.refutations):3d} {r.ms / 1000:7.2f}s", flush=True)
        for ref in r.refutations[: cfg.show]:
            print(f"    trial {ref['trial']}: {ref['reason']}")
        if not r.ok:
            failed.append(sid)
        if cfg.out:
            corpus_save(r, cfg.out / f"{sid}-seed{cfg.seed}.json")
    print(f"{len(cfg.suites)} suites in {time.perf_counter() - start:.1f}s; refuted: {failed or 'none'}")


if __name__ == "__main__":
    main()
