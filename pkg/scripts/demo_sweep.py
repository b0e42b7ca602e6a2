#!/usr/bin/env python3
"""Run a design sweep on the bundled synthetic mixture and print the winners.

Usage: python scripts/demo_sweep.py [--n 5000] [--top 5] [--jobs 2]
"""

import argparse
import json
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from scatteropt.optimizer import DEFAULT_SEED, ranked_to_json, sweep
from scatteropt.synth import gaussian_mixture


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=5000)
    ap.add_argument("--top", type=int, default=5)
    ap.add_argument("--jobs", type=int, default=2)
    ap.add_argument("--seed", type=int, default=DEFAULT_SEED)
    ap.add_argument("--out", default=None, help="optional results JSON path")
    args = ap.parse_args()

    ps = gaussian_mixture(args.n, seed=7)
    t0 = time.perf_counter()
    done = [0]

    def progress(evaluated, total):
        if evaluated - done[0] >= total // 20 or evaluated == total:
            done[0] = evaluated
            print(f"\r  {evaluated}/{total} designs", end="", flush=True)

    ranked = sweep(ps, top_k=args.top, seed=args.seed, workers=args.jobs, progress=progress)
    print(f"\nswept the full grid in {time.perf_counter() - t0:.1f}s\n")
    print(f"{'rank':<5}{'sampler':<26}{'rate':>6}{'area':>6}{'opacity':>9}{'clusters':>9}{'saliency':>10}")
    for i, d in enumerate(ranked, 1):
        p = d.params
        print(
            f"{i:<5}{p.sampler.value:<26}{p.rate:>6.2f}{p.point_area:>6.0f}"
            f"{p.opacity:>9.2f}{d.score.count:>9}{d.score.value:>10.6f}"
        )
    if args.out:
        Path(args.out).write_text(json.dumps(ranked_to_json(ranked), indent=1))
        print(f"\nwrote {args.out}")


if __name__ == "__main__":
    main()
