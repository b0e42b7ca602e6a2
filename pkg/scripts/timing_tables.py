#!/usr/bin/env python3
"""Reproduce the three performance tables on synthetic data.

Writes bench_sampling.csv (per-sampler wall time by rate), bench_scaling.csv
(render+topology time vs point count), and quality.csv (per-sampler win
fractions at low rates) into --out-dir.

Usage: python scripts/timing_tables.py [--out-dir results] [--quick]
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from scatteropt.optimizer import quality_rank, quality_table_csv, scaling_curve, scaling_table_csv
from scatteropt.sampling import RATE_GRID, SamplerKind, time_samplers, timing_table_csv
from scatteropt.synth import gaussian_mixture


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out-dir", default="results")
    ap.add_argument("--n", type=int, default=10_000)
    ap.add_argument("--quick", action="store_true", help="3 rates and smaller sizes")
    args = ap.parse_args()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    rates = [0.05, 0.5, 0.95] if args.quick else list(RATE_GRID)
    sizes = [10_000, 50_000, 200_000] if args.quick else [10_000, 100_000, 1_000_000]
    ps = gaussian_mixture(args.n, seed=3)

    print(f"timing all 14 samplers at {len(rates)} rates on n={args.n} ...")
    rows = time_samplers(ps, rates=rates, kinds=list(SamplerKind), repeats=3)
    (out / "bench_sampling.csv").write_text(timing_table_csv(rows))

    print(f"scaling curve over sizes {sizes} ...")
    rows = scaling_curve(sizes, repeats=2)
    (out / "bench_scaling.csv").write_text(scaling_table_csv(rows))

    print("win fractions at rates <= 30% ...")
    rows = quality_rank(ps, rates=[0.05, 0.15, 0.3], samplers=list(SamplerKind), repeats=1)
    (out / "quality.csv").write_text(quality_table_csv(rows))

    print(f"wrote 3 tables under {out}/")


if __name__ == "__main__":
    main()
