#!/usr/bin/env python3
"""Time one full-resolution pair through the pipeline.

Usage:
    python scripts/bench_pair.py --jobs 1
    python scripts/bench_pair.py --jobs 8
"""

import argparse
import time

from smoseg.config import PipelineConfig
from smoseg.pipeline import ImagePair, run_pair
from smoseg.slic import SlicParams
from smoseg.synth import SynthSpec, generate_synthetic_pair


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--size", type=int, default=224)
    ap.add_argument("--superpixels", type=int, default=400)
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()

    pair = generate_synthetic_pair(0, SynthSpec(height=args.size, width=args.size))
    cfg = PipelineConfig(
        working_resolution=(args.size, args.size),
        slic=SlicParams(region_count_target=args.superpixels),
    )
    ip = ImagePair(pair_id="bench", before=pair.before, after=pair.after)

    times = []
    for i in range(args.repeats):
        start = time.perf_counter()
        run_pair(cfg, ip, jobs=args.jobs)
        times.append(time.perf_counter() - start)
        print(f"run {i + 1}: {times[-1]:.2f}s")
    print(f"best of {args.repeats}: {min(times):.2f}s (jobs={args.jobs})")


if __name__ == "__main__":
    main()
