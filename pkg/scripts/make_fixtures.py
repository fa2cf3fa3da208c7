#!/usr/bin/env python3
"""Generate a synthetic before/after fixture dataset with a manifest.

Usage:
    python scripts/make_fixtures.py out/fixtures --count 50 --size 112
"""

import argparse

from smoseg.synth import SynthSpec, write_fixture_dataset


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("out_dir")
    ap.add_argument("--count", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--size", type=int, default=112)
    ap.add_argument("--targets", type=int, default=1)
    ap.add_argument("--distractors", type=int, default=3)
    ap.add_argument("--displacement", type=int, default=3)
    args = ap.parse_args()

    spec = SynthSpec(
        height=args.size,
        width=args.size,
        target_count=args.targets,
        distractor_count=args.distractors,
        displacement=args.displacement,
    )
    manifest = write_fixture_dataset(
        args.out_dir, list(range(args.seed, args.seed + args.count)), spec
    )
    print(f"wrote {args.count} pairs, manifest at {manifest}")


if __name__ == "__main__":
    main()
