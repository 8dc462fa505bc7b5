#!/usr/bin/env python3
"""Sweep mask seeds and report coverage statistics.

Example:
    python3 scripts/mask_stats.py --frames 1000 --ratio 0.5 --span-max 250 --seeds 1000
"""

import argparse

import numpy as np

from jdtok.masking import MaskConfig, generate_block_mask


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--frames", type=int, default=1000)
    parser.add_argument("--ratio", type=float, default=0.5)
    parser.add_argument("--span-min", type=int, default=2)
    parser.add_argument("--span-max", type=int, default=None)
    parser.add_argument("--seeds", type=int, default=1000)
    parser.add_argument(
        "--count-overlaps",
        action="store_true",
        help="use the legacy full-span counter instead of newly-masked counting",
    )
    args = parser.parse_args()

    counts, run_lengths = [], []
    for seed in range(args.seeds):
        cfg = MaskConfig(
            mask_ratio=args.ratio,
            span_min=args.span_min,
            span_max=args.span_max,
            seed=seed,
        )
        mask = generate_block_mask(args.frames, cfg, count_overlaps=args.count_overlaps)
        counts.append(int(np.count_nonzero(mask == 0)))
        boundaries = np.flatnonzero(np.diff(np.concatenate([[1], mask, [1]])))
        run_lengths.extend((boundaries[1::2] - boundaries[::2]).tolist())

    counts = np.array(counts)
    target = int(np.floor(args.ratio * args.frames))
    print(f"target masked count: {target}")
    print(f"masked count: min {counts.min()}  max {counts.max()}  "
          f"mean {counts.mean():.2f}")
    print(f"mean masked fraction: {counts.mean() / args.frames:.4f}")
    print(f"seeds meeting target: {int(np.sum(counts >= target))}/{args.seeds}")
    if run_lengths:
        run_lengths = np.array(run_lengths)
        print(f"zero-run length: min {run_lengths.min()}  "
              f"median {np.median(run_lengths):.0f}  max {run_lengths.max()}")


if __name__ == "__main__":
    main()
