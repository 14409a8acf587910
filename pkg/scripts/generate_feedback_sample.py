#!/usr/bin/env python3
"""Regenerate the bundled synthetic feedback dataset.

The per-metric rating distributions below were found by exhaustive search
over integer multisets of size 123 in [1, 5] so that each metric's
population mean and standard deviation round (1 decimal) to the published
acceptance targets. The record assembly is seeded, so the output file is
reproducible byte-for-byte.

Usage: python scripts/generate_feedback_sample.py > src/tutor_engine/assets/feedback_sample.jsonl
"""

from __future__ import annotations

import json
import random
import sys

N = 123

# counts of ratings (1, 2, 3, 4, 5) per metric
DISTRIBUTIONS = {
    "response_speed": (0, 0, 2, 33, 88),   # mean 4.6992, std 0.4928 -> (4.7, 0.5)
    "ease_of_use":    (0, 2, 9, 50, 62),   # mean 4.3984, std 0.6954 -> (4.4, 0.7)
    "accuracy":       (0, 2, 3, 74, 44),   # mean 4.3008, std 0.5972 -> (4.3, 0.6)
    "relevance":      (0, 0, 24, 49, 50),  # mean 4.2114, std 0.7463 -> (4.2, 0.7)
    "practicality":   (0, 0, 34, 43, 46),  # mean 4.0976, std 0.8006 -> (4.1, 0.8)
    "visual_appeal":  (0, 30, 31, 31, 31), # mean 3.5122, std 1.1143 -> (3.5, 1.1)
}


def main() -> int:
    rng = random.Random(20260809)
    columns: dict[str, list[int]] = {}
    for metric, counts in DISTRIBUTIONS.items():
        values = [v for v, c in zip((1, 2, 3, 4, 5), counts) for _ in range(c)]
        assert len(values) == N
        rng.shuffle(values)
        columns[metric] = values
    base_ts = 1_750_000_000_000
    for i in range(N):
        record = {
            "session_id": f"survey-{i + 1:04d}",
            "ratings": {metric: columns[metric][i] for metric in DISTRIBUTIONS},
            "turn_index": None,
            "free_text": None,
            "timestamp": base_ts + i * 60_000,
        }
        sys.stdout.write(json.dumps(record) + "\n")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
