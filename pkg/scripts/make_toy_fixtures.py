#!/usr/bin/env python3
"""Generate the demo PPM image set and detections file.

Usage: python scripts/make_toy_fixtures.py [out_dir]

Then run the toy pipeline end to end:

  runa encode-toy --images-dir out/images --detections out/detections.csv \
      --out out/emb.tsv --bank-out out/bank.tsv
  runa eval --bank out/bank.tsv --embeddings out/emb.tsv \
      --detections out/detections.csv --method max-sim --out out/report.txt
"""

import sys

from runa.demo import make_demo_dataset


def main() -> int:
    out_dir = sys.argv[1] if len(sys.argv) > 1 else "demo_data"
    images_dir, detections = make_demo_dataset(out_dir)
    print(f"images: {images_dir}")
    print(f"detections: {detections}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
