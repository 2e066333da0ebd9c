#!/usr/bin/env python3
"""Produce the benchmark cohort files in bit-lines format.

The four benchmark cohorts come from public datasets, reduced to one bit per
contributor:

  kosarak     n=20000, n1=659    click events; 1 iff the visited page is one
                                 of 100 randomly chosen target pages
  amazon      n=10000, n1=762    beauty-product ratings; 1 iff the rating is
                                 one star
  ecommerce   n=23486, n1=19314  women's clothing reviews; the binary
                                 "Recommended IND" field
  census      n=10000, n1=9528   2010 US census microdata; 1 iff the group
                                 quarters code is 1

The random page/record selections behind the published counts are not
recoverable, so this script writes synthetic stand-ins with exactly the
same (n, n1) shape: a deterministic shuffle of n1 ones among n values.
Replace them with real extracts if you have the raw data; the harness only
reads the bit-lines format either way.
"""

import argparse
from pathlib import Path

from jrr.datasets import synthesize

SHAPES = {
    "kosarak": (20_000, 659),
    "amazon": (10_000, 762),
    "ecommerce": (23_486, 19_314),
    "census": (10_000, 9_528),
}


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="data", help="output directory")
    parser.add_argument("--seed", type=int, default=2024)
    args = parser.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name, (n, n1) in SHAPES.items():
        values = synthesize(n, n1, seed=args.seed)
        path = out / f"{name}.bits"
        path.write_text("".join(f"{v}\n" for v in values), encoding="utf-8")
        print(f"{path}: n={n} n1={n1} ratio={n1 / n:.3f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
