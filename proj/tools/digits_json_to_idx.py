#!/usr/bin/env python3
"""Convert the per-digit JSON dumps shipped by the npm `mnist` package into
big-endian IDX files (magic 2051 / 2049).

The package holds ~10k MNIST digits as normalized floats grouped by class.
Samples are interleaved with a fixed shuffle so any prefix is class balanced.

    npm pack mnist && tar xzf mnist-*.tgz
    python3 tools/digits_json_to_idx.py package/src/digits out_dir
"""
import json
import random
import struct
import sys
from pathlib import Path


def main() -> int:
    if len(sys.argv) != 3:
        print(__doc__)
        return 2
    src, out = Path(sys.argv[1]), Path(sys.argv[2])
    out.mkdir(parents=True, exist_ok=True)

    samples = []
    for digit in range(10):
        raw = json.loads((src / f"{digit}.json").read_text())["data"]
        n = len(raw) // 784
        for i in range(n):
            pix = bytes(min(255, max(0, round(v * 255))) for v in raw[i * 784:(i + 1) * 784])
            samples.append((pix, digit))

    random.Random(20251019).shuffle(samples)

    with open(out / "digits-images-idx3-ubyte", "wb") as f:
        f.write(struct.pack(">IIII", 2051, len(samples), 28, 28))
        for pix, _ in samples:
            f.write(pix)
    with open(out / "digits-labels-idx1-ubyte", "wb") as f:
        f.write(struct.pack(">II", 2049, len(samples)))
        f.write(bytes(label for _, label in samples))
    print(f"wrote {len(samples)} samples to {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
