#!/usr/bin/env python3
"""Convert the npm `mnist` and `fashion-mnist` packages into IDX image files.

    npm pack mnist@1.1.0 fashion-mnist@1.1.0
    mkdir -p mnist fmnist
    tar xzf mnist-1.1.0.tgz -C mnist --strip-components 1
    tar xzf fashion-mnist-1.1.0.tgz -C fmnist --strip-components 1
    python3 scripts/prepare_mnist.py --mnist mnist --fmnist fmnist --out data

Images are interleaved across classes so that any prefix is class balanced.
"""

import argparse
import json
import pathlib
import struct


def load_mnist(root):
    classes = []
    for digit in range(10):
        flat = json.loads((root / "src" / "digits" / f"{digit}.json").read_text())["data"]
        pixels = [min(255, max(0, round(v * 255))) for v in flat]
        classes.append([pixels[i:i + 784] for i in range(0, len(pixels), 784)])
    return classes


def load_fmnist(root):
    classes = []
    for label in range(10):
        path = root / "src" / "clothes" / f"{label}.json"
        if path.exists():
            classes.append(json.loads(path.read_text())["data"])
    return classes


def interleave(classes, limit):
    out = []
    depth = max(len(c) for c in classes)
    for i in range(depth):
        for c in classes:
            if i < len(c):
                out.append(c[i])
                if len(out) == limit:
                    return out
    return out


def write_idx(path, images):
    with open(path, "wb") as f:
        f.write(struct.pack(">IIII", 0x00000803, len(images), 28, 28))
        for img in images:
            if len(img) != 784:
                raise ValueError("expected 784 pixels per image")
            f.write(bytes(int(v) for v in img))


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--mnist", type=pathlib.Path, required=True)
    ap.add_argument("--fmnist", type=pathlib.Path, required=True)
    ap.add_argument("--out", type=pathlib.Path, default=pathlib.Path("data"))
    ap.add_argument("--count", type=int, default=10000)
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    write_idx(args.out / "mnist-images-idx3-ubyte", interleave(load_mnist(args.mnist), args.count))
    write_idx(args.out / "fmnist-images-idx3-ubyte", interleave(load_fmnist(args.fmnist), args.count))


if __name__ == "__main__":
    main()
