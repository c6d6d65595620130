#!/usr/bin/env python3
"""Regenerates the digit-shaped PGM fixtures in data/digits.

Each digit is a polyline skeleton. Pixels are ranked by distance to the
skeleton and exactly `nnz` of them are lit, brighter near the stroke centre.
"""
import math
from pathlib import Path

import numpy as np

DIGITS = {
    # name: (width, height, nonzero count, skeleton in (x, y) pixel units)
    "digit2": (16, 22, 150, [(3.0, 5.5), (5.0, 3.0), (8.0, 2.2), (11.0, 3.0), (12.6, 5.8),
                             (12.0, 9.0), (9.5, 12.0), (6.0, 15.0), (3.2, 18.6),
                             (8.0, 18.6), (13.0, 18.6)]),
    "digit4": (20, 22, 150, [(12.5, 2.5), (9.0, 8.0), (5.5, 13.5), (4.0, 15.5),
                             (10.0, 15.5), (16.5, 15.5), None, (13.0, 3.5), (13.0, 19.5)]),
}


def segment_distance(px, py, a, b):
    ax, ay = a
    bx, by = b
    dx, dy = bx - ax, by - ay
    t = ((px - ax) * dx + (py - ay) * dy) / (dx * dx + dy * dy)
    t = np.clip(t, 0.0, 1.0)
    return np.hypot(px - (ax + t * dx), py - (ay + t * dy))


def render(width, height, nnz, skeleton):
    ys, xs = np.mgrid[0:height, 0:width]
    cx, cy = xs + 0.5, ys + 0.5
    dist = np.full((height, width), math.inf)
    prev = None
    for point in skeleton:
        if point is not None and prev is not None:
            dist = np.minimum(dist, segment_distance(cx, cy, prev, point))
        prev = point
    # stable ranking; ties broken by raster order
    order = np.lexsort((np.arange(dist.size), dist.ravel()))
    lit = order[:nnz]
    cutoff = dist.ravel()[lit].max()
    img = np.zeros(dist.size, dtype=int)
    img[lit] = np.round(255 - 155 * dist.ravel()[lit] / max(cutoff, 1e-9)).astype(int)
    assert np.count_nonzero(img) == nnz
    return img.reshape(height, width)


def write_pgm(path, img):
    height, width = img.shape
    lines = ["P2", f"{width} {height}", "255"]
    lines += [" ".join(str(v) for v in row) for row in img]
    path.write_text("\n".join(lines) + "\n")


def main():
    out = Path(__file__).resolve().parent.parent / "data" / "digits"
    out.mkdir(parents=True, exist_ok=True)
    for name, (width, height, nnz, skeleton) in DIGITS.items():
        img = render(width, height, nnz, skeleton)
        write_pgm(out / f"{name}.pgm", img)
        print(f"{name}: {width}x{height}, {nnz} nonzero ({100 * nnz / (width * height):.1f}%)")


if __name__ == "__main__":
    main()
