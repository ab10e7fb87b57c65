#!/usr/bin/env python3
# Copyright 2026 The xview Authors
# SPDX-License-Identifier: Apache-2.0
"""Reference values for the golden KITTI files, computed in exact rationals.

Writes tests/data/kitti/velodyne/000000.bin (fixed seed) and prints:
  * the composed LIDAR -> pixel projection P2 * R0_rect * Tr_velo_to_cam,
  * point accounting and the first nearest-kernel pairings for the default
    1280x384 image and 600x600 BEV grid.
The printed numbers are frozen into tests/unit/test_golden.cpp.
"""
from fractions import Fraction
from math import floor
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parents[1] / "data" / "kitti"


def read_calib(path):
    out = {}
    for line in path.read_text().splitlines():
        if ":" not in line:
            continue
        key, vals = line.split(":", 1)
        # Fraction(float(s)) is the exact value of the parsed double.
        out[key.strip()] = [Fraction(float(v)) for v in vals.split()]
    return out


def matmul(a, b, n, m, p):
    return [[sum(a[i][k] * b[k][j] for k in range(m)) for j in range(p)] for i in range(n)]


def compose(calib):
    p2 = [calib["P2"][4 * r:4 * r + 4] for r in range(3)]
    r0 = [[Fraction(0)] * 4 for _ in range(4)]
    for r in range(3):
        for c in range(3):
            r0[r][c] = calib["R0_rect"][3 * r + c]
    r0[3][3] = Fraction(1)
    tr = [calib["Tr_velo_to_cam"][4 * r:4 * r + 4] for r in range(3)] + [
        [Fraction(0), Fraction(0), Fraction(0), Fraction(1)]]
    return matmul(matmul(p2, r0, 3, 4, 4), tr, 3, 4, 4)


def write_cloud(path, n=300, seed=2024):
    rng = np.random.default_rng(seed)
    pts = np.empty((n, 4), dtype="<f4")
    pts[:, 0] = rng.uniform(2.0, 50.0, n)
    pts[:, 1] = rng.uniform(-15.0, 15.0, n)
    pts[:, 2] = rng.uniform(-2.2, 0.8, n)
    pts[:, 3] = rng.uniform(0.0, 1.0, n)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(pts.tobytes())
    return pts


def main():
    calib = read_calib(ROOT / "calib" / "000000.txt")
    P = compose(calib)
    print("P =")
    for row in P:
        print("  " + ", ".join(repr(float(v)) for v in row))

    pts = write_cloud(ROOT / "velodyne" / "000000.bin")
    in_view = paired = 0
    pairs = []
    for x, y, z, _ in pts.astype(np.float64):
        X = [Fraction(x), Fraction(y), Fraction(z), Fraction(1)]
        uw, vw, w = (sum(P[r][k] * X[k] for k in range(4)) for r in range(3))
        front = None
        if w > 0:
            u, v = uw / w, vw / w
            if 0 <= u < 1280 and 0 <= v < 384:
                front = floor(v) * 1280 + floor(u)
                in_view += 1
        bev = None
        if 0 <= X[0] < 60 and -30 <= X[1] < 30 and Fraction(-5, 2) <= X[2] < 1:
            bev = floor((X[0] - 0) * 10) * 600 + floor((X[1] + 30) * 10)
        if front is not None and bev is not None:
            paired += 1
            pairs.append((bev, front))
    pairs.sort()
    print(f"points={len(pts)} in_view={in_view} paired={paired} distinct={len(set(pairs))}")
    print("first pairs (bev, front):", pairs[:4])


if __name__ == "__main__":
    main()
