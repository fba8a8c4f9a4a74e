#!/usr/bin/env python3
"""Regenerate data/ point-set tables.

Sobol direction numbers come from the Joe-Kuo new-joe-kuo-6.21201 set that
scipy bundles; the lattice vector is Kuo's base-2 extensible rank-1 lattice
lattice-33002-1024-1048576.9125 (as redistributed by qmcpy).

usage: export_point_data.py <dims> <lattice.npy> <outdir>
"""
import os
import sys

import numpy as np
import scipy


def export_sobol(dims, path):
    d = np.load(os.path.join(os.path.dirname(scipy.__file__), "stats", "_sobol_direction_numbers.npz"))
    poly, vinit = d["poly"], d["vinit"]
    with open(path, "w") as f:
        f.write("d       s       a       m_i\n")
        for i in range(1, dims):
            p = int(poly[i])
            s = p.bit_length() - 1
            a = (p >> 1) & ((1 << (s - 1)) - 1)
            m = " ".join(str(int(v)) for v in vinit[i, :s])
            f.write(f"{i + 1} {s} {a} {m}\n")


def export_lattice(dims, src, path):
    g = np.load(src)
    with open(path, "w") as f:
        f.write("# base-2 extensible rank-1 lattice, up to 2^20 points\n")
        for v in g[:dims]:
            f.write(f"{int(v)}\n")


if __name__ == "__main__":
    dims, src, out = int(sys.argv[1]), sys.argv[2], sys.argv[3]
    export_sobol(dims, os.path.join(out, "new-joe-kuo-1024.txt"))
    export_lattice(dims, src, os.path.join(out, "lattice-kuo-1024.txt"))
