#!/usr/bin/env python3
"""Reference values for the Fresnel integrals C(u), S(u).

Adaptive Gauss-Legendre quadrature (mpmath.quad) of cos(pi x^2/2) and
sin(pi x^2/2) at 40 significant digits. The integration range is split at
the phase nodes x_k = sqrt(2k) so every panel holds at most one oscillation;
panels are accumulated in increasing |u| so each one is integrated once.
Every value is cross-checked against mpmath's hypergeometric fresnelc/fresnels.

Writes tests/data/fresnel_reference.inc (one {u, C, S} row per point).
"""
import math
import pathlib
import sys

import mpmath as mp

mp.mp.dps = 40


def sample_points():
    pts = []
    # 600 points spread over the full range, 400 dense ones around the
    # series/continued-fraction switchover.
    for k in range(600):
        pts.append(-100.0 + 200.0 * (k + 0.5) / 600.0)
    for k in range(400):
        pts.append(-6.0 + 12.0 * (k + 0.5) / 400.0)
    return pts


def main():
    pts = sample_points()
    mags = sorted(set(abs(p) for p in pts))
    fc = lambda x: mp.cos(mp.pi * x * x / 2)
    fs = lambda x: mp.sin(mp.pi * x * x / 2)

    table = {}
    acc_c = mp.mpf(0)
    acc_s = mp.mpf(0)
    pos = mp.mpf(0)
    k = 1
    for m in mags:
        target = mp.mpf(m)
        while True:
            node = mp.sqrt(2 * k)
            hi = node if node < target else target
            if hi > pos:
                acc_c += mp.quad(fc, [pos, hi])
                acc_s += mp.quad(fs, [pos, hi])
                pos = hi
            if node < target:
                k += 1
            else:
                break
        table[m] = (acc_c, acc_s)
        ref_c = mp.fresnelc(target)
        ref_s = mp.fresnels(target)
        if abs(ref_c - acc_c) > mp.mpf("1e-25") or abs(ref_s - acc_s) > mp.mpf("1e-25"):
            sys.exit(f"quadrature/hypergeometric mismatch at u={m}")

    out = pathlib.Path(__file__).resolve().parents[1] / "data" / "fresnel_reference.inc"
    with out.open("w") as fh:
        fh.write("// Generated by tests/oracles/fresnel_reference.py; do not edit.\n")
        fh.write("// {u, C(u), S(u)} from 40-digit adaptive quadrature.\n")
        for p in pts:
            c, s = table[abs(p)]
            sign = -1 if p < 0 else 1
            fh.write("{%s, %s, %s},\n" % (repr(p), mp.nstr(sign * c, 20), mp.nstr(sign * s, 20)))
    print(f"wrote {len(pts)} rows to {out}")


if __name__ == "__main__":
    main()
