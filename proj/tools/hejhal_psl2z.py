#!/usr/bin/env python3
"""Offline generator for the PSL2(Z) cusp form spectral parameters shipped in
data/psl2z_maass.csv.

Hejhal's collocation method, even and odd forms handled separately.  K-Bessel
of imaginary order comes from arb (python-flint).  Not part of the library or
the test suite; run once, takes a while on one core.

usage: hejhal_psl2z.py [--tmin 1] [--tmax 101] [--out data/psl2z_maass.csv]
"""
import argparse
import math
import sys
import time

import numpy as np
from flint import acb, arb, ctx
from scipy.optimize import brentq

ctx.prec = 96
SQ3H = math.sqrt(3.0) / 2.0


def kbes_row(r, xs):
    # e^{pi r/2} K_{ir}(x), real for real x.  arb loses about pi r / (2 log 2)
    # bits to cancellation here, so the working precision grows with r.
    ctx.prec = 80 + int(2.5 * r)
    nu = acb(0, r)
    sc = arb(r).__mul__(arb.pi()) / 2
    sc = sc.exp()
    out = np.empty(len(xs))
    for i, x in enumerate(xs):
        v = acb(x).bessel_k(nu) * sc
        out[i] = float(v.real)
    return out


def decay_exp(r, x):
    if x <= r:
        return 0.0
    return math.sqrt(x * x - r * r) - r * math.acos(r / x)


def choose_m(r, y):
    m = 2
    while decay_exp(r, 2 * math.pi * m * y) < 32.0:
        m += 1
    return m


def pullback(x, y):
    while True:
        x -= math.floor(x + 0.5)
        if x * x + y * y < 1.0 - 1e-15:
            d = x * x + y * y
            x, y = -x / d, y / d
        else:
            return x, y


class Setup:
    def __init__(self, r, y):
        self.m = choose_m(r, y)
        self.q = self.m + 6
        q = self.q
        self.y = y
        xm = (np.arange(1, q + 1) - 0.5) / (2 * q)
        self.xm = xm
        pts = [pullback(x, y) for x in xm]
        self.xs = np.array([p[0] for p in pts])
        self.ys = np.array([p[1] for p in pts])


def matrices(r, st):
    m, q = st.m, st.q
    ns = np.arange(1, m + 1)
    wy = math.sqrt(st.y) * kbes_row(r, 2 * math.pi * ns * st.y)
    # W_l(y*_j)
    args = (2 * math.pi * np.outer(st.ys, ns)).ravel()
    ws = kbes_row(r, args).reshape(q, m) * np.sqrt(st.ys)[:, None]
    res = {}
    for par, fn in (("even", np.cos), ("odd", np.sin)):
        lhs = fn(2 * math.pi * np.outer(ns, st.xm))          # n x j
        rhs = ws * fn(2 * math.pi * np.outer(st.xs, ns))     # j x l
        v = -(2.0 / q) * lhs @ rhs
        v[np.diag_indices(m)] += wy
        res[par] = v
    return res


def solve(v):
    a = np.linalg.solve(v[1:, 1:], -v[1:, 0])
    h = v[0, 0] + v[0, 1:] @ a
    return h, a


class HFun:
    def __init__(self, y):
        self.y = y
        self.cache = {}

    def __call__(self, r, par):
        key = (r, par)
        if key not in self.cache:
            st = Setup(r, self.y)
            vs = matrices(r, st)
            for p in vs:
                self.cache[(r, p)] = solve(vs[p])
        return self.cache[key]


def step_at(r):
    return min(0.02, 0.3 / max(r, 1.0))


def find_roots(hf, hf2, par, rlo, rhi, log):
    found = []
    grid = [rlo]
    while grid[-1] < rhi:
        grid.append(grid[-1] + step_at(grid[-1]))
    vals = [hf(r, par)[0] for r in grid]

    def refine(a, b):
        try:
            root = brentq(lambda s: hf(s, par)[0], a, b, xtol=1e-11, rtol=1e-13)
        except ValueError:
            return
        h, av = hf(root, par)
        st = Setup(root, hf.y)
        scale = np.max(np.abs(matrices(root, st)[par][0]))
        if abs(h) > 1e-6 * scale:
            return  # pole
        h2, av2 = hf2(root, par)
        dev = abs(av[0] - av2[0])
        if dev > 1e-4:
            log(f"  reject {par} {root:.10f} dev={dev:.2e}")
            return
        found.append((root, dev))
        log(f"  {par} {root:.12f} c2={av[0]:+.8f} dev={dev:.1e}")

    for i in range(1, len(grid)):
        if np.sign(vals[i - 1]) != np.sign(vals[i]):
            refine(grid[i - 1], grid[i])
    # dips: local minima of |h| without a sign change may hide a close pair
    for i in range(1, len(grid) - 1):
        a0, a1, a2 = abs(vals[i - 1]), abs(vals[i]), abs(vals[i + 1])
        same = np.sign(vals[i - 1]) == np.sign(vals[i]) == np.sign(vals[i + 1])
        if same and a1 < a0 and a1 < a2 and a1 < 0.35 * min(a0, a2):
            sub = np.linspace(grid[i - 1], grid[i + 1], 41)
            sv = [hf(s, par)[0] for s in sub]
            for k in range(1, len(sub)):
                if np.sign(sv[k - 1]) != np.sign(sv[k]):
                    log(f"  dip split near {grid[i]:.5f}")
                    refine(sub[k - 1], sub[k])
    found.sort()
    uniq = []
    for r, d in found:
        if not uniq or abs(r - uniq[-1][0]) > 1e-7:
            uniq.append((r, d))
    return uniq


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--tmin", type=float, default=1.0)
    ap.add_argument("--tmax", type=float, default=101.0)
    ap.add_argument("--out", default="data/psl2z_maass.csv")
    args = ap.parse_args()
    t0 = time.time()

    def log(s):
        print(f"[{time.time() - t0:8.1f}s] {s}", flush=True)

    y1 = 0.82
    y2 = 0.76
    hf, hf2 = HFun(y1), HFun(y2)
    rows = []
    chunk = 5.0
    lo = args.tmin
    while lo < args.tmax:
        hi = min(lo + chunk, args.tmax)
        for par in ("even", "odd"):
            for r, d in find_roots(hf, hf2, par, lo, hi, log):
                rows.append((r, par, d))
        hf.cache.clear()
        hf2.cache.clear()
        log(f"done [{lo:.1f},{hi:.1f}] total {len(rows)}")
        lo = hi
    rows.sort()
    with open(args.out, "w") as f:
        f.write("# PSL2(Z) Maass cusp forms, spectral parameters t (lambda = 1/4 + t^2)\n")
        f.write("# generated by tools/hejhal_psl2z.py (Hejhal collocation, arb K-Bessel)\n")
        f.write(f"# range: t in [{args.tmin}, {args.tmax}]\n")
        f.write("# vol=1.0471975511965976\n")
        f.write("# cusps=1\n")
        f.write("t,multiplicity,tag\n")
        for r, par, d in rows:
            f.write(f"{r:.10f},1,weight0-2D\n")
    log(f"wrote {len(rows)} rows")


if __name__ == "__main__":
    sys.exit(main())
