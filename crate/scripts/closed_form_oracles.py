#!/usr/bin/env python3
"""Closed-form and brute-force reference values frozen into the Rust tests.

Every number here is computed by direct summation over explicit probability
tables (numpy), without reusing any code from the Rust crates.

    python3 scripts/closed_form_oracles.py
"""
import itertools
import math

import numpy as np


def h(ps):
    ps = np.asarray(ps, dtype=float).ravel()
    ps = ps[ps > 0]
    return float(-(ps * np.log2(ps)).sum())


def h2(p):
    return h([p, 1 - p])


def mi(joint, a, b, c=()):
    """I(A;B|C) via the double sum  sum p log p(abc)p(c)/(p(ac)p(bc))."""
    axes = range(joint.ndim)

    def marg(keep):
        drop = tuple(ax for ax in axes if ax not in keep)
        return joint.sum(axis=drop, keepdims=True)

    pabc = marg(set(a) | set(b) | set(c))
    pac = marg(set(a) | set(c))
    pbc = marg(set(b) | set(c))
    pc = marg(set(c))
    total = 0.0
    for idx in itertools.product(*[range(s) for s in pabc.shape]):
        p = pabc[idx]
        if p <= 0:
            continue
        def at(t):
            return t[tuple(i if t.shape[k] > 1 else 0 for k, i in enumerate(idx))]
        total += p * math.log2(p * at(pc) / (at(pac) * at(pbc)))
    return total


def bsc(p):
    return np.array([[1 - p, p], [p, 1 - p]])


def relay_joint(p1, p2, kernel, q):
    """axes (X1, X2, Y2, Y3, Yhat); kernel[x1,x2,y2,y3], q[x2,y2,yhat]."""
    return np.einsum("a,b,abcd,bcf->abcdf", p1, p2, kernel, q)


def bounds(j):
    X1, X2, Y2, Y3, YH = 0, 1, 2, 3, 4
    out = {}
    out["quantization"] = mi(j, [YH], [Y2], [X2])
    out["message"] = mi(j, [X1], [YH, Y3], [X2])
    extra = mi(j, [YH], [X1, Y3], [X2])
    out["index"] = mi(j, [X2], [Y3]) + extra
    out["sum"] = mi(j, [X1, X2], [Y3]) + extra
    out["excess"] = mi(j, [YH], [Y2], [X1, X2, Y3])
    out["projected_sum"] = mi(j, [X1, X2], [Y3]) - out["excess"]
    out["relay_link"] = mi(j, [X2], [Y3])
    out["direct"] = mi(j, [X1], [Y3], [X2])
    out["backward_relay_link"] = mi(j, [X2], [Y3], [X1])
    return out


def main():
    print("H(0.25, 0.75)            =", repr(h([0.25, 0.75])))
    print("1 - H2(0.11)             =", repr(1 - h2(0.11)))
    print("1 - H2(0.1)              =", repr(1 - h2(0.1)))
    print("H2(0.1)                  =", repr(h2(0.1)))

    # BSC(0.11) with uniform input, I(X;Y) by double sum.
    j = 0.5 * bsc(0.11)
    print("I(X;Y) BSC(0.11)         =", repr(mi(j, [0], [1])))

    # Perfect relay: Y2 = X1, Y3 = X2, identity quantizer, uniform inputs.
    k = np.zeros((2, 2, 2, 2))
    for a, b in itertools.product(range(2), range(2)):
        k[a, b, a, b] = 1.0
    q = np.zeros((2, 2, 2))
    for b, c in itertools.product(range(2), range(2)):
        q[b, c, c] = 1.0
    u = np.array([0.5, 0.5])
    jp = relay_joint(u, u, k, q)
    print("perfect relay P(0,0,0,0,0) =", jp[0, 0, 0, 0, 0])
    print("perfect relay marginal X1  =", jp.sum(axis=(1, 2, 3, 4)))
    for key, val in bounds(jp).items():
        print(f"perfect relay {key:20s} = {val!r}")

    # Primitive relay, r0 = 1, p3 = 0.1: Y2 = X1, Y3 = (BSC(X1), X2) row-major.
    k = np.zeros((2, 2, 2, 4))
    for a, b, y in itertools.product(range(2), range(2), range(2)):
        k[a, b, a, y * 2 + b] = bsc(0.1)[a, y]
    jp = relay_joint(u, u, k, q)
    print("primitive r0=1 H(Y3) uniform inputs =", repr(h(jp.sum(axis=(0, 1, 2, 4)))))
    b = bounds(jp)
    print("primitive r0=1 identity quantizer:")
    for key, val in b.items():
        print(f"    {key:20s} = {val!r}")
    cons = mi(jp, [4], [2], [1, 3])
    print("    I(Yhat;Y2|X2Y3)      =", repr(cons), "<= I(X2;Y3) =", repr(b["relay_link"]))

    # Orthogonal BSC p2 = 0.05, p3 = 0.2, identity quantizer, uniform inputs.
    k = np.zeros((2, 2, 2, 4))
    for a, bb, y2, y in itertools.product(range(2), range(2), range(2), range(2)):
        k[a, bb, y2, y * 2 + bb] = bsc(0.05)[a, y2] * bsc(0.2)[a, y]
    jp = relay_joint(u, u, k, q)
    print("orthogonal bsc (0.05, 0.2) identity quantizer:")
    for key, val in bounds(jp).items():
        print(f"    {key:20s} = {val!r}")

    # XOR multiple-access at the sink: Y2 = X1, Y3 = X1 xor X2.
    k = np.zeros((2, 2, 2, 2))
    for a, bb in itertools.product(range(2), range(2)):
        k[a, bb, a, a ^ bb] = 1.0
    jp = relay_joint(u, u, k, q)
    print("xor sink identity quantizer:")
    for key, val in bounds(jp).items():
        print(f"    {key:20s} = {val!r}")


if __name__ == "__main__":
    main()
