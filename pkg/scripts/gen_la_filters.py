#!/usr/bin/env python3
"""Generate Daubechies least-asymmetric filter coefficients at high precision.

Dev-time tool: runs spectral factorization of the Daubechies squared gain
polynomial with mpmath (60 digits), selects the least-asymmetric root
assignment by minimizing the worst-case deviation of the filter phase from
linear phase, and prints float64 literals ready to embed in
``src/leadlag/filters.py``.

Usage: python scripts/gen_la_filters.py [L ...]   (default: 8 20)
"""

import sys
from itertools import product

import mpmath as mp

mp.mp.dps = 60


def daubechies_poly(half):
    """Coefficients of P(y) = sum_{p<half} C(half-1+p, p) y^p, ascending."""
    return [mp.binomial(half - 1 + p, p) for p in range(half)]


def laurent_roots(half):
    """Roots of z^(half-1) * P((2 - z - 1/z)/4), a degree 2(half-1) polynomial."""
    p_coef = daubechies_poly(half)
    # Expand z^(half-1) * sum_p c_p ((2 - z - 1/z)/4)^p  as a polynomial in z.
    # Work with ascending coefficient lists.
    def poly_mul(a, b):
        out = [mp.mpf(0)] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
        return out

    # (2 - z - 1/z)/4 * z = (2z - z^2 - 1)/4, ascending in z: [-1/4, 1/2, -1/4]
    base = [mp.mpf(-1) / 4, mp.mpf(1) / 2, mp.mpf(-1) / 4]
    # Build sum_p c_p (base)^p * z^(half-1-p); each (base)^p carries z^p from
    # the multiplication above, so pad with z^(half-1-p).
    total = [mp.mpf(0)] * (2 * half - 1)
    power = [mp.mpf(1)]
    for p, c in enumerate(p_coef):
        shift = half - 1 - p
        for i, ci in enumerate(power):
            total[i + shift] += c * ci
        power = poly_mul(power, base)
    # mp.polyroots expects descending order
    desc = list(reversed(total))
    while desc and desc[0] == 0:
        desc = desc[1:]
    roots = mp.polyroots(desc, maxsteps=500, extraprec=200)
    return roots


def reciprocal_classes(roots):
    """Group roots into choice classes {inside set, outside set}.

    Real reciprocal pairs give a 2-way choice of one root; complex
    conjugate-reciprocal quadruples give a 2-way choice of a conjugate pair.
    """
    tol = mp.mpf(10) ** (-30)
    remaining = list(roots)
    classes = []

    def pop_close(target):
        for i, r in enumerate(remaining):
            if abs(r - target) < tol * (1 + abs(target)):
                return remaining.pop(i)
        raise RuntimeError(f"partner root not found for {target}")

    while remaining:
        r = remaining.pop(0)
        rin = r if abs(r) < 1 else 1 / r
        if abs(mp.im(r)) < tol:
            rin = mp.mpf(mp.re(rin))
            pop_close(1 / r)
            classes.append(([rin], [1 / rin]))
        else:
            pop_close(mp.conj(r))
            pop_close(1 / r)
            pop_close(1 / mp.conj(r))
            classes.append(
                ([rin, mp.conj(rin)], [1 / rin, mp.conj(1 / rin)])
            )
    return classes


def poly_from_roots(rts):
    coef = [mp.mpc(1)]
    for r in rts:
        nxt = [mp.mpc(0)] * (len(coef) + 1)
        for i, c in enumerate(coef):
            nxt[i] += c * (-r)
            nxt[i + 1] += c
        coef = nxt
    return coef


def binomial_half_poly(half):
    """Ascending coefficients of ((1+z)/2)^half."""
    return [mp.binomial(half, k) / mp.mpf(2) ** half for k in range(half + 1)]


def candidate_scaling(half, chosen_roots):
    q = poly_from_roots(chosen_roots)
    q1 = sum(q)
    q = [c / q1 for c in q]
    b = binomial_half_poly(half)
    out = [mp.mpf(0)] * (len(b) + len(q) - 1)
    for i, bi in enumerate(b):
        for j, qj in enumerate(q):
            out[i + j] += mp.re(bi * qj)
    g = [mp.sqrt(2) * c for c in out]
    return g


def phase_deviation(g):
    """Worst deviation of the transfer-function phase from its best linear fit."""
    L = len(g)
    lams = [mp.pi * k / 256 for k in range(1, 256)]
    phases = []
    prev = mp.mpf(0)
    offset = mp.mpf(0)
    for lam in lams:
        val = sum(g[p] * mp.e ** (-1j * lam * p) for p in range(L))
        ph = mp.arg(val)
        ph += offset
        while ph - prev > mp.pi:
            ph -= 2 * mp.pi
            offset -= 2 * mp.pi
        while ph - prev < -mp.pi:
            ph += 2 * mp.pi
            offset += 2 * mp.pi
        phases.append(ph)
        prev = ph
    # best integer-delay linear phase -d*lam
    best = None
    for d in range(-L, L + 1):
        dev = max(abs(ph + d * lam) for ph, lam in zip(phases, lams))
        if best is None or dev < best:
            best = dev
    return best


def wavelet_gain(L, lam):
    half = L // 2
    s = sum(mp.binomial(half - 1 + p, p) * mp.cos(lam / 2) ** (2 * p) for p in range(half))
    return 2 * mp.sin(lam / 2) ** L * s


def verify(g):
    L = len(g)
    h = [(-1) ** p * g[L - 1 - p] for p in range(L)]
    assert abs(sum(c * c for c in h) - 1) < mp.mpf(10) ** -45
    worst = mp.mpf(0)
    for k in range(1, 64):
        lam = mp.pi * k / 64
        emp = abs(sum(h[p] * mp.e ** (-1j * lam * p) for p in range(L))) ** 2
        worst = max(worst, abs(emp - wavelet_gain(L, lam)))
    assert worst < mp.mpf(10) ** -40, worst
    return h


def generate(L):
    half = L // 2
    roots = laurent_roots(half)
    classes = reciprocal_classes(roots)
    best = None
    for picks in product((0, 1), repeat=len(classes)):
        chosen = []
        for cls, pick in zip(classes, picks):
            chosen.extend(cls[pick])
        g = candidate_scaling(half, chosen)
        dev = phase_deviation(g)
        if best is None or dev < best[0]:
            best = (dev, g)
    g = best[1]
    # orient so the energy centroid sits in the left half, matching the
    # usual least-asymmetric tabulation
    centroid = sum(p * c * c for p, c in enumerate(g))
    if centroid > (L - 1) / 2:
        g = g[::-1]
    verify(g)
    return g


def main(argv):
    lengths = [int(a) for a in argv[1:]] or [8, 20]
    for L in lengths:
        g = generate(L)
        print(f"# least-asymmetric scaling filter, L = {L}")
        print(f"_LA{L}_SCALING = (")
        for c in g:
            print(f"    {mp.nstr(c, 17)},")
        print(")")
        print()


if __name__ == "__main__":
    main(sys.argv)
