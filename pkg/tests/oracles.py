"""Brute-force oracles, written independently of the library code paths they check."""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from math import comb


def gamma_floor(x: Fraction, y: Fraction, b: int, limit: int = 200):
    """Common leading digits by comparing floor(b^i x) and floor(b^i y)."""
    if x == y:
        return math.inf
    for i in range(limit):
        if math.floor(x * b ** (i + 1)) != math.floor(y * b ** (i + 1)):
            return i
    raise AssertionError("points agree on too many digits")


def faure_values(b: int, s: int, m: int) -> list[tuple[Fraction, ...]]:
    """Faure points from the binomial digit formula, one point at a time."""
    pts = []
    for idx in range(b**m):
        a = [(idx // b**c) % b for c in range(m)]
        coords = []
        for j in range(s):
            num = 0
            for r in range(m):
                digit = sum(comb(c, r) * j ** (c - r) * a[c] for c in range(r, m)) % b
                num = num * b + digit
            coords.append(Fraction(num, b**m))
        pts.append(tuple(coords))
    return pts


def elementary_counts(points, b: int, k) -> dict:
    """Points per k-elementary interval, keyed by the tuple of cell indices."""
    out: dict = {}
    for pt in points:
        key = tuple(math.floor(x * b**kj) for x, kj in zip(pt, k))
        out[key] = out.get(key, 0) + 1
    return out


def count_common(points, ref: int, k, b: int) -> int:
    """Other points agreeing with points[ref] on at least k_j digits in every coordinate."""
    total = 0
    for l, pt in enumerate(points):
        if l != ref and all(gamma_floor(x, y, b) >= kj for x, y, kj in zip(points[ref], pt, k)):
            total += 1
    return total


def _cell_gamma(c1: int, c2: int, b: int, L: int) -> int:
    for i in range(L):
        if c1 // b ** (L - 1 - i) != c2 // b ** (L - 1 - i):
            return i
    return L


def volume_vector_cells(a: Fraction, A: Fraction, b: int, upto: int, L: int | None = None) -> list[Fraction]:
    """V_0..V_upto of [a,A)^2 by enumerating pairs of depth-L cells (A must be a union of them)."""
    if L is None:
        L = 0
        while (a * b**L).denominator != 1 or (A * b**L).denominator != 1:
            L += 1
        L = max(L, 1)
    lo, hi = int(a * b**L), int(A * b**L)
    cells = range(lo, hi)
    w2 = Fraction(1, b ** (2 * L))
    V = [Fraction(0)] * (upto + 1)
    for c1 in cells:
        for c2 in cells:
            if c1 == c2:
                continue
            g = _cell_gamma(c1, c2, b, L)
            if g <= upto:
                V[g] += w2
    same = len(cells) * w2
    for i in range(L, upto + 1):
        V[i] += same * Fraction(b - 1, b ** (i - L + 1))
    return V


def volume_vector_tail(a: Fraction, A: Fraction, b: int, i: int) -> Fraction:
    return volume_vector_cells(a, A, b, i)[i]


def H_scramble_pairs(points, box, b: int) -> Fraction:
    """Exact scrambled pair probability by enumerating ordered pairs of distinct points.

    Under nested scrambling the pair (U_j, V_j) is uniform on the set of pairs sharing
    exactly gamma_j leading digits, which has measure (b-1)/b^(gamma_j+1).
    """
    n = len(points)
    total = Fraction(0)
    cache: dict = {}
    for p, q in itertools.permutations(range(n), 2):
        term = Fraction(1)
        for j, (a, A) in enumerate(box):
            g = gamma_floor(points[p][j], points[q][j], b)
            key = (j, g)
            if key not in cache:
                V = volume_vector_cells(a, A, b, g)[g]
                cache[key] = V / Fraction(b - 1, b ** (g + 1))
            term *= cache[key]
            if not term:
                break
        total += term
    return total / (n * (n - 1))


def H_shift_enumerate(points, box, b: int, depth: int) -> Fraction:
    """Exact digital-shift pair probability by enumerating all shift prefixes of length depth.

    Points and box endpoints must have at most ``depth`` base-b digits, so membership only
    depends on the first ``depth`` digits of each shifted coordinate.
    """
    n, s = len(points), len(box)
    scale = b**depth
    ints = [[int(pt[j] * scale) for j in range(s)] for pt in points]

    def digits(x):
        return [(x // b ** (depth - 1 - l)) % b for l in range(depth)]

    def value(ds):
        v = 0
        for d in ds:
            v = v * b + d
        return v

    pdig = [[digits(x) for x in row] for row in ints]
    per_coord = []
    for j, (a, A) in enumerate(box):
        lo, hi = a * scale, A * scale
        inside_count = []
        for shift in range(scale):
            sd = digits(shift)
            inside = [lo <= value([(x + y) % b for x, y in zip(pdig[i][j], sd)]) < hi for i in range(n)]
            inside_count.append(inside)
        per_coord.append(inside_count)
    total = 0
    for shifts in itertools.product(range(scale), repeat=s):
        inside = [all(per_coord[j][shifts[j]][i] for j in range(s)) for i in range(n)]
        N = sum(inside)
        total += N * (N - 1)
    return Fraction(total, scale**s * n * (n - 1))


def Q_direct(b: int, k: int, s: int) -> int:
    return sum((-1) ** j * comb(s, j) * (b ** (k - j) - 1) for j in range(k + 1))


def count_general(points, ref: int, k, d, c: int, J, I, b: int) -> int:
    """Other points with gamma >= k+d+c on I, gamma == d exactly on J minus I, gamma >= k off J."""
    total = 0
    for l, pt in enumerate(points):
        if l == ref:
            continue
        ok = True
        for j, (x, y) in enumerate(zip(points[ref], pt)):
            g = gamma_floor(x, y, b)
            if j in I:
                ok = g >= k[j] + d[j] + c
            elif j in J:
                ok = g == d[j]
            else:
                ok = g >= k[j]
            if not ok:
                break
        total += ok
    return total
