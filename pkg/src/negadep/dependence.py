"""Pair probabilities H_n(A), the pairwise dependence index and the variance identity.

H_n(A) is the probability that two distinct points of the randomized set, picked at
random, both land in the box A.
"""

from __future__ import annotations

import itertools
import math
import warnings
import weakref
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import counting
from .boxes import (
    Box,
    BoxInterval,
    anchored_coeffs,
    b_depth,
    product_coeffs,
    volume_vector,
    volume_vector_pair,
)
from .errors import EmptyFamily, NotAnchored, NotAVerifiedNet
from .gfnet import PointSet, point_set_from_values, prefix_ints, verify_tms_net
from .randomize import max_threads, randomize_chunk, replicate_chunks


@dataclass(frozen=True)
class PairProbability:
    exact: Fraction | None = None
    estimate: float | None = None
    se: float | None = None
    R: int | None = None

    def value(self) -> float:
        return float(self.exact) if self.exact is not None else self.estimate


# --- exact paths ---------------------------------------------------------------------


def H_elementary(k: Sequence[int], ps: PointSet) -> Fraction:
    return Fraction(counting.m_b(k, ps), ps.n - 1) / ps.b ** sum(k)


def H_anchored(box: Box, ps: PointSet) -> Fraction:
    """Sum over k of prod_j t_{k_j} times C_b(k)."""
    if not box.is_anchored():
        raise NotAnchored(f"{box} is not anchored at the origin")
    per = [[(k, t) for k, t in enumerate(anchored_coeffs(f).tau) if t] for f in box.exact().factors]
    total = Fraction(0)
    for combo in itertools.product(*per):
        k = tuple(c[0] for c in combo)
        total += math.prod((c[1] for c in combo), start=Fraction(1)) * counting.C_b(k, ps)
    return total


_verified: "weakref.WeakKeyDictionary[PointSet, bool]" = weakref.WeakKeyDictionary()


def _is_net(ps: PointSet) -> bool:
    if ps not in _verified:
        _verified[ps] = ps.m is not None and verify_tms_net(ps, 0)
    return _verified[ps]


def H_unanchored(box: Box, ps: PointSet) -> Fraction:
    """Sum over (k, J) of the product coefficient times m_tilde(k, d, J).

    Exact for a scrambled (0,m,s)-net; computed from the deterministic digits.
    """
    if not _is_net(ps):
        warnings.warn("point set failed the (0,m,s)-net check", NotAVerifiedNet)
    pc = product_coeffs(box.exact())
    total = Fraction(0)
    for (k, J), coef in pc.items():
        total += coef * _m_tilde_cached(ps, k, pc.d, J)
    return total


def _m_tilde_cached(ps: PointSet, k, d, J) -> Fraction:
    tab = counting.count_table(ps)
    dJ = tuple(d[j] if j in J else 0 for j in range(ps.s))
    key = ("mt", tuple(k), dJ, J)
    hit = tab._cache.get(key)
    if hit is None:
        hit = counting.m_tilde(k, dJ, J, ps)
        tab._cache[key] = hit
    return hit


def psi_closed(ps: PointSet) -> dict[tuple[int, ...], Fraction]:
    """psi_i = n_b(i) / ((n-1) Vol(D_i)) on the grid of finite common-digit vectors."""
    M = _max_gamma(ps)
    b, out = ps.b, {}
    for i in itertools.product(range(M + 1), repeat=ps.s):
        nb = counting.n_b(i, ps)
        if nb:
            vol = math.prod((Fraction(b - 1, b ** (ij + 1)) for ij in i), start=Fraction(1))
            out[i] = Fraction(nb, ps.n - 1) / vol
    return out


def _max_gamma(ps: PointSet) -> int:
    g = counting.count_table(ps).others(0)
    if np.any(g >= counting.GAMMA_INF):
        raise ValueError("the constant-density route needs pairwise distinct coordinates")
    return int(g.max()) if g.size else 0


def psi_by_elimination(ps: PointSet) -> dict[tuple[int, ...], Fraction]:
    """Constants psi_i reproducing H_n(1_k) = sum_i psi_i V_i(1_k x 1_k) for every k.

    The system is triangular in the componentwise order, so it is solved by back
    substitution from the largest index down.
    """
    M = _max_gamma(ps)
    b, s = ps.b, ps.s

    def vol1(i: int, k: int) -> Fraction:
        if i < k:
            return Fraction(0)
        return Fraction(b - 1, b ** (i - k + 1)) / b ** (2 * k)

    grid = sorted(itertools.product(range(M + 1), repeat=s), key=lambda v: -sum(v))
    psi: dict[tuple[int, ...], Fraction] = {}
    for k in grid:
        rhs = H_elementary(k, ps)
        for i, val in psi.items():
            if val and all(a >= c for a, c in zip(i, k)):
                rhs -= val * math.prod((vol1(a, c) for a, c in zip(i, k)), start=Fraction(1))
        diag = math.prod((vol1(c, c) for c in k), start=Fraction(1))
        psi[k] = rhs / diag
    return {i: v for i, v in psi.items() if v}


def pair_probability(ps: PointSet, pairs: Sequence[tuple[BoxInterval, BoxInterval] | None], psi=None) -> Fraction:
    """P(U in R_1, V in R_2) for the product region given per coordinate as (R_1j, R_2j)."""
    psi = psi_by_elimination(ps) if psi is None else psi
    vecs = []
    for p in pairs:
        if p is None:
            full = BoxInterval(Fraction(0), Fraction(1), ps.b)
            p = (full, full)
        vecs.append(volume_vector_pair(p[0], p[1]))
    return sum(
        (val * math.prod((v[ij] for v, ij in zip(vecs, i)), start=Fraction(1)) for i, val in psi.items()),
        Fraction(0),
    )


def H_psi(box: Box, ps: PointSet, psi=None) -> Fraction:
    return pair_probability(ps, [(f, f) for f in box.exact().factors], psi)


def _significant_depth(ps: PointSet) -> list[int]:
    out = []
    for j in range(ps.s):
        nz = np.nonzero(ps.digits[:, j, :].any(axis=0))[0]
        out.append(int(nz[-1]) + 1 if nz.size else 1)
    return out


def H_shift_exact(box: Box, ps: PointSet) -> Fraction:
    """Exact pair probability under a uniform digital shift of a deterministic point set.

    With q significant digits, the shifted pair is fixed by the first q shift digits up to a
    common uniform tail w in [0, b^-q), so each coordinate reduces to the length of an
    interval in w.
    """
    b, n = ps.b, ps.n
    depths = _significant_depth(ps)
    per_coord = []
    for j, f in enumerate(box.factors):
        q = depths[j]
        x = ps.digits[:, j, :q].astype(np.int64)
        shifts = np.array(list(itertools.product(range(b), repeat=q)), dtype=np.int64)
        X = prefix_ints((x[None, :, :] + shifts[:, None, :]) % b, b, q)  # (b^q, n)
        lo, hi = f.a * b**q, f.A * b**q
        den = math.lcm(lo.denominator, hi.denominator)
        L, H, X = int(lo * den), int(hi * den), X * den
        lo_w = np.maximum(np.maximum(L - X[:, :, None], L - X[:, None, :]), 0)
        hi_w = np.minimum(np.minimum(H - X[:, :, None], H - X[:, None, :]), den)
        lengths = np.maximum(hi_w - lo_w, 0).sum(axis=0)  # (n, n)
        per_coord.append((lengths.astype(object), b**q * den))
    num = np.ones((n, n), dtype=object)
    den = 1
    for lengths, d in per_coord:
        num = num * lengths
        den *= d
    np.fill_diagonal(num, 0)
    return Fraction(int(num.sum()), den * n * (n - 1))


# --- empirical paths ---------------------------------------------------------------------


def _depths_for(boxes: Sequence[Box], ps: PointSet) -> list[int]:
    """Digits per coordinate that decide membership in every box (E for endpoints that are
    not finite in base b)."""
    depths = [1] * ps.s
    for box in boxes:
        for j, f in enumerate(box.factors):
            for x in (f.a, f.A):
                p = b_depth(x, ps.b)
                depths[j] = ps.E if p is None or p > ps.E else max(depths[j], p)
    return depths


def _inside_counts(dig: np.ndarray, ps: PointSet, boxes: Sequence[Box], depths: Sequence[int]) -> np.ndarray:
    """Number of points inside each box per replicate: shape (R, len(boxes))."""
    N = [prefix_ints(dig[:, :, j, :], ps.b, q) for j, q in enumerate(depths)]  # s arrays (R, n)
    out = np.empty((dig.shape[0], len(boxes)), dtype=np.int64)
    for col, box in enumerate(boxes):
        inside = np.ones(dig.shape[:2], dtype=bool)
        for j, f in enumerate(box.factors):
            scale = ps.b ** depths[j]
            lo, hi = math.ceil(f.a * scale), math.ceil(f.A * scale)
            inside &= (N[j] >= lo) & (N[j] < hi)
        out[:, col] = inside.sum(axis=1)
    return out


def replicate_counts(ps: PointSet, boxes: Sequence[Box], randomizer: str, R: int, seed: int) -> np.ndarray:
    """Points inside each box for replicates 0..R-1, shape (R, len(boxes))."""
    depths = _depths_for(boxes, ps)
    chunks = replicate_chunks(ps, randomizer, R, depths)

    def work(reps):
        dig = randomize_chunk(ps, randomizer, seed, reps, max(depths), coord_depths=depths)
        return _inside_counts(dig, ps, boxes, depths)

    threads = max_threads()
    if threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(work, chunks))
    else:
        parts = [work(c) for c in chunks]
    return np.concatenate(parts, axis=0)


def H_empirical(box: Box, ps: PointSet, randomizer: str = "scramble", R: int = 1000, seed: int = 0) -> PairProbability:
    if R < 2:
        raise ValueError("need at least two replicates")
    N = replicate_counts(ps, [box], randomizer, R, seed)[:, 0].astype(np.float64)
    vals = (N * N - N) / (ps.n * (ps.n - 1))
    return PairProbability(None, float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(R)), R)


# --- index over a family ------------------------------------------------------------------


def random_boxes(b: int, s: int, p: int, count: int, seed: int = 0) -> list[Box]:
    """Boxes whose endpoints are uniform depth-p grid points (distinct per coordinate)."""
    rng = np.random.default_rng(seed)
    top = b**p
    out = []
    for _ in range(count):
        bounds = []
        for _ in range(s):
            lo, hi = sorted(int(x) for x in rng.choice(top + 1, size=2, replace=False))
            bounds.append((Fraction(lo, top), Fraction(hi, top)))
        out.append(Box.from_bounds(bounds, b))
    return out


@dataclass(frozen=True)
class IndexReport:
    boxes: tuple[Box, ...]
    gaps: tuple  # Fraction in exact mode, float otherwise
    values: tuple
    ses: tuple | None = None

    @property
    def max_gap(self):
        return max(self.gaps)

    @property
    def argmax(self) -> int:
        return max(range(len(self.gaps)), key=lambda i: self.gaps[i])


def pairwise_index(
    ps: PointSet,
    family: Sequence[Box],
    mode: str = "exact",
    randomizer: str = "scramble",
    R: int = 1000,
    seed: int = 0,
) -> IndexReport:
    if not family:
        raise EmptyFamily("the box family is empty")
    family = tuple(family)
    if mode == "exact":
        if randomizer == "scramble":
            vals = tuple(H_unanchored(box, ps) for box in family)
        else:
            vals = tuple(H_shift_exact(box, ps) for box in family)
        gaps = tuple(v - box.volume**2 for v, box in zip(vals, family))
        return IndexReport(family, gaps, vals)
    N = replicate_counts(ps, family, randomizer, R, seed).astype(np.float64)
    pairs = (N * N - N) / (ps.n * (ps.n - 1))
    means = pairs.mean(axis=0)
    ses = pairs.std(axis=0, ddof=1) / math.sqrt(R)
    gaps = tuple(float(m - float(box.volume) ** 2) for m, box in zip(means, family))
    return IndexReport(family, gaps, tuple(float(x) for x in means), tuple(float(x) for x in ses))


# --- variance -----------------------------------------------------------------------------


@dataclass(frozen=True)
class VarianceReport:
    mu: Fraction
    H: Fraction
    var_exact: Fraction
    mc_bound: Fraction
    pair_term: Fraction
    var_emp: float | None = None
    var_emp_se: float | None = None
    R: int | None = None
    means: np.ndarray | None = field(default=None, repr=False)

    @property
    def beats_mc(self) -> bool:
        return self.var_exact <= self.mc_bound


def variance_identity(mu: Fraction, H: Fraction, n: int) -> tuple[Fraction, Fraction, Fraction]:
    mc = mu * (1 - mu) / n
    pair = (H - mu * mu) * (n - 1) / n
    return mc + pair, mc, pair


def variance_compare(
    box: Box, ps: PointSet, randomizer: str = "scramble", R: int = 0, seed: int = 0, H: Fraction | None = None
) -> VarianceReport:
    mu = box.volume
    if H is None:
        H = H_unanchored(box, ps) if randomizer == "scramble" else H_shift_exact(box, ps)
    var, mc, pair = variance_identity(mu, H, ps.n)
    if R < 2:
        return VarianceReport(mu, H, var, mc, pair)
    means = replicate_counts(ps, [box], randomizer, R, seed)[:, 0] / ps.n
    return VarianceReport(mu, H, var, mc, pair, *empirical_variance(means), R, means)


def empirical_variance(means: np.ndarray) -> tuple[float, float]:
    """Unbiased sample variance and a standard error from the squared deviations."""
    R = len(means)
    dev2 = (means - means.mean()) ** 2
    var = dev2.sum() / (R - 1)
    return float(var), float(dev2.std(ddof=1) / math.sqrt(R) * R / (R - 1))


# --- the two-dimensional digital-shift counterexample ----------------------------------------

SHIFT_EXAMPLE_B = 5


def shift_example_points(E: int = 12) -> PointSet:
    vals = []
    for i in range(5):
        vals.append((Fraction(i, 5), Fraction(i, 5)))
        vals.append((Fraction(i, 5), Fraction((i + 1) % 5, 5)))
    return point_set_from_values(vals, SHIFT_EXAMPLE_B, E)


def shift_example_box() -> Box:
    return Box.from_bounds([(0, Fraction(1, 10)), (0, Fraction(2, 5))], SHIFT_EXAMPLE_B)


@dataclass(frozen=True)
class ShiftExample:
    h_shift: Fraction
    h_conditioning: Fraction
    vol2: Fraction
    C_b: dict

    @property
    def positive_index(self) -> bool:
        return self.h_shift > self.vol2


def shift_example(kmax: int = 2, E: int = 12) -> ShiftExample:
    """Exact shifted pair probability for ten points in base 5, with the C_b table.

    h_conditioning follows the direct argument: a pair can only fall in the box when both
    points share their first coordinate (5 of the 45 pairs), the shared first coordinate
    lands in [0, 1/10) with probability 1/2 given a first digit of 0, which itself has
    probability 1/5, and the second coordinates then both fall in [0, 2/5) with probability
    1/5.
    """
    ps = shift_example_points(E)
    box = shift_example_box()
    h = H_shift_exact(box, ps)
    h_cond = Fraction(5, 45) * Fraction(1, 5) * Fraction(1, 2) * Fraction(1, 5)
    table = {k: counting.C_b(k, ps) for k in itertools.product(range(kmax + 1), repeat=2)}
    return ShiftExample(h, h_cond, box.volume**2, table)
