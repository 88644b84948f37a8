"""Counting numbers of a point set: brute force over common-digit counts, plus net closed forms.

Subsets J, I are sets of 0-based coordinate indices.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
import weakref
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import InsufficientDigits
from .gfnet import PointSet

GAMMA_INF = 1 << 30  # sentinel for identical coordinates


def gamma_matrix(ps: PointSet) -> np.ndarray:
    """gamma_b between every pair of points, per coordinate: shape (n, n, s)."""
    dig = ps.digits
    out = np.empty((ps.n, ps.n, ps.s), dtype=np.int64)
    for i in range(ps.n):
        diff = dig[i][None, :, :] != dig  # (n, s, E)
        first = np.argmax(diff, axis=-1)
        out[i] = np.where(diff.any(axis=-1), first, GAMMA_INF)
    return out


class CountTable:
    """Cached common-digit data for one point set."""

    def __init__(self, ps: PointSet):
        self.ps = ps
        self.gammas = gamma_matrix(ps)
        self._cache: dict = {}

    def others(self, ref: int) -> np.ndarray:
        mask = np.arange(self.ps.n) != ref
        return self.gammas[ref][mask]

    def count(self, low: Sequence[int], exact: Sequence[bool], ref: int = 0) -> int:
        """Points l != ref with gamma_j >= low_j (or gamma_j == low_j where exact_j)."""
        key = (tuple(low), tuple(exact), ref)
        hit = self._cache.get(key)
        if hit is None:
            g = self.others(ref)
            low_a = np.asarray(low)
            ex = np.asarray(exact, dtype=bool)
            ok = np.where(ex, g == low_a, g >= low_a)
            hit = int(ok.all(axis=1).sum())
            self._cache[key] = hit
        return hit

    def count_batch(self, lows: np.ndarray, exact: np.ndarray, ref: int = 0) -> np.ndarray:
        """Vectorised count over a batch of threshold rows (shape (G, s))."""
        g = self.others(ref)[None, :, :]
        lo = lows[:, None, :]
        ok = np.where(exact[None, None, :], g == lo, g >= lo)
        return ok.all(axis=2).sum(axis=1)


_tables: "weakref.WeakKeyDictionary[PointSet, CountTable]" = weakref.WeakKeyDictionary()


def count_table(ps: PointSet) -> CountTable:
    tab = _tables.get(ps)
    if tab is None:
        tab = CountTable(ps)
        _tables[ps] = tab
    return tab


def _check(ps: PointSet, thresholds: Sequence[int]) -> None:
    if len(thresholds) != ps.s:
        raise ValueError(f"index vector {tuple(thresholds)} has length {len(thresholds)}, expected {ps.s}")
    top = max(thresholds, default=0)
    if not ps.deterministic and top > ps.E:
        raise InsufficientDigits(f"threshold {top} exceeds the {ps.E} stored digits of a randomized set")


def _thresholds(k, d, c: int, J, I) -> tuple[list[int], list[bool]]:
    low, exact = [], []
    for j in range(len(k)):
        if j in I:
            low.append(k[j] + d[j] + c)
            exact.append(False)
        elif j in J:
            low.append(d[j])
            exact.append(True)
        else:
            low.append(k[j])
            exact.append(False)
    return low, exact


def m_b(k: Sequence[int], ps: PointSet, ref: int = 0) -> int:
    _check(ps, k)
    return count_table(ps).count(tuple(k), (False,) * ps.s, ref)


def m_b_all_refs(k: Sequence[int], ps: PointSet) -> list[int]:
    return [m_b(k, ps, ref) for ref in range(ps.n)]


def m_b_general(k, d, c: int, J, I, ps: PointSet, ref: int = 0) -> int:
    """Points agreeing with the reference to >= k+d+c digits on I, >= k on J^c, exactly d on J minus I."""
    J, I = frozenset(J), frozenset(I)
    if not I <= J:
        raise ValueError("I must be a subset of J")
    low, exact = _thresholds(k, d, c, J, I)
    _check(ps, low)
    return count_table(ps).count(low, exact, ref)


def n_b(i: Sequence[int], ps: PointSet, ref: int = 0) -> int:
    """Points whose common-digit vector with the reference is exactly i (inclusion-exclusion)."""
    total = 0
    for e in itertools.product((0, 1), repeat=len(i)):
        total += (-1) ** sum(e) * m_b([a + x for a, x in zip(i, e)], ps, ref)
    return total


def C_b(k: Sequence[int], ps: PointSet) -> Fraction:
    return Fraction(ps.b ** sum(k) * m_b(k, ps), ps.n - 1)


def _restricted(v: Sequence[int], S: Iterable[int]) -> int:
    return sum(v[j] for j in S)


def _psi_exponent(k, d, J, I, s: int) -> int:
    Istar = set(I) | (set(range(s)) - set(J))
    return _restricted(k, Istar) + _restricted(d, J) + len(J) + len(I)


def psi_m(k, d, J, I, ps: PointSet) -> Fraction:
    J, I = frozenset(J), frozenset(I)
    b = ps.b
    cnt = m_b_general(k, d, 2, J, I, ps)
    return Fraction(b ** _psi_exponent(k, d, J, I, ps.s) * cnt, ps.n - 1) * Fraction(b - 1) ** (len(I) - len(J))


def subsets(S: Iterable[int]) -> list[frozenset]:
    S = sorted(S)
    return [frozenset(c) for r in range(len(S) + 1) for c in itertools.combinations(S, r)]


def m_tilde(k, d, J, ps: PointSet) -> Fraction:
    J = frozenset(J)
    total = sum((psi_m(k, d, J, I, ps) for I in subsets(J)), Fraction(0))
    return total / 2 ** len(J)


# --- closed forms for (0,m,s)-nets ------------------------------------------------------


def m_b_net(k: Sequence[int], b: int, m: int) -> int:
    return max(b ** (m - sum(k)) - 1, 0) if sum(k) <= m else 0


def m_b_general_net(k, d, c: int, J, I, b: int, m: int) -> int:
    """Exact value on a (0,m,s)-net by inclusion-exclusion over the coordinates J minus I."""
    J, I = frozenset(J), frozenset(I)
    s = len(k)
    Istar = set(I) | (set(range(s)) - J)
    T = _restricted(k, Istar) + _restricted(d, J) + c * len(I)
    L = len(J - I)
    return sum((-1) ** j * math.comb(L, j) * m_b_net_total(T + j, b, m) for j in range(L + 1))


def m_b_net_total(total: int, b: int, m: int) -> int:
    return max(b ** (m - total) - 1, 0) if total <= m else 0


@dataclass(frozen=True, slots=True)
class LemmaCase:
    case: str  # "i", "ii", "iii", "iv"
    value: int | Fraction  # exact value, or upper bound in case "ii"
    exact: bool


def mtilde_lemma_case(k, d, c: int, J, I, b: int, m: int) -> LemmaCase:
    """The four-case description of the generalised count on a (0,m,s)-net.

    Case (i) with I = J is returned as b^x - 1: the unit term only cancels when J minus I
    is nonempty.
    """
    J, I = frozenset(J), frozenset(I)
    s = len(k)
    Istar = set(I) | (set(range(s)) - J)
    T = _restricted(k, Istar) + _restricted(d, J) + c * len(I)
    L = len(J - I)
    x = m - T
    if x <= 0:
        return LemmaCase("iv", 0, True)
    if x == 1:
        return LemmaCase("iii", b - 1, True)
    if x >= L:
        if L == 0:
            return LemmaCase("i", b**x - 1, True)
        return LemmaCase("i", b ** (x - L) * (b - 1) ** L, True)
    bound = Fraction(b**x) * Fraction(b - 1, b) ** L + (math.comb(L - 1, x) if x % 2 else 0)
    return LemmaCase("ii", bound, False)


# --- reports -----------------------------------------------------------------------------


def reference_invariant(ps: PointSet, kmax: int) -> bool:
    tab = count_table(ps)
    for k in itertools.product(range(kmax + 1), repeat=ps.s):
        lows = np.asarray(k)
        g = tab.gammas
        counts = (g >= lows).all(axis=2).sum(axis=1) - 1  # drop the reference itself
        if not np.all(counts == counts[0]):
            return False
    return True


def m_tilde_grid_max(ps: PointSet, kmax_total: int, dmax_total: int, J: frozenset) -> tuple[Fraction, tuple]:
    """Largest m_tilde over all k with |k| <= kmax_total and d on J with |d|_J <= dmax_total.

    Counts are batched per subset I; the weighted sums use exact integers.
    """
    s, b, n = ps.s, ps.b, ps.n
    J = frozenset(J)
    Jl = sorted(J)
    ks = np.array([k for k in itertools.product(range(kmax_total + 1), repeat=s) if sum(k) <= kmax_total])
    dJ = [dv for dv in itertools.product(range(dmax_total + 1), repeat=len(Jl)) if sum(dv) <= dmax_total]
    ds = np.zeros((len(dJ), s), dtype=np.int64)
    for row, dv in enumerate(dJ):
        ds[row, Jl] = dv
    K = np.repeat(ks, len(ds), axis=0)
    D = np.tile(ds, (len(ks), 1))
    tab = count_table(ps)
    numer = [0] * len(K)
    dsum = D.sum(axis=1)
    for I in subsets(J):
        low = K.copy()
        exact = np.zeros(s, dtype=bool)
        for j in Jl:
            if j in I:
                low[:, j] = K[:, j] + D[:, j] + 2
            else:
                low[:, j] = D[:, j]
                exact[j] = True
        counts = tab.count_batch(low, exact)
        Istar = [j for j in range(s) if j in I or j not in J]
        ksum = K[:, Istar].sum(axis=1) if Istar else np.zeros(len(K), dtype=np.int64)
        for row in np.nonzero(counts)[0]:
            e = int(ksum[row] + dsum[row]) + len(J) + len(I)
            numer[row] += b**e * (b - 1) ** len(I) * int(counts[row])
    den = 2 ** len(J) * (n - 1) * (b - 1) ** len(J)
    best = max(range(len(K)), key=lambda r: numer[r])
    return Fraction(numer[best], den), (tuple(int(x) for x in K[best]), tuple(int(x) for x in D[best]))


CSV_COLUMNS = ("kvec", "dvec", "J", "I", "brute", "closed_form", "C_b", "psi", "m_tilde", "bound_ok")


def _fmt(x) -> str:
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator} ({float(x):.6g})"
    return str(x)


def counting_report(ps: PointSet, kmax: int | None = None, dmax: int | None = None, c: int = 2) -> list[dict]:
    """One row per (k, d, J, I) grid point with componentwise k, d <= m+2 by default."""
    m = ps.m
    kmax = (m + 2) if kmax is None else kmax
    dmax = (m + 2) if dmax is None else dmax
    rows = []
    s = ps.s
    for J in subsets(range(s)):
        Jl = sorted(J)
        for k in itertools.product(range(kmax + 1), repeat=s):
            for dv in itertools.product(range(dmax + 1), repeat=len(Jl)):
                d = [0] * s
                for j, x in zip(Jl, dv):
                    d[j] = x
                mt = m_tilde(k, d, J, ps)
                for I in subsets(J):
                    brute = m_b_general(k, d, c, J, I, ps)
                    closed = m_b_general_net(k, d, c, J, I, ps.b, m) if m is not None else ""
                    rows.append(
                        {
                            "kvec": " ".join(map(str, k)),
                            "dvec": " ".join(map(str, d)),
                            "J": " ".join(str(j + 1) for j in Jl),
                            "I": " ".join(str(j + 1) for j in sorted(I)),
                            "brute": brute,
                            "closed_form": closed,
                            "C_b": C_b(k, ps),
                            "psi": psi_m(k, d, J, I, ps),
                            "m_tilde": mt,
                            "bound_ok": mt <= 1 and (closed == "" or closed == brute),
                        }
                    )
    return rows


def report_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow({key: _fmt(row[key]) for key in CSV_COLUMNS})
    return buf.getvalue()
