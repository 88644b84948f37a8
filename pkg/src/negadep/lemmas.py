"""Machine checks of the counting and volume inequalities behind the main bound.

Every check returns a LemmaCertificate holding the number of grid points visited, the
first 100 counterexamples and the tightest margin seen. Checks are exact (integers or
Fractions) except the quadrature identity and the sampled half of the region check,
which say so in ``kind``.

Coordinates and subsets J, I, K are 0-based throughout.
"""

from __future__ import annotations

import itertools
import math
import random
from collections import Counter
from dataclasses import dataclass, field, fields, replace
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy import integrate

from . import counting
from .boxes import (
    BoxInterval,
    RegionSpec,
    elementary_interval,
    parse_unanchored,
    rational_json,
    region_volume,
    region_volume_direct,
    unanchored_halves,
    volume_vector,
    volume_vector_pair,
)
from .errors import AnchoredInterval, BadIndices
from .gfnet import PointSet, faure_net, prefix_ints, verify_tms_net
from .randomize import randomize_chunk

MAX_FAILURES = 100

DEFAULT_NETS = ((2, 2, 4), (3, 2, 3), (3, 3, 3), (5, 2, 3), (5, 4, 2))


# --- grids and certificates -------------------------------------------------------------


@dataclass(frozen=True)
class GridSpec:
    """Ranges for the certificate grids. ``k_max`` and ``net_k_max`` are componentwise."""

    bases: tuple[int, ...] = (2, 3, 5, 7, 11, 13)
    J_max: int = 6
    k_max: int = 8
    mtilde_k_max: int = 4
    g_b_max: int = 12
    q_b_max: int = 16
    r_b_max: int = 64
    net_k_max: int = 4
    c_values: tuple[int, ...] = (0, 1, 2)
    trials: int = 1000
    mode: str = "exhaustive"
    count: int = 1000
    seed: int = 0

    def __post_init__(self):
        if not self.bases or min(self.bases) < 2:
            raise ValueError("need at least one base, all >= 2")
        for name in ("J_max", "g_b_max", "q_b_max", "r_b_max", "trials", "count"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        for name in ("k_max", "mtilde_k_max", "net_k_max"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if min(self.g_b_max, self.q_b_max, self.r_b_max) < 2:
            raise ValueError("base ranges must include b = 2")
        if not self.c_values:
            raise ValueError("c_values is empty")
        if self.mode not in ("exhaustive", "random"):
            raise ValueError("mode must be 'exhaustive' or 'random'")

    @classmethod
    def quick(cls) -> "GridSpec":
        return cls(
            bases=(2, 3, 5),
            J_max=4,
            k_max=4,
            mtilde_k_max=3,
            g_b_max=7,
            q_b_max=8,
            r_b_max=16,
            net_k_max=3,
            trials=200,
        )

    @classmethod
    def parse(cls, text: str | None) -> "GridSpec":
        """'default', 'quick', or comma-separated key=value overrides (tuples use ':')."""
        if not text or text == "default":
            return cls()
        if text == "quick":
            return cls.quick()
        base, kw = cls(), {}
        types = {f.name: f.type for f in fields(cls)}
        for part in text.split(","):
            if part in ("quick", "default"):
                base = cls.quick() if part == "quick" else cls()
                continue
            key, _, val = part.partition("=")
            key = key.strip()
            if key not in types or not val:
                raise ValueError(f"bad grid entry {part!r}")
            if "tuple" in str(types[key]):
                kw[key] = tuple(int(x) for x in val.split(":"))
            elif key == "mode":
                kw[key] = val.strip()
            else:
                kw[key] = int(val)
        return replace(base, **kw)

    def to_json(self) -> dict:
        return {f.name: _jsonable(getattr(self, f.name)) for f in fields(self)}


def _jsonable(x):
    if isinstance(x, Fraction):
        return rational_json(x)
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(x)
    if isinstance(x, frozenset):
        return sorted(int(v) for v in x)
    if isinstance(x, (tuple, list)):
        return [_jsonable(v) for v in x]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    return x


@dataclass
class LemmaCertificate:
    lemma: str
    grid: dict
    kind: str = "exact"
    checked: int = 0
    failures: list = field(default_factory=list)
    failure_count: int = 0
    tightest: dict | None = None
    notes: dict = field(default_factory=dict)
    _tight_live: bool = field(default=False, repr=False)

    @property
    def passed(self) -> bool:
        return self.failure_count == 0

    def fail(self, point: dict, **detail) -> None:
        self.failure_count += 1
        if len(self.failures) < MAX_FAILURES:
            self.failures.append({"point": point, **detail})

    def margin(self, point: dict, margin, live: bool = True) -> None:
        """Track the smallest margin; margins at points where both sides vanish rank last."""
        cur = self.tightest
        if cur is None or (live and not self._tight_live) or (live == self._tight_live and margin < cur["margin"]):
            self.tightest = {"point": point, "margin": margin}
            self._tight_live = live

    def le(self, point: dict, lhs, rhs) -> bool:
        self.checked += 1
        self.margin(point, rhs - lhs, live=lhs != 0)
        if lhs > rhs:
            self.fail(point, lhs=lhs, rhs=rhs)
            return False
        return True

    def eq(self, point: dict, lhs, rhs) -> bool:
        self.checked += 1
        if lhs != rhs:
            self.fail(point, lhs=lhs, rhs=rhs)
            return False
        return True

    def bump(self, key: str, by: int = 1) -> None:
        self.notes[key] = self.notes.get(key, 0) + by

    def to_json(self) -> dict:
        return {
            "lemma": self.lemma,
            "kind": self.kind,
            "passed": self.passed,
            "grid": _jsonable(self.grid),
            "checked": self.checked,
            "failure_count": self.failure_count,
            "failures": _jsonable(self.failures),
            "tightest": _jsonable(self.tightest),
            "notes": _jsonable(self.notes),
        }


def _nets(nets) -> list[PointSet]:
    out = []
    for item in DEFAULT_NETS if nets is None else nets:
        out.append(faure_net(*item) if isinstance(item, tuple) else item)
    return out


def _net_label(ps: PointSet) -> str:
    return f"({ps.b},{ps.s},{ps.m})"


# --- the g and h functions ---------------------------------------------------------------


def h_g_eval(j: int, i: int, l: int, b) -> tuple[Fraction, Fraction]:
    """Exact (h_{j,i}(l), g_{j,i}(l)); h is the raw formula, which g only uses for odd l
    strictly between 2i+1 and i+j."""
    b = int(b)
    if not 0 <= i < j:
        raise BadIndices(f"need 0 <= i < j, got i={i}, j={j}")
    if b < 2:
        raise BadIndices("base must be at least 2")
    r = l - 2 * i
    binom = math.comb(j - i - 1, r) if r >= 0 else 0
    h = Fraction(b) ** (j + i - l) / Fraction(b - 1) ** (j - i) * binom
    if l <= 2 * i:
        g = Fraction(0)
    elif l >= i + j:
        g = Fraction(1)
    elif l == 2 * i + 1:
        g = Fraction(b, b - 1) ** (j - i - 1)
    elif l % 2 == 0:
        g = Fraction(1)
    else:
        g = 1 + h
    return h, g


@lru_cache(maxsize=None)
def _g(j: int, i: int, l: int, b: int) -> Fraction:
    return h_g_eval(j, i, l, b)[1]


def G_eval(m: int, s: int, J: Iterable[int], k: Sequence[int], d: Sequence[int], b: int) -> Fraction:
    """Sum of g_{|J|,|I|}(m - |k|_{I*} - |d|_J) over the proper subsets I of J."""
    J = frozenset(J)
    if not J:
        raise BadIndices("J must be nonempty")
    if len(k) != s or len(d) != s or not J <= frozenset(range(s)):
        raise BadIndices("k, d and J must match the dimension s")
    outside = sum(k[j] for j in range(s) if j not in J)
    dJ = sum(d[j] for j in J)
    total = Fraction(0)
    for I in counting.subsets(J):
        if I == J:
            continue
        total += _g(len(J), len(I), m - outside - sum(k[j] for j in I) - dJ, int(b))
    return total


def _g_table(b: int, j: int, lmax: int) -> np.ndarray:
    """(b-1)^j g_{j,i}(l) as exact integers, shape (j, lmax+1)."""
    scale = (b - 1) ** j
    out = np.zeros((j, lmax + 1), dtype=np.int64)
    for i in range(j):
        for l in range(lmax + 1):
            v = _g(j, i, l, b) * scale
            assert v.denominator == 1
            out[i, l] = v.numerator
    return out


# --- loose g bound and g monotonicity --------------------------------------------------------


def check_g_bound(grid: GridSpec | None = None) -> LemmaCertificate:
    """g_{j,i}(l) <= (b/(b-1))^{i+j-l} for 2i < l < i+j, all 2 <= b <= g_b_max, j <= b."""
    grid = grid or GridSpec()
    cert = LemmaCertificate("g_bound", {"b": [2, grid.g_b_max], "j": "1..b", "i": "0..j-1"})
    equal_at, other_equal = 0, 0
    for b in range(2, grid.g_b_max + 1):
        for j in range(1, b + 1):
            for i in range(j):
                for l in range(2 * i + 1, i + j):
                    g = _g(j, i, l, b)
                    bound = Fraction(b, b - 1) ** (i + j - l)
                    pt = {"b": b, "j": j, "i": i, "l": l}
                    cert.le(pt, g, bound)
                    if l == 2 * i + 1:
                        equal_at += 1
                        cert.eq(pt, g, bound)
                    elif g == bound:
                        other_equal += 1
    cert.notes["equality_points_at_2i+1"] = equal_at
    cert.notes["equalities_elsewhere"] = other_equal
    return cert


def _check_g_monotone(cert: LemmaCertificate, b_max: int) -> None:
    for b in range(2, b_max + 1):
        for j in range(1, b + 1):
            for i in range(j):
                top = i + j + 2
                for l in range(1, top + 1, 2):
                    pt = {"check": "g monotone", "b": b, "j": j, "i": i, "l": l}
                    cert.le(pt, _g(j, i, l + 1, b), _g(j, i, l, b))
                    if l > 2 * i:
                        for r in range(1, top - l + 1):
                            cert.le({**pt, "r": r}, _g(j, i, l + r, b), _g(j, i, l, b))


# --- Q bound and the two identities -------------------------------------------------------


def Q_value(b: int, k: int, s: int) -> int:
    return sum((-1) ** j * math.comb(s, j) * (b ** (k - j) - 1) for j in range(k + 1))


def Q_bound(b: int, k: int, s: int) -> Fraction:
    if k == 1:
        return Fraction(b - 1)
    base = Fraction(b) ** k * Fraction(b - 1, b) ** s
    return base if k % 2 == 0 else base + math.comb(s - 1, k)


def check_Q(grid: GridSpec | None = None) -> LemmaCertificate:
    grid = grid or GridSpec()
    cert = LemmaCertificate("Q", {"b": [2, grid.q_b_max], "s": "2..b", "k": "0..s-1"})
    for b in range(2, grid.q_b_max + 1):
        for s in range(2, b + 1):
            for k in range(s):
                q = Q_value(b, k, s)
                pt = {"b": b, "s": s, "k": k}
                cert.le(pt, Fraction(q), Q_bound(b, k, s))
                # the polynomial form used in the argument
                poly = Fraction(b) ** k * sum(
                    (math.comb(s, j) * Fraction(-1, b) ** j for j in range(k + 1)), Fraction(0)
                )
                cert.eq({**pt, "check": "polynomial form"}, Fraction(q), poly - math.comb(s - 1, k) * (-1) ** k)
                if k == 1:
                    cert.eq({**pt, "check": "k=1"}, q, b - 1)
                if k == 0:
                    cert.eq({**pt, "check": "k=0"}, q, 0)
    return cert


def ostrowski_sides(m: int, n: int, z: float) -> tuple[float, float]:
    """Both sides of the incomplete-beta form of the truncated binomial polynomial."""
    poly = sum(math.comb(n, j) * z**j for j in range(m + 1))
    lhs = poly / ((1 + z) ** n * math.comb(n, m) * (n - m))
    rhs, _ = integrate.quad(lambda u: u**m * (1 - u) ** (n - m - 1), z / (z + 1), 1, epsabs=0, epsrel=1e-13, limit=200)
    return lhs, rhs


def check_identities(n_max: int = 14, c_max: int = 40, zs: Sequence[float] = (-0.5, 0.25, 0.5, 2.0)) -> LemmaCertificate:
    cert = LemmaCertificate("identities", {"n": [3, n_max], "z": list(zs), "c": [1, c_max]}, kind="quadrature")
    worst = 0.0
    for n in range(3, n_max + 1):
        for m in range(1, n - 1):
            for z in zs:
                lhs, rhs = ostrowski_sides(m, n, z)
                rel = abs(lhs - rhs) / max(abs(lhs), abs(rhs))
                worst = max(worst, rel)
                cert.le({"identity": "truncated binomial", "m": m, "n": n, "z": z}, rel, 1e-10)
    for c in range(1, c_max + 1):
        for a in range(c):
            lhs = sum(math.comb(c, j) * (-1) ** j for j in range(a + 1))
            cert.eq({"identity": "alternating binomial", "a": a, "c": c}, lhs, math.comb(c - 1, a) * (-1) ** a)
    cert.notes["worst_relative_error"] = worst
    return cert


# --- brute-force counts on nets -----------------------------------------------------------


def _kd_rows(s: int, J: frozenset, kmax: int, rng: np.random.Generator | None, count: int):
    """All (k, d) with entries <= kmax and d supported on J; a random subset in random mode."""
    Jl = sorted(J)
    ks = np.array(list(itertools.product(range(kmax + 1), repeat=s)), dtype=np.int64)
    rows = list(itertools.product(range(kmax + 1), repeat=len(Jl)))
    dJ = np.array(rows, dtype=np.int64).reshape(len(rows), len(Jl))
    K = np.repeat(ks, len(dJ), axis=0)
    D = np.zeros_like(K)
    if Jl:
        D[:, Jl] = np.tile(dJ, (len(ks), 1))
    if rng is not None and len(K) > count:
        pick = np.sort(rng.choice(len(K), size=count, replace=False))
        K, D = K[pick], D[pick]
    return K, D


def _batch_counts(ps: PointSet, K, D, c: int, J: frozenset, I: frozenset) -> np.ndarray:
    low = K.copy()
    exact = np.zeros(ps.s, dtype=bool)
    for j in J:
        if j in I:
            low[:, j] = K[:, j] + D[:, j] + c
        else:
            low[:, j] = D[:, j]
            exact[j] = True
    return counting.count_table(ps).count_batch(low, exact)


def _point(ps, k, d, J, I, **extra) -> dict:
    return {"net": _net_label(ps), "k": tuple(int(x) for x in k), "d": tuple(int(x) for x in d), "J": J, "I": I, **extra}


def _rng(grid: GridSpec):
    return np.random.default_rng(grid.seed) if grid.mode == "random" else None


def check_Mtilde(nets=None, grid: GridSpec | None = None) -> LemmaCertificate:
    """Brute-force generalised counts against the inclusion-exclusion closed form and the
    four-case description (cases i, iii, iv exact, case ii as a bound)."""
    grid = grid or GridSpec()
    nets = _nets(nets)
    cert = LemmaCertificate(
        "Mtilde",
        {"nets": [_net_label(p) for p in nets], "kd_max": f"min({grid.net_k_max}, m+2)", "c": list(grid.c_values)},
    )
    rng = _rng(grid)
    for ps in nets:
        b, m, s = ps.b, ps.m, ps.s
        kmax = min(grid.net_k_max, m + 2)
        for J in counting.subsets(range(s)):
            K, D = _kd_rows(s, J, kmax, rng, grid.count)
            for I in counting.subsets(J):
                Istar = [j for j in range(s) if j in I or j not in J]
                base_T = (K[:, Istar].sum(axis=1) if Istar else 0) + D[:, sorted(J)].sum(axis=1)
                L = len(J - I)
                for c in grid.c_values:
                    cnt = _batch_counts(ps, K, D, c, J, I)
                    x = m - (base_T + c * len(I))
                    closed = np.zeros(len(K), dtype=np.int64)
                    for t in range(L + 1):
                        e = x - t
                        closed += (-1) ** t * math.comb(L, t) * np.where(e >= 0, b ** np.clip(e, 0, None) - 1, 0)
                    _flag(cert, ps, K, D, J, I, cnt != closed, cnt, closed, check="closed form", c=c)
                    cert.checked += len(K)

                    # four cases
                    xs = np.clip(x, 0, None)
                    case_iv = x <= 0
                    case_iii = x == 1
                    case_i = (x >= L) & (x > 1)
                    case_ii = (x > 1) & (x < L)
                    if L == 0:
                        expect_i = b**xs - 1
                    else:
                        expect_i = b ** np.clip(x - L, 0, None) * (b - 1) ** L
                    _flag(cert, ps, K, D, J, I, case_iv & (cnt != 0), cnt, 0, check="case iv", c=c)
                    _flag(cert, ps, K, D, J, I, case_iii & (cnt != b - 1), cnt, b - 1, check="case iii", c=c)
                    _flag(cert, ps, K, D, J, I, case_i & (cnt != expect_i), cnt, expect_i, check="case i", c=c)
                    if L == 0:
                        cert.bump("case_i_rows_with_I_equal_J", int(case_i.sum()))
                    # case ii: cnt * b^L <= b^x (b-1)^L + b^L C(L-1, x) [x odd]
                    rows = np.nonzero(case_ii)[0]
                    for r in rows:
                        xv = int(x[r])
                        bound = Fraction(b**xv * (b - 1) ** L, b**L) + (math.comb(L - 1, xv) if xv % 2 else 0)
                        pt = _point(ps, K[r], D[r], J, I, check="case ii", c=c)
                        cert.le(pt, Fraction(int(cnt[r])), bound)
                    cert.checked += 3 * len(K)
                    cert.bump("case_ii_points", len(rows))
    return cert


def _flag(cert, ps, K, D, J, I, bad, got, want, **extra) -> None:
    for r in np.nonzero(bad)[0]:
        w = want[r] if isinstance(want, np.ndarray) else want
        cert.fail(_point(ps, K[r], D[r], J, I, **extra), lhs=int(got[r]), rhs=int(w))


def check_psi_bound(nets=None, grid: GridSpec | None = None) -> LemmaCertificate:
    """psi_m(k,d,J,I) <= b^m/(b^m-1) g_{|J|,|I|}(x) for proper I, x = m - |k|_{I*} - |d|_J,
    with the power form when 2|I| < x < |J|+|I| and equality at x = 2|I|+1."""
    grid = grid or GridSpec()
    nets = _nets(nets) if nets is not None else [faure_net(3, 3, 3)] + _nets(None)
    cert = LemmaCertificate("psi_bound", {"nets": [_net_label(p) for p in nets], "kd_max": f"min({grid.net_k_max}, m+2)"})
    rng = _rng(grid)
    seen = set()
    for ps in nets:
        if _net_label(ps) in seen:
            continue
        seen.add(_net_label(ps))
        b, m, s = ps.b, ps.m, ps.s
        n1 = ps.n - 1
        factor = Fraction(b**m, b**m - 1)
        kmax = min(grid.net_k_max, m + 2)
        for J in counting.subsets(range(s)):
            if not J:
                continue
            K, D = _kd_rows(s, J, kmax, rng, grid.count)
            for I in counting.subsets(J):
                cnt = _batch_counts(ps, K, D, 2, J, I)
                Istar = [j for j in range(s) if j in I or j not in J]
                x = m - (K[:, Istar].sum(axis=1) if Istar else 0) - D[:, sorted(J)].sum(axis=1)
                i, j = len(I), len(J)
                zero = cnt == 0
                cert.checked += int(zero.sum())  # psi = 0 sits below any non-negative bound
                for r in np.nonzero(~zero)[0]:
                    xv = int(x[r])
                    e = m - xv + j + i
                    psi = Fraction(b**e * int(cnt[r]), n1) * Fraction(b - 1) ** (i - j)
                    pt = _point(ps, K[r], D[r], J, I, x=xv)
                    if I == J:
                        cert.le({**pt, "check": "I = J"}, psi, Fraction(1))
                        continue
                    bound = factor * _g(j, i, xv, b)
                    cert.le(pt, psi, bound)
                    if 2 * i < xv < j + i:
                        cert.le({**pt, "check": "power form"}, psi, factor * Fraction(b - 1, b) ** (xv - i - j))
                    if xv == 2 * i + 1:
                        cert.eq({**pt, "check": "equality at 2|I|+1"}, psi, bound)
                        cert.bump("equality_points")
    return cert


# --- G function sweeps --------------------------------------------------------------------


def full_J_G_formula(m: int, s: int, b: int, printed_exponent: bool = False) -> Fraction:
    """Closed form of G(m, s, J, 0, 0) for |J| = s and odd m.

    ``printed_exponent`` swaps the (b-1)^{s-j} denominator of h_{s,j}(m) for (b-1)^{s-m}.
    """
    total = Fraction(0)
    for j in range(0, (m - 3) // 2 + 1):
        total += math.comb(s, j)
    for j in range(max(0, m - s + 1), (m - 3) // 2 + 1):
        den = Fraction(b - 1) ** ((s - m) if printed_exponent else (s - j))
        total += math.comb(s, j) * math.comb(s - j - 1, m - 2 * j) * Fraction(b) ** (s + j - m) / den
    half = (m - 1) // 2
    return total + math.comb(s, half) * Fraction(b, b - 1) ** (s - half - 1)


def R_value(b: int, s: int) -> Fraction:
    top = s // 2 - 1
    return sum((math.comb(s, j) * Fraction(b, b - 1) ** (s - j) for j in range(top + 1)), Fraction(0)) / 2**s


def small_m_bound(b: int, j: int) -> Fraction:
    """((b-1)/b) sum_{i < floor(j/2)} C(j,i) (b/(b-1))^{j-i}, which R(b,j) <= 1 caps by 2^j (b-1)/b."""
    return Fraction(b - 1, b) * sum(
        (math.comb(j, i) * Fraction(b, b - 1) ** (j - i) for i in range(j // 2)), Fraction(0)
    )


def _multisets(j: int, kmax: int, rng, count: int) -> np.ndarray:
    ms = np.array(list(itertools.combinations_with_replacement(range(kmax + 1), j)), dtype=np.int64)
    if rng is not None and len(ms) > count:
        keep = rng.choice(len(ms), size=count, replace=False)
        ms = ms[np.sort(np.concatenate([[0], keep]))]
        ms = np.unique(ms, axis=0)
    return ms


def G_table(b: int, j: int, KJ: np.ndarray, mp_max: int) -> np.ndarray:
    """(b-1)^j G(m', k_J) for every row of KJ and 0 <= m' <= mp_max, as exact int64.

    G depends on k only through its entries on J and on m through m' = m - |k|_{J^c}.
    """
    masks = np.array([mk for mk in itertools.product((0, 1), repeat=j) if sum(mk) < j], dtype=np.int64)
    sizes = masks.sum(axis=1)
    gt = _g_table(b, j, mp_max)
    mp = np.arange(mp_max + 1)
    out = np.zeros((len(KJ), mp_max + 1), dtype=np.int64)
    for lo in range(0, len(KJ), 256):
        sums = KJ[lo : lo + 256] @ masks.T  # (B, S)
        idx = mp[None, None, :] - sums[:, :, None]
        vals = np.where(idx >= 0, gt[sizes[None, :, None], np.clip(idx, 0, None)], 0)
        out[lo : lo + 256] = vals.sum(axis=1)
    return out


def check_G_propositions(grid: GridSpec | None = None) -> LemmaCertificate:
    grid = grid or GridSpec()
    cert = LemmaCertificate(
        "G_propositions",
        {
            "bases": list(grid.bases),
            "J_max": grid.J_max,
            "k_max": grid.k_max,
            "mtilde_k_max": grid.mtilde_k_max,
            "m": "m' = m - |k|_{J^c} in 0..2|J|+|k_J|+2",
            "R_b_max": grid.r_b_max,
            "mode": grid.mode,
        },
    )
    rng = _rng(grid)
    printed = {"checked": 0, "violations": 0, "first": None}
    for b in grid.bases:
        for j in range(1, min(b, grid.J_max) + 1):
            _sweep_G(cert, printed, b, j, grid, rng)
            _sweep_mtilde(cert, b, j, grid, rng)
    cert.notes["small_m_printed_bound"] = printed
    _check_d_reduction(cert, grid)
    _check_full_J_formula(cert, grid)
    _check_g_monotone(cert, min(grid.g_b_max, 12))
    for b in range(2, grid.r_b_max + 1):
        for s in range(2, b + 1):
            cert.le({"check": "R(b,s) <= 1", "b": b, "s": s}, R_value(b, s), Fraction(1))
        cert.eq({"check": "R(b,2)", "b": b}, R_value(b, 2), Fraction(1, 4) * Fraction(b, b - 1) ** 2)
        if b >= 3:
            cert.eq({"check": "R(b,3)", "b": b}, R_value(b, 3), Fraction(1, 8) * Fraction(b, b - 1) ** 3)
    return cert


def _sweep_G(cert: LemmaCertificate, printed: dict, b: int, j: int, grid: GridSpec, rng) -> None:
    scale = (b - 1) ** j
    KJ = _multisets(j, grid.k_max, rng, grid.count)
    mp_max = 2 * j + grid.k_max * j + 2
    G = G_table(b, j, KJ, mp_max)
    k0max = grid.k_max * (min(b, grid.J_max) - j)  # |k| outside J for the largest s
    top = (2**j - 1) * scale
    G0 = G[0]
    assert not KJ[0].any()

    # k = 0
    cert.eq({"check": "G(2|J|-1) = 2^|J|-1", "b": b, "J": j}, int(G0[2 * j - 1]), top)
    for mp in range(0, 2 * j + 3):
        cert.le({"check": "k = 0 bound", "b": b, "J": j, "m": mp}, Fraction(int(G0[mp]), scale), Fraction(2**j - 1))
    best_odd = max(int(G0[t]) for t in range(1, 2 * j, 2))
    best_at = max(range(1, 2 * j, 2), key=lambda t: int(G0[t]))

    ksum = KJ.sum(axis=1)
    mp = np.arange(mp_max + 1)
    valid = mp[None, :] <= (2 * j + ksum + 2)[:, None]
    n_valid = int(valid.sum())

    # some odd m~ <= 2|J|-1 with G(m~, 0) >= G(m', k)
    bad = valid & (G > best_odd)
    cert.checked += n_valid
    for r, c in zip(*np.nonzero(bad)):
        cert.fail({"check": "odd witness", "b": b, "J": j, "k_J": KJ[r], "m": int(c)}, lhs=Fraction(int(G[r, c]), scale), rhs=Fraction(best_odd, scale))
    slack = np.where(valid, best_odd - G, np.iinfo(np.int64).max)
    r, c = np.unravel_index(np.argmin(slack), slack.shape)
    cert.margin({"check": "odd witness", "b": b, "J": j, "k_J": KJ[r], "m": int(c), "witness": best_at}, Fraction(int(slack[r, c]), scale))

    # middle range: |J| <= m < |k| + 2|J|, i.e. m' < |k_J| + 2|J| and m' + |k|_{J^c} >= |J|
    inB = valid & (mp[None, :] < (ksum + 2 * j)[:, None]) & (mp[None, :] + k0max >= j)
    _bound_block(cert, "middle_m", G, inB, top, scale, b, j, KJ)

    # small m: m < |J| with d = 0, so m' < |J|
    small = valid & (mp[None, :] < j)
    pb = small_m_bound(b, j) * scale
    assert pb.denominator == 1
    _bound_block(cert, "small_m", G, small, int(pb), scale, b, j, KJ)
    # printed form (b-1)/b, tallied separately
    viol = small & (G * b > (b - 1) ** (j + 1))
    printed["checked"] += int(small.sum())
    printed["violations"] += int(viol.sum())
    if viol.any() and printed["first"] is None:
        r, c = np.argwhere(viol)[0]
        printed["first"] = {"b": b, "J": j, "k_J": [int(x) for x in KJ[r]], "m": int(c), "G": Fraction(int(G[r, c]), scale), "bound": Fraction(b - 1, b)}

    # the vectorised table agrees with the direct sum on a few rows
    pick = random.Random(b * 100 + j)
    for _ in range(5):
        r = pick.randrange(len(KJ))
        c = pick.randrange(int(2 * j + ksum[r] + 2) + 1)
        k = tuple(int(x) for x in KJ[r])
        cert.eq({"check": "table", "b": b, "J": j, "k_J": k, "m": c}, Fraction(int(G[r, c]), scale), G_eval(c, j, range(j), k, (0,) * j, b))


def _bound_block(cert, label, G, mask, bound_scaled, scale, b, j, KJ) -> None:
    cert.checked += int(mask.sum())
    cert.bump(f"{label}_points", int(mask.sum()))
    bad = mask & (G > bound_scaled)
    for r, c in zip(*np.nonzero(bad)):
        cert.fail({"check": label, "b": b, "J": j, "k_J": KJ[r], "m": int(c)}, lhs=Fraction(int(G[r, c]), scale), rhs=Fraction(bound_scaled, scale))
    if mask.any():
        slack = np.where(mask, bound_scaled - G, np.iinfo(np.int64).max)
        r, c = np.unravel_index(np.argmin(slack), slack.shape)
        cert.margin({"check": label, "b": b, "J": j, "k_J": KJ[r], "m": int(c)}, Fraction(int(slack[r, c]), scale))


@lru_cache(maxsize=None)
def _net_count(y: int, L: int, b: int) -> int:
    """Generalised count on a (0,m,s)-net with m - T = y and |J minus I| = L."""
    return sum((-1) ** t * math.comb(L, t) * (b ** (y - t) - 1) for t in range(L + 1) if y - t >= 0)


def mtilde_closed(x: int, k_J: Sequence[int], b: int, m: int | None = None) -> Fraction:
    """m-tilde of a (0,m,s)-net with |J| = len(k_J), from the closed-form counts.

    It depends on m, |k|_{J^c} and |d|_J only through x = m - |k|_{J^c} - |d|_J and the
    factor b^m/(b^m-1); m defaults to x.
    """
    m = x if m is None else m
    j = len(k_J)
    groups = Counter((len(I), sum(k_J[t] for t in I)) for I in counting.subsets(range(j)))
    F = 0
    for (i, w), mult in groups.items():
        y = x - w - 2 * i
        if y > 0:
            F += mult * b ** (w + j + i) * (b - 1) ** i * _net_count(y, j - i, b)
    return Fraction(b ** (m - x) * F, 2**j * (b - 1) ** j * (b**m - 1))


def _sweep_mtilde(cert: LemmaCertificate, b: int, j: int, grid: GridSpec, rng) -> None:
    KJ = _multisets(j, grid.mtilde_k_max, rng, grid.count)
    for row in KJ:
        k = tuple(int(v) for v in row)
        ks = sum(k)
        for x in range(1, 2 * j + ks + 3):
            mt = mtilde_closed(x, k, b)
            regime = "large_m" if x >= ks + 2 * j else ("small_m" if x < j else "middle_m")
            pt = {"check": f"m_tilde <= 1 ({regime})", "b": b, "J": j, "k_J": k, "m": x}
            cert.le(pt, mt, Fraction(1))
            cert.bump(f"m_tilde_{regime}_points")
            if regime == "large_m":
                bound = Fraction(b**x, b**x - 1) * (1 - Fraction(b) ** (ks + 2 * j - x) / 2**j)
                cert.le({**pt, "check": "large-m bound"}, mt, bound)


def _check_d_reduction(cert: LemmaCertificate, grid: GridSpec) -> None:
    rnd = random.Random(grid.seed + 17)
    for _ in range(min(grid.trials, 400)):
        b = rnd.choice(grid.bases)
        s = rnd.randint(1, min(b, grid.J_max))
        J = frozenset(t for t in range(s) if rnd.random() < 0.6) or frozenset({0})
        k = tuple(rnd.randint(0, 3) for _ in range(s))
        d = tuple(rnd.randint(0, 3) if t in J else 0 for t in range(s))
        dsum = sum(d)
        m = rnd.randint(0, 2 * len(J) + sum(k) + dsum + 2)
        lhs = G_eval(m, s, J, k, d, b)
        rhs = G_eval(m - dsum, s, J, k, (0,) * s, b) if m >= dsum else Fraction(0)
        cert.eq({"check": "d-reduction", "b": b, "J": J, "k": k, "d": d, "m": m}, lhs, rhs)


def _check_full_J_formula(cert: LemmaCertificate, grid: GridSpec) -> None:
    mismatched = 0
    for b in grid.bases:
        for s in range(3, min(b, grid.J_max) + 1):
            vals = {}
            for m in range(1, 2 * s - 2, 2):
                vals[m] = full_J_G_formula(m, s, b)
                direct = G_eval(m, s, range(s), (0,) * s, (0,) * s, b)
                cert.eq({"check": "full-J formula", "b": b, "s": s, "m": m}, vals[m], direct)
                if full_J_G_formula(m, s, b, printed_exponent=True) != direct:
                    mismatched += 1
            for m in range(3, 2 * s - 2, 2):
                cert.le({"check": "full-J odd m increasing", "b": b, "s": s, "m": m}, vals[m - 2], vals[m])
    cert.notes["full_J_formula_printed_exponent_mismatches"] = mismatched


# --- weighted sums ------------------------------------------------------------------------


def staircase(w: int, l: int) -> np.ndarray:
    return np.array([[i + j <= l - 1 for j in range(l)] for i in range(w)])  # 0-based i + j <= l - 1


def admissible_A(A: Sequence[Sequence[Fraction]]) -> bool:
    w, l = len(A), len(A[0])
    if any(a < 0 for row in A for a in row):
        return False
    if any(sum(A[i][j] for i in range(w)) != 1 for j in range(l)):
        return False
    for i in range(w):
        cum = [sum(A[t][j] for t in range(i + 1)) for j in range(l)]
        if any(cum[j] < cum[j + 1] for j in range(l - 1)):
            return False
    return True


def admissible_X(X: Sequence[Sequence[Fraction]]) -> bool:
    w, l = len(X), len(X[0])
    if l < w:
        return False
    mask = staircase(w, l)
    for i in range(w):
        for j in range(l):
            if (X[i][j] > 0) != bool(mask[i, j]) or X[i][j] < 0:
                return False
    sums = [sum(X[i]) for i in range(w)]
    if any(sums[i] < sums[i + 1] for i in range(w - 1)):
        return False
    for j in range(l):
        top = min(w, l - j)
        if any(X[i][j] > X[i + 1][j] for i in range(top - 1)):
            return False
    return True


def random_weight_matrix(w: int, l: int, rnd: random.Random) -> list[list[Fraction]]:
    """Random column distributions whose cumulative sums are then sorted along each row.

    Sorting each row of the cumulative matrix in decreasing order keeps every column
    non-decreasing downwards (order statistics of dominated rows), so the differences
    are valid weights with decreasing cumulative sums.
    """
    cols = []
    for _ in range(l):
        raw = [rnd.randint(0, 6) if rnd.random() < 0.7 else 0 for _ in range(w)]
        if not any(raw):
            raw[rnd.randrange(w)] = 1
        tot = sum(raw)
        cum, acc = [], 0
        for r in raw:
            acc += r
            cum.append(Fraction(acc, tot))
        cols.append(cum)
    rows = [sorted((cols[j][i] for j in range(l)), reverse=True) for i in range(w)]
    return [[rows[i][j] - (rows[i - 1][j] if i else 0) for j in range(l)] for i in range(w)]


def random_staircase_matrix(w: int, l: int, rnd: random.Random) -> list[list[Fraction]]:
    """Columns built from non-negative increments; increments of row i+1 are scaled down
    so its row sum never exceeds the row above."""
    X = [[Fraction(0)] * l for _ in range(w)]
    for j in range(l):
        X[0][j] = Fraction(rnd.randint(1, 20))
    for i in range(1, w):
        width = l - i
        inc = [Fraction(rnd.randint(0, 20)) for _ in range(width)]
        budget = X[i - 1][width]  # the entry that drops out of the support
        total = sum(inc)
        delta = min(Fraction(1), budget / total) if total else Fraction(1)
        for j in range(width):
            X[i][j] = X[i - 1][j] + delta * inc[j]
    return X


def weighted_sum(A, X) -> Fraction:
    return sum((A[i][j] * X[i][j] for i in range(len(A)) for j in range(len(A[0]))), Fraction(0))


def check_weighted_sums(trials: int = 1000, dims: tuple[int, int] = (8, 8), seed: int = 0) -> LemmaCertificate:
    wmax, lmax = dims
    cert = LemmaCertificate("weighted_sums", {"trials": trials, "w_max": wmax, "l_max": lmax, "seed": seed})
    rnd = random.Random(seed)
    for t in range(trials):
        w = rnd.randint(2, wmax)
        l = rnd.randint(w, max(w, lmax))
        A, X = random_weight_matrix(w, l, rnd), random_staircase_matrix(w, l, rnd)
        pt = {"trial": t, "w": w, "l": l}
        if not (admissible_A(A) and admissible_X(X)):
            cert.fail({**pt, "check": "generator"}, lhs="inadmissible", rhs="admissible")
            continue
        cert.le(pt, weighted_sum(A, X), sum(X[0], Fraction(0)))
        top = [[Fraction(1 if i == 0 else 0)] * l for i in range(w)]
        cert.eq({**pt, "check": "first-row weights"}, weighted_sum(top, X), sum(X[0], Fraction(0)))
    return cert


# --- volume lemma -------------------------------------------------------------------------


def random_unanchored(b: int, rnd: random.Random, max_depth: int = 6) -> BoxInterval:
    while True:
        p = rnd.randint(1, max_depth)
        a, A = sorted(rnd.sample(range(b**p + 1), 2))
        iv = BoxInterval(Fraction(a, b**p), Fraction(A, b**p), b)
        try:
            parse_unanchored(iv)
        except AnchoredInterval:
            continue
        return iv


def check_vol_lemma(trials: int = 1000, bases: Sequence[int] = (2, 3, 5), seed: int = 0) -> LemmaCertificate:
    cert = LemmaCertificate("vol", {"trials_per_base": trials, "bases": list(bases), "seed": seed})
    rnd = random.Random(seed)
    for b in bases:
        for t in range(trials):
            A = random_unanchored(b, rnd)
            form = parse_unanchored(A)
            V = volume_vector(A)
            r = form.r
            pt = {"b": b, "interval": str(A), "r": r}
            for i in range(r - 1):
                cert.eq({**pt, "check": "(i)", "i": i}, V[i], Fraction(0))
            for i in range(r, V.q + 3):
                cert.le({**pt, "check": "(ii)", "i": i}, V[i], b * V[i + 1])
            lhs = V[r - 1] - Fraction(b * (b - 2), b - 1) * V[r]
            cert.le({**pt, "check": "(iii)"}, lhs, V.tail_sum(r))
            if form.g == form.G:
                cert.eq({**pt, "check": "g = G"}, V[r - 1], 2 * form.z * form.Z)
                cert.le({**pt, "check": "g = G"}, 2 * form.z * form.Z, form.z**2 + form.Z**2)
                cert.bump("g_equals_G_cases")
    return cert


# --- regions and conditional probabilities ------------------------------------------------


def _region_grid(s: int, kmax: int):
    for k in itertools.product(range(kmax + 1), repeat=s):
        for J in counting.subsets(range(s)):
            for dJ in itertools.product(range(kmax + 1), repeat=len(J)):
                d = [0] * s
                for j, v in zip(sorted(J), dJ):
                    d[j] = v
                yield k, tuple(d), J


def _int_bounds(iv: BoxInterval, scale: int) -> tuple[int, int]:
    return int(iv.a * scale), int(iv.A * scale)


def _partition_check(cert, b: int, k, d, J, n_points: int, rng: np.random.Generator) -> None:
    """Sampled pairs in D fall in exactly one F(k,d,J,I,K); each F(I,K) lies inside D."""
    s = len(k)
    dspec = RegionSpec("D", k, d, J, b)
    depth = max(k[j] + d[j] + 2 for j in range(s)) + 2
    scale = b**depth
    dpairs = dspec.factor_pairs()
    u = np.empty((n_points, s), dtype=np.int64)
    v = np.empty((n_points, s), dtype=np.int64)
    for j, (p1, p2) in enumerate(dpairs):
        lo, hi = _int_bounds(p1, scale)
        u[:, j] = rng.integers(lo, hi, n_points)
        lo, hi = _int_bounds(p2, scale)
        v[:, j] = rng.integers(lo, hi, n_points)
    hits = np.zeros(n_points, dtype=np.int64)
    for I in counting.subsets(J):
        for K in counting.subsets(J):
            spec = RegionSpec("F", k, d, J, b, I=I, K=K)
            inside = np.ones(n_points, dtype=bool)
            for j, (p1, p2) in enumerate(spec.factor_pairs()):
                lo1, hi1 = _int_bounds(p1, scale)
                lo2, hi2 = _int_bounds(p2, scale)
                inside &= (u[:, j] >= lo1) & (u[:, j] < hi1) & (v[:, j] >= lo2) & (v[:, j] < hi2)
                q1, q2 = dpairs[j]
                if not (q1.a <= p1.a and p1.A <= q1.A and q2.a <= p2.a and p2.A <= q2.A):
                    cert.fail({"check": "F(I,K) inside D", "k": k, "d": d, "J": J, "I": I, "K": K}, lhs="outside", rhs="inside")
            hits += inside
    cert.checked += n_points
    bad = int((hits != 1).sum())
    if bad:
        cert.fail({"check": "partition", "b": b, "k": k, "d": d, "J": J}, lhs=bad, rhs=0)


def _pair_fraction(dig: np.ndarray, b: int, pairs, depth: int) -> np.ndarray:
    """Per replicate: fraction of ordered pairs of distinct points in R_1 x R_2."""
    N = prefix_ints(dig, b, depth)  # (R, n, s)
    scale = b**depth
    in1 = np.ones(N.shape[:2], dtype=bool)
    in2 = np.ones(N.shape[:2], dtype=bool)
    for j, p in enumerate(pairs):
        if p is None:
            continue
        lo, hi = _int_bounds(p[0], scale)
        in1 &= (N[:, :, j] >= lo) & (N[:, :, j] < hi)
        lo, hi = _int_bounds(p[1], scale)
        in2 &= (N[:, :, j] >= lo) & (N[:, :, j] < hi)
    n = N.shape[1]
    c1, c2, both = in1.sum(1), in2.sum(1), (in1 & in2).sum(1)
    return (c1 * c2 - both) / (n * (n - 1))


def check_volcondprob(nets=None, trials: int = 300, seed: int = 0, replicates: int = 4000, n_points: int = 100_000) -> LemmaCertificate:
    """Region volumes of D and F1, conditional probabilities of F(I), the F(I)/F(I,K)
    equality and the partition of D, and P(D)/Vol(D) = m-tilde."""
    from .dependence import pair_probability, psi_by_elimination

    nets = _nets(nets) if nets is not None else [faure_net(3, 2, 3), faure_net(3, 3, 2), faure_net(2, 2, 4)]
    cert = LemmaCertificate(
        "volcondprob",
        {"nets": [_net_label(p) for p in nets], "trials_per_net": trials, "seed": seed, "replicates": replicates, "partition_points": n_points},
        kind="exact+statistical",
    )
    rnd = random.Random(seed)
    nrng = np.random.default_rng(seed)

    for ps in nets:
        b, s = ps.b, ps.s
        psi = psi_by_elimination(ps)
        grid = list(_region_grid(s, 2))
        sample = grid if len(grid) <= trials else rnd.sample(grid, trials)
        for k, d, J in sample:
            kk, d2 = sum(k), sum(d[j] + 2 for j in J)
            base = {"net": _net_label(ps), "k": k, "d": d, "J": J}
            # parts 1 and 2
            D = RegionSpec("D", k, d, J, b)
            want_D = Fraction(2 ** (2 * len(J)), b ** (2 * (kk + d2)))
            cert.eq({**base, "check": "Vol(D)"}, region_volume(D), want_D)
            cert.eq({**base, "check": "Vol(D) direct"}, region_volume_direct(D), want_D)
            volD = want_D
            PD = pair_probability(ps, D.factor_pairs(), psi)
            cert.eq({**base, "check": "P(D)/Vol(D) = m_tilde"}, PD / volD, counting.m_tilde(k, d, J, ps))
            for I in counting.subsets(J):
                pt = {**base, "I": I}
                F1 = RegionSpec("F1", k, d, J, b, I=I)
                want_F1 = Fraction(1, b ** (kk + d2))
                cert.eq({**pt, "check": "Vol(F1)"}, region_volume(F1), want_F1)
                cert.eq({**pt, "check": "Vol(F1) direct"}, region_volume_direct(F1), want_F1)
                # part 3
                F = RegionSpec("F", k, d, J, b, I=I)
                PF = pair_probability(ps, F.factor_pairs(), psi)
                cnt = counting.m_b_general(k, d, 2, J, I, ps)
                kJI = sum(k[j] for j in J - I)
                want = Fraction(cnt, ps.n - 1) * Fraction(b - 1) ** (len(I) - len(J)) / Fraction(b) ** (kJI + len(J) - len(I))
                cert.eq({**pt, "check": "P(F | F1)"}, PF / want_F1, want)
                if I == J:
                    kt = [k[j] + d[j] + 2 if j in J else k[j] for j in range(s)]
                    cert.eq({**pt, "check": "P(F | F1), I = J"}, cnt, counting.m_b(kt, ps))
                # part 4, exact half
                for K in counting.subsets(J):
                    FK = RegionSpec("F", k, d, J, b, I=I, K=K)
                    cert.eq({**pt, "K": K, "check": "P(F(I,K)) = P(F(I))"}, pair_probability(ps, FK.factor_pairs(), psi), PF)

    # volume-vector symmetry behind the F(I,K) equality
    for b in sorted({p.b for p in nets} | {3}):
        for k in range(4):
            for d in range(4):
                y1, y2 = unanchored_halves(d, k, b)
                e = elementary_interval(k + d + 2, b)
                pt = {"check": "halves symmetry", "b": b, "k": k, "d": d}
                cert.eq({**pt, "pair": "Y1Y1 = Y2Y2"}, volume_vector_pair(y1, y1).entries(k + d + 6), volume_vector_pair(y2, y2).entries(k + d + 6))
                cert.eq({**pt, "pair": "Y1Y2 = Y2Y1"}, volume_vector_pair(y1, y2).entries(k + d + 6), volume_vector_pair(y2, y1).entries(k + d + 6))
                cert.eq({**pt, "pair": "1_(k+d+2) = Y1Y1"}, volume_vector_pair(e, e).entries(k + d + 6), volume_vector_pair(y1, y1).entries(k + d + 6))

    # partition of D, sampled
    ps = nets[0]
    for k, d, J in [((0,) * ps.s, (0,) * ps.s, frozenset(range(ps.s))), ((1,) + (0,) * (ps.s - 1), (0, 1) + (0,) * (ps.s - 2), frozenset({1}))]:
        _partition_check(cert, ps.b, k, d, J, n_points, nrng)

    # part 4, statistical half: scrambled estimates of P(F(I,K)) within 3 SE of P(F(I))
    psi = psi_by_elimination(ps)
    # with |J| = 1 the pair fraction is the same for every replicate; two coordinates vary
    k, d, J = (0,) * ps.s, (0,) * ps.s, frozenset(range(min(ps.s, 2)))
    depth = 3
    dig = randomize_chunk(ps, "scramble", seed, np.arange(replicates), depth)
    worst = 0.0
    for I in counting.subsets(J):
        exact = pair_probability(ps, RegionSpec("F", k, d, J, ps.b, I=I).factor_pairs(), psi)
        for K in counting.subsets(J):
            vals = _pair_fraction(dig, ps.b, RegionSpec("F", k, d, J, ps.b, I=I, K=K).factor_pairs(), depth)
            se = vals.std(ddof=1) / math.sqrt(replicates)
            diff = abs(vals.mean() - float(exact))
            z = diff / se if se > 1e-15 else (0.0 if diff < 1e-12 else math.inf)
            worst = max(worst, z)
            pt = {"check": "P(F(I,K)) empirical", "net": _net_label(ps), "I": I, "K": K, "estimate": float(vals.mean()), "se": float(se), "exact": exact}
            cert.le(pt, z, 3.0)
    cert.notes["F_IK_empirical_worst_z"] = worst
    return cert


# --- driver -------------------------------------------------------------------------------


LEMMA_IDS = ("g_bound", "Q", "Mtilde", "psi_bound", "G_propositions", "weighted_sums", "vol", "volcondprob", "identities")


def run_lemma(name: str, grid: GridSpec | None = None, nets=None) -> LemmaCertificate:
    grid = grid or GridSpec()
    quickish = grid.trials < 1000
    runners: dict[str, Callable[[], LemmaCertificate]] = {
        "g_bound": lambda: check_g_bound(grid),
        "Q": lambda: check_Q(grid),
        "Mtilde": lambda: check_Mtilde(nets, grid),
        "psi_bound": lambda: check_psi_bound(nets, grid),
        "G_propositions": lambda: check_G_propositions(grid),
        "weighted_sums": lambda: check_weighted_sums(grid.trials, (8, 8), grid.seed),
        "vol": lambda: check_vol_lemma(grid.trials, (2, 3, 5), grid.seed),
        "volcondprob": lambda: check_volcondprob(
            nets, trials=min(grid.trials, 300), seed=grid.seed,
            replicates=1000 if quickish else 4000, n_points=10_000 if quickish else 100_000,
        ),
        "identities": lambda: check_identities(),
    }
    if name not in runners:
        raise ValueError(f"unknown lemma {name!r}; choose from {', '.join(LEMMA_IDS)}")
    cert = runners[name]()
    cert.grid = {**cert.grid, "spec": grid.to_json()}
    return cert


def run_all(grid: GridSpec | None = None, nets=None) -> list[LemmaCertificate]:
    return [run_lemma(name, grid, nets) for name in LEMMA_IDS]


def nets_verified(nets=None) -> bool:
    return all(verify_tms_net(ps) for ps in _nets(nets))
