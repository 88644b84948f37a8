"""Exact base-b interval arithmetic, volume vectors and interval decompositions.

Endpoints are ``fractions.Fraction`` values; the exact paths require base-b rationals
(finite digit depth). A volume vector V_i(A x B) is the measure of the pairs in A x B whose
first i digits agree and whose (i+1)-th digits differ.
"""

from __future__ import annotations

import math
import re
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    AnchoredInterval,
    BaseMismatch,
    DecompositionError,
    EmptyInterval,
    FullInterval,
    MalformedRegion,
    NotAnchored,
)

INFINITY = math.inf
ROUNDING_DEPTH = 12


def b_depth(x: Fraction, b: int) -> int | None:
    """Smallest p with x * b^p an integer, or None if x is not a base-b rational."""
    x = Fraction(x)
    den, p = x.denominator, 0
    while den % b == 0:
        den //= b
        p += 1
    return p if den == 1 else None


def round_to_depth(x: Fraction, b: int, p: int = ROUNDING_DEPTH) -> Fraction:
    scale = b**p
    return Fraction(round(Fraction(x) * scale), scale)


@dataclass(frozen=True, slots=True)
class BoxInterval:
    a: Fraction
    A: Fraction
    b: int

    def __post_init__(self):
        a, A = Fraction(self.a), Fraction(self.A)
        if not (0 <= a < A <= 1):
            raise EmptyInterval(f"[{a},{A}) is not a nonempty subinterval of [0,1]")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "A", A)

    @property
    def width(self) -> Fraction:
        return self.A - self.a

    @property
    def depth(self) -> int | None:
        pa, pA = b_depth(self.a, self.b), b_depth(self.A, self.b)
        if pa is None or pA is None:
            return None
        return max(pa, pA)

    def exact(self) -> "BoxInterval":
        """Copy with endpoints rounded to depth 12 if they are not base-b rationals."""
        if self.depth is not None:
            return self
        warnings.warn(f"rounding [{self.a},{self.A}) to depth {ROUNDING_DEPTH} in base {self.b}")
        return BoxInterval(round_to_depth(self.a, self.b), round_to_depth(self.A, self.b), self.b)

    def contains(self, x: Fraction) -> bool:
        return self.a <= x < self.A

    def __str__(self) -> str:
        return f"[{self.a},{self.A})"


@dataclass(frozen=True, slots=True)
class Box:
    factors: tuple[BoxInterval, ...]

    def __post_init__(self):
        facs = tuple(self.factors)
        if not facs:
            raise EmptyInterval("a box needs at least one factor")
        if len({f.b for f in facs}) != 1:
            raise BaseMismatch("all factors of a box must share one base")
        object.__setattr__(self, "factors", facs)

    @classmethod
    def from_bounds(cls, bounds: Iterable[tuple], b: int) -> "Box":
        return cls(tuple(BoxInterval(Fraction(a), Fraction(A), b) for a, A in bounds))

    @property
    def b(self) -> int:
        return self.factors[0].b

    @property
    def s(self) -> int:
        return len(self.factors)

    @property
    def volume(self) -> Fraction:
        return math.prod((f.width for f in self.factors), start=Fraction(1))

    @property
    def depth(self) -> int | None:
        ds = [f.depth for f in self.factors]
        return None if any(d is None for d in ds) else max(ds)

    def exact(self) -> "Box":
        return Box(tuple(f.exact() for f in self.factors))

    def is_anchored(self) -> bool:
        return all(f.a == 0 for f in self.factors)

    def __str__(self) -> str:
        return "x".join(str(f) for f in self.factors)


_ENDPOINT = re.compile(r"^\s*(\d+)\s*/\s*(\d+)\s*\^\s*(\d+)\s*$")


def parse_endpoint(text: str) -> Fraction:
    """Accepts ``num/b^p``, ``num/den`` or a decimal string."""
    m = _ENDPOINT.match(text)
    if m:
        return Fraction(int(m.group(1)), int(m.group(2)) ** int(m.group(3)))
    return Fraction(text.strip())


def parse_box(literal: str, b: int) -> Box:
    """Parse ``[a1,A1)x[a2,A2)...``."""
    parts = re.findall(r"\[([^,\]\)]+),([^\)\]]+)\)", literal)
    if not parts or "".join(f"[{a},{A})" for a, A in parts).replace(" ", "") != re.sub(
        r"\s|x|×|\*", "", literal
    ):
        raise ValueError(f"cannot parse box literal {literal!r}")
    return Box(tuple(BoxInterval(parse_endpoint(a), parse_endpoint(A), b) for a, A in parts))


def format_box(box: Box) -> str:
    return str(box)


# --- gamma_b --------------------------------------------------------------------


def gamma_b(x, y, b: int | None = None):
    """Number of leading base-b digits shared by x and y (INFINITY if x == y).

    x and y are either exact numbers in [0,1) (then b is required), digit sequences
    (then b is unused), or objects with ``.digits`` and ``.b`` such as NetPoint rows
    given as (digits, b) tuples.
    """
    if isinstance(x, tuple) and len(x) == 2 and isinstance(x[1], int) and not isinstance(x[0], int):
        (dx, bx), (dy, by) = x, y
        if bx != by:
            raise BaseMismatch(f"bases {bx} and {by} differ")
        return _gamma_digits(dx, dy)
    if isinstance(x, (Fraction, int, float)) and isinstance(y, (Fraction, int, float)):
        if b is None:
            raise ValueError("base required for numeric arguments")
        x, y = Fraction(x), Fraction(y)
        if x == y:
            return INFINITY
        i, scale = 0, 1
        while math.floor(x * scale * b) == math.floor(y * scale * b):
            scale *= b
            i += 1
        return i
    return _gamma_digits(x, y)


def _gamma_digits(dx, dy):
    dx, dy = np.asarray(dx), np.asarray(dy)
    n = max(len(dx), len(dy))
    dx = np.pad(dx, (0, n - len(dx)))
    dy = np.pad(dy, (0, n - len(dy)))
    diff = np.nonzero(dx != dy)[0]
    return INFINITY if diff.size == 0 else int(diff[0])


# --- volume vectors ---------------------------------------------------------------


@dataclass(frozen=True)
class VolumeVector:
    """V_0..V_q stored exactly; V_i = c * b^-i for every i > q."""

    b: int
    prefix: tuple[Fraction, ...]
    c: Fraction

    @property
    def q(self) -> int:
        return len(self.prefix) - 1

    def __getitem__(self, i: int) -> Fraction:
        if i < 0:
            raise IndexError(i)
        if i <= self.q:
            return self.prefix[i]
        return self.c / Fraction(self.b) ** i

    def entries(self, upto: int) -> list[Fraction]:
        return [self[i] for i in range(upto + 1)]

    def tail_sum(self, r: int) -> Fraction:
        """Sum of V_i over i >= r."""
        start = max(r, self.q + 1)
        geo = self.c / Fraction(self.b) ** start * Fraction(self.b, self.b - 1)
        return sum(self.prefix[max(r, 0):], Fraction(0)) + geo

    def total(self) -> Fraction:
        return self.tail_sum(0)

    def same_as(self, other: "VolumeVector") -> bool:
        if self.b != other.b or self.c != other.c:
            return False
        upto = max(self.q, other.q) + 1
        return self.entries(upto) == other.entries(upto)

    def scaled(self, f: Fraction) -> "VolumeVector":
        return VolumeVector(self.b, tuple(v * f for v in self.prefix), self.c * f)

    def to_json(self) -> dict:
        return {
            "prefix": [rational_json(v) for v in self.prefix],
            "tail": {"q": self.q, "c": rational_json(self.c)},
        }


def rational_json(x: Fraction) -> dict:
    x = Fraction(x)
    return {"num": str(x.numerator), "den": str(x.denominator)}


def _overlap(a: Fraction, A: Fraction, lo: Fraction, hi: Fraction) -> Fraction:
    return max(Fraction(0), min(A, hi) - max(a, lo))


def _cell_range(iv: BoxInterval, i: int) -> tuple[int, int]:
    scale = iv.b**i
    return math.floor(iv.a * scale), math.ceil(iv.A * scale) - 1


def _pair_cell_sum(A: BoxInterval, B: BoxInterval, i: int) -> Fraction:
    """Sum over depth-i cells C of |A ∩ C| |B ∩ C|."""
    b = A.b
    la, ha = _cell_range(A, i)
    lb, hb = _cell_range(B, i)
    lo, hi = max(la, lb), min(ha, hb)
    if lo > hi:
        return Fraction(0)
    special = {c for c in (la, ha, lb, hb, lo, hi) if lo <= c <= hi}
    w = Fraction(1, b**i)
    total = Fraction(0)
    for c in special:
        cl, ch = c * w, (c + 1) * w
        total += _overlap(A.a, A.A, cl, ch) * _overlap(B.a, B.A, cl, ch)
    return total + (hi - lo + 1 - len(special)) * w * w


def volume_vector_pair(A: BoxInterval, B: BoxInterval) -> VolumeVector:
    if A.b != B.b:
        raise BaseMismatch("intervals in different bases")
    pa, pb = A.depth, B.depth
    if pa is None or pb is None:
        raise ValueError("volume vectors need base-b rational endpoints; call .exact() first")
    p = max(pa, pb)
    sums = [_pair_cell_sum(A, B, i) for i in range(p + 2)]
    prefix = tuple(sums[i] - sums[i + 1] for i in range(p + 1))
    common = _overlap(A.a, A.A, B.a, B.A)
    return VolumeVector(A.b, prefix, common * Fraction(A.b - 1, A.b))


def volume_vector(A: BoxInterval) -> VolumeVector:
    return volume_vector_pair(A, A)


def volume_vector_box(box: Box, i: Sequence[int]) -> Fraction:
    if len(i) != box.s:
        raise ValueError("index length must equal the box dimension")
    return math.prod((volume_vector(f)[ij] for f, ij in zip(box.factors, i)), start=Fraction(1))


def elementary_volume_vector(k: int, b: int) -> VolumeVector:
    """Normalised vector b^{2k} V(1_k x 1_k): zero below k, (b-1)/b^{i-k+1} from k on."""
    prefix = tuple(Fraction(0) for _ in range(k)) + (Fraction(b - 1, b),)
    return VolumeVector(b, prefix, Fraction(b - 1, b) * Fraction(b) ** k)


def unanchored_volume_vector(k: int, r: int, b: int) -> VolumeVector:
    """Normalised vector of the elementary unanchored interval with d = r - 1.

    Entry r-1 is 1/2, entries i >= k+r+1 are (b-1)/(2 b^{i-k-r}), everything else is 0.
    """
    prefix = [Fraction(0)] * (k + r + 1)
    prefix[r - 1] = Fraction(1, 2)
    return VolumeVector(b, tuple(prefix), Fraction(b - 1, 2) * Fraction(b) ** (k + r))


# --- decompositions ----------------------------------------------------------------


def _trim(xs: Sequence[Fraction]) -> tuple[Fraction, ...]:
    xs = list(xs)
    while xs and xs[-1] == 0:
        xs.pop()
    return tuple(xs)


@dataclass(frozen=True)
class DecompCoefficients:
    """V(A x A) = sum_k alpha_k W_k + sum_k tau_k Z_k with normalised vectors W, Z."""

    kind: str
    r: int
    alpha: tuple[Fraction, ...]
    tau: tuple[Fraction, ...]
    b: int

    def __post_init__(self):
        object.__setattr__(self, "alpha", _trim(self.alpha))
        object.__setattr__(self, "tau", _trim(self.tau))

    @property
    def d(self) -> int:
        return self.r - 1

    def total(self) -> Fraction:
        return sum(self.alpha, Fraction(0)) + sum(self.tau, Fraction(0))

    def nonnegative(self) -> bool:
        return all(x >= 0 for x in self.alpha + self.tau)

    def reconstruct(self) -> VolumeVector:
        b, r = self.b, self.r
        q = max(len(self.tau) - 1, len(self.alpha) + r, r - 1, 0)
        vec = [Fraction(0)] * (q + 1)
        c = Fraction(0)
        for k, t in enumerate(self.tau):
            if t:
                z = elementary_volume_vector(k, b)
                for i in range(q + 1):
                    vec[i] += t * z[i]
                c += t * z.c
        for k, a in enumerate(self.alpha):
            if a:
                w = unanchored_volume_vector(k, r, b)
                for i in range(q + 1):
                    vec[i] += a * w[i]
                c += a * w.c
        return VolumeVector(b, tuple(vec), c)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "r": self.r,
            "alpha": [rational_json(x) for x in self.alpha],
            "tau": [rational_json(x) for x in self.tau],
        }


def _deftk(V: VolumeVector, start: int = 0) -> list[Fraction]:
    """t_k = (b V_k - V_{k-1})/(b-1) with V_{start-1} read as 0; zero for k < start."""
    b = V.b
    out = [Fraction(0)] * start
    for k in range(start, V.q + 2):
        prev = V[k - 1] if k > start else Fraction(0)
        out.append((b * V[k] - prev) / (b - 1))
    return out


def anchored_coeffs(A: BoxInterval) -> DecompCoefficients:
    if A.a != 0:
        raise NotAnchored(f"{A} does not start at 0")
    V = volume_vector(A.exact())
    return DecompCoefficients("anchored", 1, (), tuple(_deftk(V)), A.b)


@dataclass(frozen=True, slots=True)
class UnanchoredForm:
    """A = [h b^{-r+1} + g b^{-r} - z, h b^{-r+1} + G b^{-r} + Z) with r minimal."""

    r: int
    h: int
    g: int
    G: int
    z: Fraction
    Z: Fraction
    b: int

    def endpoints(self) -> tuple[Fraction, Fraction]:
        b, r = self.b, self.r
        base = Fraction(self.h, b ** (r - 1))
        return base + Fraction(self.g, b**r) - self.z, base + Fraction(self.G, b**r) + self.Z

    def pieces(self) -> tuple[BoxInterval | None, BoxInterval | None, BoxInterval | None]:
        """The three sub-intervals A_1 (left child part), A_2 (whole children), A_3 (right part)."""
        b, r = self.b, self.r
        base = Fraction(self.h, b ** (r - 1))
        lo, hi = self.endpoints()
        gl, Gl = base + Fraction(self.g, b**r), base + Fraction(self.G, b**r)

        def mk(x, y):
            return BoxInterval(x, y, b) if x < y else None

        return mk(lo, gl), mk(gl, Gl), mk(Gl, hi)


def parse_unanchored(A: BoxInterval) -> UnanchoredForm:
    A = A.exact()
    b = A.b
    if A.a == 0 and A.A == 1:
        raise FullInterval("[0,1) is handled by the anchored decomposition")
    if A.a == 0:
        raise AnchoredInterval(f"{A} is anchored at 0")
    for r in range(1, A.depth + 2):
        cell = Fraction(1, b ** (r - 1))
        h = math.floor(A.a / cell)
        if A.A > (h + 1) * cell:
            break  # no longer inside a single depth-(r-1) cell
        lo = (A.a - h * cell) * b**r
        hi = (A.A - h * cell) * b**r
        g, G = math.ceil(lo), math.floor(hi)
        if 1 <= g <= G <= b - 1:
            return UnanchoredForm(r, h, g, G, (g - lo) / b**r, (hi - G) / b**r, b)
    raise AnchoredInterval(f"{A} is anchored to a cell boundary")


def unanchored_decompose(A: BoxInterval) -> DecompCoefficients:
    """Decomposition into elementary and elementary unanchored intervals.

    Intervals anchored at 0, or at either boundary of their finest containing cell, go
    through the anchored formula applied to [0, width): translating inside a cell, or
    reflecting about its midpoint, leaves every common-digit count unchanged (up to a
    null set) and so leaves the volume vector unchanged.
    """
    A = A.exact()
    b = A.b
    try:
        form = parse_unanchored(A)
    except AnchoredInterval:
        return anchored_coeffs(BoxInterval(Fraction(0), A.width, b))
    V = volume_vector(A)
    r = form.r
    if V[r - 1] <= b * V[r]:
        tau = _deftk(V, start=r - 1)
        return DecompCoefficients("unanchored", r, (), tuple(tau), b)

    tau_bar = {r: b * V[r] / (b - 1)}
    for k in range(r + 1, V.q + 2):
        tau_bar[k] = (b * V[k] - V[k - 1]) / (b - 1)
    remaining = V[r - 1] - b * V[r]
    alpha_bar: dict[int, Fraction] = {}
    for k in range(r + 1, V.q + 2):
        if remaining == 0:
            break
        half = min(tau_bar[k], remaining)
        alpha_bar[k] = 2 * half
        remaining -= half
    if remaining != 0:
        raise DecompositionError(f"tail of {A} too small to absorb V_(r-1) - b V_r")

    top = V.q + 2
    tau = [Fraction(0)] * top
    tau[r - 1] = b * tau_bar[r]
    for k in range(r + 1, top):
        tau[k] = tau_bar[k] - alpha_bar.get(k, Fraction(0)) / 2
    alpha = [Fraction(0)] * top
    for k, a in alpha_bar.items():
        alpha[k - r - 1] = a
    return DecompCoefficients("unanchored", r, tuple(alpha), tuple(tau), b)


def decompose(A: BoxInterval) -> DecompCoefficients:
    return anchored_coeffs(A) if A.a == 0 else unanchored_decompose(A)


def elementary_unanchored(d: int, k: int, b: int) -> BoxInterval:
    mid, half = Fraction(1, b ** (d + 1)), Fraction(1, b ** (2 + k + d))
    return BoxInterval(mid - half, mid + half, b)


def unanchored_halves(d: int, k: int, b: int) -> tuple[BoxInterval, BoxInterval]:
    mid, half = Fraction(1, b ** (d + 1)), Fraction(1, b ** (2 + k + d))
    return BoxInterval(mid - half, mid, b), BoxInterval(mid, mid + half, b)


def elementary_interval(k: int, b: int) -> BoxInterval:
    return BoxInterval(Fraction(0), Fraction(1, b**k), b)


@dataclass(frozen=True)
class ProductCoefficients:
    """Coefficients keyed by (k, J) with J a frozenset of 0-based coordinates."""

    b: int
    s: int
    d: tuple[int, ...]
    coeffs: Mapping[tuple[tuple[int, ...], frozenset], Fraction] = field(repr=False)

    def total(self) -> Fraction:
        return sum(self.coeffs.values(), Fraction(0))

    def items(self):
        return self.coeffs.items()


def product_coeffs(box: Box) -> ProductCoefficients:
    per_coord = []
    ds = []
    for f in box.factors:
        dec = decompose(f)
        ds.append(dec.d if dec.kind == "unanchored" else 0)
        terms = [(k, False, t) for k, t in enumerate(dec.tau) if t]
        terms += [(k, True, a) for k, a in enumerate(dec.alpha) if a]
        per_coord.append(terms)
    out: dict[tuple[tuple[int, ...], frozenset], Fraction] = {}
    for combo in product(*per_coord):
        k = tuple(t[0] for t in combo)
        J = frozenset(j for j, t in enumerate(combo) if t[1])
        out[(k, J)] = out.get((k, J), Fraction(0)) + math.prod((t[2] for t in combo), start=Fraction(1))
    return ProductCoefficients(box.b, box.s, tuple(ds), out)


# --- regions in [0,1)^{2s} -----------------------------------------------------------

REGION_KINDS = ("D", "E", "Et", "F", "F1", "F2")


@dataclass(frozen=True)
class RegionSpec:
    """Pair regions built from elementary and elementary unanchored intervals.

    kinds: D(k,d,J); E(k,d,J,I) and Et(k,d,J,I,K) on the coordinates I ∪ J^c only;
    F(k,d,J,I) or, when K is given, F(k,d,J,I,K); F1 and F2 are the two projections of F.
    """

    kind: str
    k: tuple[int, ...]
    d: tuple[int, ...]
    J: frozenset
    b: int
    I: frozenset | None = None
    K: frozenset | None = None

    def __post_init__(self):
        object.__setattr__(self, "k", tuple(self.k))
        object.__setattr__(self, "d", tuple(self.d))
        object.__setattr__(self, "J", frozenset(self.J))
        if self.I is not None:
            object.__setattr__(self, "I", frozenset(self.I))
        if self.K is not None:
            object.__setattr__(self, "K", frozenset(self.K))
        s = len(self.k)
        if self.kind not in REGION_KINDS:
            raise MalformedRegion(f"unknown region kind {self.kind!r}")
        if len(self.d) != s or any(x < 0 for x in self.k + self.d):
            raise MalformedRegion("k and d must be nonnegative vectors of equal length")
        if not self.J <= frozenset(range(s)):
            raise MalformedRegion("J must be a subset of the coordinates")
        if self.kind != "D" and self.I is None:
            raise MalformedRegion(f"kind {self.kind} needs I")
        if self.I is not None and not self.I <= self.J:
            raise MalformedRegion("I must be a subset of J")
        if self.K is not None and not self.K <= self.J:
            raise MalformedRegion("K must be a subset of J")
        if self.kind == "Et" and self.K is None:
            raise MalformedRegion("kind Et needs K")

    @property
    def s(self) -> int:
        return len(self.k)

    def factor_pairs(self) -> list[tuple[BoxInterval, BoxInterval] | None]:
        """Per coordinate (interval for u, interval for v); None if unconstrained."""
        b, out = self.b, []
        for j in range(self.s):
            k, d = self.k[j], self.d[j]
            ek = elementary_interval(k, b)
            if j not in self.J:
                out.append((ek, ek))
                continue
            if self.kind == "D":
                y = elementary_unanchored(d, k, b)
                out.append((y, y))
                continue
            y1, y2 = unanchored_halves(d, k, b)
            in_I = j in self.I
            if self.K is None:
                if in_I:
                    e = elementary_interval(k + d + 2, b)
                    out.append((e, e))
                elif self.kind in ("E", "Et"):
                    out.append(None)
                else:
                    out.append((y1, y2))
                continue
            in_K = j in self.K
            if in_I:
                out.append((y2, y2) if in_K else (y1, y1))
            elif self.kind in ("E", "Et"):
                out.append(None)
            else:
                out.append((y1, y2) if in_K else (y2, y1))
        return out


def _abs_restricted(v: Sequence[int], S: Iterable[int]) -> int:
    return sum(v[j] for j in S)


def region_volume(spec: RegionSpec) -> Fraction:
    """Closed-form volumes of the region families."""
    b, k, d, J = spec.b, spec.k, spec.d, spec.J
    kk = sum(k)
    d2 = sum(d[j] + 2 for j in J)
    if spec.kind == "D":
        return Fraction(2 ** (2 * len(J)), b ** (2 * (kk + d2)))
    if spec.kind in ("F1", "F2"):
        return Fraction(1, b ** (kk + d2))
    if spec.kind == "F":
        return Fraction(1, b ** (2 * (kk + d2)))
    # E and Et live on the coordinates I ∪ J^c
    cols = [j for j in range(spec.s) if j in spec.I or j not in J]
    exp = sum(k[j] + (d[j] + 2 if j in J else 0) for j in cols)
    return Fraction(1, b ** (2 * exp))


def region_volume_direct(spec: RegionSpec) -> Fraction:
    """Volume as the product of the interval widths (independent of the closed form)."""
    pairs = spec.factor_pairs()
    if spec.kind == "F1":
        return math.prod((p[0].width for p in pairs if p), start=Fraction(1))
    if spec.kind == "F2":
        return math.prod((p[1].width for p in pairs if p), start=Fraction(1))
    return math.prod((p[0].width * p[1].width for p in pairs if p), start=Fraction(1))


def region_contains(spec: RegionSpec, u: Sequence, v: Sequence | None = None) -> bool:
    """Membership of the pair (u, v); for F1 and F2 only the relevant point is used."""
    pairs = spec.factor_pairs()
    if len(u) != spec.s or (v is not None and len(v) != spec.s):
        raise MalformedRegion("point dimension does not match the region")
    for j, p in enumerate(pairs):
        if p is None:
            continue
        if spec.kind == "F1":
            if not p[0].contains(Fraction(u[j])):
                return False
        elif spec.kind == "F2":
            if not p[1].contains(Fraction(u[j] if v is None else v[j])):
                return False
        elif not (p[0].contains(Fraction(u[j])) and p[1].contains(Fraction(v[j]))):
            return False
    return True
