"""Digital (0,m,s)-nets in prime base from Faure generator matrices."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionExceedsBase, InsufficientDigits, NonPrimeBase

DETERMINISTIC = "deterministic"


def is_prime(b: int) -> bool:
    if b < 2:
        return False
    f = 2
    while f * f <= b:
        if b % f == 0:
            return False
        f += 1
    return True


@dataclass(frozen=True, slots=True)
class PrimeBase:
    b: int

    def __post_init__(self):
        if not isinstance(self.b, (int, np.integer)) or not is_prime(int(self.b)):
            raise NonPrimeBase(f"base {self.b!r} is not prime")

    def __int__(self) -> int:
        return int(self.b)


def _base(b) -> int:
    return int(b) if isinstance(b, PrimeBase) else int(PrimeBase(int(b)))


@dataclass(frozen=True, eq=False)
class GeneratingMatrices:
    b: int
    s: int
    m: int
    matrices: np.ndarray  # shape (s, m, m)

    def __post_init__(self):
        mats = np.array(self.matrices, dtype=np.int64).reshape(self.s, self.m, self.m)
        if mats.size and (mats.min() < 0 or mats.max() >= self.b):
            raise ValueError("matrix entries must lie in {0,...,b-1}")
        mats.flags.writeable = False
        object.__setattr__(self, "matrices", mats)

    def rank(self, j: int) -> int:
        return _rank_mod_p(self.matrices[j], self.b)


def _rank_mod_p(mat: np.ndarray, p: int) -> int:
    a = [list(map(int, row)) for row in mat]
    rows, cols = len(a), len(a[0]) if a else 0
    rank = 0
    for c in range(cols):
        piv = next((r for r in range(rank, rows) if a[r][c] % p), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        inv = pow(a[rank][c], -1, p)
        a[rank] = [(x * inv) % p for x in a[rank]]
        for r in range(rows):
            if r != rank and a[r][c] % p:
                f = a[r][c]
                a[r] = [(x - f * y) % p for x, y in zip(a[r], a[rank])]
        rank += 1
    return rank


def build_faure_matrices(b, s: int, m: int) -> GeneratingMatrices:
    """C_j is the (j-1)-th power of the upper triangular Pascal matrix mod b."""
    b = _base(b)
    if s > b:
        raise DimensionExceedsBase(f"s={s} exceeds base b={b}")
    if s < 1 or m < 1:
        raise ValueError("need s >= 1 and m >= 1")
    mats = np.zeros((s, m, m), dtype=np.int64)
    for j in range(s):
        # entry (r, c) of P^j is C(c, r) j^(c-r)
        for r in range(m):
            for c in range(r, m):
                mats[j, r, c] = comb(c, r) * pow(j, c - r, b) % b
    return GeneratingMatrices(b, s, m, mats)


@dataclass(frozen=True, slots=True)
class NetPoint:
    digits: tuple[tuple[int, ...], ...]
    b: int

    @property
    def values(self) -> tuple[Fraction, ...]:
        return tuple(digits_value(d, self.b) for d in self.digits)


def digits_value(digits: Sequence[int], b: int) -> Fraction:
    num = 0
    for d in digits:
        num = num * b + int(d)
    return Fraction(num, b ** len(digits))


@dataclass(frozen=True, eq=False)
class PointSet:
    """Points stored as base-b digit arrays of shape (n, s, E).

    ``m`` is None for point sets that are not built as nets.
    """

    b: int
    s: int
    m: int | None
    E: int
    digits: np.ndarray
    provenance: str = DETERMINISTIC
    matrices: GeneratingMatrices | None = field(default=None, compare=False)

    def __post_init__(self):
        dig = np.ascontiguousarray(self.digits, dtype=np.int32)
        if dig.ndim != 3 or dig.shape[1] != self.s or dig.shape[2] != self.E:
            raise ValueError(f"digit array shape {dig.shape} does not match (n, {self.s}, {self.E})")
        if dig.size and (dig.min() < 0 or dig.max() >= self.b):
            raise ValueError("digits must lie in {0,...,b-1}")
        if self.m is not None and dig.shape[0] != self.b**self.m:
            raise ValueError(f"a net with m={self.m} needs {self.b ** self.m} points")
        dig.flags.writeable = False
        object.__setattr__(self, "digits", dig)

    @property
    def n(self) -> int:
        return self.digits.shape[0]

    @property
    def deterministic(self) -> bool:
        return self.provenance == DETERMINISTIC

    def point(self, i: int) -> NetPoint:
        return NetPoint(tuple(tuple(int(x) for x in row) for row in self.digits[i]), self.b)

    def values(self, i: int) -> tuple[Fraction, ...]:
        return self.point(i).values

    def prefix_ints(self, depth: int) -> np.ndarray:
        """Integer value of the first ``depth`` digits, shape (n, s)."""
        if depth > self.E:
            raise InsufficientDigits(f"need {depth} digits, have {self.E}")
        return prefix_ints(self.digits, self.b, depth)

    def with_digits(self, digits: np.ndarray, provenance: str) -> "PointSet":
        return PointSet(self.b, self.s, self.m, self.E, digits, provenance, self.matrices)


def prefix_ints(digits: np.ndarray, b: int, depth: int) -> np.ndarray:
    """Horner evaluation of the first ``depth`` digits along the last axis."""
    if b**depth >= 2**62:
        out = np.zeros(digits.shape[:-1], dtype=object)
    else:
        out = np.zeros(digits.shape[:-1], dtype=np.int64)
    for l in range(depth):
        out = out * b + digits[..., l]
    return out


def index_digits(n: int, b: int, m: int) -> np.ndarray:
    """Little-endian base-b digits of 0..n-1, shape (n, m)."""
    idx = np.arange(n, dtype=np.int64)
    out = np.empty((n, m), dtype=np.int64)
    for l in range(m):
        out[:, l] = idx % b
        idx //= b
    return out


def generate_net(gm: GeneratingMatrices, E: int | None = None) -> PointSet:
    """Point i, coordinate j has leading digits C_j @ (digits of i), then zeros up to depth E."""
    b, s, m = gm.b, gm.s, gm.m
    E = m + 20 if E is None else E
    if E < m:
        raise InsufficientDigits(f"E={E} < m={m}")
    n = b**m
    a = index_digits(n, b, m)
    digits = np.zeros((n, s, E), dtype=np.int32)
    for j in range(s):
        digits[:, j, :m] = (a @ gm.matrices[j].T) % b
    return PointSet(b, s, m, E, digits, DETERMINISTIC, gm)


def faure_net(b: int, s: int, m: int, E: int | None = None) -> PointSet:
    return generate_net(build_faure_matrices(b, s, m), E)


def point_set_from_values(values: Iterable[Sequence], b: int, E: int, m: int | None = None) -> PointSet:
    """Build a deterministic point set from exact coordinates with at most E base-b digits."""
    rows = [tuple(Fraction(v) for v in pt) for pt in values]
    if not rows:
        raise ValueError("empty point set")
    s = len(rows[0])
    digits = np.zeros((len(rows), s, E), dtype=np.int32)
    scale = b**E
    for i, pt in enumerate(rows):
        for j, v in enumerate(pt):
            if not 0 <= v < 1:
                raise ValueError(f"coordinate {v} outside [0,1)")
            num = v * scale
            if num.denominator != 1:
                raise InsufficientDigits(f"{v} has no {E}-digit base-{b} expansion")
            num = num.numerator
            for l in range(E - 1, -1, -1):
                digits[i, j, l] = num % b
                num //= b
    return PointSet(b, s, m, E, digits)


def elementary_cell_counts(ps: PointSet, k: Sequence[int]) -> np.ndarray:
    """Number of points in each k-elementary interval, indexed in mixed radix."""
    idx = np.zeros(ps.n, dtype=np.int64)
    for j, kj in enumerate(k):
        idx = idx * ps.b**kj + ps.prefix_ints(kj)[:, j]
    return np.bincount(idx, minlength=ps.b ** sum(k))


def compositions(total: int, parts: int) -> Iterable[tuple[int, ...]]:
    """All k in N_0^parts with |k| = total."""
    for cuts in itertools.combinations(range(total + parts - 1), parts - 1):
        prev, out = -1, []
        for c in cuts:
            out.append(c - prev - 1)
            prev = c
        out.append(total + parts - 2 - prev)
        yield tuple(out)


def verify_tms_net(ps: PointSet, t: int = 0) -> bool:
    """True iff every k-elementary interval with |k| = m - t holds exactly b^t points."""
    m = ps.m if ps.m is not None else _log_b(ps.n, ps.b)
    if m is None or ps.n != ps.b**m or t < 0 or t > m:
        return False
    target = ps.b**t
    for k in compositions(m - t, ps.s):
        if max(k, default=0) > ps.E:
            return False
        if not np.all(elementary_cell_counts(ps, k) == target):
            return False
    return True


def _log_b(n: int, b: int) -> int | None:
    m = 0
    while b**m < n:
        m += 1
    return m if b**m == n else None


# --- net file format ---------------------------------------------------------

def format_net_file(ps: PointSet, t: int = 0, points: bool = True) -> str:
    if ps.matrices is None or ps.m is None:
        raise ValueError("net file format needs generator matrices")
    lines = [f"{ps.b} {ps.s} {ps.m} {ps.E} {t}"]
    if not ps.deterministic:
        lines.insert(0, f"# provenance: {ps.provenance}")
    for j in range(ps.s):
        for row in ps.matrices.matrices[j]:
            lines.append(" ".join(str(int(x)) for x in row))
    if points:
        for i in range(ps.n):
            blocks = [" ".join(str(int(x)) for x in ps.digits[i, j]) for j in range(ps.s)]
            lines.append(f"{i}: " + " | ".join(blocks))
    return "\n".join(lines) + "\n"


def parse_net_file(text: str) -> PointSet:
    """Inverse of format_net_file. Without a point dump the net is regenerated from the matrices."""
    provenance = DETERMINISTIC
    body = []
    for raw in text.splitlines():
        line = raw.strip()
        if line.startswith("# provenance:"):
            provenance = line.split(":", 1)[1].strip()
        elif line and not line.startswith("#"):
            body.append(line)
    b, s, m, E, _t = (int(x) for x in body[0].split())
    mats = np.array([[int(x) for x in body[1 + r].split()] for r in range(s * m)], dtype=np.int64)
    gm = GeneratingMatrices(_base(b), s, m, mats.reshape(s, m, m))
    dump = body[1 + s * m:]
    if not dump:
        return generate_net(gm, E)
    digits = np.zeros((b**m, s, E), dtype=np.int32)
    for line in dump:
        head, rest = line.split(":", 1)
        for j, block in enumerate(rest.split("|")):
            digits[int(head), j] = [int(x) for x in block.split()]
    return PointSet(b, s, m, E, digits, provenance, gm)


def write_net_file(ps: PointSet, path: str | Path, t: int = 0, points: bool = True) -> None:
    Path(path).write_text(format_net_file(ps, t, points))


def read_net_file(path: str | Path) -> PointSet:
    return parse_net_file(Path(path).read_text())
