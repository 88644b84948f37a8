"""Owen nested uniform scrambling and digital shifts with counter-based seeding.

Every random quantity is a pure function of (seed, replicate, coordinate, digit prefix),
computed by a splitmix64-style mixer on uint64 arrays, so batches of replicates are
vectorised and any replicate can be regenerated on its own.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .gfnet import PointSet

_MASK = (1 << 64) - 1
_C_SEED = np.uint64(0x9E3779B97F4A7C15)
_C_REP = np.uint64(0xD1B54A32D192ED03)
_C_COORD = np.uint64(0xA0761D6478BD642F)
_C_NODE = np.uint64(0xE7037ED1A0B428DB)
_C_STEP = np.uint64(0x8EBC6AF09C88C6E3)
_C_SHIFT = np.uint64(0x589965CC75374CC3)


def _mix(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


@dataclass(frozen=True, slots=True)
class ScrambleSeed:
    seed: int
    replicate: int = 0

    def __post_init__(self):
        if not 0 <= self.seed <= _MASK:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.replicate < 0:
            raise ValueError("replicate index must be non-negative")


def replicate_keys(seed: int, replicates) -> np.ndarray:
    reps = np.asarray(replicates, dtype=np.uint64)
    with np.errstate(over="ignore"):
        base = _mix(np.uint64(seed & _MASK) ^ _C_SEED)
        return _mix(base + _mix(reps * _C_REP + np.uint64(1)))


def _coord_keys(rep_keys: np.ndarray, s: int) -> np.ndarray:
    coords = np.arange(1, s + 1, dtype=np.uint64)
    return _mix(rep_keys[:, None] ^ _mix(coords * _C_COORD))


def _random_permute(keys: np.ndarray, x: np.ndarray, b: int) -> np.ndarray:
    """pi(x) where pi is the uniform permutation of {0..b-1} attached to each node key.

    pi(x) is the rank of u_x among b mixed values u_0..u_{b-1}; ties break by index,
    so every node permutation is a bijection.
    """
    t = _mix(np.arange(1, b + 1, dtype=np.uint64) * _C_NODE)
    u = _mix(keys[..., None] ^ t)
    ux = np.take_along_axis(u, x[..., None].astype(np.int64), axis=-1)
    less = (u < ux) | ((u == ux) & (np.arange(b) < x[..., None]))
    return less.sum(axis=-1).astype(np.int32)


def identity_permute(keys: np.ndarray, x: np.ndarray, b: int) -> np.ndarray:
    return x.astype(np.int32)


Permuter = Callable[[np.ndarray, np.ndarray, int], np.ndarray]


def scramble_digits(
    digits: np.ndarray,
    b: int,
    seed: int,
    replicates,
    depth: int | None = None,
    permute: Permuter | None = None,
    coord_depths=None,
) -> np.ndarray:
    """Nested scrambling of the first ``depth`` digits for a batch of replicates.

    digits has shape (n, s, E); the result has shape (R, n, s, depth). Digit l of a
    coordinate only depends on digits 0..l, so any depth gives the same leading digits.
    ``coord_depths`` stops coordinate j after its first coord_depths[j] digits and leaves
    the rest zero.
    """
    permute = permute or _random_permute
    n, s, E = digits.shape
    depth = E if depth is None else depth
    reps = np.atleast_1d(np.asarray(replicates))
    ck = _coord_keys(replicate_keys(seed, reps), s)  # (R, s)
    key = np.broadcast_to(_mix(ck ^ _C_STEP)[:, None, :], (len(reps), n, s)).copy()
    cd = np.full(s, depth) if coord_depths is None else np.minimum(np.asarray(coord_depths), depth)
    alive = np.arange(s)
    out = np.zeros((len(reps), n, s, depth), dtype=np.int32)
    with np.errstate(over="ignore"):
        for l in range(depth):
            keep = cd[alive] > l
            if not keep.all():
                key, alive = key[:, :, keep], alive[keep]
            x = np.broadcast_to(digits[None, :, alive, l], key.shape)
            out[:, :, alive, l] = permute(key, x, b)
            key = _mix(key * _C_STEP + x.astype(np.uint64) + np.uint64(1))
    return out


def shift_vectors(b: int, s: int, depth: int, seed: int, replicates) -> np.ndarray:
    """Digits of the shift vector v, shape (R, s, depth)."""
    reps = np.atleast_1d(np.asarray(replicates))
    ck = _coord_keys(replicate_keys(seed, reps), s)
    levels = _mix(np.arange(1, depth + 1, dtype=np.uint64) * _C_SHIFT)
    h = _mix(ck[:, :, None] ^ levels)
    unit = (h >> np.uint64(11)).astype(np.float64) * 2.0**-53
    return np.minimum((unit * b).astype(np.int32), b - 1)


def shift_digits(digits: np.ndarray, b: int, seed: int, replicates, depth: int | None = None) -> np.ndarray:
    n, s, E = digits.shape
    depth = E if depth is None else depth
    v = shift_vectors(b, s, depth, seed, replicates)
    return (digits[None, :, :, :depth] + v[:, None, :, :]) % b


def owen_scramble(ps: PointSet, seed: ScrambleSeed, permute: Permuter | None = None) -> PointSet:
    dig = scramble_digits(ps.digits, ps.b, seed.seed, [seed.replicate], permute=permute)[0]
    return ps.with_digits(dig, f"scrambled(seed={seed.seed},replicate={seed.replicate})")


def digital_shift(ps: PointSet, seed: ScrambleSeed | None = None, v: np.ndarray | None = None) -> PointSet:
    """Add one digit vector v (shape (s, E)) to every point, digitwise mod b.

    v is drawn from ``seed`` unless given explicitly.
    """
    if v is None:
        if seed is None:
            raise ValueError("need a seed or an explicit shift vector")
        v = shift_vectors(ps.b, ps.s, ps.E, seed.seed, [seed.replicate])[0]
        tag = f"shifted(seed={seed.seed},replicate={seed.replicate})"
    else:
        v = np.asarray(v, dtype=np.int32).reshape(ps.s, ps.E)
        tag = "shifted(explicit)"
    return ps.with_digits((ps.digits + v[None]) % ps.b, tag)


def max_threads() -> int:
    try:
        return max(1, int(os.environ.get("NEGADEP_THREADS", "1")))
    except ValueError:
        return 1


def randomize_chunk(ps: PointSet, randomizer: str, seed: int, reps, depth: int | None = None, coord_depths=None) -> np.ndarray:
    """Digits (len(reps), n, s, depth) of the given replicates; see scramble_digits for coord_depths."""
    if randomizer == "scramble":
        return scramble_digits(ps.digits, ps.b, seed, reps, depth, coord_depths=coord_depths)
    if randomizer == "shift":
        return shift_digits(ps.digits, ps.b, seed, reps, depth)
    raise ValueError(f"unknown randomizer {randomizer!r}")


def replicate_chunks(ps: PointSet, randomizer: str, R: int, depth, budget: int = 4_000_000) -> list[np.ndarray]:
    """Split replicate indices 0..R-1 into chunks holding about ``budget`` digit evaluations.

    ``depth`` is one depth for every coordinate or a sequence of per-coordinate depths.
    """
    digits = ps.s * depth if np.isscalar(depth) else int(np.sum(depth))
    per_rep = ps.n * digits * (ps.b if randomizer == "scramble" else 1)
    size = max(1, budget // max(per_rep, 1))
    return [np.arange(a, min(R, a + size)) for a in range(0, R, size)]
