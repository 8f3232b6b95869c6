"""Segmented tabulation of mu, phi, sigma and omega, and squarefree counting.

Tables are built segment by segment from a list of base primes up to the
square root of the upper end, so arbitrarily long ranges can be streamed
with bounded memory.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from . import _kernels
from .errors import PreconditionError, RangeError, ResourceError
from .reports import BoundReport

DEFAULT_SEGMENT_LENGTH = 1 << 22
# 18 bytes per entry, so this is roughly 600 MB for a monolithic table.
DEFAULT_MAX_ENTRIES = 1 << 25

SIX_OVER_PI2 = 6.0 / math.pi**2
Q_ERROR_CONSTANT = 0.68


@lru_cache(maxsize=8)
def small_primes(limit: int) -> np.ndarray:
    """All primes <= limit as an int64 array (plain sieve of Eratosthenes)."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    flags[4::2] = False
    for p in range(3, math.isqrt(limit) + 1, 2):
        if flags[p]:
            flags[p * p :: 2 * p] = False
    primes = np.flatnonzero(flags).astype(np.int64)
    primes.flags.writeable = False
    return primes


def base_primes_for(hi: int) -> np.ndarray:
    """Primes up to sqrt(hi), enough to sieve any segment ending at hi."""
    return small_primes(max(2, math.isqrt(hi) + 1))


@dataclass(frozen=True)
class Segment:
    """Arithmetic functions on [base, base + length)."""

    base: int
    length: int
    mu: np.ndarray
    phi: np.ndarray
    sigma: np.ndarray
    omega: np.ndarray

    @property
    def numbers(self) -> np.ndarray:
        return np.arange(self.base, self.base + self.length, dtype=np.int64)

    @property
    def is_prime(self) -> np.ndarray:
        n = self.numbers
        return (n >= 2) & (self.phi == (n - 1).astype(np.uint64))


@dataclass(frozen=True)
class ArithTable:
    """mu, phi, sigma, omega for every n in [lo, hi]. Arrays are indexed by n - lo."""

    lo: int
    hi: int
    mu: np.ndarray
    phi: np.ndarray
    sigma: np.ndarray
    omega: np.ndarray

    def __len__(self) -> int:
        return self.hi - self.lo + 1

    def covers(self, a: int, b: int) -> bool:
        return self.lo <= a and b <= self.hi

    def require(self, a: int, b: int) -> None:
        if not self.covers(a, b):
            raise RangeError(f"table covers [{self.lo}, {self.hi}], need [{a}, {b}]")

    def index(self, n: int) -> int:
        self.require(n, n)
        return n - self.lo

    def row(self, n: int) -> dict[str, int]:
        i = self.index(n)
        return {
            "n": n,
            "mu": int(self.mu[i]),
            "phi": int(self.phi[i]),
            "sigma": int(self.sigma[i]),
            "omega": int(self.omega[i]),
        }

    def window(self, a: int, b: int) -> ArithTable:
        """Sub-table on [a, b] sharing memory with this one."""
        self.require(a, b)
        i, j = a - self.lo, b - self.lo + 1
        return ArithTable(a, b, self.mu[i:j], self.phi[i:j], self.sigma[i:j], self.omega[i:j])

    @property
    def numbers(self) -> np.ndarray:
        return np.arange(self.lo, self.hi + 1, dtype=np.int64)

    @property
    def is_prime(self) -> np.ndarray:
        n = self.numbers
        return (n >= 2) & (self.phi == (n - 1).astype(np.uint64))


def _check_range(lo: int, hi: int, segment_length: int) -> None:
    if lo < 1 or hi < lo:
        raise PreconditionError(f"need 1 <= lo <= hi, got lo={lo}, hi={hi}")
    if segment_length < 1:
        raise PreconditionError(f"segment_length must be >= 1, got {segment_length}")


def compute_segment(base: int, length: int, primes: np.ndarray | None = None) -> Segment:
    if primes is None:
        primes = base_primes_for(base + length - 1)
    mu, phi, sigma, omega = _kernels.tabulate_segment(base, length, primes)
    return Segment(base, length, mu, phi.view(np.uint64), sigma.view(np.uint64), omega)


def segment_bounds(lo: int, hi: int, segment_length: int) -> list[tuple[int, int]]:
    """(base, length) pairs tiling [lo, hi] exactly, in increasing order."""
    _check_range(lo, hi, segment_length)
    return [(b, min(segment_length, hi - b + 1)) for b in range(lo, hi + 1, segment_length)]


def iter_segments(
    lo: int, hi: int, segment_length: int = DEFAULT_SEGMENT_LENGTH
) -> Iterator[Segment]:
    """Stream the table for [lo, hi] as consecutive segments."""
    bounds = segment_bounds(lo, hi, segment_length)
    primes = base_primes_for(hi)
    for base, length in bounds:
        yield compute_segment(base, length, primes)


def tabulate(
    lo: int,
    hi: int,
    segment_length: int = DEFAULT_SEGMENT_LENGTH,
    *,
    max_entries: int = DEFAULT_MAX_ENTRIES,
) -> ArithTable:
    """Materialize mu, phi, sigma, omega on [lo, hi].

    Raises ResourceError when the table would exceed ``max_entries`` entries;
    use :func:`iter_segments` to stream longer ranges instead.
    """
    _check_range(lo, hi, segment_length)
    if hi - lo + 1 > max_entries:
        raise ResourceError(
            f"table [{lo}, {hi}] has {hi - lo + 1} entries, budget is {max_entries}; "
            "stream it with iter_segments"
        )
    segs = list(iter_segments(lo, hi, segment_length))
    if len(segs) == 1:
        s = segs[0]
        return ArithTable(lo, hi, s.mu, s.phi, s.sigma, s.omega)
    return ArithTable(
        lo,
        hi,
        np.concatenate([s.mu for s in segs]),
        np.concatenate([s.phi for s in segs]),
        np.concatenate([s.sigma for s in segs]),
        np.concatenate([s.omega for s in segs]),
    )


# -- squarefree counting ---------------------------------------------------


def _squarefree_blocks(hi: int, segment_length: int) -> Iterator[tuple[int, np.ndarray]]:
    primes = base_primes_for(hi)
    buf = np.empty(min(segment_length, hi), dtype=np.bool_)
    for base in range(1, hi + 1, segment_length):
        length = min(segment_length, hi - base + 1)
        flags = buf[:length]
        _kernels.squarefree_flags(base, length, primes, flags)
        yield base, flags


def squarefree_counts(
    zs: Iterable[int], segment_length: int = DEFAULT_SEGMENT_LENGTH
) -> list[int]:
    """Q(z) for each z, computed in a single sieve pass up to max(zs)."""
    zs = [int(z) for z in zs]
    if not zs:
        return []
    if min(zs) < 1:
        raise PreconditionError("squarefree_count needs z >= 1")
    order = sorted(range(len(zs)), key=zs.__getitem__)
    out = [0] * len(zs)
    pos = 0
    running = 0
    for base, flags in _squarefree_blocks(max(zs), segment_length):
        end = base + len(flags) - 1
        if pos < len(order) and zs[order[pos]] <= end:
            prefix = np.cumsum(flags, dtype=np.int64)
            while pos < len(order) and zs[order[pos]] <= end:
                out[order[pos]] = running + int(prefix[zs[order[pos]] - base])
                pos += 1
        running += int(np.count_nonzero(flags))
    return out


def squarefree_count(z: int, segment_length: int = DEFAULT_SEGMENT_LENGTH) -> int:
    """Number of squarefree n <= z."""
    return squarefree_counts([z], segment_length)[0]


def q_error_sweep(z_max: int, segment_length: int = DEFAULT_SEGMENT_LENGTH) -> BoundReport:
    """Check |Q(z) - 6z/pi^2| <= 0.68 sqrt(z) for every integer 1 <= z <= z_max.

    ``lhs`` is the largest observed |Q(z) - 6z/pi^2| / sqrt(z); the report
    records the z attaining it and, on failure, the first violating z.
    """
    if z_max < 1:
        raise PreconditionError(f"z_max must be >= 1, got {z_max}")
    running = 0
    worst, worst_z = -1.0, 0
    first_violation = None
    for base, flags in _squarefree_blocks(z_max, segment_length):
        z = np.arange(base, base + len(flags), dtype=np.float64)
        q = running + np.cumsum(flags, dtype=np.int64)
        ratio = np.abs(q - SIX_OVER_PI2 * z) / np.sqrt(z)
        i = int(np.argmax(ratio))
        if ratio[i] > worst:
            worst, worst_z = float(ratio[i]), base + i
        if first_violation is None:
            bad = np.flatnonzero(ratio > Q_ERROR_CONSTANT)
            if bad.size:
                first_violation = base + int(bad[0])
        running = int(q[-1])
    return BoundReport.compare(
        "Q(z) error <= 0.68 sqrt(z)",
        worst,
        Q_ERROR_CONSTANT,
        strict=False,
        params={
            "z_max": z_max,
            "argmax_z": worst_z,
            "Q(z_max)": running,
            "first_violation": first_violation,
        },
    )


# -- binary dump -----------------------------------------------------------

_MAGIC = b"WBT1"
_HEADER = struct.Struct("<4sQQ")
RECORD_DTYPE = np.dtype([("mu", "<i1"), ("omega", "<u1"), ("phi", "<u8"), ("sigma", "<u8")])


def dump_table(table: ArithTable, path: str | Path) -> None:
    """Write the little-endian 'WBT1' format: header (magic, lo, hi), then one record per n."""
    records = np.empty(len(table), dtype=RECORD_DTYPE)
    records["mu"] = table.mu
    records["omega"] = table.omega
    records["phi"] = table.phi
    records["sigma"] = table.sigma
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(_MAGIC, table.lo, table.hi))
        fh.write(records.tobytes())


def load_table(path: str | Path) -> ArithTable:
    data = Path(path).read_bytes()
    magic, lo, hi = _HEADER.unpack_from(data)
    if magic != _MAGIC:
        raise ValueError(f"{path}: not a WBT1 table")
    records = np.frombuffer(data, dtype=RECORD_DTYPE, offset=_HEADER.size)
    if len(records) != hi - lo + 1:
        raise ValueError(f"{path}: expected {hi - lo + 1} records, found {len(records)}")
    return ArithTable(
        lo,
        hi,
        records["mu"].astype(np.int8),
        records["phi"].astype(np.uint64),
        records["sigma"].astype(np.uint64),
        records["omega"].astype(np.uint8),
    )


