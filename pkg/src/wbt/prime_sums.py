"""Weighted sums over primes in progressions and the weighted Brun-Titchmarsh bounds."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import _kernels
from .arith_tab import small_primes
from .errors import PreconditionError, ResourceError
from .reports import BoundReport
from .weights import SHAPES, Interval, WeightFunction, builtin, eval_weight, norms, rho

MAX_X = 10**12
PRIME_SUM_BUDGET = 10**8
WINDOW = 1 << 22
THEOREM_SLACK = 1e-9


def _base_primes(hi: int) -> np.ndarray:
    if hi > MAX_X + PRIME_SUM_BUDGET:
        raise ResourceError(f"prime enumeration is capped at {MAX_X + PRIME_SUM_BUDGET}")
    return small_primes(max(2, math.isqrt(hi) + 1))


def iter_prime_windows(lo: int, hi: int, window: int = WINDOW) -> Iterator[np.ndarray]:
    """Primes in [lo, hi], yielded window by window in ascending order."""
    lo = max(lo, 0)
    if hi < lo:
        return
    base = _base_primes(hi)
    flags = np.empty(min(window, hi - lo + 1), dtype=np.bool_)
    for start in range(lo, hi + 1, window):
        length = min(window, hi - start + 1)
        buf = flags[:length]
        _kernels.mark_composites(start, length, base, buf)
        yield start + np.flatnonzero(buf)


def primes_between(lo: int, hi: int) -> np.ndarray:
    """All primes in [lo, hi] as an int64 array."""
    parts = list(iter_prime_windows(lo, hi))
    return np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)


@dataclass(frozen=True)
class PrimeRange:
    """The primes in [lo, hi], materialized lazily one window at a time."""

    lo: int
    hi: int

    def __iter__(self) -> Iterator[int]:
        for chunk in iter_prime_windows(self.lo, self.hi):
            yield from chunk.tolist()

    def windows(self) -> Iterator[np.ndarray]:
        return iter_prime_windows(self.lo, self.hi)

    def count(self) -> int:
        return sum(len(c) for c in self.windows())


def is_probable_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for n < 3.3e24."""
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
    for p in small:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def pi_count(z: int) -> int:
    """pi(z), the number of primes <= z."""
    if z < 0:
        raise PreconditionError("pi_count needs z >= 0")
    return PrimeRange(0, z).count()


def pi_ap(x: int, k: int, l: int) -> int:
    """pi(x; k, l), the number of primes p <= x with p ≡ l (mod k)."""
    if k < 1:
        raise PreconditionError("modulus must be >= 1")
    return sum(int(np.count_nonzero(c % k == l % k)) for c in iter_prime_windows(0, x))


def weighted_prime_sum(f: WeightFunction, k: int = 1, l: int = 1) -> float:
    """Sum of f(p) over primes p in I with p ≡ l (mod k)."""
    if k < 1 or math.gcd(k, l) != 1:
        raise PreconditionError(f"need k >= 1 and gcd(k, l) = 1, got k={k}, l={l}")
    first, last = f.domain.integer_range()
    if last - first + 1 > PRIME_SUM_BUDGET:
        raise ResourceError(f"interval holds more than {PRIME_SUM_BUDGET} integers")
    if first > MAX_X:
        raise ResourceError(f"intervals must start below {MAX_X}")
    partials = []
    for chunk in iter_prime_windows(first, last):
        if k > 1:
            chunk = chunk[chunk % k == l % k]
        if chunk.size:
            partials.append(math.fsum(eval_weight(f, chunk.astype(np.float64)).tolist()))
    return math.fsum(partials)


def euler_phi(k: int) -> int:
    """phi(k) by trial-division factorization."""
    if k < 1:
        raise PreconditionError("phi needs k >= 1")
    result, n, p = k, k, 2
    while p * p <= n:
        if n % p == 0:
            while n % p == 0:
                n //= p
            result -= result // p
        p += 1 if p == 2 else 2
    if n > 1:
        result -= result // n
    return result


@dataclass(frozen=True)
class TheoremBound:
    theorem: str  # "T4_with_correction", "T4_factor3" or "T5"
    value: float | None
    rho: float
    applicable: bool


def theorem4_bounds(f: WeightFunction, k: int) -> tuple[TheoremBound, TheoremBound]:
    """The two bounds for primes ≡ l (mod k) in I; both need rho_I(f) > k.

    2 ||f||_1 / (phi(k) L) (1 + 8 / L) and 3 ||f||_1 / (phi(k) L), with L = log(rho_I(f) / k).
    """
    if k < 1:
        raise PreconditionError("modulus must be >= 1")
    r = rho(f)
    if not r > k:
        return (
            TheoremBound("T4_with_correction", None, r, False),
            TheoremBound("T4_factor3", None, r, False),
        )
    l1 = norms(f).l1
    phik = euler_phi(k)
    L = math.log(r / k)
    return (
        TheoremBound("T4_with_correction", 2 * l1 / (phik * L) * (1 + 8 / L), r, True),
        TheoremBound("T4_factor3", 3 * l1 / (phik * L), r, True),
    )


def theorem5_bound(f: WeightFunction) -> TheoremBound:
    """2 ||f||_1 / log(rho_I(f)) for the sum over all primes in I; needs rho_I(f) > 1."""
    r = rho(f)
    if not r > 1:
        return TheoremBound("T5", None, r, False)
    return TheoremBound("T5", 2 * norms(f).l1 / math.log(r), r, True)


def classical_brun_titchmarsh(y: float, k: int) -> float:
    """2y / (phi(k) log(y/k)) (1 + 8 / log(y/k)), the f ≡ 1 specialization."""
    L = math.log(y / k)
    return 2 * y / (euler_phi(k) * L) * (1 + 8 / L)


# -- corpus ----------------------------------------------------------------


@dataclass(frozen=True)
class CorpusCase:
    shape: str
    k: int
    l: int
    x: str
    y: str
    scale: float = 1.0
    resolution: int = 64

    def weight(self) -> WeightFunction:
        f = builtin(self.shape, Interval(self.x, self.y), self.resolution)
        return f.scaled(self.scale) if self.scale != 1.0 else f

    def to_line(self) -> str:
        return f"{self.shape} {self.k} {self.l} {self.x} {self.y} {self.scale!r} {self.resolution}"


def parse_corpus(text: str) -> list[CorpusCase]:
    """Lines ``shape kmod lres x y scale resolution``; blank lines and # comments ignored."""
    cases = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 7:
            raise PreconditionError(f"corpus line {lineno}: expected 7 fields, got {len(parts)}")
        shape, k, l, x, y, scale, res = parts
        if shape not in SHAPES:
            raise PreconditionError(f"corpus line {lineno}: unknown shape {shape!r}")
        try:
            case = CorpusCase(shape, int(k), int(l), x, y, float(scale), int(res))
            Interval(x, y)
        except (ValueError, ArithmeticError) as exc:
            raise PreconditionError(f"corpus line {lineno}: {exc}") from None
        if case.k < 1 or math.gcd(case.k, case.l) != 1:
            raise PreconditionError(f"corpus line {lineno}: need gcd(k, l) = 1")
        cases.append(case)
    return cases


DEFAULT_SHAPES = ("constant", "hat", "linear_ramp", "smooth_bump_approx")
DEFAULT_INTERVALS = (("0", "1000"), ("1000000", "10000"), ("1000000000", "100000"))
DEFAULT_MODULI = (1, 2, 3, 5, 12)


def default_corpus(
    shapes: Sequence[str] = DEFAULT_SHAPES,
    intervals: Sequence[tuple[str, str]] = DEFAULT_INTERVALS,
    moduli: Sequence[int] = DEFAULT_MODULI,
) -> list[CorpusCase]:
    """Every shape x interval x modulus, with every reduced residue class l in [1, k]."""
    return [
        CorpusCase(shape, k, l, x, y)
        for shape in shapes
        for x, y in intervals
        for k in moduli
        for l in range(1, k + 1)
        if math.gcd(k, l) == 1
    ]


def random_corpus(n: int, seed: int) -> list[CorpusCase]:
    """Random cases with x <= 10^9, y <= 10^5, k <= 30 and random scaling."""
    rng = random.Random(seed)
    out = []
    for _ in range(n):
        k = rng.randint(1, 30)
        l = rng.choice([r for r in range(1, k + 1) if math.gcd(r, k) == 1])
        x = rng.choice([rng.randint(0, 10**3), rng.randint(0, 10**6), rng.randint(0, 10**9)])
        y = rng.randint(10, 10**5)
        scale = round(rng.uniform(0.1, 10.0), 6)
        out.append(CorpusCase(rng.choice(SHAPES), k, l, str(x), str(y), scale, rng.choice([8, 64])))
    return out


def theorem_reports(
    f: WeightFunction, k: int, l: int, *, with_t5: bool | None = None, params: dict | None = None
) -> list[BoundReport]:
    """Both T4 bounds and, by default only for k = 1, the T5 bound on one weight.

    Inapplicable bounds (rho <= k, or rho <= 1) are reported with lhs and
    holds set to None and are excluded from any verdict.
    """
    total = weighted_prime_sum(f, k, l)
    bounds = list(theorem4_bounds(f, k))
    if with_t5 if with_t5 is not None else k == 1:
        bounds.append(theorem5_bound(f))
    nr = norms(f)
    base = {"k": k, "l": l, "l1": nr.l1, "sup": nr.sup, "tv": nr.tv, **(params or {})}
    reports = []
    for b in bounds:
        p = {**base, "rho": b.rho, "applicable": b.applicable, "prime_sum": total}
        if not b.applicable:
            reports.append(BoundReport(b.theorem, None, math.inf, None, None, 0.0, True, p))
            continue
        reports.append(
            BoundReport.compare(
                b.theorem, total, b.value, strict=True, slack=THEOREM_SLACK * b.value, params=p
            )
        )
    return reports


def check_case(case: CorpusCase) -> list[BoundReport]:
    params = {
        "shape": case.shape,
        "x": case.x,
        "y": case.y,
        "scale": case.scale,
        "resolution": case.resolution,
    }
    return theorem_reports(case.weight(), case.k, case.l, params=params)


def theorem_corpus_check(cases: Iterable[CorpusCase]) -> list[BoundReport]:
    out: list[BoundReport] = []
    for case in cases:
        out.extend(check_case(case))
    return out


@dataclass
class CorpusSummary:
    checked: int = 0
    passed: int = 0
    inapplicable: int = 0
    min_rel_margin: float = math.inf
    failures: list[BoundReport] = field(default_factory=list)

    @property
    def verdict(self) -> bool:
        return not self.failures

    @classmethod
    def of(cls, reports: Iterable[BoundReport]) -> CorpusSummary:
        s = cls()
        for r in reports:
            if r.holds is None:
                s.inapplicable += 1
                continue
            s.checked += 1
            s.min_rel_margin = min(s.min_rel_margin, r.margin / r.rhs)
            if r.holds:
                s.passed += 1
            else:
                s.failures.append(r)
        return s
