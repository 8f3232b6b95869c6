"""Piecewise-linear weight functions on I = [x, x + y] with exact norms.

A weight is stored by its breakpoints and the values there; between
breakpoints it is linear. For such functions the L1 norm is a sum of
trapezoids, the sup norm is the largest value, and the L1 norm of the
derivative is the total variation, so all three are closed-form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from .errors import DomainError, PreconditionError

Real = Union[int, float, str, Fraction, Decimal]

SHAPES = ("constant", "linear_ramp", "hat", "smooth_bump_approx")


def exact(value: Real) -> Fraction:
    """Exact rational for an endpoint; floats go through their decimal repr."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        if not math.isfinite(value):
            raise PreconditionError(f"endpoint must be finite, got {value}")
        return Fraction(Decimal(repr(value)))
    if isinstance(value, (str, Decimal)):
        return Fraction(Decimal(value))
    return Fraction(value)


@dataclass(frozen=True)
class Interval:
    """The closed interval [x, x + y] with exact rational endpoints."""

    x: Fraction
    y: Fraction

    def __init__(self, x: Real, y: Real):
        fx, fy = exact(x), exact(y)
        if fx < 0 or fy < 0:
            raise PreconditionError(f"need x >= 0 and y >= 0, got x={fx}, y={fy}")
        object.__setattr__(self, "x", fx)
        object.__setattr__(self, "y", fy)

    @property
    def right(self) -> Fraction:
        return self.x + self.y

    def integer_range(self) -> tuple[int, int]:
        """First and last integer in the interval (first > last if there is none)."""
        return math.ceil(self.x), math.floor(self.right)

    def __str__(self) -> str:
        return f"[{float(self.x)}, {float(self.right)}]"


@dataclass(frozen=True)
class Norms:
    l1: float
    sup: float
    tv: float

    @property
    def sobolev(self) -> float:
        """||f||_1 + ||f'||_1."""
        return self.l1 + self.tv


class WeightFunction:
    """Non-negative piecewise-linear function on an interval.

    ``breakpoints`` must start at x, end at x + y and be strictly increasing
    (a single breakpoint is allowed only when y = 0).
    """

    __slots__ = ("domain", "breakpoints", "values")

    def __init__(self, domain: Interval, breakpoints: Sequence[float], values: Sequence[float]):
        t = np.array(breakpoints, dtype=np.float64)
        v = np.array(values, dtype=np.float64)
        if t.ndim != 1 or t.shape != v.shape or t.size == 0:
            raise PreconditionError("breakpoints and values must be equal-length, non-empty")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(v))):
            raise PreconditionError("breakpoints and values must be finite")
        if np.any(v < 0):
            raise PreconditionError("weight functions must be non-negative")
        if t.size == 1:
            if domain.y != 0:
                raise PreconditionError("a single breakpoint needs a degenerate interval (y = 0)")
        elif np.any(np.diff(t) <= 0):
            raise PreconditionError("breakpoints must be strictly increasing")
        if t[0] != float(domain.x) or t[-1] != float(domain.right):
            raise PreconditionError(
                f"breakpoints must span the domain {domain}, got [{t[0]}, {t[-1]}]"
            )
        t.flags.writeable = False
        v.flags.writeable = False
        self.domain = domain
        self.breakpoints = t
        self.values = v

    def __repr__(self) -> str:
        return f"WeightFunction({self.domain}, {len(self.breakpoints)} breakpoints)"

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, WeightFunction)
            and self.domain == other.domain
            and np.array_equal(self.breakpoints, other.breakpoints)
            and np.array_equal(self.values, other.values)
        )

    def __hash__(self) -> int:
        return hash((self.domain, self.breakpoints.tobytes(), self.values.tobytes()))

    @property
    def is_zero(self) -> bool:
        return not np.any(self.values)

    def norms(self) -> Norms:
        return norms(self)

    def __call__(self, t):
        return eval_weight(self, t)

    def scaled(self, c: float) -> WeightFunction:
        if c < 0:
            raise PreconditionError("scale factor must be >= 0")
        return WeightFunction(self.domain, self.breakpoints, self.values * c)

    def normalized(self) -> WeightFunction:
        """f / (||f||_inf + ||f'||_1); the zero function is returned unchanged."""
        n = norms(self)
        d = n.sup + n.tv
        return self if d == 0 else self.scaled(1.0 / d)

    def refined(self, t: float) -> WeightFunction:
        """Same function with an extra breakpoint at t (no-op if t is already one)."""
        if t in self.breakpoints:
            return self
        value = float(eval_weight(self, t))
        i = int(np.searchsorted(self.breakpoints, t))
        bp = np.insert(self.breakpoints, i, t)
        vals = np.insert(self.values, i, value)
        return WeightFunction(self.domain, bp, vals)


def norms(f: WeightFunction) -> Norms:
    t, v = f.breakpoints, f.values
    if t.size == 1:
        return Norms(0.0, float(v[0]), 0.0)
    l1 = math.fsum(((t[1:] - t[:-1]) * (v[1:] + v[:-1]) * 0.5).tolist())
    tv = math.fsum(np.abs(np.diff(v)).tolist())
    return Norms(l1, float(v.max()), tv)


def rho(f: WeightFunction) -> float:
    """||f||_1 / (||f||_inf + ||f'||_1), and 0 for the zero function."""
    n = norms(f)
    d = n.sup + n.tv
    return 0.0 if d == 0 else n.l1 / d


def eval_weight(f: WeightFunction, t):
    """Linear interpolation; accepts a scalar or an array of points inside the domain."""
    arr = np.asarray(t, dtype=np.float64)
    lo, hi = f.breakpoints[0], f.breakpoints[-1]
    if arr.size and (arr.min() < lo or arr.max() > hi):
        raise DomainError(f"point outside the domain [{lo}, {hi}]")
    out = np.interp(arr, f.breakpoints, f.values)
    return float(out) if out.ndim == 0 else out


def builtin(shape: str, domain: Interval, resolution: int = 64) -> WeightFunction:
    """Standard test weights with peak value 1.

    ``constant``, ``linear_ramp`` (0 at x up to 1 at x+y) and ``hat`` (0, 1, 0)
    are already piecewise linear and ignore ``resolution``;
    ``smooth_bump_approx`` samples (1 - (2(t-x)/y - 1)^2)^2 at resolution+1
    equispaced points.
    """
    if resolution < 1:
        raise PreconditionError(f"resolution must be >= 1, got {resolution}")
    if shape not in SHAPES:
        raise PreconditionError(f"unknown shape {shape!r}; expected one of {SHAPES}")
    a, b = float(domain.x), float(domain.right)
    if domain.y == 0:
        return WeightFunction(domain, [a], [1.0 if shape == "constant" else 0.0])
    if shape == "constant":
        return WeightFunction(domain, [a, b], [1.0, 1.0])
    if shape == "linear_ramp":
        return WeightFunction(domain, [a, b], [0.0, 1.0])
    if shape == "hat":
        mid = float(domain.x + domain.y / 2)
        return WeightFunction(domain, [a, mid, b], [0.0, 1.0, 0.0])
    if shape == "smooth_bump_approx":
        y = domain.y
        ts = [float(domain.x + y * Fraction(i, resolution)) for i in range(resolution + 1)]
        u = [2 * Fraction(i, resolution) - 1 for i in range(resolution + 1)]
        vals = [float((1 - ui * ui) ** 2) for ui in u]
        return WeightFunction(domain, ts, vals)
    raise AssertionError(shape)


def parse_weight_text(text: str) -> WeightFunction:
    """Parse one ``t value`` pair per line (blank lines and ``#`` comments ignored)."""
    ts: list[str] = []
    vs: list[float] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise PreconditionError(f"line {lineno}: expected 't value', got {raw!r}")
        try:
            float(parts[0])
            vs.append(float(parts[1]))
        except ValueError as exc:
            raise PreconditionError(f"line {lineno}: {exc}") from None
        ts.append(parts[0])
    if not ts:
        raise PreconditionError("no breakpoints given")
    x = exact(ts[0])
    domain = Interval(x, exact(ts[-1]) - x)
    return WeightFunction(domain, [float(exact(t)) for t in ts], vs)


def format_weight_text(f: WeightFunction) -> str:
    return "".join(f"{t!r} {v!r}\n" for t, v in zip(f.breakpoints.tolist(), f.values.tolist()))

