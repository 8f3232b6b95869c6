"""Zeta values, Euler products h(s) and h~(s), the constant A, and the H_1 / S_1 asymptotics.

Four Euler-product variants appear:

    H        prod (1 + 2 / ((1 + p^s)(p - 1)))
    H_tilde  prod (1 + 2 / ((p^s - 1)(p - 1)))
    S        prod (1 + 1 / ((1 + p^s)(p - 1)))
    S_tilde  prod (1 + 1 / ((p^s - 1)(p - 1)))

A certified upper bound for the infinite product multiplies the partial
product over p < cutoff by a bound for the tail. For p >= P the factor is
at most 1 + cK p^(-1-s) <= (1 + p^(-1-s))^m with m = ceil(cK), and the
product of (1 + p^(-1-s)) over all p is zeta(1+s) / zeta(2+2s).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from ._kernels import neumaier_prefix
from .arith_tab import DEFAULT_SEGMENT_LENGTH, small_primes, tabulate
from .errors import PreconditionError, RangeError
from .prime_sums import iter_prime_windows
from .reports import BoundReport, ConstantsReport
from .sweep import stream_prefix

EULER_GAMMA = float(np.euler_gamma)
ZETA_TERMS = 10**6
FIFTEEN_OVER_PI2 = 15.0 / math.pi**2
H_ERROR_CONSTANT = 47.0
S_ERROR_CONSTANT = 58.0
S_JUDGED_MIN_Z = 10**9

VARIANTS = {
    # name: (numerator c, sign in p^s +- 1)
    "H": (2, +1),
    "H_tilde": (2, -1),
    "S": (1, +1),
    "S_tilde": (1, -1),
}


def zeta(s: float, terms: int = ZETA_TERMS) -> float:
    """zeta(s) for real s > 1: direct sum below N plus an Euler-Maclaurin tail from N."""
    if not s > 1:
        raise PreconditionError(f"zeta needs s > 1, got {s}")
    n = np.arange(1, terms, dtype=np.float64)
    head = math.fsum((n**-s).tolist())
    N = float(terms)
    tail = (
        N ** (1 - s) / (s - 1)
        + 0.5 * N**-s
        + s * N ** (-s - 1) / 12
        - s * (s + 1) * (s + 2) * N ** (-s - 3) / 720
    )
    return head + tail


def zeta_constants() -> list[ConstantsReport]:
    z2, z4, z32, z3 = zeta(2.0), zeta(4.0), zeta(1.5), zeta(3.0)
    ratio = (z32 / z3) ** 3
    return [
        ConstantsReport.check("zeta(2) = pi^2/6", z2, math.pi**2 / 6, "==", abs_tol=1e-10),
        ConstantsReport.check("zeta(4) = pi^4/90", z4, math.pi**4 / 90, "==", abs_tol=1e-10),
        ConstantsReport.check(
            "zeta(3/2)^3 / zeta(3)^3 <= 10.27",
            ratio,
            10.27,
            "<=",
            details={"zeta(3/2)": z32, "zeta(3)": z3},
        ),
    ]


@dataclass(frozen=True)
class EulerProductSpec:
    variant: str
    s: float
    cutoff: int
    tail_strategy: str = "none"  # or "zeta_ratio_bound"

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise PreconditionError(f"unknown variant {self.variant!r}; expected {list(VARIANTS)}")
        if not self.s > 0:
            raise PreconditionError("s must be > 0")
        if self.cutoff < 2:
            raise PreconditionError("cutoff must be >= 2")
        if self.tail_strategy not in ("none", "zeta_ratio_bound"):
            raise PreconditionError(f"unknown tail strategy {self.tail_strategy!r}")

    def log_factors(self, primes: np.ndarray) -> np.ndarray:
        c, sign = VARIANTS[self.variant]
        p = primes.astype(np.float64)
        return np.log1p(c / ((p**self.s + sign) * (p - 1.0)))

    def tail_power(self) -> int:
        """m with factor_p <= (1 + p^(-1-s))^m for every prime p >= cutoff."""
        c, sign = VARIANTS[self.variant]
        P = float(self.cutoff)
        # (p^s + sign)(p - 1) >= p^(1+s) / K for all p >= P
        if sign > 0:
            K = 1.0 / (1.0 - 1.0 / P)
        else:
            K = 1.0 / ((1.0 - P**-self.s) * (1.0 - 1.0 / P))
        return math.ceil(c * K)


@dataclass(frozen=True)
class EulerProductValue:
    partial: float
    bound: float | None
    normalized_partial: float | None  # prod over p < cutoff of factor / (1 + p^(-1-s))^m
    tail_power: int | None
    zeta_ratio: float | None  # zeta(1+s) / zeta(2+2s)


def _primes_below(cutoff: int, primes: Sequence[int] | np.ndarray | None) -> np.ndarray:
    required = small_primes(cutoff - 1)
    if primes is None:
        return required
    arr = np.asarray(primes, dtype=np.int64)
    arr = arr[arr < cutoff]
    if not np.array_equal(arr, required):
        raise RangeError(f"prime list must be exactly the primes in [2, {cutoff})")
    return arr


def euler_product_value(
    spec: EulerProductSpec, primes: Sequence[int] | np.ndarray | None = None
) -> EulerProductValue:
    ps = _primes_below(spec.cutoff, primes)
    logs = spec.log_factors(ps)
    partial = math.exp(math.fsum(logs.tolist()))
    if spec.tail_strategy == "none":
        return EulerProductValue(partial, None, None, None, None)
    m = spec.tail_power()
    u = ps.astype(np.float64) ** (-1.0 - spec.s)
    normalized = math.exp(math.fsum((logs - m * np.log1p(u)).tolist()))
    ratio = zeta(1.0 + spec.s) / zeta(2.0 + 2.0 * spec.s)
    return EulerProductValue(partial, normalized * ratio**m, normalized, m, ratio)


def euler_product(spec: EulerProductSpec, primes: Sequence[int] | np.ndarray | None = None) -> float:
    """Partial product over p < cutoff, or a certified upper bound for the full product."""
    v = euler_product_value(spec, primes)
    return v.partial if v.bound is None else v.bound


def h_product_reports(cutoffs: Iterable[int] = (10**3, 10**4, 10**6)) -> list[ConstantsReport]:
    reports = []
    for P in cutoffs:
        partial = euler_product(EulerProductSpec("H", 1.0, P))
        reports.append(
            ConstantsReport.check(
                f"h(1) partial product p<{P} within 2/(P-1) of 5/2",
                abs(partial - 2.5),
                2.0 / (P - 1),
                "<=",
                details={"partial": partial},
            )
        )
    v = euler_product_value(EulerProductSpec("H_tilde", 0.5, 10**4, "zeta_ratio_bound"))
    reports += [
        ConstantsReport.check(
            "h~(1/2) intermediate product over p<10^4 <= 3.5",
            v.normalized_partial,
            3.5,
            "<=",
            details={"tail_power": v.tail_power},
        ),
        ConstantsReport.check(
            "h~(1/2), H variant, <= 36",
            v.bound,
            36.0,
            "<=",
            details={"zeta_ratio_power": v.zeta_ratio**v.tail_power, "tail_power": v.tail_power},
        ),
    ]
    return reports


def s_product_reports() -> list[ConstantsReport]:
    out = []
    for s, bound in ((0.375, 19.0), (0.5, 9.4)):
        v = euler_product_value(EulerProductSpec("S_tilde", s, 10**4, "zeta_ratio_bound"))
        out.append(
            ConstantsReport.check(
                f"h~({s}), S variant, <= {bound}",
                v.bound,
                bound,
                "<=",
                details={"intermediate": v.normalized_partial, "tail_power": v.tail_power},
            )
        )
    partial = euler_product(EulerProductSpec("S", 1.0, 10**6))
    z2 = zeta(2.0)
    out.append(
        ConstantsReport.check(
            "h(1), S variant, = zeta(2): partial product p<10^6",
            partial,
            z2,
            "==",
            abs_tol=2.0 / (10**6 - 1),
        )
    )
    out.append(constant_A())
    a, err = constant_A_value()
    out.append(
        ConstantsReport.check(
            "|A| <= 1.8 (series to 10^6 plus tail bound)",
            abs(a) + err,
            1.8,
            "<=",
            details={"A": a, "error_bound": err},
        )
    )
    return out


# -- the constant A -----------------------------------------------------------


def mu_log_sum(N: int) -> float:
    """sum over d <= N of mu(d) log(d) / d^2."""
    tab = tabulate(1, N)
    d = np.arange(1, N + 1, dtype=np.float64)
    terms = tab.mu.astype(np.float64) * np.log(d) / (d * d)
    return math.fsum(terms.tolist())


def log_tail_integral(N: float) -> float:
    """Integral of log(t)/t^2 from N to infinity, which is (log N + 1) / N."""
    return (math.log(N) + 1.0) / N


def constant_A(truncation: int = 100) -> ConstantsReport:
    """|A| <= C0/zeta(2) + 2|sum_{d<=100} mu(d)log(d)/d^2| + 2 * tail integral <= 1.8."""
    z2 = zeta(2.0)
    head = mu_log_sum(truncation)
    bound = EULER_GAMMA / z2 + 2.0 * abs(head) + 2.0 * log_tail_integral(truncation)
    return ConstantsReport.check(
        "|A| <= 1.8",
        bound,
        1.8,
        "<=",
        details={"partial_sum": head, "truncation": truncation},
    )


def constant_A_value(N: int = 10**6) -> tuple[float, float]:
    """A = C0/zeta(2) - 2 sum mu(d) log(d) / d^2, truncated at N, with its error bound."""
    return (
        EULER_GAMMA / zeta(2.0) - 2.0 * mu_log_sum(N),
        2.0 * log_tail_integral(N),
    )


# -- elementary inequalities ----------------------------------------------------


def log_grid(lo: float, hi: float, n: int) -> np.ndarray:
    return np.geomspace(lo, hi, n)


def sqrt_inequality_holds(t: np.ndarray) -> bool:
    """(sqrt(t) - 1)(t - 1) >= (2/3) t^(3/2)."""
    return bool(np.all((np.sqrt(t) - 1) * (t - 1) >= (2.0 / 3.0) * t**1.5))


def power_inequality_holds(t: np.ndarray, sigma: float) -> bool:
    """t^(1+sigma) - t^sigma - t + 1 >= t^(1+sigma) / 2."""
    return bool(np.all(t ** (1 + sigma) - t**sigma - t + 1 >= 0.5 * t ** (1 + sigma)))


def log_power_inequality_holds(z: np.ndarray) -> bool:
    """log(z) <= 1.56 z^(1/8)."""
    return bool(np.all(np.log(z) <= 1.56 * z**0.125))


def elementary_reports(points: int = 2000) -> list[ConstantsReport]:
    out = []
    t16 = log_grid(16, 1e6, points)
    out.append(_bool_report("(sqrt t - 1)(t - 1) >= 2/3 t^1.5 on t in [16, 1e6]", sqrt_inequality_holds(t16)))
    t20 = log_grid(20, 1e6, points)
    for sigma in (0.25, 0.375, 0.5, 1.0):
        out.append(
            _bool_report(
                f"t^(1+s) - t^s - t + 1 >= t^(1+s)/2, s={sigma}, t in [20, 1e6]",
                power_inequality_holds(t20, sigma),
            )
        )
    zs = log_grid(1e9, 1e30, points)
    out.append(_bool_report("log z <= 1.56 z^(1/8) on z in [1e9, 1e30]", log_power_inequality_holds(zs)))
    return out


def _bool_report(name: str, ok: bool) -> ConstantsReport:
    return ConstantsReport(name, float(ok), 1.0, "==", ok)


# -- asymptotics of H_1 and S_1 -----------------------------------------------------


def _h_report(worst: float, worst_z: int, params: dict) -> BoundReport:
    return BoundReport.compare(
        "|H_1(z) - 15z/pi^2| <= 47 sqrt(z)",
        worst,
        H_ERROR_CONSTANT,
        strict=False,
        params={**params, "argmax_z": worst_z},
    )


def verify_H_asymptotic(z_samples: Iterable[int], tab=None) -> BoundReport:
    """Check the H_1 error bound at the given z; lhs is the largest |error| / sqrt(z)."""
    zs = sorted({int(z) for z in z_samples})
    if not zs or zs[0] < 1:
        raise PreconditionError("z samples must be >= 1")
    if tab is None:
        tab = tabulate(1, zs[-1])
    tab.require(1, zs[-1])
    w = tab.window(1, zs[-1])
    terms = np.where(w.mu != 0, w.sigma.astype(np.float64) / w.phi.astype(np.float64), 0.0)
    hi, lo = neumaier_prefix(terms)
    idx = np.array(zs) - 1
    z = np.array(zs, dtype=np.float64)
    err = np.abs((hi[idx] + lo[idx]) - FIFTEEN_OVER_PI2 * z) / np.sqrt(z)
    i = int(np.argmax(err))
    return _h_report(float(err[i]), zs[i], {"samples": len(zs), "z_max": zs[-1]})


def verify_H_dense(z_max: int, segment_length: int = DEFAULT_SEGMENT_LENGTH) -> BoundReport:
    """The H_1 error bound at every integer 1 <= z <= z_max, via the incremental stream."""
    if z_max < 1:
        raise PreconditionError("z_max must be >= 1")
    worst, worst_z = -1.0, 0
    for block in stream_prefix(z_max, segment_length=segment_length):
        z = block.z.astype(np.float64)
        err = np.abs(block.H_hi - FIFTEEN_OVER_PI2 * z) / np.sqrt(z)
        i = int(np.argmax(err))
        if err[i] > worst:
            worst, worst_z = float(err[i]), int(block.base + i)
    return _h_report(worst, worst_z, {"z_max": z_max, "dense": True})


@dataclass(frozen=True)
class ConstantB:
    value: float
    tail_bound: float
    prime_cutoff: int


def constant_B(prime_cutoff: int = 10**8) -> ConstantB:
    """C0 + sum over p < cutoff of log(p) / (p(p-1)), with a bound on the omitted tail.

    For p >= 11, p(p-1) >= p^2 / 1.1, so the tail is at most
    1.1 * (log N + 1) / N by comparison with the integral of log(t)/t^2.
    """
    if prime_cutoff < 11:
        raise PreconditionError("prime cutoff must be >= 11")
    partials = []
    for chunk in iter_prime_windows(2, prime_cutoff - 1):
        p = chunk.astype(np.float64)
        partials.append(math.fsum((np.log(p) / (p * (p - 1.0))).tolist()))
    value = EULER_GAMMA + math.fsum(partials)
    return ConstantB(value, 1.1 * log_tail_integral(prime_cutoff), prime_cutoff)


def mertens_head_report() -> ConstantsReport:
    """C0 + sum_{p<1000} log(p)/(p(p-1)) - 0.002 >= 1.32."""
    head = constant_B(1000).value
    return ConstantsReport.check(
        "C0 + sum_{p<1000} log p/(p(p-1)) - 0.002 >= 1.32",
        head - 0.002,
        1.32,
        ">=",
    )


def verify_S_asymptotic(
    z_samples: Iterable[int],
    *,
    B: ConstantB | None = None,
    segment_length: int = DEFAULT_SEGMENT_LENGTH,
) -> tuple[list[BoundReport], list[dict]]:
    """Check S_1 against log z + B at each sample.

    Samples with z >= 10^9 are judged: |S_1(z) - log z - B| <= 58/sqrt(z)
    (with B's tail bound counted against us) and S_1(z) >= log z + 1.32.
    Smaller samples only produce informational residual records.
    """
    zs = sorted({int(z) for z in z_samples})
    if not zs or zs[0] < 1:
        raise PreconditionError("z samples must be >= 1")
    B = B or constant_B()
    values: dict[int, float] = {}
    pending = list(zs)
    for block in stream_prefix(zs[-1], segment_length=segment_length):
        end = block.base + len(block.S_hi) - 1
        while pending and pending[0] <= end:
            z = pending.pop(0)
            j = z - block.base
            values[z] = float(block.S_hi[j] + block.S_lo[j])
    reports: list[BoundReport] = []
    residuals: list[dict] = []
    for z in zs:
        s1 = values[z]
        resid = s1 - math.log(z) - B.value
        residuals.append(
            {"z": z, "S1": s1, "residual": resid, "scaled_residual": resid * math.sqrt(z)}
        )
        if z >= S_JUDGED_MIN_Z:
            reports.append(
                BoundReport.compare(
                    "|S_1(z) - log z - B| <= 58/sqrt(z)",
                    abs(resid) + B.tail_bound,
                    S_ERROR_CONSTANT / math.sqrt(z),
                    strict=False,
                    params={"z": z, "B": B.value},
                )
            )
            reports.append(
                BoundReport.compare(
                    "S_1(z) >= log z + 1.32",
                    math.log(z) + 1.32,
                    s1,
                    strict=False,
                    params={"z": z},
                )
            )
    return reports, residuals


def all_constants(quick: bool = True) -> list[ConstantsReport]:
    """Every constants check as a flat list."""
    reports = zeta_constants() + h_product_reports() + s_product_reports() + elementary_reports()
    reports.append(mertens_head_report())
    B = constant_B(10**6 if quick else 10**8)
    reports.append(
        ConstantsReport.check(
            "B = C0 + sum_p log p/(p(p-1)) >= 1.32 (tail counted against B)",
            B.value,
            1.32 + B.tail_bound,
            ">=",
            details={"B": B.value, "prime_cutoff": B.prime_cutoff, "tail_bound": B.tail_bound},
        )
    )
    return reports
