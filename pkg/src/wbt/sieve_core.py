"""Sieve sums S_k(z), H_k(z), Selberg weights, remainders and the weighted sieve bounds.

Notation: I = [x, x+y], A = I ∩ (l + kZ), A_d = {a in A : d | a}, and
P(z, k) is the product of the primes p <= z not dividing k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .arith_tab import ArithTable, small_primes, tabulate
from .errors import PreconditionError, ResourceError
from .reports import BoundReport
from .weights import WeightFunction, eval_weight, norms

ENUMERATION_BUDGET = 10**7
ERATOSTHENES_MAX_Z = 700
LAMBDA_MAX_Z = 10**5
# Tolerance for the non-strict proposition checks: pure rounding noise.
ROUNDING_SLACK = 1e-12


@dataclass(frozen=True)
class SieveParams:
    """Modulus k, residue l and sieve level z, with gcd(l, k) = 1."""

    k: int
    l: int
    z: int

    def __post_init__(self):
        if self.k < 1:
            raise PreconditionError(f"modulus k must be >= 1, got {self.k}")
        if self.z < 1:
            raise PreconditionError(f"sieve level z must be >= 1, got {self.z}")
        if math.gcd(self.l, self.k) != 1:
            raise PreconditionError(f"need gcd(l, k) = 1, got l={self.l}, k={self.k}")

    def sifting_primes(self) -> np.ndarray:
        """Primes p <= z with p not dividing k, i.e. the prime factors of P(z, k)."""
        ps = small_primes(self.z)
        return ps[self.k % ps != 0]

    def as_dict(self) -> dict[str, int]:
        return {"k": self.k, "l": self.l, "z": self.z}


def _table_for(z: int, tab: ArithTable | None) -> ArithTable:
    if tab is None:
        return tabulate(1, z)
    tab.require(1, z)
    return tab


def _squarefree_coprime_mask(tab: ArithTable, z: int, k: int) -> np.ndarray:
    """mu(n) != 0 and gcd(n, k) = 1 for n = 1..z (indexed n - 1)."""
    window = tab.window(1, z)
    mask = window.mu != 0
    if k > 1:
        n = np.arange(1, z + 1, dtype=np.int64)
        mask &= np.gcd(n, k) == 1
    return mask


def _compensated_sum(values: np.ndarray) -> float:
    return math.fsum(values.tolist())


def sieve_sum_S(p: SieveParams, tab: ArithTable | None = None) -> float:
    """S_k(z) = sum over n <= z, gcd(n, k) = 1 of mu(n)^2 / phi(n)."""
    tab = _table_for(p.z, tab)
    mask = _squarefree_coprime_mask(tab, p.z, p.k)
    phi = tab.window(1, p.z).phi[mask].astype(np.float64)
    return _compensated_sum(1.0 / phi)


def sieve_sum_H(p: SieveParams, tab: ArithTable | None = None) -> float:
    """H_k(z) = sum over n <= z, gcd(n, k) = 1 of mu(n)^2 sigma(n) / phi(n)."""
    tab = _table_for(p.z, tab)
    mask = _squarefree_coprime_mask(tab, p.z, p.k)
    w = tab.window(1, p.z)
    return _compensated_sum(w.sigma[mask].astype(np.float64) / w.phi[mask].astype(np.float64))


def support(p: SieveParams, tab: ArithTable | None = None) -> np.ndarray:
    """N_k: the squarefree n <= z coprime to k, ascending."""
    tab = _table_for(p.z, tab)
    return np.flatnonzero(_squarefree_coprime_mask(tab, p.z, p.k)) + 1


@dataclass(frozen=True)
class LambdaWeights:
    """Selberg weights lambda_n on their support N_k (both ascending in n)."""

    support: np.ndarray
    values: np.ndarray

    def __getitem__(self, n: int) -> float:
        i = int(np.searchsorted(self.support, n))
        if i == len(self.support) or self.support[i] != n:
            raise KeyError(n)
        return float(self.values[i])

    def as_dict(self) -> dict[int, float]:
        return dict(zip(self.support.tolist(), self.values.tolist()))

    def abs_sum(self) -> float:
        return _compensated_sum(np.abs(self.values))


def selberg_lambda(p: SieveParams, tab: ArithTable | None = None) -> LambdaWeights:
    """The minimizing Selberg weights for the quadratic form sum lambda lambda / [n1, n2].

    lambda_n = mu(n) (n / phi(n)) S_{nk}(z / n) / S_k(z), where S_{nk}(t) sums
    mu(m)^2 / phi(m) over m <= t coprime to nk. This gives lambda_1 = 1.
    """
    if p.z > LAMBDA_MAX_Z:
        raise ResourceError(f"selberg_lambda is capped at z <= {LAMBDA_MAX_Z}")
    tab = _table_for(p.z, tab)
    w = tab.window(1, p.z)
    sup = support(p, tab)
    inv_phi = 1.0 / w.phi.astype(np.float64)
    mask = _squarefree_coprime_mask(tab, p.z, p.k)
    total = _compensated_sum(inv_phi[mask])
    values = np.empty(len(sup), dtype=np.float64)
    for i, n in enumerate(sup.tolist()):
        m = sup[: np.searchsorted(sup, p.z // n, side="right")]
        m = m[np.gcd(m, n) == 1]
        inner = _compensated_sum(inv_phi[m - 1])
        values[i] = int(w.mu[n - 1]) * (n / float(w.phi[n - 1])) * inner / total
    return LambdaWeights(sup, values)


def quadratic_form(lam: LambdaWeights) -> float:
    """Brute-force sum over (n1, n2) in N_k^2 of lambda_n1 lambda_n2 / lcm(n1, n2)."""
    n = lam.support
    rows = []
    for i in range(len(n)):
        lcm = np.lcm(n[i], n)
        rows.append(_compensated_sum(lam.values[i] * lam.values / lcm))
    return math.fsum(rows)


# -- remainders and enumeration over A --------------------------------------


def _progression_start(first: int, residue: int, modulus: int) -> int:
    """Smallest n >= first with n ≡ residue (mod modulus)."""
    return first + (residue - first) % modulus


def progression(f: WeightFunction, k: int, l: int, d: int = 1) -> np.ndarray:
    """A_d as an int64 array: n in I with n ≡ l (mod k) and d | n. Requires gcd(d, k) = 1."""
    if k < 1 or d < 1:
        raise PreconditionError("need k >= 1 and d >= 1")
    if math.gcd(d, k) != 1:
        raise PreconditionError(f"need gcd(d, k) = 1, got d={d}, k={k}")
    modulus = k * d
    # CRT: n ≡ l (mod k), n ≡ 0 (mod d).
    residue = (d * ((l * pow(d, -1, k)) % k)) % modulus if k > 1 else 0
    first, last = f.domain.integer_range()
    start = _progression_start(first, residue, modulus)
    if start > last:
        return np.zeros(0, dtype=np.int64)
    count = (last - start) // modulus + 1
    if count > ENUMERATION_BUDGET:
        raise ResourceError(f"{count} points to enumerate, budget is {ENUMERATION_BUDGET}")
    return start + modulus * np.arange(count, dtype=np.int64)


def _weighted_sum(f: WeightFunction, points: np.ndarray) -> float:
    if points.size == 0:
        return 0.0
    return _compensated_sum(eval_weight(f, points.astype(np.float64)))


def remainder_r(f: WeightFunction, k: int, l: int, d: int) -> float:
    """r_d = sum over A_d of f(n) minus (1 / kd) * integral of f over I."""
    pts = progression(f, k, l, d)
    return _weighted_sum(f, pts) - norms(f).l1 / (k * d)


def remainder_report(f: WeightFunction, k: int, l: int, d: int) -> BoundReport:
    """|r_d| <= ||f||_inf + ||f'||_1, valid whenever gcd(d, k) = 1."""
    pts = progression(f, k, l, d)
    nr = norms(f)
    total = _weighted_sum(f, pts)
    main = nr.l1 / (k * d)
    return BoundReport.compare(
        "remainder |r_d|",
        abs(total - main),
        nr.sup + nr.tv,
        strict=False,
        slack=ROUNDING_SLACK * (total + main + nr.sup + nr.tv),
        params={"k": k, "l": l, "d": d, "interval": str(f.domain), "points": int(pts.size)},
    )


def sifted_sum(f: WeightFunction, p: SieveParams) -> float:
    """Sum of f(n) over n in A with gcd(n, P(z, k)) = 1, by direct enumeration."""
    pts = progression(f, p.k, p.l)
    if pts.size == 0:
        return 0.0
    keep = np.ones(pts.size, dtype=bool)
    a0 = int(pts[0])
    for q in p.sifting_primes().tolist():
        # a0 + k*i ≡ 0 (mod q)  <=>  i ≡ -a0 * k^{-1} (mod q)
        i0 = (-a0 * pow(p.k, -1, q)) % q
        keep[i0::q] = False
    return _weighted_sum(f, pts[keep])


def _lhs_or_none(f: WeightFunction, p: SieveParams, enumerate_lhs: bool) -> float | None:
    try:
        return sifted_sum(f, p)
    except ResourceError:
        if enumerate_lhs:
            raise
        return None


def weighted_selberg_bound(
    f: WeightFunction,
    p: SieveParams,
    tab: ArithTable | None = None,
    *,
    enumerate_lhs: bool = True,
) -> BoundReport:
    """||f||_1 / (k S_k(z)) + (||f||_inf + ||f'||_1) H_k(z)^2 / S_k(z)^2 against the sifted sum."""
    tab = _table_for(p.z, tab)
    nr = norms(f)
    s = sieve_sum_S(p, tab)
    h = sieve_sum_H(p, tab)
    rhs = nr.l1 / (p.k * s) + (nr.sup + nr.tv) * (h / s) ** 2
    lhs = _lhs_or_none(f, p, enumerate_lhs)
    return BoundReport.compare(
        "weighted Selberg sieve",
        lhs,
        rhs,
        strict=False,
        slack=ROUNDING_SLACK * (rhs + (lhs or 0.0)),
        params={**p.as_dict(), "interval": str(f.domain), "S": s, "H": h},
    )


def mertens_product(p: SieveParams) -> float:
    """Product over p <= z, p not dividing k, of (1 - 1/p)."""
    ps = p.sifting_primes()
    return math.exp(math.fsum(np.log1p(-1.0 / ps.astype(np.float64)).tolist()))


def weighted_eratosthenes_bound(
    f: WeightFunction,
    p: SieveParams,
    tab: ArithTable | None = None,
    *,
    enumerate_lhs: bool = True,
) -> BoundReport:
    """||f||_1 / k * prod(1 - 1/p) + (||f||_inf + ||f'||_1) 2^pi(z) against the sifted sum."""
    if p.z > ERATOSTHENES_MAX_Z:
        raise PreconditionError(f"Eratosthenes bound needs z <= {ERATOSTHENES_MAX_Z}")
    nr = norms(f)
    pi_z = len(small_primes(p.z))
    rhs = nr.l1 / p.k * mertens_product(p) + (nr.sup + nr.tv) * 2.0**pi_z
    lhs = _lhs_or_none(f, p, enumerate_lhs)
    return BoundReport.compare(
        "weighted Eratosthenes sieve",
        lhs,
        rhs,
        strict=False,
        slack=ROUNDING_SLACK * (rhs + (lhs or 0.0)),
        params={**p.as_dict(), "interval": str(f.domain), "pi_z": pi_z},
    )
