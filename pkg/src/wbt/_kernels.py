"""Compiled inner loops (numba). Everything here is nogil so segment work can run on threads."""

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def tabulate_segment(base, length, primes):
    """mu, phi, sigma, omega for n in [base, base + length), base >= 1.

    ``primes`` must contain every prime p with p*p < base + length.
    """
    rem = np.empty(length, dtype=np.int64)
    mu = np.ones(length, dtype=np.int8)
    phi = np.ones(length, dtype=np.int64)
    sigma = np.ones(length, dtype=np.int64)
    omega = np.zeros(length, dtype=np.uint8)
    for i in range(length):
        rem[i] = base + i
    end = base + length
    for idx in range(primes.shape[0]):
        p = primes[idx]
        if p * p >= end:
            break
        r = base % p
        start = 0 if r == 0 else p - r
        for j in range(start, length, p):
            m = rem[j] // p
            pp = p
            e = 1
            while m % p == 0:
                m //= p
                pp *= p
                e += 1
            rem[j] = m
            phi[j] *= pp - pp // p
            sigma[j] *= (pp * p - 1) // (p - 1)
            omega[j] += 1
            if e >= 2:
                mu[j] = 0
            else:
                mu[j] = -mu[j]
    for j in range(length):
        q = rem[j]
        if q > 1:
            phi[j] *= q - 1
            sigma[j] *= q + 1
            omega[j] += 1
            mu[j] = -mu[j]
    return mu, phi, sigma, omega


@njit(cache=True, nogil=True)
def mark_composites(lo, length, primes, out):
    """out[i] = True iff lo + i is prime (lo >= 0). Needs all primes p with p*p <= lo+length-1."""
    for i in range(length):
        out[i] = True
    for i in range(min(length, max(0, 2 - lo))):
        out[i] = False
    end = lo + length
    for idx in range(primes.shape[0]):
        p = primes[idx]
        if p * p >= end:
            break
        first = p * p
        if first < lo:
            r = lo % p
            first = lo if r == 0 else lo + p - r
        for j in range(first - lo, length, p):
            out[j] = False


@njit(cache=True, nogil=True)
def squarefree_flags(lo, length, primes, out):
    """out[i] = True iff lo + i is squarefree (lo >= 1)."""
    for i in range(length):
        out[i] = True
    end = lo + length
    for idx in range(primes.shape[0]):
        p = primes[idx]
        sq = p * p
        if sq >= end:
            break
        r = lo % sq
        start = 0 if r == 0 else sq - r
        for j in range(start, length, sq):
            out[j] = False


@njit(cache=True, nogil=True)
def neumaier_prefix(terms):
    """Running compensated sums of ``terms`` starting from zero.

    Returns (hi, lo) arrays with hi[i] + lo[i] the sum of terms[0..i].
    """
    n = terms.shape[0]
    hi = np.empty(n, dtype=np.float64)
    lo = np.empty(n, dtype=np.float64)
    s = 0.0
    c = 0.0
    for i in range(n):
        x = terms[i]
        t = s + x
        if abs(s) >= abs(x):
            c += (s - t) + x
        else:
            c += (x - t) + s
        s = t
        hi[i] = s
        lo[i] = c
    return hi, lo


@njit(cache=True, nogil=True)
def neumaier_total(terms):
    s = 0.0
    c = 0.0
    for i in range(terms.shape[0]):
        x = terms[i]
        t = s + x
        if abs(s) >= abs(x):
            c += (s - t) + x
        else:
            c += (x - t) + s
        s = t
    return s, c
