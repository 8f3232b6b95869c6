import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from wbt.errors import PreconditionError, ResourceError
from wbt.prime_sums import (
    CorpusCase,
    CorpusSummary,
    PrimeRange,
    check_case,
    classical_brun_titchmarsh,
    default_corpus,
    euler_phi,
    is_probable_prime,
    parse_corpus,
    pi_ap,
    pi_count,
    primes_between,
    random_corpus,
    theorem4_bounds,
    theorem5_bound,
    theorem_corpus_check,
    weighted_prime_sum,
)
from wbt.weights import Interval, WeightFunction, builtin, norms, rho


def const(x, y, c=1.0):
    return builtin("constant", Interval(x, y)).scaled(c)


def test_prime_counts():
    assert pi_count(10) == 4
    assert pi_count(1) == 0
    assert pi_count(0) == 0
    assert pi_count(10**6) == 78498
    assert pi_count(10**4) == sum(oracles.is_prime(n) for n in range(10**4 + 1))


def test_pi_ap():
    assert pi_ap(20, 4, 1) == 3
    assert pi_ap(10**5, 1, 0) == pi_count(10**5)
    assert sum(pi_ap(10**5, 10, l) for l in (1, 3, 7, 9)) == pi_count(10**5) - 2


def test_prime_windows_against_trial_division():
    rng = random.Random(3)
    for _ in range(100):
        lo = rng.randint(0, 10**10 - 10**4)
        got = primes_between(lo, lo + 10**4 - 1).tolist()
        want = [n for n in range(lo | 1, lo + 10**4, 2) if is_probable_prime(n)]
        if lo <= 2 < lo + 10**4:
            want = [2] + want
        assert got == want


def test_miller_rabin_against_trial_division():
    assert [n for n in range(3000) if is_probable_prime(n)] == [
        n for n in range(3000) if oracles.is_prime(n)
    ]
    assert not is_probable_prime(3215031751)  # strong pseudoprime to bases 2, 3, 5, 7
    assert is_probable_prime(2**61 - 1)


def test_prime_range_iteration():
    r = PrimeRange(90, 110)
    assert list(r) == [97, 101, 103, 107, 109]
    assert r.count() == 5


def test_weighted_prime_sum_examples():
    assert weighted_prime_sum(const(2, 28)) == 10
    assert weighted_prime_sum(const(1, 19), 4, 1) == 3
    zero = WeightFunction(Interval(0, 100), [0, 100], [0, 0])
    assert weighted_prime_sum(zero) == 0


@given(x=st.integers(0, 10**6), y=st.integers(0, 5000), k=st.integers(1, 30), l=st.integers(0, 29))
def test_constant_weight_counts_primes(x, y, k, l):
    if math.gcd(k, l) != 1:
        return
    below = pi_ap(x - 1, k, l) if x > 0 else 0
    assert weighted_prime_sum(const(x, y), k, l) == pi_ap(x + y, k, l) - below


@given(x=st.integers(0, 10**5), y=st.integers(0, 2000), k=st.integers(1, 12))
def test_weighted_sum_against_oracle(x, y, k):
    f = builtin("hat", Interval(x, y)) if y else const(x, 0)
    l = 1
    want = oracles.weighted_primes(range(x, x + y + 1), k, l, f)
    assert weighted_prime_sum(f, k, l) == pytest.approx(want, rel=1e-13, abs=1e-13)


@given(x=st.integers(0, 10**6), y1=st.integers(0, 3000), extra=st.integers(0, 3000))
def test_nested_intervals_monotone(x, y1, extra):
    assert weighted_prime_sum(const(x, y1)) <= weighted_prime_sum(const(x, y1 + extra))


def test_fractional_endpoints_are_exact():
    f = const("10.5", "2")
    assert weighted_prime_sum(f) == 1  # only 11 lies in [10.5, 12.5]
    f = const("11", "0")
    assert weighted_prime_sum(f) == 1


def test_budgets_and_preconditions():
    with pytest.raises(ResourceError):
        weighted_prime_sum(const(0, 10**8 + 1))
    with pytest.raises(ResourceError):
        weighted_prime_sum(const(10**12 + 1, 10))
    with pytest.raises(PreconditionError):
        weighted_prime_sum(const(0, 10), 4, 2)
    with pytest.raises(PreconditionError):
        pi_count(-1)


def test_euler_phi_against_oracle():
    for k in list(range(1, 500)) + [10**9, 999_999_937, 2**30]:
        assert euler_phi(k) == oracles.phi(k)


# -- bounds ------------------------------------------------------------------------


@pytest.mark.parametrize("x,y,k", [(0, 1000, 1), (10**6, 10**4, 3), (5, 77, 12), (10**9, 10**5, 5)])
def test_constant_weight_gives_classical_bound(x, y, k):
    t4, _ = theorem4_bounds(const(x, y), k)
    assert t4.value == classical_brun_titchmarsh(y, k)


def test_hat_plug_in_values():
    f = WeightFunction(Interval(0, 200), [0, 100, 200], [0, 1, 0])
    n = norms(f)
    assert (n.l1, n.sup, n.tv) == (100.0, 1.0, 2.0)
    a, b = theorem4_bounds(f, 3)
    L = math.log(100 / 3 / 3)
    assert a.value == pytest.approx(2 * 100 / (2 * L) * (1 + 8 / L), abs=1e-6)
    assert b.value == pytest.approx(3 * 100 / (2 * L), abs=1e-6)
    assert a.value == pytest.approx(179.503, abs=1e-3)
    assert b.value == pytest.approx(62.294, abs=1e-3)


def test_inapplicable_at_boundary():
    f = const(0, 3)  # rho = 3
    a, b = theorem4_bounds(f, 3)
    assert not a.applicable and not b.applicable and a.value is None
    g = const(0, 1)
    assert not theorem5_bound(g).applicable
    assert rho(g) == 1.0


def test_t5_on_small_interval():
    f = const(2, 28)
    t5 = theorem5_bound(f)
    assert t5.value == pytest.approx(2 * 28 / math.log(28))
    assert weighted_prime_sum(f) < t5.value


def test_t5_bump():
    f = builtin("smooth_bump_approx", Interval(10**4, 10**4), 64)
    t5 = theorem5_bound(f)
    assert t5.applicable and weighted_prime_sum(f) < t5.value


# -- corpus ------------------------------------------------------------------------


def test_empty_corpus():
    assert theorem_corpus_check([]) == []


def test_inapplicable_case_excluded_from_verdict():
    reports = check_case(CorpusCase("hat", 5, 1, "0", "20"))
    assert all(r.holds is None and r.lhs is None for r in reports)
    s = CorpusSummary.of(reports)
    assert s.inapplicable == len(reports) and s.checked == 0 and s.verdict


def test_default_corpus_shape():
    cases = default_corpus()
    per_interval = sum(math.gcd(k, l) == 1 for k in (1, 2, 3, 5, 12) for l in range(1, k + 1))
    assert len(cases) == 4 * 3 * per_interval
    assert {c.shape for c in cases} == {"constant", "hat", "linear_ramp", "smooth_bump_approx"}


def test_corpus_text_round_trip():
    cases = random_corpus(25, seed=4)
    text = "# comment\n\n" + "\n".join(c.to_line() for c in cases)
    assert parse_corpus(text) == cases


@pytest.mark.parametrize(
    "line",
    ["hat 2 1 0 100 1.0", "blob 2 1 0 100 1.0 64", "hat 4 2 0 100 1.0 64", "hat 2 1 -1 100 1.0 64"],
)
def test_corpus_parse_errors(line):
    with pytest.raises(PreconditionError):
        parse_corpus(line)


def test_random_corpus_is_seeded():
    assert random_corpus(10, 1) == random_corpus(10, 1)
    assert random_corpus(10, 1) != random_corpus(10, 2)


def test_random_corpus_holds():
    reports = theorem_corpus_check(random_corpus(40, seed=9))
    s = CorpusSummary.of(reports)
    assert s.verdict and s.checked > 0 and s.min_rel_margin > 0
