"""The ten acceptance criteria, each at its stated tolerance.

Every test prints exactly one ``ACnn PASS|FAIL`` line; the lines are repeated
in the terminal summary.
"""

import json
import math
import random
import time

import numpy as np

import oracles
from wbt import cli
from wbt.arith_tab import q_error_sweep, squarefree_counts, tabulate
from wbt.constants import (
    EulerProductSpec,
    constant_A,
    euler_product,
    euler_product_value,
    log_grid,
    log_power_inequality_holds,
    power_inequality_holds,
    verify_H_dense,
    zeta,
)
from wbt.prime_sums import (
    CorpusSummary,
    classical_brun_titchmarsh,
    default_corpus,
    euler_phi,
    theorem_corpus_check,
)
from wbt.sieve_core import (
    SieveParams,
    quadratic_form,
    remainder_report,
    selberg_lambda,
    sieve_sum_H,
    sieve_sum_S,
    weighted_eratosthenes_bound,
    weighted_selberg_bound,
)
from wbt.sweep import concavity_holds
from wbt.weights import SHAPES, Interval, WeightFunction, builtin


def run_cli(argv):
    code = cli.main(argv)
    return code


def test_ac01_sweep_desk_scale(criterion, tmp_path, capsys):
    with criterion(1, "sweep inequality on [50, 2e6), verdict true, min_margin > 0, <= 60 s") as c:
        out = tmp_path / "report.json"
        t0 = time.perf_counter()
        code = run_cli(["verify-test", "--z-min", "50", "--z-max", "2000000", "--out", str(out)])
        elapsed = time.perf_counter() - t0
        rep = json.loads(out.read_text())
        c.check(code == 0, f"exit code {code}")
        c.check(rep["verdict"] is True, "verdict false")
        c.check(rep["min_margin"] > 0, f"min_margin {rep['min_margin']}")
        c.check(rep["n_checks"] == 2 * (2_000_000 - 50), "check count")
        c.check(rep["n_inconclusive"] == 0, "inconclusive checks")
        c.check(elapsed <= 60, f"runtime {elapsed:.1f}s")
        ts = np.geomspace(math.e**2 * 1.001, 1.6e19, 40)
        concave = all(
            concavity_holds(float(a), float(b), float(lam))
            for i, a in enumerate(ts)
            for b in ts[i + 1 :]
            for lam in np.linspace(0, 1, 9)
        )
        c.check(concave, "concavity grid")
        c.note(
            f"checks={rep['n_checks']} min_margin={rep['min_margin']:.4g} "
            f"min_rel_margin={rep['min_rel_margin']:.3e} at {rep['argmin_rel']} time={elapsed:.1f}s"
        )
    capsys.readouterr()


def test_ac02_squarefree_bound(criterion):
    with criterion(2, "|Q(z) - 6z/pi^2| <= 0.68 sqrt(z) for z <= 1e6; Q matches oracle on 1e3 z <= 1e9") as c:
        r = q_error_sweep(10**6)
        c.check(r.holds is True and r.lhs <= 0.68, f"max ratio {r.lhs}")
        rng = random.Random(20240601)
        zs = [rng.randint(1, 10**9) for _ in range(1000)]
        got = squarefree_counts(zs)
        want = [oracles.squarefree_count(z) for z in zs]
        c.check(got == want, "mismatch against the inclusion-exclusion oracle")
        c.note(f"max ratio {r.lhs:.6f} at z={r.params['argmax_z']}; 1000/1000 random z agree")


def test_ac03_h_products(criterion):
    with criterion(3, "h(1) within 2/(P-1) of 5/2; h~(1/2) <= 36, product p<1e4 <= 3.5, zeta ratio <= 10.27") as c:
        for P in (10**3, 10**4, 10**6):
            h = euler_product(EulerProductSpec("H", 1.0, P))
            c.check(abs(h - 2.5) <= 2 / (P - 1), f"h(1) at P={P}: {h}")
        v = euler_product_value(EulerProductSpec("H_tilde", 0.5, 10**4, "zeta_ratio_bound"))
        c.check(v.bound <= 36, f"h~(1/2) bound {v.bound}")
        c.check(v.normalized_partial <= 3.5, f"intermediate product {v.normalized_partial}")
        ratio = (zeta(1.5) / zeta(3.0)) ** 3
        c.check(ratio <= 10.27, f"zeta ratio {ratio}")
        c.note(f"h~(1/2) <= {v.bound:.4f}, intermediate {v.normalized_partial:.6f}, ratio {ratio:.6f}")


def test_ac04_s_products_and_A(criterion):
    with criterion(4, "h~(3/8) <= 19, h~(1/2) <= 9.4, |A| <= 1.8, elementary inequalities on grids") as c:
        notes = []
        for s, cap in ((0.375, 19.0), (0.5, 9.4)):
            b = euler_product(EulerProductSpec("S_tilde", s, 10**4, "zeta_ratio_bound"))
            c.check(b <= cap, f"h~({s}) bound {b}")
            notes.append(f"h~({s}) <= {b:.4f}")
        a = constant_A()
        c.check(a.verdict and a.computed <= 1.8, f"|A| recipe {a.computed}")
        notes.append(f"|A| <= {a.computed:.4f}")
        t = log_grid(20, 1e6, 4000)
        for sigma in (0.25, 0.375, 0.5, 1.0):
            c.check(power_inequality_holds(t, sigma), f"power inequality sigma={sigma}")
        c.check(log_power_inequality_holds(log_grid(1e9, 1e40, 4000)), "log z <= 1.56 z^(1/8)")
        c.note(", ".join(notes))


def test_ac05_H_asymptotic(criterion):
    with criterion(5, "|H_1(z) - 15z/pi^2| <= 47 sqrt(z) for every z <= 1e6") as c:
        r = verify_H_dense(10**6)
        c.check(r.holds is True and r.lhs <= 47, f"max normalized error {r.lhs}")
        c.note(f"max |error|/sqrt(z) = {r.lhs:.4f} at z={r.params['argmax_z']}")


def test_ac06_selberg_identities(criterion):
    with criterion(6, "Selberg identities to 1e-10 relative, lambda_1 = 1, |lambda| <= 1") as c:
        tab = tabulate(1, 300)
        worst = 0.0
        for k in (1, 2, 3, 6, 30):
            for z in (2, 10, 50, 100, 300):
                p = SieveParams(k, 1, z)
                lam = selberg_lambda(p, tab)
                S, H = sieve_sum_S(p, tab), sieve_sum_H(p, tab)
                e1 = abs(quadratic_form(lam) - 1 / S) * S
                e2 = abs(lam.abs_sum() - H / S) / (H / S)
                worst = max(worst, e1, e2)
                c.check(e1 <= 1e-10, f"quadratic form k={k} z={z} rel err {e1}")
                c.check(e2 <= 1e-10, f"abs sum k={k} z={z} rel err {e2}")
                c.check(lam[1] == 1.0, f"lambda_1 k={k} z={z}")
                c.check(bool(np.all(np.abs(lam.values) <= 1.0)), f"|lambda| > 1 k={k} z={z}")
        c.note(f"worst relative error {worst:.2e}")


def _random_pl_weight(rng):
    x = rng.randint(0, 10**6) + rng.choice([0, 0.5, 0.25])
    y = rng.randint(1, 1000)
    m = rng.randint(1, 10)
    inner = sorted({x + rng.uniform(0, y) for _ in range(m - 1)} - {x, x + y})
    ts = [x] + inner + [x + y]
    vals = [rng.choice([0.0, rng.uniform(0, 10)]) for _ in ts]
    return WeightFunction(Interval(str(x), y), ts, vals)


def test_ac07_remainder_bound(criterion):
    with criterion(7, "|r_d| <= ||f||_inf + ||f'||_1 on 1e3 random cases; r_1 = 1 for f = 1 on [0, 10]") as c:
        rng = random.Random(77)
        worst = 0.0
        for i in range(1000):
            f = _random_pl_weight(rng)
            k = rng.randint(1, 50)
            d = rng.choice([d for d in range(1, 51) if math.gcd(d, k) == 1])
            l = rng.randint(0, k - 1)
            r = remainder_report(f, k, l, d)
            c.check(r.holds is True, f"case {i}: |r_d| = {r.lhs} > {r.rhs}")
            if r.rhs > 0:
                worst = max(worst, r.lhs / r.rhs)
        tight = remainder_report(builtin("constant", Interval(0, 10)), 1, 0, 1)
        c.check(tight.lhs == 1.0 and tight.rhs == 1.0, f"constant case r_1 = {tight.lhs}")
        c.note(f"largest |r_d| / (sup + tv) = {worst:.4f}; constant case r_1 = 1")


def test_ac08_theorem_corpus(criterion):
    with criterion(8, "default corpus: T4 (both forms) and T5 strict; f = 1 matches the classical bound; <= 5 min") as c:
        t0 = time.perf_counter()
        cases = default_corpus()
        reports = theorem_corpus_check(cases)
        elapsed = time.perf_counter() - t0
        s = CorpusSummary.of(reports)
        c.check(s.verdict and s.passed == s.checked > 0, f"{len(s.failures)} failures")
        t5 = [r for r in reports if r.label == "T5" and r.holds is not None]
        c.check(bool(t5) and min(r.margin for r in t5) > 0, "T5 margin")
        for r in reports:
            if r.label == "T4_with_correction" and r.params["shape"] == "constant" and r.holds is not None:
                y, k = float(r.params["y"]), r.params["k"]
                L = math.log(y / k)
                direct = 2 * y / (euler_phi(k) * L) * (1 + 8 / L)
                c.check(r.rhs == classical_brun_titchmarsh(y, k), f"classical mismatch {r.params}")
                c.check(abs(r.rhs - direct) <= 1e-12 * direct, f"classical formula {r.params}")
        c.check(elapsed <= 300, f"runtime {elapsed:.1f}s")
        c.note(
            f"{len(cases)} cases, {s.checked} applicable checks, {s.inapplicable} inapplicable, "
            f"min rel margin {s.min_rel_margin:.3e}, time {elapsed:.1f}s"
        )


def test_ac09_proposition_suites(criterion):
    with criterion(9, "weighted Selberg and Eratosthenes sieve bounds on 200 random cases each") as c:
        rng = random.Random(909)
        tab = tabulate(1, 50)
        for kind, bound in (("selberg", weighted_selberg_bound), ("eratosthenes", weighted_eratosthenes_bound)):
            ok = 0
            for _ in range(200):
                k = rng.randint(1, 20)
                l = rng.choice([l for l in range(k) if math.gcd(l, k) == 1] or [0])
                z = rng.randint(1, 50)
                x, y = rng.randint(0, 10**6), rng.randint(1, 10**4)
                shape = rng.choice(SHAPES)
                f = builtin(shape, Interval(x, y), rng.choice([4, 16, 64])).scaled(rng.uniform(0.1, 10))
                r = bound(f, SieveParams(k, l, z), tab)
                c.check(r.holds is True and r.lhs is not None, f"{kind} {shape} k={k} l={l} z={z}")
                ok += bool(r.holds)
            c.note(f"{kind}: {ok}/200")


def test_ac10_determinism_and_resume(criterion, tmp_path, capsys):
    with criterion(10, "byte-identical reports across runs and thread counts; resumed sweep equals uninterrupted") as c:
        base = ["verify-test", "--z-min", "50", "--z-max", "2000000", "--checkpoint-stride", "500000"]
        outs = []
        for i, threads in enumerate((1, 1, 2, 4)):
            out = tmp_path / f"r{i}.json"
            code = run_cli(base + ["--threads", str(threads), "--out", str(out)])
            c.check(code == 0, f"run {i} exit {code}")
            outs.append(out.read_bytes())
        c.check(outs[0] == outs[1], "repeat run differs")
        c.check(outs[0] == outs[2] == outs[3], "thread count changes the report")

        ckpt = tmp_path / "ckpt.jsonl"
        code = run_cli(base + ["--checkpoint-file", str(ckpt), "--out", str(tmp_path / "x.json")])
        lines = ckpt.read_text().splitlines()
        c.check(len(lines) == 4, f"{len(lines)} checkpoints")
        ckpt.write_text(lines[0] + "\n" + lines[1][:40])  # interrupted after the first checkpoint
        resumed = tmp_path / "resumed.json"
        code = run_cli(base + ["--resume", str(ckpt), "--out", str(resumed)])
        c.check(code == 0, f"resume exit {code}")
        c.check(resumed.read_bytes() == outs[0], "resumed report differs")
        c.note(f"4 runs identical ({len(outs[0])} bytes); resume from z={json.loads(lines[0])['z']} identical")
    capsys.readouterr()
