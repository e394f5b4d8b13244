"""Acceptance suite: one test per criterion, each at its stated tolerance.

Every test prints a single `criterion NN: PASS/FAIL` line (visible with
pytest -s or in captured output on failure) in addition to asserting.
"""

import json
import math
import time

import numpy as np
import pytest

from beurling import cli, counting, kernels, measures, scenarios, semigroup, zeta
from beurling.counting import EULER_GAMMA

H = measures.DEFAULT_STEP_H


def report(num, ok, detail):
    print(f"criterion {num:02d}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, f"criterion {num}: {detail}"


def test_criterion_01_rational_mertens_baseline():
    t0 = time.time()
    system = scenarios.build("rational", x_max=1e6)
    rep = counting.mertens_constant(system, 1e6)
    elapsed = time.time() - t0
    err_h = abs(rep.c_harmonic + EULER_GAMMA)
    err_i = abs(rep.c_integral + EULER_GAMMA)
    err_k = abs(rep.c_kernel + EULER_GAMMA)
    ok = err_h <= 1e-5 and err_i <= 1e-3 and err_k <= 5e-3 and elapsed < 5.0
    report(
        1,
        ok,
        f"c_harmonic err {err_h:.2e} (<=1e-5), c_integral err {err_i:.2e} (<=1e-3), "
        f"c_kernel err {err_k:.2e} (<=5e-3), runtime {elapsed:.2f}s (<5s)",
    )


def test_criterion_02_extra_prime(extra_prime):
    want = -EULER_GAMMA + math.log(1.5) / 0.5
    rep = counting.mertens_constant(extra_prime, 1e6)
    routes = {"integral": rep.c_integral, "harmonic": rep.c_harmonic, "kernel": rep.c_kernel}
    errs = {k: abs(v - want) for k, v in routes.items()}
    ok = all(e <= 1e-3 for e in errs.values()) and all(v > -EULER_GAMMA for v in routes.values())
    report(2, ok, f"target {want:.5f}; route errors " +
           ", ".join(f"{k}={e:.2e}" for k, e in errs.items()) + " (<=1e-3); all > -gamma")


def test_criterion_03_measure_algebra_oracles():
    # Volterra dN for {2,3} == enumeration, exactly, at every atom up to 100
    ps = semigroup.PrimeSystem(np.array([2.0, 3.0]))
    enum = semigroup.enumerate_semigroup(ps, 100.0)
    dn = measures.volterra_n_from_pi(semigroup.pi_measure_from_primes(ps, 100.0, H))
    worst = 0.0
    for lv in enum.log_value:
        x = math.exp(min(lv, enum.log_x_max))
        worst = max(worst, abs(measures.distribution(dn, x) - enum.counting(x)))
    # exponential of the log-integral density reproduces distribution x on [1, 50]
    y_max = math.log(50.0)
    n = int(np.ceil(y_max / H - 1e-12)) + 1
    y = H * np.arange(n)
    g = np.where(y > 0, -np.expm1(-np.maximum(y, 1e-300)) / np.maximum(y, 1e-300), 1.0)
    base = measures.LogGridMeasure(H, y_max, np.exp(y) * g, positive=True)
    ident = measures.mexp(base)
    xs = np.linspace(1.0, 50.0, 197)
    worst_id = float(np.max(np.abs(measures.distribution(ident, xs) - xs)))
    ok = worst <= 1e-9 and worst_id <= 10 * H
    report(3, ok, f"Volterra-vs-enumeration max gap {worst:.2e} (<=1e-9); "
                  f"exp identity max |dist - x| {worst_id:.2e} (<={10*H:.3f})")


def test_criterion_04_landau_identity(rational, extra_prime, ex51, ex52, ex53,
                                      ex53_discrete, remark54):
    systems = {
        "rational": rational,
        "rational_plus_prime": extra_prime,
        "ex51": ex51,
        "ex52": ex52,
        "ex53": ex53,
        "ex53_discrete": ex53_discrete,
        "remark54": remark54,
    }
    worst = {}
    for name, sys_ in systems.items():
        worst[name] = max(
            counting.integration_by_parts_check(sys_, float(x)) for x in (1e2, 1e3, 1e4)
        )
    ok = all(v <= 1e-6 for v in worst.values())
    report(4, ok, "max residuals " + ", ".join(f"{k}={v:.1e}" for k, v in worst.items())
           + " (<=1e-6)")


def test_criterion_05_remark54(remark54):
    _, m6 = counting.mobius_summatory(remark54, 1e6)
    err_m = abs(m6 - 6 / math.pi ** 2)
    ratios_M = []
    ratios_N = []
    for x in (1e2, 1e3, 1e4):
        M, _ = counting.mobius_summatory(remark54, x)
        ratios_M.append(abs(M) / x)
        ratios_N.append(counting.counting_n(remark54, x) / x)
    ok = (
        err_m <= 1e-3
        and all(ratios_M[i + 1] < ratios_M[i] for i in range(2))
        and ratios_M[-1] < 0.05
        and ratios_N[-1] < 0.01
    )
    report(5, ok, f"|m(1e6) - 6/pi^2| = {err_m:.2e} (<=1e-3); M/x at 1e4 = "
                  f"{ratios_M[-1]:.2e} decreasing (<0.05); N/x at 1e4 = {ratios_N[-1]:.2e} (<0.01)")


def test_criterion_06_ex51_divergence(ex51):
    t0 = time.time()
    rows = scenarios.ex51_mertens_divergence(ex51, [50.0, 200.0, 1e3, 1e4])
    elapsed = time.time() - t0
    vals = [r["value"] for r in rows]
    increasing = all(vals[i] < vals[i + 1] for i in range(len(vals) - 1))
    exceeds = all(r["exceeds"] for r in rows)
    ok = increasing and exceeds and elapsed < 30.0
    report(6, ok, f"psi1(e^y)-y = {['%.3f' % v for v in vals]} increasing={increasing}, "
                  f"all above the quarter-envelope bound={exceeds}, runtime {elapsed:.1f}s (<30s)")


def test_criterion_07_ex52(ex52):
    vals = [counting.psi1_log(ex52, math.exp(t)) - math.exp(t) for t in (2.5, 3.0, 3.5)]
    swing = max(vals) - min(vals)
    prof = counting.remainder_profile(ex52)
    verdict = kernels.l1_diagnostic(kernels.conv_average(prof, kernels.abel_kernel())).verdict
    ok = abs(swing - 1.0) <= 0.2 and verdict == "consistent with L1"
    report(7, ok, f"swing {swing:.4f} (within 0.2 of 1); Abel-kernel verdict: {verdict}")


def test_criterion_08_ex53(ex53):
    # (i) the displayed Pi asymptotic at e^30
    x = math.exp(30.0)
    lhs = counting.capital_pi(ex53, x) * 30.0 / x
    rhs = 1 + math.sqrt(2) / 2 * math.cos(30 - math.pi / 4)
    ok_i = abs(lhs - rhs) <= 5.0 / 30.0
    # (ii) boundary-probe exponents from the closed form
    rep = zeta.boundary_probe(zeta.ex53_zeta, [1.0, -1.0, 0.5, -0.5, 2.0, -2.0])
    by_t = {p.t0: p for p in rep.points}
    ok_ii = all(abs(by_t[t].exponent + 0.5) <= 0.05 for t in (1.0, -1.0)) and all(
        by_t[t].exponent >= -0.05 for t in (0.5, -0.5, 2.0, -2.0)
    )
    # (iii) zeta identity residual, relative
    ok_iii = all(
        zeta.identity_residual(ex53, s) <= 1e-3 * abs(zeta.zeta_from_pi(ex53, s))
        for s in (1.25, 1.5, 2.0)
    )
    # (iv) the remainder is not integrable
    prof = counting.remainder_profile(ex53)
    verdict = kernels.l1_diagnostic(kernels.conv_average(prof, kernels.abel_kernel())).verdict
    ok_iv = verdict == "not consistent with L1"
    # (v) m-trend to 0 through the Volterra inverse
    _, m25 = counting.mobius_summatory(ex53, math.exp(25.0))
    ok_v = abs(m25) <= 0.05
    ok = ok_i and ok_ii and ok_iii and ok_iv and ok_v
    report(8, ok, f"(i) Pi asympt gap {abs(lhs-rhs):.3f} (<=0.167) {ok_i}; "
                  f"(ii) exponents {ok_ii}; (iii) residuals {ok_iii}; "
                  f"(iv) {verdict} {ok_iv}; (v) |m(e^25)|={abs(m25):.4f} (<=0.05) {ok_v}")


def test_criterion_09_discretization(ex53_discrete, ex53):
    ps = ex53_discrete.prime_system
    xs = np.exp(np.linspace(math.log(2.5), math.log(ps.primes[-1]), 600))
    gap = float(np.max(np.abs(ps.pi(xs) - zeta.ex53_capital_pi(xs))))
    diffs = []
    for yy in (8.5, 10.0, 11.5, 13.0):
        x = math.exp(yy)
        diffs.append(abs(
            counting.mobius_summatory(ex53_discrete, x)[1]
            - counting.mobius_summatory(ex53, x)[1]
        ))
    ok = gap <= 1.0 + 1e-9 and all(d <= 0.05 for d in diffs)
    report(9, ok, f"max |pi_P - Pi| = {gap:.6f} (<=1); m_P vs m diffs "
                  f"{['%.4f' % d for d in diffs]} (<=0.05)")


def test_criterion_10_property_suites(rational, extra_prime, ex51, ex52):
    # (a) measure algebra on 100 randomized small-mass instances
    rng = np.random.default_rng(2024)
    h = 2.0 ** -6
    n = int(3.0 / h) + 1
    tol = 10 * h
    worst_hom = worst_inv = worst_assoc = 0.0
    xs = np.exp(np.linspace(0.0, 2.9, 31))
    for _ in range(100):
        d1 = rng.uniform(0.0, 0.4, n)
        d2 = rng.uniform(0.0, 0.4, n)
        m1 = measures.LogGridMeasure(h, 3.0, d1, positive=True)
        m2 = measures.LogGridMeasure(h, 3.0, d2, positive=True)
        lhs = measures.mexp(m1.plus(m2))
        rhs = measures.mconvolve(measures.mexp(m1), measures.mexp(m2))
        worst_hom = max(worst_hom, float(np.max(np.abs(
            measures.distribution(lhs, xs) - measures.distribution(rhs, xs)))))
        dn = measures.volterra_n_from_pi(m1)
        dm = measures.mexp(m1.scaled(-1.0))
        unit = measures.mconvolve(dm, dn)
        worst_inv = max(worst_inv, float(np.max(np.abs(
            measures.distribution(unit, xs) - 1.0))))
        m3 = measures.LogGridMeasure(h, 3.0, rng.uniform(0.0, 0.4, n))
        left = measures.mconvolve(measures.mconvolve(m1, m2), m3)
        right = measures.mconvolve(m1, measures.mconvolve(m2, m3))
        worst_assoc = max(worst_assoc, float(np.max(np.abs(
            measures.distribution(left, xs) - measures.distribution(right, xs)))))
    ok_a = worst_hom <= tol and worst_inv <= tol and worst_assoc <= tol
    # (b) Chebyshev identity exact on enumerated words <= 1e4, 5 random systems
    rng2 = np.random.default_rng(99)
    worst_cheb = 0.0
    for _ in range(5):
        primes = np.sort(rng2.uniform(1.4, 40.0, rng2.integers(3, 9)))
        worst_cheb = max(worst_cheb, semigroup.chebyshev_identity_max_residual(
            semigroup.PrimeSystem(primes), 1e4))
    ok_b = worst_cheb <= 1e-9
    # (c) N(x) <= e x zeta(1 + 1/log x) on every PNT-flagged scenario
    ok_c = True
    for sys_ in (rational, extra_prime, ex51, ex52):
        rows = counting.pnt_bound_check(sys_, [1e3, 1e4, 1e5])
        ok_c = ok_c and all(r["holds"] for r in rows)
    ok = ok_a and ok_b and ok_c
    report(10, ok, f"algebra worst: hom {worst_hom:.2e}, inv {worst_inv:.2e}, assoc "
                   f"{worst_assoc:.2e} (<= {tol:.3f}); Chebyshev {worst_cheb:.1e} (<=1e-9); "
                   f"growth bound holds: {ok_c}")


def test_criterion_11_verify_determinism(tmp_path):
    payloads = []
    for name in ("one.json", "two.json"):
        out = tmp_path / name
        rc = cli.main(["--set", "scenario=all", "--set", "command=verify",
                       "--out", str(out)])
        payloads.append(out.read_bytes())
        data = json.loads(payloads[-1])
        assert {r["scenario"] for r in data["results"]} >= {"rational", "ex53", "remark54"}
        assert rc in (cli.EXIT_OK, cli.EXIT_CONTRADICTION)
    ok = payloads[0] == payloads[1] and rc == cli.EXIT_OK
    report(11, ok, f"two verify runs byte-identical: {payloads[0] == payloads[1]}; "
                   f"exit status {rc} (full catalog, no contradictions)")
