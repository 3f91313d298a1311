"""Acceptance criteria, one test per criterion, at the stated tolerances.

Run with `pytest tests/test_acceptance.py -v` to get one line per
criterion; each test also prints a PASS line with the measured numbers.
"""

import math
import time

import numpy as np

LAM = 3.0


def _report(name, ok, detail):
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


# -- 1 ---------------------------------------------------------------------


def test_criterion_01_determinant_euler_agreement():
    from resonance_lab.zeta import euler_product, fredholm_det

    t0 = time.monotonic()
    worst = 0.0
    for s in (2.0, 2.5, 3.0):
        d = fredholm_det(s, LAM, 32)
        e = euler_product(s, LAM, max_n=6, max_exp=30, k_max=40)
        worst = max(worst, abs(d - e.value))
    elapsed = time.monotonic() - t0
    _report(
        "criterion 1 determinant-euler",
        worst <= 1e-4 and elapsed <= 60.0,
        f"max |det - euler| = {worst:.3e} (<= 1e-4), {elapsed:.1f}s (<= 60s)",
    )


# -- 2 ---------------------------------------------------------------------


def test_criterion_02_trace_identity():
    from resonance_lab.zeta import trace_identity_check

    tm1, to1 = trace_identity_check(2.0, LAM, 1, N=32, max_exp=10_000)
    tm2, to2 = trace_identity_check(2.0, LAM, 2, N=32)
    d1, d2 = abs(tm1 - to1), abs(tm2 - to2)
    _report(
        "criterion 2 trace-identity",
        d1 <= 1e-6 and d2 <= 1e-5,
        f"n=1: {d1:.3e} (<= 1e-6); n=2: {d2:.3e} (<= 1e-5)",
    )


# -- 3 ---------------------------------------------------------------------


def test_criterion_03_delta_cross_validation():
    from resonance_lab.flow import pressure_delta
    from resonance_lab.zeta import delta_bisection

    results = {}
    ok = True
    detail = []
    for lam in (3.0, 4.0):
        t0 = time.monotonic()
        d_mat = delta_bisection(lam, 32)
        d_pre = pressure_delta(lam)
        elapsed = time.monotonic() - t0
        gap = abs(d_mat - d_pre)
        results[lam] = d_mat
        ok = ok and gap <= 1e-4 and 0.5 < d_mat < 1.0 and elapsed <= 120.0
        detail.append(f"lam={lam}: gap {gap:.2e}, delta {d_mat:.8f}, {elapsed:.0f}s")
    ok = ok and results[3.0] > results[4.0]
    _report("criterion 3 delta-cross-validation", ok,
            "; ".join(detail) + "; strictly decreasing")


# -- 4 ---------------------------------------------------------------------


def test_criterion_04_parity_factorization():
    from resonance_lab.zeta import find_resonances, fredholm_det, fredholm_det_parity

    rng = np.random.default_rng(40)
    worst = 0.0
    for _ in range(20):
        s = complex(rng.uniform(0.55, 2.9), rng.uniform(-0.9, 0.9))
        d = fredholm_det(s, LAM, 24)
        dp, dm = fredholm_det_parity(s, LAM, 24)
        worst = max(worst, abs(d - dp * dm))
    search = find_resonances(LAM, (0.55, 0.95), (-0.01, 0.01), grid=(20, 6), N=32)
    attributed = True
    for r in search.resonances:
        dp, dm = fredholm_det_parity(r.s, LAM, 32)
        small = sorted([abs(dp), abs(dm)])
        attributed = attributed and small[0] < 1e-8 < small[1]
        attributed = attributed and r.parity in ("even", "odd")
    _report(
        "criterion 4 parity-factorization",
        worst <= 1e-10 and attributed and len(search.resonances) >= 1,
        f"max factorization defect {worst:.3e} (<= 1e-10); "
        f"{len(search.resonances)} resonance(s) each in exactly one block",
    )


# -- 5 ---------------------------------------------------------------------


def test_criterion_05_matrix_assembly_oracle():
    from resonance_lab.fastop import assemble_matrix, matrix_oracle_taylor

    worst = 0.0
    for s in (1.2, 2 + 0.5j):
        M = assemble_matrix(s, LAM, 12).entries
        for k in range(12):
            coeffs = matrix_oracle_taylor(s, LAM, k, 12, nodes=512, n_max=20_000)
            worst = max(worst, float(np.abs(coeffs - M[:, k]).max()))
    _report(
        "criterion 5 matrix-oracle",
        worst <= 1e-9,
        f"max entry deviation {worst:.3e} (<= 1e-9) at N=12, s in {{1.2, 2+0.5i}}",
    )


# -- 6 ---------------------------------------------------------------------


def test_criterion_06_slow_equation_residual(delta3, period3):
    from resonance_lab.slowop import extend_period_function, fe_residual_sup

    xs1 = np.linspace(-0.95, 2.0, 100)
    xs2 = -xs1
    r0 = fe_residual_sup(delta3, LAM, period3.pair, xs1, xs2)
    ext = extend_period_function(delta3, LAM, period3.pair, 20)
    a, b = ext.endpoints
    ys1 = np.linspace(a + 1e-4, 4.0, 100)
    r1 = fe_residual_sup(delta3, LAM, ext, ys1, -ys1)
    _report(
        "criterion 6 slow-equation-residual",
        r0 <= 1e-6 and r1 <= 1e-5,
        f"original {r0:.3e} (<= 1e-6); extended depth 20 {r1:.3e} (<= 1e-5)",
    )


# -- 7 ---------------------------------------------------------------------


def test_criterion_07_kernel_and_average_contracts():
    from resonance_lab.fastop import fast_apply
    from resonance_lab.periods import boundary_pair
    from resonance_lab.slowop import AverageRequest, one_sided_average, slow_apply
    from resonance_lab.spaces import ScalarFunc

    bp = boundary_pair(LAM)
    xs = np.linspace(-0.9, 2.2, 20)
    slow_res = max(
        max(abs(slow_apply(1.3, LAM, bp, float(x), 1) - bp.f1(float(x))) for x in xs),
        max(abs(slow_apply(1.3, LAM, bp, float(-x), 2) - bp.f2(float(-x))) for x in xs),
    )
    fast_res = max(
        max(abs(fast_apply(1.3, LAM, bp, float(x), 1).value) for x in xs),
        max(abs(fast_apply(1.3, LAM, bp, float(-x), 2).value) for x in xs),
    )
    s = 0.8
    phi_f = lambda t: (1.0 + np.asarray(t, dtype=float) ** 2) ** (-s)
    psi = ScalarFunc(lambda t: phi_f(t) - phi_f(np.asarray(t) + LAM), None, "psi",
                     at_infinity=0.0)
    req = AverageRequest("+", s, LAM, psi, a0_mode="assume-zero")
    av_res = max(abs(one_sided_average(req, t) - phi_f(t)) for t in (0.7, 2.0, 4.4))
    _report(
        "criterion 7 kernel-and-average-contracts",
        fast_res <= 1e-10 and slow_res <= 1e-10 and av_res <= 1e-9,
        f"fast kernel {fast_res:.2e}, slow fixed {slow_res:.2e} (<= 1e-10); "
        f"average identity {av_res:.2e} (<= 1e-9)",
    )


# -- 8 ---------------------------------------------------------------------


def test_criterion_08_cocycle_suite(delta3, extended3):
    from resonance_lab.cocycles import Cocycle, build_cocycle, verify_cocycle
    from resonance_lab.spaces import PairFunction, ScalarFunc

    coc = build_cocycle(delta3, LAM, extended3)
    rep = verify_cocycle(coc, trials=60, seed=8)
    eigen_ok = (
        rep["relation"] <= 1e-8
        and rep["antisymmetry"] <= 1e-8
        and rep["equivariance"] <= 1e-8
        and rep["vanishing"] <= 1e-8
    )
    eps = 1e-3
    pert = PairFunction(
        ScalarFunc(lambda t: extended3.f1.func(t) + eps, extended3.f1.domain, "f1p"),
        ScalarFunc(extended3.f2.func, extended3.f2.domain, "f2"),
    )
    v_pert = Cocycle(delta3, LAM, pert, check_residual=False).vanishing_residual()
    _report(
        "criterion 8 cocycle-suite",
        eigen_ok and v_pert >= 1e-4,
        f"relation {rep['relation']:.1e}, antisym {rep['antisymmetry']:.1e}, "
        f"equivariance {rep['equivariance']:.1e}, vanishing {rep['vanishing']:.1e} "
        f"(<= 1e-8); perturbed vanishing {v_pert:.2e} (>= 1e-4)",
    )


# -- 9 ---------------------------------------------------------------------


def test_criterion_09_flow_consistency():
    from resonance_lab.flow import periodic_points, transfer_consistency
    from resonance_lab.moebius import enumerate_classes
    from resonance_lab.spaces import DOMAIN_1, DOMAIN_2, PairFunction, ScalarFunc

    rng = np.random.default_rng(90)
    worst = 0.0
    for _ in range(100):
        c1, c2 = rng.normal(size=3), rng.normal(size=3)
        f = PairFunction(
            ScalarFunc(lambda t, c=c1: np.polyval(c, np.asarray(t, dtype=float)), DOMAIN_1, "f1"),
            ScalarFunc(lambda t, c=c2: np.polyval(c, np.asarray(t, dtype=float)), DOMAIN_2, "f2"),
        )
        tag = int(rng.integers(1, 3))
        x = float(rng.uniform(-0.9, 3.0)) * (1.0 if tag == 1 else -1.0)
        worst = max(worst, transfer_consistency(float(rng.uniform(0.5, 2.5)), LAM, f, x, tag))

    mult_dev = 0.0
    biject = True
    for n in (1, 2, 3):
        pts = periodic_points(LAM, n, 3)
        classes = {c.exponents: c for c in enumerate_classes(LAM, n, 3) if c.n == n}
        by_class = {}
        for p in pts:
            key = min(tuple(p.exponents[i:] + p.exponents[:i]) for i in range(n))
            mult_dev = max(mult_dev,
                           abs(p.multiplier - math.exp(-classes[key].length)))
            by_class.setdefault(key, set()).add(round(p.x, 9))
        biject = biject and set(by_class) == set(classes)
        for key, states in by_class.items():
            biject = biject and len(states) == int(classes[key].weight)
    _report(
        "criterion 9 flow-consistency",
        worst <= 1e-12 and biject and mult_dev <= 1e-9,
        f"transfer residual {worst:.2e} (<= 1e-12); cycle/class bijection "
        f"n<=3 holds; multiplier deviation {mult_dev:.2e} (<= 1e-9)",
    )


# -- 10 --------------------------------------------------------------------


def test_criterion_10_greens_form_suite():
    from resonance_lab.verify import suite_green

    t0 = time.monotonic()
    checks = suite_green(LAM, seed=10)
    elapsed = time.monotonic() - t0
    bad = [c for c in checks if not c["pass"]]
    _report(
        "criterion 10 greens-form-suite",
        not bad and elapsed <= 180.0,
        "; ".join(f"{c['name']} {c['residual']:.1e}" for c in checks)
        + f"; {elapsed:.0f}s (<= 180s)",
    )


# -- 11 --------------------------------------------------------------------


def test_criterion_11_truncation_stability(delta3):
    from resonance_lab.zeta import delta_bisection, find_resonances

    search = find_resonances(LAM, (0.55, 0.95), (-0.01, 0.01), grid=(20, 6), N=32)
    res_ok = all(r.stability_gap <= 1e-8 for r in search.resonances)
    d40 = delta_bisection(LAM, 40)
    gap = abs(delta3 - d40)
    _report(
        "criterion 11 truncation-stability",
        res_ok and gap <= 1e-8 and len(search.resonances) >= 1,
        f"resonance stability gaps all <= 1e-8; |delta(32) - delta(40)| = {gap:.2e}",
    )


# -- 12 --------------------------------------------------------------------


def test_criterion_12_cli_determinism(tmp_path):
    from resonance_lab.cli import main

    pairs = []
    for tag in ("a", "b"):
        out = tmp_path / tag
        args = ["resonances", "--lambda", "3", "--re", "0.6:0.9",
                "--im", "-0.01:0.01", "--degree", "24", "--grid", "14x5",
                "--seed", "12", "--no-plot", "--out", str(out)]
        assert main(args) == 0
        args2 = ["geodesics", "--lambda", "3", "--max-n", "3", "--max-exp", "3",
                 "--seed", "12", "--no-plot", "--out", str(out)]
        assert main(args2) == 0
        pairs.append(out)
    a, b = pairs
    same = True
    for name in ("resonances.csv", "resonances_manifest.json",
                 "geodesics.csv", "geodesics_manifest.json"):
        same = same and (a / name).read_bytes() == (b / name).read_bytes()
    _report("criterion 12 cli-determinism", same,
            "CSV and manifest bytes identical across repeated seeded runs")
