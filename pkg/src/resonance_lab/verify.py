"""Named invariant suites with residuals and thresholds.

Each suite returns a list of check records {name, residual, threshold,
pass}; a report passes when every record does.  The CLI `verify`
subcommand serializes these as JSON and sets its exit code from the
overall outcome.
"""

from __future__ import annotations

import math

import numpy as np

from .cocycles import (
    Cocycle,
    boundary_coboundary_residual,
    build_cocycle,
    parity_conjugation_residual,
    reflected_pair,
    verify_cocycle,
)
from .eisenstein import (
    ContourPath,
    EisensteinModel,
    cocycle_cu,
    cu_equivariance_residual,
    detour_path,
    funnel_core_identity,
    greens_form_integral,
)
from .errors import OrdinaryPointError
from .fastop import assemble_matrix, fast_apply, reduced_apply
from .flow import DiscreteState, periodic_points, step, transfer_consistency
from .moebius import element_from_word, enumerate_classes, fixed_points_ts
from .periods import boundary_pair, perron_eigenvector, reconstruct_period
from .slowop import AverageRequest, one_sided_average, slow_apply
from .spaces import (
    DOMAIN_1,
    DOMAIN_2,
    PairFunction,
    ScalarFunc,
    tau_action,
    taylor_eval,
)
from .specfun import ZetaEngine, hurwitz_zeta
from .zeta import delta_bisection

INF = math.inf


def _check(name, residual, threshold, larger_is_better=False):
    ok = residual >= threshold if larger_is_better else residual <= threshold
    return {
        "name": name,
        "residual": float(residual),
        "threshold": float(threshold),
        "pass": bool(ok),
        "direction": ">=" if larger_is_better else "<=",
    }


def suite_operators(lam: float, seed: int = 0):
    rng = np.random.default_rng(seed)
    checks = []

    # average relation, both orders
    s = 0.8
    phi = ScalarFunc(
        lambda t: (1.0 + np.asarray(t, dtype=float) ** 2) ** (-s),
        None,
        "phi",
        at_infinity=1.0,
    )
    worst = 0.0
    for t in (2.0, 11.0, 27.5):
        psi = ScalarFunc(
            lambda u: phi.func(u) - phi.func(np.asarray(u) + lam),
            None, "psi", at_infinity=0.0,
        )
        req = AverageRequest("+", s, lam, psi, a0_mode="assume-zero")
        worst = max(worst, abs(one_sided_average(req, t) - phi.func(t)))
        req2 = AverageRequest("+", s, lam, phi)
        av_t = one_sided_average(req2, t)
        av_tl = one_sided_average(req2, t + lam)
        worst = max(worst, abs((av_t - av_tl) - phi.func(t)))
    checks.append(_check("average-inverse-relation", worst, 1e-9))

    # boundary pairs: slow fixed point and fast kernel
    bp = boundary_pair(lam)
    xs = np.linspace(-0.9, 2.0, 20)
    worst = max(
        max(abs(slow_apply(1.3, lam, bp, float(x), 1) - bp.f1(float(x))) for x in xs),
        max(abs(slow_apply(1.3, lam, bp, float(-x), 2) - bp.f2(float(-x))) for x in xs),
    )
    checks.append(_check("boundary-slow-fixed", worst, 1e-10))
    worst = max(abs(fast_apply(1.3, lam, bp, float(x), 1).value) for x in xs[::4])
    checks.append(_check("boundary-fast-kernel", worst, 1e-10))

    # matrix vs series consistency on random polynomials (N=32: the
    # truncated image column decays like (lam-1)^{-j}, so radius 0.9
    # keeps the Taylor cutoff far below the threshold)
    N = 32
    s0 = 1.4
    M = assemble_matrix(s0, lam, N)
    worst = 0.0
    for _ in range(4):
        h = np.zeros(N, dtype=complex)
        h[: N // 2] = rng.normal(size=N // 2) + 1j * rng.normal(size=N // 2)
        img = M.entries @ h
        for _ in range(13):
            r = 0.9 * math.sqrt(rng.uniform())
            z = r * np.exp(2j * math.pi * rng.uniform())
            direct = reduced_apply(s0, lam, h, complex(z)).value
            worst = max(worst, abs(direct - taylor_eval(img, complex(z))))
    checks.append(_check("matrix-series-consistency", worst, 1e-8))

    # conjugation symmetry of the matrix
    s1 = 1.1 + 0.7j
    A = assemble_matrix(s1, lam, 12).entries
    B = assemble_matrix(np.conj(s1), lam, 12).entries
    checks.append(_check("matrix-conjugation", np.abs(A - np.conj(B)).max(), 1e-13))

    # parity blocks carry every nonzero entry
    Mm = assemble_matrix(1.7, lam, 12)
    mask = np.zeros((12, 12), dtype=bool)
    for sign in ("+", "-"):
        idx = Mm.parity_indices(sign)
        mask[np.ix_(idx, idx)] = True
    checks.append(
        _check("parity-coverage", np.abs(Mm.entries[~mask]).max(), 0.0)
    )

    # singular value decay (nuclearity proxy) on an s grid
    rate = 1.0 / (lam - 1.0)
    worst = 0.0
    for sv in (1.2, 1.8, 2.5):
        sig = np.linalg.svd(assemble_matrix(sv, lam, 24).entries, compute_uv=False)
        k = np.arange(6, 20)
        bound = sig[4] * (rate + 0.15) ** (k - 4)
        worst = max(worst, float(np.max(sig[k] / bound)))
    checks.append(_check("singular-value-decay", worst, 1.0))

    # Hurwitz shift identity on random arguments (relative: q^{-w} is huge
    # at small q, so the absolute defect is pure rounding)
    worst = 0.0
    for _ in range(200):
        w = complex(rng.uniform(0.5, 6.0), rng.uniform(-20, 20))
        q = rng.uniform(0.05, 8.0)
        ref = q ** (-w)
        res = abs(hurwitz_zeta(w, q) - hurwitz_zeta(w, q + 1.0) - ref)
        worst = max(worst, res / max(1.0, abs(ref)))
    checks.append(_check("hurwitz-shift", worst, 1e-12))

    # zeta engine stability under (K, M) increase
    base = ZetaEngine(30, 8)
    big = ZetaEngine(45, 12)
    worst = 0.0
    for _ in range(40):
        w = complex(rng.uniform(0.5, 5.0), rng.uniform(-30, 30))
        worst = max(worst, abs(base.hurwitz(w, 1.0) - big.hurwitz(w, 1.0)))
    checks.append(_check("zeta-engine-stability", worst, 1e-12))

    # representation property of the action on real points
    letters = [("T", 1), ("T", -1), ("S", 1)]
    worst = 0.0
    f = ScalarFunc(lambda t: 1.0 / (1.0 + np.asarray(t, dtype=float) ** 2), None, "f")
    for _ in range(100):
        w1 = tuple(letters[rng.integers(3)] for _ in range(rng.integers(1, 4)))
        w2 = tuple(letters[rng.integers(3)] for _ in range(rng.integers(1, 4)))
        g1 = element_from_word(lam, w1)
        g2 = element_from_word(lam, w2)
        t = float(rng.normal(scale=2.0))
        try:
            lhs = tau_action(1.1, g1, lambda u: tau_action(1.1, g2, f, u), t)
            rhs = tau_action(1.1, g1 * g2, f, t)
        except ZeroDivisionError:
            continue
        worst = max(worst, abs(lhs - rhs))
    checks.append(_check("action-representation-real", worst, 1e-10))
    return checks


def suite_cocycles(lam: float, seed: int = 0, delta: float = None, N: int = 32):
    from .slowop import extend_period_function

    checks = []
    d = delta if delta is not None else delta_bisection(lam, N)
    h = perron_eigenvector(d, lam, N)
    pf = reconstruct_period(d, lam, h, probes=10)
    ext = extend_period_function(d, lam, pf.pair, 40)
    coc = build_cocycle(d, lam, ext)
    rep = verify_cocycle(coc, trials=60, seed=seed + 7)
    checks.append(_check("cocycle-relation", rep["relation"], 1e-8))
    checks.append(_check("cocycle-antisymmetry", rep["antisymmetry"], 1e-10))
    checks.append(_check("cocycle-equivariance", rep["equivariance"], 1e-8))
    checks.append(_check("cocycle-vanishing", rep["vanishing"], 1e-8))

    eps = 1e-3
    pert = PairFunction(
        ScalarFunc(lambda t: ext.f1.func(t) + eps, ext.f1.domain, "f1p"),
        ScalarFunc(ext.f2.func, ext.f2.domain, "f2"),
    )
    coc_p = Cocycle(d, lam, pert, check_residual=False)
    checks.append(
        _check("vanishing-discriminates", coc_p.vanishing_residual(), 1e-4,
               larger_is_better=True)
    )
    checks.append(
        _check(
            "boundary-coboundary",
            boundary_coboundary_residual(
                1.1, lam, lambda t: np.exp(2j * math.pi * np.asarray(t) / lam)
            ),
            1e-10,
        )
    )
    cocJ = Cocycle(d, lam, reflected_pair(ext), check_residual=False)
    checks.append(
        _check("parity-anti-equivariance",
               parity_conjugation_residual(coc, cocJ), 1e-8)
    )
    return checks


def suite_flow(lam: float, seed: int = 0):
    rng = np.random.default_rng(seed)
    checks = []

    worst = 0.0
    for _ in range(100):
        c1 = rng.normal(size=3)
        c2 = rng.normal(size=3)
        f = PairFunction(
            ScalarFunc(lambda t, c=c1: c[0] + c[1] * np.asarray(t) + c[2] * np.asarray(t) ** 2, DOMAIN_1, "f1"),
            ScalarFunc(lambda t, c=c2: c[0] + c[1] * np.asarray(t) + c[2] * np.asarray(t) ** 2, DOMAIN_2, "f2"),
        )
        tag = int(rng.integers(1, 3))
        x = float(rng.uniform(-0.9, 3.0)) * (1 if tag == 1 else -1)
        s = float(rng.uniform(0.5, 2.5))
        worst = max(worst, transfer_consistency(s, lam, f, x, tag))
    checks.append(_check("transfer-consistency", worst, 1e-12))

    # funnel gaps sit inside translates of the funnel interval
    gap_ok = 0.0
    for lam2 in (2.5, 3.0, 4.0, 6.0):
        th_m, th_p = fixed_points_ts(lam2)
        if not (th_m < 1.0 / (lam2 - 1.0) and th_p > lam2 - 1.0):
            gap_ok = 1.0
    checks.append(_check("gaps-inside-funnel", gap_ok, 0.0))

    # reflection symmetry of the step map
    worst = 0.0
    for _ in range(50):
        x = float(rng.uniform(-0.45, 0.45))
        if abs(x) < 1e-3:
            continue
        try:
            s1, g1 = step(DiscreteState(x, 1), lam)
            s2, g2 = step(DiscreteState(-x, 2), lam)
        except OrdinaryPointError:
            continue
        worst = max(worst, abs(s1.x + s2.x))
    checks.append(_check("reflection-mirror", worst, 1e-12))

    # cycle states: multipliers in (0,1), matching class lengths, counts w/m
    worst = 0.0
    count_bad = 0.0
    for n in (1, 2, 3):
        pts = periodic_points(lam, n, 3)
        classes = {c.exponents: c for c in enumerate_classes(lam, n, 3) if c.n == n}
        by_class = {}
        for p in pts:
            if not (0.0 < p.multiplier < 1.0):
                count_bad = 1.0
            key = min(
                tuple(p.exponents[i:] + p.exponents[:i]) for i in range(n)
            )
            worst = max(worst, abs(p.multiplier - math.exp(-classes[key].length)))
            by_class.setdefault(key, set()).add(round(p.x, 10))
        for key, states in by_class.items():
            if len(states) != int(classes[key].weight):
                count_bad = 1.0
    checks.append(_check("cycle-multipliers-match-lengths", worst, 1e-9))
    checks.append(_check("cycle-counts-w-over-m", count_bad, 0.0))
    return checks


def suite_green(lam: float, seed: int = 0, s: float = 0.9):
    checks = []
    m = EisensteinModel(lam, s)
    th_m, th_p = fixed_points_ts(lam)
    mid = 0.5 * (1.0 + min(lam - 1.0, th_p))

    p1 = ContourPath.polyline([1j, 1 + 1.2j, 2 + 1j])
    p2 = ContourPath.polyline([1j, 0.5 + 0.4j, 2 + 1j])
    v1 = greens_form_integral(m, mid + 0.11, p1)
    v2 = greens_form_integral(m, mid + 0.11, p2)
    checks.append(_check("path-independence", abs(v1 - v2), 1e-6))

    loop = ContourPath.polyline([1 + 0.5j, 1.5 + 0.5j, 1.5 + 1.5j, 1 + 1.5j, 1 + 0.5j])
    checks.append(
        _check("closed-contour", abs(greens_form_integral(m, 0.9, loop)), 1e-6)
    )

    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(5):
        xi = float(rng.uniform(th_m + 0.15, th_m + 0.45))
        eta = float(rng.uniform(th_p - 0.6, th_p - 0.2))
        t = float(rng.uniform(xi + 0.1, eta - 0.1))
        lhs, rhs = funnel_core_identity(m, xi, eta, t)
        worst = max(worst, abs(lhs - rhs) / abs(rhs))
    checks.append(_check("funnel-core-identity", worst, 1e-3))

    path = detour_path(th_m + 0.3, th_p - 0.3)
    out_t = th_p + 0.3
    checks.append(
        _check("outside-interval-vanishing",
               abs(greens_form_integral(m, out_t, path)), 1e-6)
    )

    ts = np.linspace(-2.0, 2.5, 12)
    c12 = cocycle_cu(m, 1j, 1 + 1j, ts)
    c23 = cocycle_cu(m, 1 + 1j, 2 + 0.5j, ts)
    c13 = cocycle_cu(m, 1j, 2 + 0.5j, ts)
    checks.append(_check("cu-additivity", float(np.abs(c12 + c23 - c13).max()), 1e-5))
    Smat = np.array([[0.0, -1.0], [1.0, 0.0]])
    checks.append(
        _check(
            "cu-equivariance",
            cu_equivariance_residual(m, Smat, 1j, 1 + 1j, [0.3, -0.7, 2.2]),
            1e-5,
        )
    )
    return checks


SUITES = {
    "operators": suite_operators,
    "cocycles": suite_cocycles,
    "flow": suite_flow,
    "green": suite_green,
}


def run_suites(names, lam: float, seed: int = 0) -> dict:
    report = {"lam": lam, "seed": seed, "suites": {}, "pass": True}
    for name in names:
        if name not in SUITES:
            raise KeyError(f"unknown suite {name!r}")
        checks = SUITES[name](lam, seed=seed)
        ok = all(c["pass"] for c in checks)
        report["suites"][name] = {"checks": checks, "pass": ok}
        report["pass"] = report["pass"] and ok
    return report
