"""Selberg zeta as a Fredholm determinant, and resonance location.

Two independent pipelines compute the same function:

  * det(1 - M_N(s)) for the truncated fast-operator matrix, valid on the
    whole strip (minus the guard disk at 1/2);
  * the Euler product over the primitive geodesic length spectrum,
    prod_{l} prod_{k<=k_max} (1 - e^{-(s+k) l}), valid for Re s >= 1.5.

Their agreement, together with the trace identity
Tr M^n = sum over length-n words of N(g)^{-s}/(1 - N(g)^{-1}), is the
main correctness evidence for the whole operator stack.  Resonances are
zeros of the determinant, located by grid scan, argument-principle
winding counts and Newton polish, then re-verified at a larger
truncation before being emitted.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import List

import numpy as np

from .errors import ConvergenceError, DomainError
from .fastop import assemble_matrix
from .moebius import enumerate_classes
from .spaces import HALF_GUARD, half_distance

DEFAULT_N = 32
STABILITY_BUMP = 8


def fredholm_det(s, lam, N: int = DEFAULT_N) -> complex:
    """det(1 - M_N(s)) by LU factorization (lapack determinant)."""
    M = assemble_matrix(s, lam, N)
    return complex(np.linalg.det(np.eye(N) - M.entries))


def fredholm_det_parity(s, lam, N: int = DEFAULT_N):
    """(det(1-M+), det(1-M-)) for the even and odd index blocks."""
    M = assemble_matrix(s, lam, N)
    out = []
    for sign in ("+", "-"):
        B = M.parity_block(sign)
        out.append(complex(np.linalg.det(np.eye(len(B)) - B)))
    return tuple(out)


@dataclass
class EulerProductValue:
    value: complex
    tail_bound: float
    classes_used: int


def euler_product(s, lam, max_n: int, max_exp: int, k_max: int,
                  contribution_floor: float = 1e-12) -> EulerProductValue:
    """Euler product over enumerated primitive classes, k <= k_max.

    Valid in the truncation-controlled regime Re s >= 1.5.  Classes whose
    leading factor |e^{-s l}| falls below `contribution_floor` are pruned
    during enumeration (their eigenvalue bound N(g) >= prod(lam|a_i|-1)^2
    makes the pruning safe); the logged tail bound is conservative.
    """
    s = complex(s)
    if s.real < 1.5:
        raise DomainError(f"euler_product requires Re s >= 1.5, got {s.real}")
    # e^{-s l} = N^{-s} with N >= mu^2: prune when mu^{-2 Re s} < floor
    mu_cap = contribution_floor ** (-0.5 / s.real)
    classes = enumerate_classes(lam, max_n, max_exp, mu_cap=mu_cap)
    log_z = 0.0 + 0.0j
    used = 0
    min_omitted_length = 2.0 * math.log(mu_cap)
    for c in classes:
        if not c.primitive:
            continue
        used += 1
        q = np.exp(-(s + np.arange(k_max + 1)) * c.length)
        log_z += np.sum(np.log(1.0 - q))
    # tail bound: classes with length >= L contribute < count * e^{-Re s L};
    # count is bounded by the full tuple count sum_n (2 max_exp)^n
    count_bound = sum((2.0 * max_exp) ** n for n in range(1, max_n + 1))
    tail = count_bound * math.exp(-s.real * min_omitted_length)
    tail += used * math.exp(-(s.real + k_max + 1) * 2.0 * math.log(lam - 1.0))
    return EulerProductValue(
        value=complex(np.exp(log_z)), tail_bound=float(tail), classes_used=used
    )


def composition_trace(trace: float, s) -> complex:
    """Fixed-point trace N^{-s}/(1 - N^{-1}) of one hyperbolic word."""
    x = abs(trace) / 2.0
    mu = x + math.sqrt(x * x - 1.0)
    N = mu * mu
    return N ** (-complex(s)) / (1.0 - 1.0 / N)


def trace_identity_check(s, lam, n: int, N: int = DEFAULT_N,
                         max_exp: int = 10_000):
    """(Tr M_N^n, orbit sum over length-n words) with tail extrapolation."""
    s = complex(s)
    M = assemble_matrix(s, lam, N).entries
    P = np.linalg.matrix_power(M, n)
    trace_matrix = complex(np.trace(P))
    if n == 1:
        a = np.arange(1, max_exp + 1, dtype=float)
        tr = a * lam
        trace_orbit = 2.0 * np.sum(_vector_comp_trace(tr, s))
        # tail: terms ~ (a lam)^{-2s}; integral estimate
        trace_orbit += 2.0 * _power_tail(lam, max_exp, 2.0 * s)
    elif n == 2:
        cap = min(max_exp, 1500)
        a = np.arange(1, cap + 1, dtype=float)
        aa, bb = np.meshgrid(a, a)
        out = 0.0 + 0.0j
        for sa in (1.0, -1.0):
            for sb in (1.0, -1.0):
                # tr(T^a S T^b S) = a b lam^2 - 2
                tr = np.abs(sa * aa * sb * bb * lam * lam - 2.0)
                out += np.sum(_vector_comp_trace(tr.ravel(), s))
        # one-large-slot tail: terms factor as (|a| lam)^{-2s} (|b| lam)^{-2s}
        tail_one = _power_tail(lam, cap, 2.0 * s)
        full_one = np.sum((a * lam) ** (-2.0 * s)) + tail_one
        out += 2.0 * (2.0 * tail_one) * (2.0 * full_one)
        trace_orbit = complex(out)
    elif n == 3:
        cap = min(max_exp, 120)
        vals = np.concatenate([np.arange(1, cap + 1), -np.arange(1, cap + 1)])
        out = 0.0 + 0.0j
        bb, cc = np.meshgrid(vals, vals)
        for a in vals:
            # tr(T^a S T^b S T^c S) = a b c lam^3 - (a + b + c) lam
            tr = np.abs(a * bb * cc * lam ** 3 - (a + bb + cc) * lam)
            out += np.sum(_vector_comp_trace(tr.ravel(), s))
        tail_one = _power_tail(lam, cap, 2.0 * s)
        a1 = np.arange(1, cap + 1, dtype=float)
        full_one = np.sum((a1 * lam) ** (-2.0 * s)) + tail_one
        out += 3.0 * (2.0 * tail_one) * (2.0 * full_one) ** 2
        trace_orbit = complex(out)
    else:
        raise DomainError("trace identity implemented for n <= 3 at desk scale")
    return trace_matrix, trace_orbit


def _vector_comp_trace(tr, s):
    x = np.abs(tr) / 2.0
    mu = x + np.sqrt(x * x - 1.0)
    Nv = mu * mu
    return Nv ** (-complex(s)) / (1.0 - 1.0 / Nv)


def _power_tail(lam, n0, w):
    """Integral tail of sum_{a>n0} (a lam)^{-w}."""
    return (lam * 1.0) ** (-w) * (n0 + 0.5) ** (1.0 - w) / (w - 1.0)


# -- resonances -------------------------------------------------------------


@dataclass
class Resonance:
    s: complex
    abs_det: float
    newton_residual: float
    N: int
    stability_gap: float
    parity: str

    def row(self):
        return [
            f"{self.s.real:.12e}",
            f"{self.s.imag:.12e}",
            f"{self.abs_det:.6e}",
            f"{self.newton_residual:.6e}",
            self.parity,
            self.N,
        ]


def _newton_polish(lam, N, s0, steps=40, h=1e-6, tol=1e-11, box=None,
                   odd_block=False):
    det = lambda z: _det_for_block(z, lam, N, odd_block)
    s = complex(s0)
    res = math.inf
    for _ in range(steps):
        if box is not None:
            re0, re1, im0, im1 = box
            if not (re0 <= s.real <= re1 and im0 <= s.imag <= im1):
                return s, math.inf
        f = det(s)
        step_h = h * max(1.0, abs(s))
        df = (det(s + step_h) - det(s - step_h)) / (2.0 * step_h)
        if df == 0:
            break
        delta = f / df
        s = s - delta
        res = abs(delta)
        if res < tol:
            break
    return s, res


def _winding_number(lam, N, re0, re1, im0, im1, samples_per_edge=60,
                    odd_block=False):
    """Index of det(1 - M(s)) along the rectangle boundary."""
    edges = [
        np.linspace(re0 + 1j * im0, re1 + 1j * im0, samples_per_edge),
        np.linspace(re1 + 1j * im0, re1 + 1j * im1, samples_per_edge),
        np.linspace(re1 + 1j * im1, re0 + 1j * im1, samples_per_edge),
        np.linspace(re0 + 1j * im1, re0 + 1j * im0, samples_per_edge),
    ]
    pts = np.concatenate([e[:-1] for e in edges])
    vals = np.array([_det_for_block(complex(p), lam, N, odd_block) for p in pts])
    if np.min(np.abs(vals)) < 1e-13:
        raise ConvergenceError("zero on the winding contour; shrink the rectangle")
    phases = np.angle(vals)
    dphi = np.diff(np.concatenate([phases, phases[:1]]))
    dphi = (dphi + np.pi) % (2.0 * np.pi) - np.pi
    return int(round(float(np.sum(dphi)) / (2.0 * np.pi)))


@dataclass
class ResonanceSearch:
    resonances: List[Resonance]
    flagged: List[tuple]


def _parity_of_zero(s, lam, N) -> str:
    dp, dm = fredholm_det_parity(s, lam, N)
    return "even" if abs(dp) <= abs(dm) else "odd"


def _det_for_block(s, lam, N, odd_block: bool):
    if not odd_block:
        return fredholm_det(s, lam, N)
    M = assemble_matrix(s, lam, N)
    B = M.parity_block("-")
    return complex(np.linalg.det(np.eye(len(B)) - B))


def find_resonances(lam, re_range, im_range, grid=(40, 12), N: int = DEFAULT_N,
                    stability_tol: float = 1e-8, odd_block: bool = False,
                    workers: int = 1) -> ResonanceSearch:
    """Zeros of the determinant inside a rectangle of the s plane.

    Grid scan of |det| for minima, Newton polish with a central
    difference derivative, dedup, and per-zero re-verification at N+8.
    Sub-rectangle winding counts flag any mismatch with the number of
    polished roots.  Rectangles meeting the guard disk at 1/2 must be
    searched with odd_block=True (the odd block has no zeta pole there).
    `workers` bounds the thread pool of the grid scan.
    """
    re0, re1 = re_range
    im0, im1 = im_range
    if not odd_block and re0 < 0.5 + HALF_GUARD and re1 > 0.5 - HALF_GUARD:
        if im0 < HALF_GUARD and im1 > -HALF_GUARD:
            raise DomainError(
                "rectangle meets the guard disk at s = 1/2; shrink it or "
                "pass odd_block=True"
            )
    nre, nim = grid
    res_list: List[Resonance] = []
    flagged = []
    rr = np.linspace(re0, re1, nre)
    ii = np.linspace(im0, im1, nim)
    points = [complex(re, im) for im in ii for re in rr]
    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            flat = list(pool.map(
                lambda p: abs(_det_for_block(p, lam, N, odd_block)), points
            ))
    else:
        flat = [abs(_det_for_block(p, lam, N, odd_block)) for p in points]
    vals = np.array(flat).reshape(nim, nre)
    # local minima of |det| as Newton seeds
    seeds = []
    for a in range(nim):
        for b in range(nre):
            v = vals[a, b]
            nb = vals[max(0, a - 1):a + 2, max(0, b - 1):b + 2]
            if v <= nb.min() + 1e-18:
                seeds.append(complex(rr[b], ii[a]))
    mre, mim = 0.2 * (re1 - re0) + 0.05, 0.2 * (im1 - im0) + 0.05
    box = (max(re0 - mre, 0.21), re1 + mre, im0 - mim, im1 + mim)
    roots = []
    for s0 in seeds:
        s, res = _newton_polish(lam, N, s0, box=box, odd_block=odd_block)
        if res > 1e-9:
            continue
        if not (re0 - 1e-9 <= s.real <= re1 + 1e-9 and im0 - 1e-9 <= s.imag <= im1 + 1e-9):
            continue
        if not odd_block and half_distance(s) < HALF_GUARD:
            continue
        if any(abs(s - r[0]) < 1e-7 for r in roots):
            continue
        roots.append((s, res))
    for s, res in roots:
        s_hi, res_hi = _newton_polish(lam, N + STABILITY_BUMP, s, box=box,
                                      odd_block=odd_block)
        gap = abs(s_hi - s)
        if gap > stability_tol:
            flagged.append(("unstable-root", s, gap))
            continue
        res_list.append(
            Resonance(
                s=s,
                abs_det=abs(_det_for_block(s, lam, N, odd_block)),
                newton_residual=res,
                N=N,
                stability_gap=gap,
                parity="odd" if odd_block else _parity_of_zero(s, lam, N),
            )
        )
    try:
        wind = _winding_number(lam, N, re0, re1, im0, im1, odd_block=odd_block)
        if wind != len(res_list):
            flagged.append(("winding-mismatch", wind, len(res_list)))
    except ConvergenceError as exc:
        flagged.append(("winding-failed", str(exc)))
    res_list.sort(key=lambda r: (r.s.real, r.s.imag))
    return ResonanceSearch(resonances=res_list, flagged=flagged)


def export_resonances(search: ResonanceSearch, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["re_s", "im_s", "abs_det", "newton_residual", "parity", "N"])
        for r in search.resonances:
            w.writerow(r.row())


# -- the leading real zero ---------------------------------------------------


def leading_eigenvalue(s, lam, N: int = DEFAULT_N) -> float:
    """Largest-modulus eigenvalue of M_N(s) for real s."""
    M = assemble_matrix(complex(s), lam, N)
    ev = np.linalg.eigvals(M.entries)
    return float(np.max(np.abs(ev)))


def delta_bisection(lam, N: int = DEFAULT_N, tol: float = 1e-12,
                    bracket=(0.502, 0.999), stability_tol: float = 1e-8) -> float:
    """The unique s in (1/2, 1) where the leading eigenvalue crosses 1.

    The crossing point is a zero of the Fredholm determinant; the value
    is re-verified at truncation N+8 before being returned.
    """
    def crossing(nn):
        lo, hi = bracket
        flo = leading_eigenvalue(lo, lam, nn) - 1.0
        fhi = leading_eigenvalue(hi, lam, nn) - 1.0
        if not (flo > 0 > fhi):
            raise DomainError(
                f"no eigenvalue-1 crossing in {bracket}: ends {flo:+.3e}, {fhi:+.3e}"
            )
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if leading_eigenvalue(mid, lam, nn) > 1.0:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    d = crossing(N)
    d_hi = crossing(N + STABILITY_BUMP)
    if abs(d - d_hi) > stability_tol:
        raise ConvergenceError(
            f"leading zero not stable under truncation bump: {d} vs {d_hi}"
        )
    return d
