"""Reconstruction and classification of period functions.

A 1-eigenvector h of the reduced fast operator (a disk function, stored
by Taylor coefficients) determines the pair

    f1(x) = sum_{n>=1} (n lam + x)^{-2s} h(-1/(n lam + x))
    f2(x) = sum_{n>=1} (n lam - x)^{-2s} h( 1/(n lam - x))

whose components satisfy both the fast and the slow fixed-point
relations.  Expanding h termwise turns each component into a
Hurwitz-zeta series,

    f1(x) = sum_k c_k (-1)^k lam^{-(2s+k)} zeta(2s+k, 1 + x/lam),

which converges geometrically in k and is how the closures below
evaluate (the raw n-series would need ~1e14 terms at Re s ~ 0.75).

Classification: pairs (-b, b) with b lam-periodic are "boundary" (the
kernel of the fast operator); fast 1-eigenfunctions with
f1(0) + f2(0) = 0 are "cuspidal"; the remaining fast eigenfunctions are
"resonant-noncuspidal".  Parity is measured against the swap-reflect
involution (f1, f2) -> (t -> f2(-t), t -> f1(-t)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError
from .fastop import assemble_matrix, reduced_apply
from .moebius import INF
from .slowop import fe_residual_sup
from .spaces import CyclicInterval, PairFunction, ScalarFunc, taylor_eval
from .specfun import ZetaEngine

_ZE = ZetaEngine()

BOUNDARY_TOL = 1e-10
CUSPIDAL_TOL = 1e-8
EIGEN_TOL = 1e-8
SLOW_TOL = 1e-6
PARITY_TOL = 1e-8


def unit_eigenvector(s, lam, N: int, tol: float = 1e-8) -> np.ndarray:
    """Eigenvector of M_N(s) for the eigenvalue closest to 1.

    This is the right selector at a resonance parameter, where the unit
    eigenvalue need not be the one of largest modulus (the leading real
    zero is the only place where both coincide).  Normalized to h(0)=1.
    """
    M = assemble_matrix(complex(s), lam, N)
    w, v = np.linalg.eig(M.entries)
    i = int(np.argmin(np.abs(w - 1.0)))
    if abs(w[i] - 1.0) > tol:
        raise DomainError(
            f"no unit eigenvalue at s = {s}: closest is {w[i]} "
            f"(distance {abs(w[i] - 1.0):.2e})"
        )
    h = v[:, i]
    h0 = taylor_eval(h, 0.0)
    if abs(h0) < 1e-13:
        nz = h[np.abs(h) > 1e-13]
        return h / nz[0]
    return h / h0


def perron_eigenvector(s, lam, N: int) -> np.ndarray:
    """Eigenvector of M_N(s) for the largest-modulus eigenvalue.

    For real s on the leading real zero this is the positive
    (even-parity) direction; the vector is normalized so that h(0) is
    real and positive.
    """
    M = assemble_matrix(complex(s), lam, N)
    w, v = np.linalg.eig(M.entries)
    i = int(np.argmax(np.abs(w)))
    h = v[:, i]
    h0 = taylor_eval(h, 0.0)
    if abs(h0) < 1e-13:
        nz = h[np.abs(h) > 1e-13]
        h = h / nz[0]
    else:
        h = h / h0
    if abs(complex(s).imag) == 0.0:
        h = h.real.astype(complex) if np.abs(h.imag).max() < 1e-10 else h
    return h


def zeta_series_pair(s, lam, coeffs) -> PairFunction:
    """The pair determined by a disk function via the branch series."""
    s = complex(s)
    coeffs = np.asarray(coeffs, dtype=complex)

    def f1(x):
        x = np.asarray(x, dtype=float)
        q = 1.0 + x / lam
        out = np.zeros(x.shape, dtype=complex)
        for k, c in enumerate(coeffs):
            if c == 0:
                continue
            w = 2.0 * s + k
            out = out + c * (-1.0) ** k * lam ** (-w) * _ZE.hurwitz(w, q)
        return complex(out) if out.ndim == 0 else out

    def f2(x):
        x = np.asarray(x, dtype=float)
        q = 1.0 - x / lam
        out = np.zeros(x.shape, dtype=complex)
        for k, c in enumerate(coeffs):
            if c == 0:
                continue
            w = 2.0 * s + k
            out = out + c * lam ** (-w) * _ZE.hurwitz(w, q)
        return complex(out) if out.ndim == 0 else out

    # domains where the Hurwitz argument stays positive: x > -lam resp. x < lam
    g1 = ScalarFunc(f1, CyclicInterval(-1.0, INF), "f1")
    g2 = ScalarFunc(f2, CyclicInterval(INF, 1.0), "f2")
    pf = PairFunction(g1, g2)
    pf.h_coeffs = coeffs
    return pf


@dataclass
class PeriodFunction:
    """A reconstructed period function with its quality certificates."""

    pair: PairFunction
    s: complex
    lam: float
    source: str
    h_coeffs: Optional[np.ndarray] = None
    slow_residual: float = math.nan
    fast_residual: float = math.nan
    cuspidal_value: complex = math.nan
    parity_defect_even: float = math.nan
    parity_defect_odd: float = math.nan

    @property
    def f1(self):
        return self.pair.f1

    @property
    def f2(self):
        return self.pair.f2


def _probe_points(rng_or_count, lo, hi):
    if isinstance(rng_or_count, int):
        return np.linspace(lo + 1e-3, hi - 1e-3, rng_or_count)
    return rng_or_count.uniform(lo, hi, 40)


def reconstruct_period(s, lam, h_coeffs, probes: int = 40,
                       eigen_tol: float = EIGEN_TOL) -> PeriodFunction:
    """Period function from a unit-eigenvector of the reduced operator.

    Refuses input whose eigen-residual on disk probes exceeds eigen_tol
    (boundary pairs reduce to h = 0 and are rejected here: they are in
    the kernel, not the 1-eigenspace).
    """
    s = complex(s)
    h = np.asarray(h_coeffs, dtype=complex)
    if np.abs(h).max() < 1e-12:
        raise DomainError("zero disk vector: boundary pairs have h = f1+f2 = 0")
    theta = np.linspace(0.0, 2.0 * np.pi, 30, endpoint=False)
    zs = 0.3 * np.exp(1j * theta)
    worst = 0.0
    for z in zs:
        image = reduced_apply(s, lam, h, complex(z)).value
        worst = max(worst, abs(image - taylor_eval(h, complex(z))))
    if worst > eigen_tol:
        raise DomainError(f"disk vector is not a 1-eigenfunction: residual {worst:.2e}")

    pair = zeta_series_pair(s, lam, h)
    pf = PeriodFunction(
        pair=pair, s=s, lam=lam, source=f"eigenvector(s={s}, N={len(h)})",
        h_coeffs=h,
    )
    populate_classification(pf, probes=probes)
    return pf


def populate_classification(pf: PeriodFunction, probes: int = 40):
    """Fill residual and parity fields of a period function in place."""
    s, lam, pair = pf.s, pf.lam, pf.pair
    xs1 = np.linspace(-0.9, 2.0, probes)
    xs2 = -xs1
    pf.slow_residual = fe_residual_sup(s, lam, pair, xs1, xs2)
    from .fastop import fast_apply  # local import to avoid cycle at module load

    worst = 0.0
    for x in xs1[:: max(1, probes // 10)]:
        worst = max(worst, abs(fast_apply(s, lam, pair, float(x), 1).value
                               - pair.f1(float(x))))
    for x in xs2[:: max(1, probes // 10)]:
        worst = max(worst, abs(fast_apply(s, lam, pair, float(x), 2).value
                               - pair.f2(float(x))))
    pf.fast_residual = worst
    pf.cuspidal_value = complex(pair.f1(0.0) + pair.f2(0.0))
    ts = np.linspace(-0.85, 0.85, 17)
    jf1 = pair.f2(-ts)  # (J f)_1 = f2(-t)
    jf2 = pair.f1(-ts)
    pf.parity_defect_even = float(
        max(np.abs(jf1 - pair.f1(ts)).max(), np.abs(jf2 - pair.f2(ts)).max())
    )
    pf.parity_defect_odd = float(
        max(np.abs(jf1 + pair.f1(ts)).max(), np.abs(jf2 + pair.f2(ts)).max())
    )


def classify_period(pf: PeriodFunction):
    """(kind, parity) labels from the stored certificates."""
    ts = np.linspace(-0.8, 0.8, 9)
    boundary = all(
        abs(pf.pair.f1(float(t)) + pf.pair.f2(float(t))) < BOUNDARY_TOL for t in ts
    )
    fast_eigen = pf.fast_residual < 1e-7
    if boundary:
        kind = "boundary"
    elif fast_eigen and abs(pf.cuspidal_value) < CUSPIDAL_TOL:
        kind = "cuspidal"
    elif fast_eigen:
        kind = "resonant-noncuspidal"
    else:
        kind = "generic"
    if pf.parity_defect_even < PARITY_TOL:
        parity = "even"
    elif pf.parity_defect_odd < PARITY_TOL:
        parity = "odd"
    else:
        parity = "mixed"
    return kind, parity


def boundary_pair(lam, mode: int = 1) -> PairFunction:
    """The pair (-b, b) with b(t) = exp(2 pi i mode t / lam)."""
    w = 2.0j * math.pi * mode / lam

    def b(t):
        t = np.asarray(t, dtype=complex)
        out = np.exp(w * t)
        return complex(out) if out.ndim == 0 else out

    f1 = ScalarFunc(lambda t: -b(t), None, "-b", complex_func=lambda z: -b(z))
    f2 = ScalarFunc(b, None, "b", complex_func=b)
    return PairFunction(f1, f2)
