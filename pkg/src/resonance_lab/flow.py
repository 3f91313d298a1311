"""The discrete dynamical system behind the transfer operators.

States are pairs (x, label): label 1 for the component (-1, inf), label
2 for (-inf, 1).  One step of the finitely-branched map is a fractional
linear transformation read off the branch table

    label 1:  (-1/(lam-1), 0) -> T^{-1}S,  (0, 1/(lam-1)) -> TS,
              (lam-1, inf)    -> T^{-1}
    label 2:  (-1/(lam-1), 0) -> T^{-1}S,  (0, 1/(lam-1)) -> TS,
              (-inf, 1-lam)   -> T

with targets: T^{-1}S lands in label 1, TS in label 2, and the
translations keep their label.  The uncovered gaps sit inside translates
of the funnel interval, where orbits escape.  The table is certified
in-repo by `transfer_consistency`, which rebuilds the slow operator from
preimages and derivative weights and must agree to machine precision.

Accelerating through the translation branches gives the infinitely
branched return map whose cycles of length n are labelled by exponent
tuples (a_1, ..., a_n); `periodic_points` enumerates them, and
`pressure_delta` locates the parameter where their weighted sums stop
growing, the thermodynamic characterization of the leading resonance.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import zeta as _real_zeta

from .errors import BoundaryPointError, DomainError, OrdinaryPointError
from .moebius import GroupElement, element_from_word, word_from_tuple, word_str
from .slowop import slow_apply
from .spaces import PairFunction

_ENDPOINT_TOL = 1e-12


@dataclass(frozen=True)
class DiscreteState:
    x: float
    label: int

    def __post_init__(self):
        if self.label not in (1, 2):
            raise ValueError("label must be 1 or 2")


def _branch_table(lam: float, label: int):
    """(interval, word, target_label) triples for one label."""
    e = 1.0 / (lam - 1.0)
    common = [
        ((-e, 0.0), (("T", -1), ("S", 1)), 1),
        ((0.0, e), (("T", 1), ("S", 1)), 2),
    ]
    if label == 1:
        return common + [((lam - 1.0, math.inf), (("T", -1),), 1)]
    return common + [((-math.inf, 1.0 - lam), (("T", 1),), 2)]


def step(state: DiscreteState, lam: float):
    """One step of the slow map; returns (new_state, branch_element).

    The branch element g satisfies new_x = g(x).  Points in the funnel
    gaps raise OrdinaryPointError; branch endpoints raise
    BoundaryPointError.
    """
    x, label = state.x, state.label
    if label == 1 and not x > -1.0:
        raise DomainError(f"x = {x} not in (-1, inf)")
    if label == 2 and not x < 1.0:
        raise DomainError(f"x = {x} not in (-inf, 1)")
    for (lo, hi), word, target in _branch_table(lam, label):
        if min(abs(x - lo), abs(x - hi)) < _ENDPOINT_TOL:
            raise BoundaryPointError(f"x = {x} on a branch endpoint")
        if lo < x < hi:
            g = element_from_word(lam, word)
            return DiscreteState(g.apply(x), target), g
    raise OrdinaryPointError(
        f"({x}, {label}) lies in a funnel gap; the orbit leaves the core"
    )


def transfer_consistency(s, lam, f: PairFunction, x: float, tag: int) -> float:
    """|slow operator - preimage sum| at one point.

    The preimage sum runs over all branch preimages y of (x, tag) with
    weights |F'(y)|^{-s}; the derivative of y -> g(y) for g = [a b; c d]
    (det 1) is (c y + d)^{-2}, so the weight is |c y + d|^{2s}.
    """
    s = complex(s)
    direct = slow_apply(s, lam, f, x, tag)
    total = 0.0 + 0.0j
    for label in (1, 2):
        for (lo, hi), word, target in _branch_table(lam, label):
            if target != tag:
                continue
            g = element_from_word(lam, word)
            y = g.inv().apply(x)
            if not (lo < y < hi):
                raise DomainError(f"preimage {y} fell outside its branch interval")
            c, d = g.mat[1]
            weight = abs(c * y + d) ** (2.0 * s)
            total += weight * f.component(label)(y)
    return abs(direct - total)


# -- cycles of the accelerated return map ---------------------------------


@dataclass(frozen=True)
class PeriodicPoint:
    """A period-n state of the return map, labelled by its exponent tuple."""

    exponents: tuple
    x: float
    label: int
    multiplier: float  # contraction rate along the cycle, exp(-length)
    length: float

    @property
    def word(self) -> str:
        return word_str(word_from_tuple(self.exponents))


def _cycle_element(lam, exponents) -> GroupElement:
    return element_from_word(lam, word_from_tuple(exponents))


def _repelling_fixed_point(g: GroupElement):
    """Fixed point of g at which |g'| > 1, plus the derivative there."""
    a, b, c, d = g.mat.ravel()
    if abs(c) < 1e-14:
        raise DomainError("cycle word fixes infinity")
    disc = (a + d) ** 2 - 4.0
    if disc <= 0:
        raise DomainError("cycle word is not hyperbolic")
    r = math.sqrt(disc)
    xs = [((a - d) + r) / (2.0 * c), ((a - d) - r) / (2.0 * c)]
    for x in xs:
        deriv = 1.0 / (c * x + d) ** 2
        if abs(deriv) > 1.0:
            return x, deriv
    raise AssertionError("no repelling fixed point found")


def periodic_points(lam: float, n: int, max_exp: int):
    """All period-n cycles states with exponents bounded by max_exp.

    Each tuple (a_1, ..., a_n) in (Z \\ 0)^n contributes the state fixed
    by its word; the reported multiplier is the contraction rate of the
    inverse (orbit-stabilizing) composition, exp(-length of the class).
    Rotations of a tuple give the other states on the same orbit.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    core = 1.0 / (lam - 1.0)
    out = []
    exps = [a for k in range(1, max_exp + 1) for a in (k, -k)]

    def rec(prefix):
        if len(prefix) == n:
            g = _cycle_element(lam, tuple(prefix))
            x, deriv = _repelling_fixed_point(g)
            if not abs(x) < core:
                raise AssertionError(f"cycle point {x} escaped the core")
            length = math.log(abs(deriv))
            label = 2 if prefix[-1] > 0 else 1
            out.append(
                PeriodicPoint(
                    exponents=tuple(prefix),
                    x=x,
                    label=label,
                    multiplier=1.0 / abs(deriv),
                    length=length,
                )
            )
            return
        for a in exps:
            prefix.append(a)
            rec(prefix)
            prefix.pop()

    rec([])
    return out


def fast_step(x: float, lam: float):
    """One step of the accelerated return map on the core intervals.

    Returns (new_x, a) where the branch applied is T^a S.  The image may
    leave the cores, in which case the orbit escapes through the funnel.
    """
    core = 1.0 / (lam - 1.0)
    if not (0.0 < abs(x) < core):
        raise DomainError(f"x = {x} not inside the core intervals")
    if x < 0:
        # candidates -k lam - 1/x landing in (-1, lam - 1)
        k = math.floor((-1.0 / x - 1.0) / lam - 1e-15)
        for kk in (k, k + 1, k - 1):
            if kk >= 1 and -1.0 < -kk * lam - 1.0 / x < lam - 1.0:
                return -kk * lam - 1.0 / x, -kk
        raise OrdinaryPointError(f"no admissible return branch at x = {x}")
    k = math.floor((1.0 / x + 1.0) / lam - 1e-15)
    for kk in (k, k + 1, k - 1):
        if kk >= 1 and 1.0 - lam < kk * lam - 1.0 / x < 1.0:
            return kk * lam - 1.0 / x, kk
    raise OrdinaryPointError(f"no admissible return branch at x = {x}")


def export_orbits(points, path):
    """CSV columns (period, branch_word, fixed_point, multiplier, length)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["period", "branch_word", "fixed_point", "multiplier", "length"])
        for p in points:
            w.writerow(
                [
                    len(p.exponents),
                    ";".join(str(a) for a in p.exponents),
                    f"{p.x:.12e}",
                    f"{p.multiplier:.12e}",
                    f"{p.length:.12e}",
                ]
            )


# -- pressure ---------------------------------------------------------------


def orbit_pressure_sum(lam: float, n: int, s: float, max_exp: int) -> float:
    """(1/n) log sum over period-n cycles of multiplier^s, with cutoff.

    The cutoff tail decays only like max_exp^{1-2s}; this coarse sum is
    kept for entropy-style diagnostics, while `pressure_delta` resums the
    branch family in closed form.
    """
    pts = periodic_points(lam, n, max_exp)
    total = math.fsum(p.multiplier ** s for p in pts)
    return math.log(total) / n


class _ReturnOperator:
    """Weighted evolution of the return map on a Chebyshev value grid.

    Applies W(u) <- sum_{k} (k lam - u)^{-2s} W(1/(k lam - u))
                  + sum_{k} (k lam + u)^{-2s} W(-1/(k lam + u))
    with the k-tail beyond the direct cutoff summed through the real
    Hurwitz zeta (scipy), using W(0) and W'(0) for the clustered branch
    images.  The growth rate of iterates is the pressure's exponential.
    """

    def __init__(self, lam: float, s: float, nodes: int = 24, k_direct: int = 400):
        self.lam = lam
        self.s = float(s)
        self.k_direct = k_direct
        core = 1.0 / (lam - 1.0)
        j = np.arange(nodes)
        self.u = core * np.cos(np.pi * (j + 0.5) / nodes)  # Chebyshev, (-core, core)
        self.core = core
        k = np.arange(1, k_direct + 1)[:, None]
        self.w_plus = (k * lam + self.u[None, :]) ** (-2.0 * self.s)
        self.w_minus = (k * lam - self.u[None, :]) ** (-2.0 * self.s)
        self.img_plus = -1.0 / (k * lam + self.u[None, :])
        self.img_minus = 1.0 / (k * lam - self.u[None, :])
        s2 = 2.0 * self.s
        q_p = (k_direct + 1) + self.u / lam
        q_m = (k_direct + 1) - self.u / lam
        self.tail_plus = lam ** (-s2) * _real_zeta(s2, q_p)
        self.tail_minus = lam ** (-s2) * _real_zeta(s2, q_m)
        self.tail1_plus = lam ** (-s2 - 1) * _real_zeta(s2 + 1.0, q_p)
        self.tail1_minus = lam ** (-s2 - 1) * _real_zeta(s2 + 1.0, q_m)

    def apply(self, vals: np.ndarray) -> np.ndarray:
        deg = len(self.u) - 1
        coef = np.polynomial.chebyshev.chebfit(self.u / self.core, vals, deg)
        ev = lambda pts: np.polynomial.chebyshev.chebval(pts / self.core, coef)
        out = np.sum(self.w_plus * ev(self.img_plus), axis=0)
        out += np.sum(self.w_minus * ev(self.img_minus), axis=0)
        w0 = float(np.polynomial.chebyshev.chebval(0.0, coef))
        w1 = float(np.polynomial.chebyshev.chebval(1e-6, coef) -
                   np.polynomial.chebyshev.chebval(-1e-6, coef)) / 2e-6
        # tail branch images cluster at 0-: value + first-order slope
        out += self.tail_plus * w0 - self.tail1_plus * w1
        out += self.tail_minus * w0 + self.tail1_minus * w1
        return out

    def growth_rate(self, iters: int = 200, tol: float = 1e-11) -> float:
        vals = np.ones_like(self.u)
        rate = 0.0
        for i in range(iters):
            new = self.apply(vals)
            nrm = float(np.max(np.abs(new)))
            new_rate = math.log(nrm)
            vals = new / nrm
            if i > 4 and abs(new_rate - rate) < tol:
                return new_rate
            rate = new_rate
        return rate


def pressure_delta(lam: float, k_cutoff: int = 400, nodes: int = 24,
                   tol: float = 1e-12, bracket=(0.505, 0.995)) -> float:
    """Parameter where the weighted return-map sums stop growing.

    Bisection on the sign of the pressure (log growth rate of the
    weighted evolution); the result is the leading resonance and the
    critical exponent of the group.  Entirely independent of the
    Taylor-matrix determinant pipeline: value-grid evolution, direct
    branch sums and scipy's real Hurwitz zeta.
    """
    if not lam > 2:
        raise DomainError(f"lam must be > 2, got {lam}")
    lo, hi = bracket

    def pressure(s):
        return _ReturnOperator(lam, s, nodes=nodes, k_direct=k_cutoff).growth_rate()

    plo, phi = pressure(lo), pressure(hi)
    if not (plo > 0 > phi):
        raise DomainError(
            f"pressure does not change sign on {bracket}: P({lo})={plo}, P({hi})={phi}"
        )
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if pressure(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
