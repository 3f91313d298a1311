"""The slow transfer operator, one-sided averages, and extension.

The operator acts on pairs (f1, f2) by

    (L f)_1(x) = (lam+x)^{-2s} (f1+f2)(-1/(lam+x)) + f1(x+lam)
    (L f)_2(x) = (lam-x)^{-2s} (f1+f2)( 1/(lam-x)) + f2(x-lam)

on the components (-1,inf)_c and (inf,1)_c.  Its 1-eigenfunctions are
the period functions; they extend uniquely to (-theta+, inf) x
(-inf, theta+) by iterating the fixed-point relation, which is what
`extend_period_function` does.

The one-sided averages sum the orbit of the translation in one
direction.  When the transformed function h = tau_s(S) phi has a
nonzero value a0 at 0, the divergent part a0 |t|^{-2s} is split off and
summed in closed form through the Hurwitz zeta function, producing the
meromorphic continuation with its simple pole at s = 1/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ConvergenceError, DomainError, PoleError
from .moebius import INF
from .spaces import CyclicInterval, PairFunction, ScalarFunc, half_distance
from .specfun import ZetaEngine, branched_power_eval

_ZE = ZetaEngine()


def _w_plus(s, lam, x):
    """(lam+x)^{-2s}: |.| weight on the reals, cut (-inf,-lam] off them."""
    if np.ndim(x) > 0:
        return np.abs(lam + np.asarray(x, dtype=float)) ** (-2.0 * complex(s))
    xx = complex(x)
    if xx.imag == 0.0:
        return abs(lam + xx.real) ** (-2.0 * complex(s))
    return branched_power_eval("plus", lam, 2.0 * complex(s), xx)


def _w_minus(s, lam, x):
    if np.ndim(x) > 0:
        return np.abs(lam - np.asarray(x, dtype=float)) ** (-2.0 * complex(s))
    xx = complex(x)
    if xx.imag == 0.0:
        return abs(lam - xx.real) ** (-2.0 * complex(s))
    return branched_power_eval("minus", lam, 2.0 * complex(s), xx)


def slow_apply(s, lam, f: PairFunction, x, tag: int):
    """Component `tag` of the slow transfer operator applied to f, at x."""
    s = complex(s)
    if tag == 1:
        w = _w_plus(s, lam, x)
        arg = -1.0 / (lam + x)
        return w * (f.f1(arg) + f.f2(arg)) + f.f1(x + lam)
    if tag == 2:
        w = _w_minus(s, lam, x)
        arg = 1.0 / (lam - x)
        return w * (f.f1(arg) + f.f2(arg)) + f.f2(x - lam)
    raise ValueError(f"tag must be 1 or 2, got {tag}")


def slow_parity_apply(s, lam, sign: str, f: Callable, x):
    """Parity-reduced operator on a single function living on (-1, inf).

    (lam+x)^{-2s} f(-1/(lam+x)) + f(x+lam) +- (lam+x)^{-2s} f(1/(lam+x)).
    The reflection conjugates T to T^{-1} and fixes S, which is why one
    scalar function suffices for each parity.
    """
    if sign not in ("+", "-"):
        raise ValueError("sign must be '+' or '-'")
    if not (isinstance(x, complex)) and not x > -1.0:
        raise DomainError(f"x = {x} not in (-1, inf)")
    w = _w_plus(s, lam, x)
    u = 1.0 / (lam + x)
    out = w * f(-u) + f(x + lam)
    return out + w * f(u) if sign == "+" else out - w * f(u)


def fe_residual(s, lam, f: PairFunction, x, tag: int):
    """Defect of the period-function fixed-point relation at x (or array)."""
    return f.component(tag)(x) - slow_apply(s, lam, f, x, tag)


def fe_residual_sup(s, lam, f: PairFunction, xs1, xs2) -> float:
    """Sup of both fixed-point defects over probe arrays."""
    r1 = np.abs(fe_residual(s, lam, f, np.asarray(xs1, dtype=float), 1))
    r2 = np.abs(fe_residual(s, lam, f, np.asarray(xs2, dtype=float), 2))
    return float(max(np.max(r1), np.max(r2)))


# -- one-sided averages --------------------------------------------------


@dataclass
class AverageRequest:
    """Inputs for a one-sided average of phi along the translation orbit.

    phi must be real-analytic on an interval (alpha, beta)_c containing
    inf (so that h = tau_s(S) phi is regular at 0).  a0_mode 'auto'
    estimates h(0) from phi; 'assume-zero' skips the regularized term.
    """

    direction: str
    s: complex
    lam: float
    phi: ScalarFunc
    a0_mode: str = "auto"
    tol: float = 1e-11
    max_terms: int = 500_000
    a0: Optional[complex] = field(default=None)
    a1: Optional[complex] = field(default=None)

    def __post_init__(self):
        if self.direction not in ("+", "-"):
            raise ValueError("direction must be '+' or '-'")
        if self.a0_mode not in ("auto", "assume-zero"):
            raise ValueError("a0_mode must be 'auto' or 'assume-zero'")
        self.s = complex(self.s)


def _h_value(req: AverageRequest, u: float):
    """h(u) = |u|^{-2s} phi(-1/u)."""
    return abs(u) ** (-2.0 * req.s) * req.phi(-1.0 / u)


def _estimate_a0_a1(req: AverageRequest):
    """Asymptotic data of phi at inf: phi(t) ~ |t|^{-2s}(a0 - a1/t + ...)."""
    if req.a0 is not None:
        a0 = req.a0
        a1 = req.a1 if req.a1 is not None else 0.0
        return complex(a0), complex(a1)
    if req.a0_mode == "assume-zero":
        a0 = 0.0 + 0.0j
    elif req.phi.at_infinity is not None:
        a0 = complex(req.phi.at_infinity)
    else:
        # Richardson extrapolation of h to 0 from u = -1e-2, -5e-3, -2.5e-3
        u = -1e-2
        v0, v1, v2 = (_h_value(req, u), _h_value(req, u / 2), _h_value(req, u / 4))
        a0 = v0 / 3.0 - 2.0 * v1 + (8.0 / 3.0) * v2
    u = 5e-3
    d1 = (_h_value(req, u) - _h_value(req, -u)) / (2.0 * u)
    d2 = (_h_value(req, u / 2) - _h_value(req, -u / 2)) / u
    a1 = (4.0 * d2 - d1) / 3.0
    return complex(a0), complex(a1)


def one_sided_average(req: AverageRequest, t: float):
    """Av+ phi(t) = sum_{n>=0} phi(t + n lam), or
    Av- phi(t) = -sum_{n>=1} phi(t - n lam), zeta-regularized.

    The a0 |t_n|^{-2s} and a1 parts of the summand are summed in closed
    form via Hurwitz zeta; the remainder is summed directly with an
    integral tail bound below req.tol.
    """
    s, lam, phi = req.s, req.lam, req.phi
    dom = phi.domain
    if req.direction == "+":
        alpha = dom.a if dom is not None else -INF
        if not math.isinf(alpha) and not t > alpha:
            raise DomainError(f"t = {t} not in the convergence interval ({alpha}, inf)")
    else:
        beta = dom.b if dom is not None else INF
        if not math.isinf(beta) and not t < beta + lam:
            raise DomainError(f"t = {t} not in the convergence interval (-inf, {beta + lam})")

    a0, a1 = _estimate_a0_a1(req)
    if abs(a0) > 1e-12 and half_distance(s) < 2e-3:
        raise PoleError("one-sided average has a pole at s = 1/2 when a0 != 0")

    sign = 1.0 if req.direction == "+" else -1.0
    sigma2 = 2.0 * s.real

    def t_n(n):
        return t + sign * n * lam

    n_start = 0 if req.direction == "+" else 1
    # direct head until |t_n| is comfortably positive and past the domain edge
    floor = max(lam, 1.0)
    if dom is not None:
        edge = dom.a if req.direction == "+" else dom.b
        if not math.isinf(edge):
            floor = max(floor, abs(edge) + 1.0)
    n0 = n_start
    head = 0.0 + 0.0j
    while sign * t_n(n0) <= floor:
        head += phi(t_n(n0))
        n0 += 1
        if n0 - n_start > 10_000:
            raise ConvergenceError("could not leave the domain edge region")

    # closed-form part: with u = -1/t_n, h(u) = a0 + a1 u + ... gives
    # phi(t_n) = a0 |t_n|^{-2s} - sign * a1 |t_n|^{-2s-1} + O(|t_n|^{-2s-2})
    q0 = sign * t_n(n0) / lam
    closed = 0.0 + 0.0j
    if abs(a0) > 0.0:
        closed += a0 * lam ** (-2.0 * s) * _ZE.hurwitz(2.0 * s, q0)
    if abs(a1) > 0.0:
        closed -= sign * a1 * lam ** (-2.0 * s - 1.0) * _ZE.hurwitz(2.0 * s + 1.0, q0)

    # remainder: decays like |t_n|^{-2 Re s - 2}
    rest = 0.0 + 0.0j
    n = n0
    calm = 0
    while True:
        x = sign * t_n(n)
        r = phi(t_n(n)) - a0 * x ** (-2.0 * s) + sign * a1 * x ** (-2.0 * s - 1.0)
        rest += r
        # integral bound on the remaining tail, assuming ~ C x^{-(2 Re s + 2)}
        bound = abs(r) * x / (lam * (sigma2 + 1.0))
        if bound < req.tol:
            calm += 1
            if calm >= 3:
                break
        else:
            calm = 0
        n += 1
        if n - n_start > req.max_terms:
            raise ConvergenceError(
                f"average did not reach tol {req.tol} in {req.max_terms} terms"
            )
    total = head + closed + rest
    return total if req.direction == "+" else -total


# -- extension of period functions ----------------------------------------


MAX_EXTEND_DEPTH = 60


def extension_endpoints(lam: float, depth: int):
    """Left/right endpoints reached after `depth` bootstrap steps."""
    a, b = -1.0, 1.0
    for _ in range(depth):
        a = -lam - 1.0 / a
        b = lam - 1.0 / b
    return a, b


def extend_period_function(s, lam, f: PairFunction, depth: int,
                           probes: int = 20, residual_tol: float = 1e-8):
    """Extend a period function beyond its initial components.

    f must satisfy the fixed-point relation on its original domain; the
    residual is probed first and the extension refuses noisy input.  The
    result is a PairFunction whose components are valid on
    (a_depth, inf) and (-inf, b_depth), where a_depth decreases to
    -theta+ and b_depth increases to theta+.
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")
    depth = min(depth, MAX_EXTEND_DEPTH)
    s = complex(s)

    xs = np.linspace(-0.9, 4.0, probes)
    res = max(abs(fe_residual(s, lam, f, float(x), 1)) for x in xs)
    res = max(res, max(abs(fe_residual(s, lam, f, float(-x), 2)) for x in xs))
    if res > residual_tol:
        raise DomainError(
            f"input is not a 1-eigenfunction (residual {res:.2e} > {residual_tol})"
        )

    a_end, b_end = extension_endpoints(lam, depth)

    def f1x(x: float):
        if x > -1.0:
            return f.f1(x)
        if not x > a_end:
            raise DomainError(f"x = {x} left of extension endpoint {a_end}")
        w = abs(lam + x) ** (-2.0 * s)
        u = -1.0 / (lam + x)
        return w * (f1x(u) + f.f2(u)) + f.f1(x + lam)

    def f2x(y: float):
        if y < 1.0:
            return f.f2(y)
        if not y < b_end:
            raise DomainError(f"y = {y} right of extension endpoint {b_end}")
        w = abs(lam - y) ** (-2.0 * s)
        u = 1.0 / (lam - y)
        return w * (f.f1(u) + f2x(u)) + f.f2(y - lam)

    g1 = ScalarFunc(np.vectorize(f1x, otypes=[complex]), CyclicInterval(a_end, INF), "f1_ext")
    g2 = ScalarFunc(np.vectorize(f2x, otypes=[complex]), CyclicInterval(INF, b_end), "f2_ext")
    out = PairFunction(g1, g2)
    out.endpoints = (a_end, b_end)
    return out
