"""Pair functions, cyclic intervals, and the weight-2s group action.

Functions live on the two components of the projective line splitting

    component 1: (-1, inf)_c      component 2: (inf, 1)_c

where (a,b)_c is the cyclic interval of RP^1 (it wraps through inf when
a > b).  The action with spectral parameter s is

    (tau_s(h) f)(t) = |c t + d|^{-2s} f((a t + b)/(c t + d)),
    [a b; c d] = h^{-1},

with the absolute value replaced by a branched complex power off the
real line.  The branch table follows the holomorphic extensions chosen
for the operator formulas: (z + alpha)^{-2s} cut along (-inf, -alpha],
(alpha - z)^{-2s} cut along [alpha, inf), and (z^2)^{-s} cut along the
imaginary axis for the weight of the inversion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import DomainError
from .moebius import INF, GroupElement, moebius_apply
from .specfun import branched_power_eval

TAYLOR_RADIUS = 0.99


# -- cyclic intervals ---------------------------------------------------


@dataclass(frozen=True)
class CyclicInterval:
    """Open interval (a, b)_c of RP^1; wraps through inf when a > b.

    Either endpoint may be math.inf, meaning the single projective point
    at infinity.  (a, a)_c is rejected.
    """

    a: float
    b: float

    def __post_init__(self):
        # the projective line has a single point at infinity
        if math.isinf(self.a):
            object.__setattr__(self, "a", INF)
        if math.isinf(self.b):
            object.__setattr__(self, "b", INF)
        if self.a == self.b:
            raise ValueError("(a,a)_c is not a valid interval")

    def contains(self, t: float, margin: float = 0.0) -> bool:
        a, b = self.a, self.b
        if math.isinf(a) and not math.isinf(t):
            return t < b - margin
        if math.isinf(b) and not math.isinf(t):
            return t > a + margin
        if math.isinf(a) or math.isinf(b):
            return False  # t is the point inf, an endpoint
        if math.isinf(t):
            return a > b
        if a < b:
            return a + margin < t < b - margin
        return t > a + margin or t < b - margin

    def contains_array(self, t: np.ndarray) -> np.ndarray:
        a, b = self.a, self.b
        t = np.asarray(t, dtype=float)
        if math.isinf(a):
            return t < b
        if math.isinf(b):
            return t > a
        if a < b:
            return (t > a) & (t < b)
        return (t > a) | (t < b)

    def __str__(self):
        return f"({self.a}, {self.b})_c"


def angle_of(t: float) -> float:
    """Chart RP^1 -> (-pi, pi], with inf at pi."""
    if math.isinf(t):
        return math.pi
    return 2.0 * math.atan(t)


def point_of_angle(theta: float) -> float:
    theta = math.remainder(theta, 2.0 * math.pi)
    if abs(abs(theta) - math.pi) < 1e-15:
        return INF
    return math.tan(theta / 2.0)


def sample_cyclic(interval: CyclicInterval, u: float) -> float:
    """Point at parameter u in (0,1), uniform in the angle chart."""
    ta, tb = angle_of(interval.a), angle_of(interval.b)
    span = (tb - ta) % (2.0 * math.pi)
    if span == 0.0:
        span = 2.0 * math.pi
    return point_of_angle(ta + u * span)


# -- scalar functions with declared domains -----------------------------


@dataclass
class ScalarFunc:
    """A scalar function together with its real domain.

    `func` should accept floats (and preferably numpy arrays).  `domain`
    is a CyclicInterval or None for all of RP^1.  `at_infinity` gives the
    regularized value a_0 = lim |t|^{2s} f(t) when the function is
    regular at infinity for the ambient parameter; None if unknown.
    """

    func: Callable
    domain: Optional[CyclicInterval] = None
    name: str = "f"
    at_infinity: Optional[complex] = None
    complex_func: Optional[Callable] = None

    def __call__(self, t):
        if np.ndim(t) == 0:
            tt = complex(t)
            if tt.imag != 0.0:
                if self.complex_func is None:
                    raise DomainError(f"{self.name} has no complex evaluator")
                return self.complex_func(tt)
            t = float(tt.real)
            if self.domain is not None and not self.domain.contains(t):
                raise DomainError(f"{self.name} evaluated at {t} outside {self.domain}")
            return self.func(t)
        t = np.asarray(t, dtype=float)
        if self.domain is not None:
            ok = self.domain.contains_array(t)
            if not np.all(ok):
                bad = t[~ok].ravel()[0]
                raise DomainError(f"{self.name} evaluated at {bad} outside {self.domain}")
        return self.func(t)


# -- pair functions ------------------------------------------------------


DOMAIN_1 = CyclicInterval(-1.0, INF)
DOMAIN_2 = CyclicInterval(INF, 1.0)


class PairFunction:
    """Two-component function (f1 on (-1,inf)_c, f2 on (inf,1)_c).

    Realized either by closures or by Taylor coefficient vectors of
    functions holomorphic on the closed unit disk.
    """

    def __init__(self, f1: ScalarFunc, f2: ScalarFunc, representation="closure"):
        self.f1 = f1
        self.f2 = f2
        self.representation = representation

    @classmethod
    def from_closures(cls, f1, f2, dom1=DOMAIN_1, dom2=DOMAIN_2, **kw):
        return cls(
            ScalarFunc(f1, dom1, "f1", kw.get("a0_1"), kw.get("f1_complex")),
            ScalarFunc(f2, dom2, "f2", kw.get("a0_2"), kw.get("f2_complex")),
        )

    @classmethod
    def from_taylor(cls, coeffs1, coeffs2):
        c1 = np.asarray(coeffs1, dtype=complex)
        c2 = np.asarray(coeffs2, dtype=complex)
        f1 = ScalarFunc(
            lambda t: taylor_eval(c1, t),
            CyclicInterval(-TAYLOR_RADIUS, TAYLOR_RADIUS),
            "f1",
            complex_func=lambda z: taylor_eval(c1, z),
        )
        f2 = ScalarFunc(
            lambda t: taylor_eval(c2, t),
            CyclicInterval(-TAYLOR_RADIUS, TAYLOR_RADIUS),
            "f2",
            complex_func=lambda z: taylor_eval(c2, z),
        )
        pf = cls(f1, f2, representation="taylor")
        pf.coeffs1, pf.coeffs2 = c1, c2
        return pf

    def component(self, tag: int) -> ScalarFunc:
        if tag == 1:
            return self.f1
        if tag == 2:
            return self.f2
        raise ValueError(f"component tag must be 1 or 2, got {tag}")

    def sum_at(self, t):
        return self.f1(t) + self.f2(t)


def taylor_to_json(coeffs) -> str:
    """Serialize a coefficient vector as a JSON array of (re, im) pairs."""
    import json

    return json.dumps([[float(c.real), float(c.imag)] for c in np.asarray(coeffs, dtype=complex)])


def taylor_from_json(text: str) -> np.ndarray:
    import json

    return np.array([complex(re, im) for re, im in json.loads(text)])


def taylor_eval(coeffs, z):
    """Horner evaluation of sum c_k z^k; |z| capped at 0.99.

    The cap keeps the truncation error of degree-N vectors geometric.
    """
    z = np.asarray(z)
    if np.any(np.abs(z) > TAYLOR_RADIUS + 1e-12):
        raise DomainError(f"taylor_eval outside radius {TAYLOR_RADIUS}")
    coeffs = np.asarray(coeffs, dtype=complex)
    out = np.zeros_like(z, dtype=complex) + (coeffs[-1] if len(coeffs) else 0.0)
    for c in coeffs[-2::-1]:
        out = out * z + c
    if out.ndim == 0:
        return complex(out)
    return out


# -- spectral parameter guards -------------------------------------------

STRIP_LO, STRIP_HI = 0.2, 3.0
HALF_GUARD = 1e-3


def ensure_strip(s, unsafe: bool = False) -> complex:
    """Clamp-check Re s into [0.2, 3] unless unsafe evaluation is forced."""
    s = complex(s)
    if not unsafe and not (STRIP_LO <= s.real <= STRIP_HI):
        raise DomainError(f"Re s = {s.real} outside [{STRIP_LO}, {STRIP_HI}]")
    return s


def half_distance(s) -> float:
    """Distance of s to the simple-pole location 1/2."""
    return abs(complex(s) - 0.5)


# -- the weight-2s action ------------------------------------------------


def weight_factor(h_inv_mat, s, t):
    """|c t + d|^{-2s} for real t, branched power for complex t."""
    c, d = float(h_inv_mat[1, 0]), float(h_inv_mat[1, 1])
    tt = complex(t)
    if tt.imag == 0.0:
        x = c * tt.real + d
        if x == 0.0:
            raise DomainError("weight factor has a pole at t = -d/c")
        return abs(x) ** (-2.0 * complex(s))
    if c == 0.0:
        return abs(d) ** (-2.0 * complex(s))
    # normalize c > 0; the sign of d then decides which cut convention applies
    if c < 0:
        c, d = -c, -d
    if c == 1.0 and d > 0:
        return branched_power_eval("plus", d, 2.0 * complex(s), tt)
    if c == 1.0 and d < 0:
        return branched_power_eval("minus", -d, 2.0 * complex(s), tt)
    if d == 0.0:
        return c ** (-2.0 * complex(s)) * branched_power_eval(
            "square", 0.0, 2.0 * complex(s), tt
        )
    # generic: scale out c and cut away from the domain side of the pole
    return c ** (-2.0 * complex(s)) * branched_power_eval(
        "plus", d / c, 2.0 * complex(s), tt
    )


def tau_action(s, h: GroupElement, f, t, h_inv: Optional[GroupElement] = None):
    """(tau_s(h) f)(t): weighted pullback of f along h^{-1}.

    `f` may be a ScalarFunc (domains enforced) or a bare callable.
    Real t uses the absolute-value weight.  For complex t the weight is
    a branched power; multi-letter words with provenance are applied
    letter by letter, so the composite automorphy factor is the product
    of the letters' holomorphic extensions (the form the fixed-point
    bootstrap uses), not an arbitrary branch of the composed factor.
    """
    tt = complex(t)
    if tt.imag != 0.0 and h.word is not None and len(h.word) > 1:
        from .moebius import element_from_word

        head = element_from_word(h.lam, h.word[:1])
        rest = element_from_word(h.lam, h.word[1:])
        return tau_action(s, head, lambda u: tau_action(s, rest, f, u), t)
    hi = h_inv if h_inv is not None else h.inv()
    m = hi.mat
    w = weight_factor(m, s, t)
    if tt.imag == 0.0:
        arg = moebius_apply(hi, float(tt.real))
    else:
        arg = moebius_apply(hi, tt)
    val = f(arg)
    return w * val
