"""Cocycles on the orbit set of 1 and infinity, built from pair functions.

A cocycle assigns to each pair of orbit points a "section": a function
on RP^1 given piecewise, on cyclic intervals, by finite sums of weighted
translates tau_s(g) applied to the components f1, f2.  The whole cocycle
is generated from two seeds,

    potential     p(inf) = 0,
    p(1) = -f2                          on (inf, 1)_c,
           f1 + tau_s(S)(f1 + f2)       on (1, inf)_c,

    group cocycle psi_T = 0,
    psi_S = -tau_s(S) f1 - f2           on (inf, 0)_c,
            f1 + tau_s(S) f2            on (0, inf)_c,

extended by psi_{gh} = tau_s(h^{-1}) psi_g + psi_h, the potential rule
p(g. base) = tau_s(g) p(base) + psi_{g^{-1}}, and finally
c(xi, eta) = p(xi) - p(eta).

The cocycle relation, antisymmetry and equivariance hold for any input
pair by construction; the extra vanishing condition -- c(1, lam-1) = 0
across the wrap-around interval (lam-1, 1)_c -- holds exactly when the
input is a 1-eigenfunction of the slow operator, which makes it a
numeric detector for period functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import DomainError, ExceptionalPointError
from .moebius import GroupElement, INF, element_from_word, moebius_apply
from .spaces import (
    CyclicInterval,
    PairFunction,
    ScalarFunc,
    angle_of,
    point_of_angle,
    sample_cyclic,
)

MAX_WORD_LETTERS = 12
_ENDPOINT_TOL = 1e-12


@dataclass(frozen=True)
class Term:
    """coeff * tau_s(g) applied to a scalar function."""

    coeff: complex
    g: GroupElement
    func: ScalarFunc

    def eval(self, s, t: float):
        gi = self.g.inv()
        c, d = gi.mat[1]
        den = c * t + d
        if abs(den) < _ENDPOINT_TOL * max(1.0, abs(t)):
            raise ExceptionalPointError(f"weight pole at t = {t}")
        w = abs(den) ** (-2.0 * complex(s))
        return self.coeff * w * self.func(moebius_apply(gi, t))


class PiecewiseSection:
    """Finite list of (cyclic interval, term tuple) pieces.

    A piece interval of None stands for all of RP^1.  Evaluation at a
    point requires a unique covering piece and raises at endpoints and
    at weight poles (the allowed singularities of the sections).
    """

    def __init__(self, s, lam, pieces):
        self.s = complex(s)
        self.lam = lam
        self.pieces: List[Tuple[Optional[CyclicInterval], Tuple[Term, ...]]] = list(
            pieces
        )

    @classmethod
    def zero(cls, s, lam):
        return cls(s, lam, [(None, ())])

    def endpoints(self):
        out = []
        for iv, _ in self.pieces:
            if iv is not None:
                out.extend([iv.a, iv.b])
        return out

    def eval(self, t: float):
        for e in self.endpoints():
            if math.isinf(e) and math.isinf(t):
                raise ExceptionalPointError("t = inf is a section endpoint")
            if not math.isinf(e) and not math.isinf(t):
                if abs(t - e) < _ENDPOINT_TOL * max(1.0, abs(e)):
                    raise ExceptionalPointError(f"t = {t} hits section endpoint {e}")
        for iv, terms in self.pieces:
            if iv is None or iv.contains(t):
                return sum((term.eval(self.s, t) for term in terms), 0.0 + 0.0j)
        raise ExceptionalPointError(f"t = {t} is not covered by any piece")

    def __neg__(self):
        return PiecewiseSection(
            self.s,
            self.lam,
            [
                (iv, tuple(Term(-tm.coeff, tm.g, tm.func) for tm in terms))
                for iv, terms in self.pieces
            ],
        )

    def __add__(self, other: "PiecewiseSection"):
        angles = []
        for sec in (self, other):
            for e in sec.endpoints():
                angles.append(angle_of(e))
        if not angles:
            return PiecewiseSection(
                self.s, self.lam, [(None, self.pieces[0][1] + other.pieces[0][1])]
            )
        angles = _dedupe_angles(angles)
        if len(angles) == 1:
            # a single common singular point: split the circle artificially
            angles.append((angles[0] + math.pi) % (2.0 * math.pi))
            angles.sort()
        pieces = []
        k = len(angles)
        for i in range(k):
            th0, th1 = angles[i], angles[(i + 1) % k]
            span = (th1 - th0) % (2.0 * math.pi)
            if span < 1e-12:
                span = 2.0 * math.pi
            mid = point_of_angle(th0 + 0.5 * span)
            terms = []
            covered = True
            for sec in (self, other):
                for iv, tms in sec.pieces:
                    if iv is None or iv.contains(mid):
                        terms.extend(tms)
                        break
                else:
                    covered = False
            if not covered:
                continue  # arc outside a summand's covered set
            a, b = point_of_angle(th0), point_of_angle(th1 % (2.0 * math.pi))
            if a == b:
                continue
            pieces.append((CyclicInterval(a, b), tuple(terms)))
        return PiecewiseSection(self.s, self.lam, pieces)

    def __sub__(self, other):
        return self + (-other)

    def tau(self, gamma: GroupElement) -> "PiecewiseSection":
        """tau_s(gamma) applied to the section.

        Pieces move by the boundary action of gamma (orientation flips
        for det < 0); each term's element is left-composed with gamma.
        """
        flip = gamma.det < 0
        pieces = []
        for iv, terms in self.pieces:
            new_terms = tuple(
                Term(tm.coeff, gamma * tm.g, tm.func) for tm in terms
            )
            if iv is None:
                pieces.append((None, new_terms))
                continue
            a, b = moebius_apply(gamma, iv.a), moebius_apply(gamma, iv.b)
            new_iv = CyclicInterval(b, a) if flip else CyclicInterval(a, b)
            pieces.append((new_iv, new_terms))
        return PiecewiseSection(self.s, self.lam, pieces)


def _dedupe_angles(angles, tol=1e-11):
    out = []
    for th in sorted(a % (2.0 * math.pi) for a in angles):
        if not out or abs(th - out[-1]) > tol:
            out.append(th)
    if len(out) > 1 and abs((out[0] + 2.0 * math.pi) - out[-1]) < tol:
        out.pop()
    return out


# -- orbit points ------------------------------------------------------------


@dataclass(frozen=True)
class XiPoint:
    """A point of the orbit of 1 or inf, carried by its word."""

    word: tuple
    base: float
    lam: float

    def __post_init__(self):
        if self.base not in (1.0, INF):
            raise ValueError("base must be 1 or inf")

    def element(self) -> GroupElement:
        return element_from_word(self.lam, self.word)

    @property
    def value(self) -> float:
        return moebius_apply(self.element(), self.base)

    def negated(self) -> "XiPoint":
        """The reflected point -xi, again as an orbit point.

        Conjugating the word through the reflection flips translation
        exponents; -1 = S.1 absorbs the sign of the base point.
        """
        conj = tuple(("T", -k) if kind == "T" else (kind, k) for kind, k in self.word)
        if self.base == 1.0:
            return XiPoint(conj + (("S", 1),), 1.0, self.lam)
        return XiPoint(conj, INF, self.lam)


def xi_point(lam, word: Sequence = (), base: float = INF) -> XiPoint:
    return XiPoint(tuple(word), float(base), lam)


# -- the cocycle --------------------------------------------------------------


class Cocycle:
    """c(xi, eta) = p(xi) - p(eta), generated from a pair function."""

    def __init__(self, s, lam, pair: PairFunction, check_residual: bool = True,
                 residual_tol: float = 1e-6):
        from .slowop import fe_residual_sup

        self.s = complex(s)
        self.lam = lam
        self.pair = pair
        if check_residual:
            xs = np.linspace(-0.85, 2.2, 25)
            res = fe_residual_sup(self.s, lam, pair, xs, -xs)
            if res > residual_tol:
                raise DomainError(
                    f"input pair is not a slow 1-eigenfunction "
                    f"(residual {res:.2e} > {residual_tol:.0e})"
                )
        self._psi_cache = {}
        self._identity = element_from_word(lam, ())
        self._S = element_from_word(lam, (("S", 1),))

    # seed sections ----------------------------------------------------

    def _psi_letter(self, letter) -> PiecewiseSection:
        s, lam = self.s, self.lam
        kind, k = letter
        if kind == "T":
            return PiecewiseSection.zero(s, lam)
        if kind != "S":
            raise ValueError(f"cocycle words use letters T^k and S, got {letter}")
        f1, f2 = self.pair.f1, self.pair.f2
        e, S = self._identity, self._S
        return PiecewiseSection(
            s,
            lam,
            [
                (
                    CyclicInterval(INF, 0.0),
                    (Term(-1.0, S, f1), Term(-1.0, e, f2)),
                ),
                (
                    CyclicInterval(0.0, INF),
                    (Term(+1.0, e, f1), Term(+1.0, S, f2)),
                ),
            ],
        )

    def p_one(self) -> PiecewiseSection:
        s, lam = self.s, self.lam
        f1, f2 = self.pair.f1, self.pair.f2
        e, S = self._identity, self._S
        return PiecewiseSection(
            s,
            lam,
            [
                (CyclicInterval(INF, 1.0), (Term(-1.0, e, f2),)),
                (
                    CyclicInterval(1.0, INF),
                    (Term(+1.0, e, f1), Term(+1.0, S, f1), Term(+1.0, S, f2)),
                ),
            ],
        )

    # group cocycle ------------------------------------------------------

    def psi(self, word: tuple) -> PiecewiseSection:
        """psi_w for a word, via psi_{gh} = tau_s(h^{-1}) psi_g + psi_h."""
        word = tuple(word)
        if len(word) > MAX_WORD_LETTERS:
            raise DomainError(f"word longer than {MAX_WORD_LETTERS} letters")
        if word in self._psi_cache:
            return self._psi_cache[word]
        if len(word) == 0:
            out = PiecewiseSection.zero(self.s, self.lam)
        else:
            head, last = word[:-1], word[-1]
            h_inv = element_from_word(
                self.lam, (("T", -last[1]),) if last[0] == "T" else (last,)
            )
            out = self.psi(head).tau(h_inv) + self._psi_letter(last)
        self._psi_cache[word] = out
        return out

    # potential and cocycle ------------------------------------------------

    def potential(self, xi: XiPoint) -> PiecewiseSection:
        g = xi.element()
        psi_inv = self.psi(g.inv().word)
        if xi.base == INF:
            return psi_inv
        return self.p_one().tau(g) + psi_inv

    def value(self, xi: XiPoint, eta: XiPoint) -> PiecewiseSection:
        return self.potential(xi) - self.potential(eta)

    # the detector -----------------------------------------------------------

    def vanishing_residual(self, probes: int = 40, rng=None) -> float:
        """sup |c(1, lam-1)| over the wrap-around interval (lam-1, 1)_c."""
        one = xi_point(self.lam, (), 1.0)
        lm1 = xi_point(self.lam, (("T", 1), ("S", 1)), 1.0)
        sec = self.value(one, lm1)
        iv = CyclicInterval(self.lam - 1.0, 1.0)
        worst = 0.0
        us = (
            rng.uniform(0.0, 1.0, probes)
            if rng is not None
            else np.linspace(0.02, 0.98, probes)
        )
        for u in us:
            t = sample_cyclic(iv, float(u))
            try:
                worst = max(worst, abs(sec.eval(t)))
            except (ExceptionalPointError, DomainError):
                continue
        return worst


def build_cocycle(s, lam, pair: PairFunction, **kw) -> Cocycle:
    """Cocycle of a slow 1-eigenfunction (residual-checked)."""
    return Cocycle(s, lam, pair, **kw)


# -- verification -------------------------------------------------------------


def _random_word(rng, max_letters=4):
    letters = []
    for _ in range(rng.integers(0, max_letters + 1)):
        if rng.random() < 0.5:
            letters.append(("S", 1))
        else:
            letters.append(("T", int(rng.choice([-2, -1, 1, 2]))))
    return tuple(letters)


def _random_xi(rng, lam) -> XiPoint:
    base = 1.0 if rng.random() < 0.5 else INF
    return XiPoint(_random_word(rng, 3), base, lam)


def _try_eval(sec: PiecewiseSection, t: float):
    try:
        return sec.eval(t)
    except (ExceptionalPointError, DomainError):
        return None


def equivariance_residual(coc: Cocycle, gamma: GroupElement,
                          xi: XiPoint, eta: XiPoint, t: float):
    """|tau_s(gamma^{-1}) c(xi,eta)(t) - c(gamma^{-1} xi, gamma^{-1} eta)(t)|.

    The left side is evaluated as |c t + d|^{-2s} c(xi,eta)(gamma t) with
    gamma = [a b; c d]; the right side moves the orbit points.
    """
    a, b, c, d = gamma.mat.ravel()
    den = c * t + d
    if abs(den) < 1e-11:
        return None
    w = abs(den) ** (-2.0 * coc.s)
    lhs_at = moebius_apply(gamma, t)
    lhs_sec = coc.value(xi, eta)
    v1 = _try_eval(lhs_sec, lhs_at)
    gi = gamma.inv()
    xi2 = XiPoint(gi.word + xi.word, xi.base, coc.lam)
    eta2 = XiPoint(gi.word + eta.word, eta.base, coc.lam)
    v2 = _try_eval(coc.value(xi2, eta2), t)
    if v1 is None or v2 is None:
        return None
    return abs(w * v1 - v2)


def verify_cocycle(coc: Cocycle, trials: int = 60, seed: int = 7) -> dict:
    """Residual report for the cocycle axioms and the vanishing detector.

    Points whose sections cannot be evaluated (exceptional points,
    out-of-domain pulls) are skipped and counted.
    """
    rng = np.random.default_rng(seed)
    lam = coc.lam
    report = {
        "relation": 0.0,
        "antisymmetry": 0.0,
        "equivariance": 0.0,
        "skipped": 0,
        "used": 0,
    }
    for _ in range(trials):
        xi, eta, zeta = (_random_xi(rng, lam) for _ in range(3))
        t = math.tan(0.5 * rng.uniform(-math.pi + 0.05, math.pi - 0.05))
        c1 = _try_eval(coc.value(xi, eta), t)
        c2 = _try_eval(coc.value(eta, zeta), t)
        c3 = _try_eval(coc.value(xi, zeta), t)
        c4 = _try_eval(coc.value(eta, xi), t)
        if None in (c1, c2, c3, c4):
            report["skipped"] += 1
        else:
            report["relation"] = max(report["relation"], abs(c1 + c2 - c3))
            report["antisymmetry"] = max(report["antisymmetry"], abs(c1 + c4))
            report["used"] += 1
        gamma = element_from_word(lam, _random_word(rng, 4))
        r = equivariance_residual(coc, gamma, xi, eta, t)
        if r is None:
            report["skipped"] += 1
        else:
            report["equivariance"] = max(report["equivariance"], r)
    report["vanishing"] = coc.vanishing_residual(probes=40, rng=rng)
    return report


def boundary_coboundary_residual(s, lam, b_func, probes: int = 30,
                                 seed: int = 11) -> float:
    """For the pair (-b, b): check c = dq with q(inf) = b, q(g.1) = 0.

    The equivariant potential makes the cocycle of a boundary pair a
    coboundary; the residual compares c(xi, eta) against q(xi) - q(eta)
    at random points.  (With the sign conventions of the construction,
    c(1, inf) = -f2 = -b forces q(inf) = +b.)
    """
    bsf = ScalarFunc(b_func, None, "b")
    pair = PairFunction(
        ScalarFunc(lambda t: -b_func(t), None, "-b"),
        ScalarFunc(b_func, None, "b"),
    )
    coc = Cocycle(s, lam, pair, check_residual=False)
    rng = np.random.default_rng(seed)

    def q_section(xi: XiPoint):
        if xi.base == 1.0:
            return PiecewiseSection.zero(s, lam)
        g = xi.element()
        return PiecewiseSection(
            s, lam, [(None, (Term(+1.0, g, bsf),))]
        )

    worst = 0.0
    used = 0
    while used < probes:
        xi, eta = _random_xi(rng, lam), _random_xi(rng, lam)
        t = math.tan(0.5 * rng.uniform(-math.pi + 0.05, math.pi - 0.05))
        v = _try_eval(coc.value(xi, eta), t)
        qv = _try_eval(q_section(xi) - q_section(eta), t)
        if v is None or qv is None:
            continue
        worst = max(worst, abs(v - qv))
        used += 1
    return worst


def parity_conjugation_residual(coc: Cocycle, coc_J: Cocycle,
                                probes: int = 30, seed: int = 13) -> float:
    """|pc(reflected f)(xi,eta)(t) + pc(f)(-xi,-eta)(-t)| at random points.

    coc_J must be the cocycle of the reflected pair
    (t -> f2(-t), t -> f1(-t)); the construction is anti-equivariant
    under the reflection of points and arguments.
    """
    rng = np.random.default_rng(seed)
    worst = 0.0
    used = 0
    while used < probes:
        xi, eta = _random_xi(rng, coc.lam), _random_xi(rng, coc.lam)
        t = math.tan(0.5 * rng.uniform(-math.pi + 0.05, math.pi - 0.05))
        v1 = _try_eval(coc_J.value(xi, eta), t)
        v2 = _try_eval(coc.value(xi.negated(), eta.negated()), -t)
        if v1 is None or v2 is None:
            continue
        worst = max(worst, abs(v1 + v2))
        used += 1
    return worst


def reflected_pair(pair: PairFunction) -> PairFunction:
    """The image of (f1, f2) under the parity involution.

    Components swap and reflect: (t -> f2(-t), t -> f1(-t)).  The
    reflection J has trivial weight, so no power factor appears.
    """
    f1, f2 = pair.f1, pair.f2
    d1 = None
    if f2.domain is not None:
        d1 = CyclicInterval(-f2.domain.b, -f2.domain.a)
    d2 = None
    if f1.domain is not None:
        d2 = CyclicInterval(-f1.domain.b, -f1.domain.a)
    return PairFunction(
        ScalarFunc(lambda t: f2.func(-np.asarray(t, dtype=float)), d1, "Jf1"),
        ScalarFunc(lambda t: f1.func(-np.asarray(t, dtype=float)), d2, "Jf2"),
    )
