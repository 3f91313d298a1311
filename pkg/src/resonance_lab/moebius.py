"""Matrix arithmetic for infinite-covolume Hecke triangle groups.

The group with parameter lam > 2 is generated inside PSL(2,R) by

    T = [1 lam; 0 1]   and   S = [0 -1; 1 0],

subject only to S^2 = 1.  The reflection J = [-1 0; 0 1] normalizes the
group in PGL(2,R).  Elements are stored as 2x2 float matrices together
with optional word provenance over the letters T^k, S, J, and compare
projectively (g and -g are the same element).

Hyperbolic conjugacy classes are parametrized by exponent tuples
(a_1, ..., a_n), a_i != 0, standing for the word T^{a_1}S ... T^{a_n}S,
taken up to cyclic rotation.  `enumerate_classes` walks these tuples and
returns trace, geodesic length, primitivity and the rotation-count weight
used by trace formulas and the zeta Euler product.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import DomainError, ResourceGuardError

INF = math.inf

_DET_TOL = 1e-12
_WORD_TOL = 1e-10
_CLASSIFY_TOL = 1e-10


def _letter_matrix(letter, lam):
    kind, k = letter
    if kind == "T":
        return np.array([[1.0, k * lam], [0.0, 1.0]])
    if kind == "S":
        return np.array([[0.0, -1.0], [1.0, 0.0]])
    if kind == "J":
        return np.array([[-1.0, 0.0], [0.0, 1.0]])
    raise ValueError(f"unknown letter {letter!r}")


@dataclass(frozen=True)
class GroupElement:
    """A 2x2 real matrix modulo sign, with optional word provenance."""

    mat: np.ndarray
    lam: float
    word: Optional[tuple] = None

    def __post_init__(self):
        m = np.asarray(self.mat, dtype=float)
        object.__setattr__(self, "mat", m)
        det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
        if abs(abs(det) - 1.0) > _DET_TOL * max(1.0, np.abs(m).max() ** 2):
            raise ValueError(f"determinant {det} is not +-1")
        if self.word is not None:
            w = _word_product(self.word, self.lam)
            if not _projectively_close(w, m, _WORD_TOL):
                raise ValueError("word does not multiply out to the stored matrix")

    # -- basic algebra -------------------------------------------------

    @property
    def det(self) -> float:
        m = self.mat
        return float(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])

    @property
    def trace(self) -> float:
        if self.word is not None and np.abs(self.mat).max() > 1e12:
            return trace_from_word(self.word, self.lam)
        return float(self.mat[0, 0] + self.mat[1, 1])

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        word = None
        if self.word is not None and other.word is not None:
            word = _reduce_word(self.word + other.word)
        return GroupElement(self.mat @ other.mat, self.lam, word)

    def inv(self) -> "GroupElement":
        a, b, c, d = self.mat.ravel()
        m = np.array([[d, -b], [-c, a]]) / self.det
        word = None
        if self.word is not None:
            word = _reduce_word(tuple(_invert_letter(l) for l in reversed(self.word)))
        return GroupElement(m, self.lam, word)

    def normalized(self) -> np.ndarray:
        """Representative with the first nonzero entry positive."""
        m = self.mat
        for v in m.ravel():
            if abs(v) > 1e-14:
                return m if v > 0 else -m
        raise ValueError("zero matrix")

    def __eq__(self, other) -> bool:
        if not isinstance(other, GroupElement):
            return NotImplemented
        return _projectively_close(self.mat, other.mat, 1e-10)

    def __hash__(self):
        raise TypeError("GroupElement is not hashable (float entries)")

    def __repr__(self):
        a, b, c, d = self.mat.ravel()
        w = "" if self.word is None else f", word={word_str(self.word)}"
        return f"GroupElement([{a:.6g} {b:.6g}; {c:.6g} {d:.6g}]{w})"

    # -- actions ---------------------------------------------------------

    def apply(self, x):
        return moebius_apply(self, x)


def _projectively_close(m1, m2, tol) -> bool:
    scale = max(np.abs(m1).max(), np.abs(m2).max(), 1.0)
    return bool(
        np.abs(m1 - m2).max() < tol * scale or np.abs(m1 + m2).max() < tol * scale
    )


def _invert_letter(letter):
    kind, k = letter
    if kind == "T":
        return ("T", -k)
    return letter  # S and J are involutions


def _reduce_word(word):
    out = []
    for letter in word:
        kind, k = letter
        if kind == "T" and k == 0:
            continue
        if out and out[-1][0] == kind:
            if kind == "T":
                s = out[-1][1] + k
                out.pop()
                if s != 0:
                    out.append(("T", s))
                continue
            if kind in ("S", "J"):
                out.pop()  # involution
                continue
        out.append(letter)
    return tuple(out)


def _word_product(word, lam):
    m = np.eye(2)
    for letter in word:
        m = m @ _letter_matrix(letter, lam)
    return m


def trace_from_word(word, lam) -> float:
    """Recompute the trace of a word in extended precision.

    Useful when the double-precision matrix product has grown past 1e12
    and cancellation in a + d can no longer be trusted.
    """
    m = np.eye(2, dtype=np.longdouble)
    for letter in word:
        m = m @ _letter_matrix(letter, lam).astype(np.longdouble)
    return float(m[0, 0] + m[1, 1])


def word_str(word) -> str:
    if not word:
        return "e"
    parts = []
    for kind, k in word:
        if kind == "T":
            parts.append("T" if k == 1 else f"T^{k}")
        else:
            parts.append(kind)
    return "*".join(parts)


def word_from_tuple(exponents: Sequence[int]) -> tuple:
    """Word letters of T^{a_1}S T^{a_2}S ... T^{a_n}S."""
    out = []
    for a in exponents:
        if a == 0:
            raise ValueError("exponents must be nonzero")
        out.append(("T", int(a)))
        out.append(("S", 1))
    return tuple(out)


def hecke_generators(lam: float):
    """Generators (T, S, J) of the extended Hecke triangle group.

    Only the infinite-covolume regime lam > 2 is supported.
    """
    if not lam > 2:
        raise DomainError(f"lam must be > 2, got {lam}")
    T = GroupElement(np.array([[1.0, lam], [0.0, 1.0]]), lam, (("T", 1),))
    S = GroupElement(np.array([[0.0, -1.0], [1.0, 0.0]]), lam, (("S", 1),))
    J = GroupElement(np.array([[-1.0, 0.0], [0.0, 1.0]]), lam, (("J", 1),))
    return T, S, J


def element_from_word(lam: float, word: Iterable) -> GroupElement:
    word = _reduce_word(tuple(word))
    return GroupElement(_word_product(word, lam), lam, word)


def moebius_apply(g: GroupElement, x):
    """Fractional linear action (a x + b) / (c x + d), projectively.

    `x` may be a finite real, math.inf (the single point at infinity of
    the projective line) or complex.  Division by zero yields inf.
    """
    a, b, c, d = g.mat.ravel()
    if isinstance(x, complex):
        den = c * x + d
        if den == 0:
            return INF
        return (a * x + b) / den
    if math.isinf(x):
        if c == 0.0:
            return INF
        return a / c
    den = c * x + d
    if den == 0.0:
        return INF
    return (a * x + b) / den


def fixed_points_ts(lam: float):
    """Repelling and attracting fixed points (theta-, theta+) of T*S."""
    if not lam > 2:
        raise DomainError(f"lam must be > 2, got {lam}")
    r = math.sqrt(lam * lam - 4.0)
    return (lam - r) / 2.0, (lam + r) / 2.0


def classify(g: GroupElement) -> str:
    """Trace classification inside PSL(2,R); rejects det = -1 input."""
    if g.det < 0:
        raise DomainError("classification requires det +1 (PSL2 element)")
    t = abs(g.trace)
    if abs(t - 2.0) < _CLASSIFY_TOL:
        return "identity" if _projectively_close(g.mat, np.eye(2), 1e-10) else "parabolic"
    return "hyperbolic" if t > 2.0 else "elliptic"


def geodesic_length(g: GroupElement) -> float:
    """2*arccosh(|tr|/2), the length of the closed geodesic of [g]."""
    if classify(g) != "hyperbolic":
        raise DomainError("geodesic length is defined for hyperbolic elements only")
    x = abs(g.trace) / 2.0
    return 2.0 * math.log(x + math.sqrt(x * x - 1.0))


def multiplier(g: GroupElement) -> float:
    """N(g): square of the larger eigenvalue; equals exp(length)."""
    return math.exp(geodesic_length(g))


# -- conjugacy classes -------------------------------------------------


@dataclass(frozen=True)
class HyperbolicClass:
    """Conjugacy class of T^{a_1}S...T^{a_n}S, up to cyclic rotation."""

    exponents: tuple
    trace: float
    length: float
    primitive: bool
    weight: float  # w(g)/m(g): number of rotation representatives
    lam: float = field(repr=False, default=0.0)

    @property
    def n(self) -> int:
        return len(self.exponents)

    def element(self) -> GroupElement:
        return element_from_word(self.lam, word_from_tuple(self.exponents))


def _min_rotation(t: tuple) -> tuple:
    return min(tuple(t[i:] + t[:i]) for i in range(len(t)))


def _repetition_count(t: tuple) -> int:
    n = len(t)
    for p in range(1, n + 1):
        if n % p == 0 and t == t[:p] * (n // p):
            return n // p
    return 1


def _tuple_trace(exponents, lam) -> float:
    m = np.eye(2)
    for a in exponents:
        m = m @ np.array([[a * lam, -1.0], [1.0, 0.0]])
    return float(m[0, 0] + m[1, 1])


def enumerate_classes(
    lam: float,
    max_n: int,
    max_exp: int,
    mu_cap: float = math.inf,
    count_cap: int = 2_000_000,
):
    """All hyperbolic classes with tuples of length <= max_n, |a_i| <= max_exp.

    Tuples are deduplicated by cyclic rotation (lexicographically minimal
    rotation is kept).  `mu_cap` prunes words whose larger eigenvalue is
    guaranteed to exceed the cap: every letter T^a S contracts the core
    interval by at least (lam*|a| - 1)^-2, so N(g) >= prod (lam|a_i|-1)^2.
    The guard `count_cap` aborts runaway enumerations.
    """
    if max_n < 1 or max_exp < 1:
        raise ValueError("max_n and max_exp must be >= 1")
    if not lam > 2:
        raise DomainError(f"lam must be > 2, got {lam}")
    seen = set()
    classes = []
    exps = [a for k in range(1, max_exp + 1) for a in (k, -k)]
    budget = [0]

    def rec(prefix, mu_lower):
        if budget[0] > count_cap:
            raise ResourceGuardError(
                f"class enumeration exceeded cap of {count_cap} nodes"
            )
        budget[0] += 1
        n = len(prefix)
        if n >= 1:
            key = _min_rotation(tuple(prefix))
            if key not in seen:
                seen.add(key)
                tr = _tuple_trace(key, lam)
                if abs(tr) <= 2.0:
                    raise AssertionError(f"non-hyperbolic word {key}")
                x = abs(tr) / 2.0
                length = 2.0 * math.log(x + math.sqrt(x * x - 1.0))
                m = _repetition_count(key)
                classes.append(
                    HyperbolicClass(
                        exponents=key,
                        trace=tr,
                        length=length,
                        primitive=(m == 1),
                        weight=len(key) / m,
                        lam=lam,
                    )
                )
        if n == max_n:
            return
        for a in exps:
            mu_next = mu_lower * (lam * abs(a) - 1.0)
            if mu_next > mu_cap:
                continue
            prefix.append(a)
            rec(prefix, mu_next)
            prefix.pop()

    rec([], 1.0)
    classes.sort(key=lambda c: (c.length, c.exponents))
    return classes


def export_length_spectrum(classes, path):
    """CSV columns (n, exponent_tuple, trace, length, primitive, weight)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["n", "exponent_tuple", "trace", "length", "primitive", "weight"])
        for c in classes:
            w.writerow(
                [
                    c.n,
                    ";".join(str(a) for a in c.exponents),
                    f"{c.trace:.12e}",
                    f"{c.length:.12e}",
                    int(c.primitive),
                    f"{c.weight:.1f}",
                ]
            )
