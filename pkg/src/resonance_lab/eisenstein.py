"""Desk-scale eigenfunction models, the Green's form and its cocycle.

The test eigenfunctions are truncated Poincare sums over cosets of the
translation subgroup,

    u(z) = sum_g (Im g z)^s = y^s sum_g |c z + d|^{-2s},

where g runs over reduced coset words S T^{k_1} S T^{k_2} ... with an
optional trailing S.  Every finite truncation is an exact Laplace
eigenfunction with s-analytic boundary behavior away from the poles
-d/c (cusp points, never inside the funnel interval), so the Green's
form identities -- closedness, path independence, the boundary-core
formula -- hold for the truncated model up to quadrature error.  The
truncation set is closed under right multiplication by the inversion
(pairing w <-> wS), which makes the model exactly invariant under it;
invariance under the translation holds up to the exponent cutoff.

The Green's form of two functions, in real coordinates,

    {u, v} = (u_y v - u v_y) dx + (u v_x - u_x v) dy,

is closed when both arguments are eigenfunctions with the same spectral
parameter.  Pairing a model with powers of the kernel y/|t-z|^2 along
paths yields the funnel cocycle; with both endpoints on the funnel
boundary the integral vanishes for t outside the endpoint interval and
equals 2 sqrt(pi) Gamma(s+1/2)/Gamma(s) times the boundary core inside.
"""

from __future__ import annotations

import csv
import functools
import math
from dataclasses import dataclass, field
from typing import List, Sequence

import numpy as np
from scipy.special import gamma as _gamma

from .errors import ConvergenceError, DomainError
from .moebius import fixed_points_ts


@functools.lru_cache(maxsize=32)
def _coarse_delta(lam: float) -> float:
    """Cached low-resolution pressure root, for convergence guards."""
    from .flow import pressure_delta

    return pressure_delta(lam, k_cutoff=200, nodes=16, tol=1e-6)


# Gauss-Legendre nodes are cached per order
_GL_CACHE = {}


def _gl(npts):
    if npts not in _GL_CACHE:
        _GL_CACHE[npts] = np.polynomial.legendre.leggauss(npts)
    return _GL_CACHE[npts]


class EisensteinModel:
    """Truncated coset sum over the translation subgroup.

    Parameters
    ----------
    lam : group parameter (> 2)
    s : real spectral parameter; needs s > delta(lam) for the full sum
        to converge, and the truncated model inherits its quality from
        that margin
    syllables : number of S T^k blocks kept (word depth)
    kmax : per-block cutoff of the translation exponent
    """

    def __init__(self, lam: float, s: float, syllables: int = 2, kmax: int = 40,
                 check_margin: bool = True):
        if not lam > 2:
            raise DomainError(f"lam must be > 2, got {lam}")
        self.lam = lam
        self.s = float(s)
        if check_margin and self.s < _coarse_delta(round(lam, 9)) + 0.05:
            raise DomainError(
                f"s = {s} violates the coset-sum convergence margin "
                f"(needs s > delta(lam) + 0.05)"
            )
        self.syllables = syllables
        self.kmax = kmax
        self._rows = self._enumerate()

    @classmethod
    def from_word_length(cls, lam: float, s: float, L: int, **kw):
        """Truncation by word length: L letters allow (L-1)//2 inversion
        blocks, with the exponent cutoff growing alongside.  The block
        count is capped at 3 to keep the enumeration in the hundreds of
        thousands."""
        syllables = min(max(1, (L - 1) // 2), 3)
        kmax = 10 * (1 + min((L - 1) // 2, 3))
        return cls(lam, s, syllables=syllables, kmax=kmax, **kw)

    def _enumerate(self) -> np.ndarray:
        """Bottom rows (c, d) of all coset representatives.

        The set {id, S} + {(S T^{k_1})...(S T^{k_j}), with and without a
        trailing S} is closed under right multiplication by S (pairing
        w <-> wS), which makes the truncated sum exactly
        inversion-invariant; translation invariance is only as good as
        the exponent cutoff.
        """
        lam = self.lam
        rows = [np.array([[0.0, 1.0], [1.0, 0.0]])]  # identity and S
        frontier = np.array([[1.0, 0.0, 0.0, 1.0]])  # matrices (a,b,c,d) = id
        ks = np.array([k for k in range(-self.kmax, self.kmax + 1) if k != 0])
        for _ in range(self.syllables):
            a, b, c, d = frontier.T
            # right-multiply by S: (a,b,c,d) -> (b,-a,d,-c)
            sa, sb, sc, sd = b, -a, d, -c
            # then by T^k: columns (a, a k lam + b, c, c k lam + d)
            na = np.repeat(sa, len(ks))
            nc = np.repeat(sc, len(ks))
            kk = np.tile(ks, len(sa))
            nb = na * kk * lam + np.repeat(sb, len(ks))
            nd = nc * kk * lam + np.repeat(sd, len(ks))
            frontier = np.stack([na, nb, nc, nd], axis=1)
            rows.append(frontier[:, 2:4])  # words ending in T^k
            rows.append(np.stack([frontier[:, 3], -frontier[:, 2]], axis=1))
        return np.concatenate(rows, axis=0)

    # -- evaluation -----------------------------------------------------

    _CHUNK = 60_000  # coset rows per block; bounds peak memory

    def eval(self, z):
        """(u, du/dx, du/dy) at z (scalar or array), Im z > 0."""
        zz = np.atleast_1d(np.asarray(z, dtype=complex))
        if np.any(zz.imag <= 0):
            raise DomainError("evaluation requires Im z > 0")
        s = self.s
        y = zz.imag
        u = np.zeros(zz.shape, dtype=complex)
        ux = np.zeros(zz.shape, dtype=complex)
        uy = np.zeros(zz.shape, dtype=complex)
        for lo in range(0, len(self._rows), self._CHUNK):
            rows = self._rows[lo:lo + self._CHUNK]
            c = rows[:, 0][:, None]
            d = rows[:, 1][:, None]
            w = c * zz[None, :] + d
            Q = w.real ** 2 + w.imag ** 2
            term = (y[None, :] / Q) ** s
            u += np.sum(term, axis=0)
            # d/dx Q = 2 c (c x + d), d/dy Q = 2 c^2 y
            Qx = 2.0 * c * w.real
            Qy = 2.0 * c * c * y[None, :]
            ux += np.sum(term * (-s) * Qx / Q, axis=0)
            uy += np.sum(term * (s / y[None, :] - s * Qy / Q), axis=0)
        if np.ndim(z) == 0:
            return complex(u[0]), complex(ux[0]), complex(uy[0])
        return u, ux, uy

    def core(self, t):
        """Boundary core A(t) = sum |c t + d|^{-2s} on the real line."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.zeros(t.shape, dtype=float)
        for lo in range(0, len(self._rows), self._CHUNK):
            rows = self._rows[lo:lo + self._CHUNK]
            w = rows[:, 0][:, None] * t[None, :] + rows[:, 1][:, None]
            if np.any(np.abs(w) < 1e-12):
                raise DomainError("core evaluated at a pole (a cusp point)")
            out += np.sum(np.abs(w) ** (-2.0 * self.s), axis=0)
        return float(out[0]) if np.ndim(t) == 0 or t.size == 1 else out

    def invariance_residual(self, gen: str, probes: Sequence[complex]) -> float:
        """sup |u(gen z) - u(z)| over probes, gen in {'T', 'S'}."""
        worst = 0.0
        for z in probes:
            z = complex(z)
            gz = z + self.lam if gen == "T" else -1.0 / z
            u1 = self.eval(z)[0]
            u2 = self.eval(gz)[0]
            worst = max(worst, abs(u2 - u1))
        return worst

    def laplace_residual(self, z, h: float = 1e-3) -> float:
        """5-point relative defect of the eigenvalue equation at z."""
        s = self.s
        z = complex(z)
        u0 = self.eval(z)[0]
        uxx = (self.eval(z + h)[0] - 2 * u0 + self.eval(z - h)[0]) / h ** 2
        uyy = (self.eval(z + 1j * h)[0] - 2 * u0 + self.eval(z - 1j * h)[0]) / h ** 2
        lap = -(z.imag ** 2) * (uxx + uyy)
        target = s * (1.0 - s) * u0
        return abs(lap - target) / max(abs(target), 1e-30)


def eisenstein_eval(model: EisensteinModel, z):
    """(u, du/dx, du/dy) of the model at z."""
    return model.eval(z)


# -- contour paths -----------------------------------------------------------


@dataclass
class ContourPath:
    """Piecewise path in the closed upper half plane.

    segments: list of ("line", z0, z1) or ("arc", center, radius, th0, th1);
    only endpoints may sit on the real axis.
    """

    segments: List[tuple] = field(default_factory=list)

    @classmethod
    def line(cls, z0, z1, refine: int = 1):
        zs = np.linspace(complex(z0), complex(z1), refine + 1)
        return cls([("line", zs[i], zs[i + 1]) for i in range(refine)])

    @classmethod
    def polyline(cls, points):
        segs = []
        for z0, z1 in zip(points[:-1], points[1:]):
            segs.append(("line", complex(z0), complex(z1)))
        return cls(segs)

    def __add__(self, other):
        return ContourPath(self.segments + other.segments)

    def nodes(self, npts: int):
        """Quadrature nodes and complex velocities segment by segment."""
        xs, ws = _gl(npts)
        out = []
        for seg in self.segments:
            if seg[0] == "line":
                _, z0, z1 = seg
                mid, half = 0.5 * (z0 + z1), 0.5 * (z1 - z0)
                znode = mid + half * xs
                vel = np.full(npts, half)
                out.append((znode, vel, ws))
            else:
                _, zc, r, th0, th1 = seg
                mid, half = 0.5 * (th0 + th1), 0.5 * (th1 - th0)
                th = mid + half * xs
                znode = zc + r * np.exp(1j * th)
                vel = 1j * r * np.exp(1j * th) * half
                out.append((znode, vel, ws))
        return out


def detour_path(xi: float, eta: float, t: float = math.nan,
                height: float = 0.3, radius: float = 0.05) -> ContourPath:
    """Endpoint-on-the-boundary path: rise, traverse, descend.

    When t lies between the endpoints, the descent is interrupted by a
    semicircle of the given radius over t (the horizontal pieces on the
    real axis carry no mass and are dropped).
    """
    up = ContourPath.polyline([xi, xi + 1j * height])
    down = ContourPath.polyline([eta + 1j * height, eta])
    if math.isnan(t) or not (min(xi, eta) < t < max(xi, eta)):
        across = ContourPath.polyline([xi + 1j * height, eta + 1j * height])
        return up + across + down
    across1 = ContourPath.polyline([xi + 1j * height, t - radius + 1j * height,
                                    t - radius])
    arc = ContourPath([("arc", complex(t, 0.0), radius, math.pi, 0.0)])
    across2 = ContourPath.polyline([t + radius, t + radius + 1j * height,
                                    eta + 1j * height])
    return up + across1 + arc + across2 + down


# -- the Green's form ----------------------------------------------------


def _kernel_factors(t: float, z: np.ndarray, s: float):
    """R^s and its x, y derivatives for the kernel R = y / |t-z|^2."""
    x, y = z.real, z.imag
    Q = (t - x) ** 2 + y ** 2
    R = y / Q
    Rs = R ** s
    Rx = 2.0 * y * (t - x) / Q ** 2
    Ry = ((t - x) ** 2 - y ** 2) / Q ** 2
    vx = s * Rs / R * Rx
    vy = s * Rs / R * Ry
    return Rs, vx, vy


def greens_form_integral(model: EisensteinModel, t: float, path: ContourPath,
                         npts: int = 48, richardson: bool = True) -> complex:
    """Integral of {u, R(t;.)^s} along the path, Gauss-Legendre per segment.

    With richardson=True the node count is doubled once and a
    ConvergenceError is raised if the two results disagree by more than
    1e-6 (flagged quadrature).
    """

    def run(npts_):
        total = 0.0 + 0.0j
        for znode, vel, ws in path.nodes(npts_):
            mask = znode.imag > 1e-13
            if not np.any(mask):
                continue
            zs = znode[mask]
            u, ux, uy = model.eval(zs)
            v, vx, vy = _kernel_factors(t, zs, model.s)
            integrand = (uy * v - u * vy) * vel[mask].real + (
                u * vx - ux * v
            ) * vel[mask].imag
            total += np.sum(ws[mask] * integrand)
        return total

    v1 = run(npts)
    if not richardson:
        return v1
    v2 = run(2 * npts)
    if abs(v1 - v2) > 1e-6 * max(1.0, abs(v2)):
        raise ConvergenceError(
            f"quadrature not converged: {v1} vs {v2} at doubled nodes"
        )
    return v2


def funnel_core_identity(model: EisensteinModel, xi: float, eta: float,
                         t: float, radius: float = 0.05, npts: int = 64):
    """(lhs, rhs) of the boundary-core formula at t in (xi, eta).

    lhs integrates the Green's form along the detour path with a
    semicircle over t; rhs = 2 sqrt(pi) Gamma(s+1/2)/Gamma(s) A(t).
    """
    th_m, th_p = fixed_points_ts(model.lam)
    for v in (xi, eta, t):
        if not th_m < v < th_p:
            raise DomainError(f"{v} outside the funnel interval ({th_m}, {th_p})")
    s = model.s
    path = detour_path(xi, eta, t, radius=radius)
    lhs = greens_form_integral(model, t, path, npts=npts)
    rhs = 2.0 * math.sqrt(math.pi) * _gamma(s + 0.5) / _gamma(s) * model.core(t)
    return lhs, rhs


def cocycle_cu(model: EisensteinModel, z1: complex, z2: complex,
               ts: Sequence[float], npts: int = 48) -> np.ndarray:
    """c_u(z1, z2)(t) for a grid of t: the funnel cocycle values."""
    path = ContourPath.polyline([complex(z1), complex(z2)])
    return np.array(
        [greens_form_integral(model, float(t), path, npts=npts, richardson=False)
         for t in ts]
    )


def cu_equivariance_residual(model: EisensteinModel, gamma_mat: np.ndarray,
                             z1: complex, z2: complex, ts) -> float:
    """|tau_s(gamma) c_u(z1,z2) - c_u(gamma z1, gamma z2)| at the grid.

    tau_s(gamma) F(t) = |c t + d|^{-2s} F(gamma^{-1} t) with
    gamma^{-1} = [a b; c d].
    """
    a, b = gamma_mat[0]
    c, d = gamma_mat[1]
    det = a * d - b * c
    ai, bi, ci, di = d / det, -b / det, -c / det, a / det
    g = lambda z: (a * z + b) / (c * z + d)
    worst = 0.0
    for t in ts:
        den = ci * t + di
        if abs(den) < 1e-9:
            continue
        pull = (ai * t + bi) / den
        lhs = abs(den) ** (-2.0 * model.s) * cocycle_cu(model, z1, z2, [pull])[0]
        rhs = cocycle_cu(model, g(complex(z1)), g(complex(z2)), [t])[0]
        worst = max(worst, abs(lhs - rhs))
    return worst


# -- Fourier data at the cusp -------------------------------------------------


def cusp_fourier_classify(model_or_samples, lam: float, s: float,
                          y1: float = 2.0, y2: float = 4.0, nx: int = 256):
    """(a, b, higher-mode energy): coefficients of y^{1-s} and y^s.

    The zeroth Fourier mode c0(y) at two heights determines (a, b) from
    a 2x2 solve; the remaining bins give the oscillatory energy.  For a
    sampled grid, pass a (x, y, u) triple from `read_sampled_grid`.
    """
    if y1 >= y2 or y1 < 2.0:
        raise DomainError("need cusp-zone heights 2 <= y1 < y2")

    def mode0(y):
        if callable(model_or_samples) or hasattr(model_or_samples, "eval"):
            xs = np.arange(nx) * lam / nx
            u = (model_or_samples.eval(xs + 1j * y)[0]
                 if hasattr(model_or_samples, "eval")
                 else np.array([model_or_samples(complex(x, y)) for x in xs]))
        else:
            xs, u = _samples_at_height(model_or_samples, y, lam)
        bins = np.fft.fft(u) / len(u)
        return bins

    b1 = mode0(y1)
    b2 = mode0(y2)
    A = np.array(
        [[y1 ** (1.0 - s), y1 ** s], [y2 ** (1.0 - s), y2 ** s]], dtype=complex
    )
    cond = np.linalg.cond(A)
    flagged = cond > 1e6  # the solve loses ~6 digits; s is too close to 1/2
    sol = np.linalg.solve(A, np.array([b1[0], b2[0]]))
    higher = float(np.sum(np.abs(b1[1:]) ** 2))
    return {
        "a": complex(sol[0]),
        "b": complex(sol[1]),
        "higher_mode_energy": higher,
        "condition": float(cond),
        "flagged": bool(flagged),
    }


def read_sampled_grid(path):
    """CSV grid (x, y, re_u, im_u) -> {y: (x array, u array)}."""
    rows = {}
    with open(path, newline="") as fh:
        rd = csv.reader(fh)
        header = next(rd)
        if [h.strip() for h in header] != ["x", "y", "re_u", "im_u"]:
            raise ValueError("expected header x,y,re_u,im_u")
        for x, y, re, im in rd:
            rows.setdefault(float(y), []).append((float(x), float(re) + 1j * float(im)))
    out = {}
    for y, pts in rows.items():
        pts.sort()
        out[y] = (np.array([p[0] for p in pts]), np.array([p[1] for p in pts]))
    return out


def _samples_at_height(samples: dict, y: float, lam: float):
    for yy, (xs, us) in samples.items():
        if abs(yy - y) < 1e-9:
            return xs, us
    raise DomainError(f"no sampled row at height {y}")
