import csv
import math

import numpy as np
import pytest
from scipy.special import gamma

from resonance_lab.eisenstein import (
    ContourPath,
    EisensteinModel,
    cocycle_cu,
    cu_equivariance_residual,
    cusp_fourier_classify,
    detour_path,
    funnel_core_identity,
    greens_form_integral,
    read_sampled_grid,
)
from resonance_lab.errors import DomainError
from resonance_lab.moebius import fixed_points_ts

LAM, S = 3.0, 0.9


@pytest.fixture(scope="module")
def model():
    return EisensteinModel(LAM, S)


def test_laplace_eigen_equation(model):
    for z in (0.4 + 0.8j, 1.2 + 0.5j, -0.3 + 1.5j):
        assert model.laplace_residual(z) < 1e-4


def test_identity_coset_dominates_high_in_cusp(model):
    u = model.eval(10j)[0]
    ratio = u.real / 10 ** S
    assert 1.0 < ratio < 1.5  # y^s plus a smaller scattering part


def test_inversion_invariance_exact(model):
    res = model.invariance_residual("S", [0.4 + 0.8j, 1.0 + 0.5j, -0.7 + 1.2j])
    assert res < 1e-12


def test_translation_invariance_truncation_matched():
    probes = [0.4 + 0.8j, 1.0 + 0.6j]
    prev = math.inf
    for L in (6, 8, 10):
        m = EisensteinModel.from_word_length(LAM, S, L)
        res = m.invariance_residual("T", probes)
        # truncation-matched bound: the boundary terms have k ~ kmax
        bound = 40.0 * (m.kmax * LAM) ** (-2.0 * S + 1)
        assert res < bound
        assert res < prev * 1.5  # monotone decrease up to noise
        prev = res


def test_reflection_parity(model):
    for z in (0.4 + 0.8j, 1.1 + 0.3j):
        assert abs(model.eval(-np.conj(z))[0] - model.eval(z)[0]) < 1e-8


def test_requires_upper_half_plane(model):
    with pytest.raises(DomainError):
        model.eval(1.0 - 0.5j)


def test_path_independence(model):
    p1 = ContourPath.polyline([1j, 1 + 1.2j, 2 + 1j])
    p2 = ContourPath.polyline([1j, 0.5 + 0.4j, 2 + 1j])
    v1 = greens_form_integral(model, 1.3, p1)
    v2 = greens_form_integral(model, 1.3, p2)
    assert abs(v1 - v2) < 1e-6


def test_closed_contour_vanishes(model):
    loop = ContourPath.polyline(
        [1 + 0.5j, 1.5 + 0.5j, 1.5 + 1.5j, 1 + 1.5j, 1 + 0.5j]
    )
    assert abs(greens_form_integral(model, 0.9, loop)) < 1e-6


def test_endpoints_on_boundary_outside_interval_vanishes(model):
    th_m, th_p = fixed_points_ts(LAM)
    xi, eta = th_m + 0.3, th_p - 0.3
    path = detour_path(xi, eta)
    for t in (th_p + 0.3, th_m - 0.5, -2.0):
        assert abs(greens_form_integral(model, t, path)) < 1e-6


def test_funnel_core_identity(model):
    lhs, rhs = funnel_core_identity(model, 1.0, 1.6, 1.3)
    assert abs(lhs - rhs) / abs(rhs) < 1e-3
    # t outside (xi, eta): zero branch
    path = detour_path(1.0, 1.6)
    assert abs(greens_form_integral(model, 1.8, path)) < 1e-6


def test_gamma_factor_at_half():
    assert 2 * math.sqrt(math.pi) * gamma(1.0) / gamma(0.5) == pytest.approx(2.0)


def test_core_identity_guards_funnel(model):
    with pytest.raises(DomainError):
        funnel_core_identity(model, 0.1, 1.6, 1.0)


def test_cu_additivity(model):
    ts = np.linspace(-2.0, 2.5, 10)
    c12 = cocycle_cu(model, 1j, 1 + 1j, ts)
    c23 = cocycle_cu(model, 1 + 1j, 2 + 0.5j, ts)
    c13 = cocycle_cu(model, 1j, 2 + 0.5j, ts)
    assert np.abs(c12 + c23 - c13).max() < 1e-5


def test_cu_equivariance_inversion(model):
    Smat = np.array([[0.0, -1.0], [1.0, 0.0]])
    res = cu_equivariance_residual(model, Smat, 1j, 1 + 1j, [0.3, -0.7, 2.2])
    assert res < 1e-5


def test_cu_degenerate_pair_is_zero(model):
    ts = np.linspace(-1.0, 1.0, 5)
    assert np.abs(cocycle_cu(model, 1j, 1j, ts)).max() == 0.0


def test_fourier_classification(model):
    out = cusp_fourier_classify(model, LAM, S, 2.0, 4.0)
    assert abs(out["b"] - 1.0) < 0.1  # identity coset carries y^s
    assert abs(out["a"]) > 1e-3  # generically nonzero scattering term
    assert not out["flagged"]


def test_fourier_synthetic_exact():
    syn = lambda z: z.imag ** (1.0 - S)
    out = cusp_fourier_classify(syn, LAM, S, 2.0, 4.0)
    assert out["a"] == pytest.approx(1.0, abs=1e-12)
    assert abs(out["b"]) < 1e-12


def test_fourier_flags_near_half():
    syn = lambda z: z.imag ** 0.5
    out = cusp_fourier_classify(syn, LAM, 0.5 + 1e-7, 2.0, 4.0)
    assert out["flagged"]


def test_sampled_grid_round_trip(tmp_path, model):
    path = tmp_path / "grid.csv"
    nx = 64
    xs = np.arange(nx) * LAM / nx
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "y", "re_u", "im_u"])
        for y in (2.0, 4.0):
            u = model.eval(xs + 1j * y)[0]
            for x, v in zip(xs, u):
                w.writerow([f"{x:.12e}", f"{y:.1f}", f"{v.real:.15e}", f"{v.imag:.15e}"])
    samples = read_sampled_grid(path)
    out = cusp_fourier_classify(samples, LAM, S, 2.0, 4.0)
    ref = cusp_fourier_classify(model, LAM, S, 2.0, 4.0, nx=nx)
    assert out["b"] == pytest.approx(ref["b"], abs=1e-9)
    assert out["a"] == pytest.approx(ref["a"], abs=1e-9)


def test_quadrature_richardson_flag(model):
    # one-node quadrature on a long path cannot pass the doubling check
    from resonance_lab.errors import ConvergenceError

    rough = ContourPath.polyline([0.1j + 0.38, 2.6 + 0.1j])
    with pytest.raises(ConvergenceError):
        greens_form_integral(model, 1.3, rough, npts=2)
