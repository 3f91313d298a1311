import numpy as np
import pytest

from resonance_lab.errors import DomainError
from resonance_lab.fastop import fast_apply
from resonance_lab.periods import (
    PeriodFunction,
    boundary_pair,
    classify_period,
    populate_classification,
    reconstruct_period,
    zeta_series_pair,
)
from resonance_lab.slowop import fe_residual_sup
from resonance_lab.spaces import PairFunction

LAM = 3.0


def test_reconstructed_slow_residual(delta3, period3):
    # probe the fixed-point relation over (-1,2) x (-2,1)
    xs1 = np.linspace(-0.95, 2.0, 100)
    xs2 = np.linspace(-2.0, 0.95, 100)
    assert fe_residual_sup(delta3, LAM, period3.pair, xs1, xs2) < 1e-6


def test_reconstructed_fast_residual(delta3, period3):
    worst = 0.0
    for x in np.linspace(-0.9, 1.8, 25):
        worst = max(worst, abs(
            fast_apply(delta3, LAM, period3.pair, float(x), 1).value
            - period3.pair.f1(float(x))))
        worst = max(worst, abs(
            fast_apply(delta3, LAM, period3.pair, float(-x), 2).value
            - period3.pair.f2(float(-x))))
    assert worst < 1e-7


def test_perron_vector_is_even(perron3):
    assert np.abs(perron3[1::2]).max() < 1e-12
    assert perron3[0] == pytest.approx(1.0)


def test_reject_zero_vector(delta3):
    with pytest.raises(DomainError, match="boundary"):
        reconstruct_period(delta3, LAM, np.zeros(16))


def test_reject_non_eigenvector(delta3):
    rng = np.random.default_rng(1)
    with pytest.raises(DomainError, match="not a 1-eigenfunction"):
        reconstruct_period(delta3, LAM, rng.normal(size=16))


def test_classification_of_perron(period3):
    kind, parity = classify_period(period3)
    assert kind == "resonant-noncuspidal"
    assert parity == "even"
    # the cuspidal value is reported, not asserted against a threshold
    assert np.isfinite(period3.cuspidal_value.real)


def test_boundary_pair_classifies_boundary():
    bp = boundary_pair(LAM)
    pf = PeriodFunction(pair=bp, s=0.8, lam=LAM, source="analytic formula")
    populate_classification(pf, probes=12)
    kind, parity = classify_period(pf)
    assert kind == "boundary"


def test_even_pair_parity_label():
    f = lambda t: 1.0 / (2.0 + np.asarray(t, dtype=float) ** 2)
    pair = PairFunction.from_closures(f, lambda t: f(-np.asarray(t, dtype=float)))
    pf = PeriodFunction(pair=pair, s=0.8, lam=LAM, source="analytic formula")
    populate_classification(pf, probes=10)
    assert classify_period(pf)[1] == "even"


def test_odd_pairs_are_automatically_cuspidal():
    # f2(t) = -f1(-t) forces f1(0) + f2(0) = 0
    f1 = lambda t: np.asarray(t, dtype=float) / (2.0 + np.asarray(t, dtype=float) ** 2)
    pair = PairFunction.from_closures(f1, lambda t: -f1(-np.asarray(t, dtype=float)))
    pf = PeriodFunction(pair=pair, s=0.8, lam=LAM, source="analytic formula")
    populate_classification(pf, probes=10)
    assert abs(pf.cuspidal_value) < 1e-14
    assert classify_period(pf)[1] == "odd"


def test_zeta_series_matches_direct_sum(delta3, perron3):
    # the Hurwitz-zeta form of the components against raw branch sums
    pair = zeta_series_pair(delta3, LAM, perron3)
    s2 = 2.0 * delta3
    from resonance_lab.spaces import taylor_eval

    n = np.arange(1, 200_000)
    for x in (-0.5, 0.0, 1.2):
        args = -1.0 / (n * LAM + x)
        direct = np.sum((n * LAM + x) ** (-s2) * taylor_eval(perron3, args))
        # crude integral tail with h(0)=1 normalization
        direct += ((n[-1] + 0.5) * LAM + x) ** (1.0 - s2) / (LAM * (s2 - 1.0))
        assert abs(pair.f1(float(x)) - direct) < 1e-6


def test_populate_classification_fields(period3):
    assert period3.slow_residual < 1e-6
    assert period3.fast_residual < 1e-7
    assert period3.parity_defect_even < 1e-10
    assert period3.parity_defect_odd > 0.1


def test_reconstruction_at_complex_resonance():
    # the first off-axis zero: the continued operator family still has
    # a unit eigenvalue there, and the reconstructed pair satisfies the
    # fixed-point relations on the nose
    from resonance_lab.periods import unit_eigenvector

    s0 = 0.3303253169315115 + 5.504717281838865j
    h = unit_eigenvector(s0, LAM, 36)
    pf = reconstruct_period(s0, LAM, h, probes=10)
    assert pf.slow_residual < 1e-9
    assert pf.fast_residual < 1e-9
    kind, parity = classify_period(pf)
    assert kind == "resonant-noncuspidal"
    assert parity == "even"


def test_unit_eigenvector_requires_resonance():
    from resonance_lab.periods import unit_eigenvector

    with pytest.raises(DomainError, match="no unit eigenvalue"):
        unit_eigenvector(2.0, LAM, 24)
