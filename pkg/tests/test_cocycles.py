import math

import numpy as np
import pytest

from resonance_lab.cocycles import (
    Cocycle,
    PiecewiseSection,
    Term,
    boundary_coboundary_residual,
    build_cocycle,
    equivariance_residual,
    parity_conjugation_residual,
    reflected_pair,
    verify_cocycle,
    xi_point,
)
from resonance_lab.errors import DomainError, ExceptionalPointError
from resonance_lab.moebius import INF, element_from_word
from resonance_lab.spaces import CyclicInterval, PairFunction, ScalarFunc

LAM = 3.0


@pytest.fixture(scope="module")
def cocycle3(delta3, extended3):
    return build_cocycle(delta3, LAM, extended3)


def test_rejects_non_eigenfunction():
    junk = PairFunction.from_closures(
        lambda t: np.exp(-np.asarray(t, dtype=float) ** 2),
        lambda t: np.ones_like(np.asarray(t, dtype=float)),
    )
    with pytest.raises(DomainError):
        build_cocycle(0.8, LAM, junk)


def test_seed_values(cocycle3, extended3):
    one = xi_point(LAM, (), 1.0)
    infty = xi_point(LAM, (), INF)
    minus_one = xi_point(LAM, (("S", 1),), 1.0)
    assert minus_one.value == pytest.approx(-1.0)
    sec = cocycle3.value(one, infty)
    for t in np.linspace(-4.0, 0.8, 17):
        assert abs(sec.eval(float(t)) + extended3.f2(float(t))) < 1e-12
    sec2 = cocycle3.value(minus_one, infty)
    pot = cocycle3.potential(minus_one)
    for t in np.linspace(-0.9, 5.0, 17):
        assert abs(sec2.eval(float(t)) - extended3.f1(float(t))) < 1e-12
        assert abs(pot.eval(float(t)) - extended3.f1(float(t))) < 1e-12


def test_xi_point_values():
    lm1 = xi_point(LAM, (("T", 1), ("S", 1)), 1.0)
    assert lm1.value == pytest.approx(LAM - 1.0)
    zero = xi_point(LAM, (("S", 1),), INF)
    assert zero.value == pytest.approx(0.0)
    neg = lm1.negated()
    assert neg.value == pytest.approx(1.0 - LAM)


def test_cocycle_relation_and_antisymmetry(cocycle3):
    rep = verify_cocycle(cocycle3, trials=60, seed=3)
    assert rep["relation"] < 1e-8
    assert rep["antisymmetry"] < 1e-10
    assert rep["equivariance"] < 1e-8
    assert rep["vanishing"] < 1e-8
    assert rep["used"] > 40


def test_equivariance_identity_is_exact(cocycle3):
    e = element_from_word(LAM, ())
    xi = xi_point(LAM, (("T", 1),), 1.0)
    eta = xi_point(LAM, (), INF)
    r = equivariance_residual(cocycle3, e, xi, eta, 0.37)
    assert r == 0.0


def test_vanishing_detects_perturbation(delta3, extended3):
    eps = 1e-3
    pert = PairFunction(
        ScalarFunc(lambda t: extended3.f1.func(t) + eps, extended3.f1.domain, "f1p"),
        ScalarFunc(extended3.f2.func, extended3.f2.domain, "f2"),
    )
    coc = Cocycle(delta3, LAM, pert, check_residual=False)
    assert coc.vanishing_residual() >= 1e-4


def test_boundary_pair_coboundary():
    res = boundary_coboundary_residual(
        1.1, LAM, lambda t: np.exp(2j * math.pi * np.asarray(t) / LAM)
    )
    assert res < 1e-10


def test_parity_anti_equivariance(delta3, extended3, cocycle3):
    cocJ = Cocycle(delta3, LAM, reflected_pair(extended3), check_residual=False)
    assert parity_conjugation_residual(cocycle3, cocJ) < 1e-8


def test_exceptional_points_raise(cocycle3):
    one = xi_point(LAM, (), 1.0)
    infty = xi_point(LAM, (), INF)
    sec = cocycle3.value(one, infty)
    with pytest.raises(ExceptionalPointError):
        sec.eval(1.0)  # endpoint of the defining pieces
    zero = PiecewiseSection.zero(1.0, LAM)
    assert zero.eval(0.123) == 0.0


def test_section_translation_moves_intervals():
    f = ScalarFunc(lambda t: np.ones_like(np.asarray(t, dtype=float)), None, "1")
    e = element_from_word(LAM, ())
    sec = PiecewiseSection(
        1.0, LAM, [(CyclicInterval(0.0, INF), (Term(1.0, e, f),))]
    )
    T = element_from_word(LAM, (("T", 1),))
    moved = sec.tau(T)
    iv = moved.pieces[0][0]
    assert iv.a == pytest.approx(LAM)  # T maps (0, inf)_c to (lam, inf)_c
    assert math.isinf(iv.b)
    # weight of the translation is 1: values shift
    assert moved.eval(4.0) == pytest.approx(sec.eval(1.0))


def test_section_addition_refines():
    f = ScalarFunc(lambda t: np.ones_like(np.asarray(t, dtype=float)), None, "1")
    e = element_from_word(LAM, ())
    a = PiecewiseSection(1.0, LAM, [
        (CyclicInterval(0.0, INF), (Term(1.0, e, f),)),
        (CyclicInterval(INF, 0.0), (Term(2.0, e, f),)),
    ])
    b = PiecewiseSection(1.0, LAM, [
        (CyclicInterval(1.0, INF), (Term(10.0, e, f),)),
        (CyclicInterval(INF, 1.0), (Term(20.0, e, f),)),
    ])
    tot = a + b
    assert tot.eval(0.5) == pytest.approx(21.0)
    assert tot.eval(2.0) == pytest.approx(11.0)
    assert tot.eval(-1.0) == pytest.approx(22.0)


def test_word_length_cap(cocycle3):
    with pytest.raises(DomainError):
        cocycle3.psi\
            (tuple([("T", 1), ("S", 1)] * 7))
