import math

import numpy as np
import pytest

from resonance_lab.errors import DomainError, ResourceGuardError
from resonance_lab.moebius import (
    INF,
    GroupElement,
    classify,
    element_from_word,
    enumerate_classes,
    export_length_spectrum,
    fixed_points_ts,
    geodesic_length,
    hecke_generators,
    moebius_apply,
    multiplier,
    trace_from_word,
    word_from_tuple,
)


def test_generators_lam3():
    T, S, J = hecke_generators(3.0)
    assert np.allclose(T.mat, [[1, 3], [0, 1]])
    assert np.allclose(S.mat, [[0, -1], [1, 0]])
    assert np.allclose(J.mat, [[-1, 0], [0, 1]])
    assert (S * S) == element_from_word(3.0, ())


def test_generators_reject_small_lambda():
    with pytest.raises(DomainError):
        hecke_generators(2.0)
    with pytest.raises(DomainError):
        hecke_generators(1.5)


def test_ts_product():
    T, S, _ = hecke_generators(3.0)
    TS = T * S
    assert np.allclose(TS.mat, [[3, -1], [1, 0]])
    assert TS.trace == pytest.approx(3.0)


def test_moebius_apply_basics():
    T, S, _ = hecke_generators(3.0)
    assert moebius_apply(S, 2.0) == pytest.approx(-0.5)
    assert moebius_apply(T, INF) == INF
    th_m, th_p = fixed_points_ts(3.0)
    assert moebius_apply(T * S, th_p) == pytest.approx(th_p)
    # pole goes to the projective point, not an error
    assert moebius_apply(S, 0.0) == INF


def test_fixed_points():
    th_m, th_p = fixed_points_ts(3.0)
    assert th_p == pytest.approx(2.6180340, abs=1e-6)
    assert th_m == pytest.approx(0.3819660, abs=1e-6)
    assert fixed_points_ts(4.0)[1] == pytest.approx(2.0 + math.sqrt(3.0), abs=1e-10)
    for lam in (2.1, 3.0, 5.5, 11.0):
        a, b = fixed_points_ts(lam)
        assert a * b == pytest.approx(1.0, abs=1e-12)
        assert a < 1 < b


def test_classify():
    T, S, _ = hecke_generators(3.0)
    assert classify(T) == "parabolic"
    assert classify(S) == "elliptic"
    assert classify(T * S) == "hyperbolic"
    assert classify(element_from_word(3.0, ())) == "identity"


def test_classify_rejects_reflections():
    _, _, J = hecke_generators(3.0)
    with pytest.raises(DomainError):
        classify(J)


def test_geodesic_lengths():
    T, S, _ = hecke_generators(3.0)
    TS = T * S
    assert geodesic_length(TS) == pytest.approx(1.9248473, abs=1e-6)
    assert geodesic_length(TS * TS) == pytest.approx(2 * 1.9248473002384139, abs=1e-9)
    w = element_from_word(3.0, (("T", 1), ("S", 1), ("T", -1), ("S", 1)))
    assert w.trace == pytest.approx(-11.0)
    assert geodesic_length(w) == pytest.approx(4.7790529, abs=1e-6)
    assert multiplier(TS) == pytest.approx(math.exp(geodesic_length(TS)))
    with pytest.raises(DomainError):
        geodesic_length(T)


def test_word_provenance_and_extended_precision_trace():
    w = word_from_tuple((5, -3, 2, 4, -6, 2, 3, -4))
    g = element_from_word(3.0, w)
    assert abs(g.trace - trace_from_word(g.word, 3.0)) < 1e-6 * abs(g.trace)


def test_projective_equality():
    g = element_from_word(3.0, (("T", 2), ("S", 1)))
    h = GroupElement(-g.mat, 3.0)
    assert g == h


def test_enumerate_small():
    cl = enumerate_classes(3.0, 1, 1)
    assert len(cl) == 2
    assert all(c.primitive for c in cl)
    assert all(abs(c.length - 1.9248473) < 1e-6 for c in cl)
    traces = sorted(c.trace for c in cl)
    assert traces == pytest.approx([-3.0, 3.0])


def test_enumerate_rotation_dedup_and_weight():
    cl = enumerate_classes(3.0, 2, 2)
    by_exp = {c.exponents: c for c in cl}
    # (1,-1) and (-1,1) collapse; lex-min rotation is (-1, 1)
    assert (-1, 1) in by_exp and (1, -1) not in by_exp
    assert by_exp[(-1, 1)].trace == pytest.approx(-11.0)
    assert by_exp[(-1, 1)].weight == 2.0
    # (1,1) = (TS)^2 is non-primitive with w/m = 1
    assert not by_exp[(1, 1)].primitive
    assert by_exp[(1, 1)].weight == 1.0


def test_enumerate_all_hyperbolic_and_power_lengths():
    cl = enumerate_classes(3.0, 4, 6)
    lengths = {c.exponents: c.length for c in cl}
    for c in cl:
        assert abs(c.trace) > 2.0
    # doubling a primitive tuple doubles the length
    for exps in [(1,), (-2,), (-1, 1)]:
        doubled = exps * 2
        key = min(tuple(doubled[i:] + doubled[:i]) for i in range(len(doubled)))
        assert lengths[key] == pytest.approx(2 * lengths[exps], rel=1e-10)


def test_rotation_conjugacy_traces_agree():
    rng = np.random.default_rng(3)
    for _ in range(20):
        n = rng.integers(2, 5)
        exps = tuple(int(a) for a in rng.choice([-3, -2, -1, 1, 2, 3], size=n))
        base = element_from_word(3.0, word_from_tuple(exps)).trace
        for i in range(1, n):
            rot = exps[i:] + exps[:i]
            tr = element_from_word(3.0, word_from_tuple(rot)).trace
            assert tr == pytest.approx(base, abs=1e-10 * max(1, abs(base)))


def test_moebius_composition_property():
    rng = np.random.default_rng(11)
    letters = [("T", 1), ("T", -1), ("S", 1)]
    for _ in range(1000):
        w1 = tuple(letters[rng.integers(3)] for _ in range(rng.integers(1, 4)))
        w2 = tuple(letters[rng.integers(3)] for _ in range(rng.integers(1, 4)))
        g, h = element_from_word(3.0, w1), element_from_word(3.0, w2)
        x = float(rng.normal(scale=3.0))
        lhs = moebius_apply(g * h, x)
        rhs = moebius_apply(g, moebius_apply(h, x))
        if math.isinf(lhs) or math.isinf(rhs):
            assert math.isinf(lhs) == math.isinf(rhs)
        else:
            assert lhs == pytest.approx(rhs, abs=1e-8 * max(1.0, abs(lhs)))


def test_resource_guard():
    with pytest.raises(ResourceGuardError):
        enumerate_classes(3.0, 6, 30, count_cap=1000)


def test_length_spectrum_export(tmp_path):
    cl = enumerate_classes(3.0, 2, 2)
    path = tmp_path / "lengths.csv"
    export_length_spectrum(cl, path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "n,exponent_tuple,trace,length,primitive,weight"
    assert len(lines) == len(cl) + 1
    # sorted by length: first row is one of the two shortest classes
    first = lines[1].split(",")
    assert float(first[3]) == pytest.approx(1.9248473002384139)
