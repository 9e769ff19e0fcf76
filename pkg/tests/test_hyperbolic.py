import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import minimize_scalar

from maxrep.hyperbolic import (
    INF,
    Hyperbolization,
    HyperbolizationError,
    TangentTriple,
    act_boundary,
    axis_tangent_triple,
    disk_distance,
    evaluate_h,
    fixed_points,
    is_hyperbolic,
    is_positively_oriented,
    load_hyperbolization,
    mobius,
    octagon_hyperbolization,
    translation_length_h,
)
from maxrep.surface_group import Word, relator

E = math.e


def random_sl2(seed, scale=0.7):
    rng = np.random.default_rng(seed)
    M = np.eye(2) + scale * rng.normal(size=(2, 2))
    d = np.linalg.det(M)
    if d < 0:
        M[:, 0] *= -1
        d = -d
    return M / math.sqrt(d)


def disp(M, z):
    return disk_distance(z, mobius(M, z))


# ------------------------------------------------------------------ examples


def test_distance_examples():
    assert disk_distance(1j, 1j) == 0.0
    assert disk_distance(1j, E * 1j) == pytest.approx(1.0, abs=1e-12)


def test_distance_matches_geodesic_integral():
    # along the imaginary axis ds = dy / y
    ys = np.linspace(1.0, 5.0, 20001)
    integral = np.trapezoid(1.0 / ys, ys)
    assert disk_distance(1j, 5j) == pytest.approx(integral, abs=1e-8)


def test_translation_length_examples():
    assert translation_length_h(np.eye(2)) == 0.0
    assert translation_length_h(np.diag([E, 1 / E])) == pytest.approx(2.0, abs=1e-12)
    assert translation_length_h(np.array([[1.0, 1.0], [0.0, 1.0]])) == pytest.approx(0.0, abs=1e-12)


def test_translation_length_is_infimum_of_displacement():
    M = np.array([[2.0, 1.0], [1.0, 1.0]])
    x_minus, x_plus = fixed_points(M)
    # displacement along the perpendicular through the axis is minimized on the axis
    centre, radius = (x_minus + x_plus) / 2, abs(x_plus - x_minus) / 2
    res = minimize_scalar(lambda y: disp(M, complex(centre, y)), bounds=(1e-3, 10), method="bounded",
                          options={"xatol": 1e-12})
    assert res.fun == pytest.approx(translation_length_h(M), abs=1e-8)
    assert res.x == pytest.approx(radius, abs=1e-5)
    # and no grid point does better
    grid = [disp(M, complex(x, y)) for x in np.linspace(-3, 3, 31) for y in np.linspace(0.05, 4, 31)]
    assert min(grid) >= translation_length_h(M) - 1e-12


def test_parabolic_infimum_tends_to_zero():
    P = np.array([[1.0, 1.0], [0.0, 1.0]])
    assert disp(P, 1e6j) < 1e-5


def test_fixed_points_examples():
    D = np.diag([E, 1 / E])
    assert fixed_points(D) == (0.0, INF)
    T = np.array([[1.0, 1.0], [0.0, 1.0]])
    xm, xp = fixed_points(T @ D @ np.linalg.inv(T))
    assert xm == pytest.approx(1.0) and xp == INF
    M = np.array([[2.0, 1.0], [1.0, 1.0]])
    xm, xp = fixed_points(M)
    a, b, c, d = M.ravel()
    roots = sorted(np.roots([c, d - a, -b]))
    assert sorted([xm, xp]) == pytest.approx(roots)
    # attraction oracle: iterate a generic point
    x = 0.3
    for _ in range(60):
        x = act_boundary(M, x)
    assert x == pytest.approx(xp)


def test_axis_tangent_triple_examples():
    D = np.diag([E, 1 / E])
    u = axis_tangent_triple(D)
    assert u.minus == 0.0 and u.plus == INF and math.isfinite(u.zero) and u.zero < 0
    assert is_positively_oriented(*u)
    M = np.array([[2.0, 1.0], [1.0, 1.0]])
    u1 = axis_tangent_triple(M)
    u5 = axis_tangent_triple(np.linalg.matrix_power(M, 5))
    assert (u1.minus, u1.plus) == pytest.approx((u5.minus, u5.plus))


def test_orientation_convention():
    assert is_positively_oriented(0.0, -1.0, INF)
    assert not is_positively_oriented(0.0, 1.0, INF)
    with pytest.raises(ValueError):
        TangentTriple(0.0, 1.0, INF).validate()


def test_octagon():
    h = octagon_hyperbolization()
    assert h.relator_residual() <= 1e-8
    lengths = [translation_length_h(M) for M in h.images.values()]
    assert all(is_hyperbolic(M) for M in h.images.values())
    assert max(lengths) - min(lengths) <= 1e-8 and min(lengths) > 0
    # each pairing is a rotation by 3pi/2 about i after a transvection of length 2d with
    # cosh d = 1 + sqrt 2, so |trace| = 2 |cos(3pi/4)| cosh d = 2 + sqrt 2
    assert lengths[0] == pytest.approx(2 * math.acosh(1 + math.sqrt(2) / 2), abs=1e-9)


def test_evaluate_h_examples():
    h = octagon_hyperbolization()
    assert np.array_equal(evaluate_h(h, Word.identity(2)), np.eye(2))
    assert np.allclose(evaluate_h(h, Word((1, -1), 2)), np.eye(2))
    R = evaluate_h(h, relator(2))
    assert min(np.abs(R - np.eye(2)).max(), np.abs(R + np.eye(2)).max()) <= 1e-8


def test_hyperbolization_validation():
    h = octagon_hyperbolization()
    bad = dict(h.images)
    bad[1] = np.eye(2)
    with pytest.raises(HyperbolizationError):
        Hyperbolization(bad, 2).validate()
    with pytest.raises(HyperbolizationError):
        Hyperbolization({1: np.eye(2)}, 2)


def test_hyperbolization_table_round_trip(tmp_path):
    h = octagon_hyperbolization()
    p = tmp_path / "h.txt"
    p.write_text(h.to_table())
    again = load_hyperbolization(p)
    assert all(np.array_equal(again.images[g], h.images[g]) for g in h.images)


def test_no_short_elliptics_in_octagon_group():
    from maxrep.surface_group import generators
    h = octagon_hyperbolization()
    alphabet = [g * s for g in generators(2) for s in (1, -1)]
    elliptic = []
    for a in alphabet:
        for b in alphabet:
            for c in alphabet:
                word = Word((a, b, c), 2)
                if word.is_trivial():
                    continue
                t = abs(np.trace(h(word)))
                if t < 2 - 1e-9:
                    elliptic.append(str(word))
    assert elliptic == []


# ---------------------------------------------------------------- properties

seeds = st.integers(0, 10**6)


@settings(max_examples=100)
@given(seeds, st.complex_numbers(max_magnitude=3).map(lambda z: complex(z.real, abs(z.imag) + 0.1)),
       st.complex_numbers(max_magnitude=3).map(lambda z: complex(z.real, abs(z.imag) + 0.1)))
def test_distance_invariance(seed, p, q):
    g = random_sl2(seed)
    assert disk_distance(mobius(g, p), mobius(g, q)) == pytest.approx(disk_distance(p, q), abs=1e-9, rel=1e-9)


@settings(max_examples=100)
@given(st.lists(st.integers(1, 4).flatmap(lambda g: st.sampled_from([g, -g])), min_size=1, max_size=6),
       st.lists(st.integers(1, 4).flatmap(lambda g: st.sampled_from([g, -g])), max_size=4))
def test_trace_length_conjugation_and_powers(xs, cs):
    h = octagon_hyperbolization()
    w = Word(tuple(xs), 2)
    if w.is_trivial() or not is_hyperbolic(h(w)):
        return
    eta = Word(tuple(cs), 2)
    ell = translation_length_h(h(w))
    assert translation_length_h(h(w.conjugate(eta))) == pytest.approx(ell, abs=1e-9, rel=1e-9)
    for k in range(1, 6):
        assert translation_length_h(h(w ** k)) == pytest.approx(k * ell, abs=1e-6)


@settings(max_examples=100)
@given(seeds, seeds)
def test_fixed_points_equivariance(s1, s2):
    M = random_sl2(s1, 1.5)
    if not is_hyperbolic(M, 1e-3):
        return
    g = random_sl2(s2)
    xm, xp = fixed_points(g @ M @ np.linalg.inv(g))
    ym, yp = (act_boundary(g, x) for x in fixed_points(M))
    for a, b in ((xm, ym), (xp, yp)):
        if math.isinf(a) or math.isinf(b):
            assert abs(a) > 1e8 or abs(b) > 1e8 or a == b
        else:
            assert a == pytest.approx(b, abs=1e-8, rel=1e-8)


@settings(max_examples=60)
@given(seeds)
def test_axis_triple_is_positive_and_on_axis(seed):
    M = random_sl2(seed, 1.5)
    if not is_hyperbolic(M, 1e-3):
        return
    u = axis_tangent_triple(M)
    assert is_positively_oriented(*u)
    assert (u.minus, u.plus) == fixed_points(M)
