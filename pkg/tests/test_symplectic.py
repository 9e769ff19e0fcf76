import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from maxrep.symplectic import (
    CausalCurve,
    Frame,
    Lagrangian,
    NonCausal,
    NotInParallelSet,
    NotTransverse,
    SymplecticError,
    act_on_J,
    base_point,
    causal_length,
    check_causal_bound,
    check_compatible,
    compatible_form,
    congruence_extremes,
    d_proof,
    d_sp,
    d_y,
    d_y_moved,
    gl_act,
    gl_embed,
    graph_lagrangian,
    graph_map,
    in_cone,
    is_compatible,
    is_lagrangian,
    is_maximal_triple,
    is_symplectic,
    push_J,
    random_causal_curve,
    random_compatible,
    random_symplectic,
    sp_inverse,
    standard_form,
    standard_pair,
    transverse,
    triple_J,
    triple_signature,
    unitary_part,
    y_embed,
    y_project,
)

seeds = st.integers(0, 10**6)
dims = st.integers(1, 4)


def rng_of(seed):
    return np.random.default_rng(seed)


def random_posdef(n, rng, scale=1.0):
    A = rng.normal(scale=scale, size=(n, n))
    return A @ A.T + 0.2 * np.eye(n)


def L(*cols):
    return Lagrangian(np.array(cols, dtype=float).T)


# ------------------------------------------------------------------ examples


def test_is_symplectic_examples():
    assert is_symplectic(np.eye(4))
    assert is_symplectic(np.diag([2.0, 0.5]))
    assert not is_symplectic(np.diag([2.0, 2.0]))


def test_base_point_is_compatible():
    for n in (1, 2, 3):
        J0 = base_point(n)
        assert np.allclose(J0 @ J0, -np.eye(2 * n))
        assert np.allclose(compatible_form(J0), np.eye(2 * n))
    assert not is_compatible(-base_point(2))


def test_act_on_J_examples():
    J = random_compatible(2, rng_of(0))
    assert np.allclose(act_on_J(np.eye(4), J), J)
    # rotations in U(2) commute with J0 and fix it
    theta = 0.7
    X, Y = math.cos(theta) * np.eye(2), math.sin(theta) * np.eye(2)
    U = np.block([[X, -Y], [Y, X]])
    assert is_symplectic(U)
    assert np.allclose(act_on_J(U, base_point(2)), base_point(2))


def test_actions_are_right_and_left():
    rng = rng_of(1)
    g, h = random_symplectic(2, rng), random_symplectic(2, rng)
    J = random_compatible(2, rng)
    assert np.allclose(act_on_J(g @ h, J), act_on_J(h, act_on_J(g, J)))
    assert np.allclose(push_J(g @ h, J), push_J(g, push_J(h, J)))


def test_d_sp_examples():
    J = random_compatible(2, rng_of(2))
    assert d_sp(J, J) == pytest.approx(0.0, abs=1e-12)
    J1, J2 = y_embed(np.eye(2)), y_embed(np.diag([math.e ** 4, math.e ** 2]))
    Q1, Q2 = compatible_form(J1), compatible_form(J2)
    ev = np.sort(np.linalg.eigvals(np.linalg.solve(Q1, Q2)).real)
    assert ev == pytest.approx(np.exp([-4.0, -2.0, 2.0, 4.0]))
    assert d_sp(J1, J2) == pytest.approx(4.0, abs=1e-12)


def test_d_y_examples():
    Z = random_posdef(3, rng_of(3))
    assert d_y(Z, Z) == pytest.approx(0.0, abs=1e-12)
    assert d_y(np.eye(2), np.diag([math.e ** 4, math.e ** 2])) == pytest.approx(4.0, abs=1e-12)
    assert d_proof(np.eye(2), np.diag([math.e ** 4, math.e ** 2])) == pytest.approx(6.0, abs=1e-12)


def test_d_y_closed_form_n1():
    # one dimension: Q = diag(z, 1/z), so d_sp = |log(z'/z)| = d_y
    for z, z2 in ((1.0, 3.0), (0.2, 7.0), (5.0, 0.5)):
        assert d_y(np.array([[z]]), np.array([[z2]])) == pytest.approx(abs(math.log(z2 / z)))
        assert d_sp(y_embed([[z]]), y_embed([[z2]])) == pytest.approx(abs(math.log(z2 / z)))


def test_lagrangian_examples():
    Lm, Lp = standard_pair(2)
    assert is_lagrangian(Lm.basis) and is_lagrangian(Lp.basis)
    assert transverse(Lm, Lp) and not transverse(Lm, Lm)
    S = np.array([[1.0, 2.0], [2.0, -3.0]])
    assert is_lagrangian(graph_lagrangian(S).basis)
    with pytest.raises(SymplecticError):
        Lagrangian(np.array([[1.0, 0.0], [0.0, 0.0], [0.0, 1.0], [0.0, 0.0]]))


def test_non_symmetric_graph_is_not_lagrangian():
    B = np.vstack([np.eye(2), np.array([[0.0, 1.0], [0.0, 0.0]])])
    assert not is_lagrangian(B)


def test_graph_map_examples():
    T_minus, T_plus = graph_map(L([1, 0]), L([0, 1]), L([1, 1]))
    assert T_minus == pytest.approx(np.array([[1.0]]))
    eps = 1e-4
    T_minus, _ = graph_map(L([1, 0]), L([0, 1]), L([eps, 1]))
    assert abs(T_minus[0, 0]) == pytest.approx(1 / eps, rel=1e-8)
    with pytest.raises(NotTransverse):
        graph_map(L([1, 0]), L([0, 1]), L([0, 1]))


def test_graph_map_reconstruction():
    rng = rng_of(4)
    Lm, Lp = Lagrangian(random_symplectic(2, rng)[:, :2]), Lagrangian(random_symplectic(2, rng)[:, 2:])
    S = rng.normal(size=(2, 2))
    frame = Frame.from_pair(Lm, Lp)
    L0 = graph_lagrangian(S + S.T + 5 * np.eye(2), frame)
    T_minus, T_plus = graph_map(Lm, Lp, L0)
    rebuilt = Lagrangian(frame.F @ np.vstack([np.eye(2), T_minus]))
    assert rebuilt.distance(L0) <= 1e-9
    assert np.allclose(T_plus, np.linalg.inv(T_minus))


def test_triple_examples():
    e1, e2 = L([1, 0]), L([0, 1])
    assert is_maximal_triple(e1, L([1, 1]), e2) == (True, 2)
    assert is_maximal_triple(e1, L([1, -1]), e2) == (False, -2)
    Lm, Lp = standard_pair(2)
    assert triple_signature(Lm, graph_lagrangian(np.diag([1.0, -1.0])), Lp) == 0
    J = triple_J(e1, L([1, 1]), e2)
    check_compatible(J)
    # the triple structure exchanges L- and L+
    assert np.allclose(J @ np.array([1.0, 0.0]), [0.0, 1.0])


def test_y_embed_examples():
    assert np.allclose(y_embed(np.eye(3)), base_point(3))
    rng = rng_of(5)
    for n in (1, 2, 3, 4):
        Z = random_posdef(n, rng)
        assert np.abs(y_project(y_embed(Z)) - Z).max() <= 1e-9
    with pytest.raises(NotInParallelSet):
        y_project(act_on_J(random_symplectic(2, rng, 1.0), base_point(2)))


def test_gl_action_identity():
    rng = rng_of(6)
    for n in (1, 2, 3):
        A = rng.normal(size=(n, n)) + 2 * np.eye(n)
        Z = random_posdef(n, rng)
        g = gl_embed(A)
        assert is_symplectic(g)
        lhs = act_on_J(g, y_embed(Z))
        assert np.abs(lhs - y_embed(gl_act(A, Z))).max() <= 1e-9 * max(1, np.abs(lhs).max())


def test_in_cone_examples():
    assert in_cone(np.eye(2), 2 * np.eye(2))
    assert not in_cone(np.eye(2), np.diag([2.0, 0.5]))


def test_causal_examples():
    c = CausalCurve((np.eye(1), 2 * np.eye(1)))
    r = check_causal_bound(c, "d_y")
    assert r.length == pytest.approx(math.log(2), abs=1e-12)
    assert r.bound == pytest.approx(math.log(2), abs=1e-12)
    assert r.margin == pytest.approx(0.0, abs=1e-12) and r.passed
    diag = CausalCurve(tuple(np.diag([math.exp(2 * t), math.exp(t)]) for t in np.linspace(0, 1, 9)))
    length, _ = causal_length(diag, "d_y")
    assert length <= 2 * d_y(np.eye(2), np.diag([math.e ** 2, math.e])) + 1e-9
    assert 2 * d_y(np.eye(2), np.diag([math.e ** 2, math.e])) == pytest.approx(4.0)
    with pytest.raises(NonCausal):
        CausalCurve((np.eye(2), np.diag([2.0, 0.5])))


def test_unitary_part_examples():
    U, detc = unitary_part(np.diag([math.e, 1 / math.e]))
    assert np.allclose(U, np.eye(2)) and detc == pytest.approx(1.0)
    theta = 0.9
    R = np.array([[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]])
    U, detc = unitary_part(R)
    assert np.allclose(U, R)
    assert detc == pytest.approx(complex(math.cos(theta), math.sin(theta)))


def test_congruence_extremes_match_dense_spectrum():
    rng = rng_of(7)
    Z = random_posdef(3, rng)
    B = rng.normal(size=(3, 3)) + 3 * np.eye(3)
    lam = np.linalg.eigvals(np.linalg.solve(Z, B.T @ Z @ B)).real
    lo, hi = congruence_extremes(Z, B)
    assert (lo, hi) == pytest.approx((lam.min(), lam.max()), rel=1e-10)
    assert d_y_moved(Z, B) == pytest.approx(d_y(Z, B.T @ Z @ B), rel=1e-10)


# ---------------------------------------------------------------- properties


@settings(max_examples=100, deadline=None)
@given(dims, seeds)
def test_d_sp_symmetric_and_invariant(n, seed):
    rng = rng_of(seed)
    J1, J2 = random_compatible(n, rng), random_compatible(n, rng)
    g = random_symplectic(n, rng)
    d = d_sp(J1, J2)
    assert d >= 0
    assert d_sp(J2, J1) == pytest.approx(d, abs=1e-9)
    assert d_sp(act_on_J(g, J1), act_on_J(g, J2)) == pytest.approx(d, abs=1e-9)
    assert d_sp(push_J(g, J1), push_J(g, J2)) == pytest.approx(d, abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(dims, seeds)
def test_compatible_stays_compatible(n, seed):
    rng = rng_of(seed)
    J = random_compatible(n, rng)
    g = random_symplectic(n, rng)
    Q = compatible_form(act_on_J(g, J))
    assert np.linalg.eigvalsh((Q + Q.T) / 2)[0] > 0


def test_d_sp_triangle_inequality_reported():
    worst = -math.inf
    for n in (1, 2, 3, 4):
        rng = rng_of(100 + n)
        for _ in range(250):
            a, b, c = (random_compatible(n, rng, scale=rng.uniform(0.1, 1.5)) for _ in range(3))
            worst = max(worst, d_sp(a, c) - d_sp(a, b) - d_sp(b, c))
    print(f"d_sp triangle inequality: worst excess {worst:.3e} over 1000 random triples")
    assert worst <= 1e-9


@settings(max_examples=100, deadline=None)
@given(dims, seeds)
def test_d_y_equals_d_sp_on_parallel_set(n, seed):
    rng = rng_of(seed)
    Z1, Z2 = random_posdef(n, rng), random_posdef(n, rng)
    assert d_y(Z1, Z2) == pytest.approx(d_sp(y_embed(Z1), y_embed(Z2)), abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(dims, seeds)
def test_d_y_and_cone_gl_invariant(n, seed):
    rng = rng_of(seed)
    Z1, Z2 = random_posdef(n, rng), random_posdef(n, rng)
    A = rng.normal(size=(n, n)) + 2 * np.eye(n)
    assert d_y(gl_act(A, Z1), gl_act(A, Z2)) == pytest.approx(d_y(Z1, Z2), abs=1e-9)
    assert in_cone(Z1, Z2) == in_cone(gl_act(A, Z1), gl_act(A, Z2))
    Z3 = Z1 + random_posdef(n, rng)
    assert in_cone(Z1, Z3) and in_cone(gl_act(A, Z1), gl_act(A, Z3))


@settings(max_examples=100, deadline=None)
@given(dims, seeds)
def test_cone_transitive(n, seed):
    rng = rng_of(seed)
    Z = random_posdef(n, rng)
    Z1 = Z + random_posdef(n, rng)
    Z2 = Z1 + random_posdef(n, rng)
    assert in_cone(Z, Z1) and in_cone(Z1, Z2) and in_cone(Z, Z2)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3), seeds)
def test_causal_length_additive(n, seed):
    rng = rng_of(seed)
    c = random_causal_curve(n, rng, 6)
    mid = c.samples[-1]
    d = CausalCurve((mid, mid + random_posdef(n, rng)))
    whole, _ = causal_length(c.concat(d))
    parts = causal_length(c)[0] + causal_length(d)[0]
    assert whole == pytest.approx(parts, rel=1e-9, abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3), seeds)
def test_causal_bound_both_metrics(n, seed):
    c = random_causal_curve(n, rng_of(seed), 8)
    for metric in ("d_y", "d_proof"):
        assert check_causal_bound(c, metric).passed


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 3), seeds)
def test_maximality_invariant_under_sp(n, seed):
    rng = rng_of(seed)
    Lm, Lp = standard_pair(n)
    S = rng.normal(size=(n, n))
    L0 = graph_lagrangian(S + S.T)
    if abs(np.linalg.det(S + S.T)) < 1e-3:
        return
    g = random_symplectic(n, rng)
    before = triple_signature(Lm, L0, Lp)
    after = triple_signature(Lm.moved_by(g), L0.moved_by(g), Lp.moved_by(g))
    assert before == after


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 3), seeds)
def test_triple_J_equivariant(n, seed):
    rng = rng_of(seed)
    Lm, Lp = standard_pair(n)
    A = rng.normal(size=(n, n))
    L0 = graph_lagrangian(A @ A.T + np.eye(n))
    g = random_symplectic(n, rng)
    J = triple_J(Lm, L0, Lp)
    Jg = triple_J(Lm.moved_by(g), L0.moved_by(g), Lp.moved_by(g))
    assert np.allclose(Jg, push_J(g, J), atol=1e-8)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 3), seeds)
def test_sp_inverse(n, seed):
    g = random_symplectic(n, rng_of(seed))
    assert np.allclose(sp_inverse(g) @ g, np.eye(2 * n))
    O = standard_form(n)
    assert np.allclose(g.T @ O @ g, O)
