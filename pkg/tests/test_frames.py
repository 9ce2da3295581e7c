import numpy as np
import pytest

from frameforge.errors import NotImmersed, SingularCoframe
from frameforge.forms import Form1, GridSpec, d1, wedge11
from frameforge.frames import (
    ConnectionMatrix,
    Coframe,
    FrameField,
    adapted_frame,
    antisymmetric_part_formula,
    cartan_connection,
    cartan_solve,
    coframe,
    connection_forms,
    frame_from_jet,
    pullback_check,
    structural_residuals,
)
from frameforge.linalg import det4, random_so4
from frameforge.patch import (
    Domain,
    PerturbedTorus,
    SphereCap,
    TorusAB,
    Transformed,
    finite_difference_patch,
    make_patch,
)

S = 1 / np.sqrt(2)
GRID = GridSpec(16, 16)
SPECS = [SphereCap(0.0), SphereCap(0.6), TorusAB(S, S), TorusAB(0.6, 0.8), PerturbedTorus(S, S, 0.1, 3),
         Transformed(random_so4(8), SphereCap(0.4))]


def points(patch, grid=GRID):
    return grid.points(patch.domain)


def test_torus_frame_at_origin():
    f = adapted_frame(make_patch(TorusAB(S, S)), 0.0, 0.0)
    np.testing.assert_allclose(f.e1, [0, 1, 0, 0], atol=1e-15)
    np.testing.assert_allclose(f.e2, [0, 0, 0, 1], atol=1e-15)
    np.testing.assert_allclose(f.e3, [S, 0, -S, 0], atol=1e-15)
    np.testing.assert_allclose(f.e4, [-S, 0, -S, 0], atol=1e-15)


def test_great_sphere_position_frame():
    np.testing.assert_allclose(adapted_frame(make_patch(SphereCap(0.0)), 0.0, 0.0).e4, [-1, 0, 0, 0], atol=1e-15)


@pytest.mark.parametrize("spec", SPECS, ids=repr)
def test_frames_orthonormal_and_positive(spec):
    patch = make_patch(spec)
    u1, u2 = points(patch)
    f = FrameField(patch).frame(u1, u2)
    gram = np.einsum("...ia,...ja->...ij", f, f)
    assert np.max(np.abs(gram - np.eye(4))) < 1e-10
    assert np.max(np.abs(det4(f) - 1)) < 1e-12
    np.testing.assert_allclose(f[..., 3, :], -patch.position(u1, u2), atol=1e-15)
    assert np.max(np.abs(np.sum(f[..., 2, :] * patch.position(u1, u2), -1))) < 1e-12


@pytest.mark.parametrize("a,b", [(S, S), (0.6, 0.8)])
def test_torus_normal_closed_form(a, b):
    patch = make_patch(TorusAB(a, b))
    u1, u2 = points(patch)
    e3 = FrameField(patch).frame(u1, u2)[..., 2, :]
    want = np.stack([b * np.cos(u1 / a), b * np.sin(u1 / a), -a * np.cos(u2 / b), -a * np.sin(u2 / b)], -1)
    assert np.max(np.abs(e3 - want)) < 1e-12


def test_transformed_frame_is_rotated():
    g = random_so4(21)
    base, moved = make_patch(TorusAB(0.6, 0.8)), make_patch(Transformed(g, TorusAB(0.6, 0.8)))
    u1, u2 = points(base)
    np.testing.assert_allclose(FrameField(moved).frame(u1, u2), FrameField(base).frame(u1, u2) @ g.T, atol=1e-12)


def test_frame_from_degenerate_jet():
    jet = make_patch(SphereCap(0.5)).jet(0.1, 0.2)
    with pytest.raises(NotImmersed):
        frame_from_jet(jet._replace(x_u2=jet.x_u1))


def test_coframe_examples():
    torus = make_patch(TorusAB(0.6, 0.8))
    cf = coframe(torus)
    u1, u2 = points(torus)
    np.testing.assert_allclose(cf.theta1(u1, u2), np.broadcast_to([1.0, 0.0], u1.shape + (2,)), atol=1e-12)
    np.testing.assert_allclose(cf.theta2(u1, u2), np.broadcast_to([0.0, 1.0], u1.shape + (2,)), atol=1e-12)
    sphere = make_patch(SphereCap(0.6))
    cf = coframe(sphere)
    np.testing.assert_allclose(cf.theta1(0.7, 0.0), [0.8, 0.0], atol=1e-15)
    np.testing.assert_allclose(cf.theta2(0.7, 0.0), [0.0, 0.8], atol=1e-15)
    for spec in SPECS:
        assert coframe(make_patch(spec)).theta3_residual(GRID) < 1e-10


def test_coframe_exterior_matches_finite_difference():
    patch = make_patch(PerturbedTorus(S, S, 0.1, 4))
    u1, u2 = points(patch)
    cf = coframe(patch)
    for th in (cf.theta1, cf.theta2, cf.theta3):
        assert np.max(np.abs(d1(th, "analytic")(u1, u2) - d1(th)(u1, u2))) < 1e-7


@pytest.mark.parametrize("a,b", [(S, S), (0.6, 0.8), (0.28, 0.96)])
def test_torus_connection(a, b):
    patch = make_patch(TorusAB(a, b))
    om = connection_forms(patch).at(*points(patch))
    assert np.max(np.abs(om[..., 0, 1, :])) < 1e-8
    # shape operator in the arclength chart: omega_1^3 = (-b/a) du1, omega_2^3 = (a/b) du2
    np.testing.assert_allclose(om[..., 0, 2, 0], -b / a, atol=1e-12)
    np.testing.assert_allclose(om[..., 1, 2, 1], a / b, atol=1e-12)


def test_sphere_connection():
    patch = make_patch(SphereCap(0.6))
    conn = connection_forms(patch)
    cf = coframe(patch)
    u1, u2 = points(patch)
    assert np.max(np.abs(conn.omega(1, 3)(u1, u2) - 0.75 * cf.theta1(u1, u2))) < 1e-7
    assert np.max(np.abs(conn[2, 3](u1, u2) - 0.75 * cf.theta2(u1, u2))) < 1e-7


@pytest.mark.parametrize("spec", SPECS, ids=repr)
def test_position_rows_of_connection(spec):
    patch = make_patch(spec)
    conn = connection_forms(patch)
    cf = coframe(patch)
    u1, u2 = points(patch)
    for i in (1, 2, 3):
        assert np.max(np.abs(conn.omega(4, i)(u1, u2) + cf.theta(i)(u1, u2))) < 1e-8


@pytest.mark.parametrize("spec", SPECS, ids=repr)
def test_raw_connection_is_antisymmetric(spec):
    conn = connection_forms(make_patch(spec))
    assert conn.raw_defect(GRID) < 1e-12
    fd = connection_forms(finite_difference_patch(make_patch(spec)))
    assert fd.raw_defect(GRID) < 1e-6


def test_fd_and_analytic_frame_derivatives_agree():
    patch = make_patch(PerturbedTorus(S, S, 0.05, 2))
    u1, u2 = points(patch)
    a = ConnectionMatrix(FrameField(patch)).at(u1, u2)
    b = ConnectionMatrix(FrameField(patch, 1e-4, "finite-difference")).at(u1, u2)
    assert np.max(np.abs(a - b)) < 1e-7


def test_cartan_solve_flat_chart():
    plane = Domain((-1.0, -1.0), (1.0, 1.0))
    du1, du2 = Form1.from_pq(1.0, 0.0, plane), Form1.from_pq(0.0, 1.0, plane)
    cf = Coframe(du1, du2, Form1.from_pq(0.0, 0.0, plane))
    u1, u2 = GridSpec(5, 5).points(plane)
    w, gamma = cartan_solve(cf, d1(du1), d1(du2), u1, u2)
    np.testing.assert_array_equal(w, 0.0)
    np.testing.assert_array_equal(gamma, 0.0)


def test_cartan_solve_latitude_chart():
    # theta^1 = cos(u2) du1, theta^2 = du2: the unit sphere in latitude coordinates
    dom = Domain((-1.0, -1.0), (1.0, 1.0))
    t1 = Form1.from_pq(lambda a, b: np.cos(b), 0.0, dom, exterior=lambda a, b: np.sin(b))
    t2 = Form1.from_pq(0.0, 1.0, dom, exterior=lambda a, b: 0.0 * a)
    cf = Coframe(t1, t2, Form1.from_pq(0.0, 0.0, dom))
    u1, u2 = GridSpec(7, 7).points(dom)
    w, _ = cartan_solve(cf, d1(t1, "analytic"), d1(t2, "analytic"), u1, u2)
    np.testing.assert_allclose(w[..., 0], np.sin(u2), atol=1e-15)
    np.testing.assert_allclose(w[..., 1], 0.0, atol=1e-15)
    w12 = Form1(lambda a, b: cartan_solve(cf, d1(t1, "analytic"), d1(t2, "analytic"), a, b)[0], dom)
    # substitute back into both equations
    assert np.max(np.abs((d1(t1, "analytic") - wedge11(w12, t2))(u1, u2))) < 1e-10
    assert np.max(np.abs((d1(t2, "analytic") + wedge11(w12, t1))(u1, u2))) < 1e-10


def test_cartan_solve_singular():
    dom = Domain((-1.0, -1.0), (1.0, 1.0))
    t = Form1.from_pq(1.0, 0.0, dom)
    with pytest.raises(SingularCoframe):
        cartan_solve(Coframe(t, t, t), d1(t), d1(t), np.zeros(2), np.zeros(2))


@pytest.mark.parametrize("spec", [SphereCap(0.6), TorusAB(0.6, 0.8), PerturbedTorus(S, S, 0.1, 5)], ids=repr)
def test_cartan_connection_matches_frame(spec):
    patch = make_patch(spec)
    u1, u2 = points(patch)
    solved = cartan_connection(patch)(u1, u2)
    measured = connection_forms(patch).omega(1, 2)(u1, u2)
    assert np.max(np.abs(solved - measured)) < 1e-7


def test_proof_formula_recovers_solution():
    patch = make_patch(PerturbedTorus(S, S, 0.05, 3))
    cf = coframe(patch)
    u1, u2 = points(patch)
    _, gamma = cartan_solve(cf, d1(cf.theta1, "analytic"), d1(cf.theta2, "analytic"), u1, u2)
    np.testing.assert_allclose(antisymmetric_part_formula(gamma), gamma, atol=1e-14)
    # adding a part symmetric in the 1-form slots leaves theta^j ^ omega_j^i unchanged
    rng = np.random.default_rng(0)
    extra = rng.normal(size=gamma.shape)
    extra = extra + np.swapaxes(extra, -1, -2)
    np.testing.assert_allclose(antisymmetric_part_formula(gamma + extra), gamma, atol=1e-12)


@pytest.mark.parametrize("spec", SPECS, ids=repr)
def test_structural_residuals_small(spec):
    res = structural_residuals(make_patch(spec), GRID)
    assert res.worst() < 1e-6
    assert res.antisymmetry == 0.0
    table = res.table(GRID)
    assert len(table) == 3 * 4 + 1 + 3 + 3
    assert all(row["grid"] == [16, 16] for row in table)


@pytest.mark.parametrize("spec", [SphereCap(0.6), TorusAB(S, S), PerturbedTorus(S, S, 0.05, 3)], ids=repr)
def test_structural_residuals_fd_jets(spec):
    assert structural_residuals(finite_difference_patch(make_patch(spec)), GRID).worst() < 1e-4


def test_fd_residuals_converge_with_step():
    patch = make_patch(PerturbedTorus(S, S, 0.05, 3))
    res = [structural_residuals(finite_difference_patch(patch, h), GRID, h, h).worst() for h in (1e-3, 5e-4)]
    assert 3.8 < res[0] / res[1] < 4.2


def test_pullback():
    patch = make_patch(TorusAB(0.6, 0.8))
    assert pullback_check(patch, np.eye(4), GRID) == 0.0
    for seed in range(3):
        assert pullback_check(patch, random_so4(seed), GRID) < 1e-9
        assert pullback_check(make_patch(SphereCap(0.6)), random_so4(seed), GRID) < 1e-9
