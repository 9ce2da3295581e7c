import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from frameforge.errors import BadParameter, DegenerateInput
from frameforge.linalg import (
    SymMat2,
    check_isometry,
    complete_oriented,
    det4,
    eig_sym2,
    gram_schmidt4,
    random_so4,
    rot2,
    so4_block_rotation,
)

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
S = 1 / np.sqrt(2)


def test_gram_schmidt_examples():
    np.testing.assert_allclose(gram_schmidt4([[1, 0, 0, 0], [0, 1, 0, 0]]), [[1, 0, 0, 0], [0, 1, 0, 0]])
    np.testing.assert_allclose(gram_schmidt4([[2, 0, 0, 0]]), [[1, 0, 0, 0]])
    np.testing.assert_allclose(gram_schmidt4([[1, 1, 0, 0], [0, 1, 0, 0]]), [[S, S, 0, 0], [-S, S, 0, 0]], atol=1e-15)


def test_gram_schmidt_rejects_dependent():
    with pytest.raises(DegenerateInput):
        gram_schmidt4([[1, 2, 3, 4], [2, 4, 6, 8]])
    with pytest.raises(DegenerateInput):
        gram_schmidt4([[0, 0, 0, 0]])


@settings(max_examples=200, deadline=None)
@given(arrays(float, (3, 4), elements=finite))
def test_gram_schmidt_orthonormal(vs):
    try:
        q = gram_schmidt4(vs)
    except DegenerateInput:
        return
    assert np.max(np.abs(q @ q.T - np.eye(3))) < 1e-10
    # span is preserved: the first output is parallel to the first input
    assert abs(abs(q[0] @ vs[0]) - np.linalg.norm(vs[0])) < 1e-9 * max(1, np.linalg.norm(vs[0]))


def test_gram_schmidt_batched():
    rng = np.random.default_rng(3)
    q = gram_schmidt4(rng.normal(size=(5, 7, 3, 4)))
    assert q.shape == (5, 7, 3, 4)
    assert np.max(np.abs(np.einsum("...ia,...ja->...ij", q, q) - np.eye(3))) < 1e-12


def test_complete_oriented_gives_positive_det():
    q = random_so4(4)
    n = complete_oriented(q[0], q[1], q[3])
    frame = np.stack([q[0], q[1], n, q[3]])
    assert abs(det4(frame) - 1) < 1e-12
    np.testing.assert_allclose(n, q[2], atol=1e-12)


def test_eig_examples():
    l1, l2, d1, d2 = eig_sym2(SymMat2(0.75, 0.0, 0.75))
    assert l1 == l2 == 0.75
    np.testing.assert_allclose(d1, [1, 0])
    np.testing.assert_allclose(d2, [0, 1])
    l1, l2, _, _ = eig_sym2(SymMat2(1.0, 0.0, -1.0))
    assert (l1, l2) == (1.0, -1.0)
    l1, l2, d1, _ = eig_sym2(SymMat2(0.0, 1.0, 0.0))
    assert abs(l1 - 1) < 1e-15 and abs(l2 + 1) < 1e-15
    np.testing.assert_allclose(np.abs(d1), [S, S], atol=1e-15)


@settings(max_examples=300, deadline=None)
@given(finite, finite, finite)
def test_eig_reconstruction(a, b, c):
    h = SymMat2(a, b, c)
    l1, l2, d1, d2 = eig_sym2(h)
    assert l1 >= l2
    rebuilt = l1 * np.outer(d1, d1) + l2 * np.outer(d2, d2)
    assert np.max(np.abs(h.matrix() - rebuilt)) < 1e-9 * max(1.0, abs(a), abs(b), abs(c))
    assert abs(d1 @ d2) < 1e-12


def test_block_rotation_examples():
    np.testing.assert_array_equal(so4_block_rotation(0, 0), np.eye(4))
    np.testing.assert_allclose(so4_block_rotation(np.pi, 0), np.diag([-1, -1, 1, 1]), atol=1e-15)
    g = so4_block_rotation(np.pi / 2, np.pi / 3)
    assert np.max(np.abs(g.T @ g - np.eye(4))) < 1e-14
    np.testing.assert_allclose(g[:2, :2], rot2(np.pi / 2), atol=1e-15)


def test_random_so4():
    np.testing.assert_array_equal(random_so4(0), random_so4(0))
    g = random_so4(1)
    assert np.max(np.abs(g.T @ g - np.eye(4))) < 1e-12
    assert abs(np.linalg.det(random_so4(2)) - 1) < 1e-12
    assert not np.allclose(random_so4(0), random_so4(1))


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10_000), arrays(float, (2, 4), elements=finite),
       st.floats(-7, 7), st.floats(-7, 7))
def test_isometries_preserve_inner_product(seed, uv, alpha, beta):
    u, v = uv
    for g in (random_so4(seed), so4_block_rotation(alpha, beta)):
        assert abs((g @ u) @ (g @ v) - u @ v) < 1e-10 * max(1.0, np.linalg.norm(u) * np.linalg.norm(v))


def test_check_isometry_rejects():
    with pytest.raises(BadParameter):
        check_isometry(np.diag([-1.0, 1, 1, 1]))
    with pytest.raises(BadParameter):
        check_isometry(2 * np.eye(4))
    with pytest.raises(BadParameter):
        check_isometry(np.eye(3))
    np.testing.assert_array_equal(check_isometry(np.eye(4).tolist()), np.eye(4))
