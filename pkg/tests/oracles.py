"""Independent reference computations used by the tests.

Nothing here touches the frame or form machinery: the shape-operator oracle
sees only the position map ``x(u1, u2)`` and works with plain finite
differences and a generalized symmetric eigenproblem.
"""

import numpy as np
from scipy.linalg import eigh

# fourth-order central difference weights for offsets -2..2
_OFFSETS = np.array([-2.0, -1.0, 1.0, 2.0])
_WEIGHTS = np.array([1.0, -8.0, 8.0, -1.0]) / 12.0


def central_diff(f, u, axis, h):
    du = np.zeros(2)
    du[axis] = h
    return sum(w * f(u + o * du) for o, w in zip(_OFFSETS, _WEIGHTS)) / h


def unit_normal(position, u, h=1e-3):
    """Unit normal inside T S^3, oriented so that det(x_u1, x_u2, n, -x) > 0."""
    x = position(*u)
    t1 = central_diff(lambda v: position(*v), u, 0, h)
    t2 = central_diff(lambda v: position(*v), u, 1, h)
    basis = np.stack([t1, t2, x])
    n = np.linalg.svd(basis)[2][-1]
    if np.linalg.det(np.stack([t1, t2, n, -x])) < 0:
        n = -n
    return n


def shape_operator_curvatures(position, u, h=1e-3):
    """Principal curvatures (descending) at chart point ``u``.

    Uses II_kl = -<d_k n, x_l> with the normal differentiated numerically,
    then solves II v = lam I v.
    """
    u = np.asarray(u, dtype=float)
    t = [central_diff(lambda v: position(*v), u, k, h) for k in range(2)]
    dn = [central_diff(lambda v: unit_normal(position, v, h), u, k, h) for k in range(2)]
    first = np.array([[t[k] @ t[l] for l in range(2)] for k in range(2)])
    second = -np.array([[dn[k] @ t[l] for l in range(2)] for k in range(2)])
    second = 0.5 * (second + second.T)
    return eigh(second, first, eigvals_only=True)[::-1]


def sphere_cap_curvature(k):
    return k / np.sqrt(1.0 - k * k)


def torus_curvatures(a, b):
    """Principal curvatures of the (a, b) torus keyed to its two chart lines."""
    return -b / a, a / b
