"""Differential forms on a 2-D parameter chart, stored as coefficient fields.

A 1-form ``p du1 + q du2`` is a callable returning the pair ``(p, q)`` stacked
on the last axis; a 2-form ``w du1 ^ du2`` is a callable returning ``w``.
Both are evaluated on (broadcast) arrays of chart coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import OutOfDomain
from .patch import Domain

H_FORM = 1e-4

_UNBOUNDED = Domain((-np.inf, -np.inf), (np.inf, np.inf), (True, True))


def _as_field(f):
    if callable(f):
        return f
    c = float(f)
    return lambda u1, u2: np.full(np.broadcast(u1, u2).shape, c)


@dataclass(frozen=True)
class Form2:
    coeff: Callable[[np.ndarray, np.ndarray], np.ndarray]
    domain: Domain = _UNBOUNDED

    def __call__(self, u1, u2) -> np.ndarray:
        u1, u2 = np.broadcast_arrays(np.asarray(u1, dtype=float), np.asarray(u2, dtype=float))
        return np.broadcast_to(self.coeff(u1, u2), u1.shape)

    def __add__(self, other: "Form2") -> "Form2":
        return Form2(lambda u1, u2: self(u1, u2) + other(u1, u2), self.domain)

    def __sub__(self, other: "Form2") -> "Form2":
        return Form2(lambda u1, u2: self(u1, u2) - other(u1, u2), self.domain)

    def __neg__(self) -> "Form2":
        return Form2(lambda u1, u2: -self(u1, u2), self.domain)

    def __rmul__(self, f) -> "Form2":
        f = _as_field(f)
        return Form2(lambda u1, u2: f(u1, u2) * self(u1, u2), self.domain)


@dataclass(frozen=True)
class Form1:
    """``p du1 + q du2``.

    ``exterior`` optionally supplies the analytic coefficient of ``d(self)``;
    :func:`d1` uses it in analytic mode.
    """

    coeffs: Callable[[np.ndarray, np.ndarray], np.ndarray]
    domain: Domain = _UNBOUNDED
    exterior: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None

    @classmethod
    def from_pq(cls, p, q, domain: Domain = _UNBOUNDED, exterior=None) -> "Form1":
        p, q = _as_field(p), _as_field(q)
        return cls(lambda u1, u2: np.stack(np.broadcast_arrays(p(u1, u2), q(u1, u2)), axis=-1), domain, exterior)

    def __call__(self, u1, u2) -> np.ndarray:
        u1, u2 = np.broadcast_arrays(np.asarray(u1, dtype=float), np.asarray(u2, dtype=float))
        return np.broadcast_to(self.coeffs(u1, u2), u1.shape + (2,))

    def __add__(self, other: "Form1") -> "Form1":
        ext = None
        if self.exterior is not None and other.exterior is not None:
            ext = lambda u1, u2: self.exterior(u1, u2) + other.exterior(u1, u2)  # noqa: E731
        return Form1(lambda u1, u2: self(u1, u2) + other(u1, u2), self.domain, ext)

    def __neg__(self) -> "Form1":
        ext = None if self.exterior is None else (lambda u1, u2: -self.exterior(u1, u2))
        return Form1(lambda u1, u2: -self(u1, u2), self.domain, ext)

    def __sub__(self, other: "Form1") -> "Form1":
        return self + (-other)

    def __rmul__(self, f) -> "Form1":
        # the product rule would need df, so the analytic exterior is dropped
        f = _as_field(f)
        return Form1(lambda u1, u2: f(u1, u2)[..., None] * self(u1, u2), self.domain)


def wedge11(alpha: Form1, beta: Form1) -> Form2:
    def coeff(u1, u2):
        a, b = alpha(u1, u2), beta(u1, u2)
        return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]

    return Form2(coeff, alpha.domain)


def exact(f: Callable, h: float = H_FORM, domain: Domain = _UNBOUNDED) -> Form1:
    """The differential ``df`` of a scalar field, by central differences."""

    def coeffs(u1, u2):
        p = (f(u1 + h, u2) - f(u1 - h, u2)) / (2 * h)
        q = (f(u1, u2 + h) - f(u1, u2 - h)) / (2 * h)
        return np.stack(np.broadcast_arrays(p, q), axis=-1)

    return Form1(coeffs, domain)


def d1(alpha: Form1, mode: str = "finite-difference", h_form: float = H_FORM) -> Form2:
    """Exterior derivative ``d(p du1 + q du2) = (dq/du1 - dp/du2) du1 ^ du2``.

    ``mode="analytic"`` uses the form's own ``exterior`` callable; the
    finite-difference mode uses central differences with step ``h_form`` and
    refuses points whose stencil leaves a non-periodic chart boundary.
    """
    if mode == "analytic":
        if alpha.exterior is None:
            raise ValueError("form carries no analytic exterior derivative")
        return Form2(alpha.exterior, alpha.domain)
    if mode != "finite-difference":
        raise ValueError(f"unknown mode {mode!r}")

    dom = alpha.domain

    def coeff(u1, u2):
        if not dom.contains(u1, u2, pad=h_form):
            raise OutOfDomain("finite-difference stencil leaves the chart")
        dq1 = (alpha(u1 + h_form, u2)[..., 1] - alpha(u1 - h_form, u2)[..., 1]) / (2 * h_form)
        dp2 = (alpha(u1, u2 + h_form)[..., 0] - alpha(u1, u2 - h_form)[..., 0]) / (2 * h_form)
        return dq1 - dp2

    return Form2(coeff, dom)


@dataclass(frozen=True)
class GridSpec:
    """Sampling grid: ``n1 x n2`` points, kept ``margin`` away from closed chart edges.

    Periodic axes are sampled uniformly without the repeated endpoint.
    """

    n1: int = 32
    n2: int = 32
    margin: float = 0.01

    def __post_init__(self):
        if self.n1 < 4 or self.n2 < 4:
            raise ValueError(f"grid must be at least 4x4, got {self.n1}x{self.n2}")

    def axes(self, domain: Domain) -> tuple[np.ndarray, np.ndarray]:
        out = []
        for axis, n in enumerate((self.n1, self.n2)):
            lo, hi = domain.lo[axis], domain.hi[axis]
            if not (np.isfinite(lo) and np.isfinite(hi)):
                raise ValueError("cannot sample an unbounded domain")
            if domain.periodic[axis]:
                out.append(lo + (hi - lo) * np.arange(n) / n)
            else:
                out.append(np.linspace(lo + self.margin, hi - self.margin, n))
        return out[0], out[1]

    def points(self, domain: Domain) -> tuple[np.ndarray, np.ndarray]:
        a1, a2 = self.axes(domain)
        return np.meshgrid(a1, a2, indexing="ij")


def grid_max(omega: Form2, grid: GridSpec, domain: Domain | None = None) -> float:
    u1, u2 = grid.points(domain or omega.domain)
    return float(np.max(np.abs(omega(u1, u2))))
