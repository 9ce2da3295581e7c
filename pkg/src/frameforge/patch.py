"""Parametrized surface patches in the unit 3-sphere and their 2-jets.

A patch is a single chart ``(u1, u2) -> x in S^3 subset R^4`` together with
an evaluator returning the position and all first and second partials.  All
evaluators are vectorized: ``u1`` and ``u2`` may be arrays of any (broadcast
compatible) shape and every field of the returned :class:`Jet2` then has
shape ``(..., 4)``.

Built-in families
-----------------
* ``SphereCap(k)``: the round 2-sphere ``x4 = k``, charted by longitude
  ``u1`` and latitude ``u2``.
* ``TorusAB(a, b)``: the flat torus ``x1^2 + x2^2 = a^2``, ``x3^2 + x4^2 = b^2``
  in arclength coordinates, so both chart tangents are unit vectors.
* ``PerturbedTorus(a, b, eps, mode)``: a torus whose first radius is modulated
  and then pushed back onto S^3.  Used as a negative control.
* ``Transformed(g, inner)``: any of the above moved by ``g`` in SO(4).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Union

import numpy as np

from .errors import BadParameter, NotImmersed, OutOfDomain, UnsupportedSpec
from .linalg import TOL_RANK, check_isometry

TOL_SPHERE = 1e-12
POLE_MARGIN = 0.05
H_FD = 1e-4


class Jet2(NamedTuple):
    x: np.ndarray
    x_u1: np.ndarray
    x_u2: np.ndarray
    x_u1u1: np.ndarray
    x_u1u2: np.ndarray
    x_u2u2: np.ndarray

    def transform(self, g: np.ndarray) -> "Jet2":
        return Jet2(*(v @ g.T for v in self))


@dataclass(frozen=True)
class Domain:
    """Closed rectangle of the chart; periodic axes wrap and accept any value."""

    lo: tuple[float, float]
    hi: tuple[float, float]
    periodic: tuple[bool, bool] = (False, False)

    def contains(self, u1, u2, pad: float = 0.0) -> bool:
        for axis, u in enumerate((u1, u2)):
            if self.periodic[axis]:
                continue
            u = np.asarray(u)
            if np.any(u < self.lo[axis] + pad) or np.any(u > self.hi[axis] - pad):
                return False
        return True


# -- family descriptors -----------------------------------------------------


@dataclass(frozen=True)
class SphereCap:
    k: float

    def __post_init__(self):
        if not (0.0 <= self.k < 1.0):
            raise BadParameter(f"sphere cap needs 0 <= k < 1, got k={self.k}")


@dataclass(frozen=True)
class TorusAB:
    a: float
    b: float

    def __post_init__(self):
        if self.a <= 0 or self.b <= 0:
            raise BadParameter("torus radii must be positive")
        if abs(self.a**2 + self.b**2 - 1.0) > TOL_SPHERE * 100:
            raise BadParameter(f"torus radii must satisfy a^2 + b^2 = 1, got {self.a**2 + self.b**2!r}")


@dataclass(frozen=True)
class PerturbedTorus:
    a: float
    b: float
    eps: float
    mode: int

    def __post_init__(self):
        TorusAB(self.a, self.b)
        if not (0.0 <= self.eps <= 0.2):
            raise BadParameter(f"eps must lie in [0, 0.2], got {self.eps}")
        if int(self.mode) != self.mode or self.mode < 0:
            raise BadParameter("mode must be a non-negative integer")


@dataclass(frozen=True, eq=False)
class Transformed:
    g: np.ndarray
    inner: "FamilySpec"

    def __post_init__(self):
        object.__setattr__(self, "g", check_isometry(self.g))

    def __eq__(self, other):
        return (
            isinstance(other, Transformed)
            and np.array_equal(self.g, other.g)
            and self.inner == other.inner
        )

    __hash__ = None


FamilySpec = Union[SphereCap, TorusAB, PerturbedTorus, Transformed]


def spec_to_dict(spec: FamilySpec) -> dict:
    if isinstance(spec, SphereCap):
        return {"type": "sphere_cap", "k": spec.k}
    if isinstance(spec, TorusAB):
        return {"type": "torus", "a": spec.a, "b": spec.b}
    if isinstance(spec, PerturbedTorus):
        return {"type": "perturbed_torus", "a": spec.a, "b": spec.b, "eps": spec.eps, "mode": spec.mode}
    if isinstance(spec, Transformed):
        return {"type": "transformed", "g": spec.g.tolist(), "inner": spec_to_dict(spec.inner)}
    raise UnsupportedSpec(f"cannot serialize {spec!r}")


def spec_from_dict(d: dict) -> FamilySpec:
    try:
        kind = d["type"]
        if kind == "sphere_cap":
            return SphereCap(float(d["k"]))
        if kind == "torus":
            a = float(d.get("a", math.sqrt(0.5)))
            b = float(d["b"]) if "b" in d else math.sqrt(1.0 - a * a)
            return TorusAB(a, b)
        if kind == "perturbed_torus":
            return PerturbedTorus(
                float(d.get("a", math.sqrt(0.5))),
                float(d.get("b", math.sqrt(0.5))),
                float(d["eps"]),
                int(d.get("mode", 3)),
            )
        if kind == "transformed":
            return Transformed(np.array(d["g"], dtype=float), spec_from_dict(d["inner"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise BadParameter(f"malformed family spec {d!r}: {exc}") from exc
    raise BadParameter(f"unknown family type {d.get('type')!r}")


# -- patches ------------------------------------------------------------------


@dataclass(frozen=True)
class SurfacePatch:
    """A chart of a surface in S^3.

    Attributes:
        evaluator: vectorized map ``(u1, u2) -> Jet2``.
        domain: chart rectangle.
        jet_kind: ``"analytic"`` or ``"finite-difference"``.
        spec: the family this patch realizes, if any.
        position: vectorized map ``(u1, u2) -> x``; defaults to the jet's ``x``.
    """

    evaluator: Callable[[np.ndarray, np.ndarray], Jet2]
    domain: Domain
    jet_kind: str = "analytic"
    spec: FamilySpec | None = None
    position_fn: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = field(default=None, repr=False)

    def jet(self, u1, u2) -> Jet2:
        return self.evaluator(np.asarray(u1, dtype=float), np.asarray(u2, dtype=float))

    def position(self, u1, u2) -> np.ndarray:
        if self.position_fn is not None:
            return self.position_fn(np.asarray(u1, dtype=float), np.asarray(u2, dtype=float))
        return self.jet(u1, u2).x


def tangent_area(jet: Jet2) -> np.ndarray:
    """Norm of x_u1 ^ x_u2 (area density of the chart)."""
    g11 = np.sum(jet.x_u1 * jet.x_u1, axis=-1)
    g22 = np.sum(jet.x_u2 * jet.x_u2, axis=-1)
    g12 = np.sum(jet.x_u1 * jet.x_u2, axis=-1)
    return np.sqrt(np.maximum(g11 * g22 - g12 * g12, 0.0))


def eval_jet(patch: SurfacePatch, u1, u2, tol_rank: float = TOL_RANK) -> Jet2:
    """Evaluate the 2-jet, checking the domain and the immersion condition."""
    if not patch.domain.contains(u1, u2):
        raise OutOfDomain(f"({u1}, {u2}) outside chart domain {patch.domain}")
    jet = patch.jet(u1, u2)
    if np.any(tangent_area(jet) < tol_rank):
        raise NotImmersed(f"chart tangents degenerate at ({u1}, {u2})")
    return jet


def _stack(*cols):
    cols = np.broadcast_arrays(*cols)
    return np.stack(cols, axis=-1)


def make_sphere_family(k: float) -> SurfacePatch:
    spec = SphereCap(float(k))
    r = math.sqrt(1.0 - spec.k**2)

    def evaluator(u1, u2):
        c1, s1, c2, s2 = np.cos(u1), np.sin(u1), np.cos(u2), np.sin(u2)
        c1, s1, c2, s2 = np.broadcast_arrays(c1, s1, c2, s2)
        zero = np.zeros_like(c1)
        return Jet2(
            _stack(r * c1 * c2, r * s1 * c2, r * s2, zero + spec.k),
            _stack(-r * s1 * c2, r * c1 * c2, zero, zero),
            _stack(-r * c1 * s2, -r * s1 * s2, r * c2, zero),
            _stack(-r * c1 * c2, -r * s1 * c2, zero, zero),
            _stack(r * s1 * s2, -r * c1 * s2, zero, zero),
            _stack(-r * c1 * c2, -r * s1 * c2, -r * s2, zero),
        )

    half = math.pi / 2 - POLE_MARGIN
    return SurfacePatch(evaluator, Domain((0.0, -half), (2 * math.pi, half), (True, False)), "analytic", spec)


def make_torus_family(a: float, b: float) -> SurfacePatch:
    spec = TorusAB(float(a), float(b))
    a, b = spec.a, spec.b

    def evaluator(u1, u2):
        t, s = np.broadcast_arrays(u1 / a, u2 / b)
        ct, st, cs, ss = np.cos(t), np.sin(t), np.cos(s), np.sin(s)
        zero = np.zeros_like(ct)
        return Jet2(
            _stack(a * ct, a * st, b * cs, b * ss),
            _stack(-st, ct, zero, zero),
            _stack(zero, zero, -ss, cs),
            _stack(-ct / a, -st / a, zero, zero),
            _stack(zero, zero, zero, zero),
            _stack(zero, zero, -cs / b, -ss / b),
        )

    dom = Domain((0.0, 0.0), (2 * math.pi * a, 2 * math.pi * b), (True, True))
    return SurfacePatch(evaluator, dom, "analytic", spec)


def normalize_jet(y: Jet2) -> Jet2:
    """2-jet of ``y / |y|`` from the 2-jet of ``y``."""

    def dot(p, q):
        return np.sum(p * q, axis=-1, keepdims=True)

    n = np.sqrt(dot(y.x, y.x))
    n1 = dot(y.x, y.x_u1) / n
    n2 = dot(y.x, y.x_u2) / n
    n11 = (dot(y.x_u1, y.x_u1) + dot(y.x, y.x_u1u1)) / n - n1 * n1 / n
    n12 = (dot(y.x_u1, y.x_u2) + dot(y.x, y.x_u1u2)) / n - n1 * n2 / n
    n22 = (dot(y.x_u2, y.x_u2) + dot(y.x, y.x_u2u2)) / n - n2 * n2 / n

    def second(yij, yi, yj, ni, nj, nij):
        return yij / n - (yi * nj + yj * ni) / n**2 - y.x * nij / n**2 + 2 * y.x * ni * nj / n**3

    return Jet2(
        y.x / n,
        y.x_u1 / n - y.x * n1 / n**2,
        y.x_u2 / n - y.x * n2 / n**2,
        second(y.x_u1u1, y.x_u1, y.x_u1, n1, n1, n11),
        second(y.x_u1u2, y.x_u1, y.x_u2, n1, n2, n12),
        second(y.x_u2u2, y.x_u2, y.x_u2, n2, n2, n22),
    )


def make_perturbed_torus(a: float, b: float, eps: float, mode: int, tol_rank: float = TOL_RANK) -> SurfacePatch:
    """Torus with first radius ``a (1 + eps cos(mode u1 / a))``, renormalized onto S^3."""
    spec = PerturbedTorus(float(a), float(b), float(eps), int(mode))
    a, b, eps, m = spec.a, spec.b, spec.eps, spec.mode

    def evaluator(u1, u2):
        t, s = np.broadcast_arrays(u1 / a, u2 / b)
        ct, st, cs, ss = np.cos(t), np.sin(t), np.cos(s), np.sin(s)
        amp = a * (1.0 + eps * np.cos(m * t))
        amp1 = -eps * m * np.sin(m * t)
        amp11 = -eps * m * m / a * np.cos(m * t)
        zero = np.zeros_like(ct)
        y = Jet2(
            _stack(amp * ct, amp * st, b * cs, b * ss),
            _stack(amp1 * ct - amp / a * st, amp1 * st + amp / a * ct, zero, zero),
            _stack(zero, zero, -ss, cs),
            _stack(
                amp11 * ct - 2 * amp1 / a * st - amp / a**2 * ct,
                amp11 * st + 2 * amp1 / a * ct - amp / a**2 * st,
                zero,
                zero,
            ),
            _stack(zero, zero, zero, zero),
            _stack(zero, zero, -cs / b, -ss / b),
        )
        return normalize_jet(y)

    dom = Domain((0.0, 0.0), (2 * math.pi * a, 2 * math.pi * b), (True, True))
    patch = SurfacePatch(evaluator, dom, "analytic", spec)
    g1, g2 = np.meshgrid(
        np.linspace(0, dom.hi[0], 64, endpoint=False), np.linspace(0, dom.hi[1], 16, endpoint=False), indexing="ij"
    )
    if np.any(tangent_area(patch.jet(g1, g2)) < tol_rank):
        raise NotImmersed("modulation collapses a tangent")
    return patch


def apply_isometry(g, patch: SurfacePatch) -> SurfacePatch:
    """Compose the patch with an orientation-preserving isometry of S^3."""
    g = check_isometry(g)
    inner = patch.evaluator

    def evaluator(u1, u2):
        return inner(u1, u2).transform(g)

    position_fn = None
    if patch.position_fn is not None:
        inner_pos = patch.position_fn
        position_fn = lambda u1, u2: inner_pos(u1, u2) @ g.T  # noqa: E731
    spec = Transformed(g, patch.spec) if patch.spec is not None else None
    return SurfacePatch(evaluator, patch.domain, patch.jet_kind, spec, position_fn)


def finite_difference_patch(patch: SurfacePatch, h_fd: float = H_FD) -> SurfacePatch:
    """Same surface, but the jet is rebuilt from positions by central differences."""
    pos = patch.position

    def evaluator(u1, u2):
        u1, u2 = np.broadcast_arrays(u1, u2)
        x = pos(u1, u2)
        xp0, xm0 = pos(u1 + h_fd, u2), pos(u1 - h_fd, u2)
        x0p, x0m = pos(u1, u2 + h_fd), pos(u1, u2 - h_fd)
        xpp, xpm = pos(u1 + h_fd, u2 + h_fd), pos(u1 + h_fd, u2 - h_fd)
        xmp, xmm = pos(u1 - h_fd, u2 + h_fd), pos(u1 - h_fd, u2 - h_fd)
        return Jet2(
            x,
            (xp0 - xm0) / (2 * h_fd),
            (x0p - x0m) / (2 * h_fd),
            (xp0 - 2 * x + xm0) / h_fd**2,
            (xpp - xpm - xmp + xmm) / (4 * h_fd**2),
            (x0p - 2 * x + x0m) / h_fd**2,
        )

    return SurfacePatch(evaluator, patch.domain, "finite-difference", patch.spec, pos)


def swap_chart(patch: SurfacePatch) -> SurfacePatch:
    """Exchange the chart coordinates; this reverses the induced orientation."""
    inner = patch.evaluator

    def evaluator(u1, u2):
        j = inner(u2, u1)
        return Jet2(j.x, j.x_u2, j.x_u1, j.x_u2u2, j.x_u1u2, j.x_u1u1)

    d = patch.domain
    dom = Domain(d.lo[::-1], d.hi[::-1], d.periodic[::-1])
    position_fn = None
    if patch.position_fn is not None:
        inner_pos = patch.position_fn
        position_fn = lambda u1, u2: inner_pos(u2, u1)  # noqa: E731
    return SurfacePatch(evaluator, dom, patch.jet_kind, None, position_fn)


def make_patch(spec: FamilySpec) -> SurfacePatch:
    if isinstance(spec, SphereCap):
        return make_sphere_family(spec.k)
    if isinstance(spec, TorusAB):
        return make_torus_family(spec.a, spec.b)
    if isinstance(spec, PerturbedTorus):
        return make_perturbed_torus(spec.a, spec.b, spec.eps, spec.mode)
    if isinstance(spec, Transformed):
        return apply_isometry(spec.g, make_patch(spec.inner))
    raise UnsupportedSpec(f"no generator for {spec!r}")


def implicit_residual(spec: FamilySpec, x) -> np.ndarray:
    """Largest violation of the family's defining equations at ``x``.

    For a Transformed spec the point is first pulled back by ``g^T``.
    """
    x = np.asarray(x, dtype=float)
    while isinstance(spec, Transformed):
        x = x @ spec.g
        spec = spec.inner
    if isinstance(spec, SphereCap):
        r1 = np.abs(x[..., 3] - spec.k)
        r2 = np.abs(np.sum(x[..., :3] ** 2, axis=-1) - (1.0 - spec.k**2))
        return np.maximum(r1, r2)
    if isinstance(spec, TorusAB):
        r1 = np.abs(x[..., 0] ** 2 + x[..., 1] ** 2 - spec.a**2)
        r2 = np.abs(x[..., 2] ** 2 + x[..., 3] ** 2 - spec.b**2)
        return np.maximum(r1, r2)
    raise UnsupportedSpec(f"no implicit equations for {type(spec).__name__}")
