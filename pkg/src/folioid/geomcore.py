"""Single-chart manifolds, smooth maps, vector fields and Cartan calculus.

Everything works in one global chart: a box in R^n whose coordinates may
individually be periodic.  Derivatives fall back to central finite
differences when no analytic Jacobian is supplied, and flows use classical
fixed-step RK4 with a per-step box guard.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import FlowEscapedBox, NumericalBlowup
from .params import DEFAULT_PARAMS

Point = np.ndarray


@dataclass(frozen=True)
class ChartManifold:
    """A box chart: dimension, per-coordinate bounds, optional periods.

    ``box[i] = (lo, hi)`` with ``lo < hi`` (infinities allowed); a non-None
    ``periodic[i]`` is the period length of coordinate i.
    """

    dim: int
    box: tuple = None
    periodic: tuple = None

    def __post_init__(self):
        box = self.box
        if box is None:
            box = tuple((-math.inf, math.inf) for _ in range(self.dim))
        box = tuple((float(lo), float(hi)) for lo, hi in box)
        periodic = self.periodic
        if periodic is None:
            periodic = tuple(None for _ in range(self.dim))
        periodic = tuple(None if p is None else float(p) for p in periodic)
        if len(box) != self.dim or len(periodic) != self.dim:
            raise ValueError("box and periodic flags must match dim")
        for lo, hi in box:
            if not lo < hi:
                raise ValueError(f"empty interval ({lo}, {hi}) in box")
        object.__setattr__(self, "box", box)
        object.__setattr__(self, "periodic", periodic)

    def wrap(self, x: Point) -> Point:
        """Wrap periodic coordinates into [lo, lo + period)."""
        x = np.array(x, dtype=float)
        for i, period in enumerate(self.periodic):
            if period is not None:
                lo = self.box[i][0] if math.isfinite(self.box[i][0]) else 0.0
                x[i] = lo + (x[i] - lo) % period
        return x

    def contains(self, x: Point, tol: float = 0.0) -> bool:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            return False
        for i, (lo, hi) in enumerate(self.box):
            if self.periodic[i] is not None:
                continue
            if x[i] < lo - tol or x[i] > hi + tol:
                return False
        return True


def euclidean(dim: int) -> ChartManifold:
    return ChartManifold(dim)


class SmoothMap:
    """A map between chart manifolds with optional analytic Jacobian.

    When ``jac`` is absent the Jacobian is the central finite difference
    with step ``h_fd``; when present it is trusted but can be audited
    against differences with :meth:`jacobian_fd`.
    """

    def __init__(
        self,
        domain: ChartManifold,
        codomain: ChartManifold,
        fn: Callable[[Point], Point],
        jac: Optional[Callable[[Point], np.ndarray]] = None,
        h_fd: float = DEFAULT_PARAMS.h_fd,
        name: str = "",
    ):
        self.domain = domain
        self.codomain = codomain
        self.fn = fn
        self.jac = jac
        self.h_fd = float(h_fd)
        self.name = name

    def __call__(self, x: Point) -> Point:
        y = np.asarray(self.fn(np.asarray(x, dtype=float)), dtype=float)
        if not np.all(np.isfinite(y)):
            raise NumericalBlowup(f"map {self.name or '<anon>'} returned non-finite values at {x}")
        return y

    def jacobian(self, x: Point) -> np.ndarray:
        if self.jac is not None:
            j = np.asarray(self.jac(np.asarray(x, dtype=float)), dtype=float)
            if j.shape != (self.codomain.dim, self.domain.dim):
                raise ValueError(
                    f"jacobian of {self.name or '<anon>'} has shape {j.shape}, "
                    f"expected {(self.codomain.dim, self.domain.dim)}"
                )
            return j
        return self.jacobian_fd(x)

    def jacobian_fd(self, x: Point) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        h = self.h_fd
        cols = []
        for i in range(self.domain.dim):
            e = np.zeros(self.domain.dim)
            e[i] = h
            cols.append((self(x + e) - self(x - e)) / (2.0 * h))
        return np.column_stack(cols) if cols else np.zeros((self.codomain.dim, 0))

def identity_map(m: ChartManifold) -> SmoothMap:
    return SmoothMap(m, m, lambda x: np.array(x, dtype=float),
                     jac=lambda x: np.eye(m.dim), name="id")


class VectorField:
    """A tangent-vector assignment on a chart manifold."""

    def __init__(self, base: ChartManifold, fn: Callable[[Point], Point],
                 h_fd: float = DEFAULT_PARAMS.h_fd, name: str = ""):
        self.base = base
        self.fn = fn
        self.h_fd = float(h_fd)
        self.name = name

    def __call__(self, x: Point) -> Point:
        v = np.asarray(self.fn(np.asarray(x, dtype=float)), dtype=float)
        if not np.all(np.isfinite(v)):
            raise NumericalBlowup(f"field {self.name or '<anon>'} non-finite at {x}")
        return v

    def jacobian(self, x: Point) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        h = self.h_fd
        cols = []
        for i in range(self.base.dim):
            e = np.zeros(self.base.dim)
            e[i] = h
            cols.append((self(x + e) - self(x - e)) / (2.0 * h))
        return np.column_stack(cols)


class OneForm:
    """A covector assignment on a chart manifold."""

    def __init__(self, base: ChartManifold, fn: Callable[[Point], Point],
                 h_fd: float = DEFAULT_PARAMS.h_fd, name: str = ""):
        self.base = base
        self.fn = fn
        self.h_fd = float(h_fd)
        self.name = name

    def __call__(self, x: Point) -> Point:
        a = np.asarray(self.fn(np.asarray(x, dtype=float)), dtype=float)
        if not np.all(np.isfinite(a)):
            raise NumericalBlowup(f"one-form {self.name or '<anon>'} non-finite at {x}")
        return a

    def jacobian(self, x: Point) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        h = self.h_fd
        cols = []
        for i in range(self.base.dim):
            e = np.zeros(self.base.dim)
            e[i] = h
            cols.append((self(x + e) - self(x - e)) / (2.0 * h))
        return np.column_stack(cols)


def constant_field(base: ChartManifold, vec: Sequence[float], name: str = "") -> VectorField:
    v = np.asarray(vec, dtype=float).copy()
    return VectorField(base, lambda x: v, name=name or f"const{tuple(v)}")


def constant_form(base: ChartManifold, cov: Sequence[float], name: str = "") -> OneForm:
    a = np.asarray(cov, dtype=float).copy()
    return OneForm(base, lambda x: a, name=name)


def linear_field(base: ChartManifold, mat, name: str = "") -> VectorField:
    a = np.asarray(mat, dtype=float).copy()
    return VectorField(base, lambda x: a @ x, name=name)


def flow(x_field: VectorField, x0: Point, t_final: float,
         steps: Optional[int] = None,
         steps_per_unit: int = DEFAULT_PARAMS.rk4_steps_per_unit) -> Point:
    """Endpoint of the RK4 integral curve of ``x_field`` from ``x0``.

    Periodic coordinates are wrapped after every step; leaving the box on a
    non-periodic coordinate raises :class:`FlowEscapedBox` carrying the last
    valid state.
    """
    base = x_field.base
    x = base.wrap(np.asarray(x0, dtype=float))
    if not base.contains(x):
        raise FlowEscapedBox("initial point outside box", last_state=x, time=0.0)
    if t_final == 0.0:
        return x
    if steps is None:
        steps = max(1, int(math.ceil(abs(t_final) * steps_per_unit)))
    if steps <= 0:
        raise ValueError("steps must be positive")
    h = t_final / steps
    t = 0.0
    for _ in range(steps):
        k1 = x_field(x)
        k2 = x_field(x + 0.5 * h * k1)
        k3 = x_field(x + 0.5 * h * k2)
        k4 = x_field(x + h * k3)
        x_next = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(x_next)):
            raise NumericalBlowup(f"flow of {x_field.name or '<anon>'} blew up at t={t}")
        x_next = base.wrap(x_next)
        if not base.contains(x_next):
            raise FlowEscapedBox(
                f"flow of {x_field.name or '<anon>'} left the box at t={t + h}",
                last_state=x, time=t,
            )
        x = x_next
        t += h
    return x


def pushforward(f: SmoothMap, x: Point, v: Point) -> Point:
    """Jacobian-vector product: the differential of ``f`` at x applied to v."""
    return f.jacobian(x) @ np.asarray(v, dtype=float)


def lie_bracket(x_field: VectorField, y_field: VectorField, x: Point) -> Point:
    """[X, Y](x) = DY(x) X(x) - DX(x) Y(x) with finite-difference Jacobians."""
    x = np.asarray(x, dtype=float)
    out = y_field.jacobian(x) @ x_field(x) - x_field.jacobian(x) @ y_field(x)
    if not np.all(np.isfinite(out)):
        raise NumericalBlowup(f"bracket non-finite at {x}")
    return out


def lie_derivative_oneform(x_field: VectorField, beta: OneForm, x: Point) -> Point:
    """Lie derivative of a one-form along a field, componentwise.

    Against constant basis extensions e_i the Cartan formula
    (L_X beta)(e_i) = X(beta(e_i)) - beta([X, e_i]) collapses to
    J_beta X + (J_X)^T beta, which is what gets evaluated.
    """
    x = np.asarray(x, dtype=float)
    out = beta.jacobian(x) @ x_field(x) + x_field.jacobian(x).T @ beta(x)
    if not np.all(np.isfinite(out)):
        raise NumericalBlowup(f"Lie derivative non-finite at {x}")
    return out


def d_oneform(alpha: OneForm, x: Point, v: Point, w: Point) -> float:
    """Exterior derivative of a one-form on a pair of vectors.

    Uses constant extensions of v and w, whose bracket vanishes, so
    d(alpha)(v, w) = v(alpha(w)) - w(alpha(v)).
    """
    x = np.asarray(x, dtype=float)
    j = alpha.jacobian(x)
    v = np.asarray(v, dtype=float)
    w = np.asarray(w, dtype=float)
    out = float((j @ v) @ w - (j @ w) @ v)
    if not math.isfinite(out):
        raise NumericalBlowup(f"d(one-form) non-finite at {x}")
    return out


def interior_product_d(alpha: OneForm, y_field: VectorField, x: Point) -> Point:
    """The covector i_Y d(alpha) at x."""
    x = np.asarray(x, dtype=float)
    j = alpha.jacobian(x)
    y = y_field(x)
    return j @ y - j.T @ y
