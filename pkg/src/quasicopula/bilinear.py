"""Continuous functions on the unit square and the bridge to the discrete layer.

A :class:`ContinuousQC` carries a vectorised float evaluator and, when the
function is rational at rational points, an exact evaluator.  The exact path
is what keeps decompositions of restricted functions exact downstream.

Axiom checks on continuous functions are necessarily done on finite grids in
floating point with an absolute tolerance (default ``1e-9``).
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .errors import RoundingBrokeAxioms
from .grid import GridFunction, Mesh, grid_from_values, validate

__all__ = [
    "ContinuousQC",
    "GridCheck",
    "TOL",
    "DENOMINATOR_BOUND",
    "linear_combination",
    "extend",
    "restrict",
    "sup_distance_on_grid",
    "grid_points",
    "check_quasi_copula",
    "check_values",
    "grid_cell_masses",
]

TOL = 1e-9
DENOMINATOR_BOUND = 2**32

FloatEval = Callable[[np.ndarray, np.ndarray], np.ndarray]
ExactEval = Callable[[Fraction, Fraction], Fraction]


@dataclass(frozen=True, eq=False)
class ContinuousQC:
    """A function ``[0,1]^2 -> R`` with evaluation metadata.

    ``func`` must broadcast over numpy arrays and be pure.  ``exact`` is
    optional and takes scalar Fractions.  ``natural_mesh(level)`` returns
    breakpoints the function is piecewise bilinear on (used by aligned mesh
    families); ``None`` when there is no such structure.
    """

    name: str
    func: FloatEval = field(repr=False)
    exact: ExactEval | None = field(default=None, repr=False)
    lineage: tuple[str, ...] = ()
    quasi_copula: bool = False
    natural_mesh: Callable[[int], Mesh] | None = field(default=None, repr=False)

    def __call__(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        out = self.func(x, y)
        if out.ndim == 0:
            return float(out)
        return out

    @property
    def is_exact(self) -> bool:
        return self.exact is not None

    def exact_value(self, x, y) -> Fraction:
        if self.exact is None:
            raise TypeError(f"{self.name} has no exact evaluator")
        return self.exact(Fraction(x), Fraction(y))

    def with_name(self, name: str, **changes) -> "ContinuousQC":
        kw = dict(
            name=name,
            func=self.func,
            exact=self.exact,
            lineage=self.lineage,
            quasi_copula=self.quasi_copula,
            natural_mesh=self.natural_mesh,
        )
        kw.update(changes)
        return ContinuousQC(**kw)


def linear_combination(
    terms: Sequence[tuple[Fraction, ContinuousQC]],
    name: str,
    quasi_copula: bool = False,
) -> ContinuousQC:
    """Pointwise ``sum(c * F for c, F in terms)``; exact when every term is."""
    terms = tuple((Fraction(c), F) for c, F in terms)
    fcoefs = tuple(float(c) for c, _ in terms)

    def func(x, y):
        out = np.zeros(np.broadcast(x, y).shape)
        for c, (_, F) in zip(fcoefs, terms):
            if c != 0.0:
                out = out + c * F.func(x, y)
        return out

    exact = None
    if all(F.exact is not None for _, F in terms):

        def exact(x, y):
            return sum((c * F.exact(x, y) for c, F in terms if c != 0), Fraction(0))

    lineage = tuple(f"{c}*{F.name}" for c, F in terms)
    return ContinuousQC(name, func, exact, lineage, quasi_copula)


def _locate(points: Sequence[float], x: np.ndarray) -> np.ndarray:
    # boundary points go to the cell on their lower-left
    idx = np.searchsorted(points, x, side="left") - 1
    return np.clip(idx, 0, len(points) - 2)


def extend(F: GridFunction, name: str | None = None) -> ContinuousQC:
    """Piecewise-bilinear extension of a grid function to the unit square."""
    mesh = F.mesh
    fx = np.array([float(x) for x in mesh.xs])
    fy = np.array([float(y) for y in mesh.ys])
    fv = np.array([[float(v) for v in row] for row in F.values])
    xs, ys, vals = mesh.xs, mesh.ys, F.values

    def func(x, y):
        x = np.clip(x, 0.0, 1.0)
        y = np.clip(y, 0.0, 1.0)
        i = _locate(fx, x)
        j = _locate(fy, y)
        tx = (x - fx[i]) / (fx[i + 1] - fx[i])
        ty = (y - fy[j]) / (fy[j + 1] - fy[j])
        return (
            (1 - tx) * (1 - ty) * fv[j, i]
            + tx * (1 - ty) * fv[j, i + 1]
            + (1 - tx) * ty * fv[j + 1, i]
            + tx * ty * fv[j + 1, i + 1]
        )

    def exact(x: Fraction, y: Fraction) -> Fraction:
        x = min(max(x, Fraction(0)), Fraction(1))
        y = min(max(y, Fraction(0)), Fraction(1))
        i = min(max(bisect.bisect_left(xs, x) - 1, 0), len(xs) - 2)
        j = min(max(bisect.bisect_left(ys, y) - 1, 0), len(ys) - 2)
        tx = (x - xs[i]) / (xs[i + 1] - xs[i])
        ty = (y - ys[j]) / (ys[j + 1] - ys[j])
        return (
            (1 - tx) * (1 - ty) * vals[j, i]
            + tx * (1 - ty) * vals[j, i + 1]
            + (1 - tx) * ty * vals[j + 1, i]
            + tx * ty * vals[j + 1, i + 1]
        )

    qc = validate(F).is_quasi_copula
    return ContinuousQC(
        name=name or f"extend({mesh.nx}x{mesh.ny})",
        func=func,
        exact=exact,
        lineage=("extend",),
        quasi_copula=qc,
        natural_mesh=lambda level: mesh,
    )


def restrict(Q: ContinuousQC, mesh: Mesh, denominator_bound: int = DENOMINATOR_BOUND) -> GridFunction:
    """Sample ``Q`` on the nodes of ``mesh``.

    Exact oracles are sampled exactly.  Float-only oracles are rounded to the
    nearest rational with denominator at most ``denominator_bound`` and the
    result is re-validated when ``Q`` claims to be a quasi-copula.
    """
    if Q.exact is not None:
        ex = Q.exact
        return grid_from_values(mesh, [[ex(x, y) for x in mesh.xs] for y in mesh.ys])
    X, Y = np.meshgrid(
        np.array([float(x) for x in mesh.xs]), np.array([float(y) for y in mesh.ys])
    )
    raw = Q(X, Y)
    G = grid_from_values(
        mesh, [[Fraction(float(v)).limit_denominator(denominator_bound) for v in row] for row in raw]
    )
    if Q.quasi_copula and not validate(G).is_quasi_copula:
        raise RoundingBrokeAxioms(
            f"rounding {Q.name} to denominators <= {denominator_bound} broke the quasi-copula axioms"
        )
    return G


def grid_points(k: int) -> np.ndarray:
    """``k + 1`` equidistant points of ``[0, 1]``."""
    return np.linspace(0.0, 1.0, k + 1)


def _sample(F: ContinuousQC, k: int) -> tuple[np.ndarray, np.ndarray]:
    pts = grid_points(k)
    X, Y = np.meshgrid(pts, pts)
    return pts, np.asarray(F(X, Y), dtype=float)


def sup_distance_on_grid(P: ContinuousQC, R: ContinuousQC, k: int = 100) -> float:
    """``max |P - R|`` over the ``(k+1) x (k+1)`` equidistant grid."""
    if k < 2:
        raise ValueError("grid resolution must be at least 2")
    _, p = _sample(P, k)
    _, r = _sample(R, k)
    return float(np.max(np.abs(p - r)))


@dataclass(frozen=True)
class GridCheck:
    """Worst-case defects of a sampled function (all <= tol means pass)."""

    grounded: float
    marginals: float
    increasing: float
    lipschitz: float
    tol: float

    @property
    def ok(self) -> bool:
        return max(self.grounded, self.marginals, self.increasing, self.lipschitz) <= self.tol

    @property
    def worst(self) -> float:
        return max(self.grounded, self.marginals, self.increasing, self.lipschitz)


def check_values(vals: np.ndarray, pts: np.ndarray, tol: float = TOL) -> GridCheck:
    """Quasi-copula axioms on samples ``vals[j, i] = F(pts[i], pts[j])``.

    Monotonicity and the Lipschitz bound are checked between adjacent grid
    points along both axes.
    """
    grounded = max(np.max(np.abs(vals[0, :])), np.max(np.abs(vals[:, 0])))
    marginals = max(np.max(np.abs(vals[-1, :] - pts)), np.max(np.abs(vals[:, -1] - pts)))
    dx = np.diff(vals, axis=1)
    dy = np.diff(vals, axis=0)
    gap_x = np.diff(pts)[None, :]
    gap_y = np.diff(pts)[:, None]
    increasing = max(0.0, -float(dx.min()), -float(dy.min()))
    lipschitz = max(0.0, float((dx - gap_x).max()), float((dy - gap_y).max()))
    return GridCheck(float(grounded), float(marginals), increasing, lipschitz, tol)


def check_quasi_copula(F: ContinuousQC, k: int = 100, tol: float = TOL) -> GridCheck:
    pts, vals = _sample(F, k)
    return check_values(vals, pts, tol)


def grid_cell_masses(F: ContinuousQC, k: int = 100) -> np.ndarray:
    """Volumes of the ``k x k`` cells of the equidistant grid, indexed ``[j, i]``."""
    _, v = _sample(F, k)
    return v[1:, 1:] - v[1:, :-1] - v[:-1, 1:] + v[:-1, :-1]
