"""Meshes, exact-rational grid functions and the discrete (quasi-)copula axioms.

Orientation convention used throughout the package: ``values[j][i]`` is the
value at ``(xs[i], ys[j])``, so row ``j = 0`` is the bottom edge ``y = 0``.
Matrices printed top-to-bottom must be flipped (``rows[::-1]``) on input.

Everything in this module is exact; values are :class:`fractions.Fraction`
stored in read-only numpy object arrays.
"""

from __future__ import annotations

import numbers
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    EndpointsNotUnit,
    IndexOutOfRange,
    MeshMismatch,
    NotSorted,
    TooFew,
)

Rational = Fraction

__all__ = [
    "Mesh",
    "GridFunction",
    "StripSums",
    "ValidationReport",
    "Violation",
    "mesh_new",
    "equidistant_mesh",
    "grid_from_values",
    "grid_from_mass",
    "rect_volume",
    "validate",
    "strip_sums",
    "to_fraction",
]


def to_fraction(value) -> Fraction:
    """Coerce ints, Fractions and rational strings. Floats are refused."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, numbers.Rational):
        return Fraction(int(value.numerator), int(value.denominator))
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


def _object_array(rows) -> np.ndarray:
    rows = [[to_fraction(v) for v in row] for row in rows]
    arr = np.empty((len(rows), len(rows[0]) if rows else 0), dtype=object)
    for j, row in enumerate(rows):
        if len(row) != arr.shape[1]:
            raise DimensionMismatch("ragged matrix")
        for i, v in enumerate(row):
            arr[j, i] = v
    return arr


@dataclass(frozen=True)
class Mesh:
    """Breakpoints ``0 = xs[0] < ... < xs[-1] = 1`` and likewise for ``ys``."""

    xs: tuple[Fraction, ...]
    ys: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        for name, pts in (("x", self.xs), ("y", self.ys)):
            if len(pts) < 2:
                raise TooFew(f"{name}-axis needs at least 2 breakpoints")
            if pts[0] != 0 or pts[-1] != 1:
                raise EndpointsNotUnit(f"{name}-breakpoints must run from 0 to 1")
            for a, b in zip(pts, pts[1:]):
                if not a < b:
                    raise NotSorted(f"{name}-breakpoints not strictly increasing at {a}, {b}")

    @property
    def nx(self) -> int:
        """Number of cells along x."""
        return len(self.xs) - 1

    @property
    def ny(self) -> int:
        return len(self.ys) - 1

    @property
    def widths(self) -> tuple[Fraction, ...]:
        return tuple(b - a for a, b in zip(self.xs, self.xs[1:]))

    @property
    def heights(self) -> tuple[Fraction, ...]:
        return tuple(b - a for a, b in zip(self.ys, self.ys[1:]))

    @property
    def max_gap(self) -> Fraction:
        return max(max(self.widths), max(self.heights))

    def cell_areas(self) -> np.ndarray:
        """``lambda^2(R_ij)`` as an object array indexed ``[j, i]``."""
        out = np.empty((self.ny, self.nx), dtype=object)
        for j, h in enumerate(self.heights):
            for i, w in enumerate(self.widths):
                out[j, i] = w * h
        return _frozen(out)

    def refines(self, other: "Mesh") -> bool:
        return set(other.xs) <= set(self.xs) and set(other.ys) <= set(self.ys)

    def union(self, other: "Mesh") -> "Mesh":
        """Common refinement."""
        return Mesh(
            tuple(sorted(set(self.xs) | set(other.xs))),
            tuple(sorted(set(self.ys) | set(other.ys))),
        )


def mesh_new(xs: Iterable, ys: Iterable) -> Mesh:
    return Mesh(tuple(to_fraction(x) for x in xs), tuple(to_fraction(y) for y in ys))


def equidistant_mesh(n: int, m: int | None = None) -> Mesh:
    """Mesh with ``n`` equal x-subintervals and ``m`` (default ``n``) y-subintervals."""
    m = n if m is None else m
    return Mesh(
        tuple(Fraction(i, n) for i in range(n + 1)),
        tuple(Fraction(j, m) for j in range(m + 1)),
    )


@dataclass(frozen=True, eq=False)
class GridFunction:
    """A function on the nodes of a mesh, ``values[j, i] = F(xs[i], ys[j])``."""

    mesh: Mesh
    values: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        if self.values.shape != (len(self.mesh.ys), len(self.mesh.xs)):
            raise DimensionMismatch(
                f"values have shape {self.values.shape}, mesh needs "
                f"{(len(self.mesh.ys), len(self.mesh.xs))}"
            )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GridFunction):
            return NotImplemented
        return self.mesh == other.mesh and bool(np.all(self.values == other.values))

    __hash__ = None  # type: ignore[assignment]

    def __call__(self, i: int, j: int) -> Fraction:
        return self.values[j, i]

    def at(self, x, y) -> Fraction:
        """Value at the node with coordinates ``(x, y)``."""
        x, y = to_fraction(x), to_fraction(y)
        try:
            return self.values[self.mesh.ys.index(y), self.mesh.xs.index(x)]
        except ValueError:
            raise IndexOutOfRange(f"({x}, {y}) is not a mesh node") from None

    def mass(self) -> np.ndarray:
        """Cell volumes ``V_F(R_ij)`` indexed ``[j, i]``."""
        v = self.values
        return _frozen(v[1:, 1:] - v[1:, :-1] - v[:-1, 1:] + v[:-1, :-1])

    def rows(self) -> list[list[Fraction]]:
        return [list(r) for r in self.values]

    def _check_mesh(self, other: "GridFunction") -> None:
        if self.mesh != other.mesh:
            raise MeshMismatch("grid functions live on different meshes")

    def __add__(self, other: "GridFunction") -> "GridFunction":
        self._check_mesh(other)
        return GridFunction(self.mesh, _frozen(self.values + other.values))

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        self._check_mesh(other)
        return GridFunction(self.mesh, _frozen(self.values - other.values))

    def scale(self, c) -> "GridFunction":
        c = to_fraction(c)
        return GridFunction(self.mesh, _frozen(self.values * c))

    __mul__ = scale
    __rmul__ = scale

    def __neg__(self) -> "GridFunction":
        return self.scale(-1)

    def total(self) -> Fraction:
        v = self.values
        return v[-1, -1] - v[-1, 0] - v[0, -1] + v[0, 0]

    def leq(self, other: "GridFunction") -> bool:
        """Pointwise ``self <= other`` on all nodes."""
        self._check_mesh(other)
        return bool(np.all(self.values <= other.values))


def grid_from_values(mesh: Mesh, values: Sequence[Sequence]) -> GridFunction:
    arr = _object_array(values)
    if arr.shape != (len(mesh.ys), len(mesh.xs)):
        raise DimensionMismatch(
            f"got {arr.shape} values for a mesh with {len(mesh.ys)}x{len(mesh.xs)} nodes"
        )
    return GridFunction(mesh, _frozen(arr))


def grid_from_mass(mesh: Mesh, cells: Sequence[Sequence]) -> GridFunction:
    """The grounded grid function whose cell volumes are ``cells``."""
    arr = _object_array(cells)
    if arr.shape != (mesh.ny, mesh.nx):
        raise DimensionMismatch(f"got {arr.shape} cells for a {mesh.ny}x{mesh.nx} mesh")
    vals = np.empty((mesh.ny + 1, mesh.nx + 1), dtype=object)
    vals[0, :] = Fraction(0)
    vals[:, 0] = Fraction(0)
    acc = np.cumsum(np.cumsum(arr, axis=0), axis=1)
    for j in range(mesh.ny):
        for i in range(mesh.nx):
            vals[j + 1, i + 1] = to_fraction(acc[j, i])
    return GridFunction(mesh, _frozen(vals))


def rect_volume(F: GridFunction, i0: int, i1: int, j0: int, j1: int) -> Fraction:
    """Inclusion-exclusion volume of ``[xs[i0], xs[i1]] x [ys[j0], ys[j1]]``."""
    nx, ny = len(F.mesh.xs), len(F.mesh.ys)
    if not (0 <= i0 < i1 < nx and 0 <= j0 < j1 < ny):
        raise IndexOutOfRange(f"bad rectangle indices {(i0, i1, j0, j1)}")
    v = F.values
    return v[j1, i1] - v[j1, i0] - v[j0, i1] + v[j0, i0]


@dataclass(frozen=True)
class Violation:
    prop: str
    location: tuple
    witness: tuple


@dataclass(frozen=True)
class ValidationReport:
    is_grounded: bool
    has_uniform_marginals: bool
    is_increasing: bool
    is_lipschitz: bool
    is_two_increasing: bool
    violations: tuple[Violation, ...] = ()

    @property
    def is_quasi_copula(self) -> bool:
        return self.is_grounded and self.has_uniform_marginals and self.is_increasing and self.is_lipschitz

    @property
    def is_copula(self) -> bool:
        return self.is_grounded and self.has_uniform_marginals and self.is_two_increasing

    def as_dict(self) -> dict:
        return {
            "is_grounded": self.is_grounded,
            "has_uniform_marginals": self.has_uniform_marginals,
            "is_increasing": self.is_increasing,
            "is_lipschitz": self.is_lipschitz,
            "is_two_increasing": self.is_two_increasing,
            "is_quasi_copula": self.is_quasi_copula,
            "is_copula": self.is_copula,
            "violations": [
                {
                    "property": v.prop,
                    "location": [str(c) for c in v.location],
                    "witness": [str(c) for c in v.witness],
                }
                for v in self.violations
            ],
        }


def validate(F: GridFunction, max_violations: int = 50) -> ValidationReport:
    """Check every discrete axiom exactly.

    Lipschitz is checked on adjacent nodes only; chaining increments along
    grid lines makes that equivalent to the all-pairs condition.
    """
    xs, ys = F.mesh.xs, F.mesh.ys
    v = F.values
    found: list[Violation] = []

    def note(prop, loc, wit):
        if len(found) < max_violations:
            found.append(Violation(prop, loc, wit))

    grounded = True
    for i, x in enumerate(xs):
        if v[0, i] != 0:
            grounded = False
            note("grounded", (x, ys[0]), (v[0, i],))
    for j, y in enumerate(ys):
        if v[j, 0] != 0:
            grounded = False
            note("grounded", (xs[0], y), (v[j, 0],))

    marginals = True
    for i, x in enumerate(xs):
        if v[-1, i] != x:
            marginals = False
            note("uniform_marginals", (x, ys[-1]), (v[-1, i], x))
    for j, y in enumerate(ys):
        if v[j, -1] != y:
            marginals = False
            note("uniform_marginals", (xs[-1], y), (v[j, -1], y))

    increasing = lipschitz = True
    dx = v[:, 1:] - v[:, :-1]
    dy = v[1:, :] - v[:-1, :]
    widths, heights = F.mesh.widths, F.mesh.heights
    for j in range(dx.shape[0]):
        for i in range(dx.shape[1]):
            d = dx[j, i]
            if d < 0:
                increasing = False
                note("increasing", (xs[i], xs[i + 1], ys[j]), (d,))
            if abs(d) > widths[i]:
                lipschitz = False
                note("lipschitz", (xs[i], xs[i + 1], ys[j]), (d, widths[i]))
    for j in range(dy.shape[0]):
        for i in range(dy.shape[1]):
            d = dy[j, i]
            if d < 0:
                increasing = False
                note("increasing", (xs[i], ys[j], ys[j + 1]), (d,))
            if abs(d) > heights[j]:
                lipschitz = False
                note("lipschitz", (xs[i], ys[j], ys[j + 1]), (d, heights[j]))

    two_inc = True
    m = F.mass()
    for j in range(m.shape[0]):
        for i in range(m.shape[1]):
            if m[j, i] < 0:
                two_inc = False
                note("two_increasing", (xs[i], xs[i + 1], ys[j], ys[j + 1]), (m[j, i],))

    return ValidationReport(grounded, marginals, increasing, lipschitz, two_inc, tuple(found))


@dataclass(frozen=True)
class StripSums:
    """Vertical strip volumes (columns) and horizontal ones (rows)."""

    column_totals: tuple[Fraction, ...]
    row_totals: tuple[Fraction, ...]
    column_ratios: tuple[Fraction, ...]
    row_ratios: tuple[Fraction, ...]

    @property
    def max_ratio(self) -> Fraction:
        return max(max(self.column_ratios), max(self.row_ratios))

    def argmax(self) -> tuple[str, int]:
        """First strip attaining :attr:`max_ratio`, as ``("column"|"row", index)``."""
        best = self.max_ratio
        for i, r in enumerate(self.column_ratios):
            if r == best:
                return ("column", i)
        return ("row", self.row_ratios.index(best))


def strip_sums_of_mass(mesh: Mesh, cells: np.ndarray) -> StripSums:
    cols = tuple(to_fraction(sum(cells[:, i])) for i in range(mesh.nx))
    rows = tuple(to_fraction(sum(cells[j, :])) for j in range(mesh.ny))
    return StripSums(
        cols,
        rows,
        tuple(c / w for c, w in zip(cols, mesh.widths)),
        tuple(r / h for r, h in zip(rows, mesh.heights)),
    )


def strip_sums(F: GridFunction) -> StripSums:
    return strip_sums_of_mass(F.mesh, F.mass())
