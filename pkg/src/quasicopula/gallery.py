"""Reusable exact constructions: bounds, product copula, diamond grids, ordinal sums.

The counterexample is the ordinal sum of the bilinearly extended diamond
grids ``Q_i`` over the blocks ``J_i = [1 - 2^(1-i), 1 - 2^(-i)]``.  It is a
quasi-copula with finite total variation that is nevertheless not a
difference of two scaled copulas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .bilinear import ContinuousQC, extend
from .errors import OverlappingIntervals, UnknownName
from .grid import GridFunction, Mesh, equidistant_mesh, grid_from_mass

__all__ = [
    "named",
    "chessboard_diamond",
    "diamond_mass_rows",
    "OrdinalSumSpec",
    "ordinal_sum",
    "counterexample",
    "block_interval",
    "counterexample_mesh",
    "truncated_masses",
    "GALLERY_NAMES",
    "lookup",
    "positive_mass_closed_form",
]

_ONE = Fraction(1)
_ZERO = Fraction(0)


def _pi() -> ContinuousQC:
    return ContinuousQC(
        "Pi",
        func=lambda x, y: x * y,
        exact=lambda x, y: x * y,
        lineage=("named",),
        quasi_copula=True,
        natural_mesh=lambda level: Mesh((_ZERO, _ONE), (_ZERO, _ONE)),
    )


def _m() -> ContinuousQC:
    return ContinuousQC(
        "M", func=np.minimum, exact=min, lineage=("named",), quasi_copula=True
    )


def _w() -> ContinuousQC:
    return ContinuousQC(
        "W",
        func=lambda x, y: np.maximum(x + y - 1.0, 0.0),
        exact=lambda x, y: max(x + y - 1, _ZERO),
        lineage=("named",),
        quasi_copula=True,
    )


_NAMED = {"pi": _pi, "m": _m, "w": _w}


def named(name: str) -> ContinuousQC:
    """``Pi``, ``M`` or ``W`` (case-insensitive)."""
    try:
        return _NAMED[name.lower()]()
    except KeyError:
        raise UnknownName(f"unknown copula {name!r}; expected one of Pi, M, W") from None


def diamond_mass_rows(i: int) -> list[list[Fraction]]:
    """Cell masses of the level-``i`` diamond, rows bottom to top.

    Cell ``(c, r)`` (1-based) with ``d = |c - (i+1)| + |r - (i+1)|`` is
    nonzero iff ``d <= i``; its sign is ``+`` iff ``d`` has the parity of ``i``.
    """
    if i < 1:
        raise ValueError("diamond level must be a positive integer")
    n = 2 * i + 1
    unit = Fraction(1, n)
    rows = []
    for r in range(1, n + 1):
        row = []
        for c in range(1, n + 1):
            d = abs(c - (i + 1)) + abs(r - (i + 1))
            if d > i:
                row.append(_ZERO)
            else:
                row.append(unit if (d - i) % 2 == 0 else -unit)
        rows.append(row)
    return rows


def chessboard_diamond(i: int) -> GridFunction:
    """The discrete quasi-copula ``Q_i`` on the ``(2i+1)``-equidistant mesh."""
    return grid_from_mass(equidistant_mesh(2 * i + 1), diamond_mass_rows(i))


@dataclass(frozen=True)
class OrdinalSumSpec:
    """Diagonal blocks ``[a, b]^2`` each carrying a rescaled component."""

    components: tuple[tuple[Fraction, Fraction, ContinuousQC], ...]

    def __post_init__(self) -> None:
        prev_end = _ZERO
        for a, b, _ in self.components:
            if not (0 <= a < b <= 1):
                raise OverlappingIntervals(f"interval [{a}, {b}] is not a proper subinterval of [0, 1]")
            if a < prev_end:
                raise OverlappingIntervals(f"interval [{a}, {b}] overlaps its predecessor")
            prev_end = b

    @classmethod
    def of(cls, components: Sequence[tuple]) -> "OrdinalSumSpec":
        return cls(tuple((Fraction(a), Fraction(b), F) for a, b, F in components))


def ordinal_sum(spec: OrdinalSumSpec, name: str = "ordinal_sum") -> ContinuousQC:
    comps = spec.components
    fcomps = [(float(a), float(b), F) for a, b, F in comps]

    def func(x, y):
        x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
        out = np.array(np.minimum(x, y), dtype=float)
        for a, b, F in fcomps:
            mask = (x >= a) & (x <= b) & (y >= a) & (y <= b)
            if np.any(mask):
                L = b - a
                out[mask] = a + L * F.func((x[mask] - a) / L, (y[mask] - a) / L)
        return out

    exact = None
    if all(F.exact is not None for _, _, F in comps):

        def exact(x, y):
            for a, b, F in comps:
                if a <= x <= b and a <= y <= b:
                    L = b - a
                    return a + L * F.exact((x - a) / L, (y - a) / L)
            return min(x, y)

    return ContinuousQC(
        name,
        func,
        exact,
        lineage=("ordinal_sum",) + tuple(F.name for _, _, F in comps),
        quasi_copula=all(F.quasi_copula for _, _, F in comps),
    )


def block_interval(i: int) -> tuple[Fraction, Fraction]:
    """``J_i = [a_(i-1), a_i]`` with ``a_i = 1 - 2^(-i)``."""
    return _ONE - Fraction(1, 2 ** (i - 1)), _ONE - Fraction(1, 2**i)


@lru_cache(maxsize=None)
def _block(i: int) -> ContinuousQC:
    return extend(chessboard_diamond(i), name=f"diamond:{i}")


# Beyond this block the float evaluator falls back to min(x, y); blocks
# this deep are shorter than 2^-50 so the substitution is below float noise.
_FLOAT_BLOCK_LIMIT = 50


def _block_index_exact(x: Fraction) -> int:
    d = _ONE - x
    i = 1
    while Fraction(1, 2**i) >= d:
        i += 1
    return i


def _float_block_index(x: np.ndarray) -> np.ndarray:
    gap = np.where(x < 1.0, 1.0 - x, 2.0 ** -(_FLOAT_BLOCK_LIMIT + 2))
    gap = np.maximum(gap, 2.0 ** -(_FLOAT_BLOCK_LIMIT + 2))
    return np.floor(-np.log2(gap)).astype(np.int64) + 1


def counterexample_mesh(level: int) -> Mesh:
    """Breakpoints resolving the cells of blocks ``1..level``."""
    pts = {_ZERO, _ONE}
    for i in range(1, level + 1):
        a, b = block_interval(i)
        n = 2 * i + 1
        pts.update(a + (b - a) * Fraction(k, n) for k in range(n + 1))
    pts = tuple(sorted(pts))
    return Mesh(pts, pts)


def counterexample() -> ContinuousQC:
    """Countable ordinal sum of the extended diamonds over ``J_1, J_2, ...``."""

    def exact(x: Fraction, y: Fraction) -> Fraction:
        if x >= 1 or y >= 1:
            return min(x, y)
        if x <= 0 or y <= 0:
            return _ZERO
        i = _block_index_exact(x)
        if _block_index_exact(y) != i:
            # off-block points, and shared block corners, follow min(x, y)
            return min(x, y)
        a, b = block_interval(i)
        L = b - a
        return a + L * _block(i).exact((x - a) / L, (y - a) / L)

    def func(x, y):
        x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
        out = np.array(np.minimum(x, y), dtype=float)
        ix = _float_block_index(x)
        iy = _float_block_index(y)
        same = (ix == iy) & (x < 1.0) & (y < 1.0) & (ix <= _FLOAT_BLOCK_LIMIT)
        for i in np.unique(ix[same]):
            i = int(i)
            mask = same & (ix == i)
            a, b = (float(t) for t in block_interval(i))
            L = b - a
            out[mask] = a + L * _block(i).func((x[mask] - a) / L, (y[mask] - a) / L)
        return out

    return ContinuousQC(
        "counterexample",
        func,
        exact,
        lineage=("ordinal_sum", "diamond:*"),
        quasi_copula=True,
        natural_mesh=counterexample_mesh,
    )


def truncated_masses(n_blocks: int) -> tuple[Fraction, Fraction]:
    """Total positive and negative mass of the counterexample in blocks ``1..n_blocks``.

    Computed from the diamond grids themselves: block ``i`` scales the cell
    masses of ``Q_i`` by the block length.
    """
    pos = neg = _ZERO
    for i in range(1, n_blocks + 1):
        a, b = block_interval(i)
        m = chessboard_diamond(i).mass()
        pos += (b - a) * sum((c for c in m.flat if c > 0), _ZERO)
        neg += (b - a) * sum((c for c in m.flat if c < 0), _ZERO)
    return pos, neg


GALLERY_NAMES = ("pi", "m", "w", "q1", "q2", "q3", "diamond:<i>", "counterexample")


def lookup(name: str) -> GridFunction | ContinuousQC:
    """Resolve a gallery name; diamonds come back as grids, the rest as functions."""
    key = name.strip().lower()
    if key in _NAMED:
        return named(key)
    if key == "counterexample":
        return counterexample()
    if key in ("q1", "q2", "q3"):
        return chessboard_diamond(int(key[1]))
    if key.startswith("diamond:"):
        try:
            i = int(key.split(":", 1)[1])
        except ValueError:
            raise UnknownName(f"bad diamond level in {name!r}") from None
        if i < 1:
            raise UnknownName(f"diamond level must be positive in {name!r}")
        return chessboard_diamond(i)
    raise UnknownName(f"unknown gallery name {name!r}; known: {', '.join(GALLERY_NAMES)}")


def positive_mass_closed_form() -> float:
    """``3/2 + (sqrt 2 / 4) asinh 1``, the untruncated positive mass."""
    return 1.5 + math.sqrt(2) / 4 * math.asinh(1.0)
