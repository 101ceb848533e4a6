"""Finite-depth probing of membership in the linear span of copulas.

A quasi-copula lies in the span iff its positive-part strip ratios stay
bounded over refining meshes.  At finite depth the best one can do is watch
the sequence: :func:`verdict` applies fixed heuristic thresholds and says so
in its output.

Two mesh families are offered.  ``dyadic`` level ``n`` is the
``2^n``-equidistant mesh.  ``aligned`` level ``n`` is its common refinement
with a base mesh (fixed, or supplied per level), which lets functions with
non-dyadic structure attain their ratio at finite depth.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .bilinear import ContinuousQC, extend, grid_cell_masses, linear_combination, restrict
from .domination import upper_bound_copula
from .errors import NotInSpan, TooFewLevels
from .grid import GridFunction, Mesh, equidistant_mesh, grid_from_mass, strip_sums_of_mass

__all__ = [
    "MeshFamily",
    "LevelAlpha",
    "SpanReport",
    "SplitReport",
    "alpha_sequence",
    "alpha_on_mesh",
    "verdict",
    "constructive_split",
    "norm_estimate",
    "STABILITY_RTOL",
    "GROWTH_STEP",
]

STABILITY_RTOL = 1e-6
GROWTH_STEP = 1
D_CHECK_TOL = 1e-9
D_CHECK_K = 100


@dataclass(frozen=True)
class MeshFamily:
    """``kind`` is ``"dyadic"`` or ``"aligned"``; ``base`` is a mesh or ``level -> mesh``."""

    kind: str = "dyadic"
    base: Mesh | Callable[[int], Mesh] | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if self.kind not in ("dyadic", "aligned"):
            raise ValueError(f"unknown mesh family {self.kind!r}")

    @classmethod
    def dyadic(cls) -> "MeshFamily":
        return cls("dyadic")

    @classmethod
    def aligned(cls, base) -> "MeshFamily":
        return cls("aligned", base)

    @classmethod
    def aligned_to(cls, Q: ContinuousQC) -> "MeshFamily":
        """Aligned to ``Q``'s own breakpoints (plain dyadic if it has none)."""
        return cls("aligned", Q.natural_mesh)

    def mesh(self, level: int) -> Mesh:
        dy = equidistant_mesh(2**level)
        if self.kind == "dyadic" or self.base is None:
            return dy
        base = self.base(level) if callable(self.base) else self.base
        return dy.union(base)


@dataclass(frozen=True)
class LevelAlpha:
    level: int
    max_gap: Fraction
    alpha: Fraction


def _positive_part(cells: np.ndarray) -> np.ndarray:
    zero = Fraction(0)
    return np.vectorize(lambda c: c if c > 0 else zero, otypes=[object])(cells)


def _positive_grid(G: GridFunction) -> GridFunction:
    return grid_from_mass(G.mesh, _positive_part(G.mass()))


def alpha_on_mesh(Q: ContinuousQC, mesh: Mesh) -> Fraction:
    """Largest positive-part strip sum per strip width of ``Q`` on ``mesh``."""
    G = restrict(Q, mesh)
    return strip_sums_of_mass(mesh, _positive_part(G.mass())).max_ratio


def alpha_sequence(Q: ContinuousQC, family: MeshFamily, N: int) -> list[LevelAlpha]:
    if N < 1:
        raise ValueError("depth must be >= 1")
    out = []
    for level in range(1, N + 1):
        mesh = family.mesh(level)
        out.append(LevelAlpha(level, mesh.max_gap, alpha_on_mesh(Q, mesh)))
    return out


@dataclass(frozen=True)
class SpanReport:
    alphas: tuple[LevelAlpha, ...]
    verdict: str  # "InSpan" | "LikelyNotInSpan" | "Inconclusive"
    alpha_estimate: Fraction
    norm_estimate: Fraction
    evidence: dict

    heuristic = True


def _close(a: Fraction, b: Fraction, rtol: float) -> bool:
    return abs(a - b) <= rtol * max(abs(a), abs(b))


def verdict(alphas) -> SpanReport:
    """Classify a level sequence.

    ``InSpan`` when the last three levels agree to ``1e-6`` relative;
    ``LikelyNotInSpan`` when each of the last three increments is at least 1;
    ``Inconclusive`` otherwise.  These thresholds are heuristics: the
    underlying criterion is a supremum over all levels.
    """
    alphas = tuple(alphas)
    if len(alphas) < 4:
        raise TooFewLevels(f"need at least 4 levels, got {len(alphas)}")
    vals = [a.alpha for a in alphas]
    last3 = vals[-3:]
    increments = [b - a for a, b in zip(vals[-4:], vals[-3:])]
    sup = max(vals)
    if _close(last3[0], last3[1], STABILITY_RTOL) and _close(last3[1], last3[2], STABILITY_RTOL):
        kind = "InSpan"
    elif all(d >= GROWTH_STEP for d in increments):
        kind = "LikelyNotInSpan"
    else:
        kind = "Inconclusive"
    evidence = {
        "rule": "stable: last 3 levels within 1e-6 relative; growth: last 3 increments >= 1",
        "heuristic": True,
        "last_levels": [a.level for a in alphas[-3:]],
        "last_alphas": last3,
        "last_increments": increments,
        "sup_alpha": sup,
    }
    return SpanReport(alphas, kind, sup, 2 * sup - 1, evidence)


def norm_estimate(report: SpanReport) -> Fraction:
    if report.verdict != "InSpan":
        raise NotInSpan(f"verdict is {report.verdict}; no norm estimate")
    return 2 * report.alpha_estimate - 1


@dataclass(frozen=True, eq=False)
class SplitReport:
    """Finite-level split ``Q = alpha * C + (1 - alpha) * D``.

    ``status`` is ``"QIsCopula"`` when ``alpha == 1`` (``D`` is ``None``),
    otherwise ``"Split"``; ``D_min_cell_mass`` is the smallest ``100 x 100``
    grid cell volume of ``D`` and ``D_is_copula`` compares it to ``-1e-9``.
    """

    level: int
    mesh: Mesh
    alpha: Fraction
    C: ContinuousQC
    D: ContinuousQC | None
    status: str
    D_min_cell_mass: float | None
    D_is_copula: bool | None
    negative_cells: int | None


def constructive_split(Q: ContinuousQC, n: int, family: MeshFamily | None = None) -> SplitReport:
    if n < 1:
        raise ValueError("level must be >= 1")
    family = family or MeshFamily.dyadic()
    mesh = family.mesh(n)
    G = restrict(Q, mesh)
    A = _positive_grid(G)
    alpha = strip_sums_of_mass(mesh, A.mass()).max_ratio
    C = extend(upper_bound_copula(A, alpha), name=f"C_{n}")
    if alpha == 1:
        return SplitReport(n, mesh, alpha, C, None, "QIsCopula", None, None, None)
    D = linear_combination(
        [(1 / (1 - alpha), Q), (-alpha / (1 - alpha), C)], name=f"D_{n}"
    )
    cells = grid_cell_masses(D, D_CHECK_K)
    dmin = float(cells.min())
    return SplitReport(
        n, mesh, alpha, C, D, "Split", dmin, dmin >= -D_CHECK_TOL, int(np.sum(cells < -D_CHECK_TOL))
    )
