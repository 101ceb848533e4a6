"""Uniformly convergent copula series for an arbitrary quasi-copula.

Stage ``n`` restricts the target to the ``n``-equidistant mesh, splits the
restriction into ``alpha_n * A_n + beta_n * B_n`` against the product
copula, and extends both copulas bilinearly.  Consecutive stages telescope
into ``zeta_n * D_n + xi_n * E_n`` with ``D_n``, ``E_n`` copulas.  Each
telescoping pair is then spread over ``n * K_n`` repeated copies
(``K_n > |xi_n|``) so the flat series converges without parentheses.

Coefficients are exact rationals; evaluation is floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

import numpy as np

from .bilinear import (
    TOL,
    ContinuousQC,
    extend,
    grid_points,
    linear_combination,
    restrict,
    sup_distance_on_grid,
)
from .decomposition import product_grid, two_copula_split
from .errors import BoundViolated, IndexOutOfRange, StagesNotConsecutive
from .grid import GridFunction, Mesh, equidistant_mesh

__all__ = [
    "Stage",
    "TelescopeTerm",
    "SeriesTerm",
    "CopulaSeries",
    "PartialSum",
    "StageError",
    "build_stage",
    "telescope",
    "expand",
    "partial_sum",
    "literal_partial_sum",
    "classify",
    "stage_boundary",
    "error_certificate",
]


@dataclass(frozen=True, eq=False)
class Stage:
    n: int
    mesh: Mesh
    grid: GridFunction
    alpha: Fraction
    Ahat: ContinuousQC
    beta: Fraction
    Bhat: ContinuousQC
    Qhat: ContinuousQC


def build_stage(Q: ContinuousQC, n: int) -> Stage:
    if n < 1:
        raise ValueError("stage index must be >= 1")
    mesh = equidistant_mesh(n)
    Qn = restrict(Q, mesh)
    pair = two_copula_split(Qn, product_grid(mesh))
    Ahat = extend(pair.C1, name=f"A_{n}")
    if pair.alpha2 == 0:
        # coefficient is zero, so any copula works; keep the product copula
        Bhat = extend(product_grid(mesh), name=f"B_{n}")
    else:
        Bhat = extend(pair.C2, name=f"B_{n}")
    Qhat = linear_combination(
        [(pair.alpha1, Ahat), (pair.alpha2, Bhat)], name=f"Qhat_{n}", quasi_copula=True
    )
    return Stage(n, mesh, Qn, pair.alpha1, Ahat, pair.alpha2, Bhat, Qhat)


@dataclass(frozen=True, eq=False)
class TelescopeTerm:
    n: int
    zeta: Fraction
    D: ContinuousQC
    xi: Fraction
    E: ContinuousQC
    identity_error: float


def telescope(s_n: Stage, s_n1: Stage, probe_k: int = 100) -> TelescopeTerm:
    """Rewrite ``Qhat_(n+1) - Qhat_n`` as ``zeta * D + xi * E`` with copulas ``D, E``."""
    if s_n1.n != s_n.n + 1:
        raise StagesNotConsecutive(f"stages {s_n.n} and {s_n1.n} are not consecutive")
    n = s_n.n
    zeta = s_n1.alpha - s_n.beta
    xi = s_n1.beta - s_n.alpha
    D = linear_combination(
        [(s_n1.alpha / zeta, s_n1.Ahat), (-s_n.beta / zeta, s_n.Bhat)],
        name=f"D_{n}",
        quasi_copula=True,
    )
    E = linear_combination(
        [(s_n1.beta / xi, s_n1.Bhat), (-s_n.alpha / xi, s_n.Ahat)],
        name=f"E_{n}",
        quasi_copula=True,
    )
    pts = grid_points(probe_k)
    X, Y = np.meshgrid(pts, pts)
    lhs = float(zeta) * D(X, Y) + float(xi) * E(X, Y)
    rhs = s_n1.Qhat(X, Y) - s_n.Qhat(X, Y)
    err = float(np.max(np.abs(lhs - rhs)))
    if err > TOL:
        raise BoundViolated(f"telescoping identity off by {err} at stage {n}")
    return TelescopeTerm(n, zeta, D, xi, E, err)


@dataclass(frozen=True)
class SeriesTerm:
    stage: int
    role: str  # "A" / "B" for the head, "D" / "E" inside a stage block
    gamma: Fraction
    copula: ContinuousQC
    K: int | None


@dataclass(frozen=True, eq=False)
class CopulaSeries:
    target: ContinuousQC
    stages: tuple[Stage, ...]  # stages 1..N+1
    telescopes: tuple[TelescopeTerm, ...]  # n = 1..N
    K: tuple[int, ...]

    @property
    def N(self) -> int:
        return len(self.telescopes)

    @property
    def head(self) -> tuple[SeriesTerm, SeriesTerm]:
        s = self.stages[0]
        return (SeriesTerm(1, "A", s.alpha, s.Ahat, None), SeriesTerm(1, "B", s.beta, s.Bhat, None))

    def block_length(self, n: int) -> int:
        return 2 * n * self.K[n - 1]

    def __len__(self) -> int:
        return 2 + sum(self.block_length(n) for n in range(1, self.N + 1))

    def terms(self) -> Iterator[SeriesTerm]:
        yield from self.head
        for t, K in zip(self.telescopes, self.K):
            n = t.n
            gz = t.zeta / (n * K)
            gx = t.xi / (n * K)
            for _ in range(n * K):
                yield SeriesTerm(n, "D", gz, t.D, K)
                yield SeriesTerm(n, "E", gx, t.E, K)

    def coefficient_sum(self, j: int) -> Fraction:
        total = Fraction(0)
        for idx, term in enumerate(self.terms()):
            if idx >= j:
                break
            total += term.gamma
        return total


def expand(Q: ContinuousQC, N: int) -> CopulaSeries:
    """Head terms plus ``2 n K_n`` flat terms for each stage ``n <= N``."""
    if N < 1:
        raise ValueError("need at least one stage")
    stages = tuple(build_stage(Q, n) for n in range(1, N + 2))
    teles = tuple(telescope(a, b) for a, b in zip(stages, stages[1:]))
    K = tuple(math.floor(abs(t.xi)) + 1 for t in teles)
    return CopulaSeries(Q, stages, teles, K)


def stage_boundary(series: CopulaSeries, p: int) -> int:
    """Number of terms whose sum equals ``Qhat_p`` (head plus stages ``< p``)."""
    if not 1 <= p <= series.N + 1:
        raise IndexOutOfRange(f"stage {p} not in series with {series.N} stages")
    return 2 + sum(series.block_length(n) for n in range(1, p))


@dataclass(frozen=True, eq=False)
class PartialSum:
    """A partial sum together with its structural classification.

    ``kind`` is ``"head"`` (only ``alpha_1 * A_1``), ``"convex"``
    (``(1 - k/(pK)) Qhat_p + (k/(pK)) Qhat_(p+1)``) or ``"scaled"``
    (the convex form plus ``zeta_p/(pK) * D_p``).  Dividing by ``factor``
    always yields a quasi-copula.
    """

    j: int
    kind: str
    p: int
    k: int
    factor: Fraction
    function: ContinuousQC

    def normalized(self) -> ContinuousQC:
        if self.factor == 1:
            return self.function
        return linear_combination(
            [(1 / self.factor, self.function)], name=f"{self.function.name}/factor", quasi_copula=True
        )


def classify(series: CopulaSeries, j: int) -> tuple[str, int, int, Fraction]:
    """``(kind, p, k, factor)`` for the sum of the first ``j`` terms."""
    if not 1 <= j <= len(series):
        raise IndexOutOfRange(f"partial sum index {j} outside 1..{len(series)}")
    if j == 1:
        return "head", 1, 0, series.stages[0].alpha
    r = j - 2
    for n in range(1, series.N + 1):
        L = series.block_length(n)
        if r < L or n == series.N:
            K = series.K[n - 1]
            if r % 2 == 0:
                return "convex", n, r // 2, Fraction(1)
            t = series.telescopes[n - 1]
            return "scaled", n, (r + 1) // 2, 1 + t.zeta / (n * K)
        r -= L
    raise AssertionError("unreachable")


def partial_sum(series: CopulaSeries, j: int) -> PartialSum:
    """Sum of the first ``j`` terms, evaluated through its closed form."""
    kind, p, k, factor = classify(series, j)
    if kind == "head":
        s = series.stages[0]
        fn = linear_combination([(s.alpha, s.Ahat)], name="S_1")
        return PartialSum(j, kind, p, k, factor, fn)
    K = series.K[p - 1]
    lo, hi = series.stages[p - 1].Qhat, series.stages[p].Qhat
    if kind == "convex":
        t = Fraction(k, p * K)
        fn = linear_combination([(1 - t, lo), (t, hi)], name=f"S_{j}")
    else:
        t = Fraction(k - 1, p * K)
        tel = series.telescopes[p - 1]
        fn = linear_combination(
            [(1 - t, lo), (t, hi), (tel.zeta / (p * K), tel.D)], name=f"S_{j}"
        )
    return PartialSum(j, kind, p, k, factor, fn)


def literal_partial_sum(series: CopulaSeries, j: int) -> ContinuousQC:
    """Sum of the first ``j`` terms, term by term (reference path, slow for large j)."""
    if not 1 <= j <= len(series):
        raise IndexOutOfRange(f"partial sum index {j} outside 1..{len(series)}")
    acc: dict[tuple[int, str], tuple[Fraction, ContinuousQC]] = {}
    for idx, term in enumerate(series.terms()):
        if idx >= j:
            break
        key = (term.stage, term.role)
        c, F = acc.get(key, (Fraction(0), term.copula))
        acc[key] = (c + term.gamma, F)
    return linear_combination(list(acc.values()), name=f"literal_S_{j}")


@dataclass(frozen=True)
class StageError:
    stage: int
    bound: Fraction
    measured: float


def error_certificate(Q: ContinuousQC, series: CopulaSeries, p: int, k: int = 100) -> StageError:
    """Measured sup-grid distance between ``Q`` and ``Qhat_p`` against ``4/p``."""
    if not 1 <= p <= series.N:
        raise IndexOutOfRange(f"stage {p} is not complete in a series with {series.N} stages")
    S = partial_sum(series, stage_boundary(series, p)).function
    measured = sup_distance_on_grid(Q, S, k)
    bound = Fraction(4, p)
    if measured > float(bound) + TOL:
        raise BoundViolated(f"stage {p}: measured {measured} exceeds bound {float(bound)}")
    return StageError(p, bound, measured)
