"""Affine two-copula decompositions and the exact Minkowski norm of discrete quasi-copulas."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .domination import alpha_mass, upper_bound_copula
from .errors import BaseHasZeroCell, IsCopula, MeshMismatch, NotQuasiCopula
from .grid import GridFunction, Mesh, grid_from_mass, grid_from_values, validate

__all__ = [
    "AffinePair",
    "NormWitness",
    "product_grid",
    "split_pos_neg",
    "two_copula_split",
    "minkowski_norm",
    "minkowski_witness",
]


def product_grid(mesh: Mesh) -> GridFunction:
    """The product copula restricted to ``mesh``."""
    return grid_from_values(mesh, [[x * y for x in mesh.xs] for y in mesh.ys])


def _require_quasi_copula(Q: GridFunction) -> None:
    if not validate(Q).is_quasi_copula:
        raise NotQuasiCopula("input is not a discrete quasi-copula")


@dataclass(frozen=True, eq=False)
class AffinePair:
    """``Q = alpha1 * C1 + alpha2 * C2`` with ``alpha1 >= 1``, ``alpha2 <= 0``."""

    alpha1: Fraction
    C1: GridFunction
    alpha2: Fraction
    C2: GridFunction

    def reconstruct(self) -> GridFunction:
        return self.C1.scale(self.alpha1) + self.C2.scale(self.alpha2)


@dataclass(frozen=True, eq=False)
class NormWitness:
    """``Q = s * A - t * B`` attaining ``s + t = norm``."""

    norm: Fraction
    s: Fraction
    A: GridFunction
    t: Fraction
    B: GridFunction

    def reconstruct(self) -> GridFunction:
        return self.A.scale(self.s) - self.B.scale(self.t)


def split_pos_neg(Q: GridFunction) -> tuple[GridFunction, GridFunction]:
    """Grounded 2-increasing ``(Q_pos, Q_neg)`` with ``Q = Q_pos - Q_neg``."""
    _require_quasi_copula(Q)
    m = Q.mass()
    zero = Fraction(0)
    pos = np.vectorize(lambda c: c if c > 0 else zero, otypes=[object])(m)
    neg = np.vectorize(lambda c: -c if c < 0 else zero, otypes=[object])(m)
    return grid_from_mass(Q.mesh, pos), grid_from_mass(Q.mesh, neg)


def two_copula_split(Q: GridFunction, base: GridFunction | None = None) -> AffinePair:
    """Dominate Q's cell masses by a multiple of ``base`` (default: product copula).

    ``alpha1`` is the largest cell ratio ``V_Q / V_base``; the second copula
    is what remains after subtracting ``alpha1 * base``.
    """
    _require_quasi_copula(Q)
    if base is None:
        base = product_grid(Q.mesh)
    elif base.mesh != Q.mesh:
        raise MeshMismatch("base copula lives on a different mesh")
    base_report = validate(base)
    if not base_report.is_copula:
        raise NotQuasiCopula("base is not a discrete copula")
    bm = base.mass()
    if any(c <= 0 for c in bm.flat):
        raise BaseHasZeroCell("base copula must put positive mass on every cell")
    qm = Q.mass()
    alpha1 = max(q / b for q, b in zip(qm.flat, bm.flat))
    if alpha1 == 1:
        # every ratio is <= 1 and both totals are 1, so Q coincides with base
        return AffinePair(Fraction(1), Q, Fraction(0), base)
    alpha2 = 1 - alpha1
    C2 = (Q - base.scale(alpha1)).scale(1 / alpha2)
    return AffinePair(alpha1, base, alpha2, C2)


def minkowski_norm(Q: GridFunction) -> Fraction:
    """``2 * alpha(Q_pos) - 1``."""
    pos, _ = split_pos_neg(Q)
    return 2 * alpha_mass(pos) - 1


def minkowski_witness(Q: GridFunction) -> NormWitness:
    pos, neg = split_pos_neg(Q)
    if all(c == 0 for c in neg.values.flat):
        raise IsCopula("input is a copula; the norm 1 witness is not unique")
    s = alpha_mass(pos)
    t = s - 1
    if alpha_mass(neg) != t:
        raise AssertionError("positive and negative strip constants differ by something other than 1")
    A = upper_bound_copula(pos, s)
    B = (A.scale(s) - Q).scale(1 / t)
    return NormWitness(norm=s + t, s=s, A=A, t=t, B=B)
