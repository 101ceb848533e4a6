"""Optimal domination of a 2-increasing function's mass by a scaled copula.

For a nonzero grounded 2-increasing ``A`` the optimal constant ``alpha_A``
is the largest strip volume per strip width.  The extremal dominating
copulas are computed nodewise from four rectangle volumes of ``A``.

:func:`completion_witness` is an independent route to a dominating copula:
it never touches the extremal-copula formulas, only cellwise lower bounds
and an outer-product fill of the residual margins.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import AlphaTooSmall, MeshMismatch, NotGrounded, NotTwoIncreasing, ZeroFunction
from .grid import GridFunction, grid_from_mass, strip_sums, to_fraction

__all__ = [
    "DominationResult",
    "alpha_mass",
    "alpha_argmax",
    "lower_bound_copula",
    "upper_bound_copula",
    "domination_holds",
    "completion_witness",
    "dominate",
]


def _check_input(A: GridFunction) -> None:
    v = A.values
    if any(c != 0 for c in v[0, :]) or any(c != 0 for c in v[:, 0]):
        raise NotGrounded("function is not grounded")
    if any(c < 0 for c in A.mass().flat):
        raise NotTwoIncreasing("function has a cell of negative volume")
    if all(c == 0 for c in v.flat):
        raise ZeroFunction("alpha is zero for the zero function; extremal copulas undefined")


def alpha_mass(A: GridFunction) -> Fraction:
    """Largest strip volume divided by strip width, over columns and rows."""
    _check_input(A)
    return strip_sums(A).max_ratio


def alpha_argmax(A: GridFunction) -> tuple[str, int]:
    """A strip attaining ``alpha_mass(A)`` (diagnostics only)."""
    _check_input(A)
    return strip_sums(A).argmax()


def _corner_volumes(A: GridFunction):
    """Nodewise volumes of the four rectangles cut at each node.

    Returns ``(lower_left, upper_left, lower_right, upper_right)`` arrays,
    e.g. ``upper_left[j, i] = V_A([0, x_i] x [y_j, 1])``.
    """
    v = A.values
    top = v[-1:, :]  # A(x, 1)
    right = v[:, -1:]  # A(1, y)
    total = v[-1, -1]
    lower_left = v
    upper_left = top - v
    lower_right = right - v
    upper_right = total - top - right + v
    return lower_left, upper_left, lower_right, upper_right


def _node_coords(A: GridFunction):
    xs = np.array(A.mesh.xs, dtype=object)[None, :]
    ys = np.array(A.mesh.ys, dtype=object)[:, None]
    return xs, ys


def _frozen_grid(A: GridFunction, arr: np.ndarray) -> GridFunction:
    out = np.empty(A.values.shape, dtype=object)
    out[...] = arr
    out.flags.writeable = False
    return GridFunction(A.mesh, out)


def lower_bound_copula(A: GridFunction, alpha: Fraction | None = None) -> GridFunction:
    """The least copula dominating ``A`` at the optimal constant."""
    alpha = alpha_mass(A) if alpha is None else alpha
    ll, _, _, ur = _corner_volumes(A)
    xs, ys = _node_coords(A)
    first = ll / alpha
    second = xs + ys - 1 + ur / alpha
    return _frozen_grid(A, np.maximum(first, second))


def upper_bound_copula(A: GridFunction, alpha: Fraction | None = None) -> GridFunction:
    """The greatest copula dominating ``A`` at the optimal constant."""
    alpha = alpha_mass(A) if alpha is None else alpha
    _, ul, lr, _ = _corner_volumes(A)
    xs, ys = _node_coords(A)
    first = xs - ul / alpha
    second = ys - lr / alpha
    return _frozen_grid(A, np.minimum(first, second))


def domination_holds(alpha, C: GridFunction, A: GridFunction) -> bool:
    """``alpha * V_C(R) >= V_A(R)`` on every cell."""
    if C.mesh != A.mesh:
        raise MeshMismatch("C and A live on different meshes")
    alpha = to_fraction(alpha)
    return bool(np.all(alpha * C.mass() >= A.mass()))


def completion_witness(A: GridFunction, alpha) -> GridFunction:
    """A copula ``C`` with ``alpha * V_C >= V_A``, built by margin completion.

    Cells start at ``V_A / alpha``; the leftover column and row margins are
    filled in proportionally (outer product / total).  Raises
    :class:`AlphaTooSmall` when a leftover margin is negative, which happens
    exactly when ``alpha < alpha_mass(A)``.
    """
    alpha = to_fraction(alpha)
    if alpha <= 0:
        raise AlphaTooSmall("alpha must be positive")
    mesh = A.mesh
    low = A.mass() / alpha
    rho = [w - sum(low[:, i]) for i, w in enumerate(mesh.widths)]
    sigma = [h - sum(low[j, :]) for j, h in enumerate(mesh.heights)]
    for i, r in enumerate(rho):
        if r < 0:
            raise AlphaTooSmall(f"column {i} residual margin {r} is negative")
    for j, s in enumerate(sigma):
        if s < 0:
            raise AlphaTooSmall(f"row {j} residual margin {s} is negative")
    total = sum(rho, Fraction(0))
    if total == 0:
        return grid_from_mass(mesh, low)
    cells = [[low[j, i] + rho[i] * sigma[j] / total for i in range(mesh.nx)] for j in range(mesh.ny)]
    return grid_from_mass(mesh, cells)


@dataclass(frozen=True, eq=False)
class DominationResult:
    alpha: Fraction
    lower: GridFunction
    upper: GridFunction
    witness: GridFunction
    attained_by: tuple[str, int]


def dominate(A: GridFunction) -> DominationResult:
    alpha = alpha_mass(A)
    return DominationResult(
        alpha=alpha,
        lower=lower_bound_copula(A, alpha),
        upper=upper_bound_copula(A, alpha),
        witness=completion_witness(A, alpha),
        attained_by=alpha_argmax(A),
    )
