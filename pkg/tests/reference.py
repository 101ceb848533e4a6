"""Reference matrices, typed top row first, and their orientation helper."""

from __future__ import annotations

from fractions import Fraction as F

QUARTERS = ("0", "1/4", "1/2", "3/4", "1")


def bottom_up(printed, scale=1):
    """Matrices are typed top to bottom; grids store rows bottom to top."""
    return [[F(v) * F(scale) for v in row] for row in reversed(printed)]


A_VALUES = [
    [0, 3, 8, 16, 21],
    [0, 1, 5, 11, 15],
    [0, 1, 4, 10, 11],
    [0, 1, 1, 3, 4],
    [0, 0, 0, 0, 0],
]

A_MASS = [
    [2, 1, 2, 1],
    [0, 1, 0, 3],
    [0, 3, 4, 0],
    [1, 0, 2, 1],
]

A_ALPHA = 32

# both scaled by 1/32
LOWER_VALUES = [
    [0, 8, 16, 24, 32],
    [0, 4, 11, 17, 24],
    [0, 1, 6, 12, 16],
    [0, 1, 2, 4, 8],
    [0, 0, 0, 0, 0],
]
UPPER_VALUES = [
    [0, 8, 16, 24, 32],
    [0, 6, 13, 19, 24],
    [0, 6, 9, 15, 16],
    [0, 5, 5, 7, 8],
    [0, 0, 0, 0, 0],
]
LOWER_MASS = [
    [4, 1, 2, 1],
    [3, 2, 0, 3],
    [0, 4, 4, 0],
    [1, 1, 2, 4],
]
UPPER_MASS = [
    [2, 1, 2, 3],
    [0, 4, 0, 4],
    [1, 3, 4, 0],
    [5, 0, 2, 1],
]

# 2x2 example on {0, 1/2, 1}: all-ones mass, and two non-optimal dominators at 6
ONES_MASS = [[1, 1], [1, 1]]
C1_MASS_SIXTHS = [[2, 1], [1, 2]]
C2_MASS_SIXTHS = [[1, 2], [2, 1]]

Q1_MASS = [
    ["0", "1/3", "0"],
    ["1/3", "-1/3", "1/3"],
    ["0", "1/3", "0"],
]
Q2_MASS = [
    ["0", "0", "1/5", "0", "0"],
    ["0", "1/5", "-1/5", "1/5", "0"],
    ["1/5", "-1/5", "1/5", "-1/5", "1/5"],
    ["0", "1/5", "-1/5", "1/5", "0"],
    ["0", "0", "1/5", "0", "0"],
]
_a, _m = F(1, 7), F(-1, 7)
Q3_MASS = [
    [0, 0, 0, _a, 0, 0, 0],
    [0, 0, _a, _m, _a, 0, 0],
    [0, _a, _m, _a, _m, _a, 0],
    [_a, _m, _a, _m, _a, _m, _a],
    [0, _a, _m, _a, _m, _a, 0],
    [0, 0, _a, _m, _a, 0, 0],
    [0, 0, 0, _a, 0, 0, 0],
]

# untruncated totals of the counterexample: 3/2 + (sqrt 2/4) asinh 1 and its negative mirror
POSITIVE_MASS = 1.8116
NEGATIVE_MASS = -0.8116
