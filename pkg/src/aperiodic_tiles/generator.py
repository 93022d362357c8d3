"""The canonical hierarchical configuration, restricted to any window.

Squares of side ``3**k`` sit on a lattice of period ``3**(k+1)`` with their
south-west corner at ``(3**k - 1, 3**k - 1)``. Squares of consecutive
levels share centres: each level-``k+1`` square is concentric with the
central square of a 3x3 group of level-``k`` squares.

Everything about a cell follows from arithmetic on its coordinates. Row
``y`` is a side row of level ``v3(y + 1)`` (the 3-adic valuation) and column
``x`` a side column of level ``v3(x + 1)``; only row and column ``-1``
belong to no level. Along a side row, cells within a square's span are blue,
the others belong to an arm joining two neighbouring squares.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .model import (
    ArmEndpoint,
    ArmSegment,
    Axis,
    BlueSegment,
    CellState,
    Coord2,
    DiagKind,
    DiagonalSegment,
    Dir,
    Mark,
    Mod3Pair,
    PatternWindow,
    Shape,
    Side,
    symbol_id,
)


@dataclass(frozen=True)
class LatticeLevel:
    k: int
    side: int
    anchor: Coord2
    period: int

    def square_at(self, i: int, j: int) -> tuple[Coord2, Mod3Pair]:
        """South-west corner and coordinates of lattice square ``(i, j)``."""
        return (
            Coord2(self.anchor.x + self.period * i, self.anchor.y + self.period * j),
            Mod3Pair(i % 3, j % 3),
        )


def square_lattice(k: int) -> LatticeLevel:
    if k < 0:
        raise ValueError("level must be non-negative")
    s = 3**k
    return LatticeLevel(k, s, Coord2(s - 1, s - 1), 3 * s)


def max_level_for(width: int, height: int) -> int:
    """Largest level whose squares (``3**k + 1`` cells across) fit in a
    window of this size; 0 when not even a side-1 square fits."""
    n = min(width, height)
    k = 0
    while 3 ** (k + 1) + 1 <= n:
        k += 1
    return k


def v3(n: int) -> int:
    k = 0
    while n % 3 == 0:
        n //= 3
        k += 1
    return k


@lru_cache(maxsize=1 << 16)
def line_level(c: int) -> Optional[tuple[int, int]]:
    """``(level, t)`` for side row/column ``c``; ``t`` is 1 for the
    bottom/left side and 2 for the top/right side. None for ``c == -1``."""
    if c == -1:
        return None
    k = v3(c + 1)
    return k, ((c + 1) // 3**k) % 3


def _in_span(c: int, k: int) -> bool:
    s = 3**k
    return s <= (c + 1) % (3 * s) <= 2 * s


def _index(c: int, k: int) -> int:
    """Lattice index of the square whose span holds ``c``, or of the square
    just before the gap holding ``c``."""
    s = 3**k
    return (c + 1 - s) // (3 * s)


def on_some_diagonal(x: int, y: int, min_level: int = 0) -> bool:
    """True when ``(x, y)`` lies strictly inside a square of level at least
    ``min_level`` and on that square's north-west/south-east diagonal."""
    m = min_level
    while True:
        s = 3**m
        if s > abs(x + 1) and s > abs(y + 1):
            return False
        p = 3 * s
        rx, ry = (x + 1) % p, (y + 1) % p
        if s < rx < 2 * s and s < ry < 2 * s and (rx - s) + (ry - s) == s:
            return True
        m += 1


@lru_cache(maxsize=1 << 16)
def square_on_diagonal(k: int, i: int, j: int) -> bool:
    s, p = 3**k, 3 ** (k + 1)
    ul_x, ul_y = s - 1 + p * i, s - 1 + p * j + s
    return on_some_diagonal(ul_x, ul_y, k + 1)


def _crossing(k: int, gap: int, line: int) -> Optional[int]:
    """Position of the blue line crossing the level-``k`` arm in gap
    ``gap`` along side line ``line``, if any.

    The gap holds exactly one position ``c`` with ``c + 1`` divisible by
    ``3**(k+1)``; a higher-level side passes there when ``line`` is within
    that square's span.
    """
    c = 3 ** (k + 1) * (gap + 1) - 1
    lv = line_level(c)
    if lv is None or not _in_span(line, lv[0]):
        return None
    return c


def _arm(axis: Axis, k: int, t_line: int, line: int, pos: int) -> ArmSegment:
    gap = _index(pos, k)
    other = _index(line, k)
    if axis is Axis.H:
        side = Side.BOTTOM if t_line == 1 else Side.TOP
        label = Mod3Pair(gap % 3, other % 3)
    else:
        side = Side.LEFT if t_line == 1 else Side.RIGHT
        label = Mod3Pair(other % 3, gap % 3)
    cross = _crossing(k, gap, line)
    mark = Mark.HIGH if cross is not None and pos > cross else Mark.LOW
    return ArmSegment(axis, side, mark, label)


def _arrival(k: int, gap: int, line: int) -> Mark:
    return Mark.HIGH if _crossing(k, gap, line) is not None else Mark.LOW


_CORNER_SHAPE = {(1, 1): Shape.SW, (2, 1): Shape.SE, (1, 2): Shape.NW, (2, 2): Shape.NE}


def cell_state(x: int, y: int) -> CellState:
    """State of cell ``(x, y)`` in the canonical configuration."""
    row = line_level(y)
    col = line_level(x)

    if row is not None and col is not None and row[0] == col[0]:
        k = row[0]
        i, j = _index(x, k), _index(y, k)
        shape = _CORNER_SHAPE[(col[1], row[1])]
        coords = Mod3Pair(i % 3, j % 3)
        eps = []
        if shape in (Shape.NE, Shape.SE):
            eps.append(ArmEndpoint(Dir.E, Mark.LOW))
        else:
            eps.append(ArmEndpoint(Dir.W, _arrival(k, i - 1, y)))
        if shape in (Shape.NE, Shape.NW):
            eps.append(ArmEndpoint(Dir.N, Mark.LOW))
        else:
            eps.append(ArmEndpoint(Dir.S, _arrival(k, j - 1, x)))
        diag = {Shape.NW: DiagKind.UL, Shape.SE: DiagKind.LR}.get(shape)
        return CellState(
            blue=BlueSegment(shape, coords, None, square_on_diagonal(k, i, j)),
            diagonal=DiagonalSegment(diag) if diag else None,
            arm_endpoints=frozenset(eps),
        )

    blue = None
    h_arm = v_arm = None
    if row is not None:
        k, t = row
        if _in_span(x, k):
            i, j = _index(x, k), _index(y, k)
            inner = Dir.N if t == 1 else Dir.S
            blue = BlueSegment(Shape.HORIZONTAL, Mod3Pair(i % 3, j % 3), inner, square_on_diagonal(k, i, j))
        else:
            h_arm = _arm(Axis.H, k, t, y, x)
    if col is not None:
        k, t = col
        if _in_span(y, k):
            i, j = _index(x, k), _index(y, k)
            inner = Dir.E if t == 1 else Dir.W
            assert blue is None, "blue lines never cross in the canonical configuration"
            blue = BlueSegment(Shape.VERTICAL, Mod3Pair(i % 3, j % 3), inner, square_on_diagonal(k, i, j))
        else:
            v_arm = _arm(Axis.V, k, t, x, y)

    if blue is not None:
        cross = Axis.H if h_arm is not None else Axis.V if v_arm is not None else None
        if cross is not None:
            blue = BlueSegment(blue.shape, blue.coords, blue.inner, blue.on_diagonal, cross)
        return CellState(blue=blue, h_arm=h_arm, v_arm=v_arm)
    diagonal = DiagonalSegment(DiagKind.THROUGH) if on_some_diagonal(x, y) else None
    return CellState(diagonal=diagonal, h_arm=h_arm, v_arm=v_arm)


@lru_cache(maxsize=1 << 20)
def cell_symbol(x: int, y: int) -> int:
    return symbol_id(cell_state(x, y))


def generate_window(origin: Coord2, width: int, height: int) -> PatternWindow:
    """The canonical configuration restricted to
    ``[origin.x, origin.x + width) x [origin.y, origin.y + height)``."""
    if width < 1 or height < 1:
        raise ValueError("window dimensions must be positive")
    cells = np.empty((height, width), dtype=np.int32)
    for r in range(height):
        y = origin.y + r
        for c in range(width):
            cells[r, c] = cell_symbol(origin.x + c, y)
    return PatternWindow(origin, cells)


def squares_in(origin: Coord2, width: int, height: int, k: int) -> list[tuple[Coord2, Mod3Pair]]:
    """Level-``k`` squares lying entirely inside the window (lattice
    oracle, independent of the painter)."""
    lv = square_lattice(k)
    out = []
    x1, y1 = origin.x + width - 1, origin.y + height - 1
    i0 = -(-(origin.x - lv.anchor.x) // lv.period)
    j0 = -(-(origin.y - lv.anchor.y) // lv.period)
    j = j0
    while lv.anchor.y + lv.period * j + lv.side <= y1:
        i = i0
        while lv.anchor.x + lv.period * i + lv.side <= x1:
            out.append(lv.square_at(i, j))
            i += 1
        j += 1
    return out
