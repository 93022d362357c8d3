"""Layered cell states and the enumerated symbol alphabet.

Every cell of the plane carries one :class:`CellState`: an optional blue
line segment, an optional diagonal segment, and optional horizontal and
vertical arms. Blue corner cells additionally carry the endpoints of the
two arms they emit. The alphabet is the finite set of states that satisfy
the intra-cell invariants (:func:`is_legal_state`), listed in a fixed order
by :func:`enumerate_alphabet`.

Geometry convention: ``y`` grows upward, so ``NW`` is the upper-left corner
of a square (the blue line leaves that cell to the east and to the south).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from itertools import product
from typing import Iterator, Optional

import numpy as np


class Dir(str, Enum):
    N = "N"
    E = "E"
    S = "S"
    W = "W"

    @property
    def opposite(self) -> "Dir":
        return _OPPOSITE[self]

    @property
    def delta(self) -> tuple[int, int]:
        return _DELTA[self]


_OPPOSITE = {Dir.N: Dir.S, Dir.S: Dir.N, Dir.E: Dir.W, Dir.W: Dir.E}
_DELTA = {Dir.N: (0, 1), Dir.S: (0, -1), Dir.E: (1, 0), Dir.W: (-1, 0)}


class Axis(str, Enum):
    H = "horizontal"
    V = "vertical"


class Shape(str, Enum):
    HORIZONTAL = "horizontal"
    VERTICAL = "vertical"
    NE = "corner-NE"
    NW = "corner-NW"
    SE = "corner-SE"
    SW = "corner-SW"

    @property
    def is_corner(self) -> bool:
        return self not in (Shape.HORIZONTAL, Shape.VERTICAL)


class DiagKind(str, Enum):
    THROUGH = "through"
    UL = "attach-UL"
    LR = "attach-LR"


class Side(str, Enum):
    TOP = "top"
    BOTTOM = "bottom"
    LEFT = "left"
    RIGHT = "right"


class Mark(str, Enum):
    """Arm orientation. ``LOW`` cells lie between the low extremity and the
    crossing point; ``HIGH`` cells lie past the crossing point."""

    LOW = "fromLow"
    HIGH = "fromHigh"


@dataclass(frozen=True, order=True)
class Coord2:
    x: int
    y: int

    def __add__(self, other: "Coord2") -> "Coord2":
        return Coord2(self.x + other.x, self.y + other.y)


@dataclass(frozen=True, order=True)
class Mod3Pair:
    x: int
    y: int

    def __post_init__(self) -> None:
        if not (0 <= self.x < 3 and 0 <= self.y < 3):
            raise ValueError(f"coordinates must be residues mod 3, got ({self.x}, {self.y})")

    def step(self, axis: Axis, k: int = 1) -> "Mod3Pair":
        if axis is Axis.H:
            return Mod3Pair((self.x + k) % 3, self.y)
        return Mod3Pair(self.x, (self.y + k) % 3)

    def __str__(self) -> str:
        return f"({self.x},{self.y})"


ALL_COORDS: tuple[Mod3Pair, ...] = tuple(Mod3Pair(x, y) for x in range(3) for y in range(3))
CENTER = Mod3Pair(1, 1)


def must_cross(axis: Axis, label: Mod3Pair) -> bool:
    """Arms touching a (1,1) square have to be crossed by exactly one blue line."""
    return label == CENTER or label.step(axis) == CENTER


# Corner geometry: the two directions the blue line leaves the cell, the inner
# side of its horizontal and vertical branches, and the exterior directions
# along which the corner emits arms.
CORNER_EXITS = {
    Shape.NW: (Dir.E, Dir.S),
    Shape.NE: (Dir.W, Dir.S),
    Shape.SW: (Dir.E, Dir.N),
    Shape.SE: (Dir.W, Dir.N),
}
CORNER_INNER = {  # (inner side of horizontal branch, inner side of vertical branch)
    Shape.NW: (Dir.S, Dir.E),
    Shape.NE: (Dir.S, Dir.W),
    Shape.SW: (Dir.N, Dir.E),
    Shape.SE: (Dir.N, Dir.W),
}
CORNER_EXTERIOR = {
    Shape.NW: (Dir.W, Dir.N),
    Shape.NE: (Dir.E, Dir.N),
    Shape.SW: (Dir.W, Dir.S),
    Shape.SE: (Dir.E, Dir.S),
}
CORNER_DIAGONAL = {Shape.NW: DiagKind.UL, Shape.SE: DiagKind.LR}


def endpoint_side(shape: Shape, direction: Dir) -> Side:
    """Which side of the connected squares an arm leaving ``shape`` runs along."""
    if direction in (Dir.E, Dir.W):
        return Side.TOP if shape in (Shape.NW, Shape.NE) else Side.BOTTOM
    return Side.LEFT if shape in (Shape.NW, Shape.SW) else Side.RIGHT


def is_low_end(direction: Dir) -> bool:
    """Arms leaving a corner eastward or northward start at their low extremity."""
    return direction in (Dir.E, Dir.N)


@dataclass(frozen=True, order=True)
class BlueSegment:
    shape: Shape
    coords: Mod3Pair
    inner: Optional[Dir] = None
    on_diagonal: bool = False
    crossed_by_arm: Optional[Axis] = None


@dataclass(frozen=True, order=True)
class DiagonalSegment:
    kind: DiagKind


@dataclass(frozen=True, order=True)
class ArmSegment:
    axis: Axis
    side: Side
    mark: Mark
    label: Mod3Pair


@dataclass(frozen=True, order=True)
class ArmEndpoint:
    direction: Dir
    mark: Mark = Mark.LOW


def _key(v):
    return (0,) if v is None else (1, v)


@dataclass(frozen=True)
class CellState:
    blue: Optional[BlueSegment] = None
    diagonal: Optional[DiagonalSegment] = None
    h_arm: Optional[ArmSegment] = None
    v_arm: Optional[ArmSegment] = None
    arm_endpoints: frozenset[ArmEndpoint] = field(default_factory=frozenset)

    @property
    def is_blank(self) -> bool:
        return self == BLANK

    @property
    def is_corner(self) -> bool:
        return self.blue is not None and self.blue.shape.is_corner

    def endpoint(self, direction: Dir) -> Optional[ArmEndpoint]:
        for ep in self.arm_endpoints:
            if ep.direction is direction:
                return ep
        return None

    def sort_key(self) -> tuple:
        return (
            _key(self.blue),
            _key(self.diagonal),
            _key(self.h_arm),
            _key(self.v_arm),
            tuple(sorted(self.arm_endpoints)),
        )


BLANK = CellState()


class UnknownSymbolError(KeyError):
    pass


def state_violations(s: CellState) -> list[str]:
    """Return the intra-cell invariants broken by ``s`` (empty when legal)."""
    bad: list[str] = []
    b = s.blue
    for arm, axis in ((s.h_arm, Axis.H), (s.v_arm, Axis.V)):
        if arm is None:
            continue
        if arm.axis is not axis:
            bad.append("arm stored on the wrong axis layer")
        elif axis is Axis.H and arm.side not in (Side.TOP, Side.BOTTOM):
            bad.append("horizontal arm side must be top/bottom")
        elif axis is Axis.V and arm.side not in (Side.LEFT, Side.RIGHT):
            bad.append("vertical arm side must be left/right")

    if b is None:
        if s.arm_endpoints:
            bad.append("arm endpoints without a corner")
        if s.diagonal is not None and s.diagonal.kind is not DiagKind.THROUGH:
            bad.append("diagonal attachment without a corner")
        return bad

    if s.diagonal is not None and s.diagonal.kind is DiagKind.THROUGH:
        bad.append("through diagonal meets a blue line")

    if b.shape.is_corner:
        if b.inner is not None:
            bad.append("corner carries an explicit inner side")
        if b.crossed_by_arm is not None:
            bad.append("corner crossed by an arm")
        if s.h_arm is not None or s.v_arm is not None:
            bad.append("arm passes through a corner")
        want_diag = CORNER_DIAGONAL.get(b.shape)
        have_diag = s.diagonal.kind if s.diagonal else None
        if have_diag is not want_diag:
            bad.append("corner diagonal attachment mismatch")
        dirs = sorted(ep.direction.value for ep in s.arm_endpoints)
        if dirs != sorted(d.value for d in CORNER_EXTERIOR[b.shape]):
            bad.append("corner must emit arms toward its two exterior directions")
        for ep in s.arm_endpoints:
            if is_low_end(ep.direction):
                if ep.mark is not Mark.LOW:
                    bad.append("arm leaves its low extremity marked fromHigh")
            else:
                axis = Axis.H if ep.direction is Dir.W else Axis.V
                label = b.coords.step(axis, -1)
                if must_cross(axis, label) and ep.mark is not Mark.HIGH:
                    bad.append("(1,1) arm reaches its end uncrossed")
        return bad

    # straight blue segment
    if s.arm_endpoints:
        bad.append("arm endpoints on a straight segment")
    if s.diagonal is not None:
        bad.append("diagonal on a straight segment")
    horizontal = b.shape is Shape.HORIZONTAL
    if horizontal and b.inner not in (Dir.N, Dir.S):
        bad.append("horizontal blue inner side must be N or S")
    if not horizontal and b.inner not in (Dir.E, Dir.W):
        bad.append("vertical blue inner side must be E or W")
    parallel = s.h_arm if horizontal else s.v_arm
    perpendicular = s.v_arm if horizontal else s.h_arm
    if parallel is not None:
        bad.append("arm overlaps a blue line")
    cross_axis = Axis.V if horizontal else Axis.H
    if perpendicular is None:
        if b.crossed_by_arm is not None:
            bad.append("crossedByArm set without an arm")
    else:
        if b.crossed_by_arm is not cross_axis:
            bad.append("crossedByArm must name the crossing arm's axis")
        if perpendicular.mark is not Mark.LOW:
            bad.append("arm crossed past its crossing point")
        if must_cross(cross_axis, perpendicular.label):
            toward_low = Dir.W if cross_axis is Axis.H else Dir.S
            want = toward_low if perpendicular.label == CENTER else toward_low.opposite
            if b.inner is not want:
                bad.append("(1,1) arm crossed by a line facing away from the (1,1) square")
    return bad


def is_legal_state(s: CellState) -> bool:
    return not state_violations(s)


def _arms(axis: Axis, coords=ALL_COORDS, marks=tuple(Mark)) -> list[ArmSegment]:
    sides = (Side.TOP, Side.BOTTOM) if axis is Axis.H else (Side.LEFT, Side.RIGHT)
    return [ArmSegment(axis, side, mark, label) for side in sides for label in coords for mark in marks]


def _corner_states(shape: Shape, coords: Mod3Pair, on_diag: bool) -> Iterator[CellState]:
    blue = BlueSegment(shape, coords, None, on_diag)
    diag = CORNER_DIAGONAL.get(shape)
    diagonal = DiagonalSegment(diag) if diag else None
    options = []
    for d in CORNER_EXTERIOR[shape]:
        if is_low_end(d):
            options.append([ArmEndpoint(d, Mark.LOW)])
        else:
            options.append([ArmEndpoint(d, m) for m in Mark])
    for eps in product(*options):
        s = CellState(blue=blue, diagonal=diagonal, arm_endpoints=frozenset(eps))
        if is_legal_state(s):
            yield s


def iter_candidate_states(coords=ALL_COORDS) -> Iterator[CellState]:
    """Yield states layer by layer in canonical order, legal ones only."""
    h_opts = [None] + _arms(Axis.H, coords)
    v_opts = [None] + _arms(Axis.V, coords)
    for diag in (None, DiagonalSegment(DiagKind.THROUGH)):
        for h in h_opts:
            for v in v_opts:
                yield CellState(diagonal=diag, h_arm=h, v_arm=v)
    for shape, inners in ((Shape.HORIZONTAL, (Dir.N, Dir.S)), (Shape.VERTICAL, (Dir.E, Dir.W))):
        cross_axis = Axis.V if shape is Shape.HORIZONTAL else Axis.H
        for c in coords:
            for inner in inners:
                for on_diag in (False, True):
                    yield CellState(blue=BlueSegment(shape, c, inner, on_diag))
                    for arm in _arms(cross_axis, coords, (Mark.LOW,)):
                        blue = BlueSegment(shape, c, inner, on_diag, cross_axis)
                        s = (
                            CellState(blue=blue, v_arm=arm)
                            if cross_axis is Axis.V
                            else CellState(blue=blue, h_arm=arm)
                        )
                        if is_legal_state(s):
                            yield s
    for shape in (Shape.NE, Shape.NW, Shape.SE, Shape.SW):
        for c in coords:
            for on_diag in (False, True):
                yield from _corner_states(shape, c, on_diag)


@lru_cache(maxsize=None)
def enumerate_alphabet() -> tuple[CellState, ...]:
    """All legal cell states in canonical order; the blank state is first."""
    states = tuple(iter_candidate_states())
    assert states[0] == BLANK
    assert len(set(states)) == len(states)
    return states


@lru_cache(maxsize=None)
def _index() -> dict[CellState, int]:
    return {s: i for i, s in enumerate(enumerate_alphabet())}


def symbol_id(state: CellState) -> int:
    try:
        return _index()[state]
    except KeyError:
        raise UnknownSymbolError(f"state is not in the alphabet: {state}") from None


def state_of(sid: int) -> CellState:
    alphabet = enumerate_alphabet()
    if not 0 <= sid < len(alphabet):
        raise UnknownSymbolError(f"symbol id {sid} out of range [0, {len(alphabet)})")
    return alphabet[int(sid)]


@dataclass
class PatternWindow:
    """A rectangle of symbol ids; ``cells[r, c]`` is the cell at
    ``(origin.x + c, origin.y + r)``, so row 0 is the bottom row."""

    origin: Coord2
    cells: np.ndarray

    def __post_init__(self) -> None:
        self.cells = np.asarray(self.cells, dtype=np.int32)
        if self.cells.ndim != 2 or self.cells.size == 0:
            raise ValueError("window cells must be a non-empty 2-D array")

    @property
    def width(self) -> int:
        return self.cells.shape[1]

    @property
    def height(self) -> int:
        return self.cells.shape[0]

    def sid(self, x: int, y: int) -> int:
        return int(self.cells[y - self.origin.y, x - self.origin.x])

    def state(self, x: int, y: int) -> CellState:
        return state_of(self.sid(x, y))

    def contains(self, x: int, y: int) -> bool:
        return 0 <= x - self.origin.x < self.width and 0 <= y - self.origin.y < self.height

    def sub(self, origin: Coord2, width: int, height: int) -> "PatternWindow":
        dx, dy = origin.x - self.origin.x, origin.y - self.origin.y
        if dx < 0 or dy < 0 or dx + width > self.width or dy + height > self.height:
            raise ValueError("sub-rectangle exceeds the window")
        return PatternWindow(origin, self.cells[dy : dy + height, dx : dx + width].copy())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PatternWindow):
            return NotImplemented
        return self.origin == other.origin and self.cells.shape == other.cells.shape and bool(
            (self.cells == other.cells).all()
        )

    @classmethod
    def from_states(cls, origin: Coord2, rows: list[list[CellState]]) -> "PatternWindow":
        """Build from rows of states, ``rows[0]`` being the bottom row."""
        return cls(origin, [[symbol_id(s) for s in row] for row in rows])

    @classmethod
    def blank(cls, origin: Coord2, width: int, height: int) -> "PatternWindow":
        return cls(origin, np.zeros((height, width), dtype=np.int32))
