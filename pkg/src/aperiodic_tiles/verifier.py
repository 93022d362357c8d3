"""Window verification, blue-structure extraction and lemma checks."""

from __future__ import annotations

from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Literal, Optional

import numpy as np

from .model import (
    CENTER,
    CORNER_EXTERIOR,
    Axis,
    Coord2,
    Dir,
    Mark,
    Mod3Pair,
    PatternWindow,
    Shape,
    enumerate_alphabet,
    state_of,
)
from .rules import TileSet, compile_tileset

Wrap = Literal["open", "torus"]


@dataclass(frozen=True, order=True)
class Violation:
    location: Coord2
    rule: str
    detail: str = ""

    def sort_key(self) -> tuple:
        return (self.location.y, self.location.x, self.rule, self.detail)


def _classify_edge(f_a, f_b, axis: Axis, b_sid: int) -> list[tuple[str, str]]:
    """Name the rules broken by two disagreeing faces on one shared edge."""
    out = []
    suffix = "h" if axis is Axis.H else "v"
    blue_a, arm_a = f_a
    blue_b, arm_b = f_b
    if blue_a != blue_b:
        if blue_a is None or blue_b is None:
            out.append((f"blue-continuity-{suffix}", "blue line interrupted"))
        elif blue_a[0] != blue_b[0]:
            out.append(("coord-mismatch", f"blue coordinates {blue_a[0]} vs {blue_b[0]}"))
        elif blue_a[1] != blue_b[1]:
            out.append(("blue-inner-side", "inner side changes along a line"))
        else:
            out.append(("blue-diagonal-flag", "diagonal pass-through flag changes along a line"))
    if arm_a != arm_b:
        if arm_a is None or arm_b is None:
            out.append((f"arm-continuity-{suffix}", "arm interrupted"))
        elif arm_a[1] != arm_b[1]:
            out.append(("coord-mismatch", f"arm label {arm_a[1]} vs {arm_b[1]}"))
        elif arm_a[0] != arm_b[0]:
            out.append(("arm-side-mismatch", f"arm side {arm_a[0].value} vs {arm_b[0].value}"))
        elif arm_a[2] is Mark.HIGH:
            out.append(("arm-mark-monotone", "fromHigh followed by fromLow"))
        elif state_of(b_sid).is_corner:
            out.append(("mustcross-missing", "arm reaches a corner that requires a crossing"))
        else:
            out.append(("arm-mark-monotone", "orientation flips without a crossing"))
    return out


def _neighbours(c: np.ndarray, wrap: Wrap):
    """Pairs of aligned arrays: (left, right), (bottom, top) and the four
    cells of each 2x2 block, plus anchor index grids."""
    if wrap == "torus":
        right = np.roll(c, -1, axis=1)
        up = np.roll(c, -1, axis=0)
        upright = np.roll(up, -1, axis=1)
        return (c, right), (c, up), (c, right, up, upright)
    return (
        (c[:, :-1], c[:, 1:]),
        (c[:-1, :], c[1:, :]),
        (c[:-1, :-1], c[:-1, 1:], c[1:, :-1], c[1:, 1:]),
    )


def _verify_rows(window: PatternWindow, tileset: TileSet, wrap: Wrap, r0: int, r1: int) -> list[Violation]:
    """Violations whose anchor row lies in ``[r0, r1)``."""
    t = tileset.tables
    c = window.cells
    h, w = c.shape
    ox, oy = window.origin.x, window.origin.y
    (hl, hr), (vb, vt), (sw, se, nw, ne) = _neighbours(c, wrap)
    out: list[Violation] = []

    def loc(r, col):
        return Coord2(ox + int(col), oy + int(r))

    member = tileset.member
    bad = ~member[c[r0:r1]]
    for r, col in np.argwhere(bad):
        out.append(Violation(loc(r + r0, col), "symbol-not-in-alphabet", f"symbol {int(c[r + r0, col])}"))

    def rows(a):
        return a[r0 : min(r1, a.shape[0])]

    left, right = rows(hl), rows(hr)
    for r, col in np.argwhere(t.east[left] != t.west[right]):
        a, b = int(left[r, col]), int(right[r, col])
        for rule, detail in _classify_edge(t.v_faces[t.east[a]], t.v_faces[t.west[b]], Axis.H, b):
            out.append(Violation(loc(r + r0, col), rule, detail))

    bottom, top = rows(vb), rows(vt)
    for r, col in np.argwhere(t.north[bottom] != t.south[top]):
        a, b = int(bottom[r, col]), int(top[r, col])
        for rule, detail in _classify_edge(t.h_faces[t.north[a]], t.h_faces[t.south[b]], Axis.V, b):
            out.append(Violation(loc(r + r0, col), rule, detail))

    bsw, bse, bnw, bne = rows(sw), rows(se), rows(nw), rows(ne)
    for r, col in np.argwhere(t.se[bnw] != t.nw[bse]):
        out.append(Violation(loc(r + r0, col), "diagonal-step", "diagonal line interrupted"))
    if tileset.angle_rule:
        any_corner = t.corner[bsw] | t.corner[bse] | t.corner[bnw] | t.corner[bne]
        for r, col in np.argwhere(~any_corner):
            out.append(Violation(loc(r + r0, col), "angle-2x2", "2x2 block without a blue corner"))
    return out


def verify(
    window: PatternWindow,
    tileset: Optional[TileSet] = None,
    wrap: Wrap = "open",
    threads: int = 1,
) -> list[Violation]:
    """All rule violations in ``window``, sorted row-major then by rule.

    With ``wrap="open"`` only dominoes and 2x2 blocks fully inside the
    window are checked; ``"torus"`` wraps both directions.
    """
    tileset = tileset or compile_tileset()
    h = window.height
    if threads <= 1 or h < 2 * threads:
        found = _verify_rows(window, tileset, wrap, 0, h)
    else:
        bounds = np.linspace(0, h, threads + 1).astype(int)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = pool.map(
                lambda ab: _verify_rows(window, tileset, wrap, ab[0], ab[1]), zip(bounds[:-1], bounds[1:])
            )
            found = [v for part in parts for v in part]
    return sorted(set(found), key=Violation.sort_key)


def is_valid(window: PatternWindow, tileset: Optional[TileSet] = None, wrap: Wrap = "open") -> bool:
    return not verify(window, tileset, wrap)


def block_legality(blocks: np.ndarray, tileset: TileSet) -> np.ndarray:
    """Per-block legality of an ``(..., 4)`` array of ``(sw, se, nw, ne)``."""
    t = tileset.tables
    sw, se, nw, ne = (blocks[..., i] for i in range(4))
    ok = (
        (t.east[sw] == t.west[se])
        & (t.east[nw] == t.west[ne])
        & (t.north[sw] == t.south[nw])
        & (t.north[se] == t.south[ne])
        & (t.se[nw] == t.nw[se])
    )
    member = tileset.member
    ok &= member[sw] & member[se] & member[nw] & member[ne]
    if tileset.angle_rule:
        ok &= t.corner[sw] | t.corner[se] | t.corner[nw] | t.corner[ne]
    return ok


# -- structure extraction ---------------------------------------------------


@dataclass
class ArmRecord:
    start: Coord2  # corner cell the arm leaves
    direction: Dir
    cells: list[Coord2]
    crossings: list[Coord2]
    end: Optional[Coord2]  # corner cell reached, None when the arm leaves the window
    interrupted: bool = False

    @property
    def visible(self) -> bool:
        return self.end is not None


@dataclass
class SquareRecord:
    anchor: Coord2  # south-west corner cell (lowest cell when truncated)
    side: Optional[int]
    coords: Mod3Pair
    on_diagonal: bool = False
    boundary_truncated: bool = False
    anomaly: Optional[str] = None
    arms: dict[str, Optional[ArmRecord]] = field(default_factory=dict)
    neighbors: dict[str, Optional[Coord2]] = field(default_factory=dict)
    cells: list[Coord2] = field(default_factory=list, repr=False)

    @property
    def closed(self) -> bool:
        return not self.boundary_truncated and self.anomaly is None

    @property
    def arm_crossings(self) -> dict[str, Optional[int]]:
        return {k: (len(a.crossings) if a and a.visible else None) for k, a in self.arms.items()}

    def corner(self, shape: Shape) -> Coord2:
        x, y, s = self.anchor.x, self.anchor.y, self.side
        return {
            Shape.SW: Coord2(x, y),
            Shape.SE: Coord2(x + s, y),
            Shape.NW: Coord2(x, y + s),
            Shape.NE: Coord2(x + s, y + s),
        }[shape]

    def contains(self, other: "SquareRecord") -> bool:
        """Strict geometric containment of another square's cells."""
        return (
            self.anchor.x < other.anchor.x
            and self.anchor.y < other.anchor.y
            and other.anchor.x + other.side < self.anchor.x + self.side
            and other.anchor.y + other.side < self.anchor.y + self.side
        )


_EXITS = {
    Shape.HORIZONTAL: (Dir.E, Dir.W),
    Shape.VERTICAL: (Dir.N, Dir.S),
    Shape.NW: (Dir.E, Dir.S),
    Shape.NE: (Dir.W, Dir.S),
    Shape.SW: (Dir.E, Dir.N),
    Shape.SE: (Dir.W, Dir.N),
}


class Structure:
    """Blue components and arms of a window, with lookups by cell."""

    def __init__(self, window: PatternWindow):
        self.window = window
        alphabet = enumerate_alphabet()
        self.grid = window.cells.tolist()
        self._alphabet = alphabet
        self.squares: list[SquareRecord] = []
        self.component_of: dict[Coord2, int] = {}
        self._extract()
        self._trace_arms()

    def state(self, p: Coord2):
        return self._alphabet[self.grid[p.y - self.window.origin.y][p.x - self.window.origin.x]]

    def _extract(self) -> None:
        w = self.window
        for r in range(w.height):
            for c in range(w.width):
                p = Coord2(w.origin.x + c, w.origin.y + r)
                if p in self.component_of or self.state(p).blue is None:
                    continue
                self._component(p)

    def _component(self, start: Coord2) -> None:
        w = self.window
        idx = len(self.squares)
        cells: list[Coord2] = []
        corners: dict[Shape, list[Coord2]] = {}
        truncated = False
        broken = False
        queue = deque([start])
        self.component_of[start] = idx
        while queue:
            p = queue.popleft()
            cells.append(p)
            b = self.state(p).blue
            if b.shape.is_corner:
                corners.setdefault(b.shape, []).append(p)
            for d in _EXITS[b.shape]:
                dx, dy = d.delta
                q = Coord2(p.x + dx, p.y + dy)
                if not w.contains(q.x, q.y):
                    truncated = True
                    continue
                nb = self.state(q).blue
                if nb is None or d.opposite not in _EXITS[nb.shape]:
                    broken = True
                    continue
                if q not in self.component_of:
                    self.component_of[q] = idx
                    queue.append(q)
        b0 = self.state(start).blue
        coords = b0.coords
        rec = SquareRecord(
            anchor=min(cells, key=lambda q: (q.y, q.x)),
            side=None,
            coords=coords,
            on_diagonal=b0.on_diagonal,
            boundary_truncated=truncated,
            cells=cells,
        )
        if broken:
            rec.anomaly = "interrupted blue line"
        elif not truncated:
            shapes = {s: len(v) for s, v in corners.items()}
            if shapes != {Shape.NW: 1, Shape.NE: 1, Shape.SW: 1, Shape.SE: 1}:
                rec.anomaly = f"closed path with corners {sorted((s.value, n) for s, n in shapes.items())}"
            else:
                sw, ne = corners[Shape.SW][0], corners[Shape.NE][0]
                width, height = ne.x - sw.x, ne.y - sw.y
                rec.anchor = sw
                if width != height:
                    rec.anomaly = f"closed path is a {width}x{height} rectangle"
                else:
                    rec.side = width
        self.squares.append(rec)

    def square_at(self, p: Coord2) -> Optional[SquareRecord]:
        i = self.component_of.get(p)
        return None if i is None else self.squares[i]

    def _trace(self, start: Coord2, d: Dir) -> ArmRecord:
        w = self.window
        dx, dy = d.delta
        axis_h = d in (Dir.E, Dir.W)
        cells, crossings = [], []
        p = Coord2(start.x + dx, start.y + dy)
        while w.contains(p.x, p.y):
            s = self.state(p)
            if s.is_corner:
                return ArmRecord(start, d, cells, crossings, p)
            arm = s.h_arm if axis_h else s.v_arm
            if arm is None:
                return ArmRecord(start, d, cells, crossings, None, interrupted=True)
            cells.append(p)
            if s.blue is not None:
                crossings.append(p)
            p = Coord2(p.x + dx, p.y + dy)
        return ArmRecord(start, d, cells, crossings, None)

    def _trace_arms(self) -> None:
        for sq in self.squares:
            if not sq.closed:
                continue
            for shape in (Shape.NE, Shape.NW, Shape.SW, Shape.SE):
                corner = sq.corner(shape)
                for d in CORNER_EXTERIOR[shape]:
                    sq.arms[f"{shape.value[-2:]}-{d.value}"] = self._trace(corner, d)
            for d in Dir:
                ends = [a.end for k, a in sq.arms.items() if k.endswith(d.value)]
                targets = {self.square_at(e).anchor if e and self.square_at(e) else None for e in ends}
                sq.neighbors[d.value] = targets.pop() if len(targets) == 1 else None


def extract_blue_paths(window: PatternWindow) -> list[SquareRecord]:
    """Blue components of ``window`` in row-major order of their lowest cell."""
    return Structure(window).squares


# -- lemma checks ----------------------------------------------------------

Status = Literal["pass", "fail", "not-applicable"]

LEMMAS = (
    "sizeEquality",
    "fourNeighbors",
    "atMostOneCrossing",
    "oneOneExactlyOne",
    "containment",
    "angleDensity",
    "diagonalAlignment",
)


@dataclass
class LemmaResult:
    status: Status
    checked: int = 0
    counterexamples: list[Coord2] = field(default_factory=list)


@dataclass
class LemmaReport:
    results: dict[str, LemmaResult]
    squares: list[SquareRecord]
    containment_witness: dict[Coord2, Coord2] = field(default_factory=dict)

    @property
    def all_pass(self) -> bool:
        return all(r.status == "pass" for r in self.results.values())


def _result(checked: int, bad: list[Coord2]) -> LemmaResult:
    if checked == 0:
        return LemmaResult("not-applicable")
    return LemmaResult("fail" if bad else "pass", checked, sorted(set(bad), key=lambda p: (p.y, p.x)))


def check_lemmas(window: PatternWindow, structure: Optional[Structure] = None) -> LemmaReport:
    st = structure or Structure(window)
    squares = [s for s in st.squares if s.closed]
    results: dict[str, LemmaResult] = {}

    # (a) neighbours have equal sides
    checked, bad = 0, []
    for sq in squares:
        for arm in sq.arms.values():
            other = st.square_at(arm.end) if arm.visible else None
            if other is None or not other.closed:
                continue
            checked += 1
            if other.side != sq.side:
                bad.append(arm.start)
    results["sizeEquality"] = _result(checked, bad)

    # (b) four neighbours, two arms each
    checked, bad = 0, []
    for sq in squares:
        ends = [st.square_at(a.end) if a.visible else None for a in sq.arms.values()]
        if len(sq.arms) != 8 or any(e is None or not e.closed for e in ends):
            continue
        checked += 1
        distinct = {sq.neighbors.get(d.value) for d in Dir}
        if None in distinct or len(distinct) != 4:
            bad.append(sq.anchor)
    results["fourNeighbors"] = _result(checked, bad)

    # (c) crossings per arm; (1,1) arms crossed once, inner side toward the (1,1) square
    checked, bad = 0, []
    checked11, bad11 = 0, []
    for sq in squares:
        for arm in sq.arms.values():
            if not arm.visible:
                continue
            checked += 1
            if len(arm.crossings) > 1:
                bad.append(arm.start)
            other = st.square_at(arm.end)
            ends = [sq] + ([other] if other is not None else [])
            if not any(e.coords == CENTER for e in ends):
                continue
            checked11 += 1
            if len(arm.crossings) != 1:
                bad11.append(arm.start)
                continue
            inner = st.state(arm.crossings[0]).blue.inner
            toward_start = arm.direction.opposite
            want = toward_start if sq.coords == CENTER else arm.direction
            if inner is not want:
                bad11.append(arm.start)
    results["atMostOneCrossing"] = _result(checked, bad)
    results["oneOneExactlyOne"] = _result(checked11, bad11)

    # (d) every (1,1) square sits inside a larger one
    checked, bad = 0, []
    witness: dict[Coord2, Coord2] = {}
    for sq in squares:
        if sq.coords != CENTER:
            continue
        enclosing = []
        for key in ("NE-E", "NE-N"):
            arm = sq.arms.get(key)
            if arm is None or len(arm.crossings) != 1:
                enclosing.append(None)
                continue
            enclosing.append(st.square_at(arm.crossings[0]))
        if any(e is None or not e.closed for e in enclosing):
            continue
        checked += 1
        big = enclosing[0]
        if enclosing[1] is not big or not big.contains(sq) or big.side <= sq.side:
            bad.append(sq.anchor)
        else:
            witness[sq.anchor] = big.anchor
    results["containment"] = _result(checked, bad)

    # (e) every 2x2 block holds a corner
    t = compile_tileset().tables
    cor = t.corner[window.cells]
    if window.width >= 2 and window.height >= 2:
        ok = cor[:-1, :-1] | cor[:-1, 1:] | cor[1:, :-1] | cor[1:, 1:]
        bad = [Coord2(window.origin.x + int(c), window.origin.y + int(r)) for r, c in np.argwhere(~ok)]
        results["angleDensity"] = _result(int(ok.size), bad)
    else:
        results["angleDensity"] = LemmaResult("not-applicable")

    # (f) squares meeting a larger square's diagonal are aligned with it
    results["diagonalAlignment"] = _diagonal_alignment(st, squares)
    return LemmaReport(results, st.squares, witness)


def _diagonal_alignment(st: Structure, squares: list[SquareRecord]) -> LemmaResult:
    if not squares:
        return LemmaResult("not-applicable")
    ax = np.array([s.anchor.x for s in squares])
    ay = np.array([s.anchor.y for s in squares])
    side = np.array([s.side for s in squares])
    checked, bad = 0, []
    for big in squares:
        if big.side < 2:
            continue
        X, Y, S = big.anchor.x, big.anchor.y, big.side
        inside = (ax > X) & (ay > Y) & (ax + side < X + S) & (ay + side < Y + S)
        diag = X + Y + S
        lo, hi = ax + ay, ax + ay + 2 * side
        meets = inside & (lo <= diag) & (diag <= hi)
        for i in np.flatnonzero(meets):
            checked += 1
            if lo[i] + side[i] != diag:
                bad.append(squares[i].anchor)
        # the diagonal itself may only pass through-cells and UL/LR corners
        for t in range(1, S):
            p = Coord2(X + t, Y + S - t)
            s = st.state(p)
            checked += 1
            if s.blue is not None and not (s.blue.shape in (Shape.NW, Shape.SE) and s.blue.on_diagonal):
                bad.append(p)
            elif s.blue is None and s.diagonal is None:
                bad.append(p)
    return _result(checked, bad)


# -- mutation harness ------------------------------------------------------


@dataclass
class MutationReport:
    samples: int
    caught: int
    silent: list[tuple[Coord2, int, int]]  # (cell, original symbol, replacement)


def mutate_check(
    window: PatternWindow,
    samples: int,
    seed: int,
    tileset: Optional[TileSet] = None,
) -> MutationReport:
    """Replace single interior cells with random other symbols and confirm
    every change is rejected."""
    tileset = tileset or compile_tileset()
    if samples < 1:
        raise ValueError("samples must be positive")
    if window.width < 3 or window.height < 3:
        raise ValueError("mutation testing needs interior cells (window at least 3x3)")
    rng = np.random.default_rng(seed)
    n = len(tileset.symbols)
    symbols = np.asarray(tileset.symbols)
    caught, silent = 0, []
    cells = window.cells.copy()
    for _ in range(samples):
        r = int(rng.integers(1, window.height - 1))
        c = int(rng.integers(1, window.width - 1))
        original = int(cells[r, c])
        pos = int(np.searchsorted(symbols, original))
        k = int(rng.integers(0, n - 1))
        if k >= pos:
            k += 1
        replacement = int(symbols[k])
        # only dominoes and blocks touching (r, c) can change
        r0, c0 = r - 1, c - 1
        local = cells[r0 : r + 2, c0 : c + 2].copy()
        local[1, 1] = replacement
        found = verify(PatternWindow(Coord2(window.origin.x + c0, window.origin.y + r0), local), tileset)
        if found:
            caught += 1
        else:
            silent.append((Coord2(window.origin.x + c, window.origin.y + r), original, replacement))
    return MutationReport(samples, caught, silent)
