"""Adjacency rules, the compiled tile set, block recoding and Wang tiles.

Every rule is local. A cell exposes, on each of its four edges, a *face*:
the blue line crossing that edge (coordinates, inner side, diagonal flag)
and the arm crossing it (side type, label, orientation). Two neighbours are
compatible exactly when the faces on their shared edge agree. The remaining
rules look at 2x2 blocks: the diagonal line must step from the north-west
cell to the south-east cell, and every block must hold a blue corner.
"""

from __future__ import annotations

import base64
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Optional

import numpy as np

from .model import (
    BLANK,
    CORNER_EXITS,
    CORNER_INNER,
    Axis,
    CellState,
    Coord2,
    DiagKind,
    Dir,
    Mark,
    PatternWindow,
    Shape,
    endpoint_side,
    enumerate_alphabet,
    is_low_end,
    state_of,
)

FORMAT_VERSION = "aperiodic-tileset/1"


def _blue_exits(s: CellState) -> tuple[Dir, ...]:
    b = s.blue
    if b is None:
        return ()
    if b.shape is Shape.HORIZONTAL:
        return (Dir.E, Dir.W)
    if b.shape is Shape.VERTICAL:
        return (Dir.N, Dir.S)
    return CORNER_EXITS[b.shape]


def _blue_inner(s: CellState, d: Dir) -> Dir:
    b = s.blue
    if not b.shape.is_corner:
        return b.inner
    h_inner, v_inner = CORNER_INNER[b.shape]
    return h_inner if d in (Dir.E, Dir.W) else v_inner


def face(s: CellState, d: Dir) -> tuple:
    """What crosses the edge of ``s`` on side ``d``: ``(blue, arm)``."""
    blue = None
    if d in _blue_exits(s):
        blue = (s.blue.coords, _blue_inner(s, d), s.blue.on_diagonal)

    arm = None
    horizontal = d in (Dir.E, Dir.W)
    seg = s.h_arm if horizontal else s.v_arm
    if seg is not None:
        mark = seg.mark
        # a crossing cell is where the orientation flips
        if s.blue is not None and d in (Dir.E, Dir.N):
            mark = Mark.HIGH
        arm = (seg.side, seg.label, mark)
    else:
        ep = s.endpoint(d)
        if ep is not None:
            axis = Axis.H if horizontal else Axis.V
            label = s.blue.coords if is_low_end(d) else s.blue.coords.step(axis, -1)
            arm = (endpoint_side(s.blue.shape, d), label, ep.mark)
    return (blue, arm)


def nw_exit(s: CellState) -> bool:
    """Whether a diagonal line leaves ``s`` toward its north-west neighbour."""
    if s.diagonal is None:
        return False
    if s.diagonal.kind is DiagKind.UL:
        return s.blue.on_diagonal
    return True


def se_exit(s: CellState) -> bool:
    if s.diagonal is None:
        return False
    if s.diagonal.kind is DiagKind.LR:
        return s.blue.on_diagonal
    return True


def h_compatible(left: CellState, right: CellState) -> bool:
    return face(left, Dir.E) == face(right, Dir.W)


def v_compatible(bottom: CellState, top: CellState) -> bool:
    return face(bottom, Dir.N) == face(top, Dir.S)


def diagonal_compatible(nw: CellState, se: CellState) -> bool:
    """The diagonal step inside a 2x2 block, north-west cell to south-east cell."""
    return se_exit(nw) == nw_exit(se)


def angle_ok(*block: CellState) -> bool:
    return any(s.is_corner for s in block)


def block_ok(sw: CellState, se: CellState, nw: CellState, ne: CellState, angle_rule: bool = True) -> bool:
    """All rules that a 2x2 block must satisfy, edges included."""
    return (
        h_compatible(sw, se)
        and h_compatible(nw, ne)
        and v_compatible(sw, nw)
        and v_compatible(se, ne)
        and diagonal_compatible(nw, se)
        and (not angle_rule or angle_ok(sw, se, nw, ne))
    )


@dataclass(frozen=True)
class FaceTables:
    """Per-symbol face ids over the full alphabet, for vectorised checks."""

    east: np.ndarray
    west: np.ndarray
    north: np.ndarray
    south: np.ndarray
    nw: np.ndarray
    se: np.ndarray
    corner: np.ndarray
    v_faces: tuple  # faces on vertical edges (east/west), indexed by id
    h_faces: tuple  # faces on horizontal edges (north/south)


@lru_cache(maxsize=None)
def face_tables() -> FaceTables:
    alphabet = enumerate_alphabet()
    v_ids: dict[tuple, int] = {}
    h_ids: dict[tuple, int] = {}

    def fid(table, f):
        return table.setdefault(f, len(table))

    n = len(alphabet)
    cols = {k: np.empty(n, dtype=np.int32) for k in ("east", "west", "north", "south")}
    for i, s in enumerate(alphabet):
        cols["east"][i] = fid(v_ids, face(s, Dir.E))
        cols["west"][i] = fid(v_ids, face(s, Dir.W))
        cols["north"][i] = fid(h_ids, face(s, Dir.N))
        cols["south"][i] = fid(h_ids, face(s, Dir.S))
    nw = np.array([nw_exit(s) for s in alphabet], dtype=bool)
    se = np.array([se_exit(s) for s in alphabet], dtype=bool)
    corner = np.array([s.is_corner for s in alphabet], dtype=bool)
    for a in (*cols.values(), nw, se, corner):
        a.setflags(write=False)
    return FaceTables(
        nw=nw,
        se=se,
        corner=corner,
        v_faces=tuple(v_ids),
        h_faces=tuple(h_ids),
        **cols,
    )


@dataclass(frozen=True)
class TileSet:
    """The alphabet together with its local rules.

    ``symbols`` lists the ids in use (the full alphabet by default); reduced
    tile sets share ids with the full one. ``angle_rule=False`` drops the
    2x2 blue-corner requirement and exists for testing the search machinery.
    """

    symbols: tuple[int, ...]
    angle_rule: bool = True
    version: str = FORMAT_VERSION
    tables: FaceTables = field(default_factory=face_tables, repr=False, compare=False)

    @property
    def alphabet(self) -> tuple[CellState, ...]:
        full = enumerate_alphabet()
        return tuple(full[i] for i in self.symbols)

    def __len__(self) -> int:
        return len(self.symbols)

    @property
    def member(self) -> np.ndarray:
        m = np.zeros(len(self.tables.east), dtype=bool)
        m[list(self.symbols)] = True
        return m

    def h_allowed(self, left: int, right: int) -> bool:
        t = self.tables
        return bool(t.east[left] == t.west[right])

    def v_allowed(self, bottom: int, top: int) -> bool:
        t = self.tables
        return bool(t.north[bottom] == t.south[top])

    def diag_allowed(self, nw: int, se: int) -> bool:
        t = self.tables
        return bool(t.se[nw] == t.nw[se])

    def angle_allowed(self, sw: int, se: int, nw: int, ne: int) -> bool:
        if not self.angle_rule:
            return True
        return bool(self.tables.corner[[sw, se, nw, ne]].any())

    def block_allowed(self, sw: int, se: int, nw: int, ne: int) -> bool:
        return (
            self.h_allowed(sw, se)
            and self.h_allowed(nw, ne)
            and self.v_allowed(sw, nw)
            and self.v_allowed(se, ne)
            and self.diag_allowed(nw, se)
            and self.angle_allowed(sw, se, nw, ne)
        )

    def allowed_pairs(self, axis: Axis) -> np.ndarray:
        """Boolean matrix over ``symbols``: entry ``[i, j]`` is true when
        ``symbols[j]`` may sit right of (above) ``symbols[i]``."""
        ids = np.asarray(self.symbols)
        t = self.tables
        if axis is Axis.H:
            return t.east[ids][:, None] == t.west[ids][None, :]
        return t.north[ids][:, None] == t.south[ids][None, :]

    def forbidden_pairs(self, axis: Axis) -> np.ndarray:
        """The forbidden dominoes as rows ``(left, right)`` or
        ``(bottom, top)`` of symbol ids."""
        ids = np.asarray(self.symbols)
        return ids[np.argwhere(~self.allowed_pairs(axis))]

    def restrict(self, symbols: Iterable[int], angle_rule: Optional[bool] = None) -> "TileSet":
        return TileSet(
            tuple(sorted(set(int(s) for s in symbols))),
            self.angle_rule if angle_rule is None else angle_rule,
        )

    def to_json(self, include_blocks: bool = False) -> dict:
        alphabet = self.alphabet
        from .fileio import encode_state

        def bitsets(m: np.ndarray) -> list[str]:
            return [base64.b64encode(np.packbits(row).tobytes()).decode("ascii") for row in m]

        out = {
            "version": self.version,
            "size": len(self.symbols),
            "angleRule": self.angle_rule,
            "symbols": [{"id": i, "state": encode_state(s)} for i, s in zip(self.symbols, alphabet)],
            "allowedHorizontal": bitsets(self.allowed_pairs(Axis.H)),
            "allowedVertical": bitsets(self.allowed_pairs(Axis.V)),
            "allowedPairCounts": {
                "horizontal": int(self.allowed_pairs(Axis.H).sum()),
                "vertical": int(self.allowed_pairs(Axis.V).sum()),
            },
        }
        if include_blocks:
            out["blockCount"] = block_count(self)
        return out


@lru_cache(maxsize=None)
def compile_tileset() -> TileSet:
    return TileSet(tuple(range(len(enumerate_alphabet()))))


# -- 2x2 blocks ------------------------------------------------------------


def _join(left: np.ndarray, right: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Equi-join on integer keys: all ``(i, j)`` with ``left[i] == right[j]``,
    ordered by ``i`` then ``j``."""
    order = np.argsort(right, kind="stable")
    sorted_right = right[order]
    lo = np.searchsorted(sorted_right, left, side="left")
    hi = np.searchsorted(sorted_right, left, side="right")
    counts = hi - lo
    i = np.repeat(np.arange(len(left)), counts)
    offset = np.arange(len(i)) - np.repeat(np.cumsum(counts) - counts, counts)
    j = order[np.repeat(lo, counts) + offset]
    return i, j


def enumerate_blocks(tileset: TileSet) -> np.ndarray:
    """Every legal 2x2 block as rows ``(sw, se, nw, ne)`` of symbol ids,
    sorted lexicographically."""
    t = tileset.tables
    ids = np.asarray(tileset.symbols, dtype=np.int64)
    k = len(t.v_faces) + len(t.h_faces) + 1
    a, b = _join(t.east[ids], t.west[ids])
    sw, se = ids[a], ids[b]
    p, c = _join(t.north[sw], t.south[ids])
    sw, se, nw = sw[p], se[p], ids[c]
    keep = t.se[nw] == t.nw[se]
    sw, se, nw = sw[keep], se[keep], nw[keep]
    q, d = _join(t.east[nw].astype(np.int64) * k + t.north[se], t.west[ids].astype(np.int64) * k + t.south[ids])
    sw, se, nw, ne = sw[q], se[q], nw[q], ids[d]
    if tileset.angle_rule:
        keep = t.corner[sw] | t.corner[se] | t.corner[nw] | t.corner[ne]
        sw, se, nw, ne = sw[keep], se[keep], nw[keep], ne[keep]
    out = np.stack([sw, se, nw, ne], axis=1).astype(np.int32)
    return out[np.lexsort(out.T[::-1])]


def block_count(tileset: TileSet) -> int:
    """Number of legal 2x2 blocks, counted over face classes without
    listing the blocks."""
    t = tileset.tables
    ids = np.asarray(tileset.symbols)
    nv, nh = len(t.v_faces), len(t.h_faces)

    def counts(only_plain: bool):
        sel = ids[~t.corner[ids]] if only_plain else ids
        sw = np.zeros((nv, nh))
        np.add.at(sw, (t.east[sel], t.north[sel]), 1)
        se = np.zeros((nv, nh, 2))
        np.add.at(se, (t.west[sel], t.north[sel], t.nw[sel].astype(int)), 1)
        nw = np.zeros((nh, nv, 2))
        np.add.at(nw, (t.south[sel], t.east[sel], t.se[sel].astype(int)), 1)
        ne = np.zeros((nv, nh))
        np.add.at(ne, (t.west[sel], t.south[sel]), 1)
        # sw(e1,n1) se(e1,n2,d) nw(n1,e3,d) ne(e3,n2)
        return np.einsum("ab,acd,bed,ec->", sw, se, nw, ne, optimize=True)

    total = counts(False)
    if tileset.angle_rule:
        total -= counts(True)
    return int(round(float(total)))


class WindowTooSmall(ValueError):
    pass


class IllegalBlock(ValueError):
    def __init__(self, location: Coord2):
        super().__init__(f"2x2 block at {location.x},{location.y} is not in the block alphabet")
        self.location = location


@dataclass
class BlockWindow:
    """A window over the 2x2-block alphabet. ``blocks[r, c]`` holds the
    symbol ids ``(sw, se, nw, ne)`` of the block whose south-west cell is
    ``(origin.x + c, origin.y + r)`` in the source window."""

    origin: Coord2
    blocks: np.ndarray  # shape (h, w, 4)

    @property
    def width(self) -> int:
        return self.blocks.shape[1]

    @property
    def height(self) -> int:
        return self.blocks.shape[0]

    def project(self, corner: str = "sw") -> PatternWindow:
        """The source cells at one corner of every block."""
        k = ("sw", "se", "nw", "ne").index(corner)
        shift = Coord2(k % 2, k // 2)
        return PatternWindow(self.origin + shift, self.blocks[:, :, k])


def block_recode(window: PatternWindow, tileset: Optional[TileSet] = None) -> BlockWindow:
    """Higher-block recoding: one output cell per 2x2 block of ``window``.

    Raises :class:`IllegalBlock` when a block breaks a rule, since such a
    block has no letter in the block alphabet.
    """
    tileset = tileset or compile_tileset()
    if window.width < 2 or window.height < 2:
        raise WindowTooSmall("block recoding needs a window of at least 2x2 cells")
    c = window.cells
    blocks = np.stack([c[:-1, :-1], c[:-1, 1:], c[1:, :-1], c[1:, 1:]], axis=-1)
    from .verifier import block_legality

    ok = block_legality(blocks, tileset)
    if not ok.all():
        r, col = np.argwhere(~ok)[0]
        raise IllegalBlock(Coord2(window.origin.x + int(col), window.origin.y + int(r)))
    return BlockWindow(window.origin, blocks)


def domino_violations(bw: BlockWindow) -> list[Coord2]:
    """Pure nearest-neighbour check on a block window: horizontally adjacent
    blocks must share their overlapping column, vertically adjacent blocks
    their overlapping row. Returns offending anchors."""
    b = bw.blocks
    bad: list[Coord2] = []
    h_bad = (b[:, :-1, 1] != b[:, 1:, 0]) | (b[:, :-1, 3] != b[:, 1:, 2])
    v_bad = (b[:-1, :, 2] != b[1:, :, 0]) | (b[:-1, :, 3] != b[1:, :, 1])
    for r, c in np.argwhere(h_bad):
        bad.append(Coord2(bw.origin.x + int(c), bw.origin.y + int(r)))
    for r, c in np.argwhere(v_bad):
        bad.append(Coord2(bw.origin.x + int(c), bw.origin.y + int(r)))
    return sorted(bad, key=lambda p: (p.y, p.x))


# -- Wang tiles ------------------------------------------------------------


@dataclass
class WangTileSet:
    """Wang tiles with edge colours ``(north, east, south, west)``.

    Vertical edges are coloured by the pair of symbols in the shared block
    column, horizontal edges by the pair in the shared block row, so two
    tiles match exactly when their blocks overlap consistently.
    """

    tiles: np.ndarray  # (n, 4) colour ids
    blocks: np.ndarray  # (n, 4) source blocks (sw, se, nw, ne)
    v_colors: dict  # (bottom, top) symbol pair -> colour id on east/west edges
    h_colors: dict  # (left, right) symbol pair -> colour id on north/south edges

    @property
    def colors(self) -> dict[str, int]:
        return {"vertical-edges": len(self.v_colors), "horizontal-edges": len(self.h_colors)}

    def __len__(self) -> int:
        return len(self.tiles)

    def tile_of(self, block: tuple[int, int, int, int]) -> tuple[int, int, int, int]:
        sw, se, nw, ne = block
        return (
            self.h_colors[(nw, ne)],
            self.v_colors[(se, ne)],
            self.h_colors[(sw, se)],
            self.v_colors[(sw, nw)],
        )


def to_wang(tileset: Optional[TileSet] = None) -> WangTileSet:
    tileset = tileset or compile_tileset()
    blocks = enumerate_blocks(tileset)
    v_colors: dict[tuple[int, int], int] = {}
    h_colors: dict[tuple[int, int], int] = {}
    tiles = np.empty_like(blocks)
    for k, (sw, se, nw, ne) in enumerate(blocks.tolist()):
        tiles[k] = (
            h_colors.setdefault((nw, ne), len(h_colors)),
            v_colors.setdefault((se, ne), len(v_colors)),
            h_colors.setdefault((sw, se), len(h_colors)),
            v_colors.setdefault((sw, nw), len(v_colors)),
        )
    return WangTileSet(tiles, blocks, v_colors, h_colors)


def wang_window(bw: BlockWindow) -> np.ndarray:
    """Edge colours of every block in ``bw`` as an ``(h, w, 4)`` array of
    ``(north, east, south, west)`` colour keys (packed symbol pairs)."""
    b = bw.blocks.astype(np.int64)
    n = len(enumerate_alphabet())

    def pair(a, c):
        return a * n + c

    sw, se, nw, ne = b[..., 0], b[..., 1], b[..., 2], b[..., 3]
    return np.stack([pair(nw, ne), pair(se, ne), pair(sw, se), pair(sw, nw)], axis=-1)


def wang_mismatches(colors: np.ndarray) -> int:
    """Count unequal shared edges in an ``(h, w, 4)`` Wang colour grid."""
    h = int((colors[:, :-1, 1] != colors[:, 1:, 3]).sum())
    v = int((colors[:-1, :, 0] != colors[1:, :, 2]).sum())
    return h + v
