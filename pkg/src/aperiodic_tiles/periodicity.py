"""Exhaustive search for periodic tilings, and axis-aligned periods.

Any valid tiling of a ``w x h`` torus unrolls to a bi-periodic tiling of
the plane, so refuting every small torus is a finite, machine-checkable
piece of evidence that the rules admit no periodic configuration.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Literal, Optional

import numpy as np

from .model import Coord2, PatternWindow
from .rules import TileSet, compile_tileset

Outcome = Literal["sat", "unsat", "timeout"]


@dataclass
class SearchStats:
    nodes: int = 0
    max_depth: int = 0
    prunes: int = 0
    wall_time: float = 0.0

    def merge(self, other: "SearchStats") -> None:
        self.nodes += other.nodes
        self.max_depth = max(self.max_depth, other.max_depth)
        self.prunes += other.prunes

    def as_dict(self, with_time: bool = True) -> dict:
        d = {"nodes": self.nodes, "maxDepth": self.max_depth, "prunes": self.prunes}
        if with_time:
            d["wallTime"] = round(self.wall_time, 4)
        return d


@dataclass
class TorusSearchResult:
    width: int
    height: int
    outcome: Outcome
    solution: Optional[PatternWindow] = None
    stats: SearchStats = field(default_factory=SearchStats)


class _Timeout(Exception):
    pass


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class TorusProblem:
    """Constraint network of the ``w x h`` torus over a tile set.

    Variables are cells ``r * w + c``; domains are Python ints used as
    bitsets over positions in ``tileset.symbols``.
    """

    def __init__(self, w: int, h: int, tileset: TileSet):
        self.w, self.h, self.tileset = w, h, tileset
        t = tileset.tables
        ids = np.asarray(tileset.symbols)
        self.ids = ids
        n = len(ids)
        self.full = (1 << n) - 1

        def masks(values: np.ndarray) -> dict[int, int]:
            out: dict[int, int] = {}
            for pos, v in enumerate(values.tolist()):
                out[v] = out.get(v, 0) | (1 << pos)
            return out

        self.east, self.west = masks(t.east[ids]), masks(t.west[ids])
        self.north, self.south = masks(t.north[ids]), masks(t.south[ids])
        self.se_exit, self.nw_exit = masks(t.se[ids].astype(int)), masks(t.nw[ids].astype(int))
        self.sup_right = self._support_fn(self.east, self.west, t.east[ids])
        self.sup_left = self._support_fn(self.west, self.east, t.west[ids])
        self.sup_up = self._support_fn(self.north, self.south, t.north[ids])
        self.sup_down = self._support_fn(self.south, self.north, t.south[ids])
        self.sup_se = self._support_fn(self.se_exit, self.nw_exit, t.se[ids].astype(int))
        self.sup_nw = self._support_fn(self.nw_exit, self.se_exit, t.nw[ids].astype(int))
        corner = masks(t.corner[ids].astype(int))
        self.corner = corner.get(1, 0)
        # per-symbol self-consistency, for cells that neighbour themselves
        self.self_h = sum(1 << p for p in range(n) if t.east[ids[p]] == t.west[ids[p]])
        self.self_v = sum(1 << p for p in range(n) if t.north[ids[p]] == t.south[ids[p]])
        self.self_d = sum(1 << p for p in range(n) if t.se[ids[p]] == t.nw[ids[p]])

        cells = w * h
        self.right = [(r * w + (c + 1) % w) for r in range(h) for c in range(w)]
        self.up = [(((r + 1) % h) * w + c) for r in range(h) for c in range(w)]
        # each block listed by its cells (sw, se, nw, ne)
        self.blocks = [
            (i, self.right[i], self.up[i], self.right[self.up[i]]) for i in range(cells)
        ]
        self.blocks_of: list[list[int]] = [[] for _ in range(cells)]
        for b, cells_b in enumerate(self.blocks):
            for v in set(cells_b):
                self.blocks_of[v].append(b)
        self.left = [0] * cells
        self.down = [0] * cells
        for i in range(cells):
            self.left[self.right[i]] = i
            self.down[self.up[i]] = i

    def initial_domains(self) -> list[int]:
        doms = []
        for i in range(self.w * self.h):
            d = self.full
            if self.right[i] == i:
                d &= self.self_h
            if self.up[i] == i:
                d &= self.self_v
            sw, se, nw, ne = self.blocks[i]
            if nw == se:
                d &= self.self_d
            doms.append(d)
        return doms

    def _support_fn(self, have: dict[int, int], want: dict[int, int], per_symbol: np.ndarray):
        """Map a domain to the union of ``want`` masks over the keys its
        symbols take in ``have``; memoised, since domains recur often."""
        items = [(m, want.get(key, 0)) for key, m in have.items()]
        by_pos = [want.get(int(k), 0) for k in per_symbol.tolist()]
        cache: dict[int, int] = {}

        def support(dom: int) -> int:
            hit = cache.get(dom)
            if hit is not None:
                return hit
            s = 0
            if dom.bit_count() <= 8:
                for pos in _bits(dom):
                    s |= by_pos[pos]
            else:
                for m, w in items:
                    if dom & m:
                        s |= w
            if len(cache) > 500_000:
                cache.clear()
            cache[dom] = s
            return s

        return support

    def propagate(self, doms: list[int], queue: list[int], stats: SearchStats) -> bool:
        """Arc consistency on edges, diagonal steps and the corner rule.
        Returns False on a wipe-out."""
        pending = set(queue)
        work = list(queue)
        angle = self.tileset.angle_rule
        corner = self.corner

        def narrow(v: int, new: int) -> bool:
            if new != doms[v]:
                stats.prunes += 1
                doms[v] = new
                if not new:
                    return False
                if v not in pending:
                    pending.add(v)
                    work.append(v)
            return True

        right, left, up, down = self.right, self.left, self.up, self.down
        sup_right, sup_left, sup_up, sup_down = self.sup_right, self.sup_left, self.sup_up, self.sup_down
        sup_se, sup_nw = self.sup_se, self.sup_nw
        while work:
            u = work.pop()
            pending.discard(u)
            if not narrow(right[u], doms[right[u]] & sup_right(doms[u])):
                return False
            if not narrow(left[u], doms[left[u]] & sup_left(doms[u])):
                return False
            if not narrow(up[u], doms[up[u]] & sup_up(doms[u])):
                return False
            if not narrow(down[u], doms[down[u]] & sup_down(doms[u])):
                return False
            for b in self.blocks_of[u]:
                sw, se, nw, ne = self.blocks[b]
                if not narrow(se, doms[se] & sup_se(doms[nw])):
                    return False
                if not narrow(nw, doms[nw] & sup_nw(doms[se])):
                    return False
                if angle:
                    able = [v for v in (sw, se, nw, ne) if doms[v] & corner]
                    if not able:
                        return False
                    if len(set(able)) == 1 and not narrow(able[0], doms[able[0]] & corner):
                        return False
        return True

    def solution_window(self, doms: list[int]) -> PatternWindow:
        cells = np.array(
            [[int(self.ids[doms[r * self.w + c].bit_length() - 1]) for c in range(self.w)] for r in range(self.h)]
        )
        return PatternWindow(Coord2(0, 0), cells)


def _solve(
    problem: TorusProblem,
    doms: list[int],
    queue: list[int],
    depth: int,
    stats: SearchStats,
    deadline: float,
) -> Optional[list[int]]:
    stats.nodes += 1
    stats.max_depth = max(stats.max_depth, depth)
    if time.monotonic() > deadline:
        raise _Timeout
    if not problem.propagate(doms, queue, stats):
        return None
    best, best_size = -1, None
    for v, d in enumerate(doms):
        size = d.bit_count()
        if size > 1 and (best_size is None or size < best_size):
            best, best_size = v, size
    if best < 0:
        return doms
    for pos in _bits(doms[best]):
        child = list(doms)
        child[best] = 1 << pos
        found = _solve(problem, child, [best], depth + 1, stats, deadline)
        if found is not None:
            return found
    return None


def _root(problem: TorusProblem, anchor_corner: bool) -> tuple[list[int], SearchStats, bool]:
    stats = SearchStats(nodes=1)
    doms = problem.initial_domains()
    if anchor_corner:
        # every solution has a corner somewhere; translate it to cell 0
        doms[0] &= problem.corner
    ok = all(doms) and problem.propagate(doms, list(range(len(doms))), stats)
    return doms, stats, ok


def _branch_var(doms: list[int]) -> int:
    best, best_size = -1, None
    for v, d in enumerate(doms):
        size = d.bit_count()
        if size > 1 and (best_size is None or size < best_size):
            best, best_size = v, size
    return best


def _run_chunk(args) -> tuple[Optional[list[int]], SearchStats, bool]:
    w, h, tileset, best, positions, doms, deadline = args
    problem = TorusProblem(w, h, tileset)
    stats = SearchStats()
    try:
        for pos in positions:
            child = list(doms)
            child[best] = 1 << pos
            found = _solve(problem, child, [best], 1, stats, deadline)
            if found is not None:
                return found, stats, False
    except _Timeout:
        return None, stats, True
    return None, stats, False


def search_torus(
    w: int,
    h: int,
    tileset: Optional[TileSet] = None,
    budget: float = float("inf"),
    threads: int = 1,
    anchor_corner: bool = True,
) -> TorusSearchResult:
    """Complete backtracking search for a valid tiling of the ``w x h`` torus.

    Forward checking keeps every domain arc consistent after each
    assignment; the next cell is the one with the fewest candidates (ties to
    the lowest index) and candidates are tried in symbol order. With
    ``threads > 1`` the candidates of the first branching cell are split into
    contiguous chunks solved in worker processes; outcomes and, for
    exhausted searches, node counts equal the sequential run.

    With the corner rule on, tilings are only sought up to translation:
    cell ``(0, 0)`` is required to hold a blue corner (``anchor_corner``).
    """
    if w < 1 or h < 1:
        raise ValueError("torus dimensions must be positive")
    tileset = tileset or compile_tileset()
    start = time.monotonic()
    deadline = start + budget
    result = TorusSearchResult(w, h, "unsat")
    if budget <= 0:
        result.outcome = "timeout"
        return result
    problem = TorusProblem(w, h, tileset)
    doms, stats, ok = _root(problem, anchor_corner and tileset.angle_rule)
    result.stats = stats
    if not ok:
        stats.wall_time = time.monotonic() - start
        return result
    best = _branch_var(doms)
    if best < 0:
        result.outcome, result.solution = "sat", problem.solution_window(doms)
        stats.wall_time = time.monotonic() - start
        return result
    positions = list(_bits(doms[best]))
    if threads <= 1:
        chunks = [positions]
    else:
        chunks = [list(c) for c in np.array_split(positions, threads) if len(c)]
    jobs = [(w, h, tileset, best, [int(p) for p in c], doms, deadline) for c in chunks]
    if threads <= 1:
        outputs = [_run_chunk(jobs[0])]
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            outputs = list(pool.map(_run_chunk, jobs))
    for found, chunk_stats, timed_out in outputs:
        stats.merge(chunk_stats)
        if found is not None:
            result.outcome, result.solution = "sat", problem.solution_window(found)
            break
        if timed_out:
            result.outcome = "timeout"
            break
    stats.wall_time = time.monotonic() - start
    return result


def scan(
    max_w: int,
    max_h: Optional[int] = None,
    budget_each: float = 60.0,
    tileset: Optional[TileSet] = None,
    threads: int = 1,
    mirror: bool = False,
) -> dict[tuple[int, int], TorusSearchResult]:
    """Search every torus up to ``max_w x max_h``.

    Both orientations are searched unless ``mirror`` is set; the rules are
    not symmetric under transposition (diagonals run north-west to
    south-east), so mirroring is an explicit opt-in.
    """
    max_h = max_w if max_h is None else max_h
    table: dict[tuple[int, int], TorusSearchResult] = {}
    for h in range(1, max_h + 1):
        for w in range(1, max_w + 1):
            if mirror and (h, w) in table:
                src = table[(h, w)]
                table[(w, h)] = TorusSearchResult(w, h, src.outcome, None, src.stats)
                continue
            table[(w, h)] = search_torus(w, h, tileset, budget_each, threads)
    return table


# -- periods ------------------------------------------------------------


@dataclass(frozen=True)
class PeriodVectors:
    v1: tuple[int, int]
    v2: tuple[int, int]

    @property
    def determinant(self) -> int:
        (x, y), (x2, y2) = self.v1, self.v2
        return x * y2 - x2 * y

    @property
    def independent(self) -> bool:
        return self.determinant != 0


def derive_axis_periods(v1: tuple[int, int], v2: tuple[int, int]) -> tuple[tuple[int, int], tuple[int, int]]:
    """A horizontal and a vertical period implied by two independent ones.

    ``x2*v1 - x*v2`` has no horizontal component and ``y2*v1 - y*v2`` no
    vertical one; both are integer combinations of periods, hence periods.
    """
    (x, y), (x2, y2) = v1, v2
    if v1 == (0, 0) or v2 == (0, 0):
        raise ValueError("period vectors must be non-zero")
    if not PeriodVectors(v1, v2).independent:
        raise ValueError(f"period vectors {v1} and {v2} are dependent")
    vertical = (x2 * x - x * x2, x2 * y - x * y2)
    horizontal = (y2 * x - y * x2, y2 * y - y * y2)
    return (abs(horizontal[0]), 0), (0, abs(vertical[1]))
