"""Deterministic SVG drawings of windows.

The drawing uses only ``g``, ``rect``, ``path``, ``line`` and ``circle``
elements. Closed blue squares become one closed ``path`` each (class
``loop``); everything else is drawn cell by cell. Stroke colours encode the
mod-3 coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .model import CellState, Coord2, DiagKind, Dir, Mark, Mod3Pair, PatternWindow, enumerate_alphabet
from .verifier import Structure

LAYERS = ("blue", "diagonals", "arms", "marks", "coords")

DEFAULT_PALETTE: dict[Mod3Pair, str] = {
    Mod3Pair(0, 0): "#1f3a93",
    Mod3Pair(1, 0): "#2e86de",
    Mod3Pair(2, 0): "#48c9b0",
    Mod3Pair(0, 1): "#8e44ad",
    Mod3Pair(1, 1): "#c0392b",
    Mod3Pair(2, 1): "#d35400",
    Mod3Pair(0, 2): "#27ae60",
    Mod3Pair(1, 2): "#7f8c8d",
    Mod3Pair(2, 2): "#b7950b",
}

_EXIT_DIRS = {
    "horizontal": (Dir.E, Dir.W),
    "vertical": (Dir.N, Dir.S),
    "corner-NW": (Dir.E, Dir.S),
    "corner-NE": (Dir.W, Dir.S),
    "corner-SW": (Dir.E, Dir.N),
    "corner-SE": (Dir.W, Dir.N),
}


@dataclass(frozen=True)
class RenderStyle:
    cell_size: int = 12
    layers: frozenset[str] = field(default_factory=lambda: frozenset(("blue", "diagonals", "arms", "marks")))
    palette: dict[Mod3Pair, str] = field(default_factory=lambda: dict(DEFAULT_PALETTE), hash=False)
    show_grid: bool = False

    def __post_init__(self) -> None:
        if self.cell_size < 1:
            raise ValueError("cell size must be at least 1")
        unknown = set(self.layers) - set(LAYERS)
        if unknown:
            raise ValueError(f"unknown layers: {sorted(unknown)}")
        missing = [str(p) for p in DEFAULT_PALETTE if p not in self.palette]
        if missing:
            raise ValueError(f"palette misses coordinates {missing}")


def _num(v: float) -> str:
    return f"{v:.2f}".rstrip("0").rstrip(".")


class _Canvas:
    def __init__(self, window: PatternWindow, style: RenderStyle):
        self.w, self.s = window, style.cell_size
        self.height_px = window.height * self.s

    def centre(self, x: int, y: int) -> tuple[float, float]:
        c = x - self.w.origin.x
        r = y - self.w.origin.y
        return (c + 0.5) * self.s, self.height_px - (r + 0.5) * self.s

    def edge(self, x: int, y: int, d: Dir) -> tuple[float, float]:
        cx, cy = self.centre(x, y)
        dx, dy = d.delta
        return cx + dx * self.s / 2, cy - dy * self.s / 2


def _group(name: str, body: list[str]) -> list[str]:
    return [f'<g id="{name}">', *body, "</g>"] if body else []


def render_svg(window: PatternWindow, style: RenderStyle | None = None) -> str:
    """Render ``window`` as an SVG document (text)."""
    style = style or RenderStyle()
    cv = _Canvas(window, style)
    alphabet = enumerate_alphabet()
    s = style.cell_size
    pal = style.palette
    width_px, height_px = window.width * s, window.height * s
    thin = _num(max(s / 12, 0.5))
    thick = _num(max(s / 5, 1.0))

    cells: list[tuple[int, int, CellState]] = []
    for r in range(window.height):
        for c in range(window.width):
            cells.append((window.origin.x + c, window.origin.y + r, alphabet[int(window.cells[r, c])]))

    body: list[str] = []
    if style.show_grid:
        grid = [
            f'<rect x="{c * s}" y="{r * s}" width="{s}" height="{s}" fill="none" stroke="#dddddd" stroke-width="0.5"/>'
            for r in range(window.height)
            for c in range(window.width)
        ]
        body += _group("grid", grid)

    if "blue" in style.layers:
        st = Structure(window)
        in_loop: set[Coord2] = set()
        loops = []
        for sq in st.squares:
            if not sq.closed:
                continue
            in_loop.update(sq.cells)
            x0, y0 = cv.centre(sq.anchor.x, sq.anchor.y)
            x1, y1 = cv.centre(sq.anchor.x + sq.side, sq.anchor.y + sq.side)
            loops.append(
                f'<path class="loop" d="M{_num(x0)},{_num(y0)} H{_num(x1)} V{_num(y1)} H{_num(x0)} Z" '
                f'fill="none" stroke="{pal[sq.coords]}" stroke-width="{thick}"/>'
            )
        rest, ticks = [], []
        for x, y, st_ in cells:
            b = st_.blue
            if b is None:
                continue
            cx, cy = cv.centre(x, y)
            if Coord2(x, y) not in in_loop:
                parts = " ".join(
                    f"M{_num(cx)},{_num(cy)} L{_num(ex)},{_num(ey)}"
                    for ex, ey in (cv.edge(x, y, d) for d in _EXIT_DIRS[b.shape.value])
                )
                rest.append(f'<path class="open" d="{parts}" fill="none" stroke="{pal[b.coords]}" stroke-width="{thick}"/>')
            if b.inner is not None:
                tx, ty = cv.edge(x, y, b.inner)
                mx, my = (cx + tx) / 2, (cy + ty) / 2
                ticks.append(f'<line x1="{_num(cx)}" y1="{_num(cy)}" x2="{_num(mx)}" y2="{_num(my)}" stroke="{pal[b.coords]}" stroke-width="{thin}"/>')
        body += _group("blue", loops + rest + ticks)

    if "diagonals" in style.layers:
        diag = []
        for x, y, st_ in cells:
            if st_.diagonal is None:
                continue
            cx, cy = cv.centre(x, y)
            h = s / 2
            a, b = (cx - h, cy - h), (cx + h, cy + h)  # upper-left, lower-right
            if st_.diagonal.kind is DiagKind.UL:
                a = (cx, cy)
            elif st_.diagonal.kind is DiagKind.LR:
                b = (cx, cy)
            diag.append(f'<line x1="{_num(a[0])}" y1="{_num(a[1])}" x2="{_num(b[0])}" y2="{_num(b[1])}" stroke="#555555" stroke-width="{thin}"/>')
        body += _group("diagonals", diag)

    if "arms" in style.layers:
        arms, dots = [], []
        for x, y, st_ in cells:
            for arm, dirs in ((st_.h_arm, (Dir.W, Dir.E)), (st_.v_arm, (Dir.S, Dir.N))):
                if arm is None:
                    continue
                (ax, ay), (bx, by) = cv.edge(x, y, dirs[0]), cv.edge(x, y, dirs[1])
                dash = ' stroke-dasharray="2,1"' if arm.mark is Mark.HIGH else ""
                arms.append(
                    f'<line x1="{_num(ax)}" y1="{_num(ay)}" x2="{_num(bx)}" y2="{_num(by)}" '
                    f'stroke="{pal[arm.label]}" stroke-width="{thin}"{dash}/>'
                )
            for ep in sorted(st_.arm_endpoints, key=lambda e: e.direction.value):
                (cx, cy), (ex, ey) = cv.centre(x, y), cv.edge(x, y, ep.direction)
                arms.append(f'<line x1="{_num(cx)}" y1="{_num(cy)}" x2="{_num(ex)}" y2="{_num(ey)}" stroke="#999999" stroke-width="{thin}"/>')
            if st_.blue is not None and st_.blue.crossed_by_arm is not None:
                cx, cy = cv.centre(x, y)
                dots.append(f'<circle class="crossing" cx="{_num(cx)}" cy="{_num(cy)}" r="{_num(s / 6)}" fill="#000000"/>')
        body += _group("arms", arms + dots)

    if "marks" in style.layers:
        # one arrowhead per mark transition, pointing from the low to the high part
        heads = []
        for x, y, st_ in cells:
            b = st_.blue
            if b is None or b.crossed_by_arm is None:
                continue
            cx, cy = cv.centre(x, y)
            q = s / 4
            if b.crossed_by_arm.value == "horizontal":
                d = f"M{_num(cx + q)},{_num(cy)} L{_num(cx - q)},{_num(cy - q)} L{_num(cx - q)},{_num(cy + q)} Z"
            else:
                d = f"M{_num(cx)},{_num(cy - q)} L{_num(cx - q)},{_num(cy + q)} L{_num(cx + q)},{_num(cy + q)} Z"
            heads.append(f'<path class="arrow" d="{d}" fill="#333333"/>')
        body += _group("marks", heads)

    if "coords" in style.layers:
        tags = []
        for x, y, st_ in cells:
            if st_.is_corner:
                cx, cy = cv.centre(x, y)
                q = s / 4
                tags.append(
                    f'<rect x="{_num(cx - q)}" y="{_num(cy - q)}" width="{_num(2 * q)}" height="{_num(2 * q)}" '
                    f'fill="{pal[st_.blue.coords]}"/>'
                )
        body += _group("coords", tags)

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width_px}" height="{height_px}" '
        f'viewBox="0 0 {width_px} {height_px}">',
        '<g id="drawing">',
        *body,
        "</g>",
        "</svg>",
    ]
    return "\n".join(lines) + "\n"
