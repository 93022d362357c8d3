"""Generate a window of the canonical tiling, check it, and draw it.

Run from the repository root:  python3 demos/01_generate_and_verify.py
Writes ``canonical_27.svg`` into the current directory.
"""

from __future__ import annotations

from aperiodic_tiles import Coord2, RenderStyle, generate_window, render_svg, verify
from aperiodic_tiles.render import LAYERS

window = generate_window(Coord2(0, 0), 27, 27)
print(f"generated a {window.width}x{window.height} window at {window.origin}")

problems = verify(window)
print(f"violations in the open window: {len(problems)}")

# wrapping the edges glues opposite sides together, which the tiles refuse
seams = verify(window, wrap="torus")
print(f"violations once the window is wrapped onto a torus: {len(seams)}")
print(f"first seam violation: {seams[0]}")

style = RenderStyle(cell_size=16, layers=frozenset(LAYERS) - {"coords"}, show_grid=True)
with open("canonical_27.svg", "w", encoding="utf-8") as fh:
    fh.write(render_svg(window, style))
print("wrote canonical_27.svg")
