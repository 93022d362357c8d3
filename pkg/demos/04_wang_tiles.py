"""Recode the tiling into 2x2 blocks and read each block as a Wang tile.

Run from the repository root:  python3 demos/04_wang_tiles.py
Building the full Wang set takes a few seconds.
"""

from __future__ import annotations

from aperiodic_tiles import Coord2, block_recode, compile_tileset, generate_window, to_wang
from aperiodic_tiles.rules import domino_violations, wang_mismatches, wang_window

tileset = compile_tileset()
wang = to_wang(tileset)
print(f"{len(wang)} Wang tiles, edge colours {wang.colors}")

blocks = block_recode(generate_window(Coord2(-40, 17), 27, 27), tileset)
print(f"recoded window: {blocks.width}x{blocks.height} blocks")
print("domino violations:", len(domino_violations(blocks)))
print("Wang edge mismatches:", wang_mismatches(wang_window(blocks)))
print("south-west projection equals the source minus its top row and right column:",
      blocks.project("sw") == generate_window(Coord2(-40, 17), 26, 26))
