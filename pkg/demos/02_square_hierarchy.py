"""Read the nested squares back out of a generated window and check the
structural properties the tile set is built to force.

Run from the repository root:  python3 demos/02_square_hierarchy.py
"""

from __future__ import annotations

from collections import Counter

from aperiodic_tiles import Coord2, generate_window
from aperiodic_tiles.verifier import Structure, check_lemmas

window = generate_window(Coord2(0, 0), 81, 81)
structure = Structure(window)
closed = [sq for sq in structure.squares if sq.closed]
print("closed squares by side:", dict(sorted(Counter(sq.side for sq in closed).items())))

biggest = max(closed, key=lambda sq: sq.side)
print(f"largest square: side {biggest.side} anchored at {biggest.anchor}, coordinates {biggest.coords}")
centre = structure.square_at(Coord2(11, 11))
print(f"side-{centre.side} square at {centre.anchor} has coordinates {centre.coords}; neighbours {centre.neighbors}")

report = check_lemmas(window, structure)
for name, result in report.results.items():
    print(f"  {name:<28} {result.status:<15} checked {result.checked}")
print("all checks pass:", report.all_pass)
