"""Search small tori for a tiling. Every torus tiling would give a periodic
tiling of the plane, so each search should come back unsatisfiable.

Run from the repository root:  python3 demos/03_no_periodic_tiling.py [max]
"""

from __future__ import annotations

import sys

from aperiodic_tiles import compile_tileset, derive_axis_periods, scan
from aperiodic_tiles.cli import scan_grid

limit = int(sys.argv[1]) if len(sys.argv) > 1 else 4
tileset = compile_tileset()
print(f"{len(tileset)} symbols; scanning every torus up to {limit}x{limit}")

table = scan(limit, limit, budget_each=60.0, tileset=tileset)
print(scan_grid(table))
nodes = sum(r.stats.nodes for r in table.values())
print(f"search nodes in total: {nodes}")

# a tiling with two independent periods also has periods along both axes,
# which is why square tori are enough to rule out any periodic tiling
for v1, v2 in [((2, 1), (1, 2)), ((5, -3), (4, 7))]:
    print(f"periods {v1} and {v2} imply axis periods {derive_axis_periods(v1, v2)}")
