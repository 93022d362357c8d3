"""A hierarchical aperiodic tile set built from nested squares.

The public API covers the symbol alphabet and its local rules, the
canonical configuration, the verifier and structural checks, the torus
search, and SVG rendering.
"""

from __future__ import annotations

from .generator import LatticeLevel, generate_window, max_level_for, square_lattice
from .model import (
    BLANK,
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
    UnknownSymbolError,
    enumerate_alphabet,
    is_legal_state,
    state_of,
    symbol_id,
)
from .periodicity import PeriodVectors, TorusSearchResult, derive_axis_periods, scan, search_torus
from .render import RenderStyle, render_svg
from .rules import (
    BlockWindow,
    TileSet,
    WangTileSet,
    block_count,
    block_recode,
    compile_tileset,
    diagonal_compatible,
    h_compatible,
    to_wang,
    v_compatible,
)
from .verifier import (
    LemmaReport,
    MutationReport,
    SquareRecord,
    Violation,
    check_lemmas,
    extract_blue_paths,
    mutate_check,
    verify,
)

__all__ = [name for name in dir() if not name.startswith("_")]
