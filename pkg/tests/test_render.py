from __future__ import annotations

import xml.etree.ElementTree as ET

import pytest

from aperiodic_tiles.model import Coord2, PatternWindow, enumerate_alphabet
from aperiodic_tiles.render import LAYERS, RenderStyle, render_svg
from aperiodic_tiles.verifier import extract_blue_paths

NS = "{http://www.w3.org/2000/svg}"
ALLOWED = {"svg", "g", "rect", "path", "line", "circle"}


def parse(text: str):
    return ET.fromstring(text.encode("utf-8"))


def tags(root):
    return [e.tag.replace(NS, "") for e in root.iter()]


def groups(root):
    drawing = root.find(f"{NS}g")
    return [g.get("id") for g in drawing.findall(f"{NS}g")]


def test_blank_window_with_and_without_grid():
    w = PatternWindow.blank(Coord2(0, 0), 3, 3)
    with_grid = parse(render_svg(w, RenderStyle(show_grid=True, layers=frozenset(LAYERS))))
    assert groups(with_grid) == ["grid"]
    bare = parse(render_svg(w, RenderStyle(layers=frozenset(LAYERS))))
    drawing = bare.find(f"{NS}g")
    assert drawing.get("id") == "drawing" and len(drawing) == 0


def test_loops_match_closed_squares(window27):
    root = parse(render_svg(window27, RenderStyle(layers=frozenset({"blue"}))))
    loops = [e for e in root.iter(f"{NS}path") if e.get("class") == "loop"]
    assert len(loops) == 91 == sum(sq.closed for sq in extract_blue_paths(window27))


def test_arrowheads_match_mark_transitions(window27):
    root = parse(render_svg(window27, RenderStyle(layers=frozenset({"marks", "arms"}))))
    arrows = [e for e in root.iter(f"{NS}path") if e.get("class") == "arrow"]
    alphabet = enumerate_alphabet()
    crossings = sum(alphabet[s].blue is not None and alphabet[s].blue.crossed_by_arm is not None for s in window27.cells.ravel())
    assert len(arrows) == crossings > 0
    assert len(list(root.iter(f"{NS}circle"))) == crossings


def test_all_layers_use_only_the_allowed_elements(window27):
    text = render_svg(window27, RenderStyle(layers=frozenset(LAYERS), show_grid=True, cell_size=5))
    root = parse(text)
    assert set(tags(root)) <= ALLOWED
    assert groups(root) == ["grid", "blue", "diagonals", "arms", "marks", "coords"]
    assert root.get("width") == str(27 * 5)


def test_rendering_is_deterministic(window27):
    style = RenderStyle(layers=frozenset(LAYERS))
    assert render_svg(window27, style) == render_svg(window27, RenderStyle(layers=frozenset(LAYERS)))


def test_truncated_paths_are_drawn_open(window27):
    w = window27.sub(Coord2(10, 0), 12, 27)
    root = parse(render_svg(w, RenderStyle(layers=frozenset({"blue"}))))
    classes = {e.get("class") for e in root.iter(f"{NS}path")}
    assert classes == {"loop", "open"}


@pytest.mark.parametrize("kwargs", [{"cell_size": 0}, {"layers": frozenset({"stars"})}, {"palette": {}}])
def test_style_validation(kwargs):
    with pytest.raises(ValueError):
        RenderStyle(**kwargs)
