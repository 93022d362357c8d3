from __future__ import annotations

from itertools import combinations, product

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from aperiodic_tiles.model import (
    ALL_COORDS,
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
    iter_candidate_states,
    must_cross,
    state_of,
    symbol_id,
)


def test_blank_is_first_and_unique():
    alphabet = enumerate_alphabet()
    assert alphabet[0] == BLANK
    assert alphabet.count(BLANK) == 1
    assert symbol_id(BLANK) == 0


def test_corner_with_through_diagonal_is_not_a_symbol():
    s = CellState(
        blue=BlueSegment(Shape.NW, Mod3Pair(0, 0)),
        diagonal=DiagonalSegment(DiagKind.THROUGH),
        arm_endpoints=frozenset({ArmEndpoint(Dir.W), ArmEndpoint(Dir.N)}),
    )
    assert not is_legal_state(s)
    with pytest.raises(UnknownSymbolError):
        symbol_id(s)


def _independent_count() -> int:
    """Alphabet size by counting layer combinations directly."""
    arm_options = 1 + 2 * 9 * 2  # none, or side x label x mark
    plain = 2 * arm_options * arm_options  # diagonal none/through

    straight = 2 * 9 * 2 * 2  # shape x coords x inner x on-diagonal
    # per line (shape, coords, on-diagonal): 14 ordinary crossing arms for
    # either inner side, plus 4 centre-touching arms that fix the inner side
    crossings = 2 * 9 * 2 * (14 * 2 + 4)

    corners = 0
    for shape in ("NE", "NW", "SE", "SW"):
        per_diag = 0
        for x, y in product(range(3), repeat=2):
            n = 1
            if shape in ("NW", "SW"):  # west arm arrives at its high end
                n *= 1 if (x - 1) % 3 in (0, 1) and y == 1 else 2
            if shape in ("SE", "SW"):  # south arm arrives at its high end
                n *= 1 if (y - 1) % 3 in (0, 1) and x == 1 else 2
            per_diag += n
        corners += 2 * per_diag
    return plain + straight + crossings + corners


def test_alphabet_count_matches_independent_count():
    assert len(enumerate_alphabet()) == _independent_count() == 4102


def test_enumeration_is_deterministic():
    again = tuple(iter_candidate_states())
    assert again == enumerate_alphabet()
    assert len(set(again)) == len(again)


def test_every_symbol_is_legal_and_round_trips():
    for sid, s in enumerate(enumerate_alphabet()):
        assert is_legal_state(s)
        assert symbol_id(s) == sid
        assert state_of(sid) == s


def test_state_of_rejects_out_of_range():
    with pytest.raises(UnknownSymbolError):
        state_of(len(enumerate_alphabet()))
    with pytest.raises(UnknownSymbolError):
        state_of(-1)


def _layer_product(coords):
    """Every combination of layer values over ``coords``, legal or not."""
    blues = [None] + [
        BlueSegment(shape, c, inner, diag, cross)
        for shape in Shape
        for c in coords
        for inner in (None, *Dir)
        for diag in (False, True)
        for cross in (None, *Axis)
    ]
    diags = [None] + [DiagonalSegment(k) for k in DiagKind]
    h_arms = [None] + [ArmSegment(Axis.H, side, m, c) for side in Side for m in Mark for c in coords]
    v_arms = [None] + [ArmSegment(Axis.V, side, m, c) for side in Side for m in Mark for c in coords]
    endpoints = [ArmEndpoint(d, m) for d in Dir for m in Mark]
    ep_sets = [frozenset()] + [frozenset(c) for k in (1, 2) for c in combinations(endpoints, k)]
    return blues, diags, h_arms, v_arms, ep_sets


def test_enumeration_is_closed_on_reduced_coordinates():
    coords = (Mod3Pair(1, 1),)
    blues, diags, h_arms, v_arms, ep_sets = _layer_product(coords)
    expected = set(iter_candidate_states(coords))
    rng = np.random.default_rng(7)
    # exhaustive over blue/diagonal/endpoints, sampled over the two arm layers
    found = set()
    for blue, diag, eps in product(blues, diags, ep_sets):
        arm_pairs = [(None, None)] + [
            (h_arms[i], v_arms[j]) for i, j in rng.integers(0, len(h_arms), size=(6, 2))
        ]
        if blue is not None and blue.shape in (Shape.HORIZONTAL, Shape.VERTICAL):
            arm_pairs += [(h, None) for h in h_arms] + [(None, v) for v in v_arms]
        for h, v in arm_pairs:
            s = CellState(blue, diag, h, v, eps)
            if is_legal_state(s):
                found.add(s)
    # arm-only states are covered exhaustively below
    for diag, h, v in product(diags, h_arms, v_arms):
        s = CellState(None, diag, h, v)
        if is_legal_state(s):
            found.add(s)
    assert found == expected


def test_must_cross_labels():
    centre_touching = {c for c in ALL_COORDS if must_cross(Axis.H, c)}
    assert centre_touching == {Mod3Pair(1, 1), Mod3Pair(0, 1)}
    assert {c for c in ALL_COORDS if must_cross(Axis.V, c)} == {Mod3Pair(1, 1), Mod3Pair(1, 0)}


@pytest.mark.parametrize("x,y", [(3, 0), (0, -1), (1, 5)])
def test_mod3pair_rejects_non_residues(x, y):
    with pytest.raises(ValueError):
        Mod3Pair(x, y)


@given(st.integers(0, 2), st.integers(0, 2), st.integers(-5, 5))
def test_mod3_step_wraps(x, y, k):
    p = Mod3Pair(x, y)
    assert p.step(Axis.H, k) == Mod3Pair((x + k) % 3, y)
    assert p.step(Axis.V, k).step(Axis.V, -k) == p


def test_pattern_window_indexing():
    w = PatternWindow(Coord2(-2, 5), np.arange(6).reshape(2, 3))
    assert (w.width, w.height) == (3, 2)
    assert w.sid(-2, 5) == 0 and w.sid(0, 6) == 5
    assert w.contains(0, 6) and not w.contains(1, 6)
    sub = w.sub(Coord2(-1, 5), 2, 2)
    assert sub.cells.tolist() == [[1, 2], [4, 5]]
    with pytest.raises(ValueError):
        w.sub(Coord2(-3, 5), 2, 2)
    assert PatternWindow.blank(Coord2(0, 0), 2, 2) == PatternWindow(Coord2(0, 0), np.zeros((2, 2)))
    with pytest.raises(ValueError):
        PatternWindow(Coord2(0, 0), np.zeros((0, 3)))
