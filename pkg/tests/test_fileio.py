from __future__ import annotations

import json

import pytest

from aperiodic_tiles import fileio
from aperiodic_tiles.generator import generate_window
from aperiodic_tiles.model import Coord2, enumerate_alphabet
from aperiodic_tiles.verifier import verify


def test_every_state_round_trips():
    for s in enumerate_alphabet():
        rec = fileio.encode_state(s)
        assert fileio.decode_state(json.loads(json.dumps(rec))) == s


def test_blank_encodes_as_empty_record():
    assert fileio.encode_state(enumerate_alphabet()[0]) == {}


def test_window_round_trip_preserves_verification(tmp_path):
    w = generate_window(Coord2(-7, 4), 20, 13)
    path = tmp_path / "w.json"
    fileio.write_window(w, str(path))
    back = fileio.read_window(str(path))
    assert back == w
    assert verify(back) == verify(w) == []
    doc = json.loads(path.read_text())
    assert (doc["width"], doc["height"], doc["origin"]) == (20, 13, [-7, 4])
    # cells are row-major with the bottom row first
    assert fileio.decode_state(doc["cells"][1]) == enumerate_alphabet()[w.sid(-6, 4)]


def test_window_json_is_canonical():
    w = generate_window(Coord2(0, 0), 9, 9)
    assert fileio.dumps(fileio.window_to_json(w)) == fileio.dumps(fileio.window_to_json(w))


@pytest.mark.parametrize(
    "doc",
    [
        {},
        {"version": "aperiodic-window/1", "origin": [0, 0], "width": 2, "height": 1, "cells": [{}]},
        {"version": "aperiodic-window/1", "origin": [0, 0], "width": 1, "height": 1, "cells": [{"blue": {}}]},
        {"version": "aperiodic-window/1", "origin": "x", "width": 1, "height": 1, "cells": [{}]},
        {"version": "aperiodic-window/1", "origin": [0, 0], "width": 1, "height": 1, "cells": [{"colour": 1}]},
        {"version": "aperiodic-window/1", "origin": [0, 0], "width": 1, "height": 1, "cells": [{"diagonal": "attach-UL"}]},
    ],
)
def test_malformed_windows_raise_decode_error(doc):
    with pytest.raises(fileio.DecodeError):
        fileio.window_from_json(doc)


def test_invalid_json_text():
    with pytest.raises(fileio.DecodeError):
        fileio.loads("{not json")
