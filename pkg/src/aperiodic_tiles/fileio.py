"""JSON encodings of cell states, windows and reports.

Cell states are flat records with enumerated string fields; absent layers
are omitted. Window files list cells row by row, bottom row first, so that
``cells[r * width + c]`` is the cell at ``(origin.x + c, origin.y + r)``.
"""

from __future__ import annotations

import hashlib
import json
from typing import Any, Optional

import numpy as np

from .model import (
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
    symbol_id,
)

WINDOW_VERSION = "aperiodic-window/1"
REPORT_VERSION = "aperiodic-report/1"


class DecodeError(ValueError):
    """Raised for malformed or out-of-alphabet input."""


def _pair(p: Mod3Pair) -> list[int]:
    return [p.x, p.y]


def encode_state(s: CellState) -> dict[str, Any]:
    out: dict[str, Any] = {}
    if s.blue is not None:
        b = s.blue
        blue: dict[str, Any] = {"shape": b.shape.value, "coords": _pair(b.coords)}
        if b.inner is not None:
            blue["inner"] = b.inner.value
        if b.on_diagonal:
            blue["onDiagonal"] = True
        if b.crossed_by_arm is not None:
            blue["crossedByArm"] = b.crossed_by_arm.value
        out["blue"] = blue
    if s.diagonal is not None:
        out["diagonal"] = s.diagonal.kind.value
    for key, arm in (("hArm", s.h_arm), ("vArm", s.v_arm)):
        if arm is not None:
            out[key] = {"side": arm.side.value, "mark": arm.mark.value, "label": _pair(arm.label)}
    if s.arm_endpoints:
        out["armEndpoints"] = [
            {"direction": ep.direction.value, "mark": ep.mark.value}
            for ep in sorted(s.arm_endpoints, key=lambda e: e.direction.value)
        ]
    return out


_STATE_KEYS = {"blue", "diagonal", "hArm", "vArm", "armEndpoints"}


def decode_state(rec: Any) -> CellState:
    """Inverse of :func:`encode_state`. Raises :class:`DecodeError`."""
    try:
        if not isinstance(rec, dict) or set(rec) - _STATE_KEYS:
            raise DecodeError(f"malformed cell record: {rec!r}")
        blue = None
        if "blue" in rec:
            b = rec["blue"]
            blue = BlueSegment(
                Shape(b["shape"]),
                Mod3Pair(*b["coords"]),
                Dir(b["inner"]) if "inner" in b else None,
                bool(b.get("onDiagonal", False)),
                Axis(b["crossedByArm"]) if "crossedByArm" in b else None,
            )
        diagonal = DiagonalSegment(DiagKind(rec["diagonal"])) if "diagonal" in rec else None
        arms = []
        for key, axis in (("hArm", Axis.H), ("vArm", Axis.V)):
            a = rec.get(key)
            arms.append(None if a is None else ArmSegment(axis, Side(a["side"]), Mark(a["mark"]), Mod3Pair(*a["label"])))
        eps = frozenset(ArmEndpoint(Dir(e["direction"]), Mark(e["mark"])) for e in rec.get("armEndpoints", []))
        return CellState(blue, diagonal, arms[0], arms[1], eps)
    except DecodeError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise DecodeError(f"malformed cell record {rec!r}: {exc}") from None


def window_to_json(window: PatternWindow) -> dict[str, Any]:
    alphabet = enumerate_alphabet()
    return {
        "version": WINDOW_VERSION,
        "origin": [window.origin.x, window.origin.y],
        "width": window.width,
        "height": window.height,
        "cells": [encode_state(alphabet[s]) for s in window.cells.reshape(-1).tolist()],
    }


def window_from_json(doc: Any) -> PatternWindow:
    try:
        if doc.get("version") != WINDOW_VERSION:
            raise DecodeError(f"unsupported window version {doc.get('version')!r}")
        ox, oy = (int(v) for v in doc["origin"])
        w, h = int(doc["width"]), int(doc["height"])
        cells = doc["cells"]
    except DecodeError:
        raise
    except (AttributeError, KeyError, TypeError, ValueError) as exc:
        raise DecodeError(f"malformed window file: {exc}") from None
    if w < 1 or h < 1 or len(cells) != w * h:
        raise DecodeError(f"window declares {w}x{h} but holds {len(cells)} cells")
    ids = np.empty(w * h, dtype=np.int32)
    cache: dict[str, int] = {}
    for i, rec in enumerate(cells):
        key = json.dumps(rec, sort_keys=True)
        if key not in cache:
            try:
                cache[key] = symbol_id(decode_state(rec))
            except UnknownSymbolError as exc:
                raise DecodeError(f"cell {i % w},{i // w}: {exc}") from None
        ids[i] = cache[key]
    return PatternWindow(Coord2(ox, oy), ids.reshape(h, w))


def dumps(doc: Any) -> str:
    """Canonical JSON text: sorted keys, no extraneous whitespace variance."""
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def loads(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DecodeError(f"invalid JSON: {exc}") from None


def read_window(path: str) -> PatternWindow:
    with open(path, encoding="utf-8") as fh:
        return window_from_json(loads(fh.read()))


def write_window(window: PatternWindow, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(window_to_json(window)))


def digest(text: str) -> str:
    return "sha256:" + hashlib.sha256(text.encode("utf-8")).hexdigest()


def make_report(command: list[str], body: dict[str, Any], digests: Optional[dict[str, str]] = None,
                wall_time: Optional[float] = None) -> dict[str, Any]:
    """Report envelope shared by every subcommand."""
    out: dict[str, Any] = {"version": REPORT_VERSION, "command": list(command), "inputDigests": digests or {}}
    out.update(body)
    if wall_time is not None:
        out["wallTime"] = round(wall_time, 4)
    return out


def violations_json(violations) -> list[dict[str, Any]]:
    return [{"location": [v.location.x, v.location.y], "rule": v.rule, "detail": v.detail} for v in violations]


def lemma_report_json(report) -> dict[str, Any]:
    return {
        "allPass": report.all_pass,
        "lemmas": {
            name: {
                "status": r.status,
                "checked": r.checked,
                "counterexamples": [[p.x, p.y] for p in r.counterexamples],
            }
            for name, r in report.results.items()
        },
    }


def squares_json(squares) -> list[dict[str, Any]]:
    out = []
    for sq in squares:
        out.append(
            {
                "anchor": [sq.anchor.x, sq.anchor.y],
                "side": sq.side,
                "coords": None if sq.coords is None else _pair(sq.coords),
                "onDiagonal": sq.on_diagonal,
                "boundaryTruncated": sq.boundary_truncated,
                "armCrossings": sq.arm_crossings,
                "neighbors": {d: None if n is None else [n.x, n.y] for d, n in sorted(sq.neighbors.items())},
            }
        )
    return out


def search_result_json(result, with_time: bool = True) -> dict[str, Any]:
    out: dict[str, Any] = {
        "width": result.width,
        "height": result.height,
        "outcome": result.outcome,
        "stats": result.stats.as_dict(with_time),
    }
    if result.solution is not None:
        out["solution"] = window_to_json(result.solution)
    return out
