from __future__ import annotations

import json
import subprocess
import sys

import pytest

from aperiodic_tiles import fileio
from aperiodic_tiles.cli import cli_main
from aperiodic_tiles.generator import generate_window
from aperiodic_tiles.model import Coord2, PatternWindow
from aperiodic_tiles.verifier import verify


def run(argv, capsys):
    code = cli_main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_periods_prints_axis_vectors(capsys):
    assert run(["periods", "--v1", "2,1", "--v2", "1,2"], capsys)[:2] == (0, "(3,0) (0,3)\n")


def test_dependent_periods_are_a_usage_error(capsys):
    code, _, err = run(["periods", "--v1", "2,4", "--v2", "1,2"], capsys)
    assert code == 2 and "dependent" in err


def test_gen_verify_round_trip(tmp_path, capsys):
    path = tmp_path / "w.json"
    assert run(["gen", "--origin", "-5,3", "--size", "30x20", "--out", str(path)], capsys)[0] == 0
    code, out, _ = run(["verify", "--window", str(path)], capsys)
    report = json.loads(out)
    assert code == 0 and report["valid"] and report["violations"] == []
    window = fileio.read_window(str(path))
    assert window == generate_window(Coord2(-5, 3), 30, 20)
    assert report["violationCount"] == len(verify(window))


def test_pipeline_through_stdin():
    gen = subprocess.run(
        [sys.executable, "-m", "aperiodic_tiles", "gen", "--origin", "0,0", "--size", "81x81"],
        capture_output=True, check=True,
    )
    ver = subprocess.run([sys.executable, "-m", "aperiodic_tiles", "verify"], input=gen.stdout, capture_output=True)
    assert ver.returncode == 0
    assert json.loads(ver.stdout)["valid"] is True


def test_invalid_window_exits_one(tmp_path, capsys):
    path = tmp_path / "blank.json"
    fileio.write_window(PatternWindow.blank(Coord2(0, 0), 2, 2), str(path))
    report = tmp_path / "r.json"
    code, _, err = run(["verify", "--window", str(path), "--report", str(report)], capsys)
    assert code == 1 and "angle-2x2" in err
    assert json.loads(report.read_text())["violations"][0]["rule"] == "angle-2x2"


def test_torus_flag(tmp_path, capsys):
    path = tmp_path / "w.json"
    fileio.write_window(generate_window(Coord2(0, 0), 9, 9), str(path))
    assert run(["verify", "--window", str(path), "--torus"], capsys)[0] == 1


@pytest.mark.parametrize(
    "argv",
    [
        ["bogus"],
        ["gen", "--size", "0x3"],
        ["gen", "--size", "3by3"],
        ["verify", "--unknown"],
        ["search", "--size", "2x2", "--budget", "-1"],
        ["render", "--window", "x.json", "--layers", "stars"],
        [],
    ],
)
def test_usage_errors_exit_two(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == 2 and err


def test_io_and_decode_errors_exit_three(tmp_path, capsys):
    assert run(["verify", "--window", str(tmp_path / "missing.json")], capsys)[0] == 3
    bad = tmp_path / "bad.json"
    bad.write_text("{nope")
    assert run(["analyze", "--window", str(bad)], capsys)[0] == 3
    bad.write_text(json.dumps({"version": "aperiodic-window/1", "origin": [0, 0], "width": 1, "height": 1, "cells": [{"blue": 3}]}))
    assert run(["render", "--window", str(bad)], capsys)[0] == 3


def test_search_and_scan(capsys):
    code, out, _ = run(["search", "--size", "2x3", "--budget", "60"], capsys)
    assert code == 0 and json.loads(out)["outcome"] == "unsat"
    assert run(["search", "--size", "3x3", "--budget", "0"], capsys)[0] == 4
    code, out, err = run(["scan", "--max", "3,2", "--budget", "60"], capsys)
    doc = json.loads(out)
    assert code == 0 and len(doc["results"]) == 6
    assert {r["outcome"] for r in doc["results"]} == {"unsat"}
    assert doc["transposition"] == {"pairs": 1, "agreeing": 1}
    assert "h\\w" in err and doc["grid"].count("U") == 6


def test_analyze_and_mutate(tmp_path, capsys):
    path = tmp_path / "w.json"
    fileio.write_window(generate_window(Coord2(0, 0), 27, 27), str(path))
    report = tmp_path / "a.json"
    assert run(["analyze", "--window", str(path), "--report", str(report)], capsys)[0] == 0
    doc = json.loads(report.read_text())
    assert doc["lemmaReport"]["allPass"]
    assert sum(1 for s in doc["squares"] if not s["boundaryTruncated"]) == 91
    code, out, _ = run(["mutate", "--window", str(path), "--samples", "50", "--seed", "9"], capsys)
    assert code == 0 and json.loads(out)["caught"] == 50


def test_render_writes_svg(tmp_path, capsys):
    path = tmp_path / "w.json"
    fileio.write_window(generate_window(Coord2(0, 0), 9, 9), str(path))
    svg = tmp_path / "w.svg"
    assert run(["render", "--window", str(path), "--out", str(svg), "--layers", "blue,coords", "--grid"], capsys)[0] == 0
    assert svg.read_text().startswith("<?xml")


def test_tiles_build(capsys):
    code, out, _ = run(["tiles", "build", "--no-blocks"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["size"] == len(doc["symbols"]) == 4102
    assert doc["symbols"][0] == {"id": 0, "state": {}}


def test_no_color_keeps_stderr_plain(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("NO_COLOR", "1")
    path = tmp_path / "blank.json"
    fileio.write_window(PatternWindow.blank(Coord2(0, 0), 2, 2), str(path))
    _, _, err = run(["verify", "--window", str(path)], capsys)
    assert "\033[" not in err


@pytest.mark.slow
def test_wang_export(tmp_path, capsys):
    out = tmp_path / "wang.json"
    assert run(["wang", "--out", str(out)], capsys)[0] == 0
    doc = json.loads(out.read_text())
    assert doc["tileCount"] == len(doc["tiles"]) == 1_359_458
