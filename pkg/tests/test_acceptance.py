"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines as they
are produced; they are also collected into a summary section at the end of
the session. Set ``APERIODIC_STRETCH=1`` to add the non-gating 9x9 scan.
"""

from __future__ import annotations

import json
import os
import subprocess
import sys
import time

import numpy as np
import pytest

from aperiodic_tiles import fileio
from aperiodic_tiles.generator import generate_window, squares_in
from aperiodic_tiles.model import Coord2, PatternWindow, enumerate_alphabet
from aperiodic_tiles.periodicity import derive_axis_periods, scan, search_torus
from aperiodic_tiles.rules import block_count, block_recode, domino_violations, to_wang, wang_mismatches, wang_window
from aperiodic_tiles.verifier import check_lemmas, extract_blue_paths, mutate_check, verify

from oracles import ForbiddenPatterns, blue_blank_symbols, torus_symbols


def record(log: list[str], n: int, ok: bool, detail: str) -> None:
    line = f"criterion {n} {'PASS' if ok else 'FAIL'}: {detail}"
    log.append(line)
    print(line)


# -- 1 generator validity ----------------------------------------------------


def test_criterion_1_generator_validity(tileset, acceptance_log):
    rng = np.random.default_rng(20240601)
    runs = [(Coord2(0, 0), s) for s in (9, 27, 81, 243)]
    runs += [(Coord2(int(x), int(y)), 243) for x, y in rng.integers(-500, 501, size=(20, 2))]
    failures, slowest = [], 0.0
    for origin, s in runs:
        t0 = time.perf_counter()
        found = verify(generate_window(origin, s, s), tileset, wrap="open")
        elapsed = time.perf_counter() - t0
        if s == 243:
            slowest = max(slowest, elapsed)
        if found or (s == 243 and elapsed >= 10.0):
            failures.append((origin, s, len(found), round(elapsed, 2)))
    ok = not failures
    record(acceptance_log, 1, ok, f"{len(runs)} windows clean, slowest 243x243 run {slowest:.2f}s (limit 10s); failures={failures}")
    assert ok


# -- 2 structure census and lemmas -------------------------------------------


def test_criterion_2_census_and_lemmas(window27, window243, acceptance_log):
    closed = [sq for sq in extract_blue_paths(window27) if sq.closed]
    got = {side: sum(sq.side == side for sq in closed) for side in (1, 3, 9)}
    # lattice oracle: level-k squares that fit entirely inside the window
    want = {3**k: len(squares_in(Coord2(0, 0), 27, 27, k)) for k in range(3)}
    extra = len(closed) - sum(got.values())
    report = check_lemmas(window243)
    failing = {name: r for name, r in report.results.items() if r.status == "fail"}
    empty = [name for name, r in report.results.items() if r.status == "not-applicable"]
    ok = got == want == {1: 81, 3: 9, 9: 1} and extra == 0 and report.all_pass and not empty
    record(
        acceptance_log, 2, ok,
        f"27x27 closed squares {got[1]}/{got[3]}/{got[9]} (oracle {want[1]}/{want[3]}/{want[9]}); "
        f"{len(report.results)} lemma checks on 243x243, failing={sorted(failing)}, unchecked={empty}",
    )
    assert ok


# -- 3 aperiodicity at desk scale --------------------------------------------


def test_criterion_3_no_small_torus(tileset, acceptance_log):
    table = scan(6, 6, 60.0, tileset)
    outcomes = {r.outcome for r in table.values()}
    slowest = max(r.stats.wall_time for r in table.values())
    ok = len(table) == 36 and outcomes == {"unsat"}
    record(acceptance_log, 3, ok, f"{len(table)} tori up to 6x6, outcomes={sorted(outcomes)}, slowest {slowest:.2f}s (budget 60s)")
    assert ok


@pytest.mark.skipif(not os.environ.get("APERIODIC_STRETCH"), reason="stretch scan runs only with APERIODIC_STRETCH=1")
def test_criterion_3_stretch_report(tileset, acceptance_log):
    table = scan(9, 9, 60.0, tileset)
    counts = {o: sum(r.outcome == o for r in table.values()) for o in ("unsat", "sat", "timeout")}
    timeouts = sorted(k for k, r in table.items() if r.outcome == "timeout")
    line = f"criterion 3 stretch (not gating): 9x9 scan {counts}, timeouts at {timeouts}"
    acceptance_log.append(line)
    print(line)
    assert counts["sat"] == 0


# -- 4 oracle equivalence ----------------------------------------------------


def test_criterion_4_oracle_equivalence(tileset, acceptance_log):
    symbols = np.array(blue_blank_symbols())
    patterns = ForbiddenPatterns(symbols.tolist())
    rng = np.random.default_rng(4)
    agree, valid_windows = 0, 0
    for _ in range(1000):
        cells = symbols[rng.integers(0, len(symbols), size=(4, 4))]
        got = {(v.location.x, v.location.y) for v in verify(PatternWindow(Coord2(0, 0), cells), tileset)}
        want = patterns.violations(cells)
        agree += got == want
        valid_windows += not want

    small = torus_symbols()
    sizes = [(w, h) for w in range(1, 7) for h in range(1, 7) if w * h <= 6]
    torus_agree, torus_total = 0, 0
    for angle_rule in (True, False):
        sub = tileset.restrict(small, angle_rule=angle_rule)
        naive = ForbiddenPatterns(small, angle_rule=angle_rule)
        for w, h in sizes:
            expected = "sat" if naive.torus_has_solution(w, h) else "unsat"
            torus_agree += search_torus(w, h, sub).outcome == expected
            torus_total += 1
    ok = agree == 1000 and torus_agree == torus_total
    record(
        acceptance_log, 4, ok,
        f"verify agrees on {agree}/1000 random 4x4 windows ({valid_windows} valid); "
        f"search agrees with enumeration on {torus_agree}/{torus_total} tori (w*h<=6, corner rule on and off)",
    )
    assert ok


# -- 5 mutation test ---------------------------------------------------------


def test_criterion_5_mutations_are_caught(window81, tileset, acceptance_log):
    report = mutate_check(window81, 1000, seed=5, tileset=tileset)
    silent = [(p.x, p.y, a, b) for p, a, b in report.silent]
    ok = report.caught == 1000
    record(acceptance_log, 5, ok, f"{report.caught}/{report.samples} mutations caught; silent (x, y, original, replacement)={silent}")
    assert ok


# -- 6 axis periods ----------------------------------------------------------


def _formula(v1, v2):
    """Evaluate x'.(x, y) - x.(x', y') and its y-counterpart directly."""
    (x, y), (x2, y2) = v1, v2
    vertical = (x2 * x - x * x2, x2 * y - x * y2)
    horizontal = (y2 * x - y * x2, y2 * y - y * y2)
    return (abs(horizontal[0]), horizontal[1]), (vertical[0], abs(vertical[1]))


def test_criterion_6_axis_period_formula(acceptance_log):
    rng = np.random.default_rng(6)
    agree = 0
    pairs = 0
    while pairs < 1000:
        v1, v2 = (tuple(int(c) for c in rng.integers(-1000, 1001, size=2)) for _ in range(2))
        if v1[0] * v2[1] == v1[1] * v2[0]:
            continue
        pairs += 1
        agree += derive_axis_periods(v1, v2) == _formula(v1, v2)
    rejected = 0
    for _ in range(100):
        base = (0, 0)
        while base == (0, 0):
            base = tuple(int(c) for c in rng.integers(-60, 61, size=2))
        a, b = (int(k) for k in rng.choice(np.r_[-9:0, 1:10], size=2))
        try:
            derive_axis_periods((a * base[0], a * base[1]), (b * base[0], b * base[1]))
        except ValueError:
            rejected += 1
    ok = agree == 1000 and rejected == 100
    record(acceptance_log, 6, ok, f"{agree}/1000 independent pairs match the formula; {rejected}/100 dependent pairs rejected")
    assert ok


# -- 7 Wang equivalence ------------------------------------------------------


def test_criterion_7_wang_equivalence(tileset, acceptance_log):
    wang = to_wang(tileset)
    n = len(enumerate_alphabet())

    def keys(blocks: np.ndarray) -> np.ndarray:
        b = blocks.astype(np.int64)
        return ((b[..., 0] * n + b[..., 1]) * n + b[..., 2]) * n + b[..., 3]

    tile_keys = keys(wang.blocks)
    order = np.argsort(tile_keys)
    sorted_keys = tile_keys[order]
    rng = np.random.default_rng(7)
    windows = [(Coord2(0, 0), s) for s in (2, 3, 9, 27, 81)]
    windows += [(Coord2(int(x), int(y)), 81) for x, y in rng.integers(-500, 501, size=(3, 2))]
    problems = []
    for origin, s in windows:
        bw = block_recode(generate_window(origin, s, s), tileset)
        k = keys(bw.blocks)
        pos = np.searchsorted(sorted_keys, k)
        known = (pos < len(sorted_keys)) & (sorted_keys[np.minimum(pos, len(sorted_keys) - 1)] == k)
        if not known.all():
            problems.append((origin, s, "block outside the Wang set"))
            continue
        tiles = wang.tiles[order[pos]]
        counts = (len(domino_violations(bw)), wang_mismatches(tiles), wang_mismatches(wang_window(bw)))
        if any(counts):
            problems.append((origin, s, counts))
    legal = block_count(tileset)
    ok = not problems and len(wang) == legal
    record(
        acceptance_log, 7, ok,
        f"{len(windows)} recoded windows up to 81x81 clean under domino and Wang matching; "
        f"{len(wang)} Wang tiles vs {legal} legal 2x2 blocks; problems={problems}",
    )
    assert ok


# -- 8 determinism -----------------------------------------------------------


def _cli(args: list[str], stdin: bytes | None = None) -> subprocess.CompletedProcess:
    env = dict(os.environ, NO_COLOR="1")
    return subprocess.run([sys.executable, "-m", "aperiodic_tiles", *args], input=stdin, capture_output=True, env=env)


def _strip(doc, keys: tuple[str, ...]):
    if isinstance(doc, dict):
        return {k: _strip(v, keys) for k, v in doc.items() if k not in keys}
    if isinstance(doc, list):
        return [_strip(v, keys) for v in doc]
    return doc


def test_criterion_8_determinism(tmp_path, acceptance_log):
    window = generate_window(Coord2(0, 0), 27, 27)
    cells = window.cells.copy()
    cells[13, 13] = cells[13, 14]
    bad = tmp_path / "bad.json"
    fileio.write_window(PatternWindow(window.origin, cells), str(bad))

    jobs = {
        "alphabet": (["tiles", "build", "--no-blocks"], True),
        "generator": (["gen", "--origin", "-13,7", "--size", "81x81"], False),
        "verify": (["verify", "--window", str(bad)], True),
        "scan": (["scan", "--max", "3", "--budget", "60"], True),
    }
    mismatches = []
    for name, (args, is_json) in jobs.items():
        outs = [_cli(args), _cli(args), _cli(["--threads", "1", *args]), _cli(["--threads", "4", *args])]
        codes = {p.returncode for p in outs}
        if is_json:
            # wall-clock fields vary by nature; the echoed argv differs by --threads
            docs = [_strip(json.loads(p.stdout), ("wallTime",)) for p in outs]
            same_runs = docs[0] == docs[1]
            same_threads = _strip(docs[2], ("command",)) == _strip(docs[3], ("command",))
        else:
            same_runs = outs[0].stdout == outs[1].stdout
            same_threads = outs[2].stdout == outs[3].stdout == outs[0].stdout
        if len(codes) != 1 or not (same_runs and same_threads):
            mismatches.append((name, sorted(codes), same_runs, same_threads))
    alphabet_size = json.loads(_cli(jobs["alphabet"][0]).stdout)["size"]
    ok = not mismatches and alphabet_size == len(enumerate_alphabet())
    record(
        acceptance_log, 8, ok,
        f"alphabet ({alphabet_size}), generator bytes, verify report and scan table identical across runs "
        f"and --threads 1/4; mismatches={mismatches}",
    )
    assert ok
