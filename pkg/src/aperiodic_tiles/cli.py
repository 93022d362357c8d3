"""Command-line entry point: ``python3 -m aperiodic_tiles <command> ...``.

Exit codes: 0 success, 1 invalid window (or failed check), 2 usage error,
3 I/O or decode error, 4 search timeout. Structured output is JSON and goes
to ``--out``/``--report`` or stdout; logs go to stderr.
"""

from __future__ import annotations

import argparse
import logging
import os
import re
import sys
import time
from typing import Optional, Sequence

from . import fileio
from .fileio import DecodeError
from .generator import generate_window
from .model import Coord2, enumerate_alphabet
from .periodicity import derive_axis_periods, scan, search_torus
from .render import LAYERS, RenderStyle, render_svg
from .rules import block_count, compile_tileset, to_wang
from .verifier import Structure, check_lemmas, mutate_check, verify

EXIT_OK, EXIT_INVALID, EXIT_USAGE, EXIT_IO, EXIT_TIMEOUT = 0, 1, 2, 3, 4

log = logging.getLogger("aperiodic_tiles")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # raise instead of exiting, so cli_main returns a code
        raise UsageError(f"{self.prog}: {message}")


def _pair(text: str, sep: str, what: str) -> tuple[int, int]:
    m = re.fullmatch(rf"\s*(-?\d+)\s*{sep}\s*(-?\d+)\s*", text)
    if not m:
        raise argparse.ArgumentTypeError(f"expected {what}, got {text!r}")
    return int(m.group(1)), int(m.group(2))


def _xy(text: str) -> tuple[int, int]:
    return _pair(text, ",", "X,Y")


def _size(text: str) -> tuple[int, int]:
    w, h = _pair(text, "[xX]", "WxH")
    if w < 1 or h < 1:
        raise argparse.ArgumentTypeError("sizes must be positive")
    return w, h


def _max(text: str) -> tuple[int, int]:
    if re.fullmatch(r"\s*\d+\s*", text):
        n = int(text)
        w, h = n, n
    else:
        w, h = _pair(text, ",", "W[,H]")
    if w < 1 or h < 1:
        raise argparse.ArgumentTypeError("sizes must be positive")
    return w, h


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def _budget(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected seconds, got {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError("budget must be non-negative")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="aperiodic-tiles", description="Build, generate, verify and search the aperiodic tile set.")
    p.add_argument("--threads", type=_positive, default=1, help="parallelism cap for verify/search (default 1)")
    p.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    tiles = sub.add_parser("tiles", help="tile set export")
    tiles_sub = tiles.add_subparsers(dest="action", required=True, parser_class=_Parser)
    build = tiles_sub.add_parser("build", help="export the alphabet and pair rules as JSON")
    build.add_argument("--out")
    build.add_argument("--no-blocks", action="store_true", help="skip counting the 2x2 block alphabet")

    gen = sub.add_parser("gen", help="generate a window of the canonical configuration")
    gen.add_argument("--origin", type=_xy, default=(0, 0))
    gen.add_argument("--size", type=_size, required=True)
    gen.add_argument("--out")

    ver = sub.add_parser("verify", help="check a window against the local rules")
    ver.add_argument("--window", default="-", help="window file, '-' for stdin (default)")
    ver.add_argument("--torus", action="store_true", help="wrap edges around")
    ver.add_argument("--report")

    ana = sub.add_parser("analyze", help="extract squares and check the structural lemmas")
    ana.add_argument("--window", default="-")
    ana.add_argument("--report")

    mut = sub.add_parser("mutate", help="single-cell mutation test")
    mut.add_argument("--window", default="-")
    mut.add_argument("--samples", type=_positive, default=1000)
    mut.add_argument("--seed", type=int, default=0)
    mut.add_argument("--report")

    sea = sub.add_parser("search", help="search for a tiling of one torus")
    sea.add_argument("--size", type=_size, required=True)
    sea.add_argument("--budget", type=_budget, default=60.0)
    sea.add_argument("--out")

    sc = sub.add_parser("scan", help="search every torus up to a size")
    sc.add_argument("--max", type=_max, required=True)
    sc.add_argument("--budget", type=_budget, default=60.0)
    sc.add_argument("--out")

    per = sub.add_parser("periods", help="axis-aligned periods implied by two independent periods")
    per.add_argument("--v1", type=_xy, required=True)
    per.add_argument("--v2", type=_xy, required=True)

    wang = sub.add_parser("wang", help="export the Wang tile set of legal 2x2 blocks")
    wang.add_argument("--out")

    ren = sub.add_parser("render", help="draw a window as SVG")
    ren.add_argument("--window", default="-")
    ren.add_argument("--out")
    ren.add_argument("--layers", default="blue,diagonals,arms,marks")
    ren.add_argument("--cell-size", type=_positive, default=12)
    ren.add_argument("--grid", action="store_true")
    return p


# -- helpers ---------------------------------------------------------------


class _Formatter(logging.Formatter):
    COLORS = {"ERROR": "\033[31m", "WARNING": "\033[33m"}

    def __init__(self, color: bool):
        super().__init__("%(levelname)s: %(message)s")
        self.color = color

    def format(self, record: logging.LogRecord) -> str:
        text = super().format(record)
        code = self.COLORS.get(record.levelname) if self.color else None
        return f"{code}{text}\033[0m" if code else text


def _setup_logging(verbose: bool) -> None:
    color = "NO_COLOR" not in os.environ and sys.stderr.isatty()
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(_Formatter(color))
    log.handlers[:] = [handler]
    log.setLevel(logging.DEBUG if verbose else logging.INFO)
    log.propagate = False


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _emit(text: str, path: Optional[str]) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
        log.info("wrote %s", path)


def _load_window(path: str):
    text = _read_text(path)
    return fileio.window_from_json(fileio.loads(text)), fileio.digest(text)


# -- commands --------------------------------------------------------------


def _cmd_tiles(args, argv) -> int:
    ts = compile_tileset()
    doc = ts.to_json(include_blocks=not args.no_blocks)
    log.info("alphabet: %d symbols", len(ts))
    _emit(fileio.dumps(doc), args.out)
    return EXIT_OK


def _cmd_gen(args, argv) -> int:
    (x, y), (w, h) = args.origin, args.size
    window = generate_window(Coord2(x, y), w, h)
    _emit(fileio.dumps(fileio.window_to_json(window)), args.out)
    return EXIT_OK


def _cmd_verify(args, argv) -> int:
    window, dig = _load_window(args.window)
    t0 = time.monotonic()
    found = verify(window, wrap="torus" if args.torus else "open", threads=args.threads)
    report = fileio.make_report(
        argv,
        {"valid": not found, "violationCount": len(found), "violations": fileio.violations_json(found)},
        {"window": dig},
        time.monotonic() - t0,
    )
    _emit(fileio.dumps(report), args.report)
    if found:
        log.error("%d violation(s); first: %s at %d,%d", len(found), found[0].rule, found[0].location.x, found[0].location.y)
        return EXIT_INVALID
    log.info("window %dx%d is valid", window.width, window.height)
    return EXIT_OK


def _cmd_analyze(args, argv) -> int:
    window, dig = _load_window(args.window)
    t0 = time.monotonic()
    st = Structure(window)
    lemmas = check_lemmas(window, st)
    body = {"squares": fileio.squares_json(st.squares), "lemmaReport": fileio.lemma_report_json(lemmas)}
    _emit(fileio.dumps(fileio.make_report(argv, body, {"window": dig}, time.monotonic() - t0)), args.report)
    for name, r in lemmas.results.items():
        log.info("%-18s %-15s checked=%d", name, r.status, r.checked)
    return EXIT_OK if lemmas.all_pass else EXIT_INVALID


def _cmd_mutate(args, argv) -> int:
    window, dig = _load_window(args.window)
    if verify(window, threads=args.threads):
        log.error("mutation testing needs a valid window")
        return EXIT_INVALID
    t0 = time.monotonic()
    rep = mutate_check(window, args.samples, args.seed)
    body = {
        "samples": rep.samples,
        "caught": rep.caught,
        "seed": args.seed,
        "silent": [{"cell": [p.x, p.y], "original": a, "replacement": b} for p, a, b in rep.silent],
    }
    _emit(fileio.dumps(fileio.make_report(argv, body, {"window": dig}, time.monotonic() - t0)), args.report)
    log.info("caught %d of %d mutations", rep.caught, rep.samples)
    return EXIT_OK if rep.caught == rep.samples else EXIT_INVALID


def _cmd_search(args, argv) -> int:
    w, h = args.size
    res = search_torus(w, h, budget=args.budget, threads=args.threads)
    _emit(fileio.dumps(fileio.make_report(argv, fileio.search_result_json(res))), args.out)
    log.info("%dx%d torus: %s (%d nodes)", w, h, res.outcome, res.stats.nodes)
    return EXIT_TIMEOUT if res.outcome == "timeout" else EXIT_OK


def scan_grid(table: dict) -> str:
    """Plain-text grid of scan outcomes, rows by height, columns by width."""
    ws = sorted({w for w, _ in table})
    hs = sorted({h for _, h in table})
    letter = {"unsat": "U", "sat": "S", "timeout": "T"}
    lines = ["h\\w " + " ".join(f"{w:>2}" for w in ws)]
    for h in hs:
        lines.append(f"{h:>3} " + " ".join(f"{letter[table[(w, h)].outcome]:>2}" for w in ws))
    return "\n".join(lines) + "\n"


def transposition_agreement(table: dict) -> dict:
    pairs = [(w, h) for (w, h) in table if w < h and (h, w) in table]
    agree = [p for p in pairs if table[p].outcome == table[(p[1], p[0])].outcome]
    return {"pairs": len(pairs), "agreeing": len(agree)}


def _cmd_scan(args, argv) -> int:
    mw, mh = args.max
    t0 = time.monotonic()
    table = scan(mw, mh, args.budget, threads=args.threads)
    body = {
        "results": [fileio.search_result_json(table[k]) for k in sorted(table, key=lambda k: (k[1], k[0]))],
        "transposition": transposition_agreement(table),
        "grid": scan_grid(table),
    }
    _emit(fileio.dumps(fileio.make_report(argv, body, None, time.monotonic() - t0)), args.out)
    sys.stderr.write(scan_grid(table))
    outcomes = [r.outcome for r in table.values()]
    log.info("%d tori: %d unsat, %d sat, %d timeout", len(outcomes), outcomes.count("unsat"),
             outcomes.count("sat"), outcomes.count("timeout"))
    return EXIT_TIMEOUT if "timeout" in outcomes else EXIT_OK


def _cmd_periods(args, argv) -> int:
    try:
        (p, _), (_, q) = derive_axis_periods(args.v1, args.v2)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    print(f"({p},0) (0,{q})")
    return EXIT_OK


def _cmd_wang(args, argv) -> int:
    wang = to_wang()
    doc = {
        "version": "aperiodic-wang/1",
        "tileCount": len(wang),
        "colorCounts": wang.colors,
        "edgeOrder": ["north", "east", "south", "west"],
        "tiles": wang.tiles.tolist(),
        "blocks": wang.blocks.tolist(),
    }
    log.info("%d Wang tiles (%d legal 2x2 blocks)", len(wang), block_count(compile_tileset()))
    _emit(fileio.dumps(doc), args.out)
    return EXIT_OK


def _cmd_render(args, argv) -> int:
    layers = frozenset(x.strip() for x in args.layers.split(",") if x.strip())
    if not layers <= set(LAYERS):
        raise UsageError(f"unknown layers {sorted(layers - set(LAYERS))}; choose from {', '.join(LAYERS)}")
    window, _ = _load_window(args.window)
    svg = render_svg(window, RenderStyle(cell_size=args.cell_size, layers=layers, show_grid=args.grid))
    _emit(svg, args.out)
    return EXIT_OK


_COMMANDS = {
    "tiles": _cmd_tiles,
    "gen": _cmd_gen,
    "verify": _cmd_verify,
    "analyze": _cmd_analyze,
    "mutate": _cmd_mutate,
    "search": _cmd_search,
    "scan": _cmd_scan,
    "periods": _cmd_periods,
    "wang": _cmd_wang,
    "render": _cmd_render,
}


_COORD_FLAGS = ("--origin", "--v1", "--v2")


def _join_negative_values(argv: list[str]) -> list[str]:
    """Let ``--origin -5,3`` through: argparse would read ``-5,3`` as a flag."""
    out: list[str] = []
    i = 0
    while i < len(argv):
        if argv[i] in _COORD_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def cli_main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_join_negative_values(argv))
    except UsageError as exc:
        sys.stderr.write(f"{exc}\n")
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    _setup_logging(args.verbose)
    enumerate_alphabet()
    try:
        return _COMMANDS[args.command](args, argv)
    except UsageError as exc:
        log.error("%s", exc)
        return EXIT_USAGE
    except DecodeError as exc:
        log.error("decode error: %s", exc)
        return EXIT_IO
    except OSError as exc:
        log.error("I/O error: %s", exc)
        return EXIT_IO


def main() -> None:
    sys.exit(cli_main())
