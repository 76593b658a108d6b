"""Command-line surface: classify, color, oracle, verify, hunt.

Reports are line-delimited JSON with a fixed key order so corpus runs can
stream, diff, and resume.  The hunt is embarrassingly parallel over graphs;
results are re-sequenced to input order, so output is byte-identical for
any --jobs value.
"""

from __future__ import annotations

import argparse
import json
import sys
from multiprocessing import Pool

from .class_guard import ClassId, find_H_witness, find_R_witness
from .exact_oracles import Coloring, OracleTimeout, chromatic_number, max_clique
from .graph_core import Graph, GraphFormatError, emit_graph6, parse_edge_list, parse_graph6
from .recolor_engine import (
    SCHEMA_ORDER,
    InternalVerificationError,
    bk_color,
    parse_move_line,
    replay_trace,
    trace_to_lines,
    verify_coloring,
)

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_INPUT_ERRORS = 2
EXIT_INTERNAL = 3

CHI_NODES_PER_MS = 100  # deterministic work budget standing in for wall time


def _read_lines(path: str) -> list[str]:
    if path == "-":
        return sys.stdin.read().splitlines()
    with open(path, "r", encoding="ascii") as fh:
        return fh.read().splitlines()


def _looks_like_edge_list(lines: list[str]) -> bool:
    for line in lines:
        if line.strip():
            parts = line.split()
            return len(parts) >= 2 and all(p.isdigit() for p in parts[:2])
    return False


def iter_graphs(path: str, fmt: str = "auto"):
    """Yield (lineno, graph6 text, Graph | None, error | None) per graph.

    Edge-list input is a single graph per file; it is echoed back in
    canonical graph6 form since it has no one-line original.
    """
    lines = _read_lines(path)
    if fmt == "edges" or (fmt == "auto" and _looks_like_edge_list(lines)):
        text = "\n".join(lines)
        try:
            G = parse_edge_list(text)
            yield 1, emit_graph6(G), G, None
        except GraphFormatError as exc:
            yield 1, "", None, str(exc)
        return
    for i, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            yield i, line.strip(), parse_graph6(line), None
        except GraphFormatError as exc:
            yield i, line.strip(), None, str(exc)


def _emit(stream, record: dict) -> None:
    stream.write(json.dumps(record, separators=(",", ":")) + "\n")


def _witness_list(wit):
    return list(wit.vertices) if wit is not None else None


# ---------------------------------------------------------------------------
# classify
# ---------------------------------------------------------------------------


def cmd_classify(args) -> int:
    out = sys.stdout
    errors = 0
    for lineno, text, G, err in iter_graphs(args.input, args.format):
        if err is not None:
            errors += 1
            _emit(out, {"line": lineno, "error": err})
            continue
        hw = find_H_witness(G)
        rw = find_R_witness(G)
        _emit(
            out,
            {
                "line": lineno,
                "graph6": text,
                "n": G.n,
                "h_free": hw is None,
                "h_witness": _witness_list(hw),
                "r_free": rw is None,
                "r_witness": _witness_list(rw),
            },
        )
    return EXIT_INPUT_ERRORS if errors and args.strict else EXIT_OK


# ---------------------------------------------------------------------------
# color
# ---------------------------------------------------------------------------


def _trace_section(text: str, result) -> list[str]:
    # the stated budget is the palette the run actually needed; whether that
    # meets max(omega, delta-1) is the hunt's verdict, not replay validity
    budget = max(result.budget_used, result.colors_used)
    lines = [f"graph {text}", f"budget {budget}"]
    for tr in result.traces:
        lines.extend(trace_to_lines(tr))
    lines.append(f"end {result.colors_used}")
    lines.append("")
    return lines


def cmd_color(args) -> int:
    out = sys.stdout
    errors = 0
    trace_lines: list[str] = []
    cls = ClassId.H_FREE if args.klass == "h" else ClassId.R_FREE
    for lineno, text, G, err in iter_graphs(args.input, args.format):
        if err is not None:
            errors += 1
            _emit(out, {"line": lineno, "error": err})
            continue
        res = bk_color(G, cls)
        _emit(
            out,
            {
                "line": lineno,
                "graph6": text,
                "n": G.n,
                "delta": res.delta,
                "omega": res.omega,
                "bound": res.bound,
                "colors_used": res.colors_used,
                "in_class": res.in_class,
                "coloring": list(res.coloring.colors),
            },
        )
        if args.trace:
            trace_lines.extend(_trace_section(text, res))
    if args.trace:
        with open(args.trace, "w", encoding="ascii") as fh:
            fh.write("\n".join(trace_lines))
    return EXIT_INPUT_ERRORS if errors and args.strict else EXIT_OK


# ---------------------------------------------------------------------------
# oracle
# ---------------------------------------------------------------------------


def cmd_oracle(args) -> int:
    out = sys.stdout
    errors = 0
    cap = args.timeout_ms / 1000.0 if args.timeout_ms else None
    for lineno, text, G, err in iter_graphs(args.input, args.format):
        if err is not None:
            errors += 1
            _emit(out, {"line": lineno, "error": err})
            continue
        rec = {"line": lineno, "graph6": text, "n": G.n}
        timeout = False
        if args.what in ("omega", "both"):
            try:
                rec["omega"] = max_clique(G, time_cap_s=cap).size
            except OracleTimeout:
                rec["omega"] = None
                timeout = True
        if args.what in ("chi", "both"):
            try:
                chi, _ = chromatic_number(G, time_cap_s=cap)
                rec["chi"] = chi
            except OracleTimeout:
                rec["chi"] = None
                timeout = True
        if rec.get("chi") is not None and rec.get("omega") is not None:
            if rec["chi"] < rec["omega"]:
                raise InternalVerificationError(
                    f"chi {rec['chi']} below omega {rec['omega']} on line {lineno}"
                )
        rec["timeout"] = timeout
        _emit(out, rec)
    return EXIT_INPUT_ERRORS if errors and args.strict else EXIT_OK


# ---------------------------------------------------------------------------
# verify: replay a trace file against its graphs
# ---------------------------------------------------------------------------


def parse_trace_file(path: str) -> list[dict]:
    sections = []
    cur = None
    with open(path, "r", encoding="ascii") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            parts = line.split()
            if parts[0] == "graph":
                cur = {"graph6": parts[1], "budget": None, "moves": [], "end": None}
                sections.append(cur)
            elif cur is None:
                raise GraphFormatError(f"trace line {lineno}: move before graph header")
            elif parts[0] == "budget":
                cur["budget"] = int(parts[1])
            elif parts[0] == "schema":
                cur["moves"].append(("schema", parts[1]))
            elif parts[0] == "end":
                cur["end"] = int(parts[1])
            else:
                try:
                    cur["moves"].append(parse_move_line(line))
                except ValueError as exc:
                    raise GraphFormatError(f"trace line {lineno}: {exc}") from None
    return sections


def replay_section(G: Graph, section: dict) -> tuple[bool, list[str]]:
    from .recolor_engine import UNCOLORED, apply_move

    colors = [UNCOLORED] * G.n
    problems: list[str] = []
    for mv in section["moves"]:
        if mv[0] == "schema":
            continue
        try:
            apply_move(G, colors, mv)
        except (ValueError, IndexError) as exc:
            return False, [f"bad move {mv!r}: {exc}"]
    budget = section["budget"]
    if budget is None:
        return False, ["trace section has no budget line"]
    violations = verify_coloring(G, Coloring(tuple(colors), budget), budget)
    for v in violations[:20]:
        problems.append(
            f"{v.kind} vertex={v.vertex} edge={v.edge} color={v.color}"
        )
    used = len({c for c in colors if c != UNCOLORED})
    if section["end"] is not None and used != section["end"]:
        problems.append(f"trace ends with {used} colors, header says {section['end']}")
    return not problems, problems


def cmd_verify(args) -> int:
    sections = parse_trace_file(args.trace)
    graphs = list(iter_graphs(args.input, args.format))
    out = sys.stdout
    if len(sections) != len([g for g in graphs if g[3] is None]):
        print(
            f"verify: {len(sections)} trace sections vs {len(graphs)} graphs",
            file=sys.stderr,
        )
    ok_all = True
    si = 0
    for lineno, text, G, err in graphs:
        if err is not None:
            _emit(out, {"line": lineno, "error": err})
            ok_all = False
            continue
        if si >= len(sections):
            _emit(out, {"line": lineno, "verdict": "FAIL", "problems": ["no trace section"]})
            ok_all = False
            continue
        section = sections[si]
        si += 1
        if section["graph6"] != text:
            _emit(
                out,
                {
                    "line": lineno,
                    "verdict": "FAIL",
                    "problems": [f"trace is for {section['graph6']}, input is {text}"],
                },
            )
            ok_all = False
            continue
        ok, problems = replay_section(G, section)
        _emit(out, {"line": lineno, "verdict": "PASS" if ok else "FAIL", "problems": problems})
        ok_all = ok_all and ok
    return EXIT_OK if ok_all else EXIT_VIOLATION


# ---------------------------------------------------------------------------
# hunt
# ---------------------------------------------------------------------------

RECORD_KEYS = (
    "graph6",
    "n",
    "delta",
    "omega",
    "h_free",
    "r_free",
    "bound",
    "colors_used",
    "exact_chi",
    "schemas",
    "verdict",
)

_HUNT_CFG: dict = {}


def _hunt_init(cfg: dict) -> None:
    global _HUNT_CFG
    _HUNT_CFG = cfg


def hunt_record(text: str, cfg: dict) -> tuple[dict, str]:
    """One graph end-to-end: filters, coloring, verification, verdict."""
    rec = {k: None for k in RECORD_KEYS}
    rec["graph6"] = text
    rec["schemas"] = {}
    trace_text = ""
    try:
        G = parse_graph6(text)
    except GraphFormatError as exc:
        rec["verdict"] = "ERROR"
        rec["_error"] = str(exc)  # routed to stderr, not the record stream
        return rec, trace_text
    rec["n"] = G.n
    rec["delta"] = G.delta
    if G.delta < cfg["min_delta"]:
        rec["verdict"] = "SKIPPED_DELTA"
        return rec, trace_text
    hw = find_H_witness(G)
    rw = find_R_witness(G)
    rec["h_free"] = hw is None
    rec["r_free"] = rw is None
    wanted = cfg["classes"]
    in_scope = ("h" in wanted and hw is None) or ("r" in wanted and rw is None)
    if not in_scope:
        rec["verdict"] = "OFF_CLASS"
        return rec, trace_text
    cls = ClassId.H_FREE if (hw is None and "h" in wanted) else ClassId.R_FREE
    res = bk_color(G, cls)
    rec["omega"] = res.omega
    rec["bound"] = res.bound
    rec["colors_used"] = res.colors_used
    rec["schemas"] = {s: res.histogram[s] for s in SCHEMA_ORDER if s in res.histogram}
    if cfg["chi_nodes"]:
        try:
            chi, _ = chromatic_number(G, time_cap_s=None, node_budget=cfg["chi_nodes"])
            if chi < res.omega:
                raise InternalVerificationError(f"chi {chi} below omega {res.omega}")
            rec["exact_chi"] = chi
        except OracleTimeout:
            rec["exact_chi"] = None

    # soundness gate: replay every trace from scratch before trusting counts
    colors = [0] * G.n
    for tr in res.traces:
        colors = list(replay_trace(G, tr, colors))
    if tuple(colors) != res.coloring.colors:
        raise InternalVerificationError("trace replay does not rebuild the coloring")
    violations = verify_coloring(G, res.coloring, max(res.colors_used, res.bound))
    if violations:
        raise InternalVerificationError(f"hunt coloring invalid: {violations[:3]}")

    z_fired = rec["schemas"].get("Z", 0) > 0
    if res.colors_used <= res.bound and not z_fired:
        rec["verdict"] = "BOUND_MET"
    elif G.delta >= 9:
        rec["verdict"] = "BOUND_VIOLATION_CANDIDATE"
    else:
        rec["verdict"] = "BOUND_NOT_APPLICABLE"
    if cfg["trace"]:
        trace_text = "\n".join(_trace_section(text, res))
    return rec, trace_text


def _hunt_work(item: tuple[int, str]):
    lineno, text = item
    try:
        rec, trace_text = hunt_record(text, _HUNT_CFG)
        return lineno, rec, trace_text, None
    except InternalVerificationError as exc:
        return lineno, None, "", str(exc)


def cmd_hunt(args) -> int:
    classes = {"h", "r"} if args.klass == "both" else {args.klass}
    cfg = {
        "classes": classes,
        "min_delta": args.min_delta,
        "chi_nodes": args.chi_timeout_ms * CHI_NODES_PER_MS,
        "trace": bool(args.trace),
    }
    lines = [
        (i, line.strip())
        for i, line in enumerate(_read_lines(args.input), start=1)
        if line.strip()
    ]
    skip = 0
    out_fh = None
    if args.out:
        mode = "a" if args.resume else "w"
        if args.resume:
            try:
                with open(args.out, "r", encoding="ascii") as fh:
                    skip = sum(1 for _ in fh)
            except FileNotFoundError:
                skip = 0
        out_fh = open(args.out, mode, encoding="ascii")
    out = out_fh if out_fh is not None else sys.stdout

    todo = lines[skip:]
    summary = {"total": 0, "verdicts": {}, "schemas": {}, "errors": 0}
    violations = 0
    internal_failure = None
    trace_fh = open(args.trace, "w", encoding="ascii") if args.trace else None

    def consume(result) -> None:
        nonlocal violations, internal_failure
        lineno, rec, trace_text, internal = result
        if internal is not None:
            internal_failure = internal
            return
        summary["total"] += 1
        verdict = rec["verdict"]
        summary["verdicts"][verdict] = summary["verdicts"].get(verdict, 0) + 1
        if verdict == "ERROR":
            summary["errors"] += 1
            print(f"hunt: line {lineno}: {rec.pop('_error')}", file=sys.stderr)
        if verdict == "BOUND_VIOLATION_CANDIDATE":
            violations += 1
        for s, k in (rec.get("schemas") or {}).items():
            summary["schemas"][s] = summary["schemas"].get(s, 0) + k
        _emit(out, rec)
        if trace_fh is not None and trace_text:
            trace_fh.write(trace_text + "\n")

    try:
        if args.jobs > 1:
            with Pool(args.jobs, initializer=_hunt_init, initargs=(cfg,)) as pool:
                for result in pool.imap(_hunt_work, todo, chunksize=16):
                    consume(result)
                    if internal_failure:
                        break
        else:
            _hunt_init(cfg)
            for item in todo:
                consume(_hunt_work(item))
                if internal_failure:
                    break
    finally:
        if out_fh is not None:
            out_fh.close()
        if trace_fh is not None:
            trace_fh.close()

    summary["schemas"] = {
        s: summary["schemas"][s] for s in SCHEMA_ORDER if s in summary["schemas"]
    }
    print(json.dumps({"summary": summary}, separators=(",", ":")), file=sys.stderr)
    if internal_failure:
        print(f"internal verification failure: {internal_failure}", file=sys.stderr)
        return EXIT_INTERNAL
    if violations:
        return EXIT_VIOLATION
    if summary["errors"] and args.strict:
        return EXIT_INPUT_ERRORS
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument surface
# ---------------------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("input", help="graph6 lines, edge-list file, or - for stdin")
    p.add_argument("--format", choices=("auto", "graph6", "edges"), default="auto")
    p.add_argument("--strict", action="store_true", help="nonzero exit on parse errors")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="bkcolor",
        description="Max(omega, Delta-1) coloring engine and verification harness",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="class membership flags plus witnesses")
    _add_common(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("color", help="run the peel-and-reinsert colorer")
    _add_common(p)
    p.add_argument("--class", dest="klass", choices=("h", "r"), default="h")
    p.add_argument("--trace", help="write replayable move traces to this file")
    p.set_defaults(func=cmd_color)

    p = sub.add_parser("oracle", help="exact chromatic number / clique number")
    _add_common(p)
    p.add_argument("--what", choices=("chi", "omega", "both"), default="both")
    p.add_argument("--timeout-ms", type=int, default=10000)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("verify", help="replay a trace file against its graphs")
    _add_common(p)
    p.add_argument("--trace", required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("hunt", help="corpus run checking colors <= max(omega, Delta-1)")
    _add_common(p)
    p.add_argument("--class", dest="klass", choices=("h", "r", "both"), default="both")
    p.add_argument("--min-delta", type=int, default=9)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--seed", type=int, default=0, help="reserved; hunt is deterministic")
    p.add_argument(
        "--chi-timeout-ms",
        type=int,
        default=10000,
        help="deterministic work budget for the exact oracle; 0 skips it",
    )
    p.add_argument("--trace", help="write replayable move traces to this file")
    p.add_argument("--out", help="write report records to this file instead of stdout")
    p.add_argument("--resume", action="store_true", help="skip graphs already in --out")
    p.set_defaults(func=cmd_hunt)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
