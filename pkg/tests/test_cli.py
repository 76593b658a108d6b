from __future__ import annotations

import json

import pytest

from bkcolor.cli import main
from bkcolor.graph_core import emit_graph6, make_graph

from conftest import complete, complete_multipartite, cycle


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def records(out: str):
    return [json.loads(line) for line in out.splitlines() if line.strip()]


@pytest.fixture
def mixed_file(tmp_path):
    p = tmp_path / "graphs.g6"
    lines = [emit_graph6(cycle(5)), emit_graph6(cycle(7)), emit_graph6(complete(10))]
    p.write_text("\n".join(lines) + "\n")
    return p


class TestClassify:
    def test_flags_and_witnesses(self, capsys, mixed_file):
        code, out, _ = run_cli(capsys, "classify", str(mixed_file))
        assert code == 0
        recs = records(out)
        assert recs[0]["h_free"] and recs[0]["r_free"]
        assert not recs[1]["h_free"] and recs[1]["h_witness"] == [0, 1, 2, 4]
        assert not recs[1]["r_free"] and recs[1]["r_witness"] == [0, 1, 3, 5]
        assert recs[2]["h_free"] and recs[2]["r_free"]

    def test_malformed_line_continues(self, capsys, tmp_path):
        p = tmp_path / "bad.g6"
        p.write_text(emit_graph6(cycle(5)) + "\nD?\n" + emit_graph6(cycle(7)) + "\n")
        code, out, _ = run_cli(capsys, "classify", str(p))
        recs = records(out)
        assert code == 0 and len(recs) == 3
        assert "error" in recs[1]

    def test_strict_exit_code(self, capsys, tmp_path):
        p = tmp_path / "bad.g6"
        p.write_text("D?\n")
        code, _, _ = run_cli(capsys, "classify", str(p), "--strict")
        assert code == 2

    def test_edge_list_input(self, capsys, tmp_path):
        p = tmp_path / "g.edges"
        p.write_text("5 5\n0 1\n1 2\n2 3\n3 4\n4 0\n")
        code, out, _ = run_cli(capsys, "classify", str(p))
        recs = records(out)
        assert code == 0 and recs[0]["h_free"] and recs[0]["n"] == 5


class TestColor:
    def test_counts(self, capsys, tmp_path):
        p = tmp_path / "in.g6"
        G1 = complete(10)
        G2 = make_graph(
            10,
            [(i, j) for i in range(10) for j in range(i + 1, 10) if (i, j) != (8, 9)],
        )
        G3 = complete_multipartite([1] * 7 + [2, 2])
        p.write_text("\n".join(emit_graph6(g) for g in (G1, G2, G3)) + "\n")
        code, out, _ = run_cli(capsys, "color", str(p), "--class", "h")
        recs = records(out)
        assert code == 0
        assert [r["colors_used"] for r in recs] == [10, 9, 9]
        assert all(r["colors_used"] <= r["bound"] for r in recs)

    def test_trace_roundtrip_via_verify(self, capsys, tmp_path):
        p = tmp_path / "in.g6"
        p.write_text(emit_graph6(complete(10)) + "\n" + emit_graph6(cycle(5)) + "\n")
        trace = tmp_path / "t.trace"
        code, _, _ = run_cli(capsys, "color", str(p), "--trace", str(trace))
        assert code == 0 and trace.exists()
        code, out, _ = run_cli(capsys, "verify", str(p), "--trace", str(trace))
        recs = records(out)
        assert code == 0
        assert all(r["verdict"] == "PASS" for r in recs)

    def test_verify_catches_tampering(self, capsys, tmp_path):
        p = tmp_path / "in.g6"
        p.write_text(emit_graph6(complete(4)) + "\n")
        trace = tmp_path / "t.trace"
        run_cli(capsys, "color", str(p), "--trace", str(trace))
        text = trace.read_text()
        # force two adjacent vertices onto one color
        tampered = text.replace("assign 1 2", "assign 1 1")
        assert tampered != text
        trace.write_text(tampered)
        code, out, _ = run_cli(capsys, "verify", str(p), "--trace", str(trace))
        recs = records(out)
        assert code == 1 and recs[0]["verdict"] == "FAIL"
        assert any("edge_conflict" in p for p in recs[0]["problems"])

    def test_verify_empty_trace_fails(self, capsys, tmp_path):
        p = tmp_path / "in.g6"
        p.write_text(emit_graph6(cycle(5)) + "\n")
        trace = tmp_path / "t.trace"
        trace.write_text(f"graph {emit_graph6(cycle(5))}\nbudget 3\n")
        code, out, _ = run_cli(capsys, "verify", str(p), "--trace", str(trace))
        recs = records(out)
        assert code == 1 and recs[0]["verdict"] == "FAIL"
        assert any("uncolored" in p for p in recs[0]["problems"])


class TestOracle:
    def test_values(self, capsys, tmp_path):
        p = tmp_path / "in.g6"
        from conftest import petersen

        p.write_text(
            "\n".join(
                emit_graph6(g) for g in (cycle(5), petersen(), complete(10))
            )
            + "\n"
        )
        code, out, _ = run_cli(capsys, "oracle", str(p), "--what", "both")
        recs = records(out)
        assert code == 0
        assert [(r["chi"], r["omega"]) for r in recs] == [(3, 2), (3, 2), (10, 10)]
        assert not any(r["timeout"] for r in recs)


class TestHunt:
    def test_delta_filter_skips(self, capsys, tmp_path):
        p = tmp_path / "in.g6"
        p.write_text(emit_graph6(cycle(5)) + "\n")
        code, out, err = run_cli(capsys, "hunt", str(p))
        recs = records(out)
        assert code == 0
        assert recs[0]["verdict"] == "SKIPPED_DELTA"
        summary = json.loads(err.splitlines()[-1])["summary"]
        assert summary["verdicts"] == {"SKIPPED_DELTA": 1}

    def test_bound_met_records(self, capsys, tmp_path):
        p = tmp_path / "in.g6"
        G2 = complete_multipartite([1] * 7 + [2, 2])
        p.write_text(emit_graph6(complete(10)) + "\n" + emit_graph6(G2) + "\n")
        code, out, err = run_cli(capsys, "hunt", str(p), "--class", "h")
        recs = records(out)
        assert code == 0
        assert all(r["verdict"] == "BOUND_MET" for r in recs)
        assert recs[0]["colors_used"] == 10 and recs[0]["exact_chi"] == 10
        assert recs[1]["exact_chi"] == 9
        assert list(recs[0].keys()) == [
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
        ]

    def test_off_class_verdict(self, capsys, tmp_path):
        # K10 plus a disjoint 3-path realizes both forbidden patterns
        p = tmp_path / "in.g6"
        G = make_graph(
            13,
            [(i, j) for i in range(10) for j in range(i + 1, 10)]
            + [(10, 11), (11, 12)],
        )
        p.write_text(emit_graph6(G) + "\n")
        code, out, _ = run_cli(capsys, "hunt", str(p), "--class", "h")
        recs = records(out)
        assert recs[0]["verdict"] == "OFF_CLASS"
        assert recs[0]["h_free"] is False and recs[0]["r_free"] is False

    def test_chi_can_be_skipped(self, capsys, tmp_path):
        p = tmp_path / "in.g6"
        p.write_text(emit_graph6(complete(10)) + "\n")
        _, out, _ = run_cli(capsys, "hunt", str(p), "--chi-timeout-ms", "0")
        assert records(out)[0]["exact_chi"] is None

    def test_jobs_do_not_change_output(self, capsys, tmp_path):
        p = tmp_path / "in.g6"
        lines = []
        from bkcolor.graph_core import random_class_graph
        from bkcolor.class_guard import ClassId

        for seed in range(12):
            lines.append(emit_graph6(random_class_graph(11, ClassId.H_FREE, seed)))
        lines.append(emit_graph6(cycle(5)))
        lines.append(emit_graph6(complete(10)))
        p.write_text("\n".join(lines) + "\n")
        _, out1, _ = run_cli(capsys, "hunt", str(p), "--jobs", "1")
        _, out2, _ = run_cli(capsys, "hunt", str(p), "--jobs", "2")
        assert out1 == out2

    def test_out_file_and_resume(self, capsys, tmp_path):
        p = tmp_path / "in.g6"
        lines = [emit_graph6(complete(10)), emit_graph6(cycle(5))]
        p.write_text("\n".join(lines) + "\n")
        outfile = tmp_path / "report.jsonl"
        run_cli(capsys, "hunt", str(p), "--out", str(outfile))
        full = outfile.read_text()
        assert len(full.splitlines()) == 2
        # truncate to one record, resume must add only the second
        outfile.write_text(full.splitlines()[0] + "\n")
        run_cli(capsys, "hunt", str(p), "--out", str(outfile), "--resume")
        assert outfile.read_text() == full

    def test_traces_replayable(self, capsys, tmp_path):
        p = tmp_path / "in.g6"
        G2 = complete_multipartite([1] * 7 + [2, 2])
        p.write_text(emit_graph6(G2) + "\n")
        trace = tmp_path / "t.trace"
        run_cli(capsys, "hunt", str(p), "--trace", str(trace))
        code, out, _ = run_cli(capsys, "verify", str(p), "--trace", str(trace))
        assert code == 0
        assert all(r["verdict"] == "PASS" for r in records(out))

    def test_schema_histogram_totals(self, capsys, tmp_path):
        p = tmp_path / "in.g6"
        G2 = complete_multipartite([1] * 7 + [2, 2])
        p.write_text(emit_graph6(G2) + "\n")
        _, out, err = run_cli(capsys, "hunt", str(p))
        rec = records(out)[0]
        summary = json.loads(err.splitlines()[-1])["summary"]
        assert sum(rec["schemas"].values()) == sum(summary["schemas"].values()) > 0


class TestStdinAndFormats:
    def test_auto_detect_rejects_neither(self, capsys, tmp_path):
        p = tmp_path / "in.g6"
        p.write_text("!!!\n")
        code, out, _ = run_cli(capsys, "classify", str(p))
        assert "error" in records(out)[0]
