"""
Tests for edge-list and vertex-set files and the CSV / text reports
"""
import os

import pytest

from modules.errors import GraphFormatError, InconsistentGraphError, ParameterError
from modules.generators import CycleOracle, RegularTreeOracle
from modules.graph_core import materialize
from storage import (
    RunConfig, TextReport, format_value, read_csv, read_graph, read_graph_header, read_vertex_encodings,
    read_vertex_set, write_csv, write_graph, write_vertex_set,
)


def write_lines(path, *lines):
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return str(path)


def test_graph_file_round_trip(tmp_path):
    oracle = RegularTreeOracle(3)
    g, _ = materialize(oracle, oracle.root(), 4)
    first = tmp_path / "a.edges"
    second = tmp_path / "b.edges"
    write_graph(g, str(first), comment="tree:3 radius 4")
    h = read_graph(str(first))
    write_graph(h, str(second), comment="tree:3 radius 4")

    assert h.n == g.n and h.edge_count() == g.edge_count()
    assert h.encodings == g.encodings
    body = [line for line in first.read_text().splitlines() if not line.startswith("#")]
    assert body == [line for line in second.read_text().splitlines() if not line.startswith("#")]


def test_read_graph_with_isolated_vertex_and_comments(tmp_path):
    path = write_lines(tmp_path / "g.edges", "# a path and a loner", "a b", "b c  # inline comment", "", "z")
    g = read_graph(path)
    assert g.encodings == ["a", "b", "c", "z"]
    assert g.adjacency[g.index_of_encoding("z")] == ()
    assert g.edge_count() == 2


def test_read_graph_accepts_both_directions(tmp_path):
    path = write_lines(tmp_path / "g.edges", "a b", "b a", "b c", "c b")
    assert read_graph(path).edge_count() == 2


def test_read_graph_rejects_half_directed_listing(tmp_path):
    path = write_lines(tmp_path / "g.edges", "a b", "b a", "b c")
    with pytest.raises(InconsistentGraphError):
        read_graph(path)


@pytest.mark.parametrize("bad_line", ["a b c", "a a"])
def test_read_graph_reports_line_numbers(tmp_path, bad_line):
    path = write_lines(tmp_path / "g.edges", "a b", bad_line)
    with pytest.raises(GraphFormatError) as excinfo:
        read_graph(path)
    assert excinfo.value.line_number == 2


def test_read_graph_missing_file(tmp_path):
    with pytest.raises(GraphFormatError):
        read_graph(str(tmp_path / "missing.edges"))


def test_vertex_set_files(tmp_path):
    g, _ = materialize(CycleOracle(6), 0, 6)
    path = tmp_path / "A.txt"
    write_vertex_set(str(path), ["3", "1"])
    assert read_vertex_encodings(str(path)) == ["3", "1"]
    assert read_vertex_set(str(path), g) == (g.index_of(1), g.index_of(3))

    write_lines(tmp_path / "dup.txt", "2", "2", "# note", "4")
    assert read_vertex_encodings(str(tmp_path / "dup.txt")) == ["2", "4"]

    write_lines(tmp_path / "bad.txt", "7")
    with pytest.raises(GraphFormatError):
        read_vertex_set(str(tmp_path / "bad.txt"), g)


def test_run_config_lines():
    config = RunConfig(command="profile", spec="tree:3", radius=12, params=(("nmax", "8"), ("mode", "connected")),
                       output_dir="out", seed=7, budget=None)
    lines = config.to_lines()
    assert lines[0] == "# command=profile"
    assert "# param.mode=connected" in lines
    assert RunConfig.from_lines(lines) == config
    assert RunConfig.from_lines(lines).param("nmax") == "8"


def test_run_config_needs_command():
    with pytest.raises(ParameterError):
        RunConfig.from_lines(["# spec=tree:3"])


@pytest.mark.parametrize("value, text", [
    (None, "undefined"),
    (True, "true"),
    (0.1, "0.1"),
    (float("inf"), "inf"),
    (3, "3"),
    (["a", 2], "a 2"),
])
def test_format_value(value, text):
    assert format_value(value) == text


def test_csv_with_run_config(tmp_path):
    path = str(tmp_path / "report.csv")
    config = RunConfig(command="growth", spec="tree:3", radius=10, params=(("rmax", "3"),))
    write_csv(path, ("vertex", "r", "ball_size"), [("r", 0, 1), ("r", 1, 4)], config)

    loaded, header, rows = read_csv(path)
    assert loaded == config
    assert header == ["vertex", "r", "ball_size"]
    assert rows[1] == {"vertex": "r", "r": "1", "ball_size": "4"}
    assert [name for name in os.listdir(tmp_path)] == ["report.csv"]


def test_csv_writes_are_deterministic(tmp_path):
    config = RunConfig(command="phi", spec="grid:2", radius=8)
    for name in ("a.csv", "b.csv"):
        write_csv(str(tmp_path / name), ("n", "phi"), [(1, 1), (5, 1), (6, 2)], config)
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_read_csv_rejects_ragged_rows(tmp_path):
    path = write_lines(tmp_path / "bad.csv", "n,phi", "1,1", "2")
    with pytest.raises(GraphFormatError):
        read_csv(path)


def test_read_empty_csv(tmp_path):
    path = write_lines(tmp_path / "empty.csv", "# command=growth")
    config, header, rows = read_csv(path)
    assert config.command == "growth"
    assert header == [] and rows == []


def test_text_report(tmp_path):
    report = TextReport("pinch", RunConfig(command="pinch", spec="tree:3", radius=12))
    report.add_section("estimate", [("a", 2.0), ("verified", True), ("violations", [])])
    text = report.render()
    assert text.startswith("# isogrowth report: pinch\n# command=pinch\n")
    assert "[estimate]\na: 2.0\nverified: true\nviolations: \n" in text
    report.write(str(tmp_path / "r.txt"))
    assert (tmp_path / "r.txt").read_text() == text


def test_graph_header(tmp_path):
    g, _ = materialize(CycleOracle(4), 0, 4)
    config = RunConfig(command="gen", spec="cycle:4", radius=4, params=(("root", "0"),))
    path = str(tmp_path / "c4.edges")
    write_graph(g, path, comment="\n".join(line[2:] for line in config.to_lines()))
    assert read_graph_header(path) == config

    plain = write_lines(tmp_path / "plain.edges", "a b")
    assert read_graph_header(plain) is None
