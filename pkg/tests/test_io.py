"""Deterministic output writers: number formatting, CSV, JSON, manifests."""

import json

import numpy as np

import flpower
from flpower.io import format_number, write_csv, write_json, write_manifest


def test_format_number_integers_stay_integers():
    assert format_number(3) == "3"
    assert format_number(np.int64(-7)) == "-7"
    assert format_number(0) == "0"


def test_format_number_floats_round_trip():
    for v in (0.1, 1.0 / 3.0, 1e-12, 123456.789, -2.5, 1 / 9):
        s = format_number(v)
        assert float(s) == v
        assert "," not in s


def test_format_number_numpy_floats_match_python_floats():
    # np.float64 repr carries the dtype wrapper; the writer must not
    assert format_number(np.float64(0.1)) == "0.1"
    assert format_number(np.float64(1 / 9)) == repr(1 / 9)


def test_format_number_booleans():
    assert format_number(True) == "true"
    assert format_number(np.bool_(False)) == "false"


def test_write_csv_layout(tmp_path):
    path = tmp_path / "t.csv"
    write_csv(path, ["k", "p_1", "p_2"], [[0, 1.0, 0.5], [1, np.float64(0.25), 2]])
    text = path.read_text()
    assert text == "k,p_1,p_2\n0,1.0,0.5\n1,0.25,2\n"


def test_write_csv_lf_endings_and_trailing_newline(tmp_path):
    path = write_csv(tmp_path / "t.csv", ["a"], [[1.5]])
    data = path.read_bytes()
    assert b"\r" not in data
    assert data.endswith(b"\n")


def test_write_csv_atomic_leaves_no_temp_file(tmp_path):
    write_csv(tmp_path / "t.csv", ["a"], [[1]])
    assert [p.name for p in tmp_path.iterdir()] == ["t.csv"]


def test_write_csv_rerun_byte_identical(tmp_path):
    rows = [[k, np.sqrt(k + 0.2)] for k in range(50)]
    first = write_csv(tmp_path / "a.csv", ["k", "v"], rows).read_bytes()
    second = write_csv(tmp_path / "a.csv", ["k", "v"], rows).read_bytes()
    assert first == second


def test_write_json_sorts_keys_and_converts_arrays(tmp_path):
    path = write_json(tmp_path / "o.json", {
        "zeta": np.array([1.0, 0.5]),
        "alpha": np.float64(0.25),
        "count": np.int32(3),
        "flag": np.bool_(True),
        "nested": {"b": (1, 2), "a": None},
    })
    text = path.read_text()
    assert text.index('"alpha"') < text.index('"zeta"')
    back = json.loads(text)
    assert back["zeta"] == [1.0, 0.5]
    assert back["alpha"] == 0.25
    assert back["count"] == 3
    assert back["flag"] is True
    assert back["nested"] == {"a": None, "b": [1, 2]}


def test_write_json_ends_with_newline(tmp_path):
    path = write_json(tmp_path / "o.json", {"a": 1})
    assert path.read_bytes().endswith(b"\n")


def test_manifest_shape(tmp_path):
    path = write_manifest(tmp_path, "solve", {"tol": 1e-10, "scenario": "affine2"},
                          ["trace.csv", "solution.json"])
    assert path.name == "manifest.json"
    data = json.loads(path.read_text())
    assert sorted(data) == ["command", "config", "outputs", "version"]
    assert data["command"] == "solve"
    assert data["config"]["tol"] == 1e-10
    assert data["outputs"] == ["solution.json", "trace.csv"]
    assert data["version"] == flpower.__version__


def test_manifest_has_no_timestamps(tmp_path):
    import time

    first = write_manifest(tmp_path, "x", {}, []).read_bytes()
    time.sleep(0.05)
    second = write_manifest(tmp_path, "x", {}, []).read_bytes()
    assert first == second
    assert b"time" not in first.lower()
    assert b"date" not in first.lower()
