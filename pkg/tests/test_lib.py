import json
import os

import numpy as np
import pytest

from tclplus.api.lib import (
    RunManifest,
    atomic_write_text,
    format_value,
    load_json_config,
    read_manifest,
    write_csv,
    write_json,
)
from tclplus.exceptions import ConfigError
from tclplus.version import __version__


def test_format_value():
    assert format_value(None) == ""
    assert format_value(True) == "true"
    assert format_value(np.int64(3)) == "3"
    assert format_value(0.1) == "0.10000000000000001"
    assert float(format_value(np.float64(1 / 3))) == 1 / 3
    assert format_value("tcl") == "tcl"


def test_write_csv(tmp_path):
    path = write_csv(tmp_path / "out.csv", ["a", "b"], [[1, 0.5], [2, None]])
    assert open(path).read() == "a,b\n1,0.5\n2,\n"


def test_atomic_write_leaves_no_temp_files(tmp_path):
    target = tmp_path / "nested" / "file.txt"
    atomic_write_text(str(target), "hello")
    atomic_write_text(str(target), "bye")
    assert target.read_text() == "bye"
    assert os.listdir(target.parent) == ["file.txt"]


def test_write_json_handles_numpy(tmp_path):
    path = write_json(str(tmp_path / "x.json"), {"a": np.arange(3), "b": np.float64(2.5), "c": 1j})
    assert json.loads(open(path).read()) == {"a": [0, 1, 2], "b": 2.5, "c": {"re": 0.0, "im": 1.0}}


def test_load_json_config_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_json_config(str(tmp_path / "missing.json"))
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError):
        load_json_config(str(bad))
    array = tmp_path / "array.json"
    array.write_text("[1, 2]")
    with pytest.raises(ConfigError):
        load_json_config(str(array))


def test_manifest_round_trip(tmp_path):
    manifest = RunManifest("expand", {"order": 4}, seed=3)
    manifest.add_output(str(tmp_path / "terms.json"))
    manifest.flag_truncated("jc_tclplus6_dim7.csv", 1.25)
    path = manifest.write(str(tmp_path))
    data = read_manifest(path)
    assert data["command"] == "expand"
    assert data["version"] == __version__
    assert data["outputs"] == ["terms.json"]
    assert data["truncated"] == [{"output": "jc_tclplus6_dim7.csv", "divergence_time": 1.25}]
    assert data["duration_s"] >= 0
    assert "_started" not in data


def test_read_manifest_missing(tmp_path):
    assert read_manifest(str(tmp_path / "nope.json")) is None
