import json

import numpy as np
import pytest

from noiseradar.detection import RocCurve, RocModel, roc_curve
from noiseradar.io import (
    SchemaError,
    dump_json,
    manifest_path,
    read_block,
    read_csv,
    read_roc_csv,
    read_roc_json,
    sidecar_path,
    write_block,
    write_roc_csv,
    write_roc_json,
)
from noiseradar.model import QtmsCovariance
from noiseradar.synthesis import synthesize


def test_block_round_trip_is_exact(tmp_path):
    block = synthesize(QtmsCovariance(1.2, 0.8, 0.4, 1.5, "reflection"), 64, seed=(5, 1))
    csv_path, side = write_block(block, tmp_path / "rec.csv")
    assert side == tmp_path / "rec.json"
    back = read_block(csv_path)
    np.testing.assert_array_equal(back.channels, block.channels)
    assert back.seed == (5, 1)
    assert back.params == block.params


def test_block_without_sidecar(tmp_path):
    p = tmp_path / "raw.csv"
    p.write_text("I1,Q1,I2,Q2\n1,2,3,4\n# comment\n5,6,7,8\n")
    block = read_block(p)
    assert block.n == 2 and block.seed is None and block.params is None


def test_sidecar_row_count_mismatch(tmp_path):
    block = synthesize(QtmsCovariance(1, 1, 0.1), 10, seed=0)
    csv_path, side = write_block(block, tmp_path / "rec.csv")
    meta = json.loads(side.read_text())
    meta["n"] = 11
    side.write_text(json.dumps(meta))
    with pytest.raises(SchemaError, match="11"):
        read_block(csv_path)


@pytest.mark.parametrize("body,match", [
    ("", "empty"),
    ("I1,Q1,I2\n1,2,3\n", ":1: expected header"),
    ("I1,Q1,I2,Q2\n1,2,3,4\n1,2,3\n", ":3: expected 4 fields"),
    ("I1,Q1,I2,Q2\n1,2,x,4\n", ":2: field 'I2' is not a number"),
    ("I1,Q1,I2,Q2\n1,2,nan,4\n", ":2: field 'I2' is not finite"),
    ("I1,Q1,I2,Q2\n", "no data rows"),
])
def test_csv_schema_errors_name_the_line(tmp_path, body, match):
    p = tmp_path / "bad.csv"
    p.write_text(body)
    with pytest.raises(SchemaError, match=match):
        read_csv(p, ("I1", "Q1", "I2", "Q2"))


def test_missing_file_is_schema_error(tmp_path):
    with pytest.raises(SchemaError, match="cannot open"):
        read_csv(tmp_path / "nope.csv", ("a",))


def test_roc_round_trips(tmp_path):
    curve = roc_curve("noise", 0.2, 150)
    write_roc_csv(curve, tmp_path / "roc.csv")
    back = read_roc_csv(tmp_path / "roc.csv")
    np.testing.assert_array_equal(back.p_d, curve.p_d)
    write_roc_json(curve, tmp_path / "roc.json")
    one = read_roc_json(tmp_path / "roc.json")
    np.testing.assert_array_equal(one.p_fa, curve.p_fa)
    assert one.params == curve.params and one.model is RocModel.NOISE_RADAR
    other = roc_curve("conventional", 0.5, 150)
    write_roc_json([curve, other], tmp_path / "both.json")
    both = read_roc_json(tmp_path / "both.json")
    assert [c.model for c in both] == [RocModel.NOISE_RADAR, RocModel.CONVENTIONAL]


def test_roc_json_schema_errors(tmp_path):
    p = tmp_path / "r.json"
    p.write_text("{\n  oops")
    with pytest.raises(SchemaError, match=":2:"):
        read_roc_json(p)
    p.write_text(json.dumps({"model": "noise", "p_fa": [0.1]}))
    with pytest.raises(SchemaError, match="missing p_d"):
        read_roc_json(p)
    p.write_text(json.dumps({"model": "nonsense", "p_fa": [0.1], "p_d": [0.2]}))
    with pytest.raises(SchemaError):
        read_roc_json(p)


def test_json_output_is_deterministic(tmp_path):
    a = dump_json({"b": 1, "a": [0.1, 2]}, tmp_path / "a.json")
    b = dump_json({"a": [0.1, 2], "b": 1}, tmp_path / "b.json")
    assert a == b and a.endswith("\n")


def test_path_helpers(tmp_path):
    assert sidecar_path("x/rec.csv").name == "rec.json"
    assert manifest_path("x/out.json").name == "out.json.manifest.json"


def test_roc_curve_dict_round_trip():
    curve = RocCurve([0.1, 0.2], [0.3, 0.4], RocModel.EMPIRICAL, {"n": 5})
    d = curve.to_dict()
    assert d == {"model": "empirical", "params": {"n": 5}, "p_fa": [0.1, 0.2], "p_d": [0.3, 0.4]}
