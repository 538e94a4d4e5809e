import json

import numpy as np
import pytest
from conftest import dims, seeds
from hypothesis import given
from hypothesis import strategies as st

from araki.errors import DimensionMismatch
from araki.io import check_line, dumps_canonical, fmt_float, read_matrix, rows_to_matrix, write_csv, write_matrix


@given(seeds, dims)
def test_matrix_round_trip_bitwise(tmp_path_factory, seed, n):
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    a = (g + g.conj().T) / 2
    path = tmp_path_factory.mktemp("m") / "a.json"
    write_matrix(path, a)
    b = read_matrix(path)
    assert b.tobytes() == a.tobytes()


def test_real_matrix_file(tmp_path):
    path = tmp_path / "r.json"
    write_matrix(path, np.diag([0.25, 0.75]))
    doc = json.loads(path.read_text())
    assert doc == {"dim": 2, "field": "real", "rows": [[0.25, 0.0], [0.0, 0.75]]}
    assert np.array_equal(read_matrix(path), np.diag([0.25, 0.75]))


def test_complex_entries_and_symmetrization(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"dim": 2, "field": "complex", "rows": [[[1, 0], [0, 1]], [[0, -1], [2, 0]]]}))
    m = read_matrix(path)
    assert np.allclose(m, [[1, 1j], [-1j, 2]])


@pytest.mark.parametrize(
    "rows",
    [
        [[1, 2, 3], [4, 5, 6]],
        [[1, 2], [3]],
        [],
    ],
)
def test_non_square_rejected(rows):
    with pytest.raises(DimensionMismatch):
        rows_to_matrix(rows)


def test_bad_documents(tmp_path):
    p = tmp_path / "x.json"
    p.write_text(json.dumps({"dim": 3, "rows": [[1, 0], [0, 1]]}))
    with pytest.raises(DimensionMismatch):
        read_matrix(p)
    p.write_text(json.dumps({"rows": [[1]], "field": "quaternion"}))
    with pytest.raises(ValueError):
        read_matrix(p)
    p.write_text(json.dumps([1, 2]))
    with pytest.raises(ValueError):
        read_matrix(p)
    p.write_text(json.dumps({"rows": [[[1, 2, 3]]]}))
    with pytest.raises(ValueError):
        read_matrix(p)


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_float_format_round_trip(x):
    assert float(fmt_float(x)) == x


def test_non_finite():
    assert fmt_float(float("inf")) == '"inf"'
    assert fmt_float(float("-inf")) == '"-inf"'
    assert fmt_float(float("nan")) == '"nan"'
    assert rows_to_matrix([["inf", 0], [0, 1]])[0, 0] == np.inf


def test_canonical_ordering():
    rec = {"verdict": "Holds", "inequality_id": "gt", "params": {"s": 0.5, "k": 1}, "gap": 0.1}
    line = check_line(rec)
    assert line == '{"inequality_id":"gt","params":{"k":1,"s":0.5},"gap":0.10000000000000001,"verdict":"Holds"}'
    assert dumps_canonical({"b": 1, "a": [1.0, True, None]}) == '{"b":1,"a":[1,true,null]}'


def test_csv_export(tmp_path):
    recs = [{"inequality_id": "gt", "params": {"s": 0.5}, "dim": 2, "gap": 0.0, "verdict": "Holds"}]
    p = tmp_path / "r.csv"
    write_csv(p, recs)
    lines = p.read_text().splitlines()
    assert lines[0].startswith("inequality_id,params,dim")
    assert lines[1].startswith("gt,s=0.5,2")
