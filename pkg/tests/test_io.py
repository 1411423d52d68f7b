import numpy as np
import pytest

from superpose.constructions import gaussian_unit_matrix
from superpose.core import two_feature_pair
from superpose.errors import MatrixParseError
from superpose.io import dumps_json, dumps_text, load_matrix, loads_json, loads_text, save_matrix

from conftest import load_schema


@pytest.mark.parametrize("suffix", [".txt", ".json"])
def test_roundtrip_is_exact(tmp_path, suffix):
    M = gaussian_unit_matrix(5, 7, seed=9) * 1e3 - 1e-7
    path = tmp_path / f"m{suffix}"
    save_matrix(M, path)
    np.testing.assert_array_equal(load_matrix(path), M)


def test_text_layout():
    assert dumps_text([[1.0, 0.5], [-2.0, 0.1]]) == "2 2\n1 0.5\n-2 0.10000000000000001\n"


def test_json_layout_matches_schema():
    jsonschema = pytest.importorskip("jsonschema")
    import json

    obj = json.loads(dumps_json([[1.0, 2.0, 3.0]]))
    jsonschema.validate(obj, load_schema("matrix.schema.json"))
    assert obj == {"rows": 1, "cols": 3, "entries": [1.0, 2.0, 3.0]}


def test_wrong_column_count_cites_line():
    text = "3 2\n1 2\n3 4 5\n6 7\n"
    with pytest.raises(MatrixParseError, match="line 3") as err:
        loads_text(text)
    assert err.value.line == 3


@pytest.mark.parametrize(
    "text, line",
    [
        ("", 1),
        ("2\n1 2\n", 1),
        ("2 x\n1 2\n", 1),
        ("2 2\n1 2\n", 3),
        ("1 2\n1 2\n3 4\n", 3),
        ("1 2\n1 nope\n", 2),
        ("1 2\n1 inf\n", 2),
    ],
)
def test_malformed_text(text, line):
    with pytest.raises(MatrixParseError) as err:
        loads_text(text)
    assert err.value.line == line


def test_malformed_json():
    with pytest.raises(MatrixParseError):
        loads_json('{"rows": 2, "cols": 2, "entries": [1, 2, 3]}')
    with pytest.raises(MatrixParseError):
        loads_json("{not json")


def test_two_feature_fixtures_are_exact(data_dir):
    A, B = two_feature_pair()
    np.testing.assert_array_equal(load_matrix(data_dir / "two_feature_A.txt"), A)
    np.testing.assert_array_equal(load_matrix(data_dir / "two_feature_B.txt"), B)
    assert A[1, 0] == np.sqrt(3.0) / 2.0
    assert B[1, 0] == 2.0 / np.sqrt(3.0)
    assert B[1, 1] == -1.0 / np.sqrt(3.0)
