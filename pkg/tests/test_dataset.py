import numpy as np
import pytest

from testinj.dataset import BinaryDataset, DatasetError


def test_validation():
    with pytest.raises(DatasetError):
        BinaryDataset(("a", "a"), np.zeros((2, 2), dtype=np.uint8))
    with pytest.raises(DatasetError):
        BinaryDataset(("a",), np.zeros((0, 1), dtype=np.uint8))
    with pytest.raises(DatasetError):
        BinaryDataset(("a",), np.array([[2]], dtype=np.uint8))
    with pytest.raises(DatasetError):
        BinaryDataset(("a", "b"), np.zeros((3, 1), dtype=np.uint8))


def test_column_access_and_select():
    data = BinaryDataset.from_columns({"x": [0, 1], "y": [1, 1]})
    assert list(data.column("y")) == [1, 1]
    with pytest.raises(DatasetError):
        data.column("z")
    sub = data.select(("y",))
    assert sub.columns == ("y",)


def test_values_read_only():
    data = BinaryDataset.from_columns({"x": [0, 1]})
    with pytest.raises(ValueError):
        data.values[0, 0] = 1


def test_csv_round_trip(tmp_path):
    data = BinaryDataset.from_columns({"x": [0, 1, 1], "y": [1, 0, 1]})
    path = tmp_path / "d.csv"
    data.to_csv(path)
    assert BinaryDataset.read_csv(path) == data
    assert path.read_text().splitlines()[0] == "x,y"


def test_read_csv_rejects_non_binary(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("x,y\n0,2\n", encoding="utf-8")
    with pytest.raises(DatasetError):
        BinaryDataset.read_csv(path)


def test_read_csv_rejects_ragged(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("x,y\n0\n", encoding="utf-8")
    with pytest.raises(DatasetError):
        BinaryDataset.read_csv(path)


def test_read_csv_empty(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("", encoding="utf-8")
    with pytest.raises(DatasetError):
        BinaryDataset.read_csv(path)
