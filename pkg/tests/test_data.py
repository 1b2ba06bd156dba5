import numpy as np
import pytest
from hypothesis import given, strategies as st

from lexigp.data import (Dataset, IngestionError, load_dataset, mse, split,
                         squared_errors)


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return p


class TestLoadDataset:
    def test_basic_csv(self, tmp_path):
        p = write(tmp_path, "toy.csv",
                  "x0,x1,target\n1,2,3\n4,5,6\n7,8,9\n")
        ds = load_dataset(p)
        assert ds.num_instances == 3
        assert ds.num_features == 2
        assert ds.targets.tolist() == [3.0, 6.0, 9.0]
        assert ds.features[1].tolist() == [4.0, 5.0]

    def test_tsv_and_column_order(self, tmp_path):
        p = write(tmp_path, "toy.tsv",
                  "a\ttarget\tb\n1\t2\t3\n4\t5\t6\n")
        ds = load_dataset(p)
        assert ds.features.tolist() == [[1.0, 3.0], [4.0, 6.0]]
        assert ds.targets.tolist() == [2.0, 5.0]

    def test_pmlb_sized_file(self, tmp_path):
        # same shape as the 519_vinnie problem: 380 instances, 2 features
        rng = np.random.default_rng(0)
        rows = "\n".join(f"{a},{b},{a + b}" for a, b in rng.normal(size=(380, 2)))
        p = write(tmp_path, "519_vinnie.csv", "x0,x1,target\n" + rows + "\n")
        ds = load_dataset(p)
        assert ds.name == "519_vinnie"
        assert (ds.num_instances, ds.num_features) == (380, 2)

    def test_missing_target_column(self, tmp_path):
        p = write(tmp_path, "bad.csv", "x0,x1,y\n1,2,3\n")
        with pytest.raises(IngestionError, match="target"):
            load_dataset(p)

    def test_non_numeric_cell_names_row_and_column(self, tmp_path):
        p = write(tmp_path, "bad.csv", "x0,target\n1,2\noops,4\n")
        with pytest.raises(IngestionError, match=r"row 3.*'x0'"):
            load_dataset(p)

    def test_header_only(self, tmp_path):
        p = write(tmp_path, "empty.csv", "x0,target\n")
        with pytest.raises(IngestionError, match="no data"):
            load_dataset(p)

    def test_empty_file(self, tmp_path):
        p = write(tmp_path, "empty.csv", "")
        with pytest.raises(IngestionError):
            load_dataset(p)

    def test_missing_value_rejected(self, tmp_path):
        p = write(tmp_path, "bad.csv", "x0,target\n1,2\n,4\n")
        with pytest.raises(IngestionError):
            load_dataset(p)


def make_dataset(n):
    rng = np.random.default_rng(3)
    return Dataset("d", rng.normal(size=(n, 2)), rng.normal(size=n))


class TestSplit:
    def test_70_15_15(self):
        sd = split(make_dataset(100), seed=1)
        assert sd.train[0].shape[0] == 70
        assert sd.validation[0].shape[0] == 15
        assert sd.test[0].shape[0] == 15

    def test_deterministic(self):
        a = split(make_dataset(50), seed=9)
        b = split(make_dataset(50), seed=9)
        assert np.array_equal(a.train[0], b.train[0])
        assert np.array_equal(a.test[1], b.test[1])

    def test_remainder_to_test(self):
        sd = split(make_dataset(101), seed=1)
        sizes = (sd.train[0].shape[0], sd.validation[0].shape[0],
                 sd.test[0].shape[0])
        assert sizes == (70, 15, 16)

    def test_too_few_instances(self):
        with pytest.raises(ValueError):
            split(make_dataset(2), seed=0)

    def test_disjoint_and_exhaustive(self):
        ds = Dataset("d", np.arange(40).reshape(20, 2), np.arange(20))
        sd = split(ds, seed=4)
        targets = np.concatenate([sd.train[1], sd.validation[1], sd.test[1]])
        assert sorted(targets.tolist()) == list(range(20))


class TestErrors:
    def test_squared_errors(self):
        assert squared_errors([1, 2], [1, 2]).tolist() == [0, 0]
        assert squared_errors([0, 0], [1, 3]).tolist() == [1, 9]
        assert squared_errors([2], [-2]).tolist() == [16]

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            squared_errors([1, 2], [1])

    def test_mse(self):
        assert mse([1, 2, 3], [1, 2, 3]) == 0
        assert mse([0, 0], [1, 3]) == 5

    def test_mse_empty(self):
        with pytest.raises(ValueError):
            mse([], [])

    def test_mse_is_mean_of_squared_errors(self):
        p = np.array([0.1, 2.0, -3.0])
        t = np.array([1.0, 1.5, 0.0])
        assert mse(p, t) == pytest.approx(squared_errors(p, t).mean())

    @given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=30))
    def test_mse_symmetric_and_zero_iff_equal(self, values):
        v = np.array(values)
        assert mse(v, v) == 0
        w = v + 1.0
        assert mse(v, w) == pytest.approx(mse(w, v))
        assert mse(v, w) > 0
