import math

import numpy as np
import pytest

from drsteer.dataset import (
    CsvParseError,
    compute_stats,
    dataset_from_matrix,
    load_csv,
)

BASIC = b"id,a,b\nr1,1,4\nr2,2,5\nr3,3,6\n"


class TestLoadCsv:
    def test_basic_parse(self):
        ds = load_csv(BASIC, id_column="id")
        assert ds.n == 3 and ds.d == 2
        assert ds.ids == ("r1", "r2", "r3")
        assert ds.feature_names == ("a", "b")
        np.testing.assert_array_equal(ds.values, [[1, 4], [2, 5], [3, 6]])

    def test_ids_default_to_row_numbers(self):
        ds = load_csv(b"a,b\n1,4\n2,5\n")
        assert ds.ids == ("0", "1")

    def test_id_column_not_treated_as_feature(self):
        ds = load_csv(BASIC, id_column="id")
        assert "id" not in ds.feature_names

    def test_empty_file(self):
        with pytest.raises(CsvParseError, match="empty"):
            load_csv(b"")

    def test_header_only(self):
        with pytest.raises(CsvParseError, match="at least 2 data rows"):
            load_csv(b"a,b\n")

    def test_single_row(self):
        with pytest.raises(CsvParseError, match="at least 2 data rows"):
            load_csv(b"a,b\n1,2\n")

    def test_ragged_row_reports_row_number(self):
        with pytest.raises(CsvParseError, match="row 3"):
            load_csv(b"a,b\n1,2\n1\n")

    def test_non_numeric_cell_reports_row_and_column(self):
        with pytest.raises(CsvParseError, match=r"row 3.*'b'"):
            load_csv(b"a,b\n1,2\n3,oops\n")

    def test_non_finite_cell_rejected(self):
        with pytest.raises(CsvParseError, match="non-finite"):
            load_csv(b"a,b\n1,2\n3,nan\n")
        with pytest.raises(CsvParseError, match="non-finite"):
            load_csv(b"a,b\n1,inf\n3,4\n")

    def test_duplicate_ids(self):
        with pytest.raises(CsvParseError, match="duplicate id"):
            load_csv(b"id,a\nx,1\nx,2\n", id_column="id")

    def test_duplicate_feature_names(self):
        with pytest.raises(CsvParseError, match="duplicate feature names"):
            load_csv(b"a,a\n1,2\n3,4\n")

    def test_missing_id_column(self):
        with pytest.raises(CsvParseError, match="not found"):
            load_csv(BASIC, id_column="nope")

    def test_decimal_point_and_whitespace(self):
        ds = load_csv(b"a,b\n 1.5 ,2.25\n-3.5,1e-3\n")
        np.testing.assert_array_equal(ds.values, [[1.5, 2.25], [-3.5, 0.001]])

    def test_indicator_fixture_shape(self, indicators):
        # domain-scale dataset: 34 rows of 8 numeric indicators
        assert indicators.n == 34 and indicators.d == 8
        assert len(indicators.stats) == 8


class TestStats:
    def test_hand_computed_example(self):
        st = compute_stats([1.0, 2.0, 3.0])
        assert st.mean == 2.0
        assert abs(st.std - math.sqrt(2.0 / 3.0)) < 1e-15
        assert st.min == 1.0 and st.max == 3.0

    def test_population_not_sample_std(self):
        # ddof=1 would give 1.0 here; population std must be smaller
        st = compute_stats([1.0, 2.0, 3.0])
        assert st.std < 1.0

    def test_std_zero_iff_constant(self, rng):
        assert compute_stats([5.0, 5.0, 5.0]).std == 0.0
        col = rng.standard_normal(50)
        assert compute_stats(col).std > 0.0

    def test_needs_two_values(self):
        with pytest.raises(ValueError):
            compute_stats([1.0])

    def test_stored_stats_match_recomputation(self, indicators):
        for j, st in enumerate(indicators.stats):
            again = compute_stats(indicators.values[:, j])
            assert st == again

    def test_permutation_leaves_stats_unchanged(self, rng):
        mat = rng.standard_normal((40, 3))
        ds = dataset_from_matrix(mat)
        perm = rng.permutation(40)
        shuffled = dataset_from_matrix(mat[perm])
        for a, b in zip(ds.stats, shuffled.stats):
            assert abs(a.mean - b.mean) < 1e-9
            assert abs(a.std - b.std) < 1e-9
            assert a.min == b.min and a.max == b.max


class TestDataset:
    def test_round_trip_identical(self, indicators):
        again = load_csv(indicators.to_csv(id_column="country"), id_column="country")
        assert again.ids == indicators.ids
        assert again.feature_names == indicators.feature_names
        np.testing.assert_array_equal(again.values, indicators.values)
        assert again.stats == indicators.stats

    def test_values_are_read_only(self, indicators):
        with pytest.raises(ValueError):
            indicators.values[0, 0] = 99.0

    def test_row_lookup(self, indicators):
        np.testing.assert_array_equal(indicators.row("c03"), indicators.values[3])
        with pytest.raises(KeyError):
            indicators.row("missing")

    def test_from_matrix_validation(self):
        with pytest.raises(ValueError):
            dataset_from_matrix([[1.0, 2.0]])  # single row
        with pytest.raises(ValueError):
            dataset_from_matrix([[1.0], [np.inf]])
        with pytest.raises(ValueError):
            dataset_from_matrix([[1.0], [2.0]], ids=["x", "x"])
