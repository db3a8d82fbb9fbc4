import pytest

from pipeline.benchmark import bench_selection, format_table


def test_rows_agree_and_count_comparisons():
    rows = bench_selection([10, 1000], repetitions=2, seed=5)
    assert [row.size for row in rows] == [10, 1000]
    for row in rows:
        assert row.agree
        assert row.primary_comparisons == row.size - 1
        assert row.secondary_comparisons <= row.size - 1
        assert row.select_median >= 0.0 and row.sort_median >= 0.0


def test_table_lists_every_size():
    rows = bench_selection([10, 20], repetitions=1)
    table = format_table(rows).splitlines()
    assert len(table) == 4
    assert table[2].split()[0] == "10"
    assert "speedup" in rows[0].to_dict()


def test_rejects_zero_repetitions():
    with pytest.raises(ValueError):
        bench_selection([10], repetitions=0)
