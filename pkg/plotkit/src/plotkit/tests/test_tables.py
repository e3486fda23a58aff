import pytest

from plotkit.tables import DataError, column, floats, load_table


def test_load_table_keeps_strings(sweep_csv):
    header, rows = load_table(sweep_csv)
    assert header[0] == "experiment"
    assert rows[0]["sum_rate_b2"] == "10.0"
    assert len(rows) == 8


def test_empty_file_is_named(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("")
    with pytest.raises(DataError, match="empty.csv: empty file"):
        load_table(str(path))


def test_header_only_is_named(tmp_path):
    path = tmp_path / "bare.csv"
    path.write_text("a,b\n")
    with pytest.raises(DataError, match="no data rows"):
        load_table(str(path))


def test_missing_column_is_named(sweep_csv):
    _, rows = load_table(sweep_csv)
    with pytest.raises(DataError, match="'min_sinr_db'"):
        column(rows, "min_sinr_db", sweep_csv)


def test_non_numeric_cell_names_the_column(sweep_csv):
    _, rows = load_table(sweep_csv)
    with pytest.raises(DataError, match="'scheme'"):
        floats(rows, "scheme", sweep_csv)


def test_floats_parse_special_values(cdf_csv):
    _, rows = load_table(cdf_csv)
    vals = floats(rows, "sinr_db", cdf_csv)
    assert vals[4] == float("-inf")
    assert vals[0] == 6.0
