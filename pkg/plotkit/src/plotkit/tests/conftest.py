import pytest


def write_csv(path, header, rows):
    lines = [",".join(header)]
    lines += [",".join(str(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")
    return str(path)


@pytest.fixture
def sweep_csv(tmp_path):
    """Minimal sweep table: two schemes, two x points, two trials each."""
    return write_csv(
        tmp_path / "sweep.csv",
        ["experiment", "scheme", "trial_seed", "d2d_links", "sum_rate_b2"],
        [
            ["sweep_d2d", "proposed", 1, 1, 10.0],
            ["sweep_d2d", "proposed", 0, 1, 12.0],
            ["sweep_d2d", "proposed", 1, 2, 14.0],
            ["sweep_d2d", "proposed", 0, 2, 18.0],
            ["sweep_d2d", "without_ris", 1, 1, 7.0],
            ["sweep_d2d", "without_ris", 0, 1, 9.0],
            ["sweep_d2d", "without_ris", 1, 2, 11.0],
            ["sweep_d2d", "without_ris", 0, 2, 13.0],
        ],
    )


@pytest.fixture
def cdf_csv(tmp_path):
    return write_csv(
        tmp_path / "cdf.csv",
        ["experiment", "scheme", "trial_seed", "link_index", "sinr_db", "feasible"],
        [
            ["cdf", "proposed", 1, 1, 6.0, "true"],
            ["cdf", "proposed", 1, 2, 9.0, "true"],
            ["cdf", "proposed", 0, 1, 9.0, "true"],
            ["cdf", "proposed", 0, 2, 15.0, "true"],
            ["cdf", "without_ris", 1, 1, "-inf", "false"],
            ["cdf", "without_ris", 1, 2, 5.0, "false"],
            ["cdf", "without_ris", 0, 1, 8.0, "true"],
            ["cdf", "without_ris", 0, 2, 12.0, "true"],
        ],
    )


@pytest.fixture
def trace_csv(tmp_path):
    return write_csv(
        tmp_path / "conv.csv",
        ["experiment", "trial_seed", "epsilon", "outer_iter", "sum_rate_b2",
         "n_outer", "converged"],
        [
            ["convergence", 1, 0.01, 0, 5.0, 2, "true"],
            ["convergence", 1, 0.01, 1, 8.0, 2, "true"],
            ["convergence", 1, 0.01, 2, 8.5, 2, "true"],
            ["convergence", 0, 0.01, 0, 6.0, 1, "true"],
            ["convergence", 0, 0.01, 1, 9.0, 1, "true"],
            ["convergence", 1, 0.001, 0, 5.0, 3, "true"],
            ["convergence", 1, 0.001, 1, 8.0, 3, "true"],
            ["convergence", 1, 0.001, 2, 8.5, 3, "true"],
            ["convergence", 1, 0.001, 3, 8.6, 3, "true"],
        ],
    )
