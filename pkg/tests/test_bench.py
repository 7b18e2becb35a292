import io

import pytest

from orientlab.bench import COLUMNS, SUITES, Row, run_suite, write_csv, write_plot_data


def test_scaling_bf_full_size_is_flat():
    rows = run_suite("scaling-bf", 0, 1.0)
    assert [r.n for r in rows] == [2 ** k for k in range(10, 17)]
    assert all(r.t >= 3 * r.n * 0.9 for r in rows)
    ft = [r.f_per_t for r in rows]
    # random forest unions stay in a narrow band; no growth with n at t = 3n
    assert max(ft) <= 1.5 * min(ft)
    assert all(r.peak_outdeg <= 6 for r in rows)


def test_competitive_ratio_at_most_two():
    rows = run_suite("competitive", 1, 0.05)
    assert len(rows) == 10
    assert all(0 < r.ratio <= 2.0 for r in rows)


@pytest.mark.parametrize("name", ["tokens", "locality"])
def test_small_suites_run(name):
    rows = run_suite(name, 0, 0.05)
    assert rows and all(r.suite == name for r in rows)


def test_csv_and_plot_layout():
    rows = [Row("x", 8, 10, "bf", f_per_t=0.5), Row("x", 16, 20, "bf", ratio=1.5)]
    buf = io.StringIO()
    write_csv(rows, buf)
    head, *body = buf.getvalue().splitlines()
    assert head.split(",") == COLUMNS and len(body) == 2
    buf = io.StringIO()
    write_plot_data(rows, buf)
    assert buf.getvalue().splitlines()[1:] == ["x:bf\t8\t0.5", "x:bf\t16\t1.5"]


def test_suite_names():
    assert set(SUITES) == {"scaling-bf", "competitive", "tokens", "largest-first", "locality",
                           "matching", "dist-matching"}
