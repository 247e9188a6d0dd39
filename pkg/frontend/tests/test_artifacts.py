from pathlib import Path

import numpy as np
import pytest

from okplot import artifacts
from okplot.artifacts import SchemaError

FIXTURES = Path(__file__).parent / "fixtures"


def test_load_run_fixture():
    run = artifacts.load_run(FIXTURES / "run_two_ellipse")
    assert run.m == 2
    assert run.columns[:4] == ["t", "J", "w_inf", "max_abs_V"]
    assert run.series.shape[1] == 8
    assert len(run.snapshots) == 5
    assert run.snapshots[0].t == 0.0
    assert all(len(s.curves) == 2 for s in run.snapshots)
    assert all(c.shape == (32, 2) for c in run.snapshots[0].curves)
    # times strictly increasing across snapshots
    times = [s.t for s in run.snapshots]
    assert times == sorted(times)


def test_outer_radius_recovered_from_flux_identity():
    run = artifacts.load_run(FIXTURES / "run_two_ellipse")
    np.testing.assert_allclose(run.outer_radius(), 3.0, rtol=1e-12)


def test_permuted_columns_rejected():
    with pytest.raises(SchemaError, match="column schema mismatch"):
        artifacts.parse_series(FIXTURES / "series_permuted.csv")


def test_unknown_extra_column_rejected(tmp_path):
    good = (FIXTURES / "run_two_ellipse" / "series.csv").read_text().splitlines()
    bad = [good[0] + ",bonus"] + [ln + ",0.0" for ln in good[1:]]
    p = tmp_path / "series.csv"
    p.write_text("\n".join(bad) + "\n")
    with pytest.raises(SchemaError):
        artifacts.parse_series(p)


def test_header_only_rejected():
    with pytest.raises(SchemaError, match="header only"):
        artifacts.parse_series(FIXTURES / "series_empty.csv")


def test_forced_zero_time_detection(tmp_path):
    cols, data, m = artifacts.parse_series(FIXTURES / "series_forced.csv")
    run = artifacts.RunArtifacts(columns=cols, series=data, snapshots=[], m=m)
    assert run.forced_zero_time() == 0.5
    run2 = artifacts.load_run(FIXTURES / "run_two_ellipse")
    assert run2.forced_zero_time() is None  # transient throughout


def test_snapshot_parse_errors(tmp_path):
    bad = tmp_path / "t_0.txt"
    bad.write_text("t=1.0 M=2\n0 0\n1 1\n")
    with pytest.raises(SchemaError, match="M=2"):
        artifacts.parse_snapshot(bad)
    bad.write_text("time 1.0\n0 0\n")
    with pytest.raises(SchemaError, match="header"):
        artifacts.parse_snapshot(bad)


def test_error_table_parse():
    param, data = artifacts.parse_error_table(FIXTURES / "convergence_n.csv")
    assert param == "n"
    assert data.shape == (2, 2)
    with pytest.raises(SchemaError):
        artifacts.parse_error_table(FIXTURES / "series_empty.csv")
