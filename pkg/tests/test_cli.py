import json
import math

import numpy as np
import pytest

from tworay import LinkGeometry, RadioConfig, SearchError, null_distance
from tworay import cli

POWER_HEADER = "p_single_db,p_sum_db,p_bound_db,p_single_dbm,p_sum_dbm,p_bound_dbm"


def run(capsys, *argv):
    try:
        code = cli.main(list(argv))
    except SystemExit as exc:
        code = exc.code
    out, err = capsys.readouterr()
    return code, out, err


def table(out):
    lines = [ln for ln in out.splitlines() if not ln.startswith("#")]
    header = lines[0].split(",")
    rows = np.array([[float(x) for x in ln.split(",")] for ln in lines[1:]]).reshape(-1, len(header))
    return header, rows


def summary(out):
    pairs = (ln[2:].split(": ", 1) for ln in out.splitlines() if ln.startswith("# "))
    return {k: v for k, v in pairs}


def test_power_header_golden(capsys):
    code, out, _ = run(capsys, "power", "--points", "3")
    assert code == 0
    assert out.splitlines()[0] == "distance_m," + POWER_HEADER


def test_power_spacing_header_golden(capsys):
    code, out, _ = run(capsys, "power", "--sweep", "delta_f", "--points", "3")
    assert code == 0
    assert [ln for ln in out.splitlines() if not ln.startswith("#")][0] == "delta_f_hz," + POWER_HEADER


def test_rate_header_golden(capsys):
    _, out, _ = run(capsys, "rate", "--points", "2")
    assert [ln for ln in out.splitlines() if not ln.startswith("#")][0] == "d_m,r1_bps,r2_bps,r2_lower_bps"


def test_outage_header_golden(capsys):
    code, out, _ = run(capsys, "outage", "--samples", "20000", "--epsilon", "1e-3", "--points", "4")
    assert code == 0
    lines = [ln for ln in out.splitlines() if not ln.startswith("#")]
    assert lines[0] == "threshold_bps,eps_single,eps_two_exact,eps_two_bound"
    keys = set(summary(out))
    assert {"zoc_single_bps", "zoc_two_exact_bps", "zoc_two_bound_bps", "eps_capacity_single_bps",
            "eps_capacity_two_bound_bps", "zoc_gain_bound"} <= keys


def test_empty_sweep_is_header_only(capsys):
    code, out, _ = run(capsys, "power", "--points", "0", "--delta-f", "250M")
    assert code == 0
    assert out == "distance_m," + POWER_HEADER + "\n"


def test_power_bound_below_sum(capsys):
    _, out, _ = run(capsys, "power", "--f1", "2.4G", "--delta-f", "250M", "--dmin", "1", "--dmax", "1000",
                    "--points", "2000", "--log")
    header, rows = table(out)
    assert rows.shape == (2000, 7)
    assert np.all(rows[:, header.index("p_bound_db")] <= rows[:, header.index("p_sum_db")] + 1e-9)


@pytest.mark.parametrize("f1", ["100M", "2.4G"])
def test_power_spacing_markers(capsys, f1):
    _, out, _ = run(capsys, "power", "--sweep", "delta_f", "--d", "50", "--f1", f1, "--points", "10")
    marks = summary(out)
    assert float(marks["peak_spacing_hz"]) / 1e6 == pytest.approx(255, abs=1)
    assert float(marks["null_spacing_hz"]) / 1e6 == pytest.approx(510, abs=1)


def test_power_dbm_columns_with_absolute_power(capsys):
    _, out, _ = run(capsys, "power", "--pt", "1m", "--points", "5", "--delta-f", "100M")
    header, rows = table(out)
    np.testing.assert_allclose(rows[:, header.index("p_sum_dbm")], rows[:, header.index("p_sum_db")], atol=1e-9)


def test_optimize_short_range(capsys):
    code, out, _ = run(capsys, "optimize", "--output", "json")
    assert code == 0
    res = json.loads(out)["result"]
    assert res["delta_f_star"] / 1e6 == pytest.approx(177, abs=1)
    assert res["worst_case_db"] == pytest.approx(-85.7, abs=0.2)
    assert res["branch"] == "intersect_between_nulls"
    assert res["peak_hz_at_d_max"] / 1e6 == pytest.approx(502, abs=1)


def test_optimize_uav(capsys):
    _, out, _ = run(capsys, "optimize", "--hrx", "3", "--dmin", "30", "--dmax", "330")
    fields = dict(ln.split(",", 1) for ln in out.splitlines()[1:])
    assert float(fields["delta_f_star"]) / 1e6 == pytest.approx(190, abs=2)


def test_bad_interval_is_usage_error(capsys):
    code, _, err = run(capsys, "optimize", "--dmin", "100", "--dmax", "10")
    assert code == 2
    assert "--dmin/--dmax" in err


def test_unparseable_flag(capsys):
    code, _, err = run(capsys, "rate", "--f1", "fast")
    assert code == 2 and "--f1" in err


def test_numerical_failure_exit_code(capsys, monkeypatch):
    def boom(*args, **kwargs):
        raise SearchError("forced")

    monkeypatch.setattr(cli, "optimal_spacing", boom)
    code, _, err = run(capsys, "optimize")
    assert code == 3 and "forced" in err


def test_rate_min_columns(capsys):
    _, out, _ = run(capsys, "rate", "--points", "4000")
    header, rows = table(out)
    assert rows[:, 1].min() >= 51.1e3 * 0.99
    assert rows[:, 2].min() >= 636.8e3 * 0.99
    assert rows[:, 3].min() == pytest.approx(636.8e3, rel=0.01)


def test_rate_single_row_at_null(capsys):
    d3 = null_distance(3, RadioConfig(2.4e9).omega1, LinkGeometry(10, 1.5))
    _, out, _ = run(capsys, "rate", "--d", repr(d3))
    _, rows = table(out)
    assert rows.shape == (1, 4)
    assert rows[0, 1] == pytest.approx(51.1e3, rel=0.01)


def test_rate_zero_power(capsys):
    code, out, _ = run(capsys, "rate", "--pt", "0", "--points", "5")
    assert code == 0
    _, rows = table(out)
    assert np.all(rows[:, 1:] == 0)


def test_outage_too_few_samples(capsys):
    code, _, err = run(capsys, "outage", "--samples", "10")
    assert code == 2 and "--samples" in err


def test_outage_epsilon_resolution(capsys):
    code, _, err = run(capsys, "outage", "--samples", "5000", "--epsilon", "1e-5")
    assert code == 2 and "--epsilon" in err


def test_outage_deterministic_and_worker_free(capsys):
    args = ("outage", "--samples", "150000", "--epsilon", "1e-4", "--points", "6", "--seed", "42")
    first = run(capsys, *args)[1]
    again = run(capsys, *args)[1]
    threaded = run(capsys, *args, "--workers", "8")[1]
    assert first == again == threaded


def test_outage_mobility(capsys):
    code, out, _ = run(capsys, "outage", "--sampler", "mobility", "--hrx", "3", "--dmin", "30", "--dmax", "330",
                       "--samples", "100000", "--steps", "500", "--epsilon", "1e-4", "--points", "3")
    assert code == 0
    marks = summary(out)
    assert float(marks["eps_capacity_two_bound_bps"]) > float(marks["eps_capacity_single_bps"])


def test_outage_trace(capsys, tmp_path):
    trace = tmp_path / "d.txt"
    trace.write_text("\n".join(str(x) for x in np.linspace(10, 100, 1000)))
    code, out, _ = run(capsys, "outage", "--sampler", "trace", "--trace", str(trace), "--samples", "1000",
                       "--epsilon", "1e-2", "--points", "3")
    assert code == 0
    code, _, err = run(capsys, "outage", "--sampler", "trace", "--trace", str(tmp_path / "none.txt"))
    assert code == 2 and "--trace" in err


def test_json_round_trip(capsys, tmp_path):
    for args in (("rate", "--points", "7", "--delta-f", "177M"),
                 ("outage", "--samples", "20000", "--epsilon", "1e-3", "--points", "5", "--seed", "3"),
                 ("optimize", "--hrx", "3", "--dmin", "30", "--dmax", "330")):
        _, first, _ = run(capsys, *args, "--output", "json")
        path = tmp_path / "run.json"
        path.write_text(first)
        _, second, _ = run(capsys, args[0], "--config", str(path), "--output", "json")
        assert second == first


def test_config_precedence(capsys, tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"f1": "2.4G", "dmax": 200, "points": 3}))
    _, out, _ = run(capsys, "rate", "--config", str(path), "--dmax", "150", "--output", "json")
    doc = json.loads(out)
    assert doc["config"]["dmax"] == 150.0  # flag beats file
    assert doc["config"]["points"] == 3  # file beats default
    assert doc["config"]["theta"] == 0.5  # default
    assert doc["columns"]["d_m"][-1] == pytest.approx(150.0)


def test_config_unknown_key(capsys, tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"frequency": 1}))
    code, _, err = run(capsys, "rate", "--config", str(path))
    assert code == 2 and "frequency" in err


def test_sweep_command(capsys):
    code, out, _ = run(capsys, "sweep", "--param", "dmax", "--start", "60", "--stop", "140", "--points", "3")
    assert code == 0
    header, rows = table(out)
    assert header == ["dmax", "delta_f_star_hz", "worst_case_db", "zoc_single_bps", "zoc_two_bound_bps"]
    assert rows[1, 1] / 1e6 == pytest.approx(177, abs=1)
    assert np.all(rows[:, 4] > rows[:, 3])
    code, _, err = run(capsys, "sweep", "--param", "seed", "--start", "1", "--stop", "2")
    assert code == 2


def test_si_flags(capsys):
    _, a, _ = run(capsys, "rate", "--f1", "2.4G", "--bandwidth", "100k", "--pt", "1m", "--points", "3")
    _, b, _ = run(capsys, "rate", "--f1", "2400000000", "--bandwidth", "1e5", "--pt", "0.001", "--points", "3")
    assert a == b
