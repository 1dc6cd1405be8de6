import json
import os
import subprocess
import sys

import numpy as np
import pytest

from pplab import reporting, scenarios
from pplab.scenarios import ResultRow, ScenarioConfig


def _tiny_rows():
    return [
        ResultRow(
            scenario="gilbert-edges",
            d=2,
            t=50.0,
            statistic="edge-count",
            distance_name="wasserstein",
            distance=0.123456789012345,
            stderr=0.01,
            bound=0.4,
            bound_form="moment-form",
            rate_pred=-1.0,
            seed=7,
        ),
        ResultRow(
            scenario="gilbert-edges",
            d=2,
            t=100.0,
            statistic="edge-count",
            distance_name="wasserstein",
            distance=0.05,
            stderr=0.009,
            bound=None,
            bound_form="",
            rate_pred=None,
            seed=7,
        ),
    ]


def test_config_validation():
    with pytest.raises(ValueError):
        ScenarioConfig(scenario="nope").validate()
    with pytest.raises(ValueError):
        ScenarioConfig(scenario="gilbert-edges", t_grid=(100.0, 50.0)).validate()
    with pytest.raises(ValueError):
        ScenarioConfig(scenario="gilbert-edges", reps=0).validate()
    with pytest.raises(ValueError):
        ScenarioConfig(scenario="gilbert-edges", reps=10).validate()  # distance scenario
    with pytest.raises(ValueError):
        ScenarioConfig.from_dict({"scenario": "flats", "bogus": 1})
    cfg = ScenarioConfig.from_dict(
        {"scenario": "mecke-verify", "d": 2, "t_grid": [20.0], "reps": 50, "seed": 3}
    )
    assert cfg.scenario == "mecke-verify"


def test_emit_csv_single_row(tmp_path):
    path = reporting.emit(_tiny_rows()[:1], "csv", tmp_path / "out.csv")
    lines = path.read_text().splitlines()
    assert lines[0] == ",".join(reporting.COLUMNS)
    assert len(lines) == 2


def test_emit_rejects_empty_and_unknown(tmp_path):
    with pytest.raises(ValueError):
        reporting.emit([], "csv", tmp_path / "x.csv")
    assert not (tmp_path / "x.csv").exists()
    with pytest.raises(ValueError):
        reporting.emit(_tiny_rows(), "yaml", tmp_path / "x.yaml")


def test_round_trip_csv_json(tmp_path):
    rows = _tiny_rows()
    csv_path = reporting.emit(rows, "csv", tmp_path / "r.csv")
    parsed = reporting.parse_csv(csv_path)
    json_path = reporting.emit(rows, "json", tmp_path / "r.json")
    parsed_json = reporting.parse_json(json_path)
    for rec_c, rec_j, row in zip(parsed, parsed_json, rows):
        for col in ("t", "distance", "stderr", "bound", "rate_pred"):
            v = getattr(row, col)
            if v is None:
                assert rec_c[col] is None and rec_j[col] is None
            else:
                assert abs(rec_c[col] - v) < 1e-12
                assert abs(rec_j[col] - v) < 1e-12
        assert rec_c["scenario"] == rec_j["scenario"] == row.scenario


def test_gnuplot_dat(tmp_path):
    path = reporting.emit(_tiny_rows(), "gnuplot-dat", tmp_path / "r.dat")
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# scenario")
    assert len(lines) == 3
    assert " " in lines[1] and "," not in lines[1]


def test_run_determinism_byte_identical(tmp_path):
    cfg = ScenarioConfig(
        scenario="mecke-verify", d=2, t_grid=(10.0,), reps=120, seed=9, params={"n": 10}
    )
    r1 = scenarios.run(cfg)
    r2 = scenarios.run(cfg)
    p1 = reporting.emit(r1.rows, "csv", tmp_path / "a.csv")
    p2 = reporting.emit(r2.rows, "csv", tmp_path / "b.csv")
    assert p1.read_bytes() == p2.read_bytes()


def test_worker_pool_matches_serial(tmp_path):
    cfg = ScenarioConfig(
        scenario="gilbert-edges", d=2, t_grid=(15.0,), reps=1000, seed=4
    )
    serial = scenarios.run(cfg)
    os.environ["PPLAB_THREADS"] = "3"
    try:
        pooled = scenarios.run(cfg)
    finally:
        del os.environ["PPLAB_THREADS"]
    assert serial.rows[0].distance == pooled.rows[0].distance
    assert serial.rows[0].stderr == pooled.rows[0].stderr


def test_cli_run_and_exit_codes(tmp_path):
    config = {
        "scenario": "mecke-verify",
        "d": 2,
        "t_grid": [10.0],
        "reps": 600,
        "seed": 2,
        "params": {"n": 10},
    }
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(config))
    out_path = tmp_path / "rows.csv"
    proc = subprocess.run(
        [
            sys.executable,
            "-m",
            "pplab.cli",
            "run",
            "--config",
            str(cfg_path),
            "--output",
            str(out_path),
        ],
        capture_output=True,
        text=True,
        cwd=str(tmp_path),
    )
    assert proc.returncode == 0, proc.stderr + proc.stdout
    assert out_path.exists()
    assert "summary:" in proc.stdout


def test_cli_usage_error_is_exit_1(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "pplab.cli", "run", "--config", str(tmp_path / "missing.json")],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 1
    proc2 = subprocess.run(
        [sys.executable, "-m", "pplab.cli", "frobnicate"],
        capture_output=True,
        text=True,
    )
    assert proc2.returncode == 1


def test_cli_list_scenarios():
    proc = subprocess.run(
        [sys.executable, "-m", "pplab.cli", "list-scenarios"], capture_output=True, text=True
    )
    assert proc.returncode == 0
    for name in scenarios.SCENARIO_NAMES:
        assert name in proc.stdout


def test_cli_verify_ot_suite():
    proc = subprocess.run(
        [sys.executable, "-m", "pplab.cli", "verify", "--suite", "ot", "--reps", "40"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stdout + proc.stderr
    assert "PASS" in proc.stdout


def test_scenario_rows_reproducible_fields():
    cfg = ScenarioConfig(scenario="kr-estimate", d=2, t_grid=(2.0,), reps=10, seed=5, params={"n_configs": 110})
    res = scenarios.run(cfg)
    assert {r.distance_name for r in res.rows} == {"kr-surrogate", "kr-noise-floor"}
    surrogate = [r for r in res.rows if r.distance_name == "kr-surrogate"][0]
    floor = [r for r in res.rows if r.distance_name == "kr-noise-floor"][0]
    assert surrogate.distance >= 0 and floor.distance >= 0


def test_rate_sanity_slope_to_800():
    # measured Wasserstein distance vs the Poisson target falls at least like
    # t^(-1/2) across the wide grid (the predicted rate is t^(-1))
    cfg = ScenarioConfig(
        scenario="gilbert-edges",
        d=2,
        t_grid=(50.0, 100.0, 200.0, 400.0, 800.0),
        reps=20_000,
        seed=11,
        params={"n_boot": 60},
    )
    res = scenarios.run(cfg)
    assert res.summary["slope"] <= -0.5


def test_vectorized_line_pair_formulas_match_lstsq():
    from pplab.geometry import flat_distance_midpoint
    from pplab.rng import derive_rng
    from pplab.sampling import sample_poisson_flats

    flats = sample_poisson_flats(3, 1, 4.0, 1.0, derive_rng(99))
    assert len(flats) >= 2
    counted = scenarios._count_close_line_pairs(flats, np.inf, np.inf)
    assert counted == len(flats) * (len(flats) - 1) // 2
    # spot-check distances and midpoints against the least-squares solver
    import itertools

    bases = np.asarray([f.base for f in flats])
    dirs = np.asarray([f.directions[0] for f in flats])
    for i, j in itertools.islice(itertools.combinations(range(len(flats)), 2), 12):
        dist_ref, mid_ref = flat_distance_midpoint(flats[i], flats[j])
        w = bases[i] - bases[j]
        c = dirs[i] @ dirs[j]
        fu, fv = w @ dirs[i], w @ dirs[j]
        t2 = (fv - c * fu) / (1 - c * c)
        t1 = c * t2 - fu
        p1 = bases[i] + t1 * dirs[i]
        p2 = bases[j] + t2 * dirs[j]
        assert np.linalg.norm(p1 - p2) == pytest.approx(dist_ref, abs=1e-9)
        assert np.allclose((p1 + p2) / 2, mid_ref, atol=1e-9)
