import json
import math

import numpy as np
import pytest

from trilevel.cli import describe_map, main, parse_scenario, serialize_scenario
from trilevel.errors import ScenarioError


def write_scenario(tmp_path, payload, name="scenario.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return path


def minimal_fig2a(task="simulate", **extra):
    payload = {
        "schema_version": 1,
        "task": task,
        "system": {"config": "fig2a", "gamma21": 1.0, "gamma31": 0.1,
                   "omega_a": 2.0, "omega_b": 0.6},
    }
    payload.update(extra)
    return payload


# ---------------------------------------------------------------- parsing

def test_parse_minimal_scenario_applies_defaults(tmp_path):
    s = parse_scenario(write_scenario(tmp_path, minimal_fig2a()))
    assert s.task == "simulate"
    assert s.time_grid == (0.0, 20.0, 201)
    assert s.seed == 0
    assert s.tolerances["equivalence"] == 1e-8
    assert s.system.gamma23_or_31 == 0.1


def test_parse_rejects_negative_rate_naming_field(tmp_path):
    payload = minimal_fig2a()
    payload["system"]["gamma21"] = -1.0
    with pytest.raises(ScenarioError, match="gamma21"):
        parse_scenario(write_scenario(tmp_path, payload))


def test_parse_rejects_unknown_field(tmp_path):
    payload = minimal_fig2a()
    payload["turbo"] = True
    with pytest.raises(ScenarioError, match="turbo"):
        parse_scenario(write_scenario(tmp_path, payload))


def test_parse_rejects_wrong_gamma_alias(tmp_path):
    payload = minimal_fig2a()
    payload["system"]["gamma23"] = payload["system"].pop("gamma31")
    with pytest.raises(ScenarioError, match="gamma23"):
        parse_scenario(write_scenario(tmp_path, payload))


def test_parse_rejects_bad_task(tmp_path):
    with pytest.raises(ScenarioError, match="task"):
        parse_scenario(write_scenario(tmp_path, minimal_fig2a(task="fly")))


def test_parse_missing_file():
    with pytest.raises(FileNotFoundError):
        parse_scenario("/nonexistent/scenario.json")


def test_scenario_round_trip_is_identity(tmp_path):
    payload = minimal_fig2a(
        task="equiv-check",
        time_grid=[0.0, 10.0, 101],
        seed=7,
        tolerances={"equivalence": 1e-9},
        options={"compare_mapped": True},
    )
    first = parse_scenario(write_scenario(tmp_path, payload))
    second = parse_scenario(write_scenario(tmp_path,
                                           serialize_scenario(first),
                                           name="echo.json"))
    assert first == second


# ------------------------------------------------------------------- runs

def test_equiv_check_run_passes(tmp_path):
    payload = minimal_fig2a(task="equiv-check",
                            time_grid=[0.0, 10.0, 51])
    payload["system"].update({"delta2": 0.4, "delta3": -0.7})
    code = main(["equiv-check", "--config",
                 str(write_scenario(tmp_path, payload)),
                 "--out", str(tmp_path / "out")])
    assert code == 0
    report = json.loads((tmp_path / "out" / "report.json").read_text())
    assert report["passed"] is True
    check = report["checks"][0]
    assert check["value"] < check["tol"] == 1e-8
    assert report["equivalence_map"]["phi"] > 0
    assert (tmp_path / "out" / "equivalence.dat").exists()


def test_equiv_check_detects_wrong_target(tmp_path):
    payload = minimal_fig2a(task="equiv-check", time_grid=[0.0, 5.0, 26])
    payload["target"] = {"config": "fig2b", "gamma21": 0.55, "gamma31": 0.55,
                         "omega_a": 1.4, "omega_b": 1.4, "delta2": -0.6,
                         "delta3": 0.6, "phi": 1.0}
    code = main(["equiv-check", "--config",
                 str(write_scenario(tmp_path, payload)),
                 "--out", str(tmp_path / "out")])
    assert code == 1


def test_simulate_zero_horizon_single_row(tmp_path):
    payload = minimal_fig2a(task="simulate", time_grid=[0.0, 0.0, 1])
    code = main(["simulate", "--config",
                 str(write_scenario(tmp_path, payload)),
                 "--out", str(tmp_path / "out")])
    assert code == 0
    data = np.loadtxt(tmp_path / "out" / "populations.dat", ndmin=2)
    assert data.shape == (1, 4)
    np.testing.assert_allclose(data[0], [0.0, 1.0, 0.0, 0.0], atol=1e-12)


def test_trajectories_are_bit_identical_for_fixed_seed(tmp_path):
    payload = minimal_fig2a(task="trajectories", time_grid=[0.0, 10.0, 2],
                            seed=123,
                            options={"n_traj": 20, "dt": 0.05,
                                     "dark_threshold": 3.0})
    cfg = write_scenario(tmp_path, payload)
    main(["trajectories", "--config", str(cfg), "--out", str(tmp_path / "a")])
    main(["trajectories", "--config", str(cfg), "--out", str(tmp_path / "b")])
    bytes_a = (tmp_path / "a" / "jumps.dat").read_bytes()
    bytes_b = (tmp_path / "b" / "jumps.dat").read_bytes()
    assert bytes_a == bytes_b
    report = json.loads((tmp_path / "a" / "report.json").read_text())
    assert report["extras"]["bright_dark"]["n_gaps"] > 0


def test_g2_compare_mapped_run(tmp_path):
    payload = minimal_fig2a(task="g2", time_grid=[0.0, 20.0, 101],
                            options={"compare_mapped": True})
    code = main(["g2", "--config", str(write_scenario(tmp_path, payload)),
                 "--out", str(tmp_path / "out")])
    assert code == 0
    report = json.loads((tmp_path / "out" / "report.json").read_text())
    assert report["checks"][0]["passed"] is True
    data = np.loadtxt(tmp_path / "out" / "g2.dat", ndmin=2)
    assert data.shape[1] == 3  # tau, value, mapped value


def test_spectrum_compare_mapped_run(tmp_path):
    payload = minimal_fig2a(task="spectrum",
                            omega_grid=[-8.0, 8.0, 201],
                            options={"compare_mapped": True,
                                     "n_tau": 4096, "tau_horizon": 200.0})
    code = main(["spectrum", "--config",
                 str(write_scenario(tmp_path, payload)),
                 "--out", str(tmp_path / "out")])
    assert code == 0
    data = np.loadtxt(tmp_path / "out" / "spectrum.dat", ndmin=2)
    assert data.shape == (201, 3)


def test_waiting_time_run_writes_curve(tmp_path):
    payload = minimal_fig2a(task="waiting-time", time_grid=[0.0, 15.0, 61])
    code = main(["waiting-time", "--config",
                 str(write_scenario(tmp_path, payload)),
                 "--out", str(tmp_path / "out")])
    assert code == 0
    data = np.loadtxt(tmp_path / "out" / "waiting_time.dat", ndmin=2)
    assert data.shape == (61, 2)
    assert data[0, 1] == 0.0


def test_verb_task_mismatch_is_an_error(tmp_path):
    cfg = write_scenario(tmp_path, minimal_fig2a(task="simulate"))
    code = main(["g2", "--config", str(cfg), "--out", str(tmp_path / "out")])
    assert code == 2


def test_data_files_declare_units(tmp_path):
    payload = minimal_fig2a(task="simulate", time_grid=[0.0, 1.0, 5])
    main(["simulate", "--config", str(write_scenario(tmp_path, payload)),
          "--out", str(tmp_path / "out")])
    header = (tmp_path / "out" / "populations.dat").read_text().splitlines()[:2]
    assert all(line.startswith("#") for line in header)
    assert "Gamma_ref" in header[1]


# ----------------------------------------------------------- describe-map

def test_describe_map_parallel_dipoles(capsys, tmp_path):
    payload = {
        "schema_version": 1,
        "task": "simulate",
        "system": {"config": "fig1a", "gamma21": 1.0, "gamma23": 0.0,
                   "omega_a": 1.0, "omega_b": 0.5},
    }
    code = main(["describe-map", "--config",
                 str(write_scenario(tmp_path, payload))])
    assert code == 0
    out = capsys.readouterr().out
    assert "phi     : 0 rad" in out
    assert "fig1b" in out


def test_describe_map_symmetric_rates():
    from trilevel.systems import Config, SystemParams
    p = SystemParams(Config.FIG2A, gamma21=0.7, gamma23_or_31=0.7,
                     omega_a=1.0, omega_b=0.4)
    text = describe_map(p)
    assert f"{math.pi / 2:.12g}" in text


def test_describe_map_matches_module_values():
    from trilevel.equivalence import map_fig2a_to_fig2b
    from trilevel.systems import Config, SystemParams
    p = SystemParams(Config.FIG2A, gamma21=1.3, gamma23_or_31=0.2,
                     omega_a=1.1, omega_b=0.9, delta2=0.5, delta3=-0.3)
    _, emap = map_fig2a_to_fig2b(p)
    text = describe_map(p)
    assert f"{emap.theta:.12g}" in text
    assert f"{emap.phi:.12g}" in text
    assert f"{emap.lambda1:.12g}" in text


def test_describe_map_degenerate_basis_is_reported(tmp_path, capsys):
    payload = {
        "schema_version": 1,
        "task": "simulate",
        "system": {"config": "fig1a", "gamma21": 1.0, "gamma23": 0.5,
                   "omega_a": 1.0, "omega_b": 0.0, "delta3": 0.0},
    }
    code = main(["describe-map", "--config",
                 str(write_scenario(tmp_path, payload))])
    assert code == 2
    err = capsys.readouterr().err
    assert "dressed basis undefined" in err


def test_matrix_initial_state(tmp_path):
    payload = minimal_fig2a(task="simulate", time_grid=[0.0, 1.0, 3])
    payload["initial_state"] = [[0.5, 0.0, [0.0, 0.2]],
                                [0.0, 0.3, 0.0],
                                [[0.0, -0.2], 0.0, 0.2]]
    code = main(["simulate", "--config",
                 str(write_scenario(tmp_path, payload)),
                 "--out", str(tmp_path / "out")])
    assert code == 0
    data = np.loadtxt(tmp_path / "out" / "populations.dat", ndmin=2)
    np.testing.assert_allclose(data[0, 1:], [0.5, 0.3, 0.2], atol=1e-12)


def test_matrix_initial_state_rejects_invalid(tmp_path):
    payload = minimal_fig2a(task="simulate")
    payload["initial_state"] = [[1.0, 0, 0], [0, 1.0, 0], [0, 0, 0]]  # trace 2
    with pytest.raises(ScenarioError, match="initial_state"):
        parse_scenario(write_scenario(tmp_path, payload))
