import csv
import json

import pytest

from markovup import cli, tau_of


def write_config(tmp_path, name="config.json", **overrides):
    doc = {
        "model": {"a": 0.5, "r": 0.5, "s": 0.5},
        "floor_n": 5,
        "x_grid": [6, 10],
        "m_list": [1, 2],
        "n_traj": 400,
        "seed": 7,
        "max_steps": 1000000,
        "epsilon": 1e-10,
        "output": {
            "report_json": str(tmp_path / "report.json"),
            "paths_csv": str(tmp_path / "paths.csv"),
            "verdicts_csv": str(tmp_path / "verdicts.csv"),
        },
    }
    for key, value in overrides.items():
        if key in ("a", "r", "s"):
            doc["model"][key] = value
        elif key.startswith("output_"):
            doc["output"][key[len("output_"):]] = value
        else:
            doc[key] = value
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return path


class TestConfigValidation:
    def test_defaults_load_without_file(self):
        config = cli.load_config(None)
        assert config.n_traj == 100_000
        assert config.x_grid == (6, 10, 20)

    def test_bad_json_reports_line(self, tmp_path):
        path = tmp_path / "c.json"
        path.write_text('{\n  "floor_n": 5,\n  oops\n}')
        with pytest.raises(cli.ConfigError, match=r":3:"):
            cli.load_config(str(path))

    def test_out_of_range_parameter_names_field(self, tmp_path):
        path = write_config(tmp_path, r=1.0)
        with pytest.raises(cli.ConfigError, match="model.r"):
            cli.load_config(str(path))

    def test_unknown_field_rejected(self, tmp_path):
        path = tmp_path / "c.json"
        path.write_text('{"floor": 5}')
        with pytest.raises(cli.ConfigError, match="floor"):
            cli.load_config(str(path))

    def test_missing_file(self):
        with pytest.raises(cli.ConfigError, match="no/such/file"):
            cli.load_config("no/such/file.json")

    def test_usage_error_exit_code(self, tmp_path, capsys):
        path = write_config(tmp_path, r=1.5)
        code = cli.main(["verify", str(path)])
        assert code == cli.EXIT_USAGE
        assert "model.r" in capsys.readouterr().err


class TestSubcommands:
    def test_certify_prints_json(self, tmp_path, capsys):
        path = write_config(tmp_path)
        assert cli.main(["certify", str(path)]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["theorem_ready"] is True
        assert doc["entries"]["A2"]["status"] == "fails"

    def test_bounds_include_theorem_values(self, tmp_path, capsys):
        path = write_config(tmp_path)
        assert cli.main(["bounds", str(path)]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert set(doc) == {"1", "2"}
        per_x = doc["1"]["theorem_bound_at_x"]
        assert set(per_x) == {"6", "10"}
        assert per_x["10"]["value"] >= per_x["10"]["display"]

    def test_simulate_writes_paths_csv(self, tmp_path):
        path = write_config(tmp_path)
        assert cli.main(["simulate", str(path)]) == 0
        with open(tmp_path / "paths.csv") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 2 * 400
        assert set(rows[0]) == {"path_id", "tau", "attempts", "max_state", "capped"}
        assert all(r["capped"] == "0" for r in rows)

    def test_verify_pipeline_outputs(self, tmp_path):
        path = write_config(tmp_path)
        code = cli.main(["verify", str(path)])
        assert code == cli.EXIT_OK
        report = json.loads((tmp_path / "report.json").read_text())
        assert set(report) == {
            "config", "certificate", "bound_sets", "estimates",
            "verdicts", "diagnostics", "warnings", "timing",
        }
        assert all(v["passed"] for v in report["verdicts"])
        assert report["timing"]["capped_paths"] == 0
        breakdown = report["diagnostics"]["10"]
        assert breakdown["rise_length_by_index"]["1"]["n"] > 0
        assert sum(breakdown["attempt_count_hist"].values()) == 400
        with open(tmp_path / "verdicts.csv") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == len(report["verdicts"])

    def test_capped_paths_fail_verdicts(self, tmp_path):
        path = write_config(tmp_path, x_grid=[40], max_steps=4, n_traj=50)
        code = cli.main(["verify", str(path)])
        assert code == cli.EXIT_VERDICT_FAIL
        report = json.loads((tmp_path / "report.json").read_text())
        assert report["timing"]["capped_paths"] > 0
        assert any("capped" in w for w in report["warnings"])

    def test_low_sample_warning(self, tmp_path):
        path = write_config(tmp_path, n_traj=10)
        code = cli.main(["verify", str(path)])
        assert code in (cli.EXIT_OK, cli.EXIT_VERDICT_FAIL)
        report = json.loads((tmp_path / "report.json").read_text())
        assert any("low-sample" in w for w in report["warnings"])

    def test_seed_override_changes_results(self, tmp_path):
        path = write_config(tmp_path)
        cli.main(["verify", str(path)])
        first = (tmp_path / "paths.csv").read_text()
        cli.main(["--seed", "123", "verify", str(path)])
        second = (tmp_path / "paths.csv").read_text()
        assert first != second

    def test_threads_do_not_change_results(self, tmp_path):
        path = write_config(tmp_path)
        cli.main(["--threads", "1", "verify", str(path)])
        first = (tmp_path / "report.json").read_bytes()
        cli.main(["--threads", "4", "verify", str(path)])
        second = (tmp_path / "report.json").read_bytes()
        assert first == second


class TestTrajectoryRoundTrip:
    def test_dump_and_report(self, tmp_path):
        traj_csv = str(tmp_path / "trajectories.csv")
        path = write_config(tmp_path, output_trajectories_csv=traj_csv)
        assert cli.main(["simulate", str(path)]) == 0
        dumped = cli.read_trajectories_csv(traj_csv)
        assert len(dumped) == 2 * 400
        for x0, pid, traj in dumped:
            assert tau_of(traj.states, traj.floor_n) == traj.tau
        # report rebuilds verdicts from the dump alone
        code = cli.main(["report", str(path)])
        assert code == cli.EXIT_OK
        report = json.loads((tmp_path / "report.json").read_text())
        assert all(v["passed"] for v in report["verdicts"])

    def test_report_rejects_corrupted_dump(self, tmp_path):
        traj_csv = tmp_path / "trajectories.csv"
        path = write_config(tmp_path, output_trajectories_csv=str(traj_csv))
        assert cli.main(["simulate", str(path)]) == 0
        rows = traj_csv.read_text().splitlines()
        header, first = rows[0], rows[1]
        cells = first.split(",")
        cells[2] = str(int(cells[2]) + 1)  # corrupt recorded tau
        traj_csv.write_text("\n".join([header, ",".join(cells)] + rows[2:]))
        assert cli.main(["report", str(path)]) == cli.EXIT_USAGE

    def test_report_requires_dump(self, tmp_path):
        path = write_config(tmp_path)
        assert cli.main(["report", str(path)]) == cli.EXIT_USAGE


def test_run_entry_point(tmp_path):
    path = write_config(tmp_path)
    assert cli.run(str(path)) == cli.EXIT_OK
    assert cli.run(str(write_config(tmp_path, name="bad.json", s=0.0))) == cli.EXIT_USAGE
