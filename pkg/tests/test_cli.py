import csv
import io
import json

import pytest

from ttdtrain.cli import EXIT_CONFIG, EXIT_IO, EXIT_OK, RunConfig, load_config, main
from ttdtrain.config import ConfigError


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def design_value(text, key):
    for line in text.splitlines():
        if line.startswith(key + " ="):
            return float(line.split("=")[1])
    raise KeyError(key)


class TestDesign:
    def test_default_delay_range(self, capsys):
        code, out, _ = run(capsys, "design")
        assert code == EXIT_OK
        assert design_value(out, "tau_max_ns") == 30.0
        assert "branch" in out and "delay_ps" in out

    def test_r1_resolution(self, capsys):
        code, out, _ = run(capsys, "design", "--r", "1")
        assert code == EXIT_OK
        assert design_value(out, "delta_tau_ns") == 0.5

    def test_lists_direction_sets(self, capsys):
        _, out, _ = run(capsys, "design")
        rows = [l.split() for l in out.splitlines() if l.strip().startswith(("1 ", "2 "))]
        assert ["1", "1", "1025", "2049", "3073"] in rows
        assert ["2", "33", "1057", "2081", "3105"] in rows

    def test_config_file(self, capsys, tmp_path):
        path = tmp_path / "c.json"
        path.write_text(json.dumps({"r": 2, "bw_ghz": 1.0}))
        _, out, _ = run(capsys, "design", "--config", str(path))
        assert design_value(out, "delta_tau_ns") == 2.0

    def test_flag_overrides_config(self, capsys, tmp_path):
        path = tmp_path / "c.json"
        path.write_text(json.dumps({"r": 2}))
        _, out, _ = run(capsys, "design", "--config", str(path), "--r", "1")
        assert design_value(out, "delta_tau_ns") == 0.5


class TestConfigErrors:
    @pytest.mark.parametrize(
        "payload, key",
        [
            ({"bandwidth": 2.0}, "bandwidth"),
            ({"r": "four"}, "r"),
            ({"sigma_t_ps": [1]}, "sigma_t_ps"),
        ],
    )
    def test_bad_key_exit_2(self, capsys, tmp_path, payload, key):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(payload))
        code, _, err = run(capsys, "design", "--config", str(path))
        assert code == EXIT_CONFIG
        assert repr(key) in err

    def test_malformed_json(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{r: 4")
        code, _, err = run(capsys, "design", "--config", str(path))
        assert code == EXIT_CONFIG and "malformed" in err

    def test_invalid_combination(self, capsys):
        code, _, err = run(capsys, "design", "--r", "3")
        assert code == EXIT_CONFIG and err

    def test_negative_sigma(self, capsys, tmp_path):
        code, _, _ = run(capsys, "simulate", "--sigma-t-ps", "-1", "--trials", "1")
        assert code == EXIT_CONFIG

    def test_load_config_defaults(self, tmp_path):
        path = tmp_path / "empty.json"
        path.write_text("{}")
        assert load_config(path) == RunConfig()
        with pytest.raises(ConfigError):
            load_config(tmp_path / "missing.json")

    def test_shipped_default_config_matches_defaults(self):
        import pathlib

        path = pathlib.Path(__file__).resolve().parents[1] / "configs" / "default.json"
        rc = load_config(path)
        assert rc == RunConfig(seed=0)


def read_csv(path):
    return list(csv.DictReader(io.StringIO(path.read_text(encoding="utf-8"))))


class TestSweep:
    def test_record_count_and_bytes(self, capsys, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        argv = ["sweep", "--sweep", "r", "--values", "1,2,4", "--snr-db", "0", "--trials", "5"]
        assert run(capsys, *argv, "-o", str(a))[0] == EXIT_OK
        assert run(capsys, *argv, "-o", str(b))[0] == EXIT_OK
        rows = read_csv(a)
        assert len(rows) == 6
        assert {r["algorithm"] for r in rows} == {"super", "coarse"}
        assert a.read_bytes() == b.read_bytes()

    def test_threads_flag_keeps_bytes(self, capsys, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        argv = ["sweep", "--sweep", "snr", "--values", "0,10", "--trials", "6"]
        run(capsys, *argv, "-o", str(a))
        run(capsys, *argv, "-o", str(b), "--threads", "2")
        assert a.read_bytes() == b.read_bytes()

    def test_seed_flag(self, capsys, tmp_path):
        a, b, c = (tmp_path / f"{n}.csv" for n in "abc")
        argv = ["sweep", "--sweep", "snr", "--values", "0", "--trials", "5"]
        run(capsys, *argv, "-o", str(a))
        run(capsys, *argv, "-o", str(b), "--seed", "0")
        run(capsys, *argv, "-o", str(c), "--seed", "1")
        assert a.read_bytes() == b.read_bytes()
        assert read_csv(c)[0]["seed"] == "1"
        assert a.read_bytes() != c.read_bytes()

    def test_rf_delay_error_ordering(self, capsys, tmp_path):
        out = tmp_path / "t.csv"
        code, stdout, _ = run(
            capsys, "sweep", "--sweep", "sigma_t", "--arch", "rf", "--values-ps", "0,1.5,5", "--trials", "100",
            "-o", str(out),
        )
        assert code == EXIT_OK and "rmse" in stdout
        rows = [r for r in read_csv(out) if r["algorithm"] == "super"]
        assert [float(r["param_value"]) for r in rows] == [0.0, 1.5e-12, 5e-12]
        rmse = [float(r["rmse_rad"]) for r in rows]
        assert rmse == sorted(rmse)

    def test_unwritable_output(self, capsys, tmp_path):
        target = tmp_path / "no" / "such" / "dir" / "x.csv"
        code, _, err = run(capsys, "sweep", "--sweep", "r", "--values", "1", "--trials", "1", "-o", str(target))
        assert code == EXIT_IO and "cannot write" in err

    def test_missing_values(self, capsys, tmp_path):
        code, _, _ = run(capsys, "sweep", "--sweep", "r", "-o", str(tmp_path / "x.csv"))
        assert code == EXIT_CONFIG

    def test_values_ps_only_for_delay(self, capsys, tmp_path):
        code, _, _ = run(capsys, "sweep", "--sweep", "r", "--values-ps", "1", "-o", str(tmp_path / "x.csv"))
        assert code == EXIT_CONFIG


def test_simulate_prints_both_algorithms(capsys):
    code, out, _ = run(capsys, "simulate", "--trials", "3")
    assert code == EXIT_OK
    assert "super" in out and "coarse" in out


def test_hwspec_rows(capsys):
    code, out, _ = run(capsys, "hwspec")
    assert code == EXIT_OK
    rows = [l.split()[:4] for l in out.splitlines()[1:]]
    assert rows == [["1", "0.5", "7.5", "31"], ["2", "1", "15", "61"], ["4", "2", "30", "121"]]


def test_hwspec_bad_r_values(capsys):
    assert run(capsys, "hwspec", "--r-values", "1,x")[0] == EXIT_CONFIG
