import csv
import json
import math
import re
import time

import numpy as np
import pytest

from mapla import cli


def write_json(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


def sample_config(**overrides):
    cfg = {
        "body": {"kind": "simplex", "dim": 2},
        "potential": {"kind": "dirichlet", "a": [1.0, 1.0, 1.0]},
        "algorithm": "mapla",
        "h": 0.05,
        "n_chains": 5,
        "n_iters": 20,
        "record_every": 10,
        "seed": 3,
    }
    cfg.update(overrides)
    return cfg


def read_csv(path):
    with open(path) as fh:
        return list(csv.reader(fh))


class TestSample:
    def test_zero_iters_echoes_initial_points(self, tmp_path):
        cfg_path = write_json(tmp_path / "cfg.json", sample_config(n_iters=0))
        out = tmp_path / "out"
        out.mkdir()
        assert cli.main(["sample", "--config", cfg_path, "--out", str(out)]) == 0
        rows = read_csv(out / "samples.csv")
        assert rows[0] == ["chain", "iter", "x_1", "x_2"]
        assert len(rows) == 1 + 5  # header + one batch of 5 chains
        assert all(r[1] == "0" for r in rows[1:])

    def test_missing_body_file_exit_2(self, tmp_path, capsys):
        cfg = sample_config(body={"kind": "polytope", "file": str(tmp_path / "nope.json")})
        cfg_path = write_json(tmp_path / "cfg.json", cfg)
        out = tmp_path / "out"
        out.mkdir()
        assert cli.main(["sample", "--config", cfg_path, "--out", str(out)]) == 2
        assert "nope.json" in capsys.readouterr().err

    def test_smoke_run_within_budget(self, tmp_path):
        cfg_path = write_json(tmp_path / "cfg.json",
                              sample_config(n_chains=100, n_iters=100, record_every=50))
        out = tmp_path / "out"
        out.mkdir()
        t0 = time.perf_counter()
        assert cli.main(["sample", "--config", cfg_path, "--out", str(out)]) == 0
        assert time.perf_counter() - t0 < 5.0
        tallies = read_csv(out / "tallies.csv")
        assert tallies[0] == ["iter", "accepted", "rejected_mh", "rejected_outside",
                              "rejected_numerical", "lazy_stays"]
        final = tallies[-1]
        assert int(final[1]) + int(final[2]) + int(final[3]) + int(final[4]) == 100 * 100

    def test_byte_identical_across_workers(self, tmp_path):
        cfg_path = write_json(tmp_path / "cfg.json", sample_config())
        outs = []
        for name, workers in (("a", "1"), ("b", "4")):
            out = tmp_path / name
            out.mkdir()
            assert cli.main(["sample", "--config", cfg_path, "--out", str(out),
                             "--workers", workers]) == 0
            outs.append(out)
        assert (outs[0] / "samples.csv").read_bytes() == (outs[1] / "samples.csv").read_bytes()
        assert (outs[0] / "tallies.csv").read_bytes() == (outs[1] / "tallies.csv").read_bytes()

    def test_floats_have_17_significant_digits(self, tmp_path):
        cfg_path = write_json(tmp_path / "cfg.json", sample_config())
        out = tmp_path / "out"
        out.mkdir()
        cli.main(["sample", "--config", cfg_path, "--out", str(out)])
        rows = read_csv(out / "samples.csv")
        cell = rows[1][2]
        digits = re.sub(r"[-+.e]", "", cell)
        assert len(digits) >= 16  # .17g keeps 17 significant digits

    def test_invalid_json_names_line(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text('{"body": \n  nope}')
        out = tmp_path / "out"
        out.mkdir()
        assert cli.main(["sample", "--config", str(bad), "--out", str(out)]) == 2
        assert "line 2" in capsys.readouterr().err

    def test_missing_out_dir(self, tmp_path):
        cfg_path = write_json(tmp_path / "cfg.json", sample_config())
        assert cli.main(["sample", "--config", cfg_path,
                         "--out", str(tmp_path / "absent")]) == 2

    def test_manifest_lists_outputs(self, tmp_path):
        cfg_path = write_json(tmp_path / "cfg.json", sample_config())
        out = tmp_path / "out"
        out.mkdir()
        cli.main(["sample", "--config", cfg_path, "--out", str(out)])
        manifest = json.loads((out / "sample_manifest.json").read_text())
        names = {p.rsplit("/", 1)[-1] for p in manifest["outputs"]}
        assert names == {"samples.csv", "tallies.csv"}
        assert manifest["version"]
        assert manifest["config"]["seed"] == 3


class TestDirichlet:
    def test_requires_a_mode(self, tmp_path, capsys):
        out = tmp_path / "out"
        out.mkdir()
        assert cli.main(["dirichlet", "--out", str(out)]) == 2
        assert "nothing to do" in capsys.readouterr().err

    def test_zero_chains_rejected(self, tmp_path):
        out = tmp_path / "out"
        out.mkdir()
        assert cli.main(["dirichlet", "--ch", "0.1", "--n-chains", "0",
                         "--out", str(out)]) == 2

    def test_mixing_and_acceptance_outputs(self, tmp_path):
        out = tmp_path / "out"
        out.mkdir()
        rc = cli.main(["dirichlet", "--dims", "2", "--seeds", "0,1", "--ch", "0.1",
                       "--gammas", "1.0", "--n-chains", "30", "--n-iters", "120",
                       "--record-every", "20", "--burn-in", "20",
                       "--out", str(out)])
        assert rc == 0
        mixing = read_csv(out / "mixing.csv")
        assert mixing[0] == ["alg", "C_h", "d", "seed", "measure", "tau_hat"]
        assert {r[0] for r in mixing[1:]} == {"mapla", "dikin"}
        acc = read_csv(out / "acceptance.csv")
        assert acc[0] == ["alg", "gamma", "d", "seed", "rate"]
        assert all(0.0 <= float(r[4]) <= 1.0 for r in acc[1:])
        dist = read_csv(out / "distance_d2_ch0.1.csv")
        assert dist[0] == ["alg", "seed", "iter", "measure", "value"]

    def test_manifest_round_trip(self, tmp_path):
        out1 = tmp_path / "a"
        out2 = tmp_path / "b"
        out1.mkdir()
        out2.mkdir()
        argv = ["dirichlet", "--dims", "2", "--seeds", "0", "--ch", "0.2",
                "--n-chains", "20", "--n-iters", "60", "--record-every", "20"]
        assert cli.main(argv + ["--out", str(out1)]) == 0
        assert cli.main(["dirichlet",
                         "--config", str(out1 / "dirichlet_manifest.json"),
                         "--out", str(out2)]) == 0
        assert (out1 / "mixing.csv").read_bytes() == (out2 / "mixing.csv").read_bytes()
        assert ((out1 / "distance_d2_ch0.2.csv").read_bytes()
                == (out2 / "distance_d2_ch0.2.csv").read_bytes())


class TestBlr:
    def test_small_run_outputs_and_manifest(self, tmp_path):
        out = tmp_path / "out"
        out.mkdir()
        rc = cli.main(["blr", "-d", "4", "--seeds", "0", "--ch", "0.2",
                       "--n-chains", "10", "--n-iters", "60", "--record-every", "30",
                       "--out", str(out)])
        assert rc == 0
        meas = read_csv(out / "blr_measures_ch0.2.csv")
        assert meas[0] == ["alg", "seed", "iter", "measure", "value"]
        assert {r[3] for r in meas[1:]} == {"err", "nll"}
        diff = read_csv(out / "blr_diff_ch0.2.csv")
        assert diff[0] == ["alg", "seed", "iter", "q25", "q75"]
        manifest = json.loads((out / "blr_manifest.json").read_text())
        inst = manifest["extras"]["instances"][0]
        assert inst["lambda_max"] > 0
        assert len(inst["angles"]) == 2
        assert inst["translation"] == [0.5] * 4

    def test_d_too_small(self, tmp_path):
        out = tmp_path / "out"
        out.mkdir()
        assert cli.main(["blr", "-d", "1", "--out", str(out)]) == 2

    def test_parameter_recovery_smoke_trend(self, tmp_path):
        # n = 20 d observations at d=8: the chain-mean error must shrink.
        out = tmp_path / "out"
        out.mkdir()
        rc = cli.main(["blr", "-d", "8", "--seeds", "0", "--ch", "0.2",
                       "--algs", "mapla", "--n-chains", "30", "--n-iters", "500",
                       "--record-every", "250", "--out", str(out)])
        assert rc == 0
        rows = read_csv(out / "blr_measures_ch0.2.csv")
        errs = {int(r[2]): float(r[4]) for r in rows[1:] if r[3] == "err"}
        assert errs[500] < errs[0]

    def test_lambda_max_matches_marchenko_pastur_edge(self):
        # X has +-1/sqrt(d) entries and n = 20 d rows, so the top eigenvalue
        # of X^T X approaches (sqrt(20) + 1)^2 for large d.
        *_, lam_max = cli.make_blr_instance(64, 20, 0)
        edge = (math.sqrt(20.0) + 1.0) ** 2
        assert abs(lam_max - edge) <= 0.3 * edge


class TestCheck:
    def check_config(self, tmp_path, **extra):
        cfg = {"body": {"kind": "box", "lo": [-1.0, -1.0], "hi": [1.0, 1.0]},
               "n_probes": 15, "seed": 2}
        cfg.update(extra)
        return write_json(tmp_path / "check.json", cfg)

    def test_clean_metric_passes(self, tmp_path):
        out = tmp_path / "out"
        out.mkdir()
        cfg = self.check_config(tmp_path)
        assert cli.main(["check", "--config", cfg, "--out", str(out)]) == 0
        rows = read_csv(out / "check_report.csv")
        assert rows[0] == ["check", "probe", "lhs", "rhs", "passed"]
        assert all(r[4] == "true" for r in rows[1:])

    def test_corrupted_metric_fails_with_exit_1(self, tmp_path):
        out = tmp_path / "out"
        out.mkdir()
        cfg = self.check_config(tmp_path)
        assert cli.main(["check", "--config", cfg, "--out", str(out),
                         "--corrupt"]) == 1
        rows = read_csv(out / "check_report.csv")
        assert any(r[4] == "false" for r in rows[1:])

    def test_zero_probes_empty_report(self, tmp_path):
        out = tmp_path / "out"
        out.mkdir()
        cfg = self.check_config(tmp_path)
        assert cli.main(["check", "--config", cfg, "--out", str(out),
                         "--n-probes", "0"]) == 0
        rows = read_csv(out / "check_report.csv")
        assert rows == [["check", "probe", "lhs", "rhs", "passed"]]

    def test_polytope_body_from_file(self, tmp_path):
        poly = write_json(tmp_path / "poly.json",
                          {"A": [[-1.0], [1.0]], "b": [0.0, 1.0], "center": [0.5]})
        cfg = write_json(tmp_path / "check.json",
                         {"body": {"kind": "polytope", "file": poly},
                          "n_probes": 10, "seed": 0})
        out = tmp_path / "out"
        out.mkdir()
        assert cli.main(["check", "--config", cfg, "--out", str(out)]) == 0


class TestStepsize:
    def test_sc_example(self, capsys):
        assert cli.main(["stepsize", "sc", "-d", "1", "--lam", "1", "--beta", "1"]) == 0
        assert float(capsys.readouterr().out) == 1.0

    def test_exp_example(self, capsys):
        assert cli.main(["stepsize", "exp", "-d", "10", "--M", str(np.e),
                         "--delta", "1.0"]) == 0
        assert np.isclose(float(capsys.readouterr().out), 0.01)

    def test_exp_missing_params(self, capsys):
        assert cli.main(["stepsize", "exp", "-d", "10"]) == 2
