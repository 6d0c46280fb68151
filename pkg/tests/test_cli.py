import csv
import json
import os

import pytest
from hypothesis import given, settings, strategies as st

from ctfourier.cli import main
from ctfourier.config import TASKS, ExperimentConfig
from ctfourier.errors import ConfigError


def read_json(d, task):
    with open(os.path.join(d, f"{task}.json")) as fh:
        return json.load(fh)


def read_csv(d, task):
    with open(os.path.join(d, f"{task}.csv")) as fh:
        return list(csv.reader(fh))


finite = st.floats(-1e6, 1e6, allow_nan=False)


@settings(max_examples=40, deadline=None)
@given(task=st.sampled_from(sorted(TASKS)), alpha=finite, beta=finite, seed=st.integers(0, 2 ** 31),
       xmax=st.floats(1, 100), family=st.sampled_from(["bessel-kingman", "jacobi"]))
def test_toml_round_trip(task, alpha, beta, seed, xmax, family):
    cfg = ExperimentConfig(task, {"family": family, "alpha": alpha, "beta": beta},
                           {"x_max": xmax}, {}, seed)
    back = ExperimentConfig.from_toml(cfg.to_toml())
    assert back == cfg and back.digest() == cfg.digest()


def test_digest_tracks_semantic_fields():
    base = ExperimentConfig("embed")
    assert ExperimentConfig("embed").digest() == base.digest()
    assert ExperimentConfig("embed", params={"b": 0.9}).digest() != base.digest()
    assert ExperimentConfig("embed", seed=1).digest() != base.digest()
    assert ExperimentConfig("embed", model={"alpha": 1.0}).digest() != base.digest()
    assert ExperimentConfig("embed", output={"dir": "elsewhere"}).digest() == base.digest()


@pytest.mark.parametrize("text", [
    'seed = 0\n[task]\nname = "embed"\nbogus = 1\n',
    'seed = 0\n[task]\nname = "embed"\n[model]\ncolour = "red"\n',
    'extra = 1\n[task]\nname = "embed"\n',
    '[task]\nname = "nope"\n',
    '[task]\nname = "embed"\nb = "high"\n',
])
def test_bad_configs_rejected(text):
    with pytest.raises(ConfigError):
        ExperimentConfig.from_toml(text)


def test_malformed_config_exit_2(tmp_path, capsys):
    path = tmp_path / "bad.toml"
    path.write_text('seed = 0\n[task]\nname = "embed\n')
    assert main(["embed", "--config", str(path), "--out-dir", str(tmp_path)]) == 2
    err = capsys.readouterr().err
    assert "line 3" in err and "column" in err


def test_config_task_mismatch(tmp_path):
    path = tmp_path / "c.toml"
    path.write_text(ExperimentConfig("embed").to_toml())
    assert main(["phi", "--config", str(path), "--out-dir", str(tmp_path)]) == 2


def test_config_file_drives_run(tmp_path):
    path = tmp_path / "c.toml"
    path.write_text(ExperimentConfig("embed", params={"b": 0.5}).to_toml())
    assert main(["embed", "--config", str(path), "--out-dir", str(tmp_path)]) == 0
    rep = read_json(tmp_path, "embed")
    assert rep["results"]["verdict"] is False
    # flags override the file
    assert main(["embed", "--config", str(path), "--b", "0.8", "--out-dir", str(tmp_path)]) == 0
    assert read_json(tmp_path, "embed")["results"]["verdict"] is True


def test_embed_report_keys(tmp_path):
    assert main(["embed", "--p", "4/3", "--q", "4", "--b", "0.8", "--out-dir", str(tmp_path)]) == 0
    rep = read_json(tmp_path, "embed")
    assert set(rep) == {"task", "config_digest", "results", "assertions", "config"}
    assert {"b", "threshold", "verdict", "margin"} <= set(rep["results"])
    assert rep["results"]["threshold"] == pytest.approx(0.75)


def test_verify_hy_exit_0(tmp_path):
    assert main(["verify", "--inequality", "hy", "--out-dir", str(tmp_path)]) == 0
    rep = read_json(tmp_path, "verify")
    assert isinstance(rep["results"], list) and len(rep["results"]) == 15
    assert all(a["passed"] for a in rep["assertions"])


def test_heat_decay_csv(tmp_path):
    assert main(["heat-decay", "--p", "4/3", "--q", "4", "--alpha", "0.5",
                 "--out-dir", str(tmp_path)]) == 0
    rows = read_csv(tmp_path, "heat-decay")
    assert rows[0] == ["t", "empirical", "bound", "branch"]
    bounds = [float(r[2]) for r in rows[1:]]
    assert all(b2 <= b1 for b1, b2 in zip(bounds, bounds[1:]))


def test_hypothesis_violation_exit_3(tmp_path):
    assert main(["embed", "--p", "3", "--q", "4", "--out-dir", str(tmp_path)]) == 3


def test_numerical_failure_exit_4(tmp_path):
    with pytest.warns(UserWarning):
        code = main(["solve-heat", "--u0", "gaussian:1:500", "--T", "10", "--steps", "8",
                     "--out-dir", str(tmp_path)])
    assert code == 4


def test_assertion_failure_exit_1(tmp_path):
    code = main(["solve-heat", "--max-iters", "2", "--out-dir", str(tmp_path)])
    assert code == 1
    rep = read_json(tmp_path, "solve-heat")
    assert not next(a for a in rep["assertions"] if a["name"] == "converged")["passed"]


def test_solve_wave_outputs(tmp_path):
    assert main(["solve-wave", "--steps", "16", "--out-dir", str(tmp_path)]) == 0
    rep = read_json(tmp_path, "solve-wave")
    for key in ("T_star", "iterations", "residuals", "in_set"):
        assert key in rep["results"]
    rows = read_csv(tmp_path, "solve-wave")
    assert rows[0] == ["t", "x", "u"] and len(rows) > 17


def test_transform_from_csv(tmp_path):
    src = tmp_path / "f.csv"
    import numpy as np

    x = np.linspace(0, 12, 2001)
    np.savetxt(src, np.c_[x, np.exp(-x ** 2 / 2)], delimiter=",", header="x,f", comments="")
    assert main(["transform", "--input", str(src), "--out-dir", str(tmp_path)]) == 0
    rows = read_csv(tmp_path, "transform")
    assert rows[0] == ["lambda", "fhat"]
    assert len(rows[1][1].replace("-", "").replace(".", "").split("e")[0]) >= 16


@pytest.mark.parametrize("task,extra", [("phi", []), ("multiplier", []), ("embed", []),
                                        ("verify", ["--inequality", "paley"])])
def test_threads_do_not_change_bytes(tmp_path, task, extra):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main([task, *extra, "--threads", "1", "--out-dir", str(a)]) == 0
    assert main([task, *extra, "--threads", "8", "--out-dir", str(b)]) == 0
    for name in sorted(os.listdir(a)):
        assert (a / name).read_bytes() == (b / name).read_bytes(), name
