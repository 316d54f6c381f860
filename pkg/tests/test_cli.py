"""CLI surface: subcommands, flags, exit codes, seed resolution."""

from __future__ import annotations

import json
import subprocess

import numpy as np
import pytest

from proxitext import SynthParams, builtin_graph, format_edge_list, generate_fully_synthetic, write_csv
from proxitext.cli import main


def _run(capsys, *argv) -> tuple[int, str]:
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


@pytest.fixture()
def data_csv(tmp_path):
    data = generate_fully_synthetic(SynthParams(n=2000, seed=10))
    path = tmp_path / "data.csv"
    write_csv(data, path)
    return path


@pytest.fixture()
def proxied_csv(tmp_path):
    from proxitext import train_logistic_proxy
    from proxitext.proxies import predict

    data = generate_fully_synthetic(SynthParams(n=2000, seed=10))
    model = train_logistic_proxy(data, ("train1", "train2"))
    designed = data.with_proxies(
        w=predict(model, data, "inf2"), z=predict(model, data, "inf1"))
    path = tmp_path / "proxied.csv"
    write_csv(designed, path)
    return path


def test_simulate_full(tmp_path, capsys):
    out_path = tmp_path / "sim.csv"
    code, out = _run(capsys, "simulate", "--dgp", "full", "--n", "500",
                     "--seed", "3", "--out", str(out_path))
    assert code == 0
    assert "500 rows" in out
    from proxitext import read_csv

    loaded = read_csv(out_path)
    assert loaded.n == 500
    assert set(loaded.blocks) == {"train1", "train2", "inf1", "inf2"}


def test_simulate_semi(tmp_path, capsys):
    rng = np.random.default_rng(0)
    cov_path = tmp_path / "cov.csv"
    import pandas as pd

    pd.DataFrame({
        "U": (rng.random(400) < 0.4).astype(int),
        "Gender": (rng.random(400) < 0.5).astype(int),
        "Age": rng.normal(60, 15, size=400),
    }).to_csv(cov_path, index=False)
    out_path = tmp_path / "semi.csv"
    code, _ = _run(capsys, "simulate", "--dgp", "semi",
                   "--covariates", str(cov_path), "--u-col", "U",
                   "--standardize", "Age", "--seed", "4", "--out", str(out_path))
    assert code == 0
    from proxitext import read_csv

    loaded = read_csv(out_path)
    assert set(loaded.covariate_names) == {"Gender", "Age"}
    assert loaded.u is not None


def test_dag_check(tmp_path, capsys):
    graph_path = tmp_path / "g.txt"
    graph_path.write_text(format_edge_list(builtin_graph("fig3b")))
    code, out = _run(capsys, "dag", "check", str(graph_path),
                     "--treatment", "A", "--outcome", "Y", "--unmeasured", "U",
                     "--covariates", "C", "--proxy-w", "W", "--proxy-z", "Z")
    assert code == 0
    report = json.loads(out)
    assert report["p1_holds"] is False
    assert report["witness_paths"]["p1"] == ["W", "T_pre", "Z"]


def test_gate_exit_codes(proxied_csv, tmp_path, capsys):
    code, out = _run(capsys, "gate", "--data", str(proxied_csv),
                     "--w-col", "W", "--z-col", "Z", "--covariates", "C",
                     "--boot", "60", "--seed", "1")
    payload = json.loads(out)
    assert payload["gate"]["verdict"] in ("proceed", "stop")
    assert code == (0 if payload["gate"]["verdict"] == "proceed" else 2)

    # identical proxies: guaranteed stop via the upper bound
    same = tmp_path / "same.csv"
    import pandas as pd

    frame = pd.read_csv(proxied_csv)
    frame["Z"] = frame["W"]
    frame.to_csv(same, index=False)
    code, out = _run(capsys, "gate", "--data", str(same),
                     "--w-col", "W", "--z-col", "Z", "--covariates", "C",
                     "--boot", "60", "--seed", "1")
    assert code == 2
    assert json.loads(out)["gate"]["reason"] == "ci_high_exceeds_gamma_high"


def test_gate_jobs_deterministic(proxied_csv, capsys):
    _, out1 = _run(capsys, "gate", "--data", str(proxied_csv), "--w-col", "W",
                   "--z-col", "Z", "--covariates", "C", "--boot", "60",
                   "--seed", "1", "--jobs", "1")
    _, out4 = _run(capsys, "gate", "--data", str(proxied_csv), "--w-col", "W",
                   "--z-col", "Z", "--covariates", "C", "--boot", "60",
                   "--seed", "1", "--jobs", "4")
    assert out1 == out4


def test_estimate_backdoor_oracle(data_csv, capsys):
    code, out = _run(capsys, "estimate", "--data", str(data_csv),
                     "--method", "backdoor_oracle", "--u-col", "U",
                     "--adjust", "U,C", "--covariates", "C",
                     "--boot", "60", "--seed", "2")
    assert code == 0
    payload = json.loads(out)
    assert payload["method"] == "backdoor_oracle"
    assert payload["point"] == pytest.approx(1.3, abs=0.15)


def test_estimate_proximal(proxied_csv, capsys):
    code, out = _run(capsys, "estimate", "--data", str(proxied_csv),
                     "--method", "proximal", "--w-col", "W", "--z-col", "Z",
                     "--covariates", "C", "--boot", "60", "--seed", "2")
    assert code == 0
    payload = json.loads(out)
    assert payload["ci_low"] < payload["point"] < payload["ci_high"]


def test_diagnostics(proxied_csv, capsys):
    code, out = _run(capsys, "diagnostics", "--data", str(proxied_csv),
                     "--covariates", "C")
    assert code == 0
    payload = json.loads(out)
    assert {"accuracy_w", "agreement", "gamma_wu_c"} <= payload.keys()
    assert 0.0 <= payload["agreement"] <= 1.0


def test_pipeline_exit_codes(tmp_path, capsys):
    code, out = _run(capsys, "pipeline", "--dgp", "full", "--n", "3000",
                     "--w-source", "logistic:inf2", "--z-source", "logistic:inf1",
                     "--boot", "60", "--seed", "7")
    assert code == 0
    assert json.loads(out)["gate"]["verdict"] == "proceed"

    code, out = _run(capsys, "pipeline", "--dgp", "full", "--n", "3000",
                     "--w-source", "logistic:inf1", "--z-source", "logistic:inf1",
                     "--allow-same-source", "--boot", "60", "--seed", "7")
    assert code == 2
    report = json.loads(out)
    assert report["gate"]["verdict"] == "stop"
    assert report["ace"] is None


def test_pipeline_same_source_errors_without_flag(capsys):
    code = main(["pipeline", "--dgp", "full", "--n", "3000",
                 "--w-source", "logistic:inf1", "--z-source", "logistic:inf1",
                 "--boot", "60", "--seed", "7"])
    assert code == 1


def test_error_exit_code(capsys):
    code = main(["gate", "--data", "/definitely/missing.csv",
                 "--w-col", "W", "--z-col", "Z"])
    assert code == 1


def test_seed_env_var_lowest_precedence(tmp_path, capsys, monkeypatch):
    out_a = tmp_path / "a.csv"
    out_b = tmp_path / "b.csv"
    out_c = tmp_path / "c.csv"
    monkeypatch.setenv("PROXITEXT_SEED", "99")
    _run(capsys, "simulate", "--dgp", "full", "--n", "300", "--out", str(out_a))
    monkeypatch.delenv("PROXITEXT_SEED")
    _run(capsys, "simulate", "--dgp", "full", "--n", "300", "--seed", "99",
         "--out", str(out_b))
    _run(capsys, "simulate", "--dgp", "full", "--n", "300", "--out", str(out_c))
    assert out_a.read_text() == out_b.read_text()  # env seed used when flag absent
    assert out_a.read_text() != out_c.read_text()  # default seed 0 otherwise


def test_bench_table1_small(capsys, tmp_path):
    out = tmp_path / "bench.json"
    code, text = _run(capsys, "bench", "table1", "--n", "1000", "--seeds", "1",
                      "--seed", "0", "--boot", "20", "--json", "--out", str(out))
    assert code == 0
    payload = json.loads(text)
    assert payload["summary"]["seeds"] == [0]
    assert len(payload["per_seed"][0]["rows"]) == 4
    assert json.loads(out.read_text()) == payload


def test_bench_gotchas_small(capsys):
    code, text = _run(capsys, "bench", "gotchas", "--n", "5000", "--seed", "5",
                      "--json")
    assert code == 0
    payload = json.loads(text)
    methods = [r["method"] for r in payload["rows"]]
    assert methods == ["backdoor_proxy", "backdoor_oracle",
                       "proximal_valid", "proximal_same_text"]


def test_console_script_help():
    result = subprocess.run(["proxitext", "--help"], capture_output=True, text=True)
    assert result.returncode == 0
    assert "simulate" in result.stdout
