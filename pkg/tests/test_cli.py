import json

import pytest

from kakeya.cli import main


def test_cantor_dump(tmp_path, capsys):
    out = tmp_path / "cantor.json"
    assert main(["cantor", "--M", "3", "--N", "2", "--curve", "moment", "--d", "2", "--out", str(out)]) == 0
    payload = json.loads(out.read_text())
    assert payload["representatives"] == ["0", "2/9", "2/3", "8/9"]
    assert payload["slopes"][1]["exact"] == ["1", "2/9", "4/81"]
    assert payload["intervals"][1]["digits"] == [0, 2]


def test_cantor_custom_selector(tmp_path):
    sel = tmp_path / "sel.json"
    sel.write_text(json.dumps({"default": [0, 3], "prefixes": {"0": [1, 4]}}))
    out = tmp_path / "c.json"
    rc = main(
        [
            "cantor",
            "--M",
            "5",
            "--N",
            "2",
            "--selector",
            "custom-file",
            "--selector-file",
            str(sel),
            "--out",
            str(out),
        ]
    )
    assert rc == 0
    payload = json.loads(out.read_text())
    assert payload["intervals"][0]["digits"] == [0, 1]


def test_slopes_dump(tmp_path):
    out = tmp_path / "slopes.json"
    assert main(["slopes", "--seed", "5", "--M", "3", "--N", "2", "--d", "1", "--out", str(out)]) == 0
    payload = json.loads(out.read_text())
    assert len(payload["rows"]) == 9
    row = payload["rows"][0]
    assert len(row["tau"]) == 2
    assert row["sigma_float"][0] == 1.0


def test_volume_csv(tmp_path, capsys):
    out = tmp_path / "vol.csv"
    rc = main(
        [
            "volume",
            "--seed",
            "1",
            "--M",
            "3",
            "--N",
            "2",
            "--d",
            "1",
            "--samples-per-slab",
            "2",
            "--range",
            "near",
            "--out",
            str(out),
        ]
    )
    assert rc == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "k,x_lo,volume"
    assert len(lines) == 10  # 9 slabs + header


def test_simulate_outdir(tmp_path):
    rc = main(
        [
            "simulate",
            "--M",
            "3",
            "--N",
            "2",
            "--samples",
            "4",
            "--seed",
            "3",
            "--out-dir",
            str(tmp_path),
        ]
    )
    assert rc == 0
    files = [f for f in tmp_path.glob("simulate-*.json") if not f.name.endswith(".meta.json")]
    assert len(files) == 1
    payload = json.loads(files[0].read_text())
    assert len(payload["rows"]) == 4
    assert all(r["dilate_ratio_bound"] >= 1 for r in payload["rows"])


def test_slab_moments_exhaustive(tmp_path, capsys):
    rc = main(
        [
            "slab-moments",
            "--M",
            "3",
            "--N",
            "2",
            "--seed",
            "0",
            "--exhaustive",
            "--second",
        ]
    )
    assert rc == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["rows"][0]["samples"] == 4096


def test_percolate_full_binary(capsys):
    assert main(["percolate", "--tree", "full-binary", "--height", "2", "--mc-samples", "2000"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["survival_exact"] == "39/64"
    assert payload["resistance"] == "1"
    assert payload["lyons_lower"] == 0.5


def test_percolate_from_poss(capsys):
    rc = main(
        [
            "percolate",
            "--tree",
            "from-poss",
            "--point",
            "2.5,0.5",
            "--M",
            "3",
            "--N",
            "5",
            "--d",
            "1",
            "--mc-samples",
            "1000",
        ]
    )
    assert rc == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["height"] == 5
    assert 0 < payload["survival_exact_float"] < 1


def test_resist_from_poss(capsys):
    rc = main(
        ["resist", "--tree", "from-poss", "--point", "2.5,0.5", "--M", "3", "--N", "4", "--d", "1"]
    )
    assert rc == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["level_counts"][0] == 1
    assert float(payload["shorted_resistance_float"]) <= float(payload["resistance_float"]) + 1e-12


def test_prob_oracle_random(tmp_path, capsys):
    out = tmp_path / "oracle.csv"
    rc = main(
        [
            "prob-oracle",
            "--M",
            "3",
            "--N",
            "3",
            "--d",
            "1",
            "--tuples",
            "random",
            "--count",
            "10",
            "--seed",
            "2",
            "--out",
            str(out),
        ]
    )
    assert rc == 0
    lines = out.read_text().strip().splitlines()
    assert len(lines) == 11
    assert all(line.endswith("True") for line in lines[1:])


def test_verify_subsets(capsys):
    assert main(["verify", "tree", "percolation"]) == 0
    out = capsys.readouterr().out
    assert "[PASS]" in out and "FAIL" not in out


def test_verify_rejects_unknown_group():
    with pytest.raises(ValueError):
        main(["verify", "nonsense"])


def test_lower_bound_cli(capsys):
    rc = main(
        ["lower-bound", "--M", "3", "--N", "3", "--samples", "120", "--seed", "4"]
    )
    assert rc == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["fitted_c"] > 0


def test_config_file_roundtrip(tmp_path, capsys):
    cfg_file = tmp_path / "cfg.json"
    cfg_file.write_text(json.dumps({"M": 3, "N": 2, "samples": 3, "seed": 9}))
    rc = main(["simulate", "--config", str(cfg_file), "--out-dir", str(tmp_path)])
    assert rc == 0
    files = [f for f in tmp_path.glob("simulate-*.json") if not f.name.endswith(".meta.json")]
    payload = json.loads(files[0].read_text())
    assert payload["config"]["seed"] == 9
    assert payload["config"]["samples"] == 3


def test_bench_small(capsys):
    assert main(["bench", "--n", "64", "--repeats", "1"]) == 0
    out = capsys.readouterr().out
    assert "kernel" in out
