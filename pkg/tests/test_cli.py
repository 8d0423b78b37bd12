"""Config validation, report generation, presets, and exit codes."""

import csv
import json

import numpy as np
import pytest

import shiftlab.cli as cli
import shiftlab as sl


def tiny_config(**overrides):
    cfg = {
        "schema_version": 1,
        "systems": [
            {"id": "alt", "generator": "periodic", "params": {"word": "01", "length": 2048}},
        ],
        "tests": [
            {"name": "diam-mean-avg", "horizon": 256, "depth_cap": 16},
            {"name": "entropy", "lengths": [2, 4], "limit": 1024},
            {"name": "recurrence", "powers": 1, "epsilon_depth": 2, "horizon": 64,
             "depth_cap": 16},
        ],
        "output_dir": "out",
    }
    cfg.update(overrides)
    return cfg


def read_report(out_dir):
    text = (out_dir / "report.csv").read_text()
    lines = text.splitlines()
    assert lines[0].startswith("# generated-at ")
    rows = list(csv.DictReader(lines[1:]))
    return lines, rows


# ---------------------------------------------------------------------------
# validation


def test_validate_fills_defaults_and_keeps_ids():
    cfg = cli.validate_config(tiny_config())
    assert cfg["systems"][0]["id"] == "alt"
    avg = cfg["tests"][0]
    assert avg["epsilon"] == 0.1
    assert avg["occ_cap"] == 100000
    assert avg["horizon"] == 256


def test_validate_rejects_unknown_fields_with_paths():
    with pytest.raises(cli.ConfigError) as err:
        cli.validate_config(tiny_config(extra=1))
    assert err.value.path == "extra"

    bad_test = tiny_config()
    bad_test["tests"][0]["epsilonn"] = 0.2
    with pytest.raises(cli.ConfigError) as err:
        cli.validate_config(bad_test)
    assert err.value.path == "tests[0].epsilonn"

    bad_sys = tiny_config()
    bad_sys["systems"][0]["params"]["wordd"] = "01"
    with pytest.raises(cli.ConfigError) as err:
        cli.validate_config(bad_sys)
    assert err.value.path == "systems[0].params.wordd"


def test_validate_rejects_structural_problems():
    with pytest.raises(cli.ConfigError):
        cli.validate_config(tiny_config(schema_version=2))
    with pytest.raises(cli.ConfigError):
        cli.validate_config(tiny_config(systems=[]))
    with pytest.raises(cli.ConfigError):
        cli.validate_config(tiny_config(tests=[]))

    dup = tiny_config()
    dup["systems"] = dup["systems"] * 2
    with pytest.raises(cli.ConfigError) as err:
        cli.validate_config(dup)
    assert "duplicate" in err.value.message

    ghost = tiny_config()
    ghost["tests"][0]["system"] = "missing"
    with pytest.raises(cli.ConfigError):
        cli.validate_config(ghost)

    bad_gen = tiny_config()
    bad_gen["systems"][0]["generator"] = "mystery"
    with pytest.raises(cli.ConfigError) as err:
        cli.validate_config(bad_gen)
    assert "known:" in err.value.message


def test_support_counts_requires_a_nested_block_system():
    cfg = tiny_config()
    cfg["tests"] = [{"name": "support-counts"}]
    with pytest.raises(cli.ConfigError) as err:
        cli.validate_config(cfg)
    assert "nested-block" in err.value.message


# ---------------------------------------------------------------------------
# report generation


def test_run_config_writes_a_sorted_report(tmp_path):
    out = cli.run_config(tiny_config(), tmp_path)
    assert out == tmp_path / "out"
    lines, rows = read_report(out)
    assert lines[1] == "system,test,params,statistic,bias,verdict"
    keys = [(r["system"], r["test"]) for r in rows]
    assert keys == sorted(keys)
    tests = {r["test"] for r in rows}
    assert tests == {"diam-mean-avg", "entropy/n-2", "entropy/n-4", "recurrence"}
    avg = next(r for r in rows if r["test"] == "diam-mean-avg")
    assert avg["verdict"] == "holds-at-horizon"
    assert float(avg["statistic"]) == 0.0
    json.loads(avg["params"])
    rec = next(r for r in rows if r["test"] == "recurrence")
    assert rec["verdict"] == "found"
    assert float(rec["statistic"]) == 2.0
    assert (out / "series" / "alt__diam-mean-avg.csv").exists()
    assert (out / "verdicts" / "alt__diam-mean-avg.json").exists()
    assert (out / "verdicts" / "alt__entropy.json").exists()
    assert (out / "config.resolved.json").exists()
    verdict = json.loads((out / "verdicts" / "alt__diam-mean-avg.json").read_text())
    assert verdict["evidence_ref"] == "series/alt__diam-mean-avg.csv"


def test_run_config_applies_overrides(tmp_path):
    cfg = tiny_config()
    cfg["tests"] = [{"name": "diam-mean-avg", "horizon": 256, "depth_cap": 16}]
    out = cli.run_config(
        cfg, tmp_path, horizon_override=128, out_dir_override="elsewhere"
    )
    assert out == tmp_path / "elsewhere"
    _, rows = read_report(out)
    params = json.loads(rows[0]["params"])
    assert params["horizon"] == 128


def test_run_config_honors_system_filters(tmp_path):
    cfg = tiny_config()
    cfg["systems"].append(
        {"id": "alt3", "generator": "periodic", "params": {"word": "001", "length": 2048}}
    )
    cfg["tests"] = [
        {"name": "diam-mean-avg", "system": "alt3", "horizon": 256, "depth_cap": 16}
    ]
    out = cli.run_config(cfg, tmp_path)
    _, rows = read_report(out)
    assert {r["system"] for r in rows} == {"alt3"}


def test_run_config_with_threads_matches_serial_output(tmp_path):
    cfg = tiny_config()
    serial = cli.run_config(cfg, tmp_path, out_dir_override="serial")
    threaded = cli.run_config(cfg, tmp_path, threads=4, out_dir_override="threaded")
    s_lines = (serial / "report.csv").read_text().splitlines()[1:]
    t_lines = (threaded / "report.csv").read_text().splitlines()[1:]
    assert s_lines == t_lines


def test_run_config_reuses_the_sequence_cache(tmp_path):
    cache = tmp_path / "cache"
    cfg = tiny_config()
    first = cli.run_config(cfg, tmp_path, out_dir_override="a", cache_dir_override=str(cache))
    cached = list(cache.glob("*.seq"))
    assert len(cached) == 1
    second = cli.run_config(cfg, tmp_path, out_dir_override="b", cache_dir_override=str(cache))
    a = (first / "report.csv").read_text().splitlines()[1:]
    b = (second / "report.csv").read_text().splitlines()[1:]
    assert a == b


def test_reruns_are_identical_except_the_stamp(tmp_path):
    cfg = tiny_config()
    one = cli.run_config(cfg, tmp_path, out_dir_override="one")
    two = cli.run_config(cfg, tmp_path, out_dir_override="two")
    for rel in ("report.csv",):
        a = (one / rel).read_text().splitlines()
        b = (two / rel).read_text().splitlines()
        assert a[1:] == b[1:]
    for sub in ("series", "verdicts"):
        names_a = sorted(p.name for p in (one / sub).iterdir())
        names_b = sorted(p.name for p in (two / sub).iterdir())
        assert names_a == names_b
        for name in names_a:
            assert (one / sub / name).read_bytes() == (two / sub / name).read_bytes()


def test_classify_rows_cover_rungs_battery_and_context(tmp_path):
    cfg = tiny_config()
    cfg["tests"] = [
        {"name": "classify", "base_depth": 2, "sensitivity_depth": 2,
         "horizon": 256, "depth_cap": 16, "occ_cap": 128, "pair_budget": 2,
         "entropy_lengths": [2, 4]},
    ]
    out = cli.run_config(cfg, tmp_path)
    _, rows = read_report(out)
    tests = {r["test"] for r in rows}
    assert "classify/ladder-diam-mean-equicontinuity" in tests
    assert "classify/ladder-mean-eq-and-frequent-stability" in tests
    assert "classify/ladder-mean-equicontinuity" in tests
    assert "classify/diam-mean-sensitivity" in tests
    assert "classify/entropy" in tests
    assert "classify/mean-equicontinuity" in tests


def test_support_counts_rows_report_exact_ratios(tmp_path):
    cfg = {
        "schema_version": 1,
        "systems": [{"id": "nb", "generator": "nested-block", "params": {"i_max": 4}}],
        "tests": [{"name": "support-counts", "levels": [1, 2]}],
        "output_dir": "out",
    }
    out = cli.run_config(cfg, tmp_path)
    _, rows = read_report(out)
    assert [r["test"] for r in rows] == ["support-counts/level-1", "support-counts/level-2"]
    for r in rows:
        assert r["verdict"] == "reported"
        assert 0.0 < float(r["statistic"]) <= 1.0
    assert (out / "series" / "nb__support-counts.csv").exists()


# ---------------------------------------------------------------------------
# command line entry


def test_main_runs_a_config_file(tmp_path, capsys):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(tiny_config()))
    code = cli.main(["run", str(path), "--out-dir", str(tmp_path / "res")])
    assert code == 0
    assert "report written to" in capsys.readouterr().out
    assert (tmp_path / "res" / "report.csv").exists()


def test_main_rejects_missing_or_broken_configs(tmp_path, capsys):
    assert cli.main(["run", str(tmp_path / "nope.json")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert cli.main(["run", str(bad)]) == 2
    invalid = tmp_path / "invalid.json"
    invalid.write_text(json.dumps(tiny_config(schema_version=7)))
    assert cli.main(["run", str(invalid)]) == 2
    capsys.readouterr()


def test_main_maps_sizing_problems_to_exit_three(tmp_path, capsys):
    cfg = {
        "schema_version": 1,
        "systems": [{"id": "nb", "generator": "nested-block", "params": {"i_max": 9}}],
        "tests": [{"name": "entropy"}],
        "output_dir": str(tmp_path / "out"),
    }
    path = tmp_path / "big.json"
    path.write_text(json.dumps(cfg))
    assert cli.main(["run", str(path)]) == 3
    assert "budget" in capsys.readouterr().err


def test_main_lists_presets_without_arguments(capsys):
    assert cli.main(["corpus"]) == 0
    out = capsys.readouterr().out
    assert "hierarchy-tour" in out
    assert "nested-block" in out


def test_main_rejects_unknown_presets(capsys):
    assert cli.main(["corpus", "mystery-preset"]) == 2
    assert "unknown preset" in capsys.readouterr().err


def test_main_gen_writes_a_loadable_sequence(tmp_path, capsys):
    out = tmp_path / "seq.bin"
    code = cli.main([
        "gen", "champernowne", "--out", str(out), "--length", "64",
        "--params", '{"symbols": [0, 1]}',
    ])
    assert code == 0
    seq = sl.load_sequence(out)
    assert seq.length == 64
    assert str(seq.prefix(16)) == "0100011011000001"
    capsys.readouterr()


def test_main_gen_rejects_bad_requests(tmp_path, capsys):
    out = str(tmp_path / "x.bin")
    assert cli.main(["gen", "mystery", "--out", out, "--length", "8"]) == 2
    assert cli.main(["gen", "periodic", "--out", out, "--params", "{bad"]) == 2
    assert cli.main(["gen", "periodic", "--out", out, "--params", '["list"]']) == 2
    big = str(sl.MAX_SYMBOLS + 1)
    assert cli.main([
        "gen", "periodic", "--out", out, "--length", big, "--params", '{"word": "01"}',
    ]) == 3
    capsys.readouterr()


def test_presets_validate_cleanly():
    for name, preset in cli.PRESETS.items():
        cfg = cli.validate_config(preset)
        assert cfg["systems"], name
