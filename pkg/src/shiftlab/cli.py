"""Reproducible experiment runner.

A run is driven by a JSON config (schema_version 1): a list of systems to
build, a list of tests with parameters, an output directory, and an optional
sequence cache. Unknown fields anywhere are rejected with a field path, all
defaults are materialized into the emitted copy of the config, and output
files are written in a fixed order so reruns are byte-identical apart from
one timestamp header line in report.csv.

Exit codes: 0 success, 2 invalid config/usage, 3 budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from .core import (
    BudgetError,
    FiniteWord,
    HorizonError,
    SizingError,
    SymbolicSequence,
    save_sequence,
)
from .generate import (
    GENERATORS,
    build,
    build_cached,
    nested_block_meta,
    nested_block_params_from_dict,
)
from .recurrence import multi_recurrence_search
from .stability import (
    ClassifyParams,
    classify_hierarchy,
    covering_words,
    diam_mean_avg_test,
    diam_mean_density_test,
    banach_diam_mean_test,
    diam_mean_sensitivity_test,
    diam_series,
    entropy_complexity,
    frequent_stability_test,
    mean_eq_modulus,
    nonzero_support_counts,
    stable_in_mean_test,
)

__all__ = ["main", "run_config", "PRESETS", "ConfigError"]


class ConfigError(ValueError):
    def __init__(self, path: str, message: str) -> None:
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message


# ---------------------------------------------------------------------------
# config schema

_GENERATOR_PARAMS = {
    "nested-block": {"i_max", "driver", "zero_runs"},
    "champernowne": {"length", "symbols", "alphabet_size"},
    "sturmian": {"length", "angle", "theta"},
    "toeplitz": {"length", "periods", "fill_symbols", "alphabet_size"},
    "periodic": {"length", "word", "alphabet_size"},
    "full-shift": {"length", "alphabet_size", "mode", "seed"},
}

# name -> {param: default}; None means "optional, resolved downstream"
_TEST_SCHEMAS: dict[str, dict] = {
    "diam-mean-avg": {
        "depth": 2, "word": None, "horizon": 32768, "depth_cap": 64,
        "epsilon": 0.1, "occ_cap": 100000,
    },
    "diam-mean-density": {
        "depth": 2, "word": None, "horizon": 32768, "depth_cap": 64,
        "eta": 0.1, "occ_cap": 100000,
    },
    "banach-diam-mean": {
        "depth": 2, "word": None, "horizon": 32768, "depth_cap": 64,
        "epsilon": 0.1, "window_lengths": None, "occ_cap": 100000,
    },
    "stable-in-mean": {
        "depth": 2, "word": None, "horizon": 32768, "depth_cap": 64,
        "epsilon": 0.1, "occ_cap": 100000,
    },
    "frequent-stability": {
        "depth": 2, "word": None, "horizon": 32768, "depth_cap": 64,
        "epsilon": 0.1, "gamma": 0.25, "occ_cap": 100000,
    },
    "diam-mean-sensitivity": {
        "depth": 3, "horizon": 32768, "depth_cap": 64, "epsilon": 0.1,
        "occ_cap": 4096, "max_words": 64,
    },
    "mean-eq-modulus": {
        "depths": [2, 4], "horizon": 32768, "depth_cap": 64,
        "pair_budget": 16, "occ_cap": 100000,
    },
    "support-counts": {"levels": None, "occ_cap": 100000},
    "entropy": {"lengths": [4, 8, 12], "limit": None},
    "recurrence": {"powers": 2, "epsilon_depth": 8, "horizon": 100000, "depth_cap": 64},
    "classify": {
        "base_depth": 2, "sensitivity_depth": 3, "horizon": 32768, "depth_cap": 64,
        "epsilon": 0.1, "eta": 0.1, "gamma": 0.25, "modulus_depths": None,
        "pair_budget": 8, "occ_cap": 4096, "entropy_lengths": [4, 8, 12],
        "entropy_limit": 1048576, "max_words": 64,
    },
}

_TOP_LEVEL = {"schema_version", "systems", "tests", "output_dir", "cache_dir"}
_SYSTEM_KEYS = {"id", "generator", "params"}


def validate_config(raw: dict) -> dict:
    """Check structure, reject unknown fields, materialize every default."""
    if not isinstance(raw, dict):
        raise ConfigError("$", "config must be a JSON object")
    for key in raw:
        if key not in _TOP_LEVEL:
            raise ConfigError(key, "unknown field")
    if raw.get("schema_version") != 1:
        raise ConfigError("schema_version", "must be 1")
    systems = raw.get("systems")
    if not isinstance(systems, list) or not systems:
        raise ConfigError("systems", "must be a nonempty list")
    out_systems = []
    seen_ids = set()
    for i, sysd in enumerate(systems):
        path = f"systems[{i}]"
        if not isinstance(sysd, dict):
            raise ConfigError(path, "must be an object")
        for key in sysd:
            if key not in _SYSTEM_KEYS:
                raise ConfigError(f"{path}.{key}", "unknown field")
        gen = sysd.get("generator")
        if gen not in GENERATORS:
            raise ConfigError(
                f"{path}.generator", f"unknown generator {gen!r} (known: {', '.join(sorted(GENERATORS))})"
            )
        params = sysd.get("params", {})
        if not isinstance(params, dict):
            raise ConfigError(f"{path}.params", "must be an object")
        allowed = _GENERATOR_PARAMS[gen]
        for key in params:
            if key not in allowed:
                raise ConfigError(f"{path}.params.{key}", "unknown field")
        sid = sysd.get("id", gen)
        if not isinstance(sid, str) or not sid:
            raise ConfigError(f"{path}.id", "must be a nonempty string")
        if sid in seen_ids:
            raise ConfigError(f"{path}.id", f"duplicate system id {sid!r}")
        seen_ids.add(sid)
        out_systems.append({"id": sid, "generator": gen, "params": params})
    tests = raw.get("tests")
    if not isinstance(tests, list) or not tests:
        raise ConfigError("tests", "must be a nonempty list")
    out_tests = []
    for i, td in enumerate(tests):
        path = f"tests[{i}]"
        if not isinstance(td, dict):
            raise ConfigError(path, "must be an object")
        name = td.get("name")
        if name not in _TEST_SCHEMAS:
            raise ConfigError(
                f"{path}.name", f"unknown test {name!r} (known: {', '.join(sorted(_TEST_SCHEMAS))})"
            )
        schema = _TEST_SCHEMAS[name]
        resolved = {"name": name}
        sys_filter = td.get("system")
        if sys_filter is not None:
            if sys_filter not in seen_ids:
                raise ConfigError(f"{path}.system", f"no system with id {sys_filter!r}")
            resolved["system"] = sys_filter
        for key, value in td.items():
            if key in ("name", "system"):
                continue
            if key not in schema:
                raise ConfigError(f"{path}.{key}", "unknown field")
            resolved[key] = value
        for key, default in schema.items():
            resolved.setdefault(key, default)
        out_tests.append(resolved)
    for i, td in enumerate(out_tests):
        if td["name"] == "support-counts":
            targets = [
                s for s in out_systems
                if td.get("system") in (None, s["id"])
            ]
            bad = [s["id"] for s in targets if s["generator"] != "nested-block"]
            if bad:
                raise ConfigError(
                    f"tests[{i}]",
                    f"support-counts requires nested-block systems (got {', '.join(bad)})",
                )
    output_dir = raw.get("output_dir", "out")
    if not isinstance(output_dir, str) or not output_dir:
        raise ConfigError("output_dir", "must be a nonempty string")
    cache_dir = raw.get("cache_dir")
    if cache_dir is not None and not isinstance(cache_dir, str):
        raise ConfigError("cache_dir", "must be a string or null")
    return {
        "schema_version": 1,
        "systems": out_systems,
        "tests": out_tests,
        "output_dir": output_dir,
        "cache_dir": cache_dir,
    }


# ---------------------------------------------------------------------------
# execution


@dataclass(frozen=True)
class ReportRow:
    system: str
    test: str
    params: dict
    statistic: float | None
    bias: float | None
    verdict: str
    wall_ms: float


def _fmt(v: float | None) -> str:
    return "" if v is None else repr(float(v))


def _word_from(td: dict, seq: SymbolicSequence) -> FiniteWord:
    if td.get("word") is not None:
        return FiniteWord.from_digits(str(td["word"]), seq.alphabet_size)
    return seq.prefix(int(td["depth"]))


def _verdict_artifacts(sid, test_name, verdict, series=None):
    arts = []
    ref = None
    if series is not None:
        ref = f"series/{sid}__{test_name}.csv"
        buf = io.StringIO()
        gaps = series.first_disagreement
        buf.write("i,diam\n")
        cap_note = f"<={(1.0 / series.depth_cap)!r}"
        for i, g in enumerate(gaps.tolist()):
            buf.write(f"{i + 1},{(1.0 / g)!r}\n" if g else f"{i + 1},{cap_note}\n")
        arts.append((ref, buf.getvalue()))
    arts.append(
        (
            f"verdicts/{sid}__{test_name}.json",
            json.dumps(verdict.as_json_dict(ref), sort_keys=True, indent=2) + "\n",
        )
    )
    return arts


_SINGLE_SERIES_TESTS = {
    "diam-mean-avg": diam_mean_avg_test,
    "diam-mean-density": diam_mean_density_test,
    "banach-diam-mean": banach_diam_mean_test,
    "stable-in-mean": stable_in_mean_test,
    "frequent-stability": frequent_stability_test,
}


def _run_one_test(sid: str, seq: SymbolicSequence, td: dict):
    """Run one (system, test) job; returns (rows, artifacts)."""
    name = td["name"]
    t0 = time.monotonic()
    rows: list[ReportRow] = []
    arts: list[tuple[str, str]] = []

    if name in _SINGLE_SERIES_TESTS:
        w = _word_from(td, seq)
        series = diam_series(
            seq, w, int(td["horizon"]), int(td["depth_cap"]), occ_cap=int(td["occ_cap"])
        )
        kwargs = {"series": series, "occ_cap": int(td["occ_cap"])}
        if name == "diam-mean-density":
            kwargs["eta"] = float(td["eta"])
        else:
            kwargs["epsilon"] = float(td["epsilon"])
        if name == "frequent-stability":
            kwargs["gamma"] = float(td["gamma"])
        if name == "banach-diam-mean" and td["window_lengths"] is not None:
            kwargs["window_lengths"] = tuple(int(n) for n in td["window_lengths"])
        v = _SINGLE_SERIES_TESTS[name](
            seq, w, int(td["horizon"]), int(td["depth_cap"]), **kwargs
        )
        ms = (time.monotonic() - t0) * 1000
        rows.append(ReportRow(sid, name, v.params, v.statistic, v.bias_bound, v.verdict, ms))
        arts += _verdict_artifacts(sid, name, v, series)

    elif name == "diam-mean-sensitivity":
        limit = max(int(td["depth"]), min(seq.length - int(td["horizon"]) - int(td["depth_cap"]), 1 << 20))
        words = covering_words(seq, int(td["depth"]), limit, td["max_words"])
        v = diam_mean_sensitivity_test(
            seq, words, int(td["horizon"]), int(td["depth_cap"]),
            float(td["epsilon"]), int(td["occ_cap"]),
        )
        ms = (time.monotonic() - t0) * 1000
        rows.append(ReportRow(sid, name, v.params, v.statistic, v.bias_bound, v.verdict, ms))
        arts += _verdict_artifacts(sid, name, v)

    elif name == "mean-eq-modulus":
        curve = mean_eq_modulus(
            seq, tuple(int(m) for m in td["depths"]), int(td["horizon"]),
            int(td["depth_cap"]), int(td["pair_budget"]), int(td["occ_cap"]),
        )
        ms = (time.monotonic() - t0) * 1000
        for m, stat, short in zip(curve.depths, curve.statistics, curve.shortfall):
            rows.append(
                ReportRow(
                    sid, f"{name}/m-{m}",
                    {"depth": m, "horizon": curve.horizon, "depth_cap": curve.depth_cap},
                    stat, curve.bias_bound,
                    "inconclusive" if short else "reported", ms,
                )
            )
        arts.append(
            (f"verdicts/{sid}__{name}.json",
             json.dumps(curve.as_json_dict(), sort_keys=True, indent=2) + "\n")
        )

    elif name == "support-counts":
        meta = nested_block_meta(nested_block_params_from_dict(seq.params))
        counts = nonzero_support_counts(
            seq, meta, td["levels"], occ_cap=int(td["occ_cap"])
        )
        ms = (time.monotonic() - t0) * 1000
        for lev, n, c, r in zip(counts.levels, counts.horizons, counts.counts, counts.ratios):
            rows.append(
                ReportRow(
                    sid, f"{name}/level-{lev}",
                    {"level": lev, "horizon": n, "count": c, "word": str(counts.word),
                     "samples": counts.sample_count},
                    float(r), 0.0, "reported", ms,
                )
            )
        buf = io.StringIO()
        buf.write("level,horizon,count,ratio\n")
        for lev, n, c, r in zip(counts.levels, counts.horizons, counts.counts, counts.ratios):
            buf.write(f"{lev},{n},{c},{float(r)!r}\n")
        arts.append((f"series/{sid}__{name}.csv", buf.getvalue()))
        arts.append(
            (f"verdicts/{sid}__{name}.json",
             json.dumps(counts.as_json_dict(), sort_keys=True, indent=2) + "\n")
        )

    elif name == "entropy":
        limit = td["limit"]
        curve = entropy_complexity(
            seq, tuple(int(n) for n in td["lengths"]),
            None if limit is None else min(int(limit), seq.length),
        )
        ms = (time.monotonic() - t0) * 1000
        for n, c, v in zip(curve.lengths, curve.counts, curve.values):
            rows.append(
                ReportRow(
                    sid, f"{name}/n-{n}",
                    {"length": n, "count": c, "limit": curve.limit, "trend": curve.trend},
                    v, 0.0, "reported", ms,
                )
            )
        arts.append(
            (f"verdicts/{sid}__{name}.json",
             json.dumps(curve.as_json_dict(), sort_keys=True, indent=2) + "\n")
        )

    elif name == "recurrence":
        res = multi_recurrence_search(
            seq, int(td["powers"]), int(td["epsilon_depth"]),
            int(td["horizon"]), int(td["depth_cap"]),
        )
        ms = (time.monotonic() - t0) * 1000
        rows.append(
            ReportRow(
                sid, name,
                {"powers": res.powers, "epsilon_depth": res.epsilon_depth,
                 "horizon": res.horizon},
                None if res.found is None else float(res.found),
                None, "found" if res.found is not None else "not-found", ms,
            )
        )
        arts.append(
            (f"verdicts/{sid}__{name}.json",
             json.dumps(res.as_json_dict(), sort_keys=True, indent=2) + "\n")
        )

    elif name == "classify":
        cp = ClassifyParams(
            base_depth=int(td["base_depth"]),
            sensitivity_depth=int(td["sensitivity_depth"]),
            horizon=int(td["horizon"]),
            depth_cap=int(td["depth_cap"]),
            epsilon=float(td["epsilon"]),
            eta=float(td["eta"]),
            gamma=float(td["gamma"]),
            modulus_depths=tuple(int(m) for m in td["modulus_depths"]) if td["modulus_depths"] else (),
            pair_budget=int(td["pair_budget"]),
            occ_cap=int(td["occ_cap"]),
            entropy_lengths=tuple(int(n) for n in td["entropy_lengths"]),
            entropy_limit=int(td["entropy_limit"]),
            max_words=td["max_words"],
        )
        report = classify_hierarchy(seq, cp, system_id=sid)
        ms = (time.monotonic() - t0) * 1000
        for v in report.rungs + report.battery + (report.sensitivity,):
            rows.append(
                ReportRow(sid, f"classify/{v.test}", v.params, v.statistic,
                          v.bias_bound, v.verdict, ms)
            )
        rows.append(
            ReportRow(
                sid, "classify/entropy",
                {"lengths": list(report.complexity.lengths), "limit": report.complexity.limit,
                 "trend": report.complexity.trend},
                report.complexity.values[-1], 0.0, "reported", ms,
            )
        )
        arts.append(
            (f"verdicts/{sid}__classify.json",
             json.dumps(report.as_json_dict(), sort_keys=True, indent=2) + "\n")
        )
    else:  # pragma: no cover - schema keeps this unreachable
        raise ConfigError("tests", f"unhandled test {name!r}")
    return rows, arts


def run_config(
    config: dict,
    base_dir: Path,
    threads: int = 1,
    horizon_override: int | None = None,
    depth_cap_override: int | None = None,
    out_dir_override: str | None = None,
    cache_dir_override: str | None = None,
) -> Path:
    """Execute a validated config; returns the output directory."""
    started = time.monotonic()
    cfg = validate_config(config)
    if horizon_override is not None or depth_cap_override is not None:
        for td in cfg["tests"]:
            if horizon_override is not None and "horizon" in td:
                td["horizon"] = horizon_override
            if depth_cap_override is not None and "depth_cap" in td:
                td["depth_cap"] = depth_cap_override
    out_name = out_dir_override or cfg["output_dir"]
    out_dir = Path(out_name)
    if not out_dir.is_absolute():
        out_dir = base_dir / out_dir
    cache = cache_dir_override or os.environ.get("SHIFTLAB_CACHE_DIR") or cfg["cache_dir"]
    cfg_resolved = dict(cfg)
    cfg_resolved["output_dir"] = str(out_dir)
    cfg_resolved["cache_dir"] = cache

    systems: dict[str, SymbolicSequence] = {}
    for sysd in cfg["systems"]:
        spec = {"generator": sysd["generator"], "params": sysd["params"]}
        systems[sysd["id"]] = build_cached(spec, cache)

    jobs = []
    for sysd in cfg["systems"]:
        sid = sysd["id"]
        for td in cfg["tests"]:
            if td.get("system") is not None and td["system"] != sid:
                continue
            jobs.append((sid, td))
    if not jobs:
        raise ConfigError("tests", "no (system, test) pair matches the filters")

    results: list[tuple[list[ReportRow], list[tuple[str, str]]]] = [None] * len(jobs)  # type: ignore[list-item]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = {
                pool.submit(_run_one_test, sid, systems[sid], td): i
                for i, (sid, td) in enumerate(jobs)
            }
            for fut, i in futures.items():
                results[i] = fut.result()
    else:
        for i, (sid, td) in enumerate(jobs):
            results[i] = _run_one_test(sid, systems[sid], td)

    rows = [row for rows_i, _ in results for row in rows_i]
    rows.sort(key=lambda r: (r.system, r.test))
    artifacts = sorted(
        ((path, text) for _, arts in results for path, text in arts),
        key=lambda pt: pt[0],
    )

    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "series").mkdir(exist_ok=True)
    (out_dir / "verdicts").mkdir(exist_ok=True)
    for rel, text in artifacts:
        (out_dir / rel).write_text(text)

    elapsed_ms = int((time.monotonic() - started) * 1000)
    stamp = datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
    buf = io.StringIO()
    buf.write(f"# generated-at {stamp} elapsed-ms {elapsed_ms}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["system", "test", "params", "statistic", "bias", "verdict"])
    for r in rows:
        writer.writerow(
            [
                r.system,
                r.test,
                json.dumps(r.params, sort_keys=True, separators=(",", ":")),
                _fmt(r.statistic),
                _fmt(r.bias),
                r.verdict,
            ]
        )
    (out_dir / "report.csv").write_text(buf.getvalue())
    (out_dir / "config.resolved.json").write_text(
        json.dumps(cfg_resolved, sort_keys=True, indent=2) + "\n"
    )
    return out_dir


# ---------------------------------------------------------------------------
# presets

PRESETS: dict[str, dict] = {
    "hierarchy-tour": {
        "schema_version": 1,
        "systems": [
            {"id": "periodic", "generator": "periodic",
             "params": {"word": "01", "length": 131072}},
            {"id": "sturmian", "generator": "sturmian",
             "params": {"length": 1048576, "angle": "golden"}},
            {"id": "toeplitz", "generator": "toeplitz",
             "params": {"length": 1048576, "periods": [2, 4, 8, 16, 32, 64, 128, 256],
                        "fill_symbols": [0, 1]}},
            {"id": "nested-block", "generator": "nested-block", "params": {"i_max": 5}},
            {"id": "full-shift", "generator": "full-shift",
             "params": {"length": 1048576, "alphabet_size": 2}},
        ],
        "tests": [
            {"name": "classify", "system": "periodic",
             "base_depth": 2, "sensitivity_depth": 3},
            {"name": "classify", "system": "sturmian",
             "base_depth": 256, "sensitivity_depth": 128,
             "modulus_depths": [256, 512]},
            {"name": "classify", "system": "toeplitz",
             "base_depth": 128, "sensitivity_depth": 128, "modulus_depths": [128, 256]},
            {"name": "classify", "system": "nested-block",
             "base_depth": 2, "sensitivity_depth": 3},
            {"name": "classify", "system": "full-shift",
             "base_depth": 2, "sensitivity_depth": 3},
        ],
        "output_dir": "hierarchy-tour-out",
        "cache_dir": None,
    },
    "nested-block": {
        "schema_version": 1,
        "systems": [
            {"id": "nested-block", "generator": "nested-block", "params": {"i_max": 6}},
        ],
        "tests": [
            {"name": "support-counts"},
            {"name": "diam-mean-avg", "depth": 2, "horizon": 52118},
            {"name": "diam-mean-density", "depth": 2, "horizon": 52118},
            {"name": "frequent-stability", "depth": 2, "horizon": 52118},
        ],
        "output_dir": "nested-block-out",
        "cache_dir": None,
    },
}


# ---------------------------------------------------------------------------
# entry point


def _add_common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--horizon", type=int, default=None,
                   help="override every test's horizon")
    p.add_argument("--depth-cap", type=int, default=None,
                   help="override every test's truncation depth")
    p.add_argument("--threads", type=int, default=1,
                   help="concurrent (system, test) jobs")
    p.add_argument("--cache-dir", default=None,
                   help="sequence cache directory (env SHIFTLAB_CACHE_DIR also honored)")
    p.add_argument("--out-dir", default=None,
                   help="override the config's output directory")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shiftlab",
        description="finite-horizon stability statistics for symbolic systems",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment config")
    p_run.add_argument("config", help="path to a JSON config")
    _add_common_flags(p_run)

    p_corpus = sub.add_parser("corpus", help="run a built-in preset")
    p_corpus.add_argument("preset", nargs="?", default=None,
                          help="preset name; omit to list presets")
    _add_common_flags(p_corpus)

    p_gen = sub.add_parser("gen", help="build a sequence and write it to disk")
    p_gen.add_argument("generator", help=f"one of: {', '.join(sorted(GENERATORS))}")
    p_gen.add_argument("--out", required=True, help="output byte file")
    p_gen.add_argument("--length", type=int, default=None)
    p_gen.add_argument("--params", default="{}", help="generator params as JSON")
    return parser


def _cmd_run(args: argparse.Namespace) -> int:
    path = Path(args.config)
    try:
        raw = json.loads(path.read_text())
    except FileNotFoundError:
        print(f"config not found: {path}", file=sys.stderr)
        return 2
    except json.JSONDecodeError as e:
        print(f"config parse error at line {e.lineno}, column {e.colno}: {e.msg}",
              file=sys.stderr)
        return 2
    out = run_config(
        raw, path.resolve().parent, args.threads,
        args.horizon, args.depth_cap, args.out_dir, args.cache_dir,
    )
    print(f"report written to {out}")
    return 0


def _cmd_corpus(args: argparse.Namespace) -> int:
    if args.preset is None:
        print("available presets:")
        for name in sorted(PRESETS):
            n_sys = len(PRESETS[name]["systems"])
            print(f"  {name} ({n_sys} systems)")
        return 0
    if args.preset not in PRESETS:
        print(f"unknown preset {args.preset!r}; available: {', '.join(sorted(PRESETS))}",
              file=sys.stderr)
        return 2
    out = run_config(
        PRESETS[args.preset], Path.cwd(), args.threads,
        args.horizon, args.depth_cap, args.out_dir, args.cache_dir,
    )
    print(f"report written to {out}")
    return 0


def _cmd_gen(args: argparse.Namespace) -> int:
    try:
        params = json.loads(args.params)
    except json.JSONDecodeError as e:
        print(f"--params parse error at column {e.colno}: {e.msg}", file=sys.stderr)
        return 2
    if not isinstance(params, dict):
        print("--params must be a JSON object", file=sys.stderr)
        return 2
    if args.length is not None:
        params["length"] = args.length
    if args.generator not in GENERATORS:
        print(f"unknown generator {args.generator!r}; known: {', '.join(sorted(GENERATORS))}",
              file=sys.stderr)
        return 2
    seq = build({"generator": args.generator, "params": params})
    out = save_sequence(seq, args.out)
    print(f"{seq.length} symbols written to {out}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "corpus":
            return _cmd_corpus(args)
        if args.command == "gen":
            return _cmd_gen(args)
        parser.error("unknown command")
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except (BudgetError, SizingError) as e:
        print(f"budget exceeded: {e}", file=sys.stderr)
        return 3
    except (HorizonError, ValueError) as e:
        print(f"invalid request: {e}", file=sys.stderr)
        return 2
    except KeyError as e:
        print(f"missing field: {e}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
