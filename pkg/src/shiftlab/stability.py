"""Finite-horizon stability and sensitivity statistics.

The orbit of a transitive point is the only computable handle on its orbit
closure, so every cylinder here is sampled by occurrence shifts: the points
sigma^q x for each scan hit q of the base word. That under-approximates the
true cylinder (limit points are missing), so diameter values are lower
bounds and "holds" verdicts on the equicontinuity side are the conservative
direction. Distances are truncated at a depth cap K; censored terms count 0
in averages and every statistic carries the additive bias bound 1/K.

No verdict claims anything beyond the stated horizon.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .core import (
    DEFAULT_DEPTH_CAP,
    BudgetError,
    FiniteWord,
    HorizonError,
    SymbolicSequence,
    factors,
    occurrences,
)
from .density import IndexSet, banach_density, default_window_lengths, upper_density
from .generate import NestedBlockMeta

__all__ = [
    "HOLDS",
    "FAILS",
    "INCONCLUSIVE",
    "DEFAULT_OCC_CAP",
    "DiamSeries",
    "diam_series",
    "diam_series_from_positions",
    "BesicovitchEstimate",
    "besicovitch",
    "SupportCounts",
    "nonzero_support_counts",
    "ModulusCurve",
    "mean_eq_modulus",
    "StabilityVerdict",
    "diam_mean_avg_test",
    "diam_mean_density_test",
    "banach_diam_mean_test",
    "stable_in_mean_test",
    "frequent_stability_test",
    "covering_words",
    "diam_mean_sensitivity_test",
    "ComplexityCurve",
    "entropy_complexity",
    "ClassifyParams",
    "HierarchyReport",
    "classify_hierarchy",
]

HOLDS = "holds-at-horizon"
FAILS = "fails-at-horizon"
INCONCLUSIVE = "inconclusive"

DEFAULT_OCC_CAP = 100_000
_WORK_BUDGET = 1 << 34  # probes per scan; beyond this the call refuses


def _thin_positions(positions: np.ndarray, cap: int) -> np.ndarray:
    """Deterministic uniform subsample, order preserved."""
    if positions.size <= cap:
        return positions
    idx = np.unique(np.linspace(0, positions.size - 1, cap).astype(np.int64))
    return positions[idx]


def _gaps_to_next_true(flags: np.ndarray, horizon: int, cap: int) -> np.ndarray:
    """For i = 1..horizon: offset j <= cap to the first True strictly past i.

    flags[t-1] says whether something happens at position t; the result holds
    j = t - i for the smallest flagged t > i, or 0 when no flagged position
    lies within (i, i + cap].
    """
    span = flags.size
    big = span + cap + 2
    idx = np.where(flags, np.arange(1, span + 1, dtype=np.int64), big)
    nxt = np.minimum.accumulate(idx[::-1])[::-1]
    j = nxt[1 : horizon + 1] - np.arange(1, horizon + 1, dtype=np.int64)
    return np.where(j <= cap, j, 0).astype(np.int32)


def _values_from_gaps(gaps: np.ndarray) -> np.ndarray:
    vals = np.zeros(gaps.size, dtype=np.float64)
    nz = gaps > 0
    vals[nz] = 1.0 / gaps[nz]
    return vals


@dataclass(frozen=True, eq=False)
class DiamSeries:
    """Per-iterate diameter estimates of a cylinder sample.

    first_disagreement[i-1] is the offset j in [1, depth_cap] at which the
    sampled points of the cylinder first disagree after iterate i, or 0 when
    they agree through the cap (value censored at 1/depth_cap). A series
    built from fewer than two sample points is flagged insufficient and is
    all-censored by construction.
    """

    word: FiniteWord
    horizon: int
    depth_cap: int
    first_disagreement: np.ndarray
    sample_count: int
    insufficient: bool

    def __post_init__(self) -> None:
        arr = np.asarray(self.first_disagreement, dtype=np.int32)
        if arr.size != self.horizon:
            raise ValueError("series length must equal the horizon")
        arr.setflags(write=False)
        object.__setattr__(self, "first_disagreement", arr)

    def values(self) -> np.ndarray:
        """Diameter estimates with censored entries as 0."""
        return _values_from_gaps(self.first_disagreement)

    @property
    def censored_fraction(self) -> float:
        return float((self.first_disagreement == 0).sum()) / self.horizon

    @property
    def bias_bound(self) -> float:
        return 1.0 / self.depth_cap

    def to_csv(self, path: str | Path) -> None:
        lines = ["i,diam"]
        gaps = self.first_disagreement
        lines.extend(
            f"{i + 1},{(1.0 / g)!r}" if g else f"{i + 1},<={(1.0 / self.depth_cap)!r}"
            for i, g in enumerate(gaps.tolist())
        )
        Path(path).write_text("\n".join(lines) + "\n")

    def summary(self) -> dict:
        return {
            "word": str(self.word),
            "horizon": self.horizon,
            "depth_cap": self.depth_cap,
            "sample_count": self.sample_count,
            "insufficient": self.insufficient,
            "censored_fraction": self.censored_fraction,
        }


def diam_series_from_positions(
    x: SymbolicSequence,
    word: FiniteWord,
    positions: Sequence[int] | np.ndarray,
    horizon: int,
    depth_cap: int = DEFAULT_DEPTH_CAP,
) -> DiamSeries:
    """Series from an explicit sample of occurrence shifts.

    Every position q must keep q + horizon + depth_cap within the buffer.
    """
    qs = np.asarray(positions, dtype=np.int64)
    if horizon < 1:
        raise ValueError("horizon must be positive")
    if depth_cap < 1:
        raise ValueError("depth_cap must be positive")
    span = horizon + depth_cap
    if qs.size:
        if int(qs.min()) < 0:
            raise ValueError("occurrence positions must be nonnegative")
        if int(qs.max()) + span > x.length:
            raise HorizonError(
                f"occurrence at {int(qs.max())} needs {span} probe symbols past it;"
                f" buffer exposes {x.length}"
            )
    if qs.size * span > _WORK_BUDGET:
        raise BudgetError(
            f"diam scan would touch {qs.size * span} probes (budget {_WORK_BUDGET})"
        )
    if qs.size < 2:
        return DiamSeries(
            word, horizon, depth_cap, np.zeros(horizon, np.int32), int(qs.size), True
        )
    buf = x.data
    base = buf[qs[0] : qs[0] + span]
    disagree = np.zeros(span, dtype=bool)
    for q in qs[1:]:
        np.logical_or(disagree, buf[q : q + span] != base, out=disagree)
    gaps = _gaps_to_next_true(disagree, horizon, depth_cap)
    return DiamSeries(word, horizon, depth_cap, gaps, int(qs.size), False)


def diam_series(
    x: SymbolicSequence,
    word: FiniteWord,
    horizon: int,
    depth_cap: int = DEFAULT_DEPTH_CAP,
    occ_limit: int | None = None,
    occ_cap: int = DEFAULT_OCC_CAP,
) -> DiamSeries:
    """Scan for the word, sample its occurrence shifts, build the series.

    The scan limit is clamped so every sample can be probed through
    horizon + depth_cap symbols. Above occ_cap occurrences the sample is
    thinned uniformly; a subsample only lowers diameter values, so the
    under-approximation direction is preserved.
    """
    span = horizon + depth_cap
    clamp = x.length - span + len(word)
    if clamp < len(word):
        raise HorizonError(
            f"horizon {horizon} + depth cap {depth_cap} leave no room to scan"
            f" (buffer {x.length})"
        )
    limit = clamp if occ_limit is None else min(occ_limit, clamp)
    occ = occurrences(x, word, limit)
    qs = _thin_positions(occ.positions, occ_cap)
    return diam_series_from_positions(x, word, qs, horizon, depth_cap)


@dataclass(frozen=True)
class BesicovitchEstimate:
    """Truncated time-averaged distance between two orbits."""

    value: float
    horizon: int
    depth_cap: int
    censored_fraction: float

    @property
    def bias_bound(self) -> float:
        return 1.0 / self.depth_cap

    def as_json_dict(self) -> dict:
        return {
            "value": self.value,
            "horizon": self.horizon,
            "depth_cap": self.depth_cap,
            "censored_fraction": self.censored_fraction,
            "bias_bound": self.bias_bound,
        }


def _besicovitch_arrays(
    a: np.ndarray, b: np.ndarray, horizon: int, depth_cap: int
) -> tuple[float, float]:
    mismatch = a != b
    gaps = _gaps_to_next_true(mismatch, horizon, depth_cap)
    vals = _values_from_gaps(gaps)
    return float(vals.sum() / horizon), float((gaps == 0).sum() / horizon)


def besicovitch(
    x: SymbolicSequence,
    y: SymbolicSequence,
    horizon: int,
    depth_cap: int = DEFAULT_DEPTH_CAP,
) -> BesicovitchEstimate:
    """(1/N) sum over i <= N of the truncated distance between the shifted orbits.

    Censored terms (agreement through the cap) count 0, so the true
    time-average at this horizon exceeds the value by at most 1/depth_cap.
    Symmetric in x and y; exactly 0 when the exposed prefixes coincide.
    """
    span = horizon + depth_cap
    for name, s in (("x", x), ("y", y)):
        if s.length < span:
            raise HorizonError(
                f"{name} exposes {s.length} symbols; need horizon + depth_cap = {span}"
            )
    value, censored = _besicovitch_arrays(x.data[:span], y.data[:span], horizon, depth_cap)
    return BesicovitchEstimate(value, horizon, depth_cap, censored)


@dataclass(frozen=True)
class SupportCounts:
    """How much of the horizon is touched by nonzero symbols across a cylinder sample.

    counts[j] = #{1 <= m <= horizons[j] : some sampled occurrence shift has a
    nonzero symbol at position m}. Ratios are exact integer fractions.
    """

    word: FiniteWord
    levels: tuple[int, ...]
    horizons: tuple[int, ...]
    counts: tuple[int, ...]
    sample_count: int

    @property
    def ratios(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(c, n) for c, n in zip(self.counts, self.horizons))

    def as_json_dict(self) -> dict:
        return {
            "word": str(self.word),
            "levels": list(self.levels),
            "horizons": list(self.horizons),
            "counts": list(self.counts),
            "ratios": [[r.numerator, r.denominator] for r in self.ratios],
            "sample_count": self.sample_count,
        }


def nonzero_support_counts(
    x: SymbolicSequence,
    meta: NestedBlockMeta,
    levels: Sequence[int] | None = None,
    word: FiniteWord | None = None,
    occ_cap: int = DEFAULT_OCC_CAP,
) -> SupportCounts:
    """Envelope statistic of the nested block point at its level horizons.

    For level i the horizon is the next block length, meta.lengths[i]. The
    base cylinder defaults to the seed word "11". Computed as a blockwise
    shifted OR of the nonzero indicator over all sampled occurrence shifts,
    then cumulative counts are read off at each horizon.
    """
    if word is None:
        word = FiniteWord((1, 1), x.alphabet_size)
    if levels is None:
        levels = tuple(range(1, meta.i_max))
    levels = tuple(int(i) for i in levels)
    if not levels:
        raise ValueError("need at least one level")
    if any(not 1 <= i <= meta.i_max for i in levels):
        raise ValueError(f"levels must lie in [1, {meta.i_max}]")
    if any(b <= a for a, b in zip(levels, levels[1:])):
        raise ValueError("levels must be strictly increasing")
    horizons = tuple(meta.lengths[i] for i in levels)
    top = horizons[-1]
    if top > x.length:
        raise HorizonError(
            f"level {levels[-1]} horizon {top} exceeds the built length {x.length};"
            " build one level deeper"
        )
    limit = x.length - top + len(word)
    occ = occurrences(x, word, limit)
    qs = _thin_positions(occ.positions, occ_cap)
    if qs.size * top > _WORK_BUDGET:
        raise BudgetError(
            f"envelope scan would touch {int(qs.size) * top} probes (budget {_WORK_BUDGET})"
        )
    nz = x.data != 0
    touched = np.zeros(top, dtype=bool)
    for q in qs:
        np.logical_or(touched, nz[q : q + top], out=touched)
    csum = np.cumsum(touched, dtype=np.int64)
    counts = tuple(int(csum[n - 1]) for n in horizons)
    return SupportCounts(word, levels, horizons, counts, int(qs.size))


@dataclass(frozen=True)
class ModulusCurve:
    """depth m -> worst sampled Besicovitch value among pairs sharing m symbols."""

    depths: tuple[int, ...]
    statistics: tuple[float | None, ...]
    pair_counts: tuple[int, ...]
    shortfall: tuple[bool, ...]
    horizon: int
    depth_cap: int

    @property
    def bias_bound(self) -> float:
        return 1.0 / self.depth_cap

    def as_json_dict(self) -> dict:
        return {
            "depths": list(self.depths),
            "statistics": list(self.statistics),
            "pair_counts": list(self.pair_counts),
            "shortfall": list(self.shortfall),
            "horizon": self.horizon,
            "depth_cap": self.depth_cap,
            "bias_bound": self.bias_bound,
        }


def mean_eq_modulus(
    x: SymbolicSequence,
    depths: Sequence[int],
    horizon: int,
    depth_cap: int = DEFAULT_DEPTH_CAP,
    pair_budget: int = 16,
    occ_cap: int = DEFAULT_OCC_CAP,
) -> ModulusCurve:
    """Finite modulus of mean equicontinuity along prefix cylinders.

    For each depth m, pairs are occurrence shifts of the m-prefix of x
    (thinned to pair_budget + 1 representatives, compared against the
    first); the statistic is the maximum Besicovitch value over the pairs.
    Depths with fewer than two occurrences are flagged as shortfall.
    """
    depths = tuple(int(m) for m in depths)
    if not depths or any(m < 1 for m in depths):
        raise ValueError("depths must be positive")
    span = horizon + depth_cap
    stats: list[float | None] = []
    pairs: list[int] = []
    short: list[bool] = []
    buf = x.data
    for m in depths:
        clamp = x.length - span + m
        if clamp < m:
            raise HorizonError(
                f"horizon {horizon} + depth cap {depth_cap} leave no scan room"
            )
        w = x.prefix(m)
        occ = occurrences(x, w, clamp)
        qs = _thin_positions(occ.positions, min(occ_cap, pair_budget + 1))
        if qs.size < 2:
            stats.append(None)
            pairs.append(0)
            short.append(True)
            continue
        base = buf[qs[0] : qs[0] + span]
        worst = 0.0
        for q in qs[1:]:
            val, _ = _besicovitch_arrays(base, buf[q : q + span], horizon, depth_cap)
            worst = max(worst, val)
        stats.append(worst)
        pairs.append(int(qs.size) - 1)
        short.append(False)
    return ModulusCurve(
        depths, tuple(stats), tuple(pairs), tuple(short), horizon, depth_cap
    )


@dataclass(frozen=True)
class StabilityVerdict:
    """One test outcome: statistic, thresholds, and a horizon-stamped verdict."""

    test: str
    params: dict
    statistic: float | None
    bias_bound: float
    verdict: str
    evidence: dict = field(default_factory=dict)

    def as_json_dict(self, evidence_ref: str | None = None) -> dict:
        return {
            "test": self.test,
            "params": self.params,
            "statistic": self.statistic,
            "bias": self.bias_bound,
            "verdict": self.verdict,
            "evidence_ref": evidence_ref,
        }


_DIRECTION_NOTE = (
    "cylinder sampled by occurrence shifts; diam values are lower bounds,"
    " censored terms count 0 with the stated bias bound"
)


def _series_params(series: DiamSeries, extra: dict) -> dict:
    return {
        "word": str(series.word),
        "depth": len(series.word),
        "horizon": series.horizon,
        "depth_cap": series.depth_cap,
        **extra,
    }


def _base_evidence(series: DiamSeries) -> dict:
    return {"series": series.summary(), "direction": _DIRECTION_NOTE}


def _resolve_series(
    x: SymbolicSequence,
    word: FiniteWord | None,
    horizon: int,
    depth_cap: int,
    occ_cap: int,
    series: DiamSeries | None,
) -> DiamSeries:
    if series is not None:
        if series.horizon != horizon or series.depth_cap != depth_cap:
            raise ValueError("provided series does not match horizon/depth_cap")
        return series
    if word is None:
        word = x.prefix(2)
    return diam_series(x, word, horizon, depth_cap, occ_cap=occ_cap)


def diam_mean_avg_test(
    x: SymbolicSequence,
    word: FiniteWord | None = None,
    horizon: int = 32768,
    depth_cap: int = DEFAULT_DEPTH_CAP,
    epsilon: float = 0.1,
    occ_cap: int = DEFAULT_OCC_CAP,
    series: DiamSeries | None = None,
) -> StabilityVerdict:
    """Cesaro average of the diam series; holds iff the average < epsilon."""
    s = _resolve_series(x, word, horizon, depth_cap, occ_cap, series)
    params = _series_params(s, {"epsilon": epsilon})
    if s.insufficient:
        return StabilityVerdict(
            "diam-mean-avg", params, None, s.bias_bound, INCONCLUSIVE, _base_evidence(s)
        )
    stat = float(s.values().mean())
    verdict = HOLDS if stat < epsilon else FAILS
    return StabilityVerdict("diam-mean-avg", params, stat, s.bias_bound, verdict, _base_evidence(s))


def diam_mean_density_test(
    x: SymbolicSequence,
    word: FiniteWord | None = None,
    horizon: int = 32768,
    depth_cap: int = DEFAULT_DEPTH_CAP,
    eta: float = 0.1,
    occ_cap: int = DEFAULT_OCC_CAP,
    series: DiamSeries | None = None,
) -> StabilityVerdict:
    """Density of iterates with diam value above eta; holds iff < eta.

    The density is taken on the full matched window (count / horizon), which
    makes the coupling inequality average >= eta * density exact against the
    shared series.
    """
    s = _resolve_series(x, word, horizon, depth_cap, occ_cap, series)
    params = _series_params(s, {"eta": eta})
    if s.insufficient:
        return StabilityVerdict(
            "diam-mean-density", params, None, s.bias_bound, INCONCLUSIVE, _base_evidence(s)
        )
    vals = s.values()
    exceed = int((vals > eta).sum())
    stat = exceed / s.horizon
    verdict = HOLDS if stat < eta else FAILS
    evidence = _base_evidence(s)
    evidence["exceed_count"] = exceed
    evidence["matched_window"] = s.horizon
    return StabilityVerdict("diam-mean-density", params, stat, s.bias_bound, verdict, evidence)


def banach_diam_mean_test(
    x: SymbolicSequence,
    word: FiniteWord | None = None,
    horizon: int = 32768,
    depth_cap: int = DEFAULT_DEPTH_CAP,
    epsilon: float = 0.1,
    window_lengths: Sequence[int] | None = None,
    occ_cap: int = DEFAULT_OCC_CAP,
    series: DiamSeries | None = None,
) -> StabilityVerdict:
    """Worst sliding-window average of the diam series; holds iff < epsilon.

    The default window schedule is dyadic and includes the full horizon, so
    the statistic dominates the plain Cesaro average by construction.
    """
    s = _resolve_series(x, word, horizon, depth_cap, occ_cap, series)
    if window_lengths is None:
        lengths = tuple(sorted(set(default_window_lengths(s.horizon)) | {s.horizon}))
    else:
        lengths = tuple(int(n) for n in window_lengths)
        if not lengths or any(n < 1 for n in lengths):
            raise ValueError("window lengths must be positive")
        if any(b <= a for a, b in zip(lengths, lengths[1:])):
            raise ValueError("window lengths must be strictly increasing")
        if lengths[-1] > s.horizon:
            raise ValueError("window length exceeds the horizon")
    params = _series_params(s, {"epsilon": epsilon, "window_lengths": list(lengths)})
    if s.insufficient:
        return StabilityVerdict(
            "banach-diam-mean", params, None, s.bias_bound, INCONCLUSIVE, _base_evidence(s)
        )
    vals = s.values()
    prefix = np.concatenate(([0.0], np.cumsum(vals)))
    per_window = []
    for n in lengths:
        sums = prefix[n:] - prefix[:-n]
        per_window.append(float(sums.max()) / n)
    stat = max(per_window)
    verdict = HOLDS if stat < epsilon else FAILS
    evidence = _base_evidence(s)
    evidence["per_window"] = {str(n): v for n, v in zip(lengths, per_window)}
    return StabilityVerdict("banach-diam-mean", params, stat, s.bias_bound, verdict, evidence)


def stable_in_mean_test(
    x: SymbolicSequence,
    word: FiniteWord | None = None,
    horizon: int = 32768,
    depth_cap: int = DEFAULT_DEPTH_CAP,
    epsilon: float = 0.1,
    occ_cap: int = DEFAULT_OCC_CAP,
    series: DiamSeries | None = None,
) -> StabilityVerdict:
    """Worst prefix average of the diam series; holds iff < epsilon.

    Dominates the final Cesaro average, so this is the strictest of the
    averaged statistics at a fixed base depth.
    """
    s = _resolve_series(x, word, horizon, depth_cap, occ_cap, series)
    params = _series_params(s, {"epsilon": epsilon})
    if s.insufficient:
        return StabilityVerdict(
            "stable-in-mean", params, None, s.bias_bound, INCONCLUSIVE, _base_evidence(s)
        )
    vals = s.values()
    means = np.cumsum(vals) / np.arange(1, s.horizon + 1)
    stat = float(means.max())
    worst_n = int(means.argmax()) + 1
    verdict = HOLDS if stat < epsilon else FAILS
    evidence = _base_evidence(s)
    evidence["worst_prefix"] = worst_n
    return StabilityVerdict("stable-in-mean", params, stat, s.bias_bound, verdict, evidence)


def frequent_stability_test(
    x: SymbolicSequence,
    word: FiniteWord | None = None,
    horizon: int = 32768,
    depth_cap: int = DEFAULT_DEPTH_CAP,
    epsilon: float = 0.1,
    gamma: float = 0.25,
    occ_cap: int = DEFAULT_OCC_CAP,
    series: DiamSeries | None = None,
) -> StabilityVerdict:
    """Density of iterates with diam value above epsilon; holds iff <= 1 - gamma.

    The margin gamma quantifies "density strictly below one" at a finite
    horizon; the comparison is non-strict by definition of the margin.
    """
    if not 0 < gamma <= 1:
        raise ValueError("gamma must lie in (0, 1]")
    s = _resolve_series(x, word, horizon, depth_cap, occ_cap, series)
    params = _series_params(s, {"epsilon": epsilon, "gamma": gamma})
    if s.insufficient:
        return StabilityVerdict(
            "frequent-stability", params, None, s.bias_bound, INCONCLUSIVE, _base_evidence(s)
        )
    vals = s.values()
    stat = float((vals > epsilon).sum()) / s.horizon
    verdict = HOLDS if stat <= 1.0 - gamma else FAILS
    return StabilityVerdict("frequent-stability", params, stat, s.bias_bound, verdict, _base_evidence(s))


def covering_words(
    x: SymbolicSequence,
    depth: int,
    limit: int | None = None,
    max_words: int | None = None,
) -> tuple[FiniteWord, ...]:
    """All depth-m words occurring in x (sorted), optionally thinned evenly."""
    words = sorted(factors(x, depth, limit), key=lambda w: w.symbols)
    if max_words is not None and len(words) > max_words:
        idx = np.unique(np.linspace(0, len(words) - 1, max_words).astype(int))
        words = [words[i] for i in idx]
    return tuple(words)


def diam_mean_sensitivity_test(
    x: SymbolicSequence,
    words: Iterable[FiniteWord],
    horizon: int = 32768,
    depth_cap: int = DEFAULT_DEPTH_CAP,
    epsilon: float = 0.1,
    occ_cap: int = DEFAULT_OCC_CAP,
) -> StabilityVerdict:
    """Sensitivity sweep over a covering family of cylinders.

    Holds iff every evaluated cylinder has density of large-diam iterates
    strictly above epsilon; a single small-density cylinder is a witness
    against sensitivity and is reported as the minimizer. Words with fewer
    than two occurrences in the scan window are skipped with notice.
    """
    words = list(words)
    if not words:
        raise ValueError("need at least one word")
    evaluated: list[tuple[str, float]] = []
    skipped: list[str] = []
    for w in words:
        s = diam_series(x, w, horizon, depth_cap, occ_cap=occ_cap)
        if s.insufficient:
            skipped.append(str(w))
            continue
        vals = s.values()
        density = float((vals > epsilon).sum()) / s.horizon
        evaluated.append((str(w), density))
    params = {
        "depth": len(words[0]),
        "word_count": len(words),
        "horizon": horizon,
        "depth_cap": depth_cap,
        "epsilon": epsilon,
    }
    bias = 1.0 / depth_cap
    if not evaluated:
        return StabilityVerdict(
            "diam-mean-sensitivity",
            params,
            None,
            bias,
            INCONCLUSIVE,
            {"skipped": skipped, "note": "no cylinder had two occurrences"},
        )
    min_word, min_density = min(evaluated, key=lambda t: (t[1], t[0]))
    verdict = HOLDS if min_density > epsilon else FAILS
    evidence = {
        "minimizing_word": min_word,
        "evaluated": len(evaluated),
        "skipped": skipped,
        "direction": _DIRECTION_NOTE,
    }
    return StabilityVerdict(
        "diam-mean-sensitivity", params, min_density, bias, verdict, evidence
    )


@dataclass(frozen=True)
class ComplexityCurve:
    """Word-complexity entropy surrogate: n -> ln(#factors)/n."""

    lengths: tuple[int, ...]
    counts: tuple[int, ...]
    values: tuple[float, ...]
    limit: int
    trend: str

    def as_json_dict(self) -> dict:
        return {
            "lengths": list(self.lengths),
            "counts": list(self.counts),
            "values": list(self.values),
            "limit": self.limit,
            "trend": self.trend,
        }


def entropy_complexity(
    x: SymbolicSequence, lengths: Sequence[int], limit: int | None = None
) -> ComplexityCurve:
    """ln(#distinct n-words)/n over a range of n, within a scan limit."""
    lengths = tuple(int(n) for n in lengths)
    if not lengths or any(n < 1 for n in lengths):
        raise ValueError("word lengths must be positive")
    if any(b <= a for a, b in zip(lengths, lengths[1:])):
        raise ValueError("word lengths must be strictly increasing")
    if limit is None:
        limit = min(x.length, 1 << 20)
    counts = tuple(len(factors(x, n, limit)) for n in lengths)
    values = tuple(math.log(c) / n for c, n in zip(counts, lengths))
    if len(values) < 2 or abs(values[-1] - values[0]) < 1e-12:
        trend = "flat"
    elif values[-1] < values[0]:
        trend = "decreasing"
    else:
        trend = "increasing"
    return ComplexityCurve(lengths, counts, values, limit, trend)


@dataclass(frozen=True)
class ClassifyParams:
    """Knobs for the full classification battery of one system."""

    base_depth: int = 2
    sensitivity_depth: int = 3
    horizon: int = 32768
    depth_cap: int = DEFAULT_DEPTH_CAP
    epsilon: float = 0.1
    eta: float = 0.1
    gamma: float = 0.25
    modulus_depths: tuple[int, ...] = ()
    pair_budget: int = 8
    occ_cap: int = 4096
    entropy_lengths: tuple[int, ...] = (4, 8, 12)
    entropy_limit: int = 1 << 20
    max_words: int | None = 64

    def resolved_modulus_depths(self) -> tuple[int, ...]:
        if self.modulus_depths:
            return tuple(int(m) for m in self.modulus_depths)
        return (self.base_depth, 2 * self.base_depth)

    def as_json_dict(self) -> dict:
        d = {
            "base_depth": self.base_depth,
            "sensitivity_depth": self.sensitivity_depth,
            "horizon": self.horizon,
            "depth_cap": self.depth_cap,
            "epsilon": self.epsilon,
            "eta": self.eta,
            "gamma": self.gamma,
            "modulus_depths": list(self.resolved_modulus_depths()),
            "pair_budget": self.pair_budget,
            "occ_cap": self.occ_cap,
            "entropy_lengths": list(self.entropy_lengths),
            "entropy_limit": self.entropy_limit,
            "max_words": self.max_words,
        }
        return d


@dataclass(frozen=True)
class HierarchyReport:
    """Ordered ladder verdicts plus the component battery for one system."""

    system_id: str
    params: ClassifyParams
    rungs: tuple[StabilityVerdict, ...]
    battery: tuple[StabilityVerdict, ...]
    sensitivity: StabilityVerdict
    modulus: ModulusCurve
    complexity: ComplexityCurve
    notes: tuple[str, ...]

    def rung(self, name: str) -> StabilityVerdict:
        for v in self.rungs:
            if v.test == name:
                return v
        raise KeyError(name)

    def battery_verdict(self, name: str) -> StabilityVerdict:
        for v in self.battery:
            if v.test == name:
                return v
        raise KeyError(name)

    def as_json_dict(self) -> dict:
        return {
            "system_id": self.system_id,
            "params": self.params.as_json_dict(),
            "rungs": [v.as_json_dict() for v in self.rungs],
            "battery": [v.as_json_dict() for v in self.battery],
            "sensitivity": self.sensitivity.as_json_dict(),
            "modulus": self.modulus.as_json_dict(),
            "complexity": self.complexity.as_json_dict(),
            "notes": list(self.notes),
        }


def _combine(verdicts: Sequence[str]) -> str:
    if any(v == INCONCLUSIVE for v in verdicts):
        return INCONCLUSIVE
    if all(v == HOLDS for v in verdicts):
        return HOLDS
    return FAILS


def classify_hierarchy(
    x: SymbolicSequence, params: ClassifyParams | None = None, system_id: str | None = None
) -> HierarchyReport:
    """Run the stability ladder on one system and aggregate the verdicts.

    Ladder order (weakest first): diam-mean equicontinuity, then mean
    equicontinuity together with frequent stability, then mean
    equicontinuity alone. Any inconclusive component makes its rung
    inconclusive. The sensitivity sweep and the entropy surrogate ride
    along as context; no rung claims anything beyond the horizon.
    """
    p = params or ClassifyParams()
    sid = system_id or x.generator_id
    w = x.prefix(p.base_depth)
    series = diam_series(x, w, p.horizon, p.depth_cap, occ_cap=p.occ_cap)
    avg = diam_mean_avg_test(x, w, p.horizon, p.depth_cap, p.epsilon, p.occ_cap, series)
    dens = diam_mean_density_test(x, w, p.horizon, p.depth_cap, p.eta, p.occ_cap, series)
    ban = banach_diam_mean_test(
        x, w, p.horizon, p.depth_cap, p.epsilon, None, p.occ_cap, series
    )
    stab = stable_in_mean_test(x, w, p.horizon, p.depth_cap, p.epsilon, p.occ_cap, series)
    freq = frequent_stability_test(
        x, w, p.horizon, p.depth_cap, p.epsilon, p.gamma, p.occ_cap, series
    )
    modulus = mean_eq_modulus(
        x, p.resolved_modulus_depths(), p.horizon, p.depth_cap, p.pair_budget, p.occ_cap
    )
    scan_room = x.length - p.horizon - p.depth_cap
    word_scan = max(p.sensitivity_depth, min(scan_room, 1 << 20))
    words = covering_words(x, p.sensitivity_depth, word_scan, p.max_words)
    sens = diam_mean_sensitivity_test(
        x, words, p.horizon, p.depth_cap, p.epsilon, p.occ_cap
    )
    complexity = entropy_complexity(x, p.entropy_lengths, min(p.entropy_limit, x.length))

    deepest = modulus.statistics[-1]
    if modulus.shortfall[-1] or deepest is None:
        mean_eq_verdict = INCONCLUSIVE
        mean_eq_stat: float | None = None
    else:
        mean_eq_stat = deepest
        mean_eq_verdict = HOLDS if deepest < p.epsilon else FAILS
    mean_eq = StabilityVerdict(
        "mean-equicontinuity",
        {
            "depth": modulus.depths[-1],
            "horizon": p.horizon,
            "depth_cap": p.depth_cap,
            "epsilon": p.epsilon,
            "pair_budget": p.pair_budget,
        },
        mean_eq_stat,
        modulus.bias_bound,
        mean_eq_verdict,
        {"curve": modulus.as_json_dict()},
    )

    rung1 = StabilityVerdict(
        "ladder-diam-mean-equicontinuity",
        avg.params,
        avg.statistic,
        avg.bias_bound,
        avg.verdict,
        {"from": ["diam-mean-avg"]},
    )
    rung2_verdict = _combine([mean_eq.verdict, freq.verdict])
    rung2 = StabilityVerdict(
        "ladder-mean-eq-and-frequent-stability",
        {"epsilon": p.epsilon, "gamma": p.gamma, "depth": modulus.depths[-1]},
        None,
        modulus.bias_bound,
        rung2_verdict,
        {"from": ["mean-equicontinuity", "frequent-stability"]},
    )
    rung3 = StabilityVerdict(
        "ladder-mean-equicontinuity",
        mean_eq.params,
        mean_eq.statistic,
        mean_eq.bias_bound,
        mean_eq.verdict,
        {"from": ["mean-equicontinuity"]},
    )
    notes = (
        _DIRECTION_NOTE,
        "all verdicts are statements at the stated horizon, not limits",
        "orbit closure of a transitive point; no minimality claim",
    )
    return HierarchyReport(
        sid,
        p,
        (rung1, rung2, rung3),
        (avg, dens, ban, stab, freq, mean_eq),
        sens,
        modulus,
        complexity,
        notes,
    )
