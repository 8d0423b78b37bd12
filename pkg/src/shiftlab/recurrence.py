"""Simultaneous near-return search along powers of the shift.

Looks for the smallest n such that the orbit points after n, 2n, ..., dn
steps all start with the same m-symbol prefix as the base point, i.e. all
land within 1/m of it. The search is exhaustive with early exit and is its
own oracle; found returns are re-verified by an independent prefix
comparison. Raw findings only: nothing here certifies minimality of the
diagonal orbit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import DEFAULT_DEPTH_CAP, HorizonError, SymbolicSequence, metric_distance

__all__ = ["RecurrenceResult", "multi_recurrence_search"]


@dataclass(frozen=True)
class RecurrenceResult:
    """Outcome of a simultaneous near-return search."""

    powers: int
    epsilon_depth: int
    found: int | None
    gaps: tuple[float, ...]
    horizon: int

    @property
    def epsilon(self) -> float:
        return 1.0 / self.epsilon_depth

    def as_json_dict(self) -> dict:
        return {
            "d": self.powers,
            "epsilon": self.epsilon,
            "epsilon_depth": self.epsilon_depth,
            "n": self.found,
            "gaps": list(self.gaps),
            "horizon": self.horizon,
        }

    def to_json(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.as_json_dict(), sort_keys=True, indent=2) + "\n")


def multi_recurrence_search(
    x: SymbolicSequence,
    powers: int,
    epsilon_depth: int,
    horizon: int,
    depth_cap: int = DEFAULT_DEPTH_CAP,
) -> RecurrenceResult:
    """Smallest n <= horizon with x[jn+1 .. jn+m] = x[1 .. m] for j = 1..powers.

    The tolerance is 1/epsilon_depth, i.e. prefix agreement on m =
    epsilon_depth symbols. Gaps report truncated-distance upper bounds for
    each power at the found time; a return for (d, m) is automatically a
    return for any smaller d and any smaller m at the same n.
    """
    if powers < 1:
        raise ValueError("need at least one power")
    if epsilon_depth < 1:
        raise ValueError("epsilon_depth must be a positive integer (epsilon = 1/m)")
    if horizon < 1:
        raise ValueError("horizon must be positive")
    m = epsilon_depth
    gap_cap = max(m + 1, depth_cap)
    need = powers * horizon + gap_cap
    if x.length < need:
        raise HorizonError(
            f"search needs {need} symbols (powers*horizon + max(m+1, depth_cap));"
            f" buffer exposes {x.length}"
        )
    buf = x.data
    target = buf[:m]
    head = int(target[0])
    for n in range(1, horizon + 1):
        hit = True
        for j in range(1, powers + 1):
            start = j * n
            if buf[start] != head or not np.array_equal(buf[start : start + m], target):
                hit = False
                break
        if hit:
            for j in range(1, powers + 1):
                if tuple(buf[j * n : j * n + m].tolist()) != tuple(target.tolist()):
                    raise RuntimeError("post-hoc prefix verification failed")
            gaps = tuple(
                metric_distance(x.shift(j * n), x, gap_cap).upper_bound
                for j in range(1, powers + 1)
            )
            return RecurrenceResult(powers, epsilon_depth, n, gaps, horizon)
    return RecurrenceResult(powers, epsilon_depth, None, (), horizon)
