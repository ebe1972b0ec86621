"""Aggregation of per-group correlations into one coefficient.

The aggregate is the n-weighted mean of the raw correlation coefficients
(bare-bones Hunter-Schmidt, no artifact corrections): groups contribute in
proportion to how many systems they observed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

__all__ = [
    "CorrelationObservation",
    "hunter_schmidt",
    "read_correlations_tsv",
]


@dataclass(frozen=True, slots=True)
class CorrelationObservation:
    """One group's correlation: a label, the coefficient, and its system count."""

    group_label: str
    r: float
    n: int

    def __post_init__(self) -> None:
        if not -1.0 <= self.r <= 1.0:
            raise ValueError(f"correlation {self.r!r} outside [-1, 1]")
        if self.n < 2:
            raise ValueError(f"group {self.group_label!r} has n={self.n}, need at least 2")


def hunter_schmidt(observations: Sequence[CorrelationObservation]) -> tuple[float, int]:
    """n-weighted mean correlation over groups.

    >>> hunter_schmidt([CorrelationObservation("a", 0.8, 10),
    ...                 CorrelationObservation("b", 0.6, 30)])
    (0.65, 40)

    :param observations: per-group coefficients
    :return: (aggregate r, total n)
    :raises ValueError: on empty input
    """
    if not observations:
        raise ValueError("no correlation observations")
    n_total = sum(obs.n for obs in observations)
    weighted = math.fsum(obs.n * obs.r for obs in observations)
    return weighted / n_total, n_total


def read_correlations_tsv(path) -> list[CorrelationObservation]:
    """Read observations from a TSV with columns (group, r, n).

    A header row is recognized by a non-numeric second column and skipped;
    blank lines and lines starting with '#' are ignored.
    """
    observations = []
    first_data_row = True
    with open(path, encoding="utf-8") as handle:
        for line_no, raw in enumerate(handle, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ValueError(f"line {line_no}: expected 3 tab-separated columns, got {len(parts)}")
            group, r_text, n_text = (part.strip() for part in parts)
            try:
                r = float(r_text)
            except ValueError:
                if first_data_row:
                    first_data_row = False
                    continue  # header row
                raise ValueError(f"line {line_no}: bad correlation value {r_text!r}") from None
            first_data_row = False
            try:
                n = int(n_text)
            except ValueError:
                raise ValueError(f"line {line_no}: bad group size {n_text!r}") from None
            observations.append(CorrelationObservation(group, r, n))
    return observations
