"""Human judgement aggregation and paired significance of system pairs.

System quality is the plain arithmetic mean of judgement scores (no
z-normalization). Whether two systems differ is decided by the Wilcoxon
signed-rank test over per-unit score differences: a paired test, so only
judgements of the same segment are compared. Zero differences are discarded
before ranking (the test's original treatment) and tied absolute values get
average ranks; both choices surface in the outcome so they can be audited.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from .data import Campaign, SystemPair

__all__ = [
    "DEFAULT_ALPHAS",
    "EXACT_LIMIT",
    "HumanSystemScore",
    "PairedDifferences",
    "TestOutcome",
    "human_system_score",
    "paired_differences",
    "wilcoxon_signed_rank",
    "significance_band",
    "in_within_band",
]

DEFAULT_ALPHAS = (0.05, 0.01, 0.001)

# Nonzero-difference count at or below which the exact null distribution is
# enumerated; above it, the normal approximation with tie and continuity
# corrections is used. 2^25 sign assignments stay fast via the rank-sum
# convolution below.
EXACT_LIMIT = 25

MATCHING_MODES = ("auto", "annotator", "segment")


@dataclass(frozen=True, slots=True)
class HumanSystemScore:
    campaign_id: str
    system_id: str
    mean_score: float
    n_judgements: int


@dataclass(frozen=True, slots=True)
class PairedDifferences:
    """Per-unit differences (first system minus second) for one pair.

    :param matching: the unit actually used, "annotator" or "segment"
    :param n_dropped: judgement records that matched no unit on the other side
    """

    pair: SystemPair
    diffs: tuple[float, ...]
    matching: str
    n_dropped: int


@dataclass(frozen=True, slots=True)
class TestOutcome:
    """Result of a two-sided paired significance test.

    :param statistic: the test statistic (rank sum of positive differences
        for the signed-rank test; score delta for the bootstrap test)
    :param decisions: alpha -> True when significant (p <= alpha)
    :param method_note: how the p-value was obtained, including degeneracies
    :param n_zeros: zero differences discarded before ranking
    """

    p_value: float
    statistic: float
    decisions: Mapping[float, bool]
    method_note: str
    n_zeros: int = 0

    def significant(self, alpha: float) -> bool:
        return self.p_value <= alpha


def _decisions(p_value: float, alphas: Sequence[float]) -> dict[float, bool]:
    return {alpha: p_value <= alpha for alpha in alphas}


def human_system_score(campaign: Campaign, system_id: str) -> HumanSystemScore:
    """Arithmetic mean of all judgement scores for one system.

    :raises ValueError: when the system has no judgements
    """
    scores = [j.score for j in campaign.judgements if j.system_id == system_id]
    if not scores:
        raise ValueError(
            f"no judgements for system {system_id!r} in campaign {campaign.campaign_id!r}"
        )
    return HumanSystemScore(
        campaign_id=campaign.campaign_id,
        system_id=system_id,
        mean_score=math.fsum(scores) / len(scores),
        n_judgements=len(scores),
    )


def _unit_means(judgements, key) -> dict:
    """Mean score per unit key; repeated judgements of a unit are averaged."""
    sums: dict = {}
    for judgement in judgements:
        unit = key(judgement)
        sums.setdefault(unit, []).append(judgement.score)
    return {unit: math.fsum(vals) / len(vals) for unit, vals in sums.items()}


def paired_differences(campaign: Campaign, pair: SystemPair,
                       matching: str = "auto") -> PairedDifferences:
    """Per-unit score differences for a pair, first system minus second.

    The matching unit is (segment, annotator) when the same annotator judged
    both systems on a segment; "segment" averages each system's judgements
    per segment and pairs the segment means. The default mode uses annotator
    matching and falls back to segment matching when no annotator judged both
    sides anywhere.

    :raises ValueError: when no units match at all
    """
    if matching not in MATCHING_MODES:
        raise ValueError(f"unknown matching mode {matching!r}")
    judgements_a = [j for j in campaign.judgements if j.system_id == pair.system_a]
    judgements_b = [j for j in campaign.judgements if j.system_id == pair.system_b]

    if matching in ("auto", "annotator"):
        units_a = _unit_means(judgements_a, key=lambda j: (j.segment_id, j.annotator_id))
        units_b = _unit_means(judgements_b, key=lambda j: (j.segment_id, j.annotator_id))
        shared = sorted(set(units_a) & set(units_b))
        if shared:
            diffs = tuple(units_a[unit] - units_b[unit] for unit in shared)
            shared_set = set(shared)
            n_dropped = sum(
                1
                for j in judgements_a + judgements_b
                if (j.segment_id, j.annotator_id) not in shared_set
            )
            return PairedDifferences(pair, diffs, "annotator", n_dropped)
        if matching == "annotator":
            raise ValueError(
                f"no matched units for pair ({pair.system_a!r}, {pair.system_b!r}) "
                f"in campaign {pair.campaign_id!r} under annotator matching"
            )

    units_a = _unit_means(judgements_a, key=lambda j: j.segment_id)
    units_b = _unit_means(judgements_b, key=lambda j: j.segment_id)
    shared = sorted(set(units_a) & set(units_b))
    if not shared:
        raise ValueError(
            f"no matched units for pair ({pair.system_a!r}, {pair.system_b!r}) "
            f"in campaign {pair.campaign_id!r}"
        )
    diffs = tuple(units_a[unit] - units_b[unit] for unit in shared)
    shared_set = set(shared)
    n_dropped = sum(1 for j in judgements_a + judgements_b if j.segment_id not in shared_set)
    return PairedDifferences(pair, diffs, "segment", n_dropped)


def _doubled_average_ranks(magnitudes: Sequence[float]) -> list[int]:
    """Average ranks of sorted-by-magnitude values, times two (always integral).

    A tie group occupying 1-based rank positions i..j gets average rank
    (i + j) / 2, i.e. doubled rank i + j.
    """
    order = sorted(range(len(magnitudes)), key=lambda idx: magnitudes[idx])
    doubled = [0] * len(magnitudes)
    position = 0
    while position < len(order):
        end = position
        while (
            end + 1 < len(order)
            and magnitudes[order[end + 1]] == magnitudes[order[position]]
        ):
            end += 1
        doubled_rank = (position + 1) + (end + 1)
        for k in range(position, end + 1):
            doubled[order[k]] = doubled_rank
        position = end + 1
    return doubled


def _exact_two_sided_p(doubled_ranks: Sequence[int], doubled_statistic: int) -> float:
    """Exact two-sided p under the signed-rank null (all sign flips equally likely).

    Convolves the rank-sum distribution over the doubled (integral) ranks,
    which is equivalent to enumerating all 2^n sign assignments.
    """
    total_doubled = sum(doubled_ranks)
    counts = [0] * (total_doubled + 1)
    counts[0] = 1
    for rank in doubled_ranks:
        for w in range(total_doubled, rank - 1, -1):
            counts[w] += counts[w - rank]
    assignments = 1 << len(doubled_ranks)
    lower = sum(counts[: doubled_statistic + 1])
    upper = sum(counts[doubled_statistic:])
    return min(1.0, 2.0 * min(lower / assignments, upper / assignments))


def _asymptotic_two_sided_p(doubled_ranks: Sequence[int], doubled_statistic: int,
                            magnitudes: Sequence[float]) -> float:
    """Normal approximation with tie correction and continuity correction."""
    n = len(doubled_ranks)
    mean = n * (n + 1) / 4.0
    tie_term = 0.0
    counts: dict[float, int] = {}
    for magnitude in magnitudes:
        counts[magnitude] = counts.get(magnitude, 0) + 1
    for t in counts.values():
        tie_term += t**3 - t
    variance = n * (n + 1) * (2 * n + 1) / 24.0 - tie_term / 48.0
    statistic = doubled_statistic / 2.0
    if statistic > mean:
        z = (statistic - mean - 0.5) / math.sqrt(variance)
    elif statistic < mean:
        z = (statistic - mean + 0.5) / math.sqrt(variance)
    else:
        z = 0.0
    return math.erfc(abs(z) / math.sqrt(2.0))


def wilcoxon_signed_rank(diffs: Sequence[float], alphas: Sequence[float] = DEFAULT_ALPHAS,
                         exact_limit: int = EXACT_LIMIT) -> TestOutcome:
    """Two-sided Wilcoxon signed-rank test over paired differences.

    Zeros are discarded (their count is reported); ties get average ranks.
    With at most ``exact_limit`` nonzero differences the p-value comes from
    the exact null distribution, otherwise from the normal approximation with
    tie and continuity corrections. All differences zero (or none at all) is
    a degenerate outcome with p = 1.0, not an error.

    :param diffs: per-unit differences
    :param alphas: significance levels for the decisions mapping
    :param exact_limit: largest nonzero count handled exactly
    :return: outcome with the positive-rank sum as statistic
    """
    nonzero = [d for d in diffs if d != 0.0]
    n_zeros = len(diffs) - len(nonzero)
    if not nonzero:
        return TestOutcome(
            p_value=1.0,
            statistic=0.0,
            decisions=_decisions(1.0, alphas),
            method_note="degenerate: all differences zero",
            n_zeros=n_zeros,
        )
    magnitudes = [abs(d) for d in nonzero]
    doubled_ranks = _doubled_average_ranks(magnitudes)
    doubled_statistic = sum(
        rank for rank, diff in zip(doubled_ranks, nonzero) if diff > 0
    )
    n = len(nonzero)
    if n <= exact_limit:
        p_value = _exact_two_sided_p(doubled_ranks, doubled_statistic)
        method_note = f"exact (n={n}, zeros discarded={n_zeros})"
    else:
        p_value = _asymptotic_two_sided_p(doubled_ranks, doubled_statistic, magnitudes)
        method_note = f"asymptotic with tie correction (n={n}, zeros discarded={n_zeros})"
    return TestOutcome(
        p_value=p_value,
        statistic=doubled_statistic / 2.0,
        decisions=_decisions(p_value, alphas),
        method_note=method_note,
        n_zeros=n_zeros,
    )


def significance_band(p: float, alphas: Sequence[float] = DEFAULT_ALPHAS) -> str:
    """The strictest alpha at which p is significant, or "ns".

    Significance at an alpha means p <= alpha, so the bands nest: a pair
    significant at 0.001 is also significant at 0.01 and 0.05.
    """
    if not 0 <= p <= 1:
        raise ValueError(f"p-value {p!r} outside [0, 1]")
    passed = [alpha for alpha in alphas if p <= alpha]
    if not passed:
        return "ns"
    return f"{min(passed):g}"


def in_within_band(p: float, band: tuple[float, float] = (0.001, 0.05)) -> bool:
    """Whether p lies in the band (lo, hi]: significant but not overwhelmingly so."""
    lo, hi = band
    return lo < p <= hi
