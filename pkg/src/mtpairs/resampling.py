"""Bootstrap machinery: accuracy tie clusters, paired metric significance,
and human-vs-metric quadrant analysis.

All resampling draws from counter-based substreams derived as
``Philox(key=[seed, resample_index])``, so resample r of a run is the same
no matter how the loop is scheduled, and an independent implementation
following the same protocol reproduces every draw. Resample r selects unit
indices ``substream(seed, r).integers(0, n_units, size=n_units)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .human import DEFAULT_ALPHAS, TestOutcome
from .metrics import StatsBlock
from .pairwise import DeltaRecord, sign
from .subsets import SubsetSpec, filter_pairs, subset_fingerprint

__all__ = [
    "DEFAULT_SEED",
    "ResampleConfig",
    "ClusterReport",
    "QuadrantReport",
    "substream",
    "resample_counts",
    "bootstrap_accuracy_clusters",
    "paired_bootstrap_metric_test",
    "quadrant_analysis",
]

DEFAULT_SEED = 12345

# Resamples processed per vectorized batch; memory is batch * n_units * 8 bytes.
_BATCH = 512


@dataclass(frozen=True, slots=True)
class ResampleConfig:
    """Bootstrap parameters; the seed is recorded in every report.

    :param n_resamples: bootstrap iterations (10000 suits accuracy tie
        clusters; 1000 suits per-pair metric significance)
    :param seed: 64-bit RNG seed
    :param confidence: tie-cluster threshold on win fractions
    :param alpha: significance level for metric-test decisions
    """

    n_resamples: int = 10000
    seed: int = DEFAULT_SEED
    confidence: float = 0.95
    alpha: float = 0.05

    def __post_init__(self) -> None:
        if self.n_resamples < 100:
            raise ValueError(f"n_resamples {self.n_resamples} < 100")
        if not 0 < self.confidence < 1:
            raise ValueError(f"confidence {self.confidence!r} outside (0, 1)")
        if not 0 < self.alpha < 1:
            raise ValueError(f"alpha {self.alpha!r} outside (0, 1)")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed {self.seed!r} is not a 64-bit unsigned integer")


def substream(seed: int, index: int) -> np.random.Generator:
    """Independent deterministic RNG stream for one resample index."""
    return np.random.Generator(np.random.Philox(key=[seed, index]))


def resample_counts(seed: int, index: int, n_units: int) -> np.ndarray:
    """Multiplicities of each unit in resample ``index`` (always sums to n_units)."""
    indices = substream(seed, index).integers(0, n_units, size=n_units)
    return np.bincount(indices, minlength=n_units)


@dataclass(frozen=True)
class ClusterReport:
    """Which metrics are statistically tied with the best one on a subset.

    ``win_fraction`` maps each metric to the fraction of resamples where the
    best metric's accuracy was strictly higher (0 for the best metric
    itself); metrics beaten in less than ``confidence`` of resamples are
    tied with best, so the best metric is always in the tie set.
    """

    best_metric: str
    tied_with_best: frozenset[str]
    win_fraction: Mapping[str, float]
    accuracies: Mapping[str, float]
    n_pairs: int
    subset_description: str
    fingerprint: str
    config: ResampleConfig


def _agreement_arrays(records: Sequence[DeltaRecord],
                      metrics: Sequence[str]) -> tuple[np.ndarray, np.ndarray]:
    """Pair-by-metric sign-agreement (0/1) and score-presence (0/1) matrices."""
    agree = np.zeros((len(records), len(metrics)))
    present = np.zeros((len(records), len(metrics)))
    for i, record in enumerate(records):
        human_sign = sign(record.human_delta)
        for j, metric in enumerate(metrics):
            if metric in record.metric_deltas:
                present[i, j] = 1.0
                if sign(record.metric_deltas[metric]) == human_sign:
                    agree[i, j] = 1.0
    return agree, present


def bootstrap_accuracy_clusters(records: Sequence[DeltaRecord], metrics: Sequence[str],
                                subset: SubsetSpec = SubsetSpec(),
                                cfg: ResampleConfig = ResampleConfig()) -> ClusterReport:
    """Identify the best metric on a subset and which metrics tie with it.

    Pairs are drawn with replacement (each resample keeps the subset size);
    all metric accuracies are recomputed per resample, and strict wins of
    the best metric over each other are tallied. Resample ties and resamples
    where a metric has no scored pairs count as no win.

    :raises ValueError: when the subset selects no pairs
    """
    selected = filter_pairs(records, subset)
    if not selected:
        raise ValueError(f"empty subset: {subset.describe()}")
    metrics = list(dict.fromkeys(metrics))
    agree, present = _agreement_arrays(selected, metrics)

    with np.errstate(invalid="ignore", divide="ignore"):
        full = agree.sum(axis=0) / present.sum(axis=0)
    accuracies = {metric: float(full[j]) for j, metric in enumerate(metrics)}
    best_metric = min(metrics, key=lambda m: (-accuracies[m], m))
    best_index = metrics.index(best_metric)

    n = len(selected)
    wins = np.zeros(len(metrics))
    done = 0
    while done < cfg.n_resamples:
        batch = min(_BATCH, cfg.n_resamples - done)
        counts = np.empty((batch, n))
        for row in range(batch):
            counts[row] = resample_counts(cfg.seed, done + row, n)
        with np.errstate(invalid="ignore", divide="ignore"):
            resampled = (counts @ agree) / (counts @ present)
        best_column = resampled[:, best_index : best_index + 1]
        wins += np.where(best_column > resampled, 1.0, 0.0).sum(axis=0)
        done += batch

    win_fraction = {metric: float(wins[j] / cfg.n_resamples) for j, metric in enumerate(metrics)}
    win_fraction[best_metric] = 0.0
    tied = frozenset(m for m in metrics if win_fraction[m] < cfg.confidence)
    description = subset.describe()
    return ClusterReport(
        best_metric=best_metric,
        tied_with_best=tied,
        win_fraction=win_fraction,
        accuracies=accuracies,
        n_pairs=n,
        subset_description=description,
        fingerprint=subset_fingerprint(description, selected),
        config=cfg,
    )


def paired_bootstrap_metric_test(stats_a: StatsBlock, stats_b: StatsBlock,
                                 cfg: ResampleConfig = ResampleConfig(n_resamples=1000),
                                 one_sided: bool = False,
                                 alphas: Sequence[float] = DEFAULT_ALPHAS) -> TestOutcome:
    """Paired bootstrap significance of a corpus-score difference.

    Each resample redraws segment indices with replacement and recomputes
    both corpus scores from the reweighted sufficient statistics. Tied
    resamples count to neither side. Two-sided p is
    ``min(1, 2 * min(frac(A>B), frac(B>A)))``; the one-sided variant tests
    whether the first system is better. When no resample produces a winner
    the outcome is degenerate with p = 1.0.

    :param stats_a: per-segment statistics of the first system
    :param stats_b: per-segment statistics of the second system (same segments)
    :raises ValueError: missing segment statistics or mismatched segment sets
    """
    if stats_a is None or stats_b is None:
        raise ValueError("segment stats required")
    if stats_a.kind != stats_b.kind or stats_a.metric_name != stats_b.metric_name:
        raise ValueError(
            f"mismatched statistics: {stats_a.metric_name!r}/{stats_a.kind!r} vs "
            f"{stats_b.metric_name!r}/{stats_b.kind!r}"
        )
    if stats_a.n_segments != stats_b.n_segments:
        raise ValueError(
            f"segment sets differ: {stats_a.n_segments} vs {stats_b.n_segments} segments"
        )
    n_segments = stats_a.n_segments
    statistic = stats_a.corpus_score() - stats_b.corpus_score()

    wins_a = 0
    wins_b = 0
    for index in range(cfg.n_resamples):
        counts = resample_counts(cfg.seed, index, n_segments)
        score_a = stats_a.corpus_score(counts)
        score_b = stats_b.corpus_score(counts)
        if score_a > score_b:
            wins_a += 1
        elif score_b > score_a:
            wins_b += 1

    note = f"paired bootstrap ({cfg.n_resamples} resamples, seed {cfg.seed})"
    if wins_a == 0 and wins_b == 0:
        p_value = 1.0
        note += "; degenerate: every resample tied"
    elif one_sided:
        p_value = (cfg.n_resamples - wins_a) / cfg.n_resamples
        note += "; one-sided"
    else:
        p_value = min(1.0, 2.0 * min(wins_a, wins_b) / cfg.n_resamples)
    decision_alphas = sorted(set(alphas) | {cfg.alpha}, reverse=True)
    return TestOutcome(
        p_value=p_value,
        statistic=statistic,
        decisions={alpha: p_value <= alpha for alpha in decision_alphas},
        method_note=note,
    )


@dataclass(frozen=True)
class QuadrantReport:
    """Cross-classification of pairs by human and metric-test significance.

    The four counts partition the analyzed pairs; the type-II rate is taken
    over the pairs the metric test called non-significant. Accuracy is the
    plain sign-agreement fraction, once over all pairs and once restricted
    to metric-significant pairs (None when there are none).
    """

    metric_name: str
    n_pairs: int
    truly_differing: int
    type_i: int
    type_ii: int
    equal_quality: int
    type_ii_rate: float
    accuracy_all: float
    accuracy_metric_significant: float | None
    human_alpha: float
    config: ResampleConfig


def quadrant_analysis(records: Sequence[DeltaRecord], metric_name: str,
                      stats: Mapping[tuple[str, str], StatsBlock],
                      human_alpha: float = 0.05,
                      cfg: ResampleConfig = ResampleConfig(n_resamples=1000),
                      ) -> QuadrantReport:
    """Classify every pair by (human significant?, metric-test significant?).

    :param records: delta records with human p-values
    :param stats: (campaign_id, system_id) -> per-segment statistics for the
        metric under analysis
    :raises ValueError: no usable pairs, or missing segment statistics
    """
    usable = [r for r in records if metric_name in r.metric_deltas]
    if not usable:
        raise ValueError(f"no pairs with {metric_name!r} scores")
    counts = {"truly-differing": 0, "type-i": 0, "type-ii": 0, "equal-quality": 0}
    agree_all = 0
    agree_significant = 0
    n_significant = 0
    for record in usable:
        if record.human_p is None:
            raise ValueError("quadrant analysis requires a human p-value on every record")
        key_a = (record.pair.campaign_id, record.pair.system_a)
        key_b = (record.pair.campaign_id, record.pair.system_b)
        if key_a not in stats or key_b not in stats:
            raise ValueError(
                f"segment stats required for metric {metric_name!r} on pair "
                f"({record.pair.system_a!r}, {record.pair.system_b!r}) in campaign "
                f"{record.pair.campaign_id!r}"
            )
        outcome = paired_bootstrap_metric_test(stats[key_a], stats[key_b], cfg)
        human_significant = record.human_p <= human_alpha
        metric_significant = outcome.p_value <= cfg.alpha
        if human_significant and metric_significant:
            counts["truly-differing"] += 1
        elif metric_significant:
            counts["type-i"] += 1
        elif human_significant:
            counts["type-ii"] += 1
        else:
            counts["equal-quality"] += 1
        agreement = sign(record.metric_deltas[metric_name]) == sign(record.human_delta)
        agree_all += agreement
        if metric_significant:
            n_significant += 1
            agree_significant += agreement

    non_significant = counts["type-ii"] + counts["equal-quality"]
    type_ii_rate = counts["type-ii"] / non_significant if non_significant else 0.0
    return QuadrantReport(
        metric_name=metric_name,
        n_pairs=len(usable),
        truly_differing=counts["truly-differing"],
        type_i=counts["type-i"],
        type_ii=counts["type-ii"],
        equal_quality=counts["equal-quality"],
        type_ii_rate=type_ii_rate,
        accuracy_all=agree_all / len(usable),
        accuracy_metric_significant=(
            agree_significant / n_significant if n_significant else None
        ),
        human_alpha=human_alpha,
        config=cfg,
    )
