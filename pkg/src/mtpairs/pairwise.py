"""System-pair deltas, pairwise ranking accuracy, and delta correlations.

Every system pair contributes one record holding the human score delta, the
human-significance p-value, and one delta per metric (all higher-better, so
positive means the first system of the canonical pair is preferred).
Ranking accuracy is the fraction of pairs where sign(metric delta) equals
sign(human delta); sign(0) = 0, so a zero metric delta agrees only with a
zero human delta.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Mapping, Sequence

from .data import Collection, SystemPair, enumerate_pairs
from .human import human_system_score, paired_differences, wilcoxon_signed_rank
from .languages import script_class
from .subsets import SubsetSpec, filter_pairs, subset_fingerprint

__all__ = [
    "DeltaRecord",
    "AccuracyResult",
    "AccuracyTable",
    "MissingScoreWarning",
    "build_delta_records",
    "accuracy",
    "delta_correlations",
    "accuracy_table",
    "accuracy_table_for_specs",
    "scatter_points",
    "sign",
    "average_ranks",
    "pearson",
    "spearman",
]


class MissingScoreWarning(UserWarning):
    """A metric lacks a score for some system; affected pairs are excluded."""


@dataclass(frozen=True)
class DeltaRecord:
    """One system pair with its human and metric score deltas.

    Deltas are first-minus-second under the canonical (lexicographic) pair
    order; metric deltas are over orientation-normalized scores. The tag
    fields are copied off the campaign for subset filtering.
    """

    pair: SystemPair
    human_delta: float
    human_p: float | None
    metric_deltas: Mapping[str, float]
    direction: str
    script: str
    domain: str
    group: str


@dataclass(frozen=True, slots=True)
class AccuracyResult:
    """Pairwise ranking accuracy of one metric over one pair subset.

    :param n_subset: pairs selected by the subset (the human-score n)
    :param n_pairs: pairs actually scored, <= n_subset when scores are missing
    :param fingerprint: identity of the selected subset, shared with any
        cluster analysis computed over the same pairs
    """

    metric_name: str
    n_pairs: int
    n_agree: int
    accuracy: float
    n_subset: int
    subset_description: str
    fingerprint: str


def sign(value: float) -> int:
    return (value > 0) - (value < 0)


def build_delta_records(collection: Collection, metrics: Sequence[str] | None = None,
                        matching: str = "auto") -> list[DeltaRecord]:
    """One delta record per system pair per campaign, in deterministic order.

    Human deltas come from mean judgement scores and the paired signed-rank
    test. A metric with no score for one of a pair's systems drops out of
    that record's deltas with a MissingScoreWarning.

    :param collection: validated campaign collection with judgements
    :param metrics: metric names to include (default: all present)
    :param matching: paired-difference matching mode (auto/annotator/segment)
    """
    metric_names = tuple(metrics) if metrics is not None else collection.metric_names()
    records = []
    for campaign in collection.campaigns:
        means = {
            system_id: human_system_score(campaign, system_id).mean_score
            for system_id in campaign.system_ids
        }
        system_levels = {}
        for name in metric_names:
            score_set = campaign.metric_set(name)
            system_levels[name] = score_set.system_level() if score_set is not None else {}
        direction = campaign.direction
        script = script_class(campaign.language_pair[1])
        for pair in enumerate_pairs(campaign):
            human_delta = means[pair.system_a] - means[pair.system_b]
            diffs = paired_differences(campaign, pair, matching)
            human_p = wilcoxon_signed_rank(diffs.diffs, alphas=collection.alphas).p_value
            deltas = {}
            for name in metric_names:
                levels = system_levels[name]
                if pair.system_a in levels and pair.system_b in levels:
                    deltas[name] = levels[pair.system_a] - levels[pair.system_b]
                else:
                    warnings.warn(
                        f"metric {name!r} has no score for pair "
                        f"({pair.system_a!r}, {pair.system_b!r}) in campaign "
                        f"{campaign.campaign_id!r}; pair excluded for this metric",
                        MissingScoreWarning,
                        stacklevel=2,
                    )
            records.append(
                DeltaRecord(
                    pair=pair,
                    human_delta=human_delta,
                    human_p=human_p,
                    metric_deltas=deltas,
                    direction=direction,
                    script=script,
                    domain=campaign.domain_tag,
                    group=campaign.group_tag,
                )
            )
    return records


def accuracy(records: Sequence[DeltaRecord], metric_name: str,
             subset: SubsetSpec = SubsetSpec()) -> AccuracyResult:
    """Pairwise ranking accuracy of a metric over a subset of pair records.

    :raises ValueError: when the subset selects no pairs, or none of the
        selected pairs carry the metric
    """
    selected = filter_pairs(records, subset)
    if not selected:
        raise ValueError(f"empty subset: {subset.describe()}")
    usable = [r for r in selected if metric_name in r.metric_deltas]
    if not usable:
        raise ValueError(
            f"no pairs with {metric_name!r} scores in subset: {subset.describe()}"
        )
    n_agree = sum(
        1 for r in usable if sign(r.metric_deltas[metric_name]) == sign(r.human_delta)
    )
    description = subset.describe()
    return AccuracyResult(
        metric_name=metric_name,
        n_pairs=len(usable),
        n_agree=n_agree,
        accuracy=n_agree / len(usable),
        n_subset=len(selected),
        subset_description=description,
        fingerprint=subset_fingerprint(description, selected),
    )


def average_ranks(values: Sequence[float]) -> list[float]:
    """1-based ranks with ties assigned the mean of the positions they span."""
    order = sorted(range(len(values)), key=lambda idx: values[idx])
    ranks = [0.0] * len(values)
    position = 0
    while position < len(order):
        end = position
        while end + 1 < len(order) and values[order[end + 1]] == values[order[position]]:
            end += 1
        rank = ((position + 1) + (end + 1)) / 2.0
        for k in range(position, end + 1):
            ranks[order[k]] = rank
        position = end + 1
    return ranks


def pearson(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Product-moment correlation, computed in a fixed documented order.

    Two passes: plain sequential means, then exactly rounded sums of the
    centered products and squares; the result is
    ``cov / sqrt(var_x * var_y)``. Raises on constant input.
    """
    if len(xs) != len(ys):
        raise ValueError("length mismatch")
    n = len(xs)
    mean_x = math.fsum(xs) / n
    mean_y = math.fsum(ys) / n
    cov = math.fsum((x - mean_x) * (y - mean_y) for x, y in zip(xs, ys))
    var_x = math.fsum((x - mean_x) ** 2 for x in xs)
    var_y = math.fsum((y - mean_y) ** 2 for y in ys)
    if var_x == 0.0 or var_y == 0.0:
        raise ValueError("constant deltas")
    return cov / math.sqrt(var_x * var_y)


def spearman(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Rank correlation: Pearson over average ranks."""
    return pearson(average_ranks(xs), average_ranks(ys))


def delta_correlations(records: Sequence[DeltaRecord], metric_name: str,
                       subset: SubsetSpec = SubsetSpec()) -> tuple[float, float]:
    """Pearson and Spearman correlation between metric and human deltas.

    :raises ValueError: fewer than 3 usable pairs, or constant deltas
    """
    selected = filter_pairs(records, subset)
    usable = [r for r in selected if metric_name in r.metric_deltas]
    if len(usable) < 3:
        raise ValueError(
            f"need at least 3 pairs with {metric_name!r} scores, have {len(usable)} "
            f"(subset: {subset.describe()})"
        )
    metric_deltas = [r.metric_deltas[metric_name] for r in usable]
    human_deltas = [r.human_delta for r in usable]
    return pearson(metric_deltas, human_deltas), spearman(metric_deltas, human_deltas)


def scatter_points(records: Sequence[DeltaRecord], metric_name: str,
                   subset: SubsetSpec = SubsetSpec()) -> list[tuple[float, float, str]]:
    """(metric delta, human delta, direction class) triplets for external plotting."""
    selected = filter_pairs(records, subset)
    return [
        (r.metric_deltas[metric_name], r.human_delta, r.direction)
        for r in selected
        if metric_name in r.metric_deltas
    ]


@dataclass(frozen=True)
class AccuracyTable:
    """Accuracy per metric across significance columns (All / alphas / Within).

    ``column_sizes`` hold the per-column human-score n; a cell is None when
    its column subset is empty or the metric has no scored pairs there.
    Rows are sorted by the first column's accuracy, best first.
    """

    column_labels: tuple[str, ...]
    column_specs: tuple[SubsetSpec, ...]
    column_sizes: tuple[int, ...]
    column_fingerprints: tuple[str, ...]
    rows: tuple[tuple[str, tuple[AccuracyResult | None, ...]], ...]
    intersect: bool = False


def accuracy_table_for_specs(records: Sequence[DeltaRecord], metrics: Sequence[str],
                             labeled_specs: Sequence[tuple[str, SubsetSpec]],
                             intersect: bool = False) -> AccuracyTable:
    """Accuracy of each metric over arbitrary labeled column subsets.

    With ``intersect``, only pairs scored by every requested metric are
    used, so per-metric n cannot differ. Rows come back sorted by the first
    column's accuracy, descending, ties broken by metric name.
    """
    if intersect:
        records = [r for r in records if all(m in r.metric_deltas for m in metrics)]
    column_sizes = []
    column_fingerprints = []
    cells: dict[str, list[AccuracyResult | None]] = {metric: [] for metric in metrics}
    for _label, spec in labeled_specs:
        selected = filter_pairs(records, spec)
        column_sizes.append(len(selected))
        column_fingerprints.append(subset_fingerprint(spec.describe(), selected))
        for metric in metrics:
            try:
                cells[metric].append(accuracy(records, metric, spec))
            except ValueError:
                cells[metric].append(None)

    def sort_key(metric: str):
        first = cells[metric][0]
        return (-(first.accuracy if first is not None else -math.inf), metric)

    rows = tuple((metric, tuple(cells[metric])) for metric in sorted(metrics, key=sort_key))
    return AccuracyTable(
        column_labels=tuple(label for label, _ in labeled_specs),
        column_specs=tuple(spec for _, spec in labeled_specs),
        column_sizes=tuple(column_sizes),
        column_fingerprints=tuple(column_fingerprints),
        rows=rows,
        intersect=intersect,
    )


def accuracy_table(records: Sequence[DeltaRecord], metrics: Sequence[str],
                   alphas: Sequence[float] = (0.05, 0.01, 0.001),
                   intersect: bool = False) -> AccuracyTable:
    """Accuracy of each metric over All, each alpha level, and the Within band.

    Alpha columns keep pairs whose human p-value is at most alpha, so their
    sizes nest monotonically; Within keeps (min alpha, max alpha]. With
    ``intersect``, only pairs scored by every requested metric are used, so
    per-metric n cannot differ.

    :raises ValueError: when a record lacks a human p-value
    """
    if not alphas:
        raise ValueError("at least one alpha level is required")
    if any(r.human_p is None for r in records):
        raise ValueError("accuracy table requires a human p-value on every record")
    alphas = tuple(sorted(alphas, reverse=True))
    labeled: list[tuple[str, SubsetSpec]] = [("All", SubsetSpec())]
    for alpha in alphas:
        labeled.append((f"{alpha:g}", SubsetSpec(max_p_alpha=alpha)))
    labeled.append(("Within", SubsetSpec(within=(min(alphas), max(alphas)))))
    return accuracy_table_for_specs(records, metrics, labeled, intersect)
