"""Built-in string metrics (BLEU, ChrF, TER) over per-segment sufficient statistics.

Every metric is computed in two steps: per-segment sufficient statistics
(integers), then a corpus score from the summed statistics. The split is what
makes bootstrap resampling cheap: a resample only re-weights the per-segment
rows before summing. Corpus scores computed from cached statistics are exactly
equal to recomputation from raw text, because they are the same code path.

All corpus-score formulas below are evaluated with plain scalar arithmetic in
the documented operation order, so independent reimplementations of the same
formulas reproduce them bit for bit.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .data import Campaign, Collection, MetricScoreSet
from .tokenization import DEFAULT_SCHEME, TokenizationScheme, scheme_for_language, tokenize

__all__ = [
    "BLEU_ORDERS",
    "CHRF_ORDERS",
    "CHRF_BETA",
    "BUILTIN_METRICS",
    "BleuSegmentStats",
    "ChrfSegmentStats",
    "TerSegmentStats",
    "bleu_segment_stats",
    "chrf_segment_stats",
    "ter_segment",
    "corpus_bleu",
    "corpus_chrf",
    "corpus_ter",
    "bleu_from_totals",
    "chrf_from_totals",
    "StatsBlock",
    "segment_scores_block",
    "score_system",
    "score_collection",
    "stats_for_lines",
    "stats_lookup_for_metric",
    "with_builtin_scores",
]

BLEU_ORDERS = 4
CHRF_ORDERS = 6
CHRF_BETA = 2.0
BUILTIN_METRICS = ("bleu", "chrf", "ter")

_TER_SHIFT_CAP = 10
_TER_EXACT_LIMIT = 8


@dataclass(frozen=True, slots=True)
class BleuSegmentStats:
    """Clipped n-gram match counts for one segment, orders 1..4.

    :param match_counts: clipped matches per order
    :param hyp_counts: hypothesis n-gram counts per order, max(0, len - n + 1)
    :param hyp_length: hypothesis token count
    :param ref_length: reference token count
    """

    match_counts: tuple[int, int, int, int]
    hyp_counts: tuple[int, int, int, int]
    hyp_length: int
    ref_length: int


@dataclass(frozen=True, slots=True)
class ChrfSegmentStats:
    """Character n-gram counts for one segment, orders 1..6, whitespace removed."""

    tp_counts: tuple[int, ...]
    hyp_counts: tuple[int, ...]
    ref_counts: tuple[int, ...]
    beta: float = CHRF_BETA


@dataclass(frozen=True, slots=True)
class TerSegmentStats:
    """Edit count (insertions + deletions + substitutions + shifts) and reference length."""

    edit_count: int
    ref_length: int


def _ngram_counts(tokens: Sequence[str], order: int) -> Counter:
    return Counter(tuple(tokens[i : i + order]) for i in range(len(tokens) - order + 1))


def bleu_segment_stats(hyp: Sequence[str], ref: Sequence[str]) -> BleuSegmentStats:
    """Count clipped n-gram matches of a tokenized hypothesis against its reference.

    :param hyp: hypothesis tokens
    :param ref: reference tokens
    :return: per-order clipped match and hypothesis n-gram counts
    """
    matches = []
    totals = []
    for order in range(1, BLEU_ORDERS + 1):
        hyp_ngrams = _ngram_counts(hyp, order)
        total = max(0, len(hyp) - order + 1)
        if hyp_ngrams:
            ref_ngrams = _ngram_counts(ref, order)
            match = sum((hyp_ngrams & ref_ngrams).values())
        else:
            match = 0
        matches.append(match)
        totals.append(total)
    return BleuSegmentStats(tuple(matches), tuple(totals), len(hyp), len(ref))


def bleu_from_totals(matches: Sequence[int], totals: Sequence[int],
                     hyp_length: int, ref_length: int, strict: bool = False) -> float:
    """Corpus BLEU from summed counts, on the 0-100 scale.

    Orders whose corpus-wide hypothesis n-gram count is zero are skipped by
    default (they carry no evidence; hypotheses were simply shorter than n);
    with ``strict`` they force a hard zero. A zero match count on any
    considered order gives 0, with no smoothing. The score is
    ``100 * brevity_penalty * exp(mean log precision)`` evaluated in exactly
    that order.
    """
    if hyp_length == 0:
        return 0.0
    log_precisions = []
    for match, total in zip(matches, totals):
        if total == 0:
            if strict:
                return 0.0
            continue
        if match == 0:
            return 0.0
        log_precisions.append(math.log(match / total))
    if not log_precisions:
        return 0.0
    if hyp_length >= ref_length:
        brevity_penalty = 1.0
    else:
        brevity_penalty = math.exp(1.0 - ref_length / hyp_length)
    return 100.0 * brevity_penalty * math.exp(sum(log_precisions) / len(log_precisions))


def corpus_bleu(stats: Iterable[BleuSegmentStats], strict: bool = False) -> float:
    """Corpus BLEU from per-segment statistics.

    :param stats: per-segment sufficient statistics
    :param strict: hard zero when an order has no hypothesis n-grams corpus-wide
    :return: BLEU in [0, 100]
    """
    stats = list(stats)
    if not stats:
        raise ValueError("no segments")
    matches = [sum(s.match_counts[i] for s in stats) for i in range(BLEU_ORDERS)]
    totals = [sum(s.hyp_counts[i] for s in stats) for i in range(BLEU_ORDERS)]
    hyp_length = sum(s.hyp_length for s in stats)
    ref_length = sum(s.ref_length for s in stats)
    return bleu_from_totals(matches, totals, hyp_length, ref_length, strict)


def _char_ngram_counts(text: str, order: int) -> Counter:
    return Counter(text[i : i + order] for i in range(len(text) - order + 1))


def chrf_segment_stats(hyp_text: str, ref_text: str) -> ChrfSegmentStats:
    """Character n-gram statistics over whitespace-stripped text, orders 1..6.

    :param hyp_text: raw hypothesis text
    :param ref_text: raw reference text
    :return: true-positive, hypothesis, and reference counts per order
    """
    hyp = "".join(hyp_text.split())
    ref = "".join(ref_text.split())
    tp = []
    hyp_counts = []
    ref_counts = []
    for order in range(1, CHRF_ORDERS + 1):
        hyp_ngrams = _char_ngram_counts(hyp, order)
        ref_ngrams = _char_ngram_counts(ref, order)
        tp.append(sum((hyp_ngrams & ref_ngrams).values()))
        hyp_counts.append(max(0, len(hyp) - order + 1))
        ref_counts.append(max(0, len(ref) - order + 1))
    return ChrfSegmentStats(tuple(tp), tuple(hyp_counts), tuple(ref_counts))


def chrf_from_totals(tp: Sequence[int], hyp_counts: Sequence[int],
                     ref_counts: Sequence[int], beta: float = CHRF_BETA) -> float:
    """Corpus ChrF from summed counts, on the 0-100 scale.

    Precision and recall are micro-averaged over the orders where both sides
    have n-grams (exactly rounded summation, then divided by the order
    count); the score is ``100 * (1 + beta^2) * P * R / (beta^2 * P + R)``
    evaluated in exactly that order, and 0 when P + R is 0.
    """
    precisions = []
    recalls = []
    for order in range(CHRF_ORDERS):
        if hyp_counts[order] == 0 or ref_counts[order] == 0:
            continue
        precisions.append(tp[order] / hyp_counts[order])
        recalls.append(tp[order] / ref_counts[order])
    if not precisions:
        return 0.0
    avg_precision = math.fsum(precisions) / len(precisions)
    avg_recall = math.fsum(recalls) / len(recalls)
    if avg_precision == 0.0 and avg_recall == 0.0:
        return 0.0
    return 100.0 * (1.0 + beta * beta) * avg_precision * avg_recall / (
        beta * beta * avg_precision + avg_recall
    )


def corpus_chrf(stats: Iterable[ChrfSegmentStats]) -> float:
    """Corpus ChrF from per-segment statistics.

    :param stats: per-segment sufficient statistics (uniform beta)
    :return: ChrF in [0, 100]
    """
    stats = list(stats)
    if not stats:
        raise ValueError("no segments")
    betas = {s.beta for s in stats}
    if len(betas) != 1:
        raise ValueError("mixed beta values in ChrF statistics")
    tp = [sum(s.tp_counts[i] for s in stats) for i in range(CHRF_ORDERS)]
    hyp_counts = [sum(s.hyp_counts[i] for s in stats) for i in range(CHRF_ORDERS)]
    ref_counts = [sum(s.ref_counts[i] for s in stats) for i in range(CHRF_ORDERS)]
    return chrf_from_totals(tp, hyp_counts, ref_counts, betas.pop())


def _edit_distance(hyp: Sequence[str], ref: Sequence[str]) -> int:
    prev = list(range(len(ref) + 1))
    for i, hyp_tok in enumerate(hyp, start=1):
        cur = [i] + [0] * len(ref)
        for j, ref_tok in enumerate(ref, start=1):
            cur[j] = min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (hyp_tok != ref_tok))
        prev = cur
    return prev[-1]


def _shift_candidates(hyp: list[str], ref: Sequence[str]) -> list[list[str]]:
    """All single-shift successors of a hypothesis.

    A shift moves a maximal matching run hyp[i:i+L] == ref[j:j+L] (i != j) to
    index j of the shortened hypothesis, at a cost of one edit.
    """
    candidates = []
    n, m = len(hyp), len(ref)
    for i in range(n):
        for j in range(m):
            if i == j or hyp[i] != ref[j]:
                continue
            length = 1
            while i + length < n and j + length < m and hyp[i + length] == ref[j + length]:
                length += 1
            moved = hyp[:i] + hyp[i + length :]
            moved[j:j] = hyp[i : i + length]
            candidates.append(moved)
    return candidates


def _greedy_edit_count(hyp: Sequence[str], ref: Sequence[str]) -> int:
    """Greedy shift search: repeatedly take the shift that most reduces the
    edit distance (first such candidate in scan order on ties), up to the
    shift cap, then add the residual edit distance."""
    current = list(hyp)
    distance = _edit_distance(current, ref)
    shifts = 0
    while shifts < _TER_SHIFT_CAP and distance > 0:
        best_state = None
        best_distance = distance
        for candidate in _shift_candidates(current, ref):
            cand_distance = _edit_distance(candidate, ref)
            if cand_distance < best_distance:
                best_state = candidate
                best_distance = cand_distance
        if best_state is None:
            break
        shifts += 1
        current = best_state
        distance = best_distance
    return shifts + distance


def _exact_edit_count(hyp: Sequence[str], ref: Sequence[str]) -> int:
    """Exhaustive minimum of shifts + edit distance over all shift sequences.

    Shifts permute the hypothesis without changing its token multiset, so the
    reachable state space is tiny for short segments; breadth-first search by
    shift count, stopping as soon as deeper levels cannot beat the best total.
    """
    start = tuple(hyp)
    best = _edit_distance(hyp, ref)
    seen = {start}
    frontier = [start]
    depth = 0
    while frontier and depth + 1 < best and depth + 1 <= _TER_SHIFT_CAP:
        depth += 1
        next_frontier = []
        for state in frontier:
            for candidate in _shift_candidates(list(state), ref):
                key = tuple(candidate)
                if key in seen:
                    continue
                seen.add(key)
                total = depth + _edit_distance(candidate, ref)
                if total < best:
                    best = total
                next_frontier.append(key)
        frontier = next_frontier
    return best


def ter_segment(hyp: Sequence[str], ref: Sequence[str]) -> TerSegmentStats:
    """Translation edit rate statistics for one tokenized segment.

    Short segments (combined length <= 8 tokens) are solved exactly; longer
    ones use the greedy shift search with a cap of 10 shifts.

    :param hyp: hypothesis tokens
    :param ref: reference tokens
    :return: edit count and reference length
    """
    if len(ref) == 0:
        raise ValueError("empty reference for TER")
    hyp = list(hyp)
    ref = list(ref)
    if hyp == ref:
        return TerSegmentStats(0, len(ref))
    if len(hyp) + len(ref) <= _TER_EXACT_LIMIT:
        edits = _exact_edit_count(hyp, ref)
    else:
        edits = _greedy_edit_count(hyp, ref)
    return TerSegmentStats(edits, len(ref))


def corpus_ter(stats: Iterable[TerSegmentStats]) -> float:
    """Corpus TER: total edits over total reference length (lower is better)."""
    stats = list(stats)
    if not stats:
        raise ValueError("no segments")
    edits = sum(s.edit_count for s in stats)
    ref_length = sum(s.ref_length for s in stats)
    return edits / ref_length


# Column layouts of the resampleable statistics matrices, one row per segment.
_BLEU_COLUMNS = 2 * BLEU_ORDERS + 2  # matches 1..4, totals 1..4, hyp_len, ref_len
_CHRF_COLUMNS = 3 * CHRF_ORDERS  # tp 1..6, hyp 1..6, ref 1..6
_TER_COLUMNS = 2  # edits, ref_len


@dataclass(frozen=True)
class StatsBlock:
    """Per-segment statistics for one (campaign, metric, system), as a matrix.

    ``kind`` is one of "bleu", "chrf", "ter", or "segment-scores"; built-in
    kinds hold int64 rows, segment-scores holds one float64 column of
    externally supplied per-segment scores. ``corpus_score`` recomputes the
    oriented (higher-better) corpus score under an optional resample weight
    vector, which is where bootstrap significance gets its speed.
    """

    metric_name: str
    kind: str
    matrix: np.ndarray
    strict_bleu: bool = False
    beta: float = CHRF_BETA

    @property
    def n_segments(self) -> int:
        return self.matrix.shape[0]

    def corpus_score(self, weights: np.ndarray | None = None) -> float:
        """Oriented corpus score; ``weights`` are segment multiplicities.

        TER is negated (with -0.0 normalized to 0.0) so that every kind is
        higher-better. Weighted float scores use exactly rounded summation of
        ``weight * score`` terms divided by the total weight.
        """
        if self.kind == "segment-scores":
            scores = self.matrix[:, 0]
            if weights is None:
                return math.fsum(scores.tolist()) / len(scores)
            # Elementwise weight * score products (each exactly rounded), then
            # an exactly rounded sum: independent of segment order.
            products = weights * scores
            return math.fsum(products.tolist()) / int(weights.sum())
        if weights is None:
            totals = self.matrix.sum(axis=0)
        else:
            totals = weights @ self.matrix
        return self._score_from_totals([int(v) for v in totals])

    def _score_from_totals(self, totals: list[int]) -> float:
        if self.kind == "bleu":
            return bleu_from_totals(
                totals[:BLEU_ORDERS],
                totals[BLEU_ORDERS : 2 * BLEU_ORDERS],
                totals[2 * BLEU_ORDERS],
                totals[2 * BLEU_ORDERS + 1],
                self.strict_bleu,
            )
        if self.kind == "chrf":
            return chrf_from_totals(
                totals[:CHRF_ORDERS],
                totals[CHRF_ORDERS : 2 * CHRF_ORDERS],
                totals[2 * CHRF_ORDERS :],
                self.beta,
            )
        if self.kind == "ter":
            return -(totals[0] / totals[1]) + 0.0
        raise ValueError(f"unknown stats kind {self.kind!r}")


def _bleu_block(rows: list[BleuSegmentStats], strict: bool) -> StatsBlock:
    matrix = np.array(
        [list(s.match_counts) + list(s.hyp_counts) + [s.hyp_length, s.ref_length] for s in rows],
        dtype=np.int64,
    ).reshape(len(rows), _BLEU_COLUMNS)
    return StatsBlock("bleu", "bleu", matrix, strict_bleu=strict)


def _chrf_block(rows: list[ChrfSegmentStats]) -> StatsBlock:
    matrix = np.array(
        [list(s.tp_counts) + list(s.hyp_counts) + list(s.ref_counts) for s in rows],
        dtype=np.int64,
    ).reshape(len(rows), _CHRF_COLUMNS)
    return StatsBlock("chrf", "chrf", matrix)


def _ter_block(rows: list[TerSegmentStats]) -> StatsBlock:
    matrix = np.array([[s.edit_count, s.ref_length] for s in rows], dtype=np.int64).reshape(
        len(rows), _TER_COLUMNS
    )
    return StatsBlock("ter", "ter", matrix)


def segment_scores_block(metric_name: str, scores: Sequence[float]) -> StatsBlock:
    matrix = np.array([[s] for s in scores], dtype=np.float64).reshape(len(scores), 1)
    return StatsBlock(metric_name, "segment-scores", matrix)


def score_system(campaign: Campaign, system_id: str, metric_name: str,
                 scheme: TokenizationScheme | None = None,
                 strict_bleu: bool = False) -> tuple[float, StatsBlock]:
    """Score one system with a built-in metric.

    :param campaign: the campaign holding outputs and references
    :param system_id: system to score
    :param metric_name: "bleu", "chrf", or "ter" (case-insensitive)
    :param scheme: tokenization scheme; default picks cjk-char for zh/ja targets
    :param strict_bleu: hard zero for orders without hypothesis n-grams
    :return: oriented system-level score and the per-segment statistics block
    """
    name = metric_name.lower()
    if name not in BUILTIN_METRICS:
        raise ValueError(
            f"unsupported built-in metric {metric_name!r}; scores for external metrics "
            "must be ingested from a score file"
        )
    references = campaign.references()
    if any(ref is None for ref in references):
        raise ValueError(
            f"missing references in campaign {campaign.campaign_id!r}; "
            f"cannot compute {metric_name!r}"
        )
    if scheme is None:
        scheme = scheme_for_language(campaign.language_pair[1])
    hypotheses = campaign.hypotheses(system_id)

    if name == "chrf":
        chrf_rows = [chrf_segment_stats(hyp, ref) for hyp, ref in zip(hypotheses, references)]
        block = _chrf_block(chrf_rows)
    else:
        tokenized_refs = [tokenize(ref, scheme) for ref in references]
        tokenized_hyps = [tokenize(hyp, scheme) for hyp in hypotheses]
        if name == "bleu":
            bleu_rows = [
                bleu_segment_stats(hyp, ref) for hyp, ref in zip(tokenized_hyps, tokenized_refs)
            ]
            block = _bleu_block(bleu_rows, strict_bleu)
        else:
            ter_rows = [ter_segment(hyp, ref) for hyp, ref in zip(tokenized_hyps, tokenized_refs)]
            block = _ter_block(ter_rows)
    return block.corpus_score(), block


def score_collection(collection_campaigns: Sequence[Campaign], metric_names: Sequence[str],
                     scheme: TokenizationScheme | None = None, strict_bleu: bool = False,
                     ) -> tuple[dict[tuple[str, str], MetricScoreSet],
                                dict[tuple[str, str, str], StatsBlock]]:
    """Score every system of every campaign with the given built-in metrics.

    :return: ({(campaign_id, metric) -> MetricScoreSet}, {(campaign_id, metric,
        system_id) -> StatsBlock}); score sets use canonical metric names
    """
    score_sets: dict[tuple[str, str], MetricScoreSet] = {}
    blocks: dict[tuple[str, str, str], StatsBlock] = {}
    for campaign in collection_campaigns:
        for metric_name in metric_names:
            name = metric_name.lower()
            system_scores = {}
            for system_id in campaign.system_ids:
                score, block = score_system(campaign, system_id, name, scheme, strict_bleu)
                system_scores[system_id] = score
                blocks[(campaign.campaign_id, name, system_id)] = block
            score_sets[(campaign.campaign_id, name)] = MetricScoreSet(name, "system", system_scores)
    return score_sets, blocks


def stats_for_lines(metric_name: str, hyp_lines: Sequence[str], ref_lines: Sequence[str],
                    scheme: TokenizationScheme | None = None,
                    strict_bleu: bool = False) -> StatsBlock:
    """Per-segment statistics for raw text lines, outside any collection.

    :param metric_name: "bleu", "chrf", or "ter" (case-insensitive)
    :raises ValueError: unsupported metric or mismatched line counts
    """
    name = metric_name.lower()
    if name not in BUILTIN_METRICS:
        raise ValueError(
            f"unsupported built-in metric {metric_name!r}; scores for external metrics "
            "must be ingested from a score file"
        )
    if len(hyp_lines) != len(ref_lines):
        raise ValueError(
            f"line count mismatch: {len(hyp_lines)} hypotheses vs {len(ref_lines)} references"
        )
    if not ref_lines:
        raise ValueError("no segments")
    if scheme is None:
        scheme = DEFAULT_SCHEME
    if name == "chrf":
        return _chrf_block([chrf_segment_stats(h, r) for h, r in zip(hyp_lines, ref_lines)])
    tokenized_refs = [tokenize(r, scheme) for r in ref_lines]
    tokenized_hyps = [tokenize(h, scheme) for h in hyp_lines]
    if name == "bleu":
        return _bleu_block(
            [bleu_segment_stats(h, r) for h, r in zip(tokenized_hyps, tokenized_refs)],
            strict_bleu,
        )
    return _ter_block([ter_segment(h, r) for h, r in zip(tokenized_hyps, tokenized_refs)])


def stats_lookup_for_metric(collection: Collection, metric_name: str,
                            builtin_blocks: Mapping[tuple[str, str, str], StatsBlock] | None = None,
                            ) -> dict[tuple[str, str], StatsBlock]:
    """(campaign_id, system_id) -> per-segment statistics for one metric.

    Built-in blocks (from :func:`with_builtin_scores`) are used when given;
    otherwise segment-granularity stored scores become float blocks.
    Campaigns without the metric are skipped.

    :raises ValueError: when a campaign carries the metric only at system
        level, which cannot support segment resampling
    """
    lookup: dict[tuple[str, str], StatsBlock] = {}
    for campaign in collection.campaigns:
        for system_id in campaign.system_ids:
            key = (campaign.campaign_id, metric_name, system_id)
            if builtin_blocks and key in builtin_blocks:
                lookup[(campaign.campaign_id, system_id)] = builtin_blocks[key]
                continue
            score_set = campaign.metric_set(metric_name)
            if score_set is None:
                continue
            if score_set.granularity != "segment":
                raise ValueError(
                    f"segment stats required: metric {metric_name!r} has only "
                    f"system-level scores in campaign {campaign.campaign_id!r}"
                )
            vector = score_set.segment_vector(system_id, campaign.segment_order)
            lookup[(campaign.campaign_id, system_id)] = segment_scores_block(metric_name, vector)
    return lookup


def with_builtin_scores(collection: Collection, metric_names: Sequence[str],
                        scheme: TokenizationScheme | None = None, strict_bleu: bool = False,
                        ) -> tuple[Collection, dict[tuple[str, str, str], StatsBlock]]:
    """Return a copy of the collection with built-in metric scores attached.

    Previously stored scores under the same canonical name are replaced:
    recomputation is deterministic, so the operation is idempotent.

    :return: (collection with scores, {(campaign_id, metric, system_id) -> StatsBlock})
    """
    score_sets, blocks = score_collection(collection.campaigns, metric_names, scheme, strict_bleu)
    names = {m.lower() for m in metric_names}
    campaigns = []
    for camp in collection.campaigns:
        kept = tuple(s for s in camp.metric_scores if s.metric_name not in names)
        added = tuple(score_sets[(camp.campaign_id, name)] for name in sorted(names))
        merged = tuple(sorted(kept + added, key=lambda s: s.metric_name))
        campaigns.append(
            Campaign(
                campaign_id=camp.campaign_id,
                language_pair=camp.language_pair,
                domain_tag=camp.domain_tag,
                group_tag=camp.group_tag,
                segments=camp.segments,
                outputs=camp.outputs,
                judgements=camp.judgements,
                metric_scores=merged,
            )
        )
    return Collection(tuple(campaigns), collection.alphas, dict(collection.orientations)), blocks
