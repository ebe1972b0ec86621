"""Built-in metrics: BLEU, ChrF, TER, and the per-segment statistics layer."""
from __future__ import annotations

import math
import random

import numpy as np
import pytest

from mtpairs import (
    BUILTIN_METRICS,
    CJK_CHAR_SCHEME,
    DEFAULT_SCHEME,
    corpus_bleu,
    corpus_chrf,
    corpus_ter,
    score_system,
    stats_for_lines,
    stats_lookup_for_metric,
    with_builtin_scores,
)
from mtpairs.metrics import (
    bleu_from_totals,
    bleu_segment_stats,
    chrf_from_totals,
    chrf_segment_stats,
    segment_scores_block,
    ter_segment,
)
from mtpairs.resampling import resample_counts

import oracles


class TestBleu:
    def test_identity_scores_100(self):
        stats = [bleu_segment_stats(t.split(), t.split())
                 for t in ("the dog runs fast today", "a b c d e f g")]
        assert corpus_bleu(stats) == 100.0

    def test_short_hypothesis_fixture(self):
        # all present orders are perfect; the 4-gram order carries no
        # evidence and is skipped; only the brevity penalty remains
        stats = [bleu_segment_stats("the cat sat".split(), "the cat sat down".split())]
        assert corpus_bleu(stats) == 71.65313105737893
        assert corpus_bleu(stats) == 100.0 * math.exp(1.0 - 4 / 3)

    def test_strict_mode_zeroes_missing_orders(self):
        stats = [bleu_segment_stats("the cat sat".split(), "the cat sat down".split())]
        assert corpus_bleu(stats, strict=True) == 0.0

    def test_clipping(self):
        stats = bleu_segment_stats("the the the the".split(), "the cat".split())
        assert stats.match_counts[0] == 1  # four 'the' clipped to the single ref one
        assert stats.hyp_counts[0] == 4
        assert corpus_bleu([stats]) == 0.0  # no 2-gram match forces zero

    def test_empty_hypothesis_scores_zero(self):
        assert bleu_from_totals([0, 0, 0, 0], [0, 0, 0, 0], 0, 5) == 0.0

    def test_no_evidence_at_any_order_scores_zero(self):
        assert bleu_from_totals([0, 0, 0, 0], [0, 0, 0, 0], 3, 0) == 0.0

    def test_brevity_penalty_only_below_reference_length(self):
        full = bleu_from_totals([4, 3, 2, 1], [4, 3, 2, 1], 4, 4)
        longer = bleu_from_totals([4, 3, 2, 1], [5, 4, 3, 2], 5, 4)
        assert full == 100.0
        assert longer < 100.0  # precision drops, but no brevity penalty
        short = bleu_from_totals([4, 3, 2, 1], [4, 3, 2, 1], 4, 8)
        assert short == 100.0 * math.exp(1.0 - 8 / 4)

    def test_matches_oracle_on_random_corpora(self):
        rng = random.Random(42)
        vocab = ["a", "b", "c", "d"]
        for _ in range(300):
            pairs = []
            for _ in range(rng.randint(1, 5)):
                hyp = [rng.choice(vocab) for _ in range(rng.randint(0, 8))]
                ref = [rng.choice(vocab) for _ in range(rng.randint(1, 8))]
                pairs.append((hyp, ref))
            matches, totals, hyp_len, ref_len = oracles.bleu_totals_oracle(pairs)
            expected = oracles.bleu_score_oracle(matches, totals, hyp_len, ref_len)
            got = corpus_bleu([bleu_segment_stats(h, r) for h, r in pairs])
            assert got == expected


class TestChrf:
    def test_identity_scores_100(self):
        stats = [chrf_segment_stats("the dog runs", "the dog runs")]
        assert corpus_chrf(stats) == 100.0

    def test_whitespace_is_ignored(self):
        a = chrf_segment_stats("thedogruns", "the dog runs")
        assert corpus_chrf([a]) == 100.0

    def test_small_fixture(self):
        stats = chrf_segment_stats("hello there", "hello here")
        assert stats.tp_counts == (9, 7, 5, 3, 1, 0)
        assert stats.hyp_counts == (10, 9, 8, 7, 6, 5)
        assert stats.ref_counts == (9, 8, 7, 6, 5, 4)
        assert corpus_chrf([stats]) == 53.38002891351467

    def test_disjoint_strings_score_zero(self):
        assert corpus_chrf([chrf_segment_stats("aaaa", "bbbb")]) == 0.0

    def test_degenerate_totals(self):
        assert chrf_from_totals([0] * 6, [0] * 6, [0] * 6) == 0.0

    def test_matches_oracle_on_random_corpora(self):
        rng = random.Random(43)
        alphabet = "abcd "
        for _ in range(300):
            pairs = []
            for _ in range(rng.randint(1, 5)):
                hyp = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 12)))
                ref = "".join(rng.choice(alphabet) for _ in range(rng.randint(1, 12)))
                pairs.append((hyp, ref))
            tp, hyp_counts, ref_counts = oracles.chrf_totals_oracle(pairs)
            expected = oracles.chrf_score_oracle(tp, hyp_counts, ref_counts)
            got = corpus_chrf([chrf_segment_stats(h, r) for h, r in pairs])
            assert got == expected


class TestTer:
    def test_identity_needs_no_edits(self):
        stats = ter_segment("a b c".split(), "a b c".split())
        assert stats.edit_count == 0
        assert stats.ref_length == 3

    def test_adjacent_swap_is_one_shift(self):
        assert ter_segment(["b", "a"], ["a", "b"]).edit_count == 1

    def test_shift_beats_triple_substitution(self):
        assert ter_segment(["b", "c", "b", "a"], ["a", "b", "b", "c"]).edit_count == 2

    def test_pure_edits_without_shifts(self):
        assert ter_segment([], ["a"]).edit_count == 1
        assert ter_segment(["x"], ["a"]).edit_count == 1
        assert ter_segment(["a", "x"], ["a"]).edit_count == 1

    def test_empty_reference_rejected(self):
        with pytest.raises(ValueError):
            ter_segment(["a"], [])

    def test_corpus_ter_is_edits_over_reference_length(self):
        stats = [ter_segment(["b", "a"], ["a", "b"]), ter_segment(["a"], ["a", "b"])]
        assert corpus_ter(stats) == (1 + 1) / (2 + 2)
        with pytest.raises(ValueError):
            corpus_ter([])

    def test_matches_exhaustive_search_on_short_segments(self):
        rng = random.Random(44)
        vocab = ["a", "b", "c"]
        for _ in range(1500):
            ref_len = rng.randint(1, 6)
            hyp_len = rng.randint(0, 8 - ref_len)
            hyp = [rng.choice(vocab) for _ in range(hyp_len)]
            ref = [rng.choice(vocab) for _ in range(ref_len)]
            assert ter_segment(hyp, ref).edit_count == oracles.ter_edits_oracle(hyp, ref)


class TestStatsBlocks:
    def _pairs(self, rng, n):
        vocab = ["a", "b", "c", "d", "e"]
        pairs = []
        for _ in range(n):
            hyp = [rng.choice(vocab) for _ in range(rng.randint(1, 7))]
            ref = [rng.choice(vocab) for _ in range(rng.randint(1, 7))]
            pairs.append((hyp, ref))
        return pairs

    def test_bleu_block_unweighted_equals_direct(self):
        rng = random.Random(45)
        pairs = self._pairs(rng, 12)
        hyp_lines = [" ".join(h) for h, _ in pairs]
        ref_lines = [" ".join(r) for _, r in pairs]
        block = stats_for_lines("bleu", hyp_lines, ref_lines)
        direct = corpus_bleu([bleu_segment_stats(h, r) for h, r in pairs])
        assert block.corpus_score() == direct

    def test_weighted_int_blocks_match_oracle(self):
        rng = random.Random(46)
        pairs = self._pairs(rng, 10)
        hyp_lines = [" ".join(h) for h, _ in pairs]
        ref_lines = [" ".join(r) for _, r in pairs]
        for metric in BUILTIN_METRICS:
            block = stats_for_lines(metric, hyp_lines, ref_lines)
            rows = [tuple(int(v) for v in row) for row in block.matrix]
            for index in range(5):
                weights = resample_counts(7, index, len(pairs))
                indices = oracles.resample_indices_oracle(7, index, len(pairs))
                expected = oracles.resampled_score_oracle(metric, rows, indices)
                assert block.corpus_score(weights) == expected

    def test_weighted_segment_scores_match_oracle(self):
        scores = [1.25, -0.5, 3.75, 2.0, 0.25]
        block = segment_scores_block("qe", scores)
        assert block.corpus_score() == math.fsum(scores) / len(scores)
        for index in range(5):
            weights = resample_counts(11, index, len(scores))
            indices = oracles.resample_indices_oracle(11, index, len(scores))
            expected = oracles.resampled_score_oracle("segment-scores", scores, indices)
            assert block.corpus_score(weights) == expected

    def test_stats_for_lines_validates(self):
        with pytest.raises(ValueError):
            stats_for_lines("rouge", ["a"], ["a"])
        with pytest.raises(ValueError):
            stats_for_lines("bleu", ["a", "b"], ["a"])


class TestCollectionScoring:
    def test_perfect_system_gets_perfect_scores(self, demo_collection):
        # en-zh system "alpha" outputs the references verbatim
        scored, blocks = with_builtin_scores(demo_collection, BUILTIN_METRICS)
        campaign = scored.campaign("demo-en-zh")
        assert campaign.metric_set("bleu").system_level()["alpha"] == 100.0
        assert campaign.metric_set("chrf").system_level()["alpha"] == 100.0
        # ter is oriented: higher is better, perfect is zero
        assert campaign.metric_set("ter").system_level()["alpha"] == 0.0
        assert ("demo-en-zh", "bleu", "alpha") in blocks

    def test_attachment_is_idempotent(self, demo_collection):
        once, _ = with_builtin_scores(demo_collection, ["bleu"])
        twice, _ = with_builtin_scores(once, ["bleu"])
        a = once.campaign("demo-de-en").metric_set("bleu").system_level()
        b = twice.campaign("demo-de-en").metric_set("bleu").system_level()
        assert a == b

    def test_cjk_campaign_uses_character_tokens(self, demo_collection):
        campaign = demo_collection.campaign("demo-en-zh")
        auto_score, _ = score_system(campaign, "bravo", "bleu")
        forced_default, _ = score_system(campaign, "bravo", "bleu", scheme=DEFAULT_SCHEME)
        forced_cjk, _ = score_system(campaign, "bravo", "bleu", scheme=CJK_CHAR_SCHEME)
        assert auto_score == forced_cjk
        assert auto_score != forced_default

    def test_missing_reference_rejected_for_builtins(self):
        from helpers import tiny_builder

        builder = tiny_builder()
        builder.add_campaign("noref", "de", "en")
        builder.add_segment("noref", "u1", "quelle")
        builder.add_output("noref", "a", "u1", "x")
        builder.add_output("noref", "b", "u1", "y")
        collection = builder.build()
        with pytest.raises(ValueError):
            with_builtin_scores(collection, ["bleu"])

    def test_stats_lookup_for_stored_segment_scores(self, demo_collection):
        lookup = stats_lookup_for_metric(demo_collection, "demoqe")
        block = lookup[("demo-de-en", "alpha")]
        assert block.kind == "segment-scores"
        assert [row[0] for row in block.matrix.tolist()] == [0.92, 0.94, 0.95, 0.65]

    def test_stats_lookup_skips_campaigns_without_the_metric(self, demo_collection):
        assert stats_lookup_for_metric(demo_collection, "absent-metric") == {}

    def test_stats_lookup_rejects_system_only_scores(self):
        from helpers import tiny_builder

        builder = tiny_builder()
        for system, score in (("alpha", 1.0), ("bravo", 2.0), ("charlie", 3.0)):
            builder.add_system_score("demo-de-en", "sysmetric", system, score)
        collection = builder.build()
        with pytest.raises(ValueError) as excinfo:
            stats_lookup_for_metric(collection, "sysmetric")
        assert "segment stats required" in str(excinfo.value)


class TestCachedStatsEquivalence:
    def test_cached_blocks_equal_direct_recomputation(self, demo_collection):
        scored, blocks = with_builtin_scores(demo_collection, BUILTIN_METRICS)
        for campaign in scored.campaigns:
            refs = [seg.reference_text for seg in campaign.segments]
            for metric in BUILTIN_METRICS:
                stored = campaign.metric_set(metric).system_level()
                for system_id in campaign.system_ids:
                    hyps = campaign.hypotheses(system_id)
                    direct = stats_for_lines(
                        metric, hyps, refs,
                        scheme=None if campaign.language_pair[1] != "zh" else CJK_CHAR_SCHEME,
                    )
                    cached = blocks[(campaign.campaign_id, metric, system_id)]
                    assert np.array_equal(cached.matrix, direct.matrix)
                    assert stored[system_id] == direct.corpus_score()
