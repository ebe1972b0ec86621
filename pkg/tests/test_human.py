"""Human score aggregation and the paired signed-rank test."""
from __future__ import annotations

import itertools
import math
import random

import pytest

from mtpairs import (
    CollectionBuilder,
    SystemPair,
    human_system_score,
    in_within_band,
    paired_differences,
    significance_band,
    wilcoxon_signed_rank,
)

import oracles


def judged_campaign(judgements):
    """Build a one-campaign collection from (annotator, system, segment, score) rows."""
    builder = CollectionBuilder()
    builder.add_campaign("c1", "de", "en")
    segments = sorted({row[2] for row in judgements})
    systems = sorted({row[1] for row in judgements})
    for segment_id in segments:
        builder.add_segment("c1", segment_id, f"src {segment_id}")
    for system_id in systems:
        for segment_id in segments:
            builder.add_output("c1", system_id, segment_id, "text")
    for annotator, system, segment, score in judgements:
        builder.add_judgement("c1", annotator, system, segment, score)
    return builder.build().campaign("c1")


class TestSystemScore:
    def test_mean_over_all_judgements(self, demo_collection):
        campaign = demo_collection.campaign("demo-de-en")
        result = human_system_score(campaign, "alpha")
        assert result.mean_score == 705 / 8
        assert result.n_judgements == 8

    def test_no_judgements_is_an_error(self, demo_collection):
        campaign = demo_collection.campaign("demo-de-en")
        with pytest.raises(ValueError):
            human_system_score(campaign, "nonexistent")


class TestPairedDifferences:
    def test_annotator_matching(self):
        campaign = judged_campaign([
            ("a1", "sysa", "s1", 80), ("a1", "sysb", "s1", 70),
            ("a2", "sysa", "s1", 60), ("a2", "sysb", "s1", 65),
            ("a1", "sysa", "s2", 90), ("a1", "sysb", "s2", 85),
        ])
        result = paired_differences(campaign, SystemPair("c1", "sysa", "sysb"))
        assert result.matching == "annotator"
        # shared units sorted by (segment, annotator)
        assert result.diffs == (10.0, -5.0, 5.0)
        assert result.n_dropped == 0

    def test_duplicate_judgements_are_averaged(self):
        campaign = judged_campaign([
            ("a1", "sysa", "s1", 80), ("a1", "sysa", "s1", 90),
            ("a1", "sysb", "s1", 70),
        ])
        result = paired_differences(campaign, SystemPair("c1", "sysa", "sysb"))
        assert result.diffs == (15.0,)

    def test_unmatched_judgements_are_counted(self):
        campaign = judged_campaign([
            ("a1", "sysa", "s1", 80), ("a1", "sysb", "s1", 70),
            ("a2", "sysa", "s2", 60),  # a2 never judged sysb
        ])
        result = paired_differences(campaign, SystemPair("c1", "sysa", "sysb"))
        assert result.diffs == (10.0,)
        assert result.n_dropped == 1

    def test_auto_falls_back_to_segment_matching(self):
        campaign = judged_campaign([
            ("a1", "sysa", "s1", 80), ("a2", "sysb", "s1", 70),
            ("a1", "sysa", "s2", 60), ("a2", "sysb", "s2", 70),
        ])
        result = paired_differences(campaign, SystemPair("c1", "sysa", "sysb"))
        assert result.matching == "segment"
        assert result.diffs == (10.0, -10.0)

    def test_annotator_mode_refuses_fallback(self):
        campaign = judged_campaign([
            ("a1", "sysa", "s1", 80), ("a2", "sysb", "s1", 70),
        ])
        with pytest.raises(ValueError) as excinfo:
            paired_differences(campaign, SystemPair("c1", "sysa", "sysb"), "annotator")
        assert "no matched units" in str(excinfo.value)

    def test_segment_matching_averages_per_segment(self):
        campaign = judged_campaign([
            ("a1", "sysa", "s1", 80), ("a2", "sysa", "s1", 90),
            ("a3", "sysb", "s1", 70),
        ])
        result = paired_differences(campaign, SystemPair("c1", "sysa", "sysb"), "segment")
        assert result.diffs == (15.0,)

    def test_unknown_mode_rejected(self, demo_collection):
        campaign = demo_collection.campaign("demo-de-en")
        with pytest.raises(ValueError):
            paired_differences(campaign, SystemPair("demo-de-en", "alpha", "bravo"), "magic")


class TestWilcoxon:
    def test_textbook_case_is_exact(self):
        outcome = wilcoxon_signed_rank([1.0, 2.0, 3.0, 4.0, 5.0])
        assert outcome.p_value == 0.0625
        assert outcome.n_zeros == 0
        assert "exact (n=5" in outcome.method_note

    def test_statistic_is_positive_rank_sum(self):
        # ranks of |diffs| 1..5; positive diffs at magnitudes 2 and 4
        outcome = wilcoxon_signed_rank([-1.0, 2.0, -3.0, 4.0, -5.0])
        assert outcome.statistic == 2.0 + 4.0

    def test_zeros_are_discarded_and_reported(self):
        with_zeros = wilcoxon_signed_rank([0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 0.0])
        assert with_zeros.n_zeros == 2
        assert with_zeros.p_value == 0.0625

    def test_all_zero_is_degenerate_not_an_error(self):
        outcome = wilcoxon_signed_rank([0.0, 0.0, 0.0])
        assert outcome.p_value == 1.0
        assert outcome.statistic == 0.0
        assert "degenerate" in outcome.method_note
        assert not any(outcome.decisions.values())

    def test_empty_input_is_degenerate(self):
        assert wilcoxon_signed_rank([]).p_value == 1.0

    def test_symmetric_diffs_give_p_one(self):
        outcome = wilcoxon_signed_rank([-3.0, 3.0, -1.0, 1.0])
        assert outcome.p_value == 1.0

    def test_swapping_signs_keeps_two_sided_p(self):
        rng = random.Random(7)
        for _ in range(50):
            diffs = [rng.choice([-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0])
                     for _ in range(rng.randint(1, 20))]
            a = wilcoxon_signed_rank(diffs)
            b = wilcoxon_signed_rank([-d for d in diffs])
            assert a.p_value == b.p_value

    def test_decisions_follow_alphas(self):
        outcome = wilcoxon_signed_rank([1.0, 2.0, 3.0, 4.0, 5.0, 6.0],
                                       alphas=(0.05, 0.01))
        assert outcome.p_value == 0.03125
        assert outcome.decisions == {0.05: True, 0.01: False}

    def test_exact_matches_full_enumeration(self):
        # every sign pattern over tied and untied magnitudes, n = 3..7
        magnitudes = [1.0, 2.0, 2.0, 3.5, 4.0, 4.0, 4.0]
        for n in range(3, 8):
            for signs in itertools.product((-1.0, 1.0), repeat=n):
                diffs = [s * m for s, m in zip(signs, magnitudes)]
                got = wilcoxon_signed_rank(diffs)
                assert got.p_value == oracles.wilcoxon_exact_enumeration(diffs)

    def test_exact_limit_override_switches_paths(self):
        rng = random.Random(11)
        diffs = [rng.choice([-3.0, -2.0, -1.5, 1.0, 2.0, 2.5, 4.0])
                 for _ in range(30)]
        forced_exact = wilcoxon_signed_rank(diffs, exact_limit=30)
        default = wilcoxon_signed_rank(diffs)
        assert "exact" in forced_exact.method_note
        assert "asymptotic" in default.method_note
        # the approximation is close to the exact answer at n = 30
        assert default.p_value == pytest.approx(forced_exact.p_value, abs=0.01)

    def test_asymptotic_matches_oracle_expression(self):
        rng = random.Random(13)
        for _ in range(30):
            diffs = [rng.choice([-4.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 4.0])
                     for _ in range(rng.randint(26, 60))]
            got = wilcoxon_signed_rank(diffs)
            assert got.p_value == oracles.wilcoxon_p_oracle(diffs)

    def test_dp_range_matches_oracle(self):
        rng = random.Random(17)
        for _ in range(30):
            diffs = [rng.choice([-4.0, -2.0, -1.0, 1.0, 2.0, 4.0])
                     for _ in range(rng.randint(15, 25))]
            got = wilcoxon_signed_rank(diffs)
            assert got.p_value == oracles.wilcoxon_p_oracle(diffs)


class TestBands:
    def test_strictest_passing_alpha(self):
        assert significance_band(0.0005) == "0.001"
        assert significance_band(0.004) == "0.01"
        assert significance_band(0.04) == "0.05"
        assert significance_band(0.2) == "ns"

    def test_boundaries_are_inclusive(self):
        assert significance_band(0.05) == "0.05"
        assert significance_band(0.01) == "0.01"
        assert significance_band(0.001) == "0.001"

    def test_band_label_uses_compact_formatting(self):
        assert significance_band(0.0005, alphas=(0.05, 0.001)) == "0.001"
        assert significance_band(0.04, alphas=(0.25,)) == "0.25"

    def test_out_of_range_p_rejected(self):
        with pytest.raises(ValueError):
            significance_band(1.5)
        with pytest.raises(ValueError):
            significance_band(-0.1)

    def test_within_band_is_half_open(self):
        assert in_within_band(0.05)
        assert in_within_band(0.01)
        assert not in_within_band(0.001)  # the lower edge is excluded
        assert not in_within_band(0.0005)
        assert not in_within_band(0.6)
        assert in_within_band(0.15, band=(0.1, 0.2))
