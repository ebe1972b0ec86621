"""Weighted aggregation of per-group correlations and its TSV reader."""
from __future__ import annotations

import math
import random

import pytest

from mtpairs import CorrelationObservation, hunter_schmidt, read_correlations_tsv

import oracles


class TestObservation:
    def test_bounds(self):
        CorrelationObservation("edge", 1.0, 2)
        CorrelationObservation("edge", -1.0, 2)
        with pytest.raises(ValueError, match=r"outside \[-1, 1\]"):
            CorrelationObservation("hi", 1.0001, 5)
        with pytest.raises(ValueError, match="need at least 2"):
            CorrelationObservation("solo", 0.5, 1)


class TestAggregate:
    def test_worked_example(self):
        r, n = hunter_schmidt([CorrelationObservation("a", 0.8, 10),
                               CorrelationObservation("b", 0.6, 30)])
        assert (r, n) == (0.65, 40)

    def test_single_group_is_identity(self):
        assert hunter_schmidt([CorrelationObservation("only", 0.432, 17)]) == (0.432, 17)

    def test_empty_input(self):
        with pytest.raises(ValueError, match="no correlation observations"):
            hunter_schmidt([])

    def test_result_is_a_weighted_mean(self):
        rng = random.Random(4242)
        for _ in range(200):
            obs = [CorrelationObservation(f"g{i}",
                                          rng.randrange(-1024, 1025) / 1024,
                                          rng.randrange(2, 50))
                   for i in range(rng.randrange(1, 8))]
            r, n = hunter_schmidt(obs)
            assert n == sum(o.n for o in obs)
            assert r == math.fsum(o.n * o.r for o in obs) / n
            assert -1.0 <= r <= 1.0

    def test_split_invariance(self):
        # splitting one group into two halves with the same r leaves the
        # aggregate unchanged (dyadic r keeps every term exact)
        whole = [CorrelationObservation("a", 768 / 1024, 20),
                 CorrelationObservation("b", -256 / 1024, 12)]
        split = [CorrelationObservation("a1", 768 / 1024, 10),
                 CorrelationObservation("a2", 768 / 1024, 10),
                 CorrelationObservation("b", -256 / 1024, 12)]
        assert hunter_schmidt(whole) == hunter_schmidt(split)

    def test_permutation_invariance(self):
        obs = [CorrelationObservation("a", 0.25, 4),
               CorrelationObservation("b", -0.5, 9),
               CorrelationObservation("c", 0.75, 6)]
        assert hunter_schmidt(obs) == hunter_schmidt(list(reversed(obs)))

    def test_agrees_with_mean_oracle_when_weights_equal(self):
        values = [0.25, 0.5, -0.125, 0.875]
        obs = [CorrelationObservation(f"g{i}", v, 7) for i, v in enumerate(values)]
        r, n = hunter_schmidt(obs)
        assert n == 28
        assert r == oracles.mean_of(values)


class TestReader:
    def _write(self, tmp_path, text):
        path = tmp_path / "corr.tsv"
        path.write_text(text, encoding="utf-8")
        return path

    def test_plain_rows(self, tmp_path):
        path = self._write(tmp_path, "de-en\t0.8\t10\nen-zh\t-0.25\t6\n")
        obs = read_correlations_tsv(path)
        assert obs == [CorrelationObservation("de-en", 0.8, 10),
                       CorrelationObservation("en-zh", -0.25, 6)]

    def test_header_comments_and_blanks_are_skipped(self, tmp_path):
        path = self._write(tmp_path,
                           "# produced upstream\n"
                           "group\tr\tn\n"
                           "\n"
                           "de-en\t0.8\t10\n"
                           "   \n"
                           "en-zh\t0.5\t4\n")
        obs = read_correlations_tsv(path)
        assert [o.group_label for o in obs] == ["de-en", "en-zh"]

    def test_wrong_column_count(self, tmp_path):
        path = self._write(tmp_path, "de-en\t0.8\n")
        with pytest.raises(ValueError, match="line 1: expected 3 tab-separated columns, got 2"):
            read_correlations_tsv(path)

    def test_bad_r_after_data_started(self, tmp_path):
        path = self._write(tmp_path, "de-en\t0.8\t10\nen-zh\toops\t6\n")
        with pytest.raises(ValueError, match="line 2: bad correlation value 'oops'"):
            read_correlations_tsv(path)

    def test_bad_n(self, tmp_path):
        path = self._write(tmp_path, "de-en\t0.8\tmany\n")
        with pytest.raises(ValueError, match="line 1: bad group size 'many'"):
            read_correlations_tsv(path)

    def test_out_of_range_r_propagates(self, tmp_path):
        path = self._write(tmp_path, "de-en\t1.5\t10\n")
        with pytest.raises(ValueError, match=r"outside \[-1, 1\]"):
            read_correlations_tsv(path)

    def test_round_trip_into_aggregate(self, tmp_path):
        path = self._write(tmp_path, "group\tr\tn\na\t0.8\t10\nb\t0.6\t30\n")
        assert hunter_schmidt(read_correlations_tsv(path)) == (0.65, 40)
