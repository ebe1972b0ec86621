"""One-shot analysis pipeline: every table the library can produce, written
as a reproducible report bundle.

The bundle directory holds markdown and TSV renderings of each analysis,
a ``scores.tsv`` of system-level metric scores, and a ``manifest.json``
recording provenance plus any notices (skipped analyses and why). Given
equal manifests, two runs write byte-identical bundles.

Collections without human judgements degrade gracefully: accuracy,
cluster, quadrant, and correlation analyses are replaced by per-pair
metric significance tests, with an explicit notice.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Sequence

from .data import Collection, enumerate_pairs
from .human import significance_band
from .metrics import (
    BUILTIN_METRICS,
    StatsBlock,
    stats_lookup_for_metric,
    with_builtin_scores,
)
from .pairwise import (
    accuracy_table,
    accuracy_table_for_specs,
    build_delta_records,
    delta_correlations,
)
from .report import (
    RunManifest,
    render_accuracy_table,
    render_correlation_table,
    render_quadrant_table,
    render_rows,
)
from .resampling import (
    ClusterReport,
    ResampleConfig,
    bootstrap_accuracy_clusters,
    paired_bootstrap_metric_test,
    quadrant_analysis,
)
from .subsets import SubsetSpec
from .tokenization import TokenizationScheme

__all__ = ["PipelineStageError", "run_pipeline"]


class PipelineStageError(RuntimeError):
    """An analysis stage failed; carries the stage name and original error."""

    def __init__(self, stage: str, original: Exception):
        super().__init__(f"stage {stage!r}: {original}")
        self.stage = stage
        self.original = original


def _write(path: Path, text: str) -> None:
    path.write_text(text, encoding="utf-8")


def _score_rows(collection: Collection) -> list[list[str]]:
    rows = []
    for campaign in collection.campaigns:
        for score_set in campaign.metric_scores:
            levels = score_set.system_level()
            for system_id in sorted(levels):
                rows.append(
                    [campaign.campaign_id, score_set.metric_name, system_id,
                     repr(levels[system_id])]
                )
    return rows


def _column_clusters(records, metrics, table, cfg) -> dict[str, ClusterReport]:
    clusters = {}
    for label, spec, size in zip(table.column_labels, table.column_specs, table.column_sizes):
        if size == 0:
            continue
        clusters[label] = bootstrap_accuracy_clusters(records, metrics, spec, cfg)
    return clusters


def run_pipeline(collection: Collection, out_dir, manifest: RunManifest, *,
                 metrics: Sequence[str] | None = None, matching: str = "auto",
                 cluster_resamples: int = 10000, sigtest_resamples: int = 1000,
                 seed: int = 12345, confidence: float = 0.95, alpha: float = 0.05,
                 human_alpha: float | None = None, scheme: TokenizationScheme | None = None,
                 strict_bleu: bool = False, intersect: bool = False,
                 precision: int = 1) -> list[str]:
    """Run every analysis over a collection and write the report bundle.

    :param manifest: provenance block embedded in each written table
    :param metrics: metric names to analyze (default: built-ins plus every
        stored metric)
    :return: notices about skipped or degraded analyses
    :raises PipelineStageError: wrapping the first stage failure
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    notices: list[str] = []
    alphas = collection.alphas
    if human_alpha is None:
        human_alpha = alpha

    # --- stage: score -----------------------------------------------------
    stage = "score"
    try:
        if metrics is None:
            requested = list(BUILTIN_METRICS) + [
                m for m in collection.metric_names() if m.lower() not in BUILTIN_METRICS
            ]
        else:
            requested = [m.lower() if m.lower() in BUILTIN_METRICS else m for m in metrics]
        builtin_requested = [m for m in requested if m in BUILTIN_METRICS]
        blocks: dict[tuple[str, str, str], StatsBlock] = {}
        if builtin_requested:
            references_ok = all(
                all(ref is not None for ref in campaign.references())
                for campaign in collection.campaigns
            )
            if references_ok:
                collection, blocks = with_builtin_scores(
                    collection, builtin_requested, scheme, strict_bleu
                )
            else:
                notices.append(
                    "some segments have no reference; built-in metrics skipped"
                )
                requested = [m for m in requested if m not in BUILTIN_METRICS]
        missing = [m for m in requested if m not in collection.metric_names()]
        if missing:
            notices.append("metrics absent from the collection skipped: " + ", ".join(missing))
            requested = [m for m in requested if m not in missing]
        if not requested:
            raise ValueError("no usable metrics")
        _write(
            out / "scores.tsv",
            render_rows(
                ["campaign_id", "metric", "system_id", "score"],
                _score_rows(collection),
                "tsv",
                manifest=manifest,
            ),
        )
    except Exception as exc:
        raise PipelineStageError(stage, exc) from exc

    sig_cfg = ResampleConfig(
        n_resamples=sigtest_resamples, seed=seed, confidence=confidence, alpha=alpha
    )

    if not collection.has_judgements():
        # --- degraded mode: per-pair metric significance only -------------
        stage = "significance-tests"
        try:
            notices.append(
                "collection has no human judgements; accuracy analyses skipped, "
                "emitting metric significance tests only"
            )
            rows = []
            for metric in requested:
                try:
                    lookup = stats_lookup_for_metric(collection, metric, blocks)
                except ValueError as exc:
                    notices.append(f"significance tests skipped for {metric!r}: {exc}")
                    continue
                for campaign in collection.campaigns:
                    if campaign.metric_set(metric) is None:
                        continue
                    for pair in enumerate_pairs(campaign):
                        outcome = paired_bootstrap_metric_test(
                            lookup[(campaign.campaign_id, pair.system_a)],
                            lookup[(campaign.campaign_id, pair.system_b)],
                            sig_cfg,
                        )
                        rows.append(
                            [campaign.campaign_id, metric, pair.system_a, pair.system_b,
                             f"{outcome.statistic:+.4f}", f"{outcome.p_value:.3f}",
                             "yes" if outcome.p_value <= alpha else "no"]
                        )
            for style, suffix in (("markdown", "md"), ("tsv", "tsv")):
                _write(
                    out / f"significance_tests.{suffix}",
                    render_rows(
                        ["campaign_id", "metric", "system_a", "system_b", "delta", "p",
                         f"significant at {alpha:g}"],
                        rows, style, manifest=manifest,
                    ),
                )
        except PipelineStageError:
            raise
        except Exception as exc:
            raise PipelineStageError(stage, exc) from exc
        _write_manifest(out, manifest, notices)
        return notices

    # --- stage: human-test ------------------------------------------------
    stage = "human-test"
    try:
        records = build_delta_records(collection, requested, matching)
        human_rows = [
            [r.pair.campaign_id, r.pair.system_a, r.pair.system_b,
             f"{r.human_delta:+.4f}", f"{r.human_p:.3f}", significance_band(r.human_p, alphas)]
            for r in records
        ]
        _write(
            out / "human_tests.tsv",
            render_rows(
                ["campaign_id", "system_a", "system_b", "human_delta", "p", "band"],
                human_rows, "tsv", manifest=manifest,
            ),
        )
    except Exception as exc:
        raise PipelineStageError(stage, exc) from exc

    cluster_cfg = ResampleConfig(
        n_resamples=cluster_resamples, seed=seed, confidence=confidence, alpha=alpha
    )

    # --- stage: accuracy tables --------------------------------------------
    stage = "accuracy"
    try:
        table = accuracy_table(records, requested, alphas, intersect)
        clusters = _column_clusters(records, requested, table, cluster_cfg)
        for style, suffix in (("markdown", "md"), ("tsv", "tsv")):
            _write(
                out / f"accuracy_by_significance.{suffix}",
                render_accuracy_table(table, clusters, style, precision, manifest),
            )

        directions = sorted({r.direction for r in records})
        labeled = [("All", SubsetSpec())] + [
            (d, SubsetSpec(direction=d)) for d in directions
        ]
        direction_table = accuracy_table_for_specs(records, requested, labeled, intersect)
        direction_clusters = _column_clusters(records, requested, direction_table, cluster_cfg)
        for style, suffix in (("markdown", "md"), ("tsv", "tsv")):
            _write(
                out / f"accuracy_by_direction.{suffix}",
                render_accuracy_table(
                    direction_table, direction_clusters, style, precision, manifest
                ),
            )

        groups = sorted({r.group for r in records})
        if len(groups) > 1:
            labeled = [("All", SubsetSpec())] + [(g, SubsetSpec(group=g)) for g in groups]
            group_table = accuracy_table_for_specs(records, requested, labeled, intersect)
            group_clusters = _column_clusters(records, requested, group_table, cluster_cfg)
            for style, suffix in (("markdown", "md"), ("tsv", "tsv")):
                _write(
                    out / f"accuracy_by_group.{suffix}",
                    render_accuracy_table(
                        group_table, group_clusters, style, precision, manifest
                    ),
                )
        else:
            notices.append("single group tag; accuracy-by-group table skipped")
    except Exception as exc:
        raise PipelineStageError(stage, exc) from exc

    # --- stage: significance filtering (quadrants) -------------------------
    stage = "significance-filtering"
    try:
        reports = []
        for metric in requested:
            try:
                lookup = stats_lookup_for_metric(collection, metric, blocks)
                reports.append(
                    quadrant_analysis(records, metric, lookup, human_alpha, sig_cfg)
                )
            except ValueError as exc:
                notices.append(f"quadrant analysis skipped for {metric!r}: {exc}")
        if reports:
            for style, suffix in (("markdown", "md"), ("tsv", "tsv")):
                _write(
                    out / f"significance_filtering.{suffix}",
                    render_quadrant_table(reports, style, precision, manifest),
                )
        else:
            notices.append("no metric had segment statistics; quadrant table skipped")
    except Exception as exc:
        raise PipelineStageError(stage, exc) from exc

    # --- stage: correlations ------------------------------------------------
    stage = "correlations"
    try:
        correlation_rows = []
        for metric in requested:
            try:
                pearson_r, spearman_r = delta_correlations(records, metric)
            except ValueError as exc:
                notices.append(f"delta correlations skipped for {metric!r}: {exc}")
                continue
            n = sum(1 for r in records if metric in r.metric_deltas)
            correlation_rows.append((metric, pearson_r, spearman_r, n))
        if correlation_rows:
            correlation_rows.sort(key=lambda row: (-row[2], row[0]))
            for style, suffix in (("markdown", "md"), ("tsv", "tsv")):
                _write(
                    out / f"delta_correlations.{suffix}",
                    render_correlation_table(correlation_rows, style, manifest=manifest),
                )
        else:
            notices.append("no metric had enough pairs for delta correlations")
    except Exception as exc:
        raise PipelineStageError(stage, exc) from exc

    _write_manifest(out, manifest, notices)
    return notices


def _write_manifest(out: Path, manifest: RunManifest, notices: Sequence[str]) -> None:
    payload = {
        "tool_version": manifest.tool_version,
        "collection_sha256": manifest.collection_hash,
        "seed": manifest.seed,
        "alphas": list(manifest.alphas),
        "resample_counts": dict(manifest.resample_counts),
        "command_line": manifest.command_line,
        "timestamp": manifest.timestamp,
        "notices": list(notices),
    }
    _write(out / "manifest.json", json.dumps(payload, indent=2, sort_keys=True) + "\n")
