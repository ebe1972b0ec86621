"""Table rendering for all analyses, in markdown and TSV.

Accuracy cells are percentages with one decimal place and p-values get
three, both configurable. Tie annotations always come from a cluster
report, never recomputed here: markdown bolds the best metric and marks
tied metrics with a dagger; TSV uses a ``*`` suffix (plain text has no
shading). Every rendering can embed a run manifest as comment lines so a
report file identifies the data, seed, and command that produced it.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .pairwise import AccuracyTable
from .resampling import ClusterReport, QuadrantReport

__all__ = [
    "RunManifest",
    "render_accuracy_table",
    "render_quadrant_table",
    "render_correlation_table",
    "render_rows",
]

_STYLES = ("markdown", "tsv")


@dataclass(frozen=True, slots=True)
class RunManifest:
    """Provenance embedded in every emitted report.

    Two runs with equal manifests produce byte-identical outputs, so the
    manifest doubles as a reproducibility key.
    """

    tool_version: str
    collection_hash: str
    seed: int
    alphas: tuple[float, ...]
    resample_counts: Mapping[str, int]
    command_line: str
    timestamp: str

    def lines(self) -> list[str]:
        resamples = ", ".join(f"{k}={v}" for k, v in sorted(self.resample_counts.items()))
        return [
            f"tool-version: {self.tool_version}",
            f"collection-sha256: {self.collection_hash}",
            f"seed: {self.seed}",
            "alphas: " + ", ".join(f"{a:g}" for a in self.alphas),
            f"resamples: {resamples}" if resamples else "resamples: none",
            f"command: {self.command_line}",
            f"timestamp: {self.timestamp}",
        ]


def _check_style(style: str) -> None:
    if style not in _STYLES:
        raise ValueError(f"unknown style {style!r}; expected one of {_STYLES}")


def _comments(lines: Sequence[str], style: str) -> list[str]:
    if style == "tsv":
        return [f"# {line}" for line in lines]
    return [f"<!-- {line} -->" for line in lines]


def _pct(value: float, precision: int) -> str:
    return f"{100.0 * value:.{precision}f}"


def render_rows(headers: Sequence[str], rows: Sequence[Sequence[str]], style: str,
                footnotes: Sequence[str] = (), manifest: RunManifest | None = None) -> str:
    """Assemble one table plus footnotes and manifest comments."""
    _check_style(style)
    lines: list[str] = []
    if style == "markdown":
        lines.append("| " + " | ".join(headers) + " |")
        lines.append("|" + "|".join(" --- " for _ in headers) + "|")
        for row in rows:
            lines.append("| " + " | ".join(row) + " |")
        if footnotes:
            lines.append("")
            for note in footnotes:
                lines.append(f"- {note}")
    else:
        lines.append("\t".join(headers))
        for row in rows:
            lines.append("\t".join(row))
        lines.extend(_comments(footnotes, style))
    if manifest is not None:
        lines.append("")
        lines.extend(_comments(manifest.lines(), style))
    return "\n".join(lines) + "\n"


def render_accuracy_table(table: AccuracyTable,
                          clusters: Mapping[str, ClusterReport] | None = None,
                          style: str = "markdown", precision: int = 1,
                          manifest: RunManifest | None = None) -> str:
    """Render an accuracy table with per-column n and tie annotations.

    ``clusters`` maps column labels to the cluster report computed on that
    column's subset; each must carry the same subset fingerprint as the
    column, which proves both analyses saw the same pairs.

    :raises ValueError: on a fingerprint mismatch or unknown cluster column
    """
    _check_style(style)
    clusters = dict(clusters or {})
    label_index = {label: j for j, label in enumerate(table.column_labels)}
    for label, cluster in clusters.items():
        if label not in label_index:
            raise ValueError(f"cluster report for unknown column {label!r}")
        expected = table.column_fingerprints[label_index[label]]
        if cluster.fingerprint != expected:
            raise ValueError(
                f"subset mismatch for column {label!r}: cluster report was computed "
                f"on different pairs ({cluster.subset_description!r})"
            )

    headers = ["Metric"] + list(table.column_labels)
    rows: list[list[str]] = []
    n_row = ["n"] + [str(n) for n in table.column_sizes]
    rows.append(n_row)
    coverage_notes: list[str] = []
    for metric, cells in table.rows:
        row = [metric]
        short = []
        for j, result in enumerate(cells):
            if result is None:
                row.append("-")
                continue
            text = _pct(result.accuracy, precision)
            cluster = clusters.get(table.column_labels[j])
            if cluster is not None:
                best = metric == cluster.best_metric
                tied = metric in cluster.tied_with_best
                if style == "markdown":
                    if best:
                        text = f"**{text}**"
                    elif tied:
                        text = f"{text}†"
                elif tied:
                    text = f"{text}*"
            row.append(text)
            if result.n_pairs != table.column_sizes[j]:
                short.append(f"{table.column_labels[j]} {result.n_pairs}/{table.column_sizes[j]}")
        if short:
            coverage_notes.append(
                f"{metric} is scored on fewer pairs than the column n "
                f"(missing scores): " + ", ".join(short)
            )
        rows.append(row)

    footnotes: list[str] = []
    if clusters:
        confidences = {cluster.config.confidence for cluster in clusters.values()}
        confidence = confidences.pop() if len(confidences) == 1 else None
        threshold = f" (best wins in < {confidence:g} of resamples)" if confidence else ""
        if style == "markdown":
            footnotes.append(f"**bold** = best metric; † = tied with the best{threshold}.")
        else:
            footnotes.append(f"* = tied with the best metric{threshold}.")
    if len(set(table.column_fingerprints)) > 1:
        footnotes.append(
            "Each column keeps a different pair subset; values are not comparable "
            "across columns."
        )
    footnotes.extend(coverage_notes)
    if table.intersect:
        footnotes.append("Pairs lacking any requested metric were excluded up front.")
    return render_rows(headers, rows, style, footnotes, manifest)


def render_quadrant_table(reports: Sequence[QuadrantReport], style: str = "markdown",
                          precision: int = 1, manifest: RunManifest | None = None) -> str:
    """Render quadrant reports: accuracy, test-filtered accuracy, type-II cell."""
    _check_style(style)
    headers = ["Metric", "Accuracy", "Accuracy (significant only)", "Type II"]
    rows = []
    for report in reports:
        significant = (
            _pct(report.accuracy_metric_significant, precision)
            if report.accuracy_metric_significant is not None
            else "-"
        )
        rows.append(
            [
                report.metric_name,
                _pct(report.accuracy_all, precision),
                significant,
                f"{report.type_ii} ({100.0 * report.type_ii_rate:.{precision}f}%)",
            ]
        )
    footnotes = []
    if reports:
        alphas = {report.config.alpha for report in reports}
        human_alphas = {report.human_alpha for report in reports}
        counts = {report.config.n_resamples for report in reports}
        if len(alphas) == 1 and len(human_alphas) == 1 and len(counts) == 1:
            footnotes.append(
                f"Metric significance: paired bootstrap, {counts.pop()} resamples, "
                f"alpha {alphas.pop():g}; human significance: alpha {human_alphas.pop():g}. "
                "Type II rate is over metric-non-significant pairs."
            )
    return render_rows(headers, rows, style, footnotes, manifest)


def render_correlation_table(rows: Sequence[tuple[str, float, float, int]],
                             style: str = "markdown", precision: int = 3,
                             manifest: RunManifest | None = None) -> str:
    """Render (metric, Pearson, Spearman, n) correlation rows."""
    _check_style(style)
    headers = ["Metric", "Pearson", "Spearman", "n"]
    body = [
        [metric, f"{pearson_r:.{precision}f}", f"{spearman_r:.{precision}f}", str(n)]
        for metric, pearson_r, spearman_r, n in rows
    ]
    return render_rows(headers, body, style, manifest=manifest)
