"""Command-line entry point.

Subcommands: ingest, validate, score, human-test, accuracy, scatter,
clusters, sigtest, quadrants, meta, report, compare, pipeline.

Exit codes: 0 success, 1 usage error, 2 data/validation error,
3 degenerate statistics (a significance test where no resample produced a
winner, or all paired differences were zero).

Every flag can also be given in a ``--config`` file of ``key=value`` lines
(keys are the long flag names without dashes); explicit flags win. The
default bootstrap seed comes from the MTPAIRS_SEED environment variable
when set; ``--seed`` overrides both.
"""
from __future__ import annotations

import argparse
import os
import shlex
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .data import (
    Collection,
    CollectionError,
    collection_hash,
    enumerate_pairs,
    iter_collection_lines,
    load_collection,
    merge_external_scores,
    read_external_scores,
    serialize_collection,
)
from .human import paired_differences, significance_band, wilcoxon_signed_rank
from .meta import hunter_schmidt, read_correlations_tsv
from .metrics import (
    BUILTIN_METRICS,
    stats_for_lines,
    stats_lookup_for_metric,
    with_builtin_scores,
)
from .pairwise import accuracy_table, build_delta_records, scatter_points
from .pipeline import PipelineStageError, run_pipeline
from .report import (
    RunManifest,
    render_accuracy_table,
    render_quadrant_table,
    render_rows,
)
from .resampling import (
    DEFAULT_SEED,
    ResampleConfig,
    bootstrap_accuracy_clusters,
    paired_bootstrap_metric_test,
    quadrant_analysis,
)
from .subsets import filter_pairs, parse_subset_spec
from .tokenization import CJK_CHAR_SCHEME, DEFAULT_SCHEME

__all__ = ["main"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_DEGENERATE = 3

SEED_ENV_VAR = "MTPAIRS_SEED"


class UsageError(Exception):
    """Bad flags, config values, or flag combinations."""


# --------------------------------------------------------------------------
# option resolution: flag > config file > environment (seed only) > default


def _read_config(path: str) -> dict[str, str]:
    config: dict[str, str] = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config file {path!r}: {exc}") from exc
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise UsageError(f"config line {line_no} is not key=value: {line!r}")
        key, _, value = line.partition("=")
        config[key.strip()] = value.strip()
    return config


def _cast_bool(raw: str, key: str) -> bool:
    lowered = raw.lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise UsageError(f"config key {key!r} has non-boolean value {raw!r}")


def _opt(args, config, key: str, default, cast=None):
    """Resolve one option: explicit flag, then config file, then default."""
    value = getattr(args, key.replace("-", "_"), None)
    if value is not None:
        return value
    raw = config.get(key)
    if raw is None:
        return default
    if cast is bool:
        return _cast_bool(raw, key)
    if cast is None:
        return raw
    try:
        return cast(raw)
    except ValueError as exc:
        raise UsageError(f"config key {key!r} has bad value {raw!r}") from exc


def _resolve_seed(args, config) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    if "seed" in config:
        try:
            return int(config["seed"])
        except ValueError as exc:
            raise UsageError(f"config key 'seed' has bad value {config['seed']!r}") from exc
    env = os.environ.get(SEED_ENV_VAR)
    if env:
        try:
            return int(env)
        except ValueError as exc:
            raise UsageError(f"{SEED_ENV_VAR} has bad value {env!r}") from exc
    return DEFAULT_SEED


def _resolve_timestamp(args, config) -> str:
    explicit = _opt(args, config, "timestamp", None)
    if explicit is not None:
        return explicit
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _parse_alphas(text: str) -> tuple[float, ...]:
    try:
        alphas = tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise UsageError(f"bad alpha list {text!r}") from exc
    if not alphas or not all(0 < a < 1 for a in alphas):
        raise UsageError(f"alphas must lie in (0, 1): {text!r}")
    return alphas


def _parse_metrics(text: str) -> list[str]:
    metrics = [part.strip() for part in text.split(",") if part.strip()]
    if not metrics:
        raise UsageError(f"empty metric list {text!r}")
    return metrics


def _resolve_scheme(args, config):
    choice = _opt(args, config, "tokenizer", "auto")
    if choice == "auto":
        return None
    if choice == "default":
        return DEFAULT_SCHEME
    if choice == "cjk-char":
        return CJK_CHAR_SCHEME
    raise UsageError(f"unknown tokenizer {choice!r}; expected auto, default, or cjk-char")


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _load_collection(args, config) -> Collection:
    collection = load_collection(args.collection)
    paths = list(getattr(args, "external_scores", None) or [])
    if not paths and "external-scores" in config:
        paths = [p.strip() for p in config["external-scores"].split(",") if p.strip()]
    for path in paths:
        collection = merge_external_scores(collection, read_external_scores(path))
    return collection


def _resolve_metrics(args, config, collection: Collection) -> list[str]:
    """Requested metric names: built-in names lowercased, default all."""
    text = _opt(args, config, "metrics", None)
    if text is None:
        stored = [m for m in collection.metric_names() if m.lower() not in BUILTIN_METRICS]
        return list(BUILTIN_METRICS) + stored
    metrics = text if isinstance(text, list) else _parse_metrics(text)
    return [m.lower() if m.lower() in BUILTIN_METRICS else m for m in metrics]


def _prepare_records(args, config, collection: Collection):
    """Attach built-in scores as needed and build delta records."""
    metrics = _resolve_metrics(args, config, collection)
    builtin = [m for m in metrics if m in BUILTIN_METRICS]
    blocks = {}
    if builtin:
        scheme = _resolve_scheme(args, config)
        strict = bool(_opt(args, config, "strict-bleu", False, bool))
        collection, blocks = with_builtin_scores(collection, builtin, scheme, strict)
    missing = [m for m in metrics if m not in collection.metric_names()]
    if missing:
        raise ValueError("metrics not present in the collection: " + ", ".join(missing))
    matching = _opt(args, config, "matching", "auto")
    records = build_delta_records(collection, metrics, matching)
    return collection, blocks, metrics, records


def _manifest(argv, input_hash: str, seed: int, alphas, resample_counts,
              timestamp: str) -> RunManifest:
    """Provenance block; the hash identifies the loaded input collection."""
    return RunManifest(
        tool_version=__version__,
        collection_hash=input_hash,
        seed=seed,
        alphas=tuple(alphas),
        resample_counts=dict(resample_counts),
        command_line="mtpairs " + shlex.join(argv),
        timestamp=timestamp,
    )


# --------------------------------------------------------------------------
# subcommands


def cmd_ingest(args, config, argv) -> int:
    collection = _load_collection(args, config)
    input_hash = collection_hash(collection)
    text = "".join(line + "\n" for line in iter_collection_lines(collection))
    out = _opt(args, config, "out", None)
    _emit(text, out)
    n_systems = sum(len(c.system_ids) for c in collection.campaigns)
    print(
        f"ingested {len(collection.campaigns)} campaign(s), {n_systems} system entries, "
        f"hash {collection_hash(collection)[:12]}",
        file=sys.stderr,
    )
    return EXIT_OK


def cmd_validate(args, config, argv) -> int:
    collection = _load_collection(args, config)
    input_hash = collection_hash(collection)
    n_segments = sum(len(c.segments) for c in collection.campaigns)
    n_outputs = sum(len(c.outputs) for c in collection.campaigns)
    n_judgements = sum(len(c.judgements) for c in collection.campaigns)
    n_pairs = sum(len(enumerate_pairs(c)) for c in collection.campaigns)
    metrics = ", ".join(collection.metric_names()) or "none"
    lines = [
        f"campaigns: {len(collection.campaigns)}",
        f"segments: {n_segments}",
        f"outputs: {n_outputs}",
        f"judgements: {n_judgements}",
        f"system pairs: {n_pairs}",
        f"stored metrics: {metrics}",
        "alphas: " + ", ".join(f"{a:g}" for a in collection.alphas),
        f"collection-sha256: {collection_hash(collection)}",
        "valid",
    ]
    _emit("".join(line + "\n" for line in lines), _opt(args, config, "out", None))
    return EXIT_OK


def cmd_score(args, config, argv) -> int:
    collection = _load_collection(args, config)
    input_hash = collection_hash(collection)
    text = _opt(args, config, "metrics", None)
    metrics = _parse_metrics(text) if text else list(BUILTIN_METRICS)
    scheme = _resolve_scheme(args, config)
    strict = bool(_opt(args, config, "strict-bleu", False, bool))
    scored, _blocks = with_builtin_scores(collection, metrics, scheme, strict)
    out = _opt(args, config, "out", None)
    if out:
        serialize_collection(scored, out)
        print(f"collection with scores written to {out}", file=sys.stderr)
        return EXIT_OK
    rows = []
    for campaign in scored.campaigns:
        for name in sorted(m.lower() for m in metrics):
            levels = campaign.metric_set(name).system_level()
            for system_id in sorted(levels):
                rows.append([campaign.campaign_id, name, system_id, repr(levels[system_id])])
    _emit(render_rows(["campaign_id", "metric", "system_id", "score"], rows, "tsv"), None)
    return EXIT_OK


def cmd_human_test(args, config, argv) -> int:
    collection = _load_collection(args, config)
    input_hash = collection_hash(collection)
    alphas_text = _opt(args, config, "alphas", None)
    alphas = _parse_alphas(alphas_text) if alphas_text else collection.alphas
    matching = _opt(args, config, "matching", "auto")
    seed = _resolve_seed(args, config)
    timestamp = _resolve_timestamp(args, config)
    rows = []
    for campaign in collection.campaigns:
        for pair in enumerate_pairs(campaign):
            diffs = paired_differences(campaign, pair, matching)
            outcome = wilcoxon_signed_rank(diffs.diffs, alphas)
            rows.append(
                [campaign.campaign_id, pair.system_a, pair.system_b,
                 f"{outcome.p_value:.3f}", significance_band(outcome.p_value, alphas),
                 str(len(diffs.diffs)), outcome.method_note]
            )
    manifest = _manifest(argv, input_hash, seed, alphas, {}, timestamp)
    text = render_rows(
        ["campaign_id", "system_a", "system_b", "p", "band", "n_units", "method"],
        rows,
        _opt(args, config, "style", "tsv"),
        manifest=manifest,
    )
    _emit(text, _opt(args, config, "out", None))
    return EXIT_OK


def cmd_accuracy(args, config, argv) -> int:
    collection = _load_collection(args, config)
    input_hash = collection_hash(collection)
    collection, _blocks, metrics, records = _prepare_records(args, config, collection)
    subset = parse_subset_spec(_opt(args, config, "subset", ""))
    selected = filter_pairs(records, subset)
    if not selected:
        raise ValueError(f"empty subset: {subset.describe()}")
    alphas_text = _opt(args, config, "alphas", None)
    alphas = _parse_alphas(alphas_text) if alphas_text else collection.alphas
    intersect = bool(_opt(args, config, "intersect-metrics", False, bool))
    table = accuracy_table(selected, metrics, alphas, intersect)
    seed = _resolve_seed(args, config)
    manifest = _manifest(argv, input_hash, seed, alphas, {},
                          _resolve_timestamp(args, config))
    text = render_accuracy_table(
        table,
        None,
        _opt(args, config, "style", "markdown"),
        int(_opt(args, config, "precision", 1, int)),
        manifest,
    )
    _emit(text, _opt(args, config, "out", None))
    return EXIT_OK


def cmd_scatter(args, config, argv) -> int:
    collection = _load_collection(args, config)
    input_hash = collection_hash(collection)
    collection, _blocks, metrics, records = _prepare_records(args, config, collection)
    metric = _opt(args, config, "metric", None)
    if not metric:
        raise UsageError("scatter requires --metric")
    metric = metric.lower() if metric.lower() in BUILTIN_METRICS else metric
    subset = parse_subset_spec(_opt(args, config, "subset", ""))
    points = scatter_points(records, metric, subset)
    if not points:
        raise ValueError(f"no pairs with {metric!r} scores in subset: {subset.describe()}")
    rows = [[repr(md), repr(hd), direction] for md, hd, direction in points]
    seed = _resolve_seed(args, config)
    manifest = _manifest(
        argv, input_hash, seed, collection.alphas, {}, _resolve_timestamp(args, config)
    )
    text = render_rows(
        ["metric_delta", "human_delta", "direction"], rows, "tsv", manifest=manifest
    )
    _emit(text, _opt(args, config, "out", None))
    return EXIT_OK


def cmd_clusters(args, config, argv) -> int:
    collection = _load_collection(args, config)
    input_hash = collection_hash(collection)
    collection, _blocks, metrics, records = _prepare_records(args, config, collection)
    subset = parse_subset_spec(_opt(args, config, "subset", ""))
    cfg = ResampleConfig(
        n_resamples=int(_opt(args, config, "resamples", 10000, int)),
        seed=_resolve_seed(args, config),
        confidence=float(_opt(args, config, "confidence", 0.95, float)),
        alpha=float(_opt(args, config, "alpha", 0.05, float)),
    )
    report = bootstrap_accuracy_clusters(records, metrics, subset, cfg)
    rows = []
    for metric in sorted(metrics, key=lambda m: (-report.accuracies[m], m)):
        rows.append(
            [metric,
             f"{100.0 * report.accuracies[metric]:.1f}",
             f"{report.win_fraction[metric]:.3f}",
             "yes" if metric in report.tied_with_best else "no",
             "best" if metric == report.best_metric else ""]
        )
    footnotes = [
        f"subset: {report.subset_description} (n={report.n_pairs})",
        f"tied with best = beaten by the best metric in < {cfg.confidence:g} "
        f"of {cfg.n_resamples} resamples",
    ]
    manifest = _manifest(
        argv, input_hash, cfg.seed, collection.alphas,
        {"clusters": cfg.n_resamples}, _resolve_timestamp(args, config),
    )
    text = render_rows(
        ["Metric", "Accuracy", "Beaten fraction", "Tied with best", ""],
        rows,
        _opt(args, config, "style", "markdown"),
        footnotes,
        manifest,
    )
    _emit(text, _opt(args, config, "out", None))
    return EXIT_OK


def cmd_sigtest(args, config, argv) -> int:
    collection = _load_collection(args, config)
    input_hash = collection_hash(collection)
    metric = (_opt(args, config, "metric", None) or "").strip()
    if not metric:
        raise UsageError("sigtest requires --metric")
    metric = metric.lower() if metric.lower() in BUILTIN_METRICS else metric
    system_a = _opt(args, config, "system-a", None)
    system_b = _opt(args, config, "system-b", None)
    if not system_a or not system_b:
        raise UsageError("sigtest requires --system-a and --system-b")
    campaign_id = _opt(args, config, "campaign", None)
    if campaign_id is None:
        if len(collection.campaigns) != 1:
            raise UsageError("collection has several campaigns; use --campaign")
        campaign_id = collection.campaigns[0].campaign_id
    campaign = collection.campaign(campaign_id)
    for system in (system_a, system_b):
        if system not in campaign.system_ids:
            raise ValueError(f"unknown system {system!r} in campaign {campaign_id!r}")
    blocks = {}
    if metric in BUILTIN_METRICS:
        scheme = _resolve_scheme(args, config)
        strict = bool(_opt(args, config, "strict-bleu", False, bool))
        collection, blocks = with_builtin_scores(collection, [metric], scheme, strict)
    lookup = stats_lookup_for_metric(collection, metric, blocks)
    key_a, key_b = (campaign_id, system_a), (campaign_id, system_b)
    if key_a not in lookup or key_b not in lookup:
        raise ValueError(f"segment stats required: no {metric!r} statistics in {campaign_id!r}")
    cfg = ResampleConfig(
        n_resamples=int(_opt(args, config, "resamples", 1000, int)),
        seed=_resolve_seed(args, config),
        alpha=float(_opt(args, config, "alpha", 0.05, float)),
    )
    one_sided = bool(_opt(args, config, "one-sided", False, bool))
    outcome = paired_bootstrap_metric_test(
        lookup[key_a], lookup[key_b], cfg, one_sided, collection.alphas
    )
    score_a = lookup[key_a].corpus_score()
    score_b = lookup[key_b].corpus_score()
    lines = [
        f"metric: {metric}",
        f"campaign: {campaign_id}",
        f"system A: {system_a} (score {score_a:.4f})",
        f"system B: {system_b} (score {score_b:.4f})",
        "scores are orientation-normalized (higher is better)",
        f"delta: {outcome.statistic:+.4f}",
        f"p-value: {outcome.p_value:.3f}",
        f"significant at {cfg.alpha:g}: {'yes' if outcome.p_value <= cfg.alpha else 'no'}",
        f"method: {outcome.method_note}",
    ]
    manifest = _manifest(
        argv, input_hash, cfg.seed, collection.alphas,
        {"sigtest": cfg.n_resamples}, _resolve_timestamp(args, config),
    )
    lines.extend(f"# {entry}" for entry in manifest.lines())
    _emit("".join(line + "\n" for line in lines), _opt(args, config, "out", None))
    if "degenerate" in outcome.method_note:
        return EXIT_DEGENERATE
    return EXIT_OK


def cmd_quadrants(args, config, argv) -> int:
    collection = _load_collection(args, config)
    input_hash = collection_hash(collection)
    collection, blocks, metrics, records = _prepare_records(args, config, collection)
    metric_text = _opt(args, config, "metric", None)
    requested = (
        [m.lower() if m.lower() in BUILTIN_METRICS else m for m in _parse_metrics(metric_text)]
        if metric_text
        else metrics
    )
    cfg = ResampleConfig(
        n_resamples=int(_opt(args, config, "resamples", 1000, int)),
        seed=_resolve_seed(args, config),
        alpha=float(_opt(args, config, "alpha", 0.05, float)),
    )
    human_alpha = float(_opt(args, config, "human-alpha", cfg.alpha, float))
    reports = []
    skipped = []
    for metric in requested:
        try:
            lookup = stats_lookup_for_metric(collection, metric, blocks)
            reports.append(quadrant_analysis(records, metric, lookup, human_alpha, cfg))
        except ValueError as exc:
            skipped.append(f"{metric}: {exc}")
    if not reports:
        raise ValueError("no metric usable for quadrant analysis; " + "; ".join(skipped))
    for note in skipped:
        print(f"notice: skipped {note}", file=sys.stderr)
    manifest = _manifest(
        argv, input_hash, cfg.seed, collection.alphas,
        {"sigtest": cfg.n_resamples}, _resolve_timestamp(args, config),
    )
    text = render_quadrant_table(
        reports,
        _opt(args, config, "style", "markdown"),
        int(_opt(args, config, "precision", 1, int)),
        manifest,
    )
    _emit(text, _opt(args, config, "out", None))
    return EXIT_OK


def cmd_meta(args, config, argv) -> int:
    path = _opt(args, config, "input", None)
    if not path:
        raise UsageError("meta requires --input")
    observations = read_correlations_tsv(path)
    r_agg, n_total = hunter_schmidt(observations)
    precision = int(_opt(args, config, "precision", 3, int))
    lines = [
        f"r_agg: {r_agg:.{precision}f}",
        f"n_total: {n_total}",
        f"groups: {len(observations)}",
    ]
    _emit("".join(line + "\n" for line in lines), _opt(args, config, "out", None))
    return EXIT_OK


def cmd_report(args, config, argv) -> int:
    collection = _load_collection(args, config)
    input_hash = collection_hash(collection)
    collection, _blocks, metrics, records = _prepare_records(args, config, collection)
    subset = parse_subset_spec(_opt(args, config, "subset", ""))
    selected = filter_pairs(records, subset)
    if not selected:
        raise ValueError(f"empty subset: {subset.describe()}")
    alphas_text = _opt(args, config, "alphas", None)
    alphas = _parse_alphas(alphas_text) if alphas_text else collection.alphas
    intersect = bool(_opt(args, config, "intersect-metrics", False, bool))
    cfg = ResampleConfig(
        n_resamples=int(_opt(args, config, "resamples", 10000, int)),
        seed=_resolve_seed(args, config),
        confidence=float(_opt(args, config, "confidence", 0.95, float)),
        alpha=float(_opt(args, config, "alpha", 0.05, float)),
    )
    table = accuracy_table(selected, metrics, alphas, intersect)
    clusters = {}
    for label, spec, size in zip(table.column_labels, table.column_specs, table.column_sizes):
        if size:
            clusters[label] = bootstrap_accuracy_clusters(selected, metrics, spec, cfg)
    manifest = _manifest(
        argv, input_hash, cfg.seed, alphas,
        {"clusters": cfg.n_resamples}, _resolve_timestamp(args, config),
    )
    text = render_accuracy_table(
        table,
        clusters,
        _opt(args, config, "style", "markdown"),
        int(_opt(args, config, "precision", 1, int)),
        manifest,
    )
    _emit(text, _opt(args, config, "out", None))
    return EXIT_OK


def _read_lines(path: str) -> list[str]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ValueError(f"cannot read {path!r}: {exc}") from exc
    lines = text.splitlines()
    if not lines:
        raise ValueError(f"empty file: {path!r}")
    return lines


def cmd_compare(args, config, argv) -> int:
    references = _read_lines(args.reference)
    hyp_a = _read_lines(args.hyp_a)
    hyp_b = _read_lines(args.hyp_b)
    if not (len(references) == len(hyp_a) == len(hyp_b)):
        raise ValueError(
            f"line count mismatch: {len(references)} references, "
            f"{len(hyp_a)} vs {len(hyp_b)} hypotheses"
        )
    metric = (_opt(args, config, "metric", "bleu")).lower()
    scheme = _resolve_scheme(args, config) or DEFAULT_SCHEME
    strict = bool(_opt(args, config, "strict-bleu", False, bool))
    stats_a = stats_for_lines(metric, hyp_a, references, scheme, strict)
    stats_b = stats_for_lines(metric, hyp_b, references, scheme, strict)
    cfg = ResampleConfig(
        n_resamples=int(_opt(args, config, "resamples", 1000, int)),
        seed=_resolve_seed(args, config),
        alpha=float(_opt(args, config, "alpha", 0.05, float)),
    )
    outcome = paired_bootstrap_metric_test(stats_a, stats_b, cfg)
    if outcome.p_value <= cfg.alpha:
        verdict = "A-better" if outcome.statistic > 0 else "B-better"
    else:
        verdict = "tied"
    lines = [
        f"metric: {metric}",
        f"segments: {len(references)}",
        f"score A: {stats_a.corpus_score():.4f}",
        f"score B: {stats_b.corpus_score():.4f}",
        "scores are orientation-normalized (higher is better)",
        f"delta: {outcome.statistic:+.4f}",
        f"p-value: {outcome.p_value:.3f}",
        f"verdict: {verdict}",
        f"method: {outcome.method_note}",
    ]
    _emit("".join(line + "\n" for line in lines), _opt(args, config, "out", None))
    if "degenerate" in outcome.method_note:
        return EXIT_DEGENERATE
    return EXIT_OK


def cmd_pipeline(args, config, argv) -> int:
    collection = _load_collection(args, config)
    input_hash = collection_hash(collection)
    out_dir = _opt(args, config, "out-dir", None)
    if not out_dir:
        raise UsageError("pipeline requires --out-dir")
    metrics_text = _opt(args, config, "metrics", None)
    metrics = _parse_metrics(metrics_text) if metrics_text else None
    alphas_text = _opt(args, config, "alphas", None)
    if alphas_text:
        collection = Collection(
            collection.campaigns, _parse_alphas(alphas_text), dict(collection.orientations)
        )
    seed = _resolve_seed(args, config)
    cluster_resamples = int(_opt(args, config, "resamples", 10000, int))
    sigtest_resamples = int(_opt(args, config, "sigtest-resamples", 1000, int))
    alpha = float(_opt(args, config, "alpha", 0.05, float))
    manifest = _manifest(
        argv, input_hash, seed, collection.alphas,
        {"clusters": cluster_resamples, "sigtest": sigtest_resamples},
        _resolve_timestamp(args, config),
    )
    notices = run_pipeline(
        collection,
        out_dir,
        manifest,
        metrics=metrics,
        matching=_opt(args, config, "matching", "auto"),
        cluster_resamples=cluster_resamples,
        sigtest_resamples=sigtest_resamples,
        seed=seed,
        confidence=float(_opt(args, config, "confidence", 0.95, float)),
        alpha=alpha,
        human_alpha=float(_opt(args, config, "human-alpha", alpha, float)),
        scheme=_resolve_scheme(args, config),
        strict_bleu=bool(_opt(args, config, "strict-bleu", False, bool)),
        intersect=bool(_opt(args, config, "intersect-metrics", False, bool)),
        precision=int(_opt(args, config, "precision", 1, int)),
    )
    for notice in notices:
        print(f"notice: {notice}")
    print(f"report bundle written to {out_dir}")
    return EXIT_OK


# --------------------------------------------------------------------------
# parser assembly


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mtpairs",
        description="Pairwise system-ranking reliability analysis for MT metrics.",
    )
    parser.add_argument("--version", action="version", version=f"mtpairs {__version__}")
    subparsers = parser.add_subparsers(dest="command", metavar="command")

    base = argparse.ArgumentParser(add_help=False)
    base.add_argument("--config", help="key=value config file; flags override it")
    base.add_argument("--seed", type=int, help=f"RNG seed (default: ${SEED_ENV_VAR} or {DEFAULT_SEED})")
    base.add_argument("--timestamp", help="pin the manifest timestamp (for reproducible outputs)")
    base.add_argument("--out", help="write output to this file instead of stdout")

    render = argparse.ArgumentParser(add_help=False)
    render.add_argument("--style", choices=["markdown", "tsv"], help="table style")
    render.add_argument("--precision", type=int, help="decimal places for accuracy cells")

    loading = argparse.ArgumentParser(add_help=False)
    loading.add_argument("collection", help="collection JSONL file")
    loading.add_argument(
        "--external-scores", action="append", metavar="PATH",
        help="external metric score JSONL to merge (repeatable)",
    )

    scoring = argparse.ArgumentParser(add_help=False)
    scoring.add_argument("--tokenizer", choices=["auto", "default", "cjk-char"],
                         help="tokenization for built-in metrics (default auto)")
    scoring.add_argument("--strict-bleu", action="store_true", default=None,
                         help="hard zero when an n-gram order has no hypothesis n-grams")

    analysis = argparse.ArgumentParser(add_help=False)
    analysis.add_argument("--metrics", help="comma-separated metric names (default: all)")
    analysis.add_argument("--matching", choices=["auto", "annotator", "segment"],
                          help="paired-difference matching unit (default auto)")
    analysis.add_argument("--subset", help='pair subset, e.g. "direction=into-english,alpha=0.05"')
    analysis.add_argument("--alphas", help="comma-separated significance levels")
    analysis.add_argument("--intersect-metrics", action="store_true", default=None,
                          help="keep only pairs scored by every requested metric")

    sub = subparsers.add_parser(
        "ingest", parents=[base, loading],
        help="validate, normalize, and re-emit a collection",
    )
    sub.set_defaults(func=cmd_ingest)

    sub = subparsers.add_parser(
        "validate", parents=[base, loading], help="validate a collection and print a summary",
    )
    sub.set_defaults(func=cmd_validate)

    sub = subparsers.add_parser(
        "score", parents=[base, loading, scoring],
        help="compute built-in metric scores (bleu, chrf, ter)",
    )
    sub.add_argument("--metrics", help="comma-separated built-in metrics (default: all three)")
    sub.set_defaults(func=cmd_score)

    sub = subparsers.add_parser(
        "human-test", parents=[base, loading, render],
        help="human-significance test for every system pair",
    )
    sub.add_argument("--alphas", help="comma-separated significance levels")
    sub.add_argument("--matching", choices=["auto", "annotator", "segment"])
    sub.set_defaults(func=cmd_human_test)

    sub = subparsers.add_parser(
        "accuracy", parents=[base, loading, scoring, analysis, render],
        help="pairwise ranking accuracy table across significance columns",
    )
    sub.set_defaults(func=cmd_accuracy)

    sub = subparsers.add_parser(
        "scatter", parents=[base, loading, scoring, analysis],
        help="emit (metric delta, human delta, direction) triplets",
    )
    sub.add_argument("--metric", help="metric to plot")
    sub.set_defaults(func=cmd_scatter)

    sub = subparsers.add_parser(
        "clusters", parents=[base, loading, scoring, analysis, render],
        help="bootstrap tie clusters for accuracy",
    )
    sub.add_argument("--resamples", type=int, help="bootstrap resamples (default 10000)")
    sub.add_argument("--confidence", type=float, help="tie threshold (default 0.95)")
    sub.add_argument("--alpha", type=float, help="significance level (default 0.05)")
    sub.set_defaults(func=cmd_clusters)

    sub = subparsers.add_parser(
        "sigtest", parents=[base, loading, scoring],
        help="paired bootstrap significance for one system pair",
    )
    sub.add_argument("--metric", help="metric to test")
    sub.add_argument("--system-a", help="first system")
    sub.add_argument("--system-b", help="second system")
    sub.add_argument("--campaign", help="campaign id (required with several campaigns)")
    sub.add_argument("--resamples", type=int, help="bootstrap resamples (default 1000)")
    sub.add_argument("--alpha", type=float, help="significance level (default 0.05)")
    sub.add_argument("--one-sided", action="store_true", default=None,
                     help="test whether system A is better (default two-sided)")
    sub.set_defaults(func=cmd_sigtest)

    sub = subparsers.add_parser(
        "quadrants", parents=[base, loading, scoring, analysis, render],
        help="human-vs-metric significance quadrant analysis",
    )
    sub.add_argument("--metric", help="comma-separated metrics (default: all usable)")
    sub.add_argument("--resamples", type=int, help="bootstrap resamples (default 1000)")
    sub.add_argument("--alpha", type=float, help="metric-test significance level (default 0.05)")
    sub.add_argument("--human-alpha", type=float, help="human significance level (default: alpha)")
    sub.set_defaults(func=cmd_quadrants)

    sub = subparsers.add_parser(
        "meta", parents=[base, render], help="aggregate per-group correlations",
    )
    sub.add_argument("--input", help="TSV with columns (group, r, n)")
    sub.set_defaults(func=cmd_meta)

    sub = subparsers.add_parser(
        "report", parents=[base, loading, scoring, analysis, render],
        help="accuracy table with bootstrap tie annotations",
    )
    sub.add_argument("--resamples", type=int, help="bootstrap resamples (default 10000)")
    sub.add_argument("--confidence", type=float, help="tie threshold (default 0.95)")
    sub.add_argument("--alpha", type=float, help="significance level (default 0.05)")
    sub.set_defaults(func=cmd_report)

    sub = subparsers.add_parser(
        "compare", parents=[base, scoring],
        help="ship/no-ship verdict for two hypothesis files",
    )
    sub.add_argument("reference", help="reference translations, one per line")
    sub.add_argument("hyp_a", help="system A hypotheses, one per line")
    sub.add_argument("hyp_b", help="system B hypotheses, one per line")
    sub.add_argument("--metric", help="built-in metric (default bleu)")
    sub.add_argument("--resamples", type=int, help="bootstrap resamples (default 1000)")
    sub.add_argument("--alpha", type=float, help="significance level (default 0.05)")
    sub.set_defaults(func=cmd_compare)

    sub = subparsers.add_parser(
        "pipeline", parents=[base, loading, scoring, analysis, render],
        help="run every analysis and write a report bundle",
    )
    sub.add_argument("--out-dir", help="bundle directory")
    sub.add_argument("--resamples", type=int, help="cluster bootstrap resamples (default 10000)")
    sub.add_argument("--sigtest-resamples", type=int, help="metric-test resamples (default 1000)")
    sub.add_argument("--confidence", type=float, help="tie threshold (default 0.95)")
    sub.add_argument("--alpha", type=float, help="metric-test significance level (default 0.05)")
    sub.add_argument("--human-alpha", type=float, help="human significance level (default: alpha)")
    sub.set_defaults(func=cmd_pipeline)

    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    if not hasattr(args, "func"):
        parser.print_help()
        return EXIT_USAGE
    try:
        config = _read_config(args.config) if getattr(args, "config", None) else {}
        return args.func(args, config, argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PipelineStageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except CollectionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (ValueError, KeyError) as exc:
        message = exc.args[0] if exc.args else str(exc)
        print(f"error: {message}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
