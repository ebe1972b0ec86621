"""Campaign collection data model: loading, validation, serialization.

A collection is a JSONL file, one object per line, each tagged with a "kind":

  {"kind": "manifest", "schema_version": 1, "alphas": [0.05, 0.01, 0.001],
   "orientations": {"TER": "lower-better"}}
  {"kind": "campaign", "campaign_id": "c1", "source_lang": "en",
   "target_lang": "de", "domain": "news", "group": "independent"}
  {"kind": "segment", "campaign_id": "c1", "segment_id": "s1",
   "source": "...", "reference": "..."}
  {"kind": "output", "campaign_id": "c1", "system_id": "sysA",
   "segment_id": "s1", "text": "..."}
  {"kind": "judgement", "campaign_id": "c1", "annotator_id": "a1",
   "system_id": "sysA", "segment_id": "s1", "score": 73}
  {"kind": "metric_scores", "campaign_id": "c1", "metric": "COMET",
   "system_id": "sysA", "granularity": "segment", "scores": {"s1": 0.41}}

The manifest must be the first line. System-level metric rows carry a single
"score" field instead of the "scores" mapping. Metrics declared lower-better
in the manifest are negated at load so every stored score is higher-better.
"""
from __future__ import annotations

import hashlib
import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

from .languages import direction_class, script_of

__all__ = [
    "Segment",
    "SystemOutput",
    "Judgement",
    "MetricScoreSet",
    "Campaign",
    "SystemPair",
    "Collection",
    "CollectionError",
    "SchemaViolation",
    "ReferentialViolation",
    "CoverageViolation",
    "CollectionBuilder",
    "load_collection",
    "parse_collection_lines",
    "serialize_collection",
    "collection_hash",
    "enumerate_pairs",
    "read_external_scores",
    "merge_external_scores",
]

DEFAULT_ALPHAS = (0.05, 0.01, 0.001)
_RECORD_KINDS = ("campaign", "segment", "output", "judgement", "metric_scores")


class CollectionError(Exception):
    """Base class for collection validation failures.

    Attributes:
        campaign_id: offending campaign, when known.
        line: 1-based record index in the source file, when known.
    """

    def __init__(self, message: str, campaign_id: str | None = None, line: int | None = None):
        where = []
        if campaign_id is not None:
            where.append(f"campaign {campaign_id!r}")
        if line is not None:
            where.append(f"record {line}")
        suffix = f" ({', '.join(where)})" if where else ""
        super().__init__(message + suffix)
        self.campaign_id = campaign_id
        self.line = line


class SchemaViolation(CollectionError):
    """A record is missing a field, has a wrongly typed field, or is malformed."""


class ReferentialViolation(CollectionError):
    """A record references a campaign, system, or segment that does not exist."""


class CoverageViolation(CollectionError):
    """A system or score set does not cover the segment set it must cover."""


@dataclass(frozen=True, slots=True)
class Segment:
    segment_id: str
    source_text: str
    reference_text: str | None = None


@dataclass(frozen=True, slots=True)
class SystemOutput:
    system_id: str
    segment_id: str
    hypothesis_text: str


@dataclass(frozen=True, slots=True)
class Judgement:
    annotator_id: str
    system_id: str
    segment_id: str
    score: float


@dataclass(frozen=True)
class MetricScoreSet:
    """Scores for one metric in one campaign, always stored higher-better.

    For "system" granularity, ``scores`` maps system_id to a score; for
    "segment" granularity it maps (system_id, segment_id) pairs.
    """

    metric_name: str
    granularity: str
    scores: Mapping

    def system_ids(self) -> tuple[str, ...]:
        if self.granularity == "system":
            return tuple(sorted(self.scores))
        return tuple(sorted({sys_id for sys_id, _ in self.scores}))

    def system_level(self) -> dict[str, float]:
        """System-level scores; segment scores are averaged per system.

        Averaging uses exactly rounded summation (math.fsum) divided by the
        segment count, so the result does not depend on segment order.
        """
        if self.granularity == "system":
            return dict(self.scores)
        per_system: dict[str, list[float]] = {}
        for (sys_id, _seg_id), value in self.scores.items():
            per_system.setdefault(sys_id, []).append(value)
        return {sys_id: math.fsum(vals) / len(vals) for sys_id, vals in per_system.items()}

    def segment_vector(self, system_id: str, segment_order: Sequence[str]) -> list[float]:
        if self.granularity != "segment":
            raise ValueError(f"metric {self.metric_name!r} has no segment-level scores")
        return [self.scores[(system_id, seg_id)] for seg_id in segment_order]


@dataclass(frozen=True)
class Campaign:
    campaign_id: str
    language_pair: tuple[str, str]
    domain_tag: str
    group_tag: str
    segments: tuple[Segment, ...]
    outputs: tuple[SystemOutput, ...]
    judgements: tuple[Judgement, ...]
    metric_scores: tuple[MetricScoreSet, ...]

    @property
    def system_ids(self) -> tuple[str, ...]:
        return tuple(sorted({out.system_id for out in self.outputs}))

    @property
    def segment_order(self) -> tuple[str, ...]:
        return tuple(seg.segment_id for seg in self.segments)

    @property
    def target_script(self) -> str:
        return script_of(self.language_pair[1])

    @property
    def direction(self) -> str:
        return direction_class(*self.language_pair)

    def hypotheses(self, system_id: str) -> list[str]:
        """Hypothesis texts for one system, in segment order."""
        by_segment = {out.segment_id: out.hypothesis_text for out in self.outputs if out.system_id == system_id}
        if not by_segment:
            raise KeyError(f"unknown system {system_id!r} in campaign {self.campaign_id!r}")
        return [by_segment[seg_id] for seg_id in self.segment_order]

    def references(self) -> list[str | None]:
        return [seg.reference_text for seg in self.segments]

    def metric_set(self, metric_name: str) -> MetricScoreSet | None:
        for score_set in self.metric_scores:
            if score_set.metric_name == metric_name:
                return score_set
        return None

    def metric_names(self) -> tuple[str, ...]:
        return tuple(s.metric_name for s in self.metric_scores)


@dataclass(frozen=True, slots=True)
class SystemPair:
    """Unordered system pair in canonical (lexicographic) order."""

    campaign_id: str
    system_a: str
    system_b: str

    def __post_init__(self) -> None:
        if self.system_a >= self.system_b:
            raise ValueError(f"pair not in canonical order: {self.system_a!r} >= {self.system_b!r}")


@dataclass(frozen=True)
class Collection:
    campaigns: tuple[Campaign, ...]
    alphas: tuple[float, ...] = DEFAULT_ALPHAS
    # Declared orientations from the manifest, kept for ingesting external
    # score files later; not part of collection identity.
    orientations: Mapping[str, str] = field(default_factory=dict, compare=False)

    def campaign(self, campaign_id: str) -> Campaign:
        for camp in self.campaigns:
            if camp.campaign_id == campaign_id:
                return camp
        raise KeyError(f"unknown campaign {campaign_id!r}")

    def metric_names(self) -> tuple[str, ...]:
        names: list[str] = []
        for camp in self.campaigns:
            for name in camp.metric_names():
                if name not in names:
                    names.append(name)
        return tuple(names)

    def has_judgements(self) -> bool:
        return any(camp.judgements for camp in self.campaigns)


def enumerate_pairs(campaign: Campaign) -> tuple[SystemPair, ...]:
    """All k*(k-1)/2 unordered system pairs of a campaign, canonically ordered."""
    systems = campaign.system_ids
    return tuple(
        SystemPair(campaign.campaign_id, a, b) for a, b in itertools.combinations(systems, 2)
    )


def _expect(record: Mapping, key: str, types, line: int, campaign_id: str | None = None):
    if key not in record:
        raise SchemaViolation(f"missing field {key!r}", campaign_id, line)
    value = record[key]
    if isinstance(value, bool) or not isinstance(value, types):
        raise SchemaViolation(f"field {key!r} has wrong type {type(value).__name__}", campaign_id, line)
    return value


def _oriented(metric_name: str, value: float, orientations: Mapping[str, str]) -> float:
    """Normalize a raw score to higher-better per the declared orientation.

    Negation adds +0.0 afterwards so a raw 0.0 never becomes -0.0.
    """
    if orientations.get(metric_name) == "lower-better":
        return -value + 0.0
    return value


class _CampaignAccumulator:
    def __init__(self, campaign_id: str, language_pair: tuple[str, str], domain: str, group: str, line: int):
        self.campaign_id = campaign_id
        self.language_pair = language_pair
        self.domain = domain
        self.group = group
        self.line = line
        self.segments: list[Segment] = []
        self.segment_lines: dict[str, int] = {}
        self.outputs: list[tuple[SystemOutput, int]] = []
        self.judgements: list[tuple[Judgement, int]] = []
        # metric -> (granularity, {key: (score, line)}, first line)
        self.metric_rows: dict[str, tuple[str, dict, int]] = {}


def parse_collection_lines(lines: Iterable[str]) -> Collection:
    """Parse and validate collection JSONL given as an iterable of lines."""
    manifest: Mapping | None = None
    accs: dict[str, _CampaignAccumulator] = {}
    order: list[str] = []

    for line_no, raw in enumerate(lines, start=1):
        raw = raw.strip()
        if not raw:
            continue
        try:
            record = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise SchemaViolation(f"invalid JSON: {exc.msg}", line=line_no) from exc
        if not isinstance(record, dict):
            raise SchemaViolation("record is not an object", line=line_no)
        kind = record.get("kind")
        if manifest is None:
            if kind != "manifest":
                raise SchemaViolation("first record must be the manifest", line=line_no)
            if record.get("schema_version") != 1:
                raise SchemaViolation(f"unsupported schema_version {record.get('schema_version')!r}", line=line_no)
            manifest = record
            continue
        if kind == "manifest":
            raise SchemaViolation("duplicate manifest", line=line_no)
        if kind not in _RECORD_KINDS:
            raise SchemaViolation(f"unknown kind {kind!r}", line=line_no)

        campaign_id = _expect(record, "campaign_id", str, line_no)
        if kind == "campaign":
            if campaign_id in accs:
                raise SchemaViolation("duplicate campaign", campaign_id, line_no)
            source = _expect(record, "source_lang", str, line_no, campaign_id)
            target = _expect(record, "target_lang", str, line_no, campaign_id)
            domain = _expect(record, "domain", str, line_no, campaign_id) if "domain" in record else "none"
            group = _expect(record, "group", str, line_no, campaign_id) if "group" in record else "none"
            accs[campaign_id] = _CampaignAccumulator(campaign_id, (source, target), domain, group, line_no)
            order.append(campaign_id)
            continue

        if campaign_id not in accs:
            raise ReferentialViolation("record for undeclared campaign", campaign_id, line_no)
        acc = accs[campaign_id]

        if kind == "segment":
            seg_id = _expect(record, "segment_id", str, line_no, campaign_id)
            source_text = _expect(record, "source", str, line_no, campaign_id)
            if not source_text:
                raise SchemaViolation("empty source text", campaign_id, line_no)
            if seg_id in acc.segment_lines:
                raise SchemaViolation(f"duplicate segment {seg_id!r}", campaign_id, line_no)
            reference = record.get("reference")
            if reference is not None and not isinstance(reference, str):
                raise SchemaViolation("field 'reference' has wrong type", campaign_id, line_no)
            acc.segments.append(Segment(seg_id, source_text, reference or None))
            acc.segment_lines[seg_id] = line_no
        elif kind == "output":
            system_id = _expect(record, "system_id", str, line_no, campaign_id)
            seg_id = _expect(record, "segment_id", str, line_no, campaign_id)
            text = _expect(record, "text", str, line_no, campaign_id)
            acc.outputs.append((SystemOutput(system_id, seg_id, text), line_no))
        elif kind == "judgement":
            annotator = _expect(record, "annotator_id", str, line_no, campaign_id)
            system_id = _expect(record, "system_id", str, line_no, campaign_id)
            seg_id = _expect(record, "segment_id", str, line_no, campaign_id)
            score = _expect(record, "score", (int, float), line_no, campaign_id)
            if not 0 <= score <= 100:
                raise SchemaViolation(f"judgement score {score!r} outside [0, 100]", campaign_id, line_no)
            acc.judgements.append((Judgement(annotator, system_id, seg_id, float(score)), line_no))
        else:  # metric_scores
            metric = _expect(record, "metric", str, line_no, campaign_id)
            system_id = _expect(record, "system_id", str, line_no, campaign_id)
            granularity = _expect(record, "granularity", str, line_no, campaign_id)
            if granularity not in ("segment", "system"):
                raise SchemaViolation(f"unknown granularity {granularity!r}", campaign_id, line_no)
            gran0, rows, first_line = acc.metric_rows.setdefault(metric, (granularity, {}, line_no))
            if gran0 != granularity:
                raise SchemaViolation(f"conflicting granularity for metric {metric!r}", campaign_id, line_no)
            if granularity == "system":
                score = _expect(record, "score", (int, float), line_no, campaign_id)
                if system_id in rows:
                    raise SchemaViolation(f"duplicate system score for metric {metric!r}", campaign_id, line_no)
                rows[system_id] = (float(score), line_no)
            else:
                scores = _expect(record, "scores", dict, line_no, campaign_id)
                for seg_id, value in scores.items():
                    if isinstance(value, bool) or not isinstance(value, (int, float)):
                        raise SchemaViolation(f"non-numeric score for segment {seg_id!r}", campaign_id, line_no)
                    if (system_id, seg_id) in rows:
                        raise SchemaViolation(f"duplicate segment score for metric {metric!r}", campaign_id, line_no)
                    rows[(system_id, seg_id)] = (float(value), line_no)

    if manifest is None:
        raise SchemaViolation("empty collection: no manifest found")

    alphas = manifest.get("alphas", list(DEFAULT_ALPHAS))
    if (
        not isinstance(alphas, list)
        or not alphas
        or not all(isinstance(a, float) and 0 < a < 1 for a in alphas)
    ):
        raise SchemaViolation("manifest field 'alphas' must be a list of values in (0, 1)")
    orientations = manifest.get("orientations", {})
    if not isinstance(orientations, dict) or not all(
        isinstance(k, str) and v in ("higher-better", "lower-better") for k, v in orientations.items()
    ):
        raise SchemaViolation("manifest field 'orientations' must map metric names to an orientation")

    campaigns = tuple(_finish_campaign(accs[cid], orientations) for cid in order)
    if not campaigns:
        raise SchemaViolation("collection declares no campaigns")
    return Collection(campaigns=campaigns, alphas=tuple(alphas), orientations=dict(orientations))


def _finish_campaign(acc: _CampaignAccumulator, orientations: Mapping[str, str]) -> Campaign:
    campaign_id = acc.campaign_id
    if not acc.segments:
        raise CoverageViolation("campaign has no segments", campaign_id, acc.line)
    segment_ids = set(acc.segment_lines)

    seen_outputs: set[tuple[str, str]] = set()
    systems: dict[str, set[str]] = {}
    for out, line_no in acc.outputs:
        if out.segment_id not in segment_ids:
            raise ReferentialViolation(f"output for unknown segment {out.segment_id!r}", campaign_id, line_no)
        key = (out.system_id, out.segment_id)
        if key in seen_outputs:
            raise SchemaViolation(f"duplicate output for {key!r}", campaign_id, line_no)
        seen_outputs.add(key)
        systems.setdefault(out.system_id, set()).add(out.segment_id)

    if len(systems) < 2:
        raise CoverageViolation(f"campaign has {len(systems)} system(s), need at least 2", campaign_id, acc.line)
    for system_id, covered in sorted(systems.items()):
        missing = segment_ids - covered
        if missing:
            raise CoverageViolation(
                f"system {system_id!r} missing {len(missing)} segment(s), e.g. {sorted(missing)[0]!r}",
                campaign_id,
                acc.line,
            )

    for judgement, line_no in acc.judgements:
        if judgement.system_id not in systems:
            raise ReferentialViolation(f"judgement for unknown system {judgement.system_id!r}", campaign_id, line_no)
        if judgement.segment_id not in segment_ids:
            raise ReferentialViolation(f"judgement for unknown segment {judgement.segment_id!r}", campaign_id, line_no)

    score_sets = []
    for metric in sorted(acc.metric_rows):
        granularity, rows, first_line = acc.metric_rows[metric]
        scores = {}
        for key, (value, line_no) in rows.items():
            if granularity == "system":
                if key not in systems:
                    raise ReferentialViolation(f"score for unknown system {key!r}", campaign_id, line_no)
            else:
                sys_id, seg_id = key
                if sys_id not in systems:
                    raise ReferentialViolation(f"score for unknown system {sys_id!r}", campaign_id, line_no)
                if seg_id not in segment_ids:
                    raise ReferentialViolation(f"score for unknown segment {seg_id!r}", campaign_id, line_no)
            scores[key] = _oriented(metric, value, orientations)
        if granularity == "segment":
            scored_systems = {sys_id for sys_id, _ in scores}
            for sys_id in sorted(scored_systems):
                covered = {seg_id for s, seg_id in scores if s == sys_id}
                if covered != segment_ids:
                    raise CoverageViolation(
                        f"metric {metric!r} covers {len(covered)}/{len(segment_ids)} segments for system {sys_id!r}",
                        campaign_id,
                        first_line,
                    )
        score_sets.append(MetricScoreSet(metric, granularity, scores))

    return Campaign(
        campaign_id=campaign_id,
        language_pair=acc.language_pair,
        domain_tag=acc.domain,
        group_tag=acc.group,
        segments=tuple(acc.segments),
        outputs=tuple(out for out, _ in acc.outputs),
        judgements=tuple(judgement for judgement, _ in acc.judgements),
        metric_scores=tuple(score_sets),
    )


def load_collection(path) -> Collection:
    """Load and validate a collection JSONL file."""
    with open(path, encoding="utf-8") as handle:
        return parse_collection_lines(handle)


def _manifest_line(collection: Collection) -> str:
    manifest = {
        "kind": "manifest",
        "schema_version": 1,
        "alphas": list(collection.alphas),
        "orientations": {},
    }
    return json.dumps(manifest, ensure_ascii=False)


def iter_collection_lines(collection: Collection) -> Iterator[str]:
    """Yield canonical JSONL lines for a collection (already normalized)."""
    yield _manifest_line(collection)
    for camp in collection.campaigns:
        yield json.dumps(
            {
                "kind": "campaign",
                "campaign_id": camp.campaign_id,
                "source_lang": camp.language_pair[0],
                "target_lang": camp.language_pair[1],
                "domain": camp.domain_tag,
                "group": camp.group_tag,
            },
            ensure_ascii=False,
        )
        for seg in camp.segments:
            record = {
                "kind": "segment",
                "campaign_id": camp.campaign_id,
                "segment_id": seg.segment_id,
                "source": seg.source_text,
                "reference": seg.reference_text,
            }
            yield json.dumps(record, ensure_ascii=False)
        for out in camp.outputs:
            yield json.dumps(
                {
                    "kind": "output",
                    "campaign_id": camp.campaign_id,
                    "system_id": out.system_id,
                    "segment_id": out.segment_id,
                    "text": out.hypothesis_text,
                },
                ensure_ascii=False,
            )
        for judgement in camp.judgements:
            yield json.dumps(
                {
                    "kind": "judgement",
                    "campaign_id": camp.campaign_id,
                    "annotator_id": judgement.annotator_id,
                    "system_id": judgement.system_id,
                    "segment_id": judgement.segment_id,
                    "score": judgement.score,
                },
                ensure_ascii=False,
            )
        for score_set in camp.metric_scores:
            if score_set.granularity == "system":
                for sys_id in sorted(score_set.scores):
                    yield json.dumps(
                        {
                            "kind": "metric_scores",
                            "campaign_id": camp.campaign_id,
                            "metric": score_set.metric_name,
                            "system_id": sys_id,
                            "granularity": "system",
                            "score": score_set.scores[sys_id],
                        },
                        ensure_ascii=False,
                    )
            else:
                for sys_id in score_set.system_ids():
                    per_segment = {
                        seg_id: score_set.scores[(sys_id, seg_id)] for seg_id in camp.segment_order
                    }
                    yield json.dumps(
                        {
                            "kind": "metric_scores",
                            "campaign_id": camp.campaign_id,
                            "metric": score_set.metric_name,
                            "system_id": sys_id,
                            "granularity": "segment",
                            "scores": per_segment,
                        },
                        ensure_ascii=False,
                    )


def serialize_collection(collection: Collection, path) -> None:
    """Write a collection back out as canonical JSONL."""
    with open(path, "w", encoding="utf-8") as handle:
        for line in iter_collection_lines(collection):
            handle.write(line + "\n")


def collection_hash(collection: Collection) -> str:
    """SHA-256 of the canonical serialization; identifies the analyzed data."""
    digest = hashlib.sha256()
    for line in iter_collection_lines(collection):
        digest.update(line.encode("utf-8"))
        digest.update(b"\n")
    return digest.hexdigest()


class CollectionBuilder:
    """Programmatic collection construction; the adaptation point for external data.

    Records are accumulated as JSONL lines and validated through the same
    parser as file loading, so a built collection is exactly as trustworthy
    as a loaded one.
    """

    def __init__(self, alphas: Sequence[float] = DEFAULT_ALPHAS, orientations: Mapping[str, str] | None = None):
        self._manifest = {
            "kind": "manifest",
            "schema_version": 1,
            "alphas": list(alphas),
            "orientations": dict(orientations or {}),
        }
        self._lines: list[str] = []

    def _add(self, record: dict) -> None:
        self._lines.append(json.dumps(record, ensure_ascii=False))

    def add_campaign(self, campaign_id: str, source_lang: str, target_lang: str,
                     domain: str = "none", group: str = "none") -> "CollectionBuilder":
        self._add({"kind": "campaign", "campaign_id": campaign_id, "source_lang": source_lang,
                   "target_lang": target_lang, "domain": domain, "group": group})
        return self

    def add_segment(self, campaign_id: str, segment_id: str, source: str,
                    reference: str | None = None) -> "CollectionBuilder":
        self._add({"kind": "segment", "campaign_id": campaign_id, "segment_id": segment_id,
                   "source": source, "reference": reference})
        return self

    def add_output(self, campaign_id: str, system_id: str, segment_id: str, text: str) -> "CollectionBuilder":
        self._add({"kind": "output", "campaign_id": campaign_id, "system_id": system_id,
                   "segment_id": segment_id, "text": text})
        return self

    def add_judgement(self, campaign_id: str, annotator_id: str, system_id: str,
                      segment_id: str, score: float) -> "CollectionBuilder":
        self._add({"kind": "judgement", "campaign_id": campaign_id, "annotator_id": annotator_id,
                   "system_id": system_id, "segment_id": segment_id, "score": score})
        return self

    def add_segment_scores(self, campaign_id: str, metric: str, system_id: str,
                           scores: Mapping[str, float]) -> "CollectionBuilder":
        self._add({"kind": "metric_scores", "campaign_id": campaign_id, "metric": metric,
                   "system_id": system_id, "granularity": "segment", "scores": dict(scores)})
        return self

    def add_system_score(self, campaign_id: str, metric: str, system_id: str, score: float) -> "CollectionBuilder":
        self._add({"kind": "metric_scores", "campaign_id": campaign_id, "metric": metric,
                   "system_id": system_id, "granularity": "system", "score": score})
        return self

    def lines(self) -> list[str]:
        return [json.dumps(self._manifest, ensure_ascii=False)] + list(self._lines)

    def build(self) -> Collection:
        return parse_collection_lines(self.lines())

    def write(self, path) -> None:
        with open(path, "w", encoding="utf-8") as handle:
            for line in self.lines():
                handle.write(line + "\n")


def read_external_scores(path) -> list[dict]:
    """Read an external metric score file.

    Rows are JSONL objects {metric_name, campaign_id, system_id, segment_id?,
    score}; rows without segment_id are system-level.
    """
    rows = []
    with open(path, encoding="utf-8") as handle:
        for line_no, raw in enumerate(handle, start=1):
            raw = raw.strip()
            if not raw:
                continue
            try:
                record = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise SchemaViolation(f"invalid JSON in score file: {exc.msg}", line=line_no) from exc
            if not isinstance(record, dict):
                raise SchemaViolation("score row is not an object", line=line_no)
            for key in ("metric_name", "campaign_id", "system_id"):
                _expect(record, key, str, line_no)
            _expect(record, "score", (int, float), line_no)
            if "segment_id" in record and not isinstance(record["segment_id"], str):
                raise SchemaViolation("field 'segment_id' has wrong type", line=line_no)
            rows.append(record)
    return rows


def merge_external_scores(collection: Collection, rows: Sequence[Mapping]) -> Collection:
    """Return a new collection with external score rows merged in.

    Orientation normalization uses the collection's declared orientations.
    Rows for one (campaign, metric) must be uniformly segment- or
    system-level; segment-level rows must cover the full segment set.
    """
    by_campaign: dict[str, dict[str, tuple[str | None, dict]]] = {}
    for index, row in enumerate(rows, start=1):
        campaign_id = row["campaign_id"]
        metric = row["metric_name"]
        granularity = "segment" if "segment_id" in row else "system"
        metrics = by_campaign.setdefault(campaign_id, {})
        gran0, scores = metrics.setdefault(metric, (granularity, {}))
        if gran0 != granularity:
            raise SchemaViolation(f"mixed granularity for metric {metric!r}", campaign_id, index)
        key = (row["system_id"], row["segment_id"]) if granularity == "segment" else row["system_id"]
        if key in scores:
            raise SchemaViolation(f"duplicate external score for {key!r}", campaign_id, index)
        scores[key] = _oriented(metric, float(row["score"]), collection.orientations)

    known = {camp.campaign_id for camp in collection.campaigns}
    for campaign_id in by_campaign:
        if campaign_id not in known:
            raise ReferentialViolation("external scores for unknown campaign", campaign_id)

    campaigns = []
    for camp in collection.campaigns:
        extra = by_campaign.get(camp.campaign_id)
        if not extra:
            campaigns.append(camp)
            continue
        existing = {s.metric_name for s in camp.metric_scores}
        segment_ids = set(camp.segment_order)
        systems = set(camp.system_ids)
        new_sets = []
        for metric in sorted(extra):
            granularity, scores = extra[metric]
            if metric in existing:
                raise SchemaViolation(f"metric {metric!r} already present", camp.campaign_id)
            if granularity == "segment":
                for sys_id, seg_id in scores:
                    if sys_id not in systems:
                        raise ReferentialViolation(f"score for unknown system {sys_id!r}", camp.campaign_id)
                    if seg_id not in segment_ids:
                        raise ReferentialViolation(f"score for unknown segment {seg_id!r}", camp.campaign_id)
                for sys_id in {s for s, _ in scores}:
                    covered = {seg for s, seg in scores if s == sys_id}
                    if covered != segment_ids:
                        raise CoverageViolation(
                            f"external metric {metric!r} covers {len(covered)}/{len(segment_ids)} "
                            f"segments for system {sys_id!r}",
                            camp.campaign_id,
                        )
            else:
                for sys_id in scores:
                    if sys_id not in systems:
                        raise ReferentialViolation(f"score for unknown system {sys_id!r}", camp.campaign_id)
            new_sets.append(MetricScoreSet(metric, granularity, scores))
        merged = tuple(sorted(camp.metric_scores + tuple(new_sets), key=lambda s: s.metric_name))
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
    return Collection(tuple(campaigns), collection.alphas, dict(collection.orientations))
