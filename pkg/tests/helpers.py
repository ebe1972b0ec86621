"""Shared test data builders.

``tiny_collection`` is a small hand-written two-campaign collection with
judgements, references, and one stored segment-level metric; its numbers are
chosen so human rankings and significance bands are easy to verify by hand.

``random_collection`` generates arbitrary valid collections together with a
plain-dict mirror of everything that went into them, so tests can recompute
every analysis independently from raw values.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field

from mtpairs import Collection, CollectionBuilder


def half_grid(value: float) -> float:
    """Clamp to [0, 100] and snap to the 0.5 grid (exactly representable)."""
    return min(100.0, max(0.0, round(value * 2.0) / 2.0))


def quarter_grid(value: float) -> float:
    """Clamp to [0, 100] and snap to the 0.25 grid (exactly representable)."""
    return min(100.0, max(0.0, round(value * 4.0) / 4.0))


# ---------------------------------------------------------------------------
# hand-written fixture collection

_DEMO_SEGMENTS_DE_EN = [
    ("s1", "der hund läuft", "the dog runs"),
    ("s2", "die katze schläft", "the cat sleeps"),
    ("s3", "das haus ist rot", "the house is red"),
    ("s4", "ich trinke kaffee", "i drink coffee"),
]

_DEMO_OUTPUTS_DE_EN = {
    "alpha": ["the dog runs", "the cat sleeps", "the house is red", "i drink tea"],
    "bravo": ["the dog ran", "a cat sleeps", "the house is red", "i drink coffee"],
    "charlie": ["dog the runs", "cat naps", "red house", "coffee i drink"],
}

# (system, annotator) -> scores per segment, all on the 0.5 grid
_DEMO_JUDGEMENTS_DE_EN = {
    ("alpha", "ann1"): [92, 95, 96, 70],
    ("alpha", "ann2"): [90, 93, 97, 72],
    ("bravo", "ann1"): [80, 78, 96, 95],
    ("bravo", "ann2"): [82, 75, 94, 96],
    ("charlie", "ann1"): [55, 40, 60, 58],
    ("charlie", "ann2"): [50, 42, 61, 57],
}

_DEMO_QE_DE_EN = {
    "alpha": [0.92, 0.94, 0.95, 0.65],
    "bravo": [0.80, 0.70, 0.93, 0.97],
    "charlie": [0.50, 0.45, 0.62, 0.60],
}

_DEMO_SEGMENTS_EN_ZH = [
    ("t1", "good morning", "早上好"),
    ("t2", "thank you very much", "非常感谢"),
    ("t3", "see you tomorrow", "明天见"),
]

_DEMO_OUTPUTS_EN_ZH = {
    "alpha": ["早上好", "非常感谢", "明天见"],
    "bravo": ["早上好", "多谢", "明天见到你"],
    "charlie": ["晚上好", "谢谢", "再见"],
}

_DEMO_JUDGEMENTS_EN_ZH = {
    ("alpha", "ann3"): [98, 97, 99],
    ("bravo", "ann3"): [88, 70, 75],
    ("charlie", "ann3"): [40, 66, 50],
}

_DEMO_QE_EN_ZH = {
    "alpha": [0.98, 0.96, 0.99],
    "bravo": [0.85, 0.72, 0.70],
    "charlie": [0.45, 0.60, 0.52],
}


def tiny_builder(include_judgements: bool = True) -> CollectionBuilder:
    builder = CollectionBuilder()
    builder.add_campaign("demo-de-en", "de", "en", domain="news", group="round1")
    for segment_id, source, reference in _DEMO_SEGMENTS_DE_EN:
        builder.add_segment("demo-de-en", segment_id, source, reference)
    for system, outputs in _DEMO_OUTPUTS_DE_EN.items():
        for (segment_id, _, _), text in zip(_DEMO_SEGMENTS_DE_EN, outputs):
            builder.add_output("demo-de-en", system, segment_id, text)
    if include_judgements:
        for (system, annotator), scores in _DEMO_JUDGEMENTS_DE_EN.items():
            for (segment_id, _, _), score in zip(_DEMO_SEGMENTS_DE_EN, scores):
                builder.add_judgement("demo-de-en", annotator, system, segment_id, score)
    for system, scores in _DEMO_QE_DE_EN.items():
        builder.add_segment_scores(
            "demo-de-en", "demoqe", system,
            {seg[0]: score for seg, score in zip(_DEMO_SEGMENTS_DE_EN, scores)},
        )

    builder.add_campaign("demo-en-zh", "en", "zh", domain="chat", group="round2")
    for segment_id, source, reference in _DEMO_SEGMENTS_EN_ZH:
        builder.add_segment("demo-en-zh", segment_id, source, reference)
    for system, outputs in _DEMO_OUTPUTS_EN_ZH.items():
        for (segment_id, _, _), text in zip(_DEMO_SEGMENTS_EN_ZH, outputs):
            builder.add_output("demo-en-zh", system, segment_id, text)
    if include_judgements:
        for (system, annotator), scores in _DEMO_JUDGEMENTS_EN_ZH.items():
            for (segment_id, _, _), score in zip(_DEMO_SEGMENTS_EN_ZH, scores):
                builder.add_judgement("demo-en-zh", annotator, system, segment_id, score)
    for system, scores in _DEMO_QE_EN_ZH.items():
        builder.add_segment_scores(
            "demo-en-zh", "demoqe", system,
            {seg[0]: score for seg, score in zip(_DEMO_SEGMENTS_EN_ZH, scores)},
        )
    return builder


def tiny_collection(include_judgements: bool = True) -> Collection:
    return tiny_builder(include_judgements).build()


def tiny_lines(include_judgements: bool = True) -> list[str]:
    return tiny_builder(include_judgements).lines()


# ---------------------------------------------------------------------------
# random collections with a raw mirror


@dataclass
class RawCampaign:
    """Plain-value mirror of one generated campaign."""

    campaign_id: str
    systems: list[str]
    segments: list[str]
    # (system, segment, annotator) -> judgement score
    judgements: dict[tuple[str, str, str], float] = field(default_factory=dict)
    # (segment, annotator) units every system was judged on, sorted
    units: list[tuple[str, str]] = field(default_factory=list)
    # metric -> system -> segment -> score
    seg_scores: dict[str, dict[str, dict[str, float]]] = field(default_factory=dict)
    # metric -> system -> score
    sys_scores: dict[str, dict[str, float]] = field(default_factory=dict)


@dataclass
class RawCollection:
    alphas: tuple[float, ...]
    campaigns: list[RawCampaign]
    seg_metrics: list[str]
    sys_metrics: list[str]


_LANGUAGE_PAIRS = [("de", "en"), ("en", "de"), ("zh", "en"), ("en", "zh"), ("fr", "de")]


def random_collection(index: int) -> tuple[Collection, RawCollection]:
    """Generate collection number ``index`` (deterministic) plus its raw mirror.

    Shapes vary from minimal (one campaign, two systems, three segments) up to
    the documented analysis ceilings (20 campaigns, 4 systems, 50 segments).
    """
    rng = random.Random(987_000 + index)
    if index == 0:
        n_campaigns = 20
    elif index == 1:
        n_campaigns = 1
    else:
        n_campaigns = rng.choice([1, 1, 2, 2, 3, 4])
    seg_metrics = ["qe-main", "qe-alt"]
    sys_metrics = ["sys-only"] if rng.random() < 0.4 else []

    builder = CollectionBuilder()
    raw = RawCollection(
        alphas=(0.05, 0.01, 0.001),
        campaigns=[],
        seg_metrics=seg_metrics,
        sys_metrics=sys_metrics,
    )
    for c in range(n_campaigns):
        source_lang, target_lang = _LANGUAGE_PAIRS[rng.randrange(len(_LANGUAGE_PAIRS))]
        campaign_id = f"camp{c:02d}-{source_lang}-{target_lang}"
        domain = rng.choice(["news", "chat", "social"])
        group = rng.choice(["g1", "g2"])
        builder.add_campaign(campaign_id, source_lang, target_lang, domain=domain, group=group)

        if index == 1 and c == 0:
            n_segments = 50
        else:
            n_segments = rng.randint(3, 12)
        segments = [f"seg{i:03d}" for i in range(n_segments)]
        for segment_id in segments:
            builder.add_segment(campaign_id, segment_id, f"source text {segment_id}",
                                f"reference text {segment_id}")

        n_systems = rng.randint(2, 4)
        systems = sorted(f"sys{chr(97 + i)}" for i in range(n_systems))
        quality = {system: rng.uniform(30.0, 70.0) for system in systems}
        for system in systems:
            for segment_id in segments:
                builder.add_output(campaign_id, system, segment_id,
                                   f"output of {system} for {segment_id}")

        campaign = RawCampaign(campaign_id=campaign_id, systems=systems, segments=segments)
        annotators = [f"ann{i}" for i in range(rng.randint(1, 4))]
        for annotator in annotators:
            judged = [s for s in segments if rng.random() < 0.8]
            if not judged:
                judged = [rng.choice(segments)]
            for segment_id in judged:
                campaign.units.append((segment_id, annotator))
                for system in systems:
                    score = half_grid(quality[system] + rng.gauss(0.0, 12.0))
                    campaign.judgements[(system, segment_id, annotator)] = score
                    builder.add_judgement(campaign_id, annotator, system, segment_id, score)
        campaign.units.sort()

        for metric in seg_metrics:
            campaign.seg_scores[metric] = {}
            for system in systems:
                per_segment = {}
                for segment_id in segments:
                    if metric == "qe-main":
                        score = quarter_grid(quality[system] + rng.gauss(0.0, 10.0))
                    else:
                        score = quarter_grid(50.0 + rng.gauss(0.0, 18.0))
                    per_segment[segment_id] = score
                campaign.seg_scores[metric][system] = per_segment
                builder.add_segment_scores(campaign_id, metric, system, per_segment)
        for metric in sys_metrics:
            campaign.sys_scores[metric] = {}
            for system in systems:
                score = round(quality[system] + rng.gauss(0.0, 6.0), 4)
                campaign.sys_scores[metric][system] = score
                builder.add_system_score(campaign_id, metric, system, score)
        raw.campaigns.append(campaign)
    return builder.build(), raw
