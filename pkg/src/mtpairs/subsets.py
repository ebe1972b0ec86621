"""Pair-subset selection: tag filters and human-significance bands.

A subset spec picks system pairs by campaign tags (language direction,
target-script class, domain, group) and/or by where the human-judgement
p-value falls (at most some alpha, or inside a band). Filtering preserves
input order, and every filtered subset has a stable fingerprint so that
analyses claiming to describe "the same subset" can prove it.
"""
from __future__ import annotations

import hashlib
import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence

__all__ = [
    "DIRECTION_CLASSES",
    "SCRIPT_CLASSES",
    "DEFAULT_WITHIN_BAND",
    "SubsetSpec",
    "UnknownTagWarning",
    "parse_subset_spec",
    "filter_pairs",
    "subset_fingerprint",
]

DIRECTION_CLASSES = ("into-english", "from-english", "non-english")
SCRIPT_CLASSES = ("latin", "non-latin", "logogram")
DEFAULT_WITHIN_BAND = (0.001, 0.05)


class UnknownTagWarning(UserWarning):
    """A subset filter names a tag value absent from the records."""


def _format_alpha(alpha: float) -> str:
    return f"{alpha:g}"


@dataclass(frozen=True, slots=True)
class SubsetSpec:
    """Predicate over delta records; None fields match everything.

    :param direction: language-direction class (into-english / from-english /
        non-english)
    :param script: target-script class (latin / non-latin / logogram)
    :param domain: domain tag
    :param group: group tag
    :param max_p_alpha: keep pairs whose human p-value is <= this alpha
    :param within: keep pairs whose human p-value lies in (lo, hi]
    """

    direction: str | None = None
    script: str | None = None
    domain: str | None = None
    group: str | None = None
    max_p_alpha: float | None = None
    within: tuple[float, float] | None = None

    def __post_init__(self) -> None:
        if self.direction is not None and self.direction not in DIRECTION_CLASSES:
            raise ValueError(f"unknown direction class {self.direction!r}")
        if self.script is not None and self.script not in SCRIPT_CLASSES:
            raise ValueError(f"unknown script class {self.script!r}")
        if self.max_p_alpha is not None and not 0 < self.max_p_alpha < 1:
            raise ValueError(f"alpha {self.max_p_alpha!r} outside (0, 1)")
        if self.within is not None:
            lo, hi = self.within
            if not 0 <= lo < hi <= 1:
                raise ValueError(f"within band {self.within!r} is not a band inside [0, 1]")

    @property
    def needs_human_p(self) -> bool:
        return self.max_p_alpha is not None or self.within is not None

    def matches(self, record) -> bool:
        """Whether a delta record satisfies every filter of this spec."""
        if self.direction is not None and record.direction != self.direction:
            return False
        if self.script is not None and record.script != self.script:
            return False
        if self.domain is not None and record.domain != self.domain:
            return False
        if self.group is not None and record.group != self.group:
            return False
        if self.max_p_alpha is not None:
            if record.human_p is None or not record.human_p <= self.max_p_alpha:
                return False
        if self.within is not None:
            lo, hi = self.within
            if record.human_p is None or not lo < record.human_p <= hi:
                return False
        return True

    def describe(self) -> str:
        """Stable human-readable description, used in errors and fingerprints."""
        parts = []
        for label, value in (
            ("direction", self.direction),
            ("script", self.script),
            ("domain", self.domain),
            ("group", self.group),
        ):
            if value is not None:
                parts.append(f"{label}={value}")
        if self.max_p_alpha is not None:
            parts.append(f"human p <= {_format_alpha(self.max_p_alpha)}")
        if self.within is not None:
            lo, hi = self.within
            parts.append(f"human p in ({_format_alpha(lo)}, {_format_alpha(hi)}]")
        return ", ".join(parts) if parts else "all pairs"


def parse_subset_spec(text: str) -> SubsetSpec:
    """Parse a "key=value,key=value" subset expression.

    Keys: direction, script, domain, group, alpha (a float), within (true, or
    an explicit "lo:hi" band). "all" or the empty string selects everything.
    """
    text = text.strip()
    if not text or text.lower() == "all":
        return SubsetSpec()
    fields: dict = {}
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        if "=" not in chunk:
            raise ValueError(f"subset clause {chunk!r} is not key=value")
        key, _, value = chunk.partition("=")
        key = key.strip().lower()
        value = value.strip()
        if key in ("direction", "script", "domain", "group"):
            fields[key] = value
        elif key == "alpha":
            try:
                fields["max_p_alpha"] = float(value)
            except ValueError:
                raise ValueError(f"bad alpha value {value!r}") from None
        elif key == "within":
            if value.lower() in ("true", "1", "yes"):
                fields["within"] = DEFAULT_WITHIN_BAND
            else:
                lo, sep, hi = value.partition(":")
                if not sep:
                    raise ValueError(f"bad within value {value!r}; use true or lo:hi")
                try:
                    fields["within"] = (float(lo), float(hi))
                except ValueError:
                    raise ValueError(f"bad within band {value!r}") from None
        else:
            raise ValueError(f"unknown subset key {key!r}")
    return SubsetSpec(**fields)


def filter_pairs(records: Sequence, spec: SubsetSpec) -> list:
    """Select the records matching a subset spec, preserving input order.

    A tag filter naming a value that appears on no record at all yields an
    empty subset and an UnknownTagWarning, since nothing could ever match.
    """
    records = list(records)
    for label, value in (
        ("direction", spec.direction),
        ("script", spec.script),
        ("domain", spec.domain),
        ("group", spec.group),
    ):
        if value is None:
            continue
        present = {getattr(record, label) for record in records}
        if value not in present:
            warnings.warn(
                f"subset {label} tag {value!r} matches no records; subset is empty",
                UnknownTagWarning,
                stacklevel=2,
            )
            return []
    return [record for record in records if spec.matches(record)]


def subset_fingerprint(description: str, records: Iterable) -> str:
    """Digest binding a subset description to the exact pairs it selected.

    Reports refuse to combine analyses whose fingerprints differ; the pair
    keys are sorted so that record order does not matter.
    """
    digest = hashlib.sha256()
    digest.update(description.encode("utf-8"))
    keys = sorted(
        (record.pair.campaign_id, record.pair.system_a, record.pair.system_b)
        for record in records
    )
    for key in keys:
        digest.update(b"\x00")
        digest.update("\x1f".join(key).encode("utf-8"))
    return digest.hexdigest()
