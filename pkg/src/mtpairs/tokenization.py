"""Tokenization for the built-in string metrics.

Two schemes are provided. The default scheme applies the language-independent
normalization rules of the classic mteval v13a script (entity unescaping,
punctuation splitting, digit-aware period/comma/dash handling). The cjk-char
scheme additionally splits ideographic, kana, and hangul code points into
single-character tokens while leaving embedded Latin runs to the default
rules, so "你好world" becomes ["你", "好", "world"].

Both schemes are deterministic and idempotent on their own output.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

__all__ = ["TokenizationScheme", "DEFAULT_SCHEME", "CJK_CHAR_SCHEME", "tokenize", "scheme_for_language"]


@dataclass(frozen=True, slots=True)
class TokenizationScheme:
    """Named tokenization rule set.

    :param name: "international-default" or "cjk-char"
    :param lowercase: lowercase the line before tokenizing (default off)
    """

    name: str = "international-default"
    lowercase: bool = False

    def __post_init__(self) -> None:
        if self.name not in ("international-default", "cjk-char"):
            raise ValueError(f"unknown tokenization scheme: {self.name!r}")


DEFAULT_SCHEME = TokenizationScheme("international-default")
CJK_CHAR_SCHEME = TokenizationScheme("cjk-char")

# Punctuation characters split off unconditionally: the ASCII ranges
# {-~, [-`, space-&, (-+, :-@ plus the slash, as in mteval v13a.
_PUNCT_RE = re.compile(r"([\{-\~\[-\` -\&\(-\+\:-\@\/])")
_PERIOD_COMMA_BEFORE_RE = re.compile(r"([^0-9])([\.,])")
_PERIOD_COMMA_AFTER_RE = re.compile(r"([\.,])([^0-9])")
_DIGIT_DASH_RE = re.compile(r"([0-9])(-)")
_SPACE_RE = re.compile(r"\s+")

# Code-point ranges split to single-character tokens under cjk-char:
# ideographic (CJK unified + extensions + compatibility), kana, hangul.
_CJK_RANGES = (
    (0x3040, 0x309F),  # hiragana
    (0x30A0, 0x30FF),  # katakana
    (0x31F0, 0x31FF),  # katakana phonetic extensions
    (0x3400, 0x4DBF),  # CJK unified ideographs extension A
    (0x4E00, 0x9FFF),  # CJK unified ideographs
    (0xF900, 0xFAFF),  # CJK compatibility ideographs
    (0x1100, 0x11FF),  # hangul jamo
    (0x3130, 0x318F),  # hangul compatibility jamo
    (0xA960, 0xA97F),  # hangul jamo extended-A
    (0xAC00, 0xD7AF),  # hangul syllables
    (0xD7B0, 0xD7FF),  # hangul jamo extended-B
    (0xFF66, 0xFF9F),  # halfwidth katakana
    (0x20000, 0x2A6DF),  # CJK unified ideographs extension B
    (0x2A700, 0x2EBEF),  # CJK unified ideographs extensions C-F
    (0x2F800, 0x2FA1F),  # CJK compatibility ideographs supplement
)


def _is_cjk_char(cp: int) -> bool:
    for lo, hi in _CJK_RANGES:
        if lo <= cp <= hi:
            return True
    return False


def _normalize_default(line: str) -> str:
    """Apply the v13a-equivalent normalization and return a spaced string.

    :param line: raw segment text
    :return: text with token boundaries marked by single spaces
    """
    norm = line
    norm = norm.replace("-\n", "")
    norm = norm.replace("\n", " ")
    norm = norm.replace("&quot;", '"')
    norm = norm.replace("&amp;", "&")
    norm = norm.replace("&lt;", "<")
    norm = norm.replace("&gt;", ">")
    norm = " {} ".format(norm)
    norm = _PUNCT_RE.sub(r" \1 ", norm)
    norm = _PERIOD_COMMA_BEFORE_RE.sub(r"\1 \2 ", norm)
    norm = _PERIOD_COMMA_AFTER_RE.sub(r" \1 \2", norm)
    norm = _DIGIT_DASH_RE.sub(r"\1 \2 ", norm)
    norm = _SPACE_RE.sub(" ", norm)
    return norm.strip()


def _pad_cjk(line: str) -> str:
    out = []
    for ch in line:
        if _is_cjk_char(ord(ch)):
            out.append(" ")
            out.append(ch)
            out.append(" ")
        else:
            out.append(ch)
    return "".join(out)


def tokenize(text: str, scheme: TokenizationScheme = DEFAULT_SCHEME) -> tuple[str, ...]:
    """Tokenize a segment under the given scheme.

    :param text: unicode segment text
    :param scheme: tokenization scheme (default: international-default)
    :return: tuple of tokens; empty input yields an empty tuple
    """
    if scheme.lowercase:
        text = text.lower()
    if scheme.name == "cjk-char":
        text = _pad_cjk(text)
    return tuple(_normalize_default(text).split())


def scheme_for_language(target_lang: str) -> TokenizationScheme:
    """Pick the scheme a target language calls for (cjk-char for zh/ja)."""
    from .languages import normalize_lang

    if normalize_lang(target_lang) in ("zh", "ja"):
        return CJK_CHAR_SCHEME
    return DEFAULT_SCHEME
