"""Language metadata: writing-script lookup and pair direction classes.

Script classes are declared per language code rather than sniffed from text,
so subset membership of a campaign never depends on its content.
"""
from __future__ import annotations

__all__ = [
    "direction_class",
    "normalize_lang",
    "script_of",
    "script_class",
    "is_latin_script",
    "is_logographic_script",
]

# ISO 639-1 code -> writing script. "han-kana" marks Japanese's mixed script;
# for class purposes it counts as logographic alongside Han and Hangul.
_SCRIPTS = {
    "af": "latin",
    "ar": "arabic",
    "be": "cyrillic",
    "bg": "cyrillic",
    "bn": "bengali",
    "ca": "latin",
    "cs": "latin",
    "cy": "latin",
    "da": "latin",
    "de": "latin",
    "el": "greek",
    "en": "latin",
    "eo": "latin",
    "es": "latin",
    "et": "latin",
    "eu": "latin",
    "fa": "arabic",
    "fi": "latin",
    "fr": "latin",
    "ga": "latin",
    "gl": "latin",
    "gu": "gujarati",
    "he": "hebrew",
    "hi": "devanagari",
    "hr": "latin",
    "hu": "latin",
    "hy": "armenian",
    "id": "latin",
    "is": "latin",
    "it": "latin",
    "ja": "han-kana",
    "ka": "georgian",
    "kk": "cyrillic",
    "km": "khmer",
    "ko": "hangul",
    "lt": "latin",
    "lv": "latin",
    "mk": "cyrillic",
    "mr": "devanagari",
    "ms": "latin",
    "mt": "latin",
    "nb": "latin",
    "nl": "latin",
    "nn": "latin",
    "no": "latin",
    "pa": "gurmukhi",
    "pl": "latin",
    "ps": "arabic",
    "pt": "latin",
    "ro": "latin",
    "ru": "cyrillic",
    "sk": "latin",
    "sl": "latin",
    "sq": "latin",
    "sr": "cyrillic",
    "sv": "latin",
    "sw": "latin",
    "ta": "tamil",
    "th": "thai",
    "tr": "latin",
    "uk": "cyrillic",
    "ur": "arabic",
    "vi": "latin",
    "zh": "han",
}

_LOGOGRAPHIC = frozenset({"han", "han-kana", "hangul"})


def normalize_lang(code: str) -> str:
    """Lowercase a language tag and strip any region subtag ("zh-CN" -> "zh")."""
    return code.strip().lower().replace("_", "-").split("-")[0]


def script_of(lang: str) -> str:
    """Return the writing script for a language code, or "unknown"."""
    return _SCRIPTS.get(normalize_lang(lang), "unknown")


def script_class(lang: str) -> str:
    """Three-way script class of a language: latin, non-latin, or logogram.

    Languages missing from the bundled table classify as "unknown", which
    matches no script filter.
    """
    script = script_of(lang)
    if script == "unknown":
        return "unknown"
    if script in _LOGOGRAPHIC:
        return "logogram"
    if script == "latin":
        return "latin"
    return "non-latin"


def is_latin_script(script: str) -> bool:
    return script == "latin"


def is_logographic_script(script: str) -> bool:
    return script in _LOGOGRAPHIC


def direction_class(source_lang: str, target_lang: str) -> str:
    """Classify a language pair as into-english, from-english, or non-english.

    A pair with English on neither side is non-english; English-to-English
    (not a real use case, but representable) counts as into-english.
    """
    if normalize_lang(target_lang) == "en":
        return "into-english"
    if normalize_lang(source_lang) == "en":
        return "from-english"
    return "non-english"
