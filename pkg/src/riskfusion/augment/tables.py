from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from ..exceptions import ValidationError

_HEX_SEQ = re.compile(r"^(?:U\+)?[0-9A-Fa-f]{4,6}(?:[-_ ](?:U\+)?[0-9A-Fa-f]{4,6})*$")


@dataclass(frozen=True)
class ExpansionTable:
    """Token (or emoji sequence) to replacement text.

    ``case_insensitive`` tables store lower-cased keys; lookups fold case.
    """

    entries: dict
    case_insensitive: bool = True

    def __post_init__(self):
        fixed = {}
        for k, v in dict(self.entries).items():
            if not k or any(ch.isspace() for ch in k):
                raise ValidationError(f"invalid table key {k!r}: must be non-empty without whitespace")
            key = k.lower() if self.case_insensitive else k
            if key == (v.lower() if self.case_insensitive else v):
                raise ValidationError(f"table key {k!r} maps to itself")
            if key in fixed and fixed[key] != v:
                raise ValidationError(f"conflicting entries for key {k!r}")
            fixed[key] = v
        object.__setattr__(self, "entries", fixed)

    def __len__(self):
        return len(self.entries)

    def __contains__(self, key):
        return self._norm(key) in self.entries

    def _norm(self, key):
        return key.lower() if self.case_insensitive else key

    def lookup(self, key, default=None):
        return self.entries.get(self._norm(key), default)

    @property
    def max_key_length(self) -> int:
        return max((len(k) for k in self.entries), default=0)


def _read_tsv(lines, decode_key=None) -> dict:
    entries = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.rstrip("\n").rstrip("\r")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ValidationError(f"table line {lineno}: expected 2 tab-separated columns, got {len(parts)}")
        key, value = parts[0].strip(), parts[1].strip()
        entries[decode_key(key) if decode_key else key] = value
    return entries


def decode_codepoints(key: str) -> str:
    """``"2764-fe0f"`` / ``"U+1F622"`` -> characters; literal emoji pass through."""
    if _HEX_SEQ.match(key):
        parts = re.split(r"[-_ ]", key)
        return "".join(chr(int(p[2:] if p.upper().startswith("U+") else p, 16)) for p in parts)
    return key


def load_abbreviation_table(path=None) -> ExpansionTable:
    if path is None:
        text = resources.files("riskfusion.augment").joinpath("data/abbreviations.tsv").read_text("utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    return ExpansionTable(_read_tsv(text.splitlines()), case_insensitive=True)


def load_emoji_table(path=None) -> ExpansionTable:
    if path is None:
        text = resources.files("riskfusion.augment").joinpath("data/emojis.tsv").read_text("utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    return ExpansionTable(_read_tsv(text.splitlines(), decode_codepoints), case_insensitive=False)
