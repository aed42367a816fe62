"""Word-boundary, case-insensitive exact phrase matching.

Shared by corpus filtering and component-material linking so the whole
repository agrees on what "the sentence mentions this component" means.
"""

from __future__ import annotations

import re
from typing import Iterable, Sequence


def _phrase_regex(phrase: str) -> re.Pattern:
    words = phrase.lower().split()
    return re.compile(r"\b" + r"\s+".join(re.escape(w) for w in words) + r"\b")


class PhraseMatcher:
    """Matches a fixed set of phrases against text.

    A cheap first-word prefilter keeps scanning fast when the phrase set
    is large; the regex then enforces exact word-boundary phrase match.
    """

    def __init__(self, phrases: Iterable[str]):
        self._by_first_word: dict[str, list[tuple[str, re.Pattern]]] = {}
        seen = set()
        for phrase in phrases:
            normalized = " ".join(phrase.lower().split())
            if not normalized or normalized in seen:
                continue
            seen.add(normalized)
            first = normalized.split()[0]
            self._by_first_word.setdefault(first, []).append(
                (normalized, _phrase_regex(normalized))
            )

    def find_all(self, text: str) -> list[str]:
        """Return the matched phrases (normalized form), each at most once."""
        lowered = text.lower()
        words = set(re.findall(r"\w+", lowered))
        hits = []
        for first, entries in self._by_first_word.items():
            if first not in words:
                continue
            for normalized, pattern in entries:
                if pattern.search(lowered):
                    hits.append(normalized)
        return sorted(hits)

    def matches(self, text: str) -> bool:
        lowered = text.lower()
        words = set(re.findall(r"\w+", lowered))
        for first, entries in self._by_first_word.items():
            if first not in words:
                continue
            if any(pattern.search(lowered) for _, pattern in entries):
                return True
        return False


def contains_phrase(text: str, phrase: str) -> bool:
    return _phrase_regex(" ".join(phrase.lower().split())).search(text.lower()) is not None
