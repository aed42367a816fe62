"""Component terms and the English morphology the query templates need.

A component is a (usually multiword) lowercase noun phrase such as
"engine valves rocker arm". Its head is always the right-most constituent
word, which downstream stages use as a compositional fallback when the
full phrase is too sparse.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

from .errors import (
    DuplicateSurfaceError,
    EmptyDatasetError,
    EmptyInputError,
    TooManyConstituentsError,
)

logger = logging.getLogger(__name__)

MAX_CONSTITUENTS = 8

# Irregular plural overrides for the final word of a phrase. User-extensible
# via data/irregular_plurals.txt; this table is the built-in floor.
IRREGULAR_PLURALS = {
    "foot": "feet",
    "tooth": "teeth",
    "man": "men",
    "woman": "women",
    "child": "children",
    "mouse": "mice",
    "goose": "geese",
    "chassis": "chassis",
    "axis": "axes",
    "analysis": "analyses",
    "antenna": "antennae",
    "radius": "radii",
}

# First-word exceptions to the vowel-letter article rule. Prefixes whose
# initial vowel letter is pronounced with a consonant glide take "a";
# silent-h words take "an".
ARTICLE_A_PREFIXES = ("eu", "uni", "use", "usa", "one", "ut", "ubi", "uk")
ARTICLE_AN_WORDS = {"hour", "honest", "honour", "honor", "heir", "heirloom", "hourly"}


@dataclass(frozen=True)
class Component:
    """One target term: surface form, its constituent words, and its head."""

    surface: str
    constituents: tuple[str, ...]
    head: str
    plural_override: Optional[str] = None

    def __post_init__(self):
        if not self.constituents:
            raise EmptyInputError("component has no constituents")
        if " ".join(self.constituents) != self.surface:
            raise ValueError(
                f"constituents {self.constituents!r} do not join to surface {self.surface!r}"
            )
        if self.head != self.constituents[-1]:
            raise ValueError(f"head {self.head!r} is not the last constituent")


@dataclass
class ComponentDataset:
    """Deduplicated components plus an index from head word to members."""

    components: list[Component]
    by_head: dict[str, list[Component]] = field(default_factory=dict)

    def __post_init__(self):
        if not self.by_head:
            self.by_head = {}
            for c in self.components:
                self.by_head.setdefault(c.head, []).append(c)

    def __len__(self) -> int:
        return len(self.components)

    def multiword(self) -> list[Component]:
        return [c for c in self.components if len(c.constituents) > 1]

    def constituent_histogram(self) -> dict[int, int]:
        hist: dict[int, int] = {}
        for c in self.components:
            n = len(c.constituents)
            hist[n] = hist.get(n, 0) + 1
        return hist


def parse_component(
    raw: str,
    plural_override: Optional[str] = None,
    max_constituents: int = MAX_CONSTITUENTS,
) -> Component:
    """Normalize a raw term into a Component.

    Whitespace is collapsed, the surface lowercased, and the head set to
    the right-most constituent word.
    """
    constituents = tuple(raw.lower().split())
    if not constituents:
        raise EmptyInputError(f"empty component string: {raw!r}")
    if len(constituents) > max_constituents:
        raise TooManyConstituentsError(
            f"{raw!r} has {len(constituents)} constituents (cap {max_constituents})"
        )
    return Component(
        surface=" ".join(constituents),
        constituents=constituents,
        head=constituents[-1],
        plural_override=plural_override,
    )


def head_of(c: Component) -> Component:
    """Reduce a component to its right-most constituent word.

    Idempotent; the plural override of the full phrase does not carry over
    because it belongs to the phrase-final word in a different context.
    """
    return Component(surface=c.head, constituents=(c.head,), head=c.head)


def pluralize(
    noun_phrase: str,
    override: Optional[str] = None,
    irregulars: Optional[dict[str, str]] = None,
) -> str:
    """Pluralize the final word of a noun phrase.

    An explicit override wins; otherwise irregulars, then the rule cascade:
    consonant+y -> ies; s/x/z/ch/sh endings -> +es; default +s.
    """
    if override:
        return override
    words = noun_phrase.split()
    if not words:
        return noun_phrase
    last = words[-1]
    table = irregulars if irregulars is not None else IRREGULAR_PLURALS
    if last in table:
        plural = table[last]
    elif last.endswith("y") and len(last) > 1 and last[-2] not in "aeiou":
        plural = last[:-1] + "ies"
    elif last.endswith(("s", "x", "z", "ch", "sh")):
        plural = last + "es"
    else:
        plural = last + "s"
    return " ".join(words[:-1] + [plural])


def indefinite_article(noun_phrase: str) -> str:
    """Choose "a" or "an" for a noun phrase by its first word."""
    first = noun_phrase.split()[0]
    if first in ARTICLE_AN_WORDS:
        return "an"
    if first.startswith(ARTICLE_A_PREFIXES):
        return "a"
    return "an" if first[0] in "aeiou" else "a"


def load_component_dataset(
    path: str | Path,
    on_duplicate: str = "skip",
    max_constituents: int = MAX_CONSTITUENTS,
) -> ComponentDataset:
    """Load components from a file, one record per line.

    Lines are either a plain surface string or a JSON object
    {"surface": ..., "plural_override": ...}. Duplicate surfaces are
    skipped with a warning, or rejected when on_duplicate="error".
    """
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    components: list[Component] = []
    seen: set[str] = set()
    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("{"):
            record = json.loads(line)
            c = parse_component(
                record["surface"],
                plural_override=record.get("plural_override"),
                max_constituents=max_constituents,
            )
        else:
            c = parse_component(line, max_constituents=max_constituents)
        if c.surface in seen:
            if on_duplicate == "error":
                raise DuplicateSurfaceError(f"duplicate surface {c.surface!r} at line {lineno}")
            logger.warning("skipping duplicate component %r (line %d)", c.surface, lineno)
            continue
        seen.add(c.surface)
        components.append(c)
    if not components:
        raise EmptyDatasetError(f"no components found in {path}")
    return ComponentDataset(components=components)


def write_component_dataset(dataset: ComponentDataset, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for c in dataset.components:
            if c.plural_override:
                fh.write(json.dumps({"surface": c.surface, "plural_override": c.plural_override}))
                fh.write("\n")
            else:
                fh.write(c.surface + "\n")


def load_irregular_plurals(path: str | Path) -> dict[str, str]:
    """Read "singular<TAB>plural" lines into an override table."""
    table = dict(IRREGULAR_PLURALS)
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        singular, plural = line.split("\t")
        table[singular.strip()] = plural.strip()
    return table
