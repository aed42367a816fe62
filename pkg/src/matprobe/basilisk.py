"""Pattern-based bootstrapping of a material lexicon from parsed text.

Classic single-category bootstrapping: starting from seed words, score
dependency context patterns by RlogF = (F/N) * log2(F), pour the
extractions of the best patterns into a candidate pool, score candidates
by AvgLog = mean(log2(F_j + 1)) over their extracting patterns, and admit
the best few per round. Linking then pairs learned material words with
component mentions co-occurring in raw sentences.
"""

from __future__ import annotations

import logging
import math
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Optional, Sequence

from .components import ComponentDataset
from .errors import ConlluParseError, EmptySupportError, NoSeedEvidenceError
from .matching import PhraseMatcher, contains_phrase

logger = logging.getLogger(__name__)

EXCLUDED = float("-inf")  # RlogF sentinel for patterns with no category evidence


@dataclass(frozen=True)
class ParsedToken:
    index: int  # 1-based position within the sentence
    form: str
    lemma: str
    upos: str
    head: int  # 0 = root
    deprel: str


@dataclass(frozen=True)
class ExtractionPattern:
    key: str
    F: int  # distinct extracted words that are category members
    N: int  # distinct extracted words in total


@dataclass(frozen=True)
class LexiconEntry:
    word: str
    avg_log_score: float
    round_added: int


@dataclass(frozen=True)
class BootstrapConfig:
    seeds: tuple[str, ...]
    pattern_pool_base: int = 20
    pattern_pool_growth_per_round: int = 1
    words_per_round: int = 5
    max_lexicon: int = 200
    max_rounds: int = 10

    def __post_init__(self):
        if self.pattern_pool_base < 1 or self.words_per_round < 1 or self.max_lexicon < 1:
            raise ValueError("pool sizes and words per round must be positive")
        if self.pattern_pool_growth_per_round < 0 or self.max_rounds < 0:
            raise ValueError("growth and max_rounds must be non-negative")
        if self.max_lexicon < self.words_per_round:
            raise ValueError("max_lexicon must be >= words_per_round")


# Ten material seed nouns; usable as-is or replaced via a seed file.
DEFAULT_SEEDS = (
    "water", "steel", "metal", "glass", "rubber",
    "plastic", "aluminum", "copper", "polyester", "quartz",
)


def parse_conllu(path: str | Path) -> list[list[ParsedToken]]:
    """Parse a CoNLL-U file into sentences of tokens.

    Multiword-token ranges (id "1-2") and empty nodes (id "1.1") are
    skipped; comments and blank lines delimit sentences.
    """
    sentences: list[list[ParsedToken]] = []
    current: list[ParsedToken] = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = line.rstrip("\n")
        if not line.strip():
            if current:
                sentences.append(current)
                current = []
            continue
        if line.startswith("#"):
            continue
        cols = line.split("\t")
        if len(cols) != 10:
            raise ConlluParseError(f"line {lineno}: expected 10 columns, got {len(cols)}")
        token_id = cols[0]
        if "-" in token_id or "." in token_id:
            continue
        try:
            index = int(token_id)
            head = int(cols[6]) if cols[6] != "_" else 0
        except ValueError as exc:
            raise ConlluParseError(f"line {lineno}: bad token or head id: {exc}") from exc
        if not cols[7] or cols[7] == "_":
            raise ConlluParseError(f"line {lineno}: missing deprel")
        current.append(
            ParsedToken(
                index=index,
                form=cols[1],
                lemma=cols[2] if cols[2] != "_" else cols[1].lower(),
                upos=cols[3],
                head=head,
                deprel=cols[7],
            )
        )
    if current:
        sentences.append(current)
    for sentence in sentences:
        size = len(sentence)
        for tok in sentence:
            if tok.head < 0 or tok.head > max(t.index for t in sentence):
                raise ConlluParseError(f"head index {tok.head} out of bounds in sentence")
    return sentences


def _default_noun_filter(token: ParsedToken) -> bool:
    return token.upos == "NOUN"


def extract_pattern_occurrences(
    sentences: Iterable[Sequence[ParsedToken]],
    noun_filter: Optional[Callable[[ParsedToken], bool]] = None,
) -> list[tuple[str, str]]:
    """Emit (pattern_key, extracted_word) for every dependency edge that
    touches a noun.

    The key encodes the anchor's role relative to the noun (Gov when the
    anchor governs it, Dep when the anchor depends on it), the deprel, the
    noun's own slot role, and the anchor's lemma:

        Gov:obl:dependent:manufacture   extracts "iron"
        Dep:compound:governor:aluminium extracts "alloy"
    """
    keep = noun_filter or _default_noun_filter
    occurrences: list[tuple[str, str]] = []
    for sentence in sentences:
        by_index = {t.index: t for t in sentence}
        for token in sentence:
            if not keep(token):
                continue
            if token.head != 0 and token.head in by_index:
                governor = by_index[token.head]
                occurrences.append(
                    (f"Gov:{token.deprel}:dependent:{governor.lemma}", token.lemma)
                )
            for other in sentence:
                if other.head == token.index:
                    occurrences.append(
                        (f"Dep:{other.deprel}:governor:{other.lemma}", token.lemma)
                    )
    return occurrences


def score_pattern_rlogf(F: int, N: int) -> float:
    """RlogF = (F/N) * log2(F); F = 0 is excluded outright."""
    if N < 1:
        raise ValueError("N must be >= 1")
    if not 0 <= F <= N:
        raise ValueError(f"need 0 <= F <= N, got F={F} N={N}")
    if F == 0:
        return EXCLUDED
    return (F / N) * math.log2(F)


def score_word_avglog(word: str, patterns: Sequence[ExtractionPattern]) -> float:
    """AvgLog = mean over extracting patterns of log2(F + 1)."""
    if not patterns:
        raise EmptySupportError(f"no patterns extract {word!r}")
    return sum(math.log2(p.F + 1) for p in patterns) / len(patterns)


def bootstrap(
    occurrences: Sequence[tuple[str, str]],
    cfg: BootstrapConfig,
) -> list[LexiconEntry]:
    """Grow a material lexicon from seeds over alternating pattern/word pools.

    Per round i: recompute F against lexicon plus seeds, pool the top
    (base + (i-1) * growth) patterns by RlogF, collect their extractions as
    candidates, score candidates by AvgLog over all patterns extracting
    them, and admit the top words_per_round. Deterministic: pattern ties
    break on higher F then key, word ties break lexicographically.
    """
    extractions: dict[str, set[str]] = {}
    extracted_by: dict[str, set[str]] = {}
    for key, word in occurrences:
        extractions.setdefault(key, set()).add(word)
        extracted_by.setdefault(word, set()).add(key)

    vocabulary = set(extracted_by)
    present_seeds = [s for s in cfg.seeds if s in vocabulary]
    for seed in cfg.seeds:
        if seed not in vocabulary:
            logger.warning("seed %r never extracted from the corpus", seed)
    if not present_seeds:
        raise NoSeedEvidenceError("no seed word occurs in the corpus extractions")

    known: set[str] = set(cfg.seeds)
    lexicon: list[LexiconEntry] = []

    for round_index in range(1, cfg.max_rounds + 1):
        if len(lexicon) >= cfg.max_lexicon:
            break
        f_counts = {key: len(words & known) for key, words in extractions.items()}
        scored_patterns = sorted(
            (
                (score_pattern_rlogf(f_counts[key], len(words)), f_counts[key], key)
                for key, words in extractions.items()
                if f_counts[key] > 0
            ),
            key=lambda row: (-row[0], -row[1], row[2]),
        )
        pool_size = cfg.pattern_pool_base + (round_index - 1) * cfg.pattern_pool_growth_per_round
        pool = [key for _, _, key in scored_patterns[:pool_size]]

        candidates = set()
        for key in pool:
            candidates |= extractions[key]
        candidates -= known
        if not candidates:
            break

        def avglog(word: str) -> float:
            supports = [
                ExtractionPattern(key=key, F=f_counts[key], N=len(extractions[key]))
                for key in extracted_by[word]
            ]
            return score_word_avglog(word, supports)

        ranked_words = sorted(candidates, key=lambda w: (-avglog(w), w))
        budget = min(cfg.words_per_round, cfg.max_lexicon - len(lexicon))
        for word in ranked_words[:budget]:
            lexicon.append(
                LexiconEntry(word=word, avg_log_score=avglog(word), round_added=round_index)
            )
            known.add(word)
    return lexicon


def link_counts(
    sentences_raw: Iterable[str],
    components: ComponentDataset,
    material_words: Iterable[str],
) -> dict[tuple[str, str], int]:
    """Sentence co-occurrence counts for (component surface, material) pairs."""
    matcher = PhraseMatcher(c.surface for c in components.components)
    materials = sorted(set(material_words))
    counts: dict[tuple[str, str], int] = {}
    for sentence in sentences_raw:
        mentioned = matcher.find_all(sentence)
        if not mentioned:
            continue
        present = [m for m in materials if contains_phrase(sentence, m)]
        for surface in mentioned:
            for material in present:
                counts[(surface, material)] = counts.get((surface, material), 0) + 1
    return counts


def link_components(
    sentences_raw: Iterable[str],
    components: ComponentDataset,
    material_words: Iterable[str],
) -> dict[str, list[str]]:
    """Pair component mentions with material words co-occurring in sentences.

    A pair is linked when one sentence contains both the component surface
    (word-boundary phrase match) and the material word. Per component the
    materials are ordered by co-occurring sentence count descending, then
    lexicographically.
    """
    pair_counts = link_counts(sentences_raw, components, material_words)
    linked: dict[str, list[tuple[int, str]]] = {}
    for (surface, material), count in pair_counts.items():
        linked.setdefault(surface, []).append((count, material))
    return {
        surface: [m for _, m in sorted(rows, key=lambda r: (-r[0], r[1]))]
        for surface, rows in linked.items()
    }


def sample_materials(linked: Sequence[str], k: int = 5, seed: int = 0) -> list[str]:
    """Up to k materials; a seeded uniform subsample when more are linked."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if len(linked) <= k:
        return list(linked)
    return random.Random(seed).sample(list(linked), k)
