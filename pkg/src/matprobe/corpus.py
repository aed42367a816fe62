"""Domain-customized corpus building from plain-text articles.

Keeps only articles mentioning a multiword component in title or body,
segments the kept articles into sentences, drops sentences without a
multiword component mention, and exports seeded train/validation text
files for masked-LM domain adaptation.
"""

from __future__ import annotations

import logging
import random
import re
from dataclasses import dataclass, field
from pathlib import Path

from .components import ComponentDataset
from .io_utils import atomic_write_text
from .matching import PhraseMatcher

logger = logging.getLogger(__name__)

# Words before a period that do not end a sentence.
ABBREVIATIONS = {
    "mr", "mrs", "ms", "dr", "prof", "sr", "jr", "st",
    "e.g", "i.e", "etc", "vs", "cf", "al", "fig", "no", "approx", "inc", "ltd", "co",
}

_SPLIT_CANDIDATE = re.compile(r"(?<=[.!?])\s+")


@dataclass
class Article:
    id: str
    title: str
    body: str


@dataclass
class FilteredCorpus:
    """Retained sentences plus an index from component surface to the ids
    (positions in `sentences`) of the sentences mentioning it."""

    sentences: list[tuple[str, str]]  # (article_id, sentence_text)
    mention_index: dict[str, list[int]] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.sentences)


def load_articles(path: str | Path) -> list[Article]:
    """Read tab-separated article lines: id<TAB>title<TAB>body."""
    articles = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split("\t", 2)
        if len(parts) != 3:
            raise ValueError(f"line {lineno}: expected id<TAB>title<TAB>body")
        articles.append(Article(id=parts[0], title=parts[1], body=parts[2]))
    return articles


def _multiword_matcher(dataset: ComponentDataset) -> PhraseMatcher:
    return PhraseMatcher(c.surface for c in dataset.multiword())


def filter_articles(articles: list[Article], dataset: ComponentDataset) -> list[Article]:
    """Keep articles whose title or body mentions a multiword component."""
    matcher = _multiword_matcher(dataset)
    return [a for a in articles if matcher.matches(a.title) or matcher.matches(a.body)]


def _ends_with_abbreviation(chunk: str) -> bool:
    stripped = chunk.rstrip()
    if not stripped.endswith("."):
        return False
    word = stripped[:-1].rsplit(None, 1)[-1] if stripped[:-1].strip() else ""
    word = word.lower().lstrip("(")
    if len(word) == 1 and word.isalpha():
        return True  # initials like "A. B. Smith"
    return word in ABBREVIATIONS


def segment_sentences(text: str) -> list[str]:
    """Rule-based sentence splitting on terminal punctuation with an
    abbreviation guard."""
    if not text.strip():
        return []
    chunks = _SPLIT_CANDIDATE.split(text.strip())
    sentences: list[str] = []
    buffer = ""
    for chunk in chunks:
        buffer = f"{buffer} {chunk}".strip() if buffer else chunk
        if _ends_with_abbreviation(buffer):
            continue
        sentences.append(buffer)
        buffer = ""
    if buffer:
        sentences.append(buffer)
    return [s for s in (x.strip() for x in sentences) if s]


def build_filtered_corpus(articles: list[Article], dataset: ComponentDataset) -> FilteredCorpus:
    """Filter articles, segment them, and keep only sentences that mention
    at least one multiword component."""
    matcher = _multiword_matcher(dataset)
    sentences: list[tuple[str, str]] = []
    mention_index: dict[str, list[int]] = {}
    for article in filter_articles(articles, dataset):
        for sentence in segment_sentences(article.body):
            mentioned = matcher.find_all(sentence)
            if not mentioned:
                continue
            sentence_id = len(sentences)
            sentences.append((article.id, sentence))
            for surface in mentioned:
                mention_index.setdefault(surface, []).append(sentence_id)
    return FilteredCorpus(sentences=sentences, mention_index=mention_index)


def export_mlm_splits(
    corpus: FilteredCorpus,
    train_path: str | Path,
    valid_path: str | Path,
    train_fraction: float = 0.9,
    seed: int = 0,
) -> tuple[int, int]:
    """Shuffle sentences with the seed and split train/valid by the fraction.

    Train size is floor(n * fraction) but never zero for a non-empty
    corpus; the remainder goes to validation.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ValueError("train_fraction must be in (0, 1)")
    texts = [text for _, text in corpus.sentences]
    random.Random(seed).shuffle(texts)
    n_train = int(len(texts) * train_fraction)
    if texts and n_train == 0:
        n_train = 1
    train, valid = texts[:n_train], texts[n_train:]
    if texts and not valid:
        logger.warning("validation split is empty (%d sentences total)", len(texts))
    atomic_write_text(train_path, "".join(t + "\n" for t in train))
    atomic_write_text(valid_path, "".join(t + "\n" for t in valid))
    return len(train), len(valid)
