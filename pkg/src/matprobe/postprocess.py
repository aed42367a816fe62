"""Normalization of raw predicted tokens into material candidates.

Filters numeric, punctuation-only, too-short, and stopword tokens, merges
spelling variants onto a canonical form, and drops tokens that merely echo
the queried component. Singular and plural material forms are kept as
distinct candidates on purpose.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

from .components import Component, pluralize
from .errors import InvalidConfigError
from .gateway import PredictionBatch

# (template_id, rank, material, prob)
NormalizedPrediction = tuple[str, int, str, float]


def _load_wordlist(name: str) -> frozenset[str]:
    text = resources.files("matprobe.data").joinpath(name).read_text(encoding="utf-8")
    return frozenset(w.strip() for w in text.splitlines() if w.strip() and not w.startswith("#"))


def _load_variants(name: str) -> dict[str, str]:
    text = resources.files("matprobe.data").joinpath(name).read_text(encoding="utf-8")
    return _parse_variant_lines(text.splitlines())


def _parse_variant_lines(lines) -> dict[str, str]:
    mapping: dict[str, str] = {}
    for line in lines:
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        variant, canonical = line.split("\t")
        mapping[variant.strip().lower()] = canonical.strip().lower()
    return mapping


@dataclass(frozen=True)
class NormalizationConfig:
    standard_stopwords: frozenset[str]
    custom_stopwords: frozenset[str]
    variant_map: dict[str, str]
    min_length: int = 2

    def __post_init__(self):
        chained = set(self.variant_map.values()) & set(self.variant_map.keys())
        if chained:
            raise InvalidConfigError(f"variant map contains chains: {sorted(chained)}")
        bad = [w for w in list(self.custom_stopwords) + list(self.variant_map) if w != w.lower()]
        if bad:
            raise InvalidConfigError(f"stopwords and variant keys must be lowercase: {bad}")

    @classmethod
    def default(cls) -> "NormalizationConfig":
        return cls(
            standard_stopwords=_load_wordlist("stopwords_standard.txt"),
            custom_stopwords=_load_wordlist("stopwords_custom.txt"),
            variant_map=_load_variants("variants.tsv"),
        )

    @classmethod
    def from_files(
        cls,
        standard_stopwords: Optional[str | Path] = None,
        custom_stopwords: Optional[str | Path] = None,
        variants: Optional[str | Path] = None,
        min_length: int = 2,
    ) -> "NormalizationConfig":
        def words(path) -> frozenset[str]:
            return frozenset(
                w.strip().lower()
                for w in Path(path).read_text(encoding="utf-8").splitlines()
                if w.strip() and not w.startswith("#")
            )

        return cls(
            standard_stopwords=words(standard_stopwords)
            if standard_stopwords
            else _load_wordlist("stopwords_standard.txt"),
            custom_stopwords=words(custom_stopwords)
            if custom_stopwords
            else _load_wordlist("stopwords_custom.txt"),
            variant_map=_parse_variant_lines(
                Path(variants).read_text(encoding="utf-8").splitlines()
            )
            if variants
            else _load_variants("variants.tsv"),
            min_length=min_length,
        )


def normalize(token: str, component: Component, cfg: NormalizationConfig) -> Optional[str]:
    """Map one raw token to a material candidate, or None on rejection."""
    word = token.strip().lower()
    if not word or len(word) < cfg.min_length:
        return None
    if any(ch.isspace() for ch in word):
        return None
    if any(ch.isdigit() for ch in word):
        return None
    if not any(ch.isalpha() for ch in word):
        return None
    if word in cfg.standard_stopwords or word in cfg.custom_stopwords:
        return None
    word = cfg.variant_map.get(word, word)
    # canonical form must survive the same filters, keeping normalize idempotent
    if word in cfg.standard_stopwords or word in cfg.custom_stopwords:
        return None
    if word == component.surface or word == pluralize(component.surface, component.plural_override):
        return None
    return word


def normalize_batch(
    batch: PredictionBatch,
    component: Component,
    cfg: NormalizationConfig,
) -> list[NormalizedPrediction]:
    """Normalize every prediction for one component, dropping rejects.

    Provenance (template_id, rank, prob) is preserved; rows are emitted in
    sorted key order so output never depends on batch assembly order.
    """
    out: list[NormalizedPrediction] = []
    for (surface, template_id), preds in sorted(batch.results.items()):
        if surface != component.surface:
            continue
        for p in preds:
            material = normalize(p.token, component, cfg)
            if material is not None:
                out.append((template_id, p.rank, material, p.probability))
    return out
