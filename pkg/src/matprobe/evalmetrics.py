"""Evaluation measures over annotation files.

Annotators rate each (component, material) pair as plausible ("p"),
implausible ("i"), or unknown ("u"); component-level special rows flag
annotators who chose "none of these" (everything implausible) or "I do
not know" (everything unknown) for a whole component.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Iterable, Optional

from .errors import (
    DataError,
    EmptyInputError,
    NoOverlapError,
    UnknownModelTagError,
)
from .io_utils import read_jsonl

RATINGS = ("p", "i", "u")


@dataclass(frozen=True)
class AnnotationRecord:
    component: str
    material: str
    models: frozenset[str]
    ratings: dict[str, str]  # annotator id -> p | i | u

    def __post_init__(self):
        if not self.models:
            raise DataError(f"record {self.component}/{self.material} carries no model tag")
        for annotator, value in self.ratings.items():
            if value not in RATINGS:
                raise DataError(f"bad rating {value!r} from annotator {annotator!r}")


@dataclass
class AnnotationSet:
    records: list[AnnotationRecord]
    none_flags: dict[str, set[str]] = field(default_factory=dict)  # component -> annotators
    unknown_flags: dict[str, set[str]] = field(default_factory=dict)

    @property
    def annotators(self) -> list[str]:
        ids: set[str] = set()
        for record in self.records:
            ids.update(record.ratings)
        return sorted(ids)

    @property
    def model_tags(self) -> set[str]:
        tags: set[str] = set()
        for record in self.records:
            tags.update(record.models)
        return tags

    def effective_rating(self, record: AnnotationRecord, annotator: str) -> str:
        """Component-level flags override the per-material rating."""
        if annotator in self.unknown_flags.get(record.component, ()):
            return "u"
        if annotator in self.none_flags.get(record.component, ()):
            return "i"
        return record.ratings[annotator]

    def excluded_components(self) -> set[str]:
        """Components every annotator flagged as unknown drop out of
        accuracy denominators entirely."""
        annotators = set(self.annotators)
        return {
            component
            for component, flagged in self.unknown_flags.items()
            if annotators and annotators <= flagged
        }


def load_annotations(path: str | Path) -> AnnotationSet:
    """Read line-delimited annotation records.

    Material rows: {"component", "material", "models": [...], "<annotator>":
    "p"/"i"/"u", ...}. Special rows: {"component", "none_of_these": [...]}
    or {"component", "unknown": [...]}.
    """
    records: list[AnnotationRecord] = []
    none_flags: dict[str, set[str]] = {}
    unknown_flags: dict[str, set[str]] = {}
    for row in read_jsonl(path):
        component = row["component"]
        if "none_of_these" in row or "unknown" in row:
            for annotator in row.get("none_of_these", []):
                none_flags.setdefault(component, set()).add(annotator)
            for annotator in row.get("unknown", []):
                unknown_flags.setdefault(component, set()).add(annotator)
            continue
        ratings = {
            key: value
            for key, value in row.items()
            if key not in ("component", "material", "models")
        }
        records.append(
            AnnotationRecord(
                component=component,
                material=row["material"],
                models=frozenset(row["models"]),
                ratings=ratings,
            )
        )
    return AnnotationSet(records=records, none_flags=none_flags, unknown_flags=unknown_flags)


def _model_records(aset: AnnotationSet, model: str) -> list[AnnotationRecord]:
    if not aset.records:
        raise EmptyInputError("annotation set is empty")
    if model not in aset.model_tags:
        raise UnknownModelTagError(f"no annotation carries model tag {model!r}")
    excluded = aset.excluded_components()
    return [r for r in aset.records if model in r.models and r.component not in excluded]


def _plausible_votes(aset: AnnotationSet, record: AnnotationRecord) -> int:
    return sum(1 for a in aset.annotators if aset.effective_rating(record, a) == "p")


def component_accuracy(aset: AnnotationSet, model: str, n_required: int = 1) -> float:
    """Fraction of evaluated components with at least one top-5 material
    rated plausible by n_required or more annotators."""
    _check_n(aset, n_required)
    records = _model_records(aset, model)
    if not records:
        raise EmptyInputError("no records for model after exclusions")
    components: dict[str, bool] = {}
    for record in records:
        hit = _plausible_votes(aset, record) >= n_required
        components[record.component] = components.get(record.component, False) or hit
    return sum(components.values()) / len(components)


def material_accuracy(aset: AnnotationSet, model: str, n_required: int = 1) -> float:
    """Fraction of a model's material predictions rated plausible by
    n_required or more annotators."""
    _check_n(aset, n_required)
    records = _model_records(aset, model)
    if not records:
        raise EmptyInputError("no records for model after exclusions")
    hits = sum(1 for r in records if _plausible_votes(aset, r) >= n_required)
    return hits / len(records)


def _check_n(aset: AnnotationSet, n_required: int) -> None:
    count = len(aset.annotators)
    if not 1 <= n_required <= max(count, 1):
        raise ValueError(f"n_required must be in 1..{count}")


def plausibility_map(
    aset: AnnotationSet, n_required: int = 1
) -> dict[tuple[str, str], bool]:
    """(component, material) -> rated plausible by >= n_required annotators.
    Model-agnostic: shared materials are rated once and credited everywhere."""
    return {
        (r.component, r.material): _plausible_votes(aset, r) >= n_required
        for r in aset.records
    }


# -- agreement --

def pairwise_agreement(
    aset: AnnotationSet, model: str, pair: tuple[str, str]
) -> float:
    """Observed proportion agreement on plausible/implausible ratings,
    excluding materials either annotator marked unknown."""
    a, b = pair
    matches = 0
    total = 0
    for record in _model_records(aset, model):
        rating_a = aset.effective_rating(record, a)
        rating_b = aset.effective_rating(record, b)
        if rating_a == "u" or rating_b == "u":
            continue
        total += 1
        if rating_a == rating_b:
            matches += 1
    if total == 0:
        raise NoOverlapError(f"annotators {a!r} and {b!r} share no rated material")
    return matches / total


def averaged_agreement(aset: AnnotationSet, model: str) -> float:
    """Mean of the pairwise agreement values over all annotator pairs."""
    pairs = list(combinations(aset.annotators, 2))
    if not pairs:
        raise NoOverlapError("need at least two annotators")
    return sum(pairwise_agreement(aset, model, pair) for pair in pairs) / len(pairs)


def cohens_kappa(aset: AnnotationSet, model: str, pair: tuple[str, str]) -> float:
    """Chance-corrected agreement companion column; degenerate marginals
    (expected agreement 1) map to 1.0 on perfect and 0.0 otherwise."""
    a, b = pair
    rated: list[tuple[str, str]] = []
    for record in _model_records(aset, model):
        rating_a = aset.effective_rating(record, a)
        rating_b = aset.effective_rating(record, b)
        if rating_a != "u" and rating_b != "u":
            rated.append((rating_a, rating_b))
    if not rated:
        raise NoOverlapError(f"annotators {a!r} and {b!r} share no rated material")
    n = len(rated)
    po = sum(1 for ra, rb in rated if ra == rb) / n
    pa_p = sum(1 for ra, _ in rated if ra == "p") / n
    pb_p = sum(1 for _, rb in rated if rb == "p") / n
    pe = pa_p * pb_p + (1 - pa_p) * (1 - pb_p)
    if pe == 1.0:
        return 1.0 if po == 1.0 else 0.0
    return (po - pe) / (1 - pe)


def component_agreement(
    aset: AnnotationSet, model: str, pair: tuple[str, str]
) -> float:
    """Fraction of components where a pair agrees on at least one plausible
    material or on at least one implausible material.

    Components where either annotator chose the unknown option are
    excluded.
    """
    a, b = pair
    per_component: dict[str, list[tuple[str, str]]] = {}
    for record in _model_records(aset, model):
        if a in aset.unknown_flags.get(record.component, ()) or b in aset.unknown_flags.get(
            record.component, ()
        ):
            continue
        per_component.setdefault(record.component, []).append(
            (aset.effective_rating(record, a), aset.effective_rating(record, b))
        )
    if not per_component:
        raise NoOverlapError("no components left after unknown exclusions")
    agreements = 0
    for ratings in per_component.values():
        both_p = any(ra == "p" and rb == "p" for ra, rb in ratings)
        both_i = any(ra == "i" and rb == "i" for ra, rb in ratings)
        if both_p or both_i:
            agreements += 1
    return agreements / len(per_component)


def metrics_table(aset: AnnotationSet, models: Optional[Iterable[str]] = None) -> list[dict]:
    """Accuracy and agreement summary rows, one per model tag."""
    annotator_count = len(aset.annotators)
    rows = []
    for model in sorted(models if models is not None else aset.model_tags):
        row: dict = {"model": model}
        row["component_acc_1a"] = component_accuracy(aset, model, 1)
        row["component_acc_all"] = component_accuracy(aset, model, annotator_count)
        row["material_acc_1a"] = material_accuracy(aset, model, 1)
        row["material_acc_all"] = material_accuracy(aset, model, annotator_count)
        if annotator_count >= 2:
            row["iaa_avg"] = averaged_agreement(aset, model)
            for a, b in combinations(aset.annotators, 2):
                row[f"iaa_{a}_{b}"] = pairwise_agreement(aset, model, (a, b))
                row[f"kappa_{a}_{b}"] = cohens_kappa(aset, model, (a, b))
        rows.append(row)
    return rows
