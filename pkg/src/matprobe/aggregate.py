"""Aggregation of per-query material predictions into ranked lists.

Three ranking keys over the collected per-material statistics:

  best_score  max probability across all predicting queries
  avg         summed probability / number of predicting queries
  prevalence  number of predicting queries, probabilities ignored

plus avg_all, a variant of avg that divides by the total query count
instead of the predicting-query count. Ties are broken by summed
probability (descending), then lexicographically, which makes every
ranking total and deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional

from .postprocess import NormalizedPrediction


class Method(str, Enum):
    BEST_SCORE = "best_score"
    AVG = "avg"
    AVG_ALL = "avg_all"
    PREVALENCE = "prevalence"


@dataclass(frozen=True)
class MaterialScore:
    material: str
    prevalence: int
    max_prob: float
    sum_prob: float
    predicting_query_count: int
    supporting_template_ids: frozenset[str]


@dataclass(frozen=True)
class RankedMaterials:
    method: Method
    ranking: tuple[tuple[str, float], ...]
    k: Optional[int] = None


def collect(normalized: Iterable[NormalizedPrediction]) -> dict[str, MaterialScore]:
    """Fold normalized predictions into per-material statistics.

    Duplicate materials inside one query's top-k (post-normalization
    collisions such as a spelling variant and its canonical form) are
    merged keeping the larger probability and count once.
    """
    per_query: dict[str, dict[str, float]] = {}
    for template_id, _rank, material, prob in normalized:
        slots = per_query.setdefault(template_id, {})
        if material not in slots or prob > slots[material]:
            slots[material] = prob

    stats: dict[str, MaterialScore] = {}
    acc: dict[str, list] = {}  # material -> [count, max, sum, template_ids]
    for template_id, slots in per_query.items():
        for material, prob in slots.items():
            if material not in acc:
                acc[material] = [0, 0.0, 0.0, set()]
            entry = acc[material]
            entry[0] += 1
            entry[1] = max(entry[1], prob)
            entry[2] += prob
            entry[3].add(template_id)
    for material, (count, max_prob, sum_prob, template_ids) in acc.items():
        stats[material] = MaterialScore(
            material=material,
            prevalence=count,
            max_prob=max_prob,
            sum_prob=sum_prob,
            predicting_query_count=count,
            supporting_template_ids=frozenset(template_ids),
        )
    return stats


def _ranked(scores: dict[str, MaterialScore], method: Method, key) -> RankedMaterials:
    ordered = sorted(
        scores.values(),
        key=lambda s: (-key(s), -s.sum_prob, s.material),
    )
    return RankedMaterials(
        method=method,
        ranking=tuple((s.material, float(key(s))) for s in ordered),
    )


def aggregate_best_score(scores: dict[str, MaterialScore]) -> RankedMaterials:
    return _ranked(scores, Method.BEST_SCORE, lambda s: s.max_prob)


def aggregate_avg(
    scores: dict[str, MaterialScore],
    total_query_count: Optional[int] = None,
) -> RankedMaterials:
    """Average probability per material.

    With total_query_count given, divides by the number of queries issued
    (the avg_all variant) instead of the number that predicted the material.
    """
    if total_query_count is None:
        return _ranked(scores, Method.AVG, lambda s: s.sum_prob / s.predicting_query_count)
    if total_query_count < 1:
        raise ValueError("total_query_count must be >= 1")
    return _ranked(scores, Method.AVG_ALL, lambda s: s.sum_prob / total_query_count)


def aggregate_prevalence(scores: dict[str, MaterialScore]) -> RankedMaterials:
    return _ranked(scores, Method.PREVALENCE, lambda s: s.prevalence)


def aggregate(
    scores: dict[str, MaterialScore],
    method: Method,
    total_query_count: Optional[int] = None,
) -> RankedMaterials:
    if method is Method.BEST_SCORE:
        return aggregate_best_score(scores)
    if method is Method.AVG:
        return aggregate_avg(scores)
    if method is Method.AVG_ALL:
        if total_query_count is None:
            raise ValueError("avg_all needs the total query count")
        return aggregate_avg(scores, total_query_count=total_query_count)
    if method is Method.PREVALENCE:
        return aggregate_prevalence(scores)
    raise ValueError(f"unknown method {method!r}")


def top_k(ranked: RankedMaterials, k: int = 5) -> RankedMaterials:
    if k < 1:
        raise ValueError("k must be >= 1")
    return RankedMaterials(method=ranked.method, ranking=ranked.ranking[:k], k=k)


def ranking_records(
    component_surface: str,
    ranked: RankedMaterials,
    scores: dict[str, MaterialScore],
) -> list[dict]:
    """Serialize one ranking as line-delimited output records."""
    records = []
    for rank, (material, score) in enumerate(ranked.ranking, start=1):
        s = scores[material]
        records.append(
            {
                "component": component_surface,
                "method": ranked.method.value,
                "rank": rank,
                "material": material,
                "score": score,
                "prevalence": s.prevalence,
                "predicting_query_count": s.predicting_query_count,
            }
        )
    return records
