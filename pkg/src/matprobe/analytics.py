"""Analysis artifacts: query productiveness, query-count statistics,
prediction pool-size comparison, and full-vs-head compositionality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from .errors import DegenerateInputError, MismatchedComponentsError
from .postprocess import NormalizedPrediction
from .templates import Number, QueryTemplate, VariantClass

# component surface -> ranked materials (top-5 of the final aggregation)
RunMaterials = Mapping[str, Sequence[str]]
# (component surface, material) -> plausible?
PlausibilityMap = Mapping[tuple[str, str], bool]


@dataclass
class ProductivenessReport:
    """Activated vs potential query counts, partitioned two ways.

    A query is activated when at least one of its normalized predictions
    appears in its component's final top-5 materials.
    """

    by_variant_class: dict[str, tuple[int, int]] = field(default_factory=dict)
    by_relation: dict[tuple[str, str], tuple[int, int]] = field(default_factory=dict)
    total_activated: int = 0
    total_potential: int = 0

    def validate(self) -> None:
        for activated, potential in list(self.by_variant_class.values()) + list(
            self.by_relation.values()
        ):
            assert 0 <= activated <= potential


def productiveness(
    final_top5: RunMaterials,
    per_query_normalized: Mapping[str, Sequence[NormalizedPrediction]],
    templates: Sequence[QueryTemplate],
) -> ProductivenessReport:
    by_template = {t.template_id: t for t in templates}
    n_components = len(final_top5)

    class_sizes: dict[str, int] = {}
    relation_sizes: dict[tuple[str, str], int] = {}
    for t in templates:
        class_sizes[t.variant_class.value] = class_sizes.get(t.variant_class.value, 0) + 1
        cell = (t.relation_id, t.number.value)
        relation_sizes[cell] = relation_sizes.get(cell, 0) + 1

    class_activated: dict[str, int] = {c: 0 for c in class_sizes}
    relation_activated: dict[tuple[str, str], int] = {cell: 0 for cell in relation_sizes}
    total_activated = 0

    for surface, top5 in final_top5.items():
        winners = set(top5)
        materials_by_query: dict[str, set[str]] = {}
        for template_id, _rank, material, _prob in per_query_normalized.get(surface, ()):
            materials_by_query.setdefault(template_id, set()).add(material)
        for template_id, materials in materials_by_query.items():
            if template_id not in by_template:
                continue
            if materials & winners:
                t = by_template[template_id]
                class_activated[t.variant_class.value] += 1
                relation_activated[(t.relation_id, t.number.value)] += 1
                total_activated += 1

    report = ProductivenessReport(
        by_variant_class={
            c: (class_activated[c], size * n_components) for c, size in class_sizes.items()
        },
        by_relation={
            cell: (relation_activated[cell], size * n_components)
            for cell, size in relation_sizes.items()
        },
        total_activated=total_activated,
        total_potential=len(templates) * n_components,
    )
    report.validate()
    return report


def productiveness_records(report: ProductivenessReport) -> list[dict]:
    records = []
    for variant_class, (activated, potential) in sorted(report.by_variant_class.items()):
        records.append(
            {"partition": "variant_class", "cell": variant_class,
             "activated": activated, "potential": potential}
        )
    for (relation_id, number), (activated, potential) in sorted(report.by_relation.items()):
        records.append(
            {"partition": "relation", "cell": f"{relation_id}:{number}",
             "activated": activated, "potential": potential}
        )
    return records


def activated_query_counts(
    final_top5: RunMaterials,
    per_query_normalized: Mapping[str, Sequence[NormalizedPrediction]],
) -> dict[str, int]:
    """Per component: how many queries contributed a final top-5 material."""
    counts: dict[str, int] = {}
    for surface, top5 in final_top5.items():
        winners = set(top5)
        materials_by_query: dict[str, set[str]] = {}
        for template_id, _rank, material, _prob in per_query_normalized.get(surface, ()):
            materials_by_query.setdefault(template_id, set()).add(material)
        counts[surface] = sum(1 for mats in materials_by_query.values() if mats & winners)
    return counts


# -- statistics --

def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    """Product-moment correlation coefficient."""
    if len(x) != len(y):
        raise DegenerateInputError("x and y must have equal length")
    n = len(x)
    if n < 2:
        raise DegenerateInputError("need at least two points")
    mean_x = sum(x) / n
    mean_y = sum(y) / n
    sxx = sum((a - mean_x) ** 2 for a in x)
    syy = sum((b - mean_y) ** 2 for b in y)
    sxy = sum((a - mean_x) * (b - mean_y) for a, b in zip(x, y))
    if sxx == 0 or syy == 0:
        raise DegenerateInputError("zero variance input")
    return sxy / math.sqrt(sxx * syy)


def linreg_r2(x: Sequence[float], y: Sequence[float]) -> float:
    """R-squared of a simple least-squares fit of y on x."""
    if len(x) != len(y):
        raise DegenerateInputError("x and y must have equal length")
    n = len(x)
    if n < 2:
        raise DegenerateInputError("need at least two points")
    mean_x = sum(x) / n
    mean_y = sum(y) / n
    sxx = sum((a - mean_x) ** 2 for a in x)
    sstot = sum((b - mean_y) ** 2 for b in y)
    if sxx == 0 or sstot == 0:
        raise DegenerateInputError("zero variance input")
    slope = sum((a - mean_x) * (b - mean_y) for a, b in zip(x, y)) / sxx
    intercept = mean_y - slope * mean_x
    ssres = sum((b - (slope * a + intercept)) ** 2 for a, b in zip(x, y))
    return 1.0 - ssres / sstot


def chi_square_2x2(a: int, b: int, c: int, d: int) -> float:
    """Chi-square statistic for a 2x2 contingency table [[a, b], [c, d]]."""
    n = a + b + c + d
    denom = (a + b) * (c + d) * (a + c) * (b + d)
    if n == 0 or denom == 0:
        raise DegenerateInputError("degenerate contingency table")
    return n * (a * d - b * c) ** 2 / denom


# -- pool size --

@dataclass
class PoolColumn:
    hits: dict[int, float]
    component_accuracy: float
    total_hits: float


@dataclass
class PoolSizeReport:
    columns: dict[str, PoolColumn]


def _pool_column(run: RunMaterials, plausible: PlausibilityMap, k: int) -> PoolColumn:
    n = len(run)
    hit_counts = {r: 0 for r in range(1, k + 1)}
    component_hits = 0
    total = 0
    total_rated = 0
    for surface, materials in run.items():
        any_hit = False
        for r in range(1, k + 1):
            if r <= len(materials):
                total_rated += 1
                if plausible.get((surface, materials[r - 1]), False):
                    hit_counts[r] += 1
                    total += 1
                    any_hit = True
        if any_hit:
            component_hits += 1
    return PoolColumn(
        hits={r: hit_counts[r] / n for r in hit_counts} if n else {},
        component_accuracy=component_hits / n if n else 0.0,
        total_hits=total / total_rated if total_rated else 0.0,
    )


def pool_size_report(
    run_k5: RunMaterials,
    run_k10: RunMaterials,
    plausible: PlausibilityMap,
    k: int = 5,
) -> PoolSizeReport:
    """Hits@1..k, component accuracy, and total hits for two prediction
    pool depths over the same components."""
    if set(run_k5) != set(run_k10):
        raise MismatchedComponentsError("the two runs cover different components")
    return PoolSizeReport(
        columns={
            "top5_pool": _pool_column(run_k5, plausible, k),
            "top10_pool": _pool_column(run_k10, plausible, k),
        }
    )


# -- compositionality --

@dataclass
class ConditionAccuracy:
    component_accuracy: float
    material_accuracy: float


@dataclass
class CompositionalityReport:
    full: ConditionAccuracy
    head: ConditionAccuracy
    component_delta: float
    material_delta: float
    by_constituent_count: dict[str, tuple[float, float]]  # bucket -> (full, head)


def _bucket(n_constituents: int) -> str:
    return str(n_constituents) if n_constituents < 5 else "5+"


def _condition_accuracy(
    materials_for: Mapping[str, Sequence[str]],
    plausible: PlausibilityMap,
) -> ConditionAccuracy:
    n_components = len(materials_for)
    component_hits = 0
    material_hits = 0
    material_total = 0
    for surface, materials in materials_for.items():
        hits = [plausible.get((surface, m), False) for m in materials]
        material_total += len(hits)
        material_hits += sum(hits)
        if any(hits):
            component_hits += 1
    return ConditionAccuracy(
        component_accuracy=component_hits / n_components if n_components else 0.0,
        material_accuracy=material_hits / material_total if material_total else 0.0,
    )


def compositionality_report(
    full_run: RunMaterials,
    head_run: RunMaterials,
    plausible: PlausibilityMap,
) -> CompositionalityReport:
    """Compare predictions for full components against predictions for
    their right-most heads.

    head_run is keyed by head surface; its materials are evaluated against
    the full component they map back to, so both conditions share one
    plausibility reference.
    """
    head_condition: dict[str, Sequence[str]] = {}
    for surface in full_run:
        head = surface.split()[-1]
        head_condition[surface] = head_run.get(head, ())

    full = _condition_accuracy(full_run, plausible)
    head = _condition_accuracy(head_condition, plausible)

    by_bucket: dict[str, tuple[float, float]] = {}
    buckets: dict[str, list[str]] = {}
    for surface in full_run:
        buckets.setdefault(_bucket(len(surface.split())), []).append(surface)
    for bucket, surfaces in sorted(buckets.items()):
        full_acc = _condition_accuracy({s: full_run[s] for s in surfaces}, plausible)
        head_acc = _condition_accuracy({s: head_condition[s] for s in surfaces}, plausible)
        by_bucket[bucket] = (full_acc.component_accuracy, head_acc.component_accuracy)

    return CompositionalityReport(
        full=full,
        head=head,
        component_delta=full.component_accuracy - head.component_accuracy,
        material_delta=full.material_accuracy - head.material_accuracy,
        by_constituent_count=by_bucket,
    )
