import random

import pytest

from matprobe.aggregate import (
    Method,
    aggregate,
    aggregate_avg,
    aggregate_best_score,
    aggregate_prevalence,
    collect,
    top_k,
)

# ---------------------------------------------------------------------------
# Independent brute-force oracle. Deliberately structured differently from
# the implementation: it walks the raw rows per material and per query each
# time instead of folding once.
# ---------------------------------------------------------------------------

def oracle_rankings(rows, total_query_count=None):
    queries = sorted({template_id for template_id, _, _, _ in rows})
    materials = sorted({material for _, _, material, _ in rows})

    def query_prob(template_id, material):
        """Max probability of material within one query, None if absent."""
        probs = [
            prob
            for tid, _rank, mat, prob in rows
            if tid == template_id and mat == material
        ]
        return max(probs) if probs else None

    stats = {}
    for material in materials:
        per_query = [
            (template_id, query_prob(template_id, material)) for template_id in queries
        ]
        hits = [(tid, p) for tid, p in per_query if p is not None]
        stats[material] = {
            "prevalence": len(hits),
            "max": max(p for _, p in hits),
            "sum": sum(p for _, p in hits),
        }

    def rank_by(score_fn):
        return [
            (material, score_fn(stats[material]))
            for material in sorted(
                materials,
                key=lambda m: (
                    -score_fn(stats[m]),
                    -stats[m]["sum"],
                    m,
                ),
            )
        ]

    result = {
        Method.BEST_SCORE: rank_by(lambda s: s["max"]),
        Method.AVG: rank_by(lambda s: s["sum"] / s["prevalence"]),
        Method.PREVALENCE: rank_by(lambda s: float(s["prevalence"])),
    }
    if total_query_count is not None:
        result[Method.AVG_ALL] = rank_by(lambda s: s["sum"] / total_query_count)
    return result


def random_rows(rng, max_queries=20, max_materials=10):
    n_queries = rng.randint(1, max_queries)
    materials = [f"m{chr(97 + i)}" for i in range(rng.randint(1, max_materials))]
    rows = []
    for q in range(n_queries):
        chosen = rng.sample(materials, rng.randint(1, min(5, len(materials))))
        # occasionally duplicate a material inside the same query (pre-merge)
        if chosen and rng.random() < 0.3:
            chosen.append(chosen[0])
        for rank, material in enumerate(chosen, start=1):
            rows.append((f"q{q}", rank, material, rng.uniform(0.001, 0.999)))
    return rows, n_queries


FIXTURE = [
    ("q1", 1, "steel", 0.5),
    ("q1", 2, "iron", 0.3),
    ("q2", 1, "iron", 0.4),
    ("q2", 2, "plastic", 0.2),
    ("q3", 1, "iron", 0.1),
    ("q3", 2, "wood", 0.6),
]


def test_collect_fixture():
    scores = collect(FIXTURE)
    iron = scores["iron"]
    assert iron.prevalence == 3
    assert iron.predicting_query_count == 3
    assert iron.max_prob == 0.4
    assert iron.sum_prob == pytest.approx(0.8, abs=1e-12)
    assert iron.supporting_template_ids == {"q1", "q2", "q3"}


def test_collect_empty():
    assert collect([]) == {}


def test_collect_merges_within_query():
    rows = [("q1", 1, "steel", 0.5), ("q1", 3, "steel", 0.2)]
    scores = collect(rows)
    assert scores["steel"].prevalence == 1
    assert scores["steel"].max_prob == 0.5
    assert scores["steel"].sum_prob == 0.5


def test_best_score_fixture():
    ranking = aggregate_best_score(collect(FIXTURE)).ranking
    assert [m for m, _ in ranking] == ["wood", "steel", "iron", "plastic"]
    assert [s for _, s in ranking] == pytest.approx([0.6, 0.5, 0.4, 0.2])


def test_best_score_singleton():
    ranking = aggregate_best_score(collect([("q1", 1, "steel", 0.4)])).ranking
    assert ranking == (("steel", 0.4),)


def test_best_score_tie_break():
    # equal max; the more prevalent material accumulates more probability
    rows = [
        ("q1", 1, "alpha", 0.5),
        ("q2", 1, "alpha", 0.2),
        ("q3", 1, "beta", 0.5),
    ]
    ranking = aggregate_best_score(collect(rows)).ranking
    assert [m for m, _ in ranking] == ["alpha", "beta"]
    # full tie falls through to lexicographic order
    rows = [("q1", 1, "zeta", 0.5), ("q1", 2, "eta", 0.5)]
    ranking = aggregate_best_score(collect(rows)).ranking
    assert [m for m, _ in ranking] == ["eta", "zeta"]


def test_avg_fixture():
    ranking = aggregate_avg(collect(FIXTURE)).ranking
    assert [m for m, _ in ranking] == ["wood", "steel", "iron", "plastic"]
    scores = dict(ranking)
    assert scores["iron"] == pytest.approx(0.8 / 3, abs=1e-12)


def test_avg_single_prediction_is_identity():
    ranking = aggregate_avg(collect([("q1", 1, "steel", 0.37)])).ranking
    assert ranking[0][1] == pytest.approx(0.37, abs=1e-15)


def test_avg_constant_probs():
    rows = [("q1", 1, "a", 0.3), ("q2", 1, "b", 0.3), ("q1", 2, "b", 0.3)]
    ranking = aggregate_avg(collect(rows)).ranking
    assert all(s == pytest.approx(0.3) for _, s in ranking)
    # order falls to tie-break: b has the larger probability sum
    assert [m for m, _ in ranking] == ["b", "a"]


def test_avg_over_all_queries_variant():
    scores = collect(FIXTURE)
    ranking = aggregate_avg(scores, total_query_count=3).ranking
    lookup = dict(ranking)
    assert lookup["iron"] == pytest.approx(0.8 / 3)
    assert lookup["steel"] == pytest.approx(0.5 / 3)


def test_prevalence_fixture():
    ranking = aggregate_prevalence(collect(FIXTURE)).ranking
    assert [m for m, _ in ranking] == ["iron", "wood", "steel", "plastic"]
    assert ranking[0][1] == 3.0


def test_prevalence_single_query_reproduces_probability_order():
    rows = [("q1", 1, "steel", 0.5), ("q1", 2, "iron", 0.3), ("q1", 3, "wood", 0.1)]
    ranking = aggregate_prevalence(collect(rows)).ranking
    assert [m for m, _ in ranking] == ["steel", "iron", "wood"]
    assert all(score == 1.0 for _, score in ranking)


def test_oracle_equivalence_100_random_sets():
    rng = random.Random(12345)
    for _ in range(100):
        rows, n_queries = random_rows(rng)
        scores = collect(rows)
        expected = oracle_rankings(rows, total_query_count=n_queries)
        for method in (Method.BEST_SCORE, Method.AVG, Method.PREVALENCE, Method.AVG_ALL):
            got = aggregate(scores, method, total_query_count=n_queries).ranking
            want = expected[method]
            assert [m for m, _ in got] == [m for m, _ in want], method
            for (_, gs), (_, ws) in zip(got, want):
                assert abs(gs - ws) <= 1e-12, method


def test_prevalence_rescaling_property():
    rng = random.Random(777)
    for _ in range(50):
        rows, _ = random_rows(rng)
        c = rng.choice([0.5, 2.0, 0.001, 10.0, 0.1, 3.7])
        scaled = [(t, r, m, min(p * c, 1.0) if c > 1 else p * c) for t, r, m, p in rows]
        base = aggregate_prevalence(collect(rows))
        rescaled = aggregate_prevalence(collect(scaled))
        # multiset of materials at each prevalence level is unchanged
        def levels(ranked):
            by_level = {}
            for material, score in ranked.ranking:
                by_level.setdefault(score, set()).add(material)
            return by_level

        assert levels(base) == levels(rescaled)


def test_query_permutation_invariance():
    rng = random.Random(99)
    rows, n = random_rows(rng)
    shuffled = rows[:]
    rng.shuffle(shuffled)
    for method in (Method.BEST_SCORE, Method.AVG, Method.PREVALENCE):
        assert (
            aggregate(collect(rows), method).ranking
            == aggregate(collect(shuffled), method).ranking
        )


def test_new_unrelated_query_never_demotes_prevalence():
    scores_before = collect(FIXTURE)
    extra = FIXTURE + [("q4", 1, "carbon", 0.9)]
    scores_after = collect(extra)
    for material, score in scores_before.items():
        assert scores_after[material].prevalence >= score.prevalence


def test_top_k():
    rows = [(f"q{i}", 1, f"m{chr(97 + i)}", 0.1 * (i + 1)) for i in range(8)]
    ranked = aggregate_best_score(collect(rows))
    assert len(top_k(ranked, 5).ranking) == 5
    short = aggregate_best_score(collect(rows[:3]))
    assert len(top_k(short, 5).ranking) == 3
    assert top_k(ranked, 5).ranking == top_k(ranked, 10).ranking[:5]
    with pytest.raises(ValueError):
        top_k(ranked, 0)
