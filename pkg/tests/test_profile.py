import random
from fractions import Fraction
from itertools import combinations

import pytest

from conftest import brute_profile, graph, matching
from monomorph.catalog import CatalogSpec, generate, random_blowup, random_structure
from monomorph.core import StructureError, canonical_code, induced, make_structure
from monomorph.profile import (
    InsufficientDataError,
    ProfileSeries,
    age,
    age_levels,
    all_structures,
    bounds_up_to,
    classify_growth,
    fit_quasi_polynomial,
    forb_class,
    forb_profile,
    get_kind,
    infer_kind,
    infinite_component_degree_check,
    profile_series,
)


def fib(n):
    a, b = 1, 1
    out = []
    for _ in range(n):
        out.append(a)
        a, b = b, a + b
    return out


def test_age_examples():
    assert len(age(generate(CatalogSpec("chain", 5)), 3)) == 1
    assert len(age(matching(6), 5)) == 3
    assert len(age(graph(4, []), 0)) == 1
    with pytest.raises(ValueError):
        age(graph(3, []), 4)


def test_profile_examples():
    assert list(profile_series(generate(CatalogSpec("chain", 8)), 8)) == [1] * 9
    assert list(profile_series(generate(CatalogSpec("G1", 8)), 8)) == [n // 2 + 1 for n in range(9)]
    assert list(profile_series(generate(CatalogSpec("chain2", 20)), 10)) == [n + 1 for n in range(11)]


def test_profile_against_brute_force():
    rng = random.Random(21)
    for i in range(30):
        ordered = i % 3 == 0
        n = rng.randint(1, 6)
        if i % 2:
            R = random_blowup((2,), max(1, n // 2), 2, ordered=ordered, seed=i)
        else:
            R = random_structure((2,), n, rng.uniform(0.2, 0.8), ordered=ordered, seed=i)
        assert list(profile_series(R, R.n)) == brute_profile(R, R.n)


@pytest.mark.parametrize("family, k", [("G1", 5), ("G3", 4), ("G5", 4), ("G2", 4)])
def test_merged_enumeration_matches_generic(family, k):
    R = generate(CatalogSpec(family, k))
    assert age_levels(R, R.n, method="merged") == age_levels(R, R.n, method="generic")


def test_ordered_fast_path_matches_generic():
    for seed in range(20):
        R = random_structure((2, 2), 6, 0.5, ordered=True, seed=seed)
        assert profile_series(R, 6, method="ordered") == profile_series(R, 6, method="generic")


def test_age_is_hereditary():
    R = generate(CatalogSpec("G2", 4))
    levels = age_levels(R, R.n)
    from monomorph.core import structure_from_code

    for m in range(1, R.n + 1):
        for c in levels[m]:
            S = structure_from_code(c)
            for v in range(m):
                assert canonical_code(induced(S, [u for u in range(m) if u != v])) in levels[m - 1]


def test_profile_monotone_in_prefix_size():
    for fam in ("G2", "G3"):
        rows = [list(profile_series(generate(CatalogSpec(fam, k)), 5)) for k in (3, 4, 5)]
        for a, b in zip(rows, rows[1:]):
            assert all(x <= y for x, y in zip(a, b))


def test_series_csv_roundtrip():
    s = ProfileSeries((1, 1, 2, 2))
    assert s.to_csv().splitlines()[0] == "n,phi"
    assert ProfileSeries.from_csv(s.to_csv()) == s
    with pytest.raises(ValueError):
        ProfileSeries((2, 1))
    with pytest.raises(ValueError):
        ProfileSeries.from_csv("n,phi\n0,1\n2,1\n")


# universes: counts of unlabeled graphs, digraphs, tournaments and ordered graphs
@pytest.mark.parametrize(
    "kind, counts",
    [
        ("graph", [1, 1, 2, 4, 11, 34]),
        ("digraph", [1, 1, 3, 16, 218]),
        ("tournament", [1, 1, 1, 2, 4, 12]),
        ("ordered_graph", [1, 1, 2, 8, 64]),
        ("binary", [1, 2, 10, 104]),
    ],
)
def test_universe_sizes(kind, counts):
    K = get_kind(kind)
    assert [len(all_structures(K, n)) for n in range(len(counts))] == counts


def test_forb_examples():
    P3, K3 = graph(3, [(0, 1), (1, 2)]), graph(3, [(0, 1), (0, 2), (1, 2)])
    assert forb_profile([P3, K3], "graph", 5) == 3
    assert [forb_profile([graph(2, [(0, 1)])], "graph", n) for n in range(6)] == [1] * 6
    one = graph(1, [])
    assert forb_profile([one], "graph", 0) == 1
    assert forb_profile([one], "graph", 3) == 0
    with pytest.raises(StructureError):
        forb_profile([P3, make_structure((2, 2), 1, [[], []])], "graph", 3)
    G = get_kind("graph")
    assert [len(lv) for lv in forb_class([P3, K3], G, 7)] == [n // 2 + 1 for n in range(8)]


def test_bounds_examples():
    M = generate(CatalogSpec("G1", 6))
    found = bounds_up_to(age_levels(M, 5), "graph", 5)
    P3, K3 = graph(3, [(0, 1), (1, 2)]), graph(3, [(0, 1), (0, 2), (1, 2)])
    assert found == {canonical_code(P3), canonical_code(K3)}
    C = generate(CatalogSpec("chain", 6))
    assert bounds_up_to(age_levels(C, 5), get_kind("ordered_loops", (2,)), 5) == frozenset()
    K = graph(5, list(combinations(range(5), 2)))
    assert bounds_up_to(age_levels(K, 4), "graph", 4) == {canonical_code(graph(2, []))}


def test_bounds_are_sound():
    R = generate(CatalogSpec("G2", 4))
    levels = age_levels(R, 4)
    kind = infer_kind(R)
    from monomorph.core import structure_from_code

    for c in bounds_up_to(levels, kind, 4):
        S = structure_from_code(c)
        assert c not in levels[S.n]
        for v in range(S.n):
            assert canonical_code(induced(S, [u for u in range(S.n) if u != v])) in levels[S.n - 1]


def test_bounds_reject_non_hereditary_input():
    K3 = graph(3, [(0, 1), (0, 2), (1, 2)])
    levels = [{canonical_code(graph(0, []))}, {canonical_code(graph(1, []))}, set(), {canonical_code(K3)}]
    with pytest.raises(ValueError):
        bounds_up_to(levels, "graph", 3)


def test_chain2_bounds_stabilize():
    R = generate(CatalogSpec("chain2", 16))
    kind = infer_kind(R)
    levels = age_levels(R, 8)
    small = bounds_up_to(levels, kind, 4)
    assert bounds_up_to(levels, kind, 8) == small
    assert len(small) == 1


def test_infer_kind():
    assert infer_kind(generate(CatalogSpec("G1", 3))).name == "graph"
    assert infer_kind(generate(CatalogSpec("chain2", 4))).name == "ordered_loops"
    assert infer_kind(generate(CatalogSpec("ordered_two_layer", 3))).name == "ordered_graph"
    assert infer_kind(generate(CatalogSpec("ordered_two_layer", 3, direction="ab"))).name == "ordered_digraph"
    assert infer_kind(make_structure((2,), 2, [[(0, 1)]])).name == "digraph"
    assert infer_kind(make_structure((2,), 2, [[(0, 0)]])).name == "binary"


def test_fit_examples():
    fit = fit_quasi_polynomial([n + 1 for n in range(10)], 1, 1)
    assert fit.exact and fit.coefficients == ((Fraction(1), Fraction(1)),)
    assert fit_quasi_polynomial([n // 2 + 1 for n in range(12)], 1, 2).exact
    for d in range(4):
        for p in range(1, 5):
            try:
                assert not fit_quasi_polynomial(fib(24), d, p).exact
            except InsufficientDataError:
                pass
    with pytest.raises(InsufficientDataError):
        fit_quasi_polynomial([1, 2, 3], 2, 2)


def test_fit_recovers_a_known_quasi_polynomial():
    f = lambda n: Fraction(n * n, 2) + (n % 3) * n + (1 if n % 2 else 4)
    fit = fit_quasi_polynomial([f(n) for n in range(40)], 2, 6, tail_start=4)
    assert fit.exact
    assert all(fit(n) == f(n) for n in range(40, 60))


def test_classify_examples():
    v = classify_growth([n // 2 + 1 for n in range(13)])
    assert (v.kind, v.degree, v.period) == ("quasi_polynomial", 1, 2)
    v = classify_growth([1] * 10)
    assert (v.kind, v.degree, v.period) == ("quasi_polynomial", 0, 1)
    v = classify_growth(fib(13))
    assert v.kind == "exponential" and v.fibonacci_dominance and v.ratio >= Fraction(13, 10)
    assert classify_growth([1, 1, 2]).kind == "inconclusive"


def test_classify_exponential_rule_is_sustained():
    # ratio 2 then a flat tail: not exponential
    assert classify_growth([2**n for n in range(8)] + [128] * 6).kind != "exponential"


def test_degree_law_small():
    for parts, expect in ((1, 0), (2, 1), (3, 2)):
        rep = infinite_component_degree_check(CatalogSpec("interval_chain", 0, parts=parts), 24, 8)
        assert rep.components == parts and rep.fitted_degree == expect and rep.matches
    rep = infinite_component_degree_check(CatalogSpec("interval_chain", 0, parts=3), 24, 8)
    assert list(rep.series) == [(n + 1) * (n + 2) // 2 for n in range(9)]
