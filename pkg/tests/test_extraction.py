import random
from itertools import combinations

import pytest

from conftest import graph
from monomorph.catalog import CatalogSpec, generate
from monomorph.core import StructureError, chain_relation, make_structure
from monomorph.decomposition import f_equivalent, k_equivalent, monomorphic_partition
from monomorph.extraction import (
    DichotomyWitness,
    PairColoring,
    SearchFailure,
    dichotomy_witness,
    invariant_restriction,
    monochromatic_subsets,
    ramsey_subset,
    witness_system,
    witnesses_of_both_kinds,
)
from monomorph.extraction import _atomic_type
from monomorph.profile import classify_growth, profile_series


def is_monochromatic(c, X):
    return len({c(a, b) for a, b in combinations(X, 2)}) <= 1


def brute_first_monochromatic(c, t):
    for X in combinations(range(c.m), t):
        if is_monochromatic(c, X):
            return X
    return None


def test_ramsey_examples():
    const = PairColoring.from_function(6, lambda i, j: 0)
    assert ramsey_subset(const, 4) == (0, 1, 2, 3)
    parity = PairColoring.from_function(5, lambda i, j: (i + j) % 2)
    assert ramsey_subset(parity, 3) == (0, 2, 4)
    with pytest.raises(ValueError):
        ramsey_subset(const, 1)


def test_ramsey_failure_is_none():
    # the 5-cycle coloring has no monochromatic triangle
    c = PairColoring.from_function(5, lambda i, j: int((j - i) % 5 in (1, 4)))
    assert ramsey_subset(c, 3) is None


def test_ramsey_matches_brute_force():
    rng = random.Random(0)
    for _ in range(100):
        m = rng.randint(2, 9)
        k = rng.randint(2, 3)
        c = PairColoring.from_function(m, lambda i, j: rng.randrange(k))
        t = rng.randint(2, 4)
        assert ramsey_subset(c, t) == brute_first_monochromatic(c, t)


def test_ramsey_18_points_never_fail():
    rng = random.Random(1)
    for _ in range(30):
        c = PairColoring.from_function(18, lambda i, j: rng.randrange(2))
        X = ramsey_subset(c, 4)
        assert X is not None and is_monochromatic(c, X)


def test_monochromatic_subsets_lexicographic():
    c = PairColoring.from_function(5, lambda i, j: 0)
    assert list(monochromatic_subsets(c, 4)) == list(combinations(range(5), 4))


def test_pair_coloring_must_be_total():
    with pytest.raises(ValueError):
        PairColoring(3, {(0, 1): 0})


def _check_witness_system(R, ws, target):
    assert len(ws.f) == target
    blocks = [monomorphic_partition(R).block_of(v) for v in ws.f]
    for (n, n2), F in ws.g.items():
        assert len(F) <= ws.k
        assert not f_equivalent(R, ws.f[n], ws.f[n2], F)
    return blocks


def test_witness_system_matching():
    R = graph(8, [(0, 4), (1, 5), (2, 6), (3, 7)])
    ws = witness_system(R, 1, 3)
    assert ws.f == (0, 1, 2)
    assert all(ws.g[(n, n2)] == (4 + n,) for n, n2 in combinations(range(3), 2))
    _check_witness_system(R, ws, 3)


def test_witness_system_half_graph():
    R = generate(CatalogSpec("half_graph", 5))
    ws = witness_system(R, 1, 4)
    assert ws.f == (0, 1, 2, 3)
    for (n, n2), (g,) in ws.g.items():
        assert g >= 5
        adj = R.rel_sets[0]
        assert ((ws.f[n], g) in adj) != ((ws.f[n2], g) in adj)


def test_witness_system_failure():
    K4 = graph(4, list(combinations(range(4), 2)))
    with pytest.raises(SearchFailure):
        witness_system(K4, 1, 2)


@pytest.mark.parametrize(
    "spec",
    [
        CatalogSpec("ordered_two_layer", 6),
        CatalogSpec("ordered_two_layer", 6, reflexive=True),
        CatalogSpec("ordered_two_layer", 8, base_rule="le"),
    ],
)
def test_invariant_restriction(spec):
    R = generate(spec)
    res = invariant_restriction(R, 1, 4)
    # the pair coloring is constant on the homogeneous rows
    types = {_atomic_type(R, a + b) for a, b in combinations(res.rows, 2)}
    assert types == {res.pair_type}
    S = res.structure
    assert res.classes == len(monomorphic_partition(S)) >= 4
    assert set(res.vertices) == {v for row in res.rows for v in row}
    assert len(res.homogeneous) == 4
    E = res.extend(10)
    assert classify_growth(profile_series(E, 10)).kind == "exponential"
    # the extension restricted to its first rows reproduces the restriction
    assert E.n == 10 * len(set(res.rows[0]))


def test_matching_restriction_is_a_smaller_matching():
    res = invariant_restriction(generate(CatalogSpec("ordered_two_layer", 6)), 1, 4)
    assert res.structure == generate(CatalogSpec("ordered_two_layer", 4))
    assert res.extend(5) == generate(CatalogSpec("ordered_two_layer", 5))


def test_invariant_restriction_failures():
    with pytest.raises(SearchFailure):
        invariant_restriction(generate(CatalogSpec("chain", 6)), 1, 3)
    with pytest.raises(StructureError):
        invariant_restriction(generate(CatalogSpec("G1", 4)), 1, 3)


def test_dichotomy_reflexive_matching():
    G = generate(CatalogSpec("ordered_two_layer", 6, reflexive=True))
    w = dichotomy_witness(G, 4)
    assert w.kind == "single" and w.A == (0, 2, 4, 6)
    for x, y in combinations(w.A, 2):
        assert k_equivalent(G, x, y, 0) and not k_equivalent(G, x, y, 1)


def test_dichotomy_half_graph_target_3():
    G = generate(CatalogSpec("ordered_two_layer", 8, base_rule="le"))
    w = dichotomy_witness(G, 3)
    assert w.validate(G)


def test_dichotomy_failure_on_chain2():
    G = generate(CatalogSpec("chain2", 8))
    with pytest.raises(SearchFailure):
        dichotomy_witness(G, 3)


def test_dichotomy_double_kind():
    # arcs 0 -> 2 and 1 -> 3 on a 4-chain: {0, 2} and {1, 3} interleave
    G = make_structure((2, 2), 4, [chain_relation(4), [(0, 2), (1, 3)]], ordered=True)
    w = dichotomy_witness(G, 2, prefer="double")
    assert (w.kind, w.A1, w.A2) == ("double", (0, 2), (1, 3))
    assert len(w.validate(G)) == 2
    found = witnesses_of_both_kinds(G, 2)
    assert found["double"] == w


def test_both_kinds_reported_separately():
    G = generate(CatalogSpec("ordered_two_layer", 6, reflexive=True))
    found = witnesses_of_both_kinds(G, 4)
    assert found["single"].A == (0, 2, 4, 6)
    assert found["double"] is None


def test_validate_rejects_bad_witness():
    G = generate(CatalogSpec("ordered_two_layer", 4))
    with pytest.raises(AssertionError):
        DichotomyWitness("single", A=(0, 1, 2)).validate(G)
    with pytest.raises(AssertionError):
        DichotomyWitness("double", A1=(0, 2), A2=(2, 4)).validate(G)
    with pytest.raises(ValueError):
        DichotomyWitness("triple").validate(G)
