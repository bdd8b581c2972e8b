import random
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import brute_induced, brute_isomorphic, graph, relabel
from monomorph.catalog import CatalogSpec, generate, random_structure
from monomorph.core import (
    StructureError,
    canonical_code,
    chain_relation,
    code_size,
    colored_code,
    embeds,
    from_json,
    induced,
    is_interval,
    isomorphic,
    make_structure,
    order_interval,
    structure_from_code,
    to_json,
)


def test_make_structure_path(P3):
    assert P3.relations[0] == ((0, 1), (1, 0), (1, 2), (2, 1))


def test_make_structure_ordered_two_chain():
    R = make_structure((2, 2), 2, [[(0, 0), (0, 1), (1, 1)], []], ordered=True)
    assert R.ordered and R.order == (0, 1)


def test_make_structure_rejects_non_antisymmetric_order():
    with pytest.raises(StructureError):
        make_structure((2,), 2, [[(0, 1), (1, 0), (0, 0), (1, 1)]], ordered=True)
    with pytest.raises(StructureError):
        make_structure((2,), 2, [[(0, 1), (1, 0)]], ordered=True)


@pytest.mark.parametrize(
    "sig, rels",
    [((2,), [[(0, 3)]]), ((2,), [[(0, 1, 1)]]), ((0,), [[]]), ((2,), [])],
)
def test_make_structure_errors(sig, rels):
    with pytest.raises(StructureError):
        make_structure(sig, 3, rels)


def test_canonical_storage_sorted_and_deduplicated():
    R = make_structure((2,), 3, [[(2, 1), (0, 1), (2, 1)]])
    assert R.relations[0] == ((0, 1), (2, 1))


def test_induced_examples(P3, K3):
    assert induced(P3, [0, 2]).relations[0] == ()
    assert induced(P3, range(3)) == P3
    assert induced(K3, [0, 1]) == graph(2, [(0, 1)])
    with pytest.raises(StructureError):
        induced(P3, [0, 5])


def test_induced_functorial():
    R = random_structure((2, 3), 7, 0.4, seed=3)
    A = [1, 2, 4, 5, 6]
    B = [0, 2, 3]  # positions inside A
    assert induced(induced(R, A), B) == induced(R, [A[i] for i in B])


def test_isomorphic_examples(P3, K3):
    assert isomorphic(P3, relabel(P3, [1, 0, 2]))
    assert not isomorphic(P3, K3)
    a = make_structure((2, 2), 2, [chain_relation(2), [(0, 1)]], ordered=True)
    b = make_structure((2, 2), 2, [chain_relation(2), [(1, 0)]], ordered=True)
    assert not isomorphic(a, b)
    with pytest.raises(StructureError):
        isomorphic(P3, make_structure((2, 2), 3, [[], []]))


def test_canonical_code_examples(P3, K3):
    k2_plus = graph(3, [(0, 1)])
    plus_k2 = graph(3, [(1, 2)])
    assert canonical_code(k2_plus) == canonical_code(plus_k2)
    assert canonical_code(P3) != canonical_code(K3)
    R = generate(CatalogSpec("ordered_two_layer", 3))
    rebuilt = make_structure(R.signature, R.n, [list(r) for r in R.relations], ordered=True)
    assert canonical_code(R) == canonical_code(rebuilt)


def _random_pair(rng, sig, n):
    R = random_structure(sig, n, rng.uniform(0.2, 0.8), seed=rng.randrange(10**6))
    if rng.random() < 0.5:
        perm = list(range(n))
        rng.shuffle(perm)
        return R, relabel(R, perm)
    return R, random_structure(sig, n, rng.uniform(0.2, 0.8), seed=rng.randrange(10**6))


def test_canonical_code_against_brute_force():
    rng = random.Random(7)
    for _ in range(150):
        sig = rng.choice([(2,), (2, 2), (1, 2), (3,)])
        n = rng.randint(0, 6 if sig != (3,) else 4)
        R, S = _random_pair(rng, sig, n)
        assert (canonical_code(R) == canonical_code(S)) == brute_isomorphic(R, S)
        assert isomorphic(R, S) == brute_isomorphic(R, S)


def test_canonical_code_on_symmetric_graphs():
    # highly regular inputs stress the automorphism pruning
    cycle = graph(8, [(i, (i + 1) % 8) for i in range(8)])
    cube = graph(8, [(a, b) for a, b in combinations(range(8), 2) if bin(a ^ b).count("1") == 1])
    rng = random.Random(1)
    for G in (cycle, cube, graph(8, []), generate(CatalogSpec("G1", 4)), generate(CatalogSpec("G10", 4))):
        for _ in range(5):
            perm = list(range(G.n))
            rng.shuffle(perm)
            assert canonical_code(relabel(G, perm)) == canonical_code(G)
    assert canonical_code(cycle) != canonical_code(cube)


def test_code_roundtrip():
    rng = random.Random(2)
    for _ in range(40):
        R = random_structure((2, 1, 3), rng.randint(0, 5), 0.5, ordered=False, seed=rng.randrange(999))
        c = canonical_code(R)
        S = structure_from_code(c)
        assert code_size(c) == R.n
        assert brute_isomorphic(R, S)
        assert canonical_code(S) == c
    O = random_structure((2, 2), 6, 0.5, ordered=True, seed=4)
    assert isomorphic(structure_from_code(canonical_code(O)), O)


def test_colored_code_respects_colors(P3):
    assert colored_code(P3, [0, 1, 2]) == colored_code(relabel(P3, [2, 1, 0]), [2, 1, 0])
    assert colored_code(P3, [0, 0, 1]) != colored_code(P3, [0, 1, 0])


def test_embeds_examples(P3, K3):
    H4 = generate(CatalogSpec("half_graph", 4))
    assert embeds(P3, H4)
    assert not embeds(K3, generate(CatalogSpec("G3", 4)))
    assert embeds(H4, H4)


def test_embeds_against_brute_force():
    rng = random.Random(5)
    for _ in range(60):
        ordered = rng.random() < 0.5
        sig = (2, 2) if ordered else (2,)
        R = random_structure(sig, rng.randint(3, 6), 0.5, ordered=ordered, seed=rng.randrange(999))
        P = random_structure(sig, rng.randint(1, 3), 0.5, ordered=ordered, seed=rng.randrange(999))
        expect = any(
            (brute_induced(R, A) == P if ordered else brute_isomorphic(brute_induced(R, A), P))
            for A in combinations(range(R.n), P.n)
        )
        assert embeds(P, R) == expect


def _brute_binary_interval(R, S):
    S = set(S)
    for rel in R.rel_sets:
        for z in set(range(R.n)) - S:
            for x in S:
                for y in S:
                    if ((z, x) in rel) != ((z, y) in rel) or ((x, z) in rel) != ((y, z) in rel):
                        return False
    return True


def test_is_interval_examples(P3):
    K4 = graph(4, list(combinations(range(4), 2)))
    assert all(is_interval(K4, S) for m in range(5) for S in combinations(range(4), m))
    assert is_interval(P3, {0, 2})
    assert not is_interval(P3, {0, 1})
    with pytest.raises(StructureError):
        is_interval(P3, {7})


def test_is_interval_against_definition():
    rng = random.Random(11)
    for _ in range(80):
        R = random_structure((2, 2), rng.randint(2, 6), 0.5, seed=rng.randrange(999))
        S = [v for v in range(R.n) if rng.random() < 0.5]
        assert is_interval(R, S) == _brute_binary_interval(R, S)


def test_is_interval_ternary():
    # one triple (0, 2, 3): swapping 0 for 1 with outside part {2, 3} breaks it
    R = make_structure((3,), 4, [[(0, 2, 3)]])
    assert not is_interval(R, {0, 1})
    # two entries inside S are never substituted together
    assert is_interval(R, {2, 3})
    assert is_interval(R, {3, 2, 1, 0})


def test_order_interval_examples():
    C = make_structure((2,), 4, [chain_relation(4)], ordered=True)
    assert order_interval(C, 0, 3) == {1, 2}
    assert order_interval(C, 3, 0) == {1, 2}
    assert order_interval(C, 2, 2) == frozenset()
    assert order_interval(C, 1, 2) == frozenset()
    with pytest.raises(StructureError):
        order_interval(graph(3, []), 0, 2)


def test_order_interval_follows_the_order_not_labels():
    rev = make_structure((2,), 3, [[(b, a) for a, b in chain_relation(3)]], ordered=True)
    assert rev.order == (2, 1, 0)
    assert order_interval(rev, 2, 0) == {1}


def test_json_roundtrip_is_byte_identical():
    R = random_structure((2, 2), 5, 0.5, ordered=True, seed=9)
    text = to_json(R)
    assert to_json(from_json(text)) == text
    assert from_json(text) == R
    with pytest.raises(StructureError):
        from_json('{"signature":[2],"n":1,"ordered":false,"relations":[[]],"extra":1}')


@st.composite
def structures(draw):
    sig = draw(st.sampled_from([(2,), (2, 2), (1, 2)]))
    n = draw(st.integers(0, 6))
    rels = []
    for arity in sig:
        tuples = st.tuples(*[st.integers(0, n - 1)] * arity) if n else st.nothing()
        rels.append(draw(st.lists(tuples, max_size=12)) if n else [])
    return make_structure(sig, n, rels)


@settings(max_examples=60, deadline=None)
@given(structures(), st.randoms(use_true_random=False))
def test_code_invariant_under_relabeling(R, rnd):
    perm = list(range(R.n))
    rnd.shuffle(perm)
    S = relabel(R, perm)
    assert canonical_code(R) == canonical_code(S)
    assert isomorphic(R, S)
    assert embeds(R, S) and embeds(S, R)


@settings(max_examples=40, deadline=None)
@given(structures(), structures(), structures())
def test_isomorphism_is_an_equivalence(R, S, T):
    if not (R.signature == S.signature == T.signature):
        return
    assert isomorphic(R, R)
    assert isomorphic(R, S) == isomorphic(S, R)
    if isomorphic(R, S) and isomorphic(S, T):
        assert isomorphic(R, T)
    if embeds(R, S) and embeds(S, T):
        assert embeds(R, T)
