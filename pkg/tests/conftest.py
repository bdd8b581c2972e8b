"""Independent oracles and small fixtures shared by the tests."""

from itertools import combinations, permutations

import pytest

from monomorph.core import make_structure


def brute_isomorphic(R, S):
    """Search all n! bijections; no canonical codes involved."""
    if R.signature != S.signature or R.n != S.n:
        return False
    targets = [set(rel) for rel in S.relations]
    for perm in permutations(range(R.n)):
        if all({tuple(perm[v] for v in t) for t in rel} == tgt for rel, tgt in zip(R.relations, targets)):
            return True
    return False


def brute_induced(R, A):
    A = sorted(A)
    pos = {v: i for i, v in enumerate(A)}
    rels = [[tuple(pos[v] for v in t) for t in rel if all(v in pos for v in t)] for rel in R.relations]
    return make_structure(R.signature, len(A), rels, R.ordered)


def brute_types(R, m):
    """Representatives of the isomorphism types of m-subsets, grouped by brute force."""
    reps = []
    for A in combinations(range(R.n), m):
        S = brute_induced(R, A)
        if not any(brute_isomorphic(S, T) for T in reps):
            reps.append(S)
    return reps


def brute_profile(R, n_max):
    return [len(brute_types(R, m)) for m in range(n_max + 1)]


def relabel(R, perm):
    rels = [[tuple(perm[v] for v in t) for t in rel] for rel in R.relations]
    return make_structure(R.signature, R.n, rels, R.ordered)


def graph(n, edges):
    return make_structure((2,), n, [[e for a, b in edges for e in ((a, b), (b, a))]])


@pytest.fixture
def P3():
    return graph(3, [(0, 1), (1, 2)])


@pytest.fixture
def K3():
    return graph(3, [(0, 1), (0, 2), (1, 2)])


def matching(pairs):
    """M_k with pairs relabeled as (0,1), (2,3), ..."""
    return graph(2 * pairs, [(2 * i, 2 * i + 1) for i in range(pairs)])


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for key in sorted(RESULTS, key=lambda k: (int(k.rstrip("ab")), k)):
            terminalreporter.write_line(RESULTS[key])
