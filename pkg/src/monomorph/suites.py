"""Seeded property suites shared by the CLI ``verify`` command and the test suite.

Each suite draws random structures from a fixed seed, checks one property on
every sample and returns a :class:`SuiteResult` listing the violations.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .catalog import random_blowup, random_structure
from .core import Structure, is_interval, make_structure
from .decomposition import (
    components_via_oracle,
    equivalence_partition,
    k_equivalent,
    level_partition,
    monomorphic_partition,
)
from .extraction import PairColoring, ramsey_subset
from .profile import profile_series

__all__ = ["SuiteResult", "SUITES", "run_suite", "random_mixed"]


@dataclass
class SuiteResult:
    name: str
    samples: int = 0
    violations: list[str] = field(default_factory=list)
    report: list[str] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return self.samples > 0 and not self.violations

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name:<12} samples={self.samples:<4} violations={len(self.violations):<3} {self.seconds:.1f}s"


def _seeds(seed: int, count: int) -> list[int]:
    return [int(s) for s in np.random.default_rng(seed).integers(0, 2**31 - 1, size=count)]


def random_mixed(i: int, n: int, seed: int) -> Structure:
    """Sample number ``i`` of a rotation through graphs, digraphs, ordered and blown-up structures."""
    rng = np.random.default_rng(seed)
    density = float(rng.uniform(0.2, 0.8))
    kind = i % 6
    if kind == 0:
        return random_structure((2,), n, density, seed=seed, symmetric=True, loops=False)
    if kind == 1:
        return random_structure((2,), n, density, seed=seed)
    if kind == 2:
        return random_structure((2, 2), n, density, ordered=True, seed=seed)
    if kind == 3:
        return _blowup_of_size((2,), n, False, seed, symmetric=True)
    if kind == 4:
        return _blowup_of_size((2, 2), n, True, seed)
    return _blowup_of_size((2, 2), n, False, seed)


def _blowup_of_size(signature, n: int, ordered: bool, seed: int, *, symmetric: bool = False) -> Structure:
    """Blow-up with exactly ``n`` vertices (extra vertices from the seed are dropped)."""
    base = max(1, n // 2)
    R = random_blowup(signature, base, 3, ordered, seed, symmetric=symmetric)
    while R.n < n:
        base += 1
        R = random_blowup(signature, base, 3, ordered, seed, symmetric=symmetric)
    if R.n == n:
        return R
    keep = set(range(n))
    rels = [[t for t in rel if all(v in keep for v in t)] for rel in R.relations]
    return make_structure(R.signature, n, rels, R.ordered)


def _sizes(rng, lo: int, hi: int, count: int) -> list[int]:
    return [int(v) for v in rng.integers(lo, hi + 1, size=count)]


def suite_oracle(samples: int = 200, n: int = 7, seed: int = 1) -> SuiteResult:
    """Monomorphic partition against the brute-force block oracle."""
    res = SuiteResult("oracle")
    rng = np.random.default_rng(seed)
    for i, (s, size) in enumerate(zip(_seeds(seed, samples), _sizes(rng, 2, n, samples))):
        R = random_mixed(i, size, s)
        a, b = monomorphic_partition(R), components_via_oracle(R)
        res.samples += 1
        if a != b:
            res.violations.append(f"seed {s} n={size}: {a.to_json_obj()} vs oracle {b.to_json_obj()}")
    return res


def _threshold_block(res: SuiteResult, samples: int, lo: int, hi: int, k: int, make, seed: int, label: str):
    rng = np.random.default_rng(seed)
    for i, (s, size) in enumerate(zip(_seeds(seed, samples), _sizes(rng, lo, hi, samples))):
        R = make(i, size, s)
        res.samples += 1
        if equivalence_partition(R, k) != monomorphic_partition(R):
            res.violations.append(f"{label} seed {s} n={size}: <= {k} differs from the full relation")


def _ordered_graph(i, n, s):
    if i % 2:
        return _blowup_of_size((2, 2), n, True, s, symmetric=True)
    d = float(np.random.default_rng(s).uniform(0.2, 0.8))
    return random_structure((2, 2), n, d, ordered=True, seed=s, symmetric=True, loops=False)


def _digraph(i, n, s):
    if i % 2:
        return _blowup_of_size((2,), n, False, s)
    d = float(np.random.default_rng(s).uniform(0.2, 0.8))
    return random_structure((2,), n, d, seed=s, loops=False)


def _binary(i, n, s):
    if i % 2:
        return _blowup_of_size((2, 2), n, False, s)
    d = float(np.random.default_rng(s).uniform(0.2, 0.8))
    return random_structure((2, 2), n, d, seed=s)


def suite_thresholds(
    samples: int = 100, seed: int = 1, *, digraphs: int | None = None, binaries: int | None = None
) -> SuiteResult:
    """Thresholds 2 (ordered graphs), 3 (digraphs) and 6 (binary structures)."""
    res = SuiteResult("thresholds")
    digraphs = max(samples // 2, 1) if digraphs is None else digraphs
    binaries = max(samples // 5, 1) if binaries is None else binaries
    _threshold_block(res, samples, 5, 13, 2, _ordered_graph, seed, "ordered graph")
    _threshold_block(res, digraphs, 7, 13, 3, _digraph, seed + 1, "digraph")
    _threshold_block(res, binaries, 13, 15, 6, _binary, seed + 2, "binary")
    return res


def suite_2k1(samples: int = 120, seed: int = 1, n_max: int = 9) -> SuiteResult:
    """Single-level ~_k against ~_{<=k} once n >= 2k+1, for k = 1, 2, 3."""
    res = SuiteResult("2k+1")
    rng = np.random.default_rng(seed)
    for i, s in enumerate(_seeds(seed, samples)):
        k = 1 + i % 3
        size = int(rng.integers(2 * k + 1, max(n_max, 2 * k + 1) + 1))
        R = random_mixed(i, size, s)
        res.samples += 1
        if level_partition(R, k) != equivalence_partition(R, k):
            res.violations.append(f"seed {s} n={size} k={k}")
    return res


def _ordered_sample(i: int, n: int, s: int) -> Structure:
    if i % 2:
        return _blowup_of_size((2, 2), n, True, s)
    d = float(np.random.default_rng(s).uniform(0.2, 0.8))
    return random_structure((2, 2), n, d, ordered=True, seed=s)


def suite_intervals(samples: int = 200, n: int = 9, seed: int = 1) -> SuiteResult:
    """Classes of size >= 3 are intervals; adjacent classes with an interval union are 1-separated.

    Also checks that an interval of the structure lying inside one
    1-equivalence class lies inside one class.
    """
    res = SuiteResult("intervals")
    rng = np.random.default_rng(seed)
    for i, (s, size) in enumerate(zip(_seeds(seed, samples), _sizes(rng, 3, n, samples))):
        R = _ordered_sample(i, size, s)
        P = monomorphic_partition(R)
        res.samples += 1
        rank = R.rank
        for b in P.blocks:
            if len(b) >= 3:
                ranks = sorted(rank[v] for v in b)
                if not is_interval(R, b):
                    res.violations.append(f"seed {s}: class {list(b)} is not an interval of R")
                elif ranks[-1] - ranks[0] + 1 != len(b):
                    res.violations.append(f"seed {s}: class {list(b)} is not an interval of the order")
        for b1, b2 in combinations(P.blocks, 2):
            ranks = sorted(rank[v] for v in b1 + b2)
            if ranks[-1] - ranks[0] + 1 != len(ranks):
                continue
            if all(k_equivalent(R, x, y, 1) for x in b1 for y in b2):
                res.violations.append(f"seed {s}: classes {list(b1)} and {list(b2)} share a 1-class")
        block = {v: P.block_of(v) for v in range(R.n)}
        one = level_partition(R, 1)
        for lo in range(R.n):
            for hi in range(lo + 2, R.n + 1):
                seg = R.order[lo:hi]
                if len({block[v] for v in seg}) == 1:
                    continue
                if len({one.block_of(v) for v in seg}) == 1 and is_interval(R, seg):
                    res.violations.append(f"seed {s}: interval {list(seg)} in one 1-class spans classes")
    return res


def suite_consistency(samples: int = 100, n: int = 8, seed: int = 1) -> SuiteResult:
    """Ordered fast-path profile counting against generic canonical codes."""
    res = SuiteResult("consistency")
    rng = np.random.default_rng(seed)
    for i, (s, size) in enumerate(zip(_seeds(seed, samples), _sizes(rng, 1, n, samples))):
        R = _ordered_sample(i, size, s)
        fast = profile_series(R, size, method="ordered")
        slow = profile_series(R, size, method="generic")
        res.samples += 1
        if fast != slow:
            res.violations.append(f"seed {s} n={size}: {list(fast)} vs {list(slow)}")
    return res


def suite_ramsey(samples: int = 50, seed: int = 1) -> SuiteResult:
    """Random 2-colorings of the pairs of 18 points always contain a monochromatic 4-set."""
    res = SuiteResult("ramsey")
    for s in _seeds(seed, samples):
        rng = np.random.default_rng(s)
        bits = rng.integers(0, 2, size=18 * 17 // 2)
        c = PairColoring(18, {p: int(b) for p, b in zip(combinations(range(18), 2), bits)})
        X = ramsey_subset(c, 4)
        res.samples += 1
        if X is None or len({c(a, b) for a, b in combinations(X, 2)}) != 1:
            res.violations.append(f"seed {s}: {X}")
    return res


def _random_tournament(n: int, seed: int) -> Structure:
    rng = np.random.default_rng(seed)
    arcs = [(a, b) if rng.random() < 0.5 else (b, a) for a, b in combinations(range(n), 2)]
    return make_structure((2,), n, [arcs])


def _transitive_tournament(n: int) -> Structure:
    return make_structure((2,), n, [[(a, b) for a, b in combinations(range(n), 2)]])


def suite_tournament(samples: int = 6, n_max: int = 11, seed: int = 1) -> SuiteResult:
    """Block counts of ~<=2 and ~<=3 on growing tournament prefixes (reported, not asserted)."""
    res = SuiteResult("tournament")
    families = {
        "transitive": lambda n, s: _transitive_tournament(n),
        "random": _random_tournament,
    }
    for name, make in families.items():
        for s in _seeds(seed, max(samples // 2, 1)):
            counts = []
            for n in range(5, n_max + 1):
                T = make(n, s)
                counts.append((n, len(equivalence_partition(T, 2)), len(equivalence_partition(T, 3))))
            res.samples += 1
            res.report.append(f"{name} seed {s}: " + " ".join(f"n={n}:{a}/{b}" for n, a, b in counts))
            if name == "transitive" and any(b != a for _, a, b in counts):
                res.violations.append(f"transitive tournament seed {s}: counts differ")
    return res


SUITES = {
    "oracle": suite_oracle,
    "thresholds": suite_thresholds,
    "2k+1": suite_2k1,
    "intervals": suite_intervals,
    "consistency": suite_consistency,
    "ramsey": suite_ramsey,
    "tournament": suite_tournament,
}


def run_suite(name: str, **kwargs) -> SuiteResult:
    """Run one named suite, timing it.  Unknown keyword arguments are dropped."""
    try:
        fn = SUITES[name]
    except KeyError:
        raise ValueError(f"unknown suite {name!r}; expected one of {sorted(SUITES)}") from None
    import inspect

    params = inspect.signature(fn).parameters
    t0 = time.perf_counter()
    res = fn(**{k: v for k, v in kwargs.items() if k in params and v is not None})
    res.seconds = time.perf_counter() - t0
    return res
