"""Finite-scale Ramsey extraction and witnesses for infinitely many classes."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Hashable

from .core import Structure, StructureError, induced, make_structure, order_interval
from .decomposition import (
    _f_equiv,
    equivalence_partition,
    k_equivalent,
    monomorphic_partition,
)

__all__ = [
    "SearchFailure",
    "PairColoring",
    "ramsey_subset",
    "monochromatic_subsets",
    "WitnessSystem",
    "witness_system",
    "ExtractionResult",
    "invariant_restriction",
    "DichotomyWitness",
    "dichotomy_witness",
    "witnesses_of_both_kinds",
]


class SearchFailure(Exception):
    """A bounded search found nothing; a legitimate outcome on small inputs."""


@dataclass(frozen=True)
class PairColoring:
    """A total coloring of the 2-subsets of ``{0..m-1}``."""

    m: int
    colors: dict  # (i, j) with i < j -> color

    @classmethod
    def from_function(cls, m: int, fn: Callable[[int, int], Hashable]) -> "PairColoring":
        return cls(m, {(i, j): fn(i, j) for i, j in combinations(range(m), 2)})

    def __post_init__(self):
        expected = self.m * (self.m - 1) // 2
        if len(self.colors) != expected or any(not 0 <= i < j < self.m for i, j in self.colors):
            raise ValueError("coloring must assign a color to every pair i < j")

    def __call__(self, i: int, j: int):
        return self.colors[(i, j) if i < j else (j, i)]

    @property
    def palette(self) -> frozenset:
        return frozenset(self.colors.values())


def monochromatic_subsets(coloring: PairColoring, target: int):
    """Yield every ``target``-subset whose pairs share one color, in lexicographic order."""
    if target < 2:
        raise ValueError("target must be >= 2")
    m = coloring.m
    chosen: list[int] = []

    def rec(start: int, color):
        if len(chosen) == target:
            yield tuple(chosen)
            return
        for v in range(start, m - (target - len(chosen)) + 1):
            c = color
            ok = True
            for u in chosen:
                cu = coloring(u, v)
                if c is None:
                    c = cu
                elif cu != c:
                    ok = False
                    break
            if not ok:
                continue
            chosen.append(v)
            yield from rec(v + 1, c)
            chosen.pop()

    yield from rec(0, None)


def ramsey_subset(coloring: PairColoring, target: int) -> tuple[int, ...] | None:
    """Lexicographically first ``target``-subset whose pairs all share one color, or None."""
    return next(monochromatic_subsets(coloring, target), None)


@dataclass(frozen=True)
class WitnessSystem:
    """Representatives ``f`` of distinct classes and, for each pair n < n', a separating set ``g[(n, n')]``."""

    k: int
    f: tuple[int, ...]
    g: dict

    def g_i(self, i: int, n: int, n2: int) -> int:
        """The i-th witness of the pair, repeating the last one when the witness set is shorter."""
        w = self.g[(n, n2)]
        return w[min(i, len(w) - 1)] if w else self.f[n]


def _separating_set(R: Structure, x: int, y: int, k: int) -> tuple[int, ...] | None:
    others = [v for v in range(R.n) if v != x and v != y]
    for size in range(k + 1):
        for F in combinations(others, size):
            if not _f_equiv(R, x, y, F, False):
                return F
    return None


def _witnesses_for(R: Structure, k: int, f: tuple[int, ...]) -> WitnessSystem:
    g = {}
    for n, n2 in combinations(range(len(f)), 2):
        F = _separating_set(R, f[n], f[n2], k)
        if F is None:
            raise StructureError("representatives of distinct classes are not separated")
        g[(n, n2)] = F
    return WitnessSystem(k, f, g)


def witness_system(R: Structure, k: int, target: int) -> WitnessSystem:
    """f(0..target-1): least elements of the first ``target`` classes of ~_{<=k}; g: least separating sets."""
    classes = equivalence_partition(R, k)
    if len(classes) < target:
        raise SearchFailure(f"only {len(classes)} classes of ~<={k}, need {target}")
    return _witnesses_for(R, k, tuple(b[0] for b in classes.blocks[:target]))


def _atomic_type(R: Structure, points: tuple[int, ...]) -> tuple:
    """Equality pattern and relation membership of a tuple of points (positions, not vertices)."""
    eq = tuple(points.index(p) for p in points)
    rels = []
    for r, arity in enumerate(R.signature):
        if arity == 2:
            o = R.out_bits[r]
            rels.append(tuple((o[a] >> b) & 1 for a in points for b in points))
        else:
            s = R.rel_sets[r]
            from itertools import product

            rels.append(tuple(tuple(points[i] for i in t) in s for t in product(range(len(points)), repeat=arity)))
    return eq, tuple(rels)


@dataclass
class ExtractionResult:
    structure: Structure
    vertices: tuple[int, ...]
    rows: list[tuple[int, ...]]
    homogeneous: tuple[int, ...]
    classes: int
    row_width: int
    pair_type: tuple
    row_type: tuple
    signature: tuple[int, ...]
    transcript: list[str] = field(default_factory=list)

    def extend(self, length: int) -> Structure:
        """Prefix with ``length`` rows of the structure whose every pair of rows has the homogeneous pair type.

        This is the relabeling of the homogeneous index set as 0, 1, 2, ...;
        it needs binary relations and no equalities across rows.
        """
        if any(a != 2 for a in self.signature):
            raise StructureError("extension needs a binary signature")
        w = self.row_width
        eq, rels = self.pair_type
        for i in range(w, 2 * w):
            if eq[i] < w:
                raise SearchFailure("rows share points; the extension is not a union of disjoint rows")
        slots = [i for i in range(w) if eq[i] == i]
        col = {s: j for j, s in enumerate(slots)}
        width = len(slots)
        size = length * width
        out = [set() for _ in self.signature]
        tw = 2 * w
        for r in range(len(self.signature)):
            bits = rels[r]
            for row_a in range(length):
                for row_b in range(length):
                    for sa in slots:
                        for sb in slots:
                            a = row_a * width + col[sa]
                            b = row_b * width + col[sb]
                            if row_a == row_b:
                                bit = bits[sa * tw + sb]
                            elif row_a < row_b:
                                bit = bits[sa * tw + (w + sb)]
                            else:
                                bit = bits[(w + sa) * tw + sb]
                            if bit:
                                out[r].add((a, b))
        return make_structure(self.signature, size, [sorted(x) for x in out], ordered=True)


def _homogeneous_rows(R: Structure, ws: WitnessSystem, target: int, max_tries: int):
    k = ws.k
    rows = [(ws.f[n], *(ws.g_i(i, n, n + 1) for i in range(k))) for n in range(len(ws.f) - 1)]
    # rows are compared in the order of R
    rows.sort(key=lambda row: R.rank[row[0]])
    coloring = PairColoring.from_function(len(rows), lambda i, j: _atomic_type(R, rows[i] + rows[j]))
    tried = 0
    for cand in monochromatic_subsets(coloring, target):
        tried += 1
        verts = sorted({v for i in cand for v in rows[i]})
        S = induced(R, verts)
        ncls = len(monomorphic_partition(S))
        if ncls >= target:
            return ws, rows, coloring, cand, tried, S, verts, ncls
        if tried >= max_tries:
            break
    return None


def invariant_restriction(
    R: Structure, k: int, target: int, *, max_rows: int = 16, max_tries: int = 200
) -> ExtractionResult:
    """Ramsey-homogenized restriction of an ordered structure with many classes.

    Rows are F(n) = (f(n), g_0(n, n+1), ..., g_{k-1}(n, n+1)) built from a
    witness system over the available classes (at most ``max_rows + 1``).
    Representatives are the least elements of every class, then of every
    second class, and so on, until a suitable row set appears.
    Pairs of rows are colored by the atomic type of their concatenation; a
    monochromatic set of ``target`` rows is extracted and ``R`` is restricted
    to its points.  Monochromatic sets are tried in lexicographic order until
    the restriction keeps at least ``target`` monomorphic classes.
    """
    if not R.ordered:
        raise StructureError("invariant_restriction needs an ordered structure")
    transcript = []
    classes = equivalence_partition(R, k)
    if len(classes) < target + 1:
        raise SearchFailure(f"{len(classes)} classes of ~<={k}; need {target + 1} to build {target} rows")
    reps = [b[0] for b in classes.blocks]
    for stride in range(1, len(reps) // target + 1):
        f = tuple(reps[::stride][: max_rows + 1])
        if len(f) < target + 1:
            break
        found = _homogeneous_rows(R, _witnesses_for(R, k, f), target, max_tries)
        if found is not None:
            break
        transcript.append(f"stride {stride}: no monochromatic row set keeps {target} classes")
    else:
        found = None
    if found is None:
        raise SearchFailure(f"no homogeneous set of {target} rows keeps {target} classes")
    ws, rows, coloring, X, tried, S, verts, ncls = found
    transcript.append(f"stride {stride}: f = {list(ws.f)}")
    transcript.append(f"rows F(n) = (f(n), g_i(n, n+1)): {rows}")
    transcript.append(f"{len(coloring.palette)} pair colors over {len(rows)} rows")
    transcript.append(f"homogeneous rows {list(X)} (candidate {tried}); relabeled as 0..{target - 1}")
    transcript.append(f"restriction on {len(verts)} points has {ncls} monomorphic classes")
    pair_type = coloring(X[0], X[1])
    row_type = _atomic_type(R, rows[X[0]])
    return ExtractionResult(
        structure=S,
        vertices=tuple(verts),
        rows=[rows[i] for i in X],
        homogeneous=tuple(X),
        classes=ncls,
        row_width=k + 1,
        pair_type=pair_type,
        row_type=row_type,
        signature=R.signature,
        transcript=transcript,
    )


@dataclass(frozen=True)
class DichotomyWitness:
    kind: str  # "single" | "double"
    A: tuple[int, ...] = ()
    A1: tuple[int, ...] = ()
    A2: tuple[int, ...] = ()

    def validate(self, G: Structure) -> list[str]:
        """Re-check the defining conditions; returns a transcript, raises AssertionError on failure."""
        log = []
        if self.kind == "single":
            for x, y in combinations(self.A, 2):
                assert k_equivalent(G, x, y, 0), f"{x},{y} not 0-equivalent"
                assert not k_equivalent(G, x, y, 1), f"{x},{y} are 1-equivalent"
                log.append(f"{x}~0{y}, not {x}~1{y}")
            return log
        if self.kind != "double":
            raise ValueError(f"unknown witness kind {self.kind!r}")
        assert not set(self.A1) & set(self.A2), "A1 and A2 intersect"
        full = G.n - 2
        for Ai, Aj in ((self.A1, self.A2), (self.A2, self.A1)):
            for x, y in combinations(Ai, 2):
                assert k_equivalent(G, x, y, 1), f"{x},{y} not 1-equivalent"
                assert not k_equivalent_all(G, x, y, full), f"{x},{y} are equivalent"
                between = order_interval(G, x, y)
                assert between & set(Aj), f"interval ({x},{y}) misses the other set"
                log.append(f"{x}~1{y}, not {x}~{y}, interval meets {sorted(between & set(Aj))}")
        return log


def k_equivalent_all(G: Structure, x: int, y: int, k_max: int) -> bool:
    from .decomposition import le_k_equivalent

    return le_k_equivalent(G, x, y, max(k_max, 0))


def _clique(cands: list[int], adj, size: int) -> list[tuple[int, ...]]:
    """All cliques of the given size (lexicographic), for the pair predicate ``adj``."""
    out = []
    chosen: list[int] = []

    def rec(start: int):
        if len(chosen) == size:
            out.append(tuple(chosen))
            return
        for i in range(start, len(cands)):
            v = cands[i]
            if all(adj(u, v) for u in chosen):
                chosen.append(v)
                rec(i + 1)
                chosen.pop()

    rec(0)
    return out


def dichotomy_witness(
    G: Structure, target: int, *, prefer: str = "single", limit: int = 2000, exclusive: bool = False
) -> DichotomyWitness:
    """Search an ordered digraph for either kind of witness of infinitely many classes.

    single: ``target`` elements, pairwise 0-equivalent and pairwise not
    1-equivalent.  double: two disjoint ``target``-sets, pairwise 1-equivalent
    but inequivalent inside each set, every interval between two elements of
    one set meeting the other set.  ``prefer`` picks which kind is tried
    first; the result is re-validated before it is returned.  With
    ``exclusive=True`` only the preferred kind is searched.
    """
    if not G.ordered or G.signature != (2, 2):
        raise StructureError("dichotomy_witness expects an ordered digraph, signature (2, 2)")
    if target < 2 or G.n < 3:
        raise SearchFailure("need target >= 2 and at least 3 elements")
    order = list(G.order)
    full = G.n - 2

    def single():
        zero = equivalence_partition(G, 0)
        for block in zero.blocks:
            cands = sorted(block, key=G.rank.__getitem__)
            found = _first_clique(cands, lambda u, v: not k_equivalent(G, u, v, 1), target)
            if found:
                return DichotomyWitness("single", A=found)
        return None

    def double():
        rel1 = {}

        def good(u, v):
            key = (min(u, v), max(u, v))
            if key not in rel1:
                rel1[key] = k_equivalent(G, u, v, 1) and not k_equivalent_all(G, u, v, full)
            return rel1[key]

        cliques = _clique(order, good, target)[:limit]
        for c1 in cliques:
            for c2 in cliques:
                if set(c1) & set(c2) or G.rank[c1[0]] > G.rank[c2[0]]:
                    continue
                w = DichotomyWitness("double", A1=c1, A2=c2)
                if _interleaved(G, c1, c2):
                    return w
        return None

    searches = {"single": single, "double": double}
    if prefer not in searches:
        raise ValueError("prefer must be 'single' or 'double'")
    kinds = (prefer, "double" if prefer == "single" else "single")
    if exclusive:
        kinds = (prefer,)
    for kind in kinds:
        w = searches[kind]()
        if w is not None:
            w.validate(G)
            return w
    raise SearchFailure(f"no {'witness' if not exclusive else prefer + ' witness'} of size {target}")


def witnesses_of_both_kinds(G: Structure, target: int, *, limit: int = 2000) -> dict[str, DichotomyWitness | None]:
    """Search each alternative separately; a structure may realize both."""
    out = {}
    for kind in ("single", "double"):
        try:
            out[kind] = dichotomy_witness(G, target, prefer=kind, limit=limit, exclusive=True)
        except SearchFailure:
            out[kind] = None
    return out


def _first_clique(cands, adj, size):
    res = []

    def rec(start):
        if len(res) == size:
            return True
        for i in range(start, len(cands)):
            v = cands[i]
            if all(adj(u, v) for u in res):
                res.append(v)
                if rec(i + 1):
                    return True
                res.pop()
        return False

    return tuple(res) if rec(0) else None


def _interleaved(G: Structure, A1, A2) -> bool:
    for Ai, Aj in ((A1, A2), (A2, A1)):
        s = set(Aj)
        for x, y in combinations(Ai, 2):
            if not order_interval(G, x, y) & s:
                return False
    return True
