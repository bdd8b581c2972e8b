"""Element equivalences and monomorphic components.

``x`` and ``y`` are F-equivalent when the restrictions to ``{x} | F`` and
``{y} | F`` are isomorphic.  Quantifying over all F of a given size gives the
k-equivalence, over all sizes up to k the "<= k" equivalence, and over every
finite F the relation whose classes are the monomorphic components.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from .catalog import CatalogSpec, generate
from .core import Structure, StructureError, _encode, canonical_code, induced

__all__ = [
    "InconsistencyError",
    "Partition",
    "subset_type",
    "f_equivalent",
    "k_equivalent",
    "le_k_equivalent",
    "equivalence_partition",
    "level_partition",
    "monomorphic_partition",
    "is_monomorphic_block_oracle",
    "components_via_oracle",
    "threshold_for",
    "THRESHOLDS",
    "component_count_series",
]


class InconsistencyError(RuntimeError):
    """A relation that must be an equivalence failed transitivity (a defect signal)."""


@dataclass(frozen=True)
class Partition:
    blocks: tuple[tuple[int, ...], ...]

    @classmethod
    def from_blocks(cls, blocks: Iterable[Iterable[int]]) -> "Partition":
        bs = [tuple(sorted(b)) for b in blocks if b]
        bs.sort(key=lambda b: b[0])
        seen: set[int] = set()
        for b in bs:
            if seen & set(b):
                raise ValueError("blocks are not disjoint")
            seen |= set(b)
        return cls(tuple(bs))

    def __len__(self) -> int:
        return len(self.blocks)

    def __iter__(self):
        return iter(self.blocks)

    def block_of(self, v: int) -> int:
        for i, b in enumerate(self.blocks):
            if v in b:
                return i
        raise KeyError(v)

    def refines(self, other: "Partition") -> bool:
        """True when every block of ``self`` lies inside a block of ``other``."""
        idx = {v: i for i, b in enumerate(other.blocks) for v in b}
        return all(len({idx[v] for v in b}) == 1 for b in self.blocks)

    def to_json_obj(self) -> list[list[int]]:
        return [list(b) for b in self.blocks]


def _mask(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def subset_type(R: Structure, vertices: Iterable[int]) -> bytes:
    """Isomorphism-type key of the induced substructure on ``vertices`` (cached per structure)."""
    verts = tuple(vertices)
    key = _mask(verts)
    cache = R.type_cache
    t = cache.get(key)
    if t is None:
        if R.ordered:
            t = _encode(R, sorted(verts, key=R.rank.__getitem__))
        else:
            t = canonical_code(induced(R, verts), "generic")
        cache[key] = t
    return t


def _pointwise(R: Structure, x: int, y: int, F: Sequence[int]) -> bool:
    """Does fixing F and sending x to y preserve every relation?"""
    fm = _mask(F)
    for r, arity in enumerate(R.signature):
        if arity == 2:
            o, i = R.out_bits[r], R.in_bits[r]
            if ((o[x] >> x) & 1) != ((o[y] >> y) & 1):
                return False
            if (o[x] & fm) != (o[y] & fm) or (i[x] & fm) != (i[y] & fm):
                return False
        else:
            rel = R.rel_sets[r]
            dom_x = set(F) | {x}
            dom_y = set(F) | {y}
            for t in rel:
                if x in t and all(e in dom_x for e in t):
                    if tuple(y if e == x else e for e in t) not in rel:
                        return False
                if y in t and all(e in dom_y for e in t):
                    if tuple(x if e == y else e for e in t) not in rel:
                        return False
    return True


def _tuple_counts(R: Structure, verts: Sequence[int]) -> tuple[int, ...]:
    m = _mask(verts)
    counts = []
    for r, arity in enumerate(R.signature):
        if arity == 2:
            counts.append(sum((R.out_bits[r][v] & m).bit_count() for v in verts))
        else:
            s = set(verts)
            counts.append(sum(1 for t in R.relations[r] if all(e in s for e in t)))
    return tuple(counts)


def _f_equiv(R: Structure, x: int, y: int, F: Sequence[int], pointwise: bool) -> bool:
    if _pointwise(R, x, y, F):
        return True
    if pointwise:
        return False
    A = (*F, x)
    B = (*F, y)
    if not R.ordered and _tuple_counts(R, A) != _tuple_counts(R, B):
        return False
    return subset_type(R, A) == subset_type(R, B)


def f_equivalent(R: Structure, x: int, y: int, F: Iterable[int], *, pointwise: bool = False) -> bool:
    """Whether the restrictions of ``R`` to ``{x} | F`` and ``{y} | F`` are isomorphic.

    With ``pointwise=True`` only the map fixing F and sending x to y is
    accepted as the isomorphism.
    """
    F = tuple(F)
    if x == y:
        raise ValueError("x and y must be distinct")
    if x in F or y in F:
        raise ValueError("x and y must lie outside F")
    for v in (x, y, *F):
        if not 0 <= v < R.n:
            raise StructureError(f"vertex {v} out of range [0, {R.n})")
    return _f_equiv(R, x, y, F, pointwise)


def _others(R: Structure, x: int, y: int) -> list[int]:
    return [v for v in range(R.n) if v != x and v != y]


def _check_k(R: Structure, k: int) -> None:
    if k < 0 or k > max(R.n - 2, 0):
        raise ValueError(f"k={k} out of range [0, {max(R.n - 2, 0)}]")


def k_equivalent(R: Structure, x: int, y: int, k: int, *, pointwise: bool = False) -> bool:
    """x ~_k y: F-equivalence for every k-subset F of the other elements."""
    _check_k(R, k)
    if x == y:
        return True
    others = _others(R, x, y)
    return all(_f_equiv(R, x, y, F, pointwise) for F in combinations(others, k))


def le_k_equivalent(R: Structure, x: int, y: int, k: int, *, pointwise: bool = False) -> bool:
    """x ~_{<=k} y: k'-equivalence for every k' <= k (smallest F first, so failures exit early)."""
    _check_k(R, k)
    if x == y:
        return True
    others = _others(R, x, y)
    for kk in range(k + 1):
        for F in combinations(others, kk):
            if not _f_equiv(R, x, y, F, pointwise):
                return False
    return True


def _partition_from_relation(n: int, related) -> Partition:
    rel = [[x == y or related(min(x, y), max(x, y)) for y in range(n)] for x in range(n)]
    for x in range(n):
        for y in range(x + 1, n):
            if rel[x][y] and rel[x] != rel[y]:
                z = next(z for z in range(n) if rel[x][z] != rel[y][z])
                raise InconsistencyError(
                    f"equivalence fails transitivity on ({x}, {y}, {z})"
                )
    blocks = []
    seen = set()
    for x in range(n):
        if x in seen:
            continue
        b = [y for y in range(n) if rel[x][y]]
        seen.update(b)
        blocks.append(b)
    return Partition.from_blocks(blocks)


def equivalence_partition(R: Structure, k_max: int, *, pointwise: bool = False) -> Partition:
    """Classes of ~_{<=k_max}.

    The pairwise relation is computed in full and checked for transitivity;
    a failure raises :class:`InconsistencyError` instead of being closed over.
    """
    if R.n < 2:
        if k_max != 0:
            _check_k(R, k_max)
        return Partition.from_blocks([[v] for v in range(R.n)])
    _check_k(R, k_max)
    return _partition_from_relation(R.n, lambda x, y: le_k_equivalent(R, x, y, k_max, pointwise=pointwise))


def level_partition(R: Structure, k: int, *, pointwise: bool = False) -> Partition:
    """Classes of the single-level relation ~_k."""
    if R.n < 2:
        return Partition.from_blocks([[v] for v in range(R.n)])
    _check_k(R, k)
    return _partition_from_relation(R.n, lambda x, y: k_equivalent(R, x, y, k, pointwise=pointwise))


def monomorphic_partition(R: Structure, *, k_max: int | None = None, pointwise: bool = False) -> Partition:
    """Monomorphic components of a finite structure: the classes of ~_{<= n-2}.

    ``k_max`` caps the size of F (use a known threshold from
    :func:`threshold_for` as a speed-up when it applies).
    """
    full = max(R.n - 2, 0)
    k = full if k_max is None else min(k_max, full)
    return equivalence_partition(R, k, pointwise=pointwise)


def is_monomorphic_block_oracle(
    R: Structure,
    B: Iterable[int],
    k_max: int | None = None,
    _types: dict | None = None,
) -> bool:
    """Brute-force block test straight from the definition.

    For every outside part O of V \\ B and every trace size s <= k_max, all
    sets O | S with S an s-subset of B must induce isomorphic structures.
    """
    B = sorted(set(B))
    for v in B:
        if not 0 <= v < R.n:
            raise StructureError(f"vertex {v} out of range [0, {R.n})")
    if k_max is None:
        k_max = len(B)
    types = {} if _types is None else _types
    outside = [v for v in range(R.n) if v not in set(B)]

    def type_of(verts):
        key = _mask(verts)
        t = types.get(key)
        if t is None:
            t = canonical_code(induced(R, verts))
            types[key] = t
        return t

    for size in range(len(outside) + 1):
        for O in combinations(outside, size):
            for s in range(1, min(k_max, len(B)) + 1):
                first = None
                for S in combinations(B, s):
                    t = type_of(O + S)
                    if first is None:
                        first = t
                    elif t != first:
                        return False
    return True


def components_via_oracle(R: Structure) -> Partition:
    """Maximal monomorphic blocks found by greedy merging under the brute-force oracle.

    Exponential in n; meant for n <= 8.
    """
    types: dict = {}
    blocks: list[list[int]] = []
    for v in range(R.n):
        for b in blocks:
            if is_monomorphic_block_oracle(R, b + [v], _types=types):
                b.append(v)
                break
        else:
            blocks.append([v])
    return Partition.from_blocks(blocks)


THRESHOLDS = {"binary": 6, "digraph": 3, "ordered_graph": 2}


def threshold_for(kind: str) -> int:
    """Size of F beyond which ~_{<=k} stops refining, for the structure kinds where one is known."""
    try:
        return THRESHOLDS[kind]
    except KeyError:
        raise ValueError(f"unknown kind {kind!r}; expected one of {sorted(THRESHOLDS)}") from None


def component_count_series(spec: CatalogSpec, k_list: Iterable[int]) -> list[int]:
    """Number of monomorphic components of each prefix ``generate(spec.with_size(k))``."""
    return [len(monomorphic_partition(generate(spec.with_size(k)))) for k in k_list]
