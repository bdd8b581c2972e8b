"""Finite relational structures.

A structure lives on the domain ``{0..n-1}`` and carries one tuple set per
relation of its signature.  Ordered structures use relation 0 as a linear
order.  Everything here is immutable; per-structure caches (bitsets, subset
types) live in the instance ``__dict__`` and never change observable state.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import combinations, product
from typing import Iterable, Sequence

__all__ = [
    "StructureError",
    "Structure",
    "make_structure",
    "induced",
    "isomorphic",
    "canonical_code",
    "structure_from_code",
    "code_size",
    "colored_code",
    "embeds",
    "is_interval",
    "order_interval",
    "chain_relation",
    "to_json",
    "from_json",
    "to_dict",
    "from_dict",
]


class StructureError(ValueError):
    """Raised for malformed structures or incompatible operands."""


Tuple_ = tuple[int, ...]


@dataclass(frozen=True)
class Structure:
    signature: tuple[int, ...]
    n: int
    relations: tuple[tuple[Tuple_, ...], ...]
    ordered: bool = False

    def __repr__(self) -> str:
        sizes = ",".join(str(len(r)) for r in self.relations)
        kind = "ordered " if self.ordered else ""
        return f"<{kind}Structure sig={self.signature} n={self.n} tuples=[{sizes}]>"

    @cached_property
    def rel_sets(self) -> tuple[frozenset, ...]:
        return tuple(frozenset(r) for r in self.relations)

    @cached_property
    def binary(self) -> bool:
        return all(a == 2 for a in self.signature)

    @cached_property
    def out_bits(self) -> tuple[tuple[int, ...] | None, ...]:
        # out_bits[r][v] has bit u set iff (v, u) in relation r (binary relations only)
        res = []
        for arity, rel in zip(self.signature, self.relations):
            if arity != 2:
                res.append(None)
                continue
            bits = [0] * self.n
            for a, b in rel:
                bits[a] |= 1 << b
            res.append(tuple(bits))
        return tuple(res)

    @cached_property
    def in_bits(self) -> tuple[tuple[int, ...] | None, ...]:
        res = []
        for arity, rel in zip(self.signature, self.relations):
            if arity != 2:
                res.append(None)
                continue
            bits = [0] * self.n
            for a, b in rel:
                bits[b] |= 1 << a
            res.append(tuple(bits))
        return tuple(res)

    @cached_property
    def order(self) -> tuple[int, ...]:
        """Vertices listed increasingly in the linear order (ordered structures only)."""
        if not self.ordered:
            raise StructureError("structure is not ordered")
        below = [0] * self.n
        for a, b in self.relations[0]:
            if a != b:
                below[b] += 1
        return tuple(sorted(range(self.n), key=below.__getitem__))

    @cached_property
    def rank(self) -> tuple[int, ...]:
        r = [0] * self.n
        for i, v in enumerate(self.order):
            r[v] = i
        return tuple(r)

    @cached_property
    def type_cache(self) -> dict:
        # subset bitmask -> isomorphism-type key; filled lazily by subset_type
        return {}


def chain_relation(n: int) -> tuple[Tuple_, ...]:
    """The natural reflexive linear order on ``{0..n-1}`` as sorted pairs."""
    return tuple((i, j) for i in range(n) for j in range(i, n))


def _check_linear_order(n: int, pairs: frozenset) -> None:
    for i in range(n):
        if (i, i) not in pairs:
            raise StructureError(f"order relation is not reflexive at {i}")
    for a, b in pairs:
        if a != b and (b, a) in pairs:
            raise StructureError(f"order relation is not antisymmetric on ({a}, {b})")
    for a, b in combinations(range(n), 2):
        if (a, b) not in pairs and (b, a) not in pairs:
            raise StructureError(f"order relation is not total on ({a}, {b})")
    # total + antisymmetric: transitivity holds iff the predecessor counts are 0..n-1
    below = sorted(sum(1 for x in range(n) if x != v and (x, v) in pairs) for v in range(n))
    if below != list(range(n)):
        raise StructureError("order relation is not transitive")


def make_structure(
    signature: Sequence[int],
    n: int,
    relations: Sequence[Iterable[Sequence[int]]],
    ordered: bool = False,
    *,
    validate: bool = True,
) -> Structure:
    """Build a structure in canonical storage (sorted, duplicate-free tuples).

    With ``validate`` the arities, vertex ranges and (for ordered structures)
    the linear-order axioms of relation 0 are checked.
    """
    sig = tuple(int(a) for a in signature)
    rels = tuple(tuple(sorted({tuple(int(x) for x in t) for t in rel})) for rel in relations)
    if validate:
        if not sig:
            raise StructureError("signature must be nonempty")
        if any(a < 1 for a in sig):
            raise StructureError(f"arities must be >= 1, got {sig}")
        if n < 0:
            raise StructureError("domain size must be >= 0")
        if len(rels) != len(sig):
            raise StructureError(f"expected {len(sig)} relations, got {len(rels)}")
        for i, (arity, rel) in enumerate(zip(sig, rels)):
            for t in rel:
                if len(t) != arity:
                    raise StructureError(f"relation {i}: tuple {t} does not have arity {arity}")
                for x in t:
                    if not 0 <= x < n:
                        raise StructureError(f"relation {i}: vertex {x} out of range [0, {n})")
        if ordered:
            if sig[0] != 2:
                raise StructureError("ordered structures need a binary relation 0")
            _check_linear_order(n, frozenset(rels[0]))
    return Structure(sig, int(n), rels, bool(ordered))


def _check_vertices(R: Structure, vertices: Iterable[int]) -> None:
    for v in vertices:
        if not 0 <= v < R.n:
            raise StructureError(f"vertex {v} out of range [0, {R.n})")


def induced(R: Structure, A: Iterable[int]) -> Structure:
    """Induced substructure on ``A``, relabeled by the increasing enumeration of ``A``."""
    verts = sorted(set(A))
    _check_vertices(R, verts)
    pos = {v: i for i, v in enumerate(verts)}
    rels = []
    for rel in R.relations:
        rels.append([tuple(pos[x] for x in t) for t in rel if all(x in pos for x in t)])
    return make_structure(R.signature, len(verts), rels, R.ordered, validate=False)


# --- labeled encodings ------------------------------------------------------
#
# A labeling lists vertices by position.  Its encoding is a sequence of
# blocks; block j holds membership bits of every position tuple whose largest
# entry is j (lexicographic order of position tuples), relation by relation.
# Block j depends only on the first j+1 labels, which is what makes the
# prefix pruning in the canonical search sound.


@lru_cache(maxsize=None)
def _position_tuples(arity: int, j: int) -> tuple[Tuple_, ...]:
    return tuple(t for t in product(range(j + 1), repeat=arity) if max(t) == j)


@lru_cache(maxsize=None)
def _block_width(signature: tuple[int, ...], j: int) -> int:
    return sum((j + 1) ** a - j**a for a in signature)


def _block(R: Structure, labels: Sequence[int], j: int) -> int:
    bits = 0
    vj = labels[j]
    for r, arity in enumerate(R.signature):
        if arity == 2:
            out_j = R.out_bits[r][vj]
            in_j = R.in_bits[r][vj]
            for i in range(j):
                bits = (bits << 1) | ((in_j >> labels[i]) & 1)
            for i in range(j + 1):
                bits = (bits << 1) | ((out_j >> labels[i]) & 1)
        else:
            rel = R.rel_sets[r]
            for t in _position_tuples(arity, j):
                bits = (bits << 1) | (tuple(labels[i] for i in t) in rel)
    return bits


def _pack(R: Structure, tag: bytes, blocks: Sequence[int], n: int) -> bytes:
    value = 0
    width = 0
    for j, b in enumerate(blocks):
        w = _block_width(R.signature, j)
        value = (value << w) | b
        width += w
    header = tag + bytes([1 if R.ordered else 0, len(R.signature), *R.signature]) + n.to_bytes(2, "big")
    nbytes = (width + 7) // 8
    return header + value.to_bytes(nbytes, "big")


def _encode(R: Structure, labels: Sequence[int], tag: bytes = b"o") -> bytes:
    return _pack(R, tag, [_block(R, labels, j) for j in range(len(labels))], len(labels))


# --- generic canonical labeling --------------------------------------------


def _rename(keys: list) -> list[int]:
    ids = {k: i for i, k in enumerate(sorted(set(keys)))}
    return [ids[k] for k in keys]


def _vertex_colors(R: Structure, extra: Sequence | None = None) -> list[int]:
    """Isomorphism-invariant vertex colors (degree data, then color refinement on binary relations).

    ``extra`` gives optional initial vertex labels that isomorphisms must preserve.
    """
    n = R.n
    init = []
    for v in range(n):
        key = [] if extra is None else [extra[v]]
        for r, arity in enumerate(R.signature):
            if arity == 2:
                key.append(
                    (
                        (R.out_bits[r][v] >> v) & 1,
                        R.out_bits[r][v].bit_count(),
                        R.in_bits[r][v].bit_count(),
                    )
                )
            else:
                counts = [0] * (arity + 1)
                for t in R.relations[r]:
                    for p, x in enumerate(t):
                        if x == v:
                            counts[p] += 1
                    if all(x == v for x in t):
                        counts[arity] += 1
                key.append(tuple(counts))
        init.append(tuple(key))
    colors = _rename(init)
    binrels = [r for r, a in enumerate(R.signature) if a == 2]
    if not binrels:
        return colors
    ncls = len(set(colors))
    while True:
        sigs = []
        for v in range(n):
            nb = []
            for u in range(n):
                if u == v:
                    continue
                pattern = tuple(
                    ((R.out_bits[r][v] >> u) & 1, (R.in_bits[r][v] >> u) & 1) for r in binrels
                )
                nb.append((colors[u], pattern))
            nb.sort()
            sigs.append((colors[v], tuple(nb)))
        new = _rename(sigs)
        new_ncls = len(set(new))
        if new_ncls == ncls:
            return new
        colors, ncls = new, new_ncls


def _swap_is_automorphism(R: Structure, u: int, v: int) -> bool:
    for r, arity in enumerate(R.signature):
        if arity == 2:
            o, i = R.out_bits[r], R.in_bits[r]
            mask = ~((1 << u) | (1 << v))
            if ((o[u] >> u) & 1) != ((o[v] >> v) & 1):
                return False
            if ((o[u] >> v) & 1) != ((o[v] >> u) & 1):
                return False
            if (o[u] & mask) != (o[v] & mask) or (i[u] & mask) != (i[v] & mask):
                return False
        else:
            rel = R.rel_sets[r]
            swap = {u: v, v: u}
            for t in rel:
                if tuple(swap.get(x, x) for x in t) not in rel:
                    return False
    return True


def _twin_classes(R: Structure, colors: list[int]) -> list[int]:
    cls = list(range(R.n))
    for v in range(R.n):
        for u in range(v):
            if cls[u] == u and colors[u] == colors[v] and _swap_is_automorphism(R, u, v):
                cls[v] = u
                break
    return cls


def _same_orbit(v: int, others: list[int], gens: list[tuple[int, ...]], n: int) -> bool:
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for g in gens:
        for x in range(n):
            a, b = find(x), find(g[x])
            if a != b:
                parent[max(a, b)] = min(a, b)
    root = find(v)
    return any(find(u) == root for u in others)


def _canonical_labeling(R: Structure, extra: Sequence | None = None) -> tuple[list[int], list[int]]:
    """Minimize the block encoding over all labelings that list vertices by nondecreasing color.

    Colors are isomorphism invariant, so the minimum is a complete invariant.
    Branches are cut when their prefix already exceeds the best encoding, and
    sibling candidates are skipped when a known automorphism fixing the
    current prefix maps one onto another.
    """
    n = R.n
    if n == 0:
        return [], []
    colors = _vertex_colors(R, extra)
    twins = _twin_classes(R, colors)
    best_blocks: list[int] | None = None
    best_labels: list[int] | None = None
    autos: list[tuple[int, ...]] = []
    labels: list[int] = []
    blocks: list[int] = []
    used = [False] * n

    def record_automorphism():
        # labels and best_labels have identical encodings: best -> current is an automorphism
        g = [0] * n
        for a, b in zip(best_labels, labels):
            g[a] = b
        g = tuple(g)
        if any(g[i] != i for i in range(n)):
            autos.append(g)

    def rec(j: int) -> None:
        nonlocal best_blocks, best_labels
        if j == n:
            if best_blocks is None or blocks < best_blocks:
                best_blocks = list(blocks)
                best_labels = list(labels)
            elif blocks == best_blocks:
                record_automorphism()
            return
        cmin = min(colors[v] for v in range(n) if not used[v])
        cands = [v for v in range(n) if not used[v] and colors[v] == cmin]
        seen_twins = set()
        explored: list[int] = []
        for v in cands:
            if twins[v] in seen_twins:
                continue
            if explored and autos:
                fixing = [g for g in autos if all(g[x] == x for x in labels)]
                if fixing and _same_orbit(v, explored, fixing, n):
                    continue
            seen_twins.add(twins[v])
            labels.append(v)
            used[v] = True
            blocks.append(_block(R, labels, j))
            if best_blocks is None or blocks <= best_blocks[: j + 1]:
                rec(j + 1)
            blocks.pop()
            used[v] = False
            labels.pop()
            explored.append(v)

    rec(0)
    return best_labels, best_blocks


def canonical_code(R: Structure, method: str = "auto") -> bytes:
    """Isomorphism-complete code of ``R``.

    ``method="ordered"`` (the default for ordered structures) encodes the
    unique order-preserving labeling; ``method="generic"`` minimizes over
    labelings.  Codes are only comparable within one method.
    """
    if method == "auto":
        method = "ordered" if R.ordered else "generic"
    if method == "ordered":
        return _encode(R, R.order, b"o")
    if method == "generic":
        _, blocks = _canonical_labeling(R)
        return _pack(R, b"g", blocks, R.n)
    raise ValueError(f"unknown method {method!r}")


def colored_code(R: Structure, colors: Sequence) -> bytes:
    """Generic canonical code of ``R`` with vertex colors that isomorphisms must preserve.

    Colors must be mutually comparable and have a stable ``repr``.
    """
    labels, blocks = _canonical_labeling(R, colors)
    tail = repr(tuple(colors[v] for v in labels)).encode()
    return _pack(R, b"c", blocks, R.n) + b"|" + tail


def code_size(code: bytes) -> int:
    """Domain size recorded in a code."""
    k = code[2]
    return int.from_bytes(code[3 + k : 5 + k], "big")


def structure_from_code(code: bytes) -> Structure:
    """Rebuild a structure (in the code's labeling) from a canonical code."""
    ordered = bool(code[1])
    k = code[2]
    sig = tuple(code[3 : 3 + k])
    n = int.from_bytes(code[3 + k : 5 + k], "big")
    payload = code[5 + k :]
    width = sum(_block_width(sig, j) for j in range(n))
    value = int.from_bytes(payload, "big") if payload else 0
    bits = [(value >> (width - 1 - i)) & 1 for i in range(width)]
    rels: list[list[Tuple_]] = [[] for _ in sig]
    pos = 0
    for j in range(n):
        for r, arity in enumerate(sig):
            if arity == 2:
                order = [(i, j) for i in range(j)] + [(j, i) for i in range(j + 1)]
            else:
                order = _position_tuples(arity, j)
            for t in order:
                if bits[pos]:
                    rels[r].append(t)
                pos += 1
    return make_structure(sig, n, rels, ordered)


def _check_same_signature(R: Structure, S: Structure) -> None:
    if R.signature != S.signature:
        raise StructureError(f"signature mismatch: {R.signature} vs {S.signature}")


def isomorphic(R: Structure, S: Structure) -> bool:
    _check_same_signature(R, S)
    if R.n != S.n:
        return False
    if R.ordered and S.ordered:
        # only the order-preserving bijection can work
        return _encode(R, R.order) == _encode(S, S.order)
    if any(len(a) != len(b) for a, b in zip(R.relations, S.relations)):
        return False
    return canonical_code(R, "generic") == canonical_code(S, "generic")


def embeds(P: Structure, R: Structure) -> bool:
    """Whether ``P`` is isomorphic to an induced substructure of ``R``.

    Backtracking over injections position by position; for two ordered
    structures only increasing injections are tried.
    """
    _check_same_signature(P, R)
    m = P.n
    if m > R.n:
        return False
    if m == 0:
        return True
    both_ordered = P.ordered and R.ordered
    p_labels = list(P.order) if both_ordered else list(range(m))
    target = [_block(P, p_labels, j) for j in range(m)]
    r_order = list(R.order) if both_ordered else list(range(R.n))
    labels: list[int] = []
    used = [False] * R.n

    def rec(j: int, start: int) -> bool:
        if j == m:
            return True
        for idx in range(start, R.n):
            if both_ordered and R.n - idx < m - j:
                break
            v = r_order[idx]
            if used[v]:
                continue
            labels.append(v)
            if _block(R, labels, j) == target[j]:
                used[v] = True
                ok = rec(j + 1, idx + 1 if both_ordered else 0)
                used[v] = False
                if ok:
                    labels.pop()
                    return True
            labels.pop()
        return False

    return rec(0, 0)


def is_interval(R: Structure, S: Iterable[int]) -> bool:
    """Fraïssé interval test.

    Every tuple that has at least one entry outside ``S`` and whose entries
    inside ``S`` all equal one element keeps its membership when that element
    is replaced by any other element of ``S``.  For binary relations this is:
    for all z outside S and x, y in S, (z,x)~(z,y) and (x,z)~(y,z).
    """
    Sset = set(S)
    _check_vertices(R, Sset)
    if len(Sset) <= 1:
        return True
    mask = 0
    for v in Sset:
        mask |= 1 << v
    members = sorted(Sset)
    first = members[0]
    for r, arity in enumerate(R.signature):
        if arity == 2:
            o, i = R.out_bits[r], R.in_bits[r]
            ref_o, ref_i = o[first] & ~mask, i[first] & ~mask
            for v in members[1:]:
                if (o[v] & ~mask) != ref_o or (i[v] & ~mask) != ref_i:
                    return False
        elif arity > 2:
            rel = R.rel_sets[r]
            outside = [v for v in range(R.n) if v not in Sset]
            for positions in range(1, (1 << arity) - 1):
                inside_pos = [p for p in range(arity) if (positions >> p) & 1]
                out_pos = [p for p in range(arity) if not (positions >> p) & 1]
                for fill in product(outside, repeat=len(out_pos)):
                    vals = set()
                    for x in members:
                        t = [0] * arity
                        for p in inside_pos:
                            t[p] = x
                        for p, z in zip(out_pos, fill):
                            t[p] = z
                        vals.add(tuple(t) in rel)
                    if len(vals) > 1:
                        return False
    return True


def order_interval(R: Structure, x: int, y: int) -> frozenset[int]:
    """Elements strictly between ``x`` and ``y`` in the linear order."""
    if not R.ordered:
        raise StructureError("order_interval needs an ordered structure")
    _check_vertices(R, (x, y))
    lo, hi = sorted((R.rank[x], R.rank[y]))
    return frozenset(R.order[lo + 1 : hi])


# --- text format -----------------------------------------------------------


def to_dict(R: Structure) -> dict:
    return {
        "signature": list(R.signature),
        "n": R.n,
        "ordered": R.ordered,
        "relations": [[list(t) for t in rel] for rel in R.relations],
    }


def from_dict(d: dict) -> Structure:
    unknown = set(d) - {"signature", "n", "ordered", "relations"}
    if unknown:
        raise StructureError(f"unknown keys: {sorted(unknown)}")
    return make_structure(d["signature"], d["n"], d["relations"], d.get("ordered", False))


def to_json(R: Structure) -> str:
    return json.dumps(to_dict(R), separators=(",", ":"))


def from_json(text: str) -> Structure:
    return from_dict(json.loads(text))
