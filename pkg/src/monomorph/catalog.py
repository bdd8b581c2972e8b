"""Finite prefixes of the two-layer graphs and ordered families, plus random test structures."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .core import Structure, StructureError, chain_relation, make_structure

__all__ = [
    "CatalogSpec",
    "FAMILIES",
    "generate",
    "random_structure",
    "random_blowup",
    "complement_graph",
    "layer_prefix",
]

# (cross rule, A-layer clique, B-layer clique) for the ten two-layer graphs
_G_RULES = {
    "G1": ("eq", False, False),
    "G2": ("le", False, False),
    "G3": ("ne", False, False),
    "G4": ("eq", True, False),
    "G5": ("le", True, False),
    "G6": ("le", False, True),
    "G7": ("ne", True, False),
    "G8": ("eq", True, True),
    "G9": ("le", True, True),
    "G10": ("ne", True, True),
}

_ALIASES = {"matching": "G1", "half_graph": "G2"}

_CROSS = {
    "eq": lambda n, m: n == m,
    "le": lambda n, m: n <= m,
    "ne": lambda n, m: n != m,
}

FAMILIES = (
    *_G_RULES,
    *_ALIASES,
    "chain",
    "chain2",
    "interval_chain",
    "ordered_two_layer",
)

_LAYER_RULES = ("empty", "full")
_DIRECTIONS = ("both", "ab", "ba")
_APEX = ("none", "a", "b", "both")


@dataclass(frozen=True)
class CatalogSpec:
    """A named generator with its prefix parameter.

    ``size`` counts indices per layer for two-layer families and vertices for
    chains.  Options left as ``None`` take the family default; options that do
    not apply to the family are rejected by :func:`generate`.
    """

    family: str
    size: int
    reflexive: bool = False
    base_rule: str | None = None
    layers: tuple[str, str] | None = None
    direction: str | None = None
    interleave: str | None = None
    apex: str | None = None
    reverse: bool = False
    parts: int | None = None

    def with_size(self, size: int) -> "CatalogSpec":
        return CatalogSpec(
            self.family,
            size,
            self.reflexive,
            self.base_rule,
            self.layers,
            self.direction,
            self.interleave,
            self.apex,
            self.reverse,
            self.parts,
        )


def _reject(spec: CatalogSpec, *names: str) -> None:
    for name in names:
        value = getattr(spec, name)
        if value not in (None, False):
            raise ValueError(f"option {name}={value!r} does not apply to family {spec.family}")


def _two_layer_graph(spec: CatalogSpec, family: str) -> Structure:
    _reject(spec, "base_rule", "layers", "direction", "interleave", "apex", "reverse", "parts")
    k = spec.size
    rule, a_clique, b_clique = _G_RULES[family]
    cross = _CROSS[rule]
    edges = []
    for n in range(k):
        for m in range(k):
            if cross(n, m):
                edges += [(n, m + k), (m + k, n)]
    for offset, clique in ((0, a_clique), (k, b_clique)):
        if clique:
            edges += [(n + offset, m + offset) for n in range(k) for m in range(k) if n != m]
    if spec.reflexive:
        edges += [(v, v) for v in range(2 * k)]
    return make_structure((2,), 2 * k, [edges])


def _interval_sizes(total: int, parts: int) -> list[int]:
    return [total // parts + (1 if i < total % parts else 0) for i in range(parts)]


def _interval_chain(size: int, parts: int) -> Structure:
    # interval 0 is unmarked; interval i >= 1 carries loops in relation i
    sizes = _interval_sizes(size, parts)
    rels = [chain_relation(size)]
    start = sizes[0]
    for s in sizes[1:]:
        rels.append([(v, v) for v in range(start, start + s)])
        start += s
    return make_structure((2,) * parts, size, rels, ordered=True)


def _ordered_two_layer(spec: CatalogSpec) -> Structure:
    _reject(spec, "parts")
    k = spec.size
    rule = spec.base_rule or "eq"
    layers = spec.layers or ("empty", "empty")
    direction = spec.direction or "both"
    interleave = spec.interleave or "ab"
    apex = spec.apex or "none"
    if rule not in _CROSS:
        raise ValueError(f"unknown base rule {rule!r}; expected one of {sorted(_CROSS)}")
    if len(layers) != 2 or any(l not in _LAYER_RULES for l in layers):
        raise ValueError(f"layers must be two of {_LAYER_RULES}, got {layers!r}")
    if direction not in _DIRECTIONS:
        raise ValueError(f"direction must be one of {_DIRECTIONS}")
    if interleave not in ("ab", "ba"):
        raise ValueError("interleave must be 'ab' or 'ba'")
    if apex not in _APEX:
        raise ValueError(f"apex must be one of {_APEX}")

    shift = 0 if apex == "none" else 1
    first = 0 if interleave == "ab" else 1

    def vertex(n: int, layer: int) -> int:
        return shift + 2 * n + (layer if first == 0 else 1 - layer)

    size = 2 * k + shift
    cross = _CROSS[rule]
    arcs = []
    for n in range(k):
        for m in range(k):
            if cross(n, m):
                a, b = vertex(n, 0), vertex(m, 1)
                if direction in ("both", "ab"):
                    arcs.append((a, b))
                if direction in ("both", "ba"):
                    arcs.append((b, a))
    for layer, rule_name in enumerate(layers):
        if rule_name == "full":
            arcs += [(vertex(n, layer), vertex(m, layer)) for n in range(k) for m in range(k) if n != m]
    if shift:
        targets = {"a": (0,), "b": (1,), "both": (0, 1)}[apex]
        for layer in targets:
            for n in range(k):
                arcs += [(0, vertex(n, layer)), (vertex(n, layer), 0)]
    if spec.reflexive:
        arcs += [(v, v) for v in range(size)]
    if spec.reverse:
        order = [(b, a) for a, b in chain_relation(size)]
    else:
        order = chain_relation(size)
    return make_structure((2, 2), size, [order, arcs], ordered=True)


def generate(spec: CatalogSpec) -> Structure:
    """Finite prefix of the family named by ``spec``.

    Two-layer graphs use the relabeling (n, i) -> n + k*i; ordered two-layer
    digraphs use the interleaving (n, i) -> 2n + i so the order is the natural
    one (a prefix of omega), or its reverse with ``reverse=True``.
    """
    if spec.size < 0:
        raise ValueError("size must be >= 0")
    family = _ALIASES.get(spec.family, spec.family)
    if family in _G_RULES:
        return _two_layer_graph(spec, family)
    if family == "chain":
        _reject(spec, "reflexive", "base_rule", "layers", "direction", "interleave", "apex", "reverse", "parts")
        return make_structure((2,), spec.size, [chain_relation(spec.size)], ordered=True)
    if family == "chain2":
        _reject(spec, "reflexive", "base_rule", "layers", "direction", "interleave", "apex", "reverse", "parts")
        return _interval_chain(spec.size, 2)
    if family == "interval_chain":
        _reject(spec, "reflexive", "base_rule", "layers", "direction", "interleave", "apex", "reverse")
        parts = spec.parts if spec.parts is not None else 2
        if parts < 1:
            raise ValueError("parts must be >= 1")
        return _interval_chain(spec.size, parts)
    if family == "ordered_two_layer":
        return _ordered_two_layer(spec)
    raise ValueError(f"unknown family {spec.family!r}; known: {', '.join(FAMILIES)}")


def layer_prefix(spec: CatalogSpec) -> list[int]:
    """Vertices of ``generate(spec)`` that form the layered prefix of size ``spec.size - 1``.

    Inducing on them reproduces ``generate(spec.with_size(spec.size - 1))``.
    """
    k = spec.size
    family = _ALIASES.get(spec.family, spec.family)
    if family in _G_RULES:
        return list(range(k - 1)) + list(range(k, 2 * k - 1))
    if family == "ordered_two_layer":
        shift = 0 if (spec.apex or "none") == "none" else 1
        return list(range(2 * (k - 1) + shift))
    raise ValueError(f"{spec.family} is not a two-layer family")


def complement_graph(R: Structure) -> Structure:
    """Complement of an irreflexive symmetric graph (loops are left out)."""
    if R.signature != (2,) or R.ordered:
        raise StructureError("complement_graph expects an unordered graph")
    rel = R.rel_sets[0]
    edges = [(a, b) for a in range(R.n) for b in range(R.n) if a != b and (a, b) not in rel]
    return make_structure((2,), R.n, [edges])


def random_structure(
    signature,
    n: int,
    density: float,
    ordered: bool = False,
    seed: int = 0,
    *,
    symmetric: bool = False,
    loops: bool = True,
) -> Structure:
    """Seeded random structure; each candidate tuple is kept with probability ``density``.

    ``symmetric`` and ``loops`` only affect binary relations.  With ``ordered``
    relation 0 is the natural order on ``{0..n-1}``.
    """
    if not 0.0 <= density <= 1.0:
        raise ValueError("density must lie in [0, 1]")
    sig = tuple(signature)
    rng = np.random.default_rng(seed)
    rels = []
    for r, arity in enumerate(sig):
        if ordered and r == 0:
            rels.append(chain_relation(n))
            continue
        if arity == 2 and symmetric:
            pairs = [(a, b) for a in range(n) for b in range(a, n) if loops or a != b]
            keep = rng.random(len(pairs)) < density
            rel = []
            for (a, b), k in zip(pairs, keep):
                if k:
                    rel += [(a, b), (b, a)]
            rels.append(rel)
            continue
        cands = [t for t in product(range(n), repeat=arity) if loops or arity != 2 or t[0] != t[1]]
        keep = rng.random(len(cands)) < density
        rels.append([t for t, k in zip(cands, keep) if k])
    return make_structure(sig, n, rels, ordered)


def random_blowup(
    signature,
    base_n: int,
    max_block: int,
    ordered: bool = False,
    seed: int = 0,
    *,
    density: float = 0.5,
    symmetric: bool = False,
) -> Structure:
    """Random structure with planted interval modules.

    A random binary base structure on ``base_n`` points has each point
    replaced by a block of 1..``max_block`` vertices.  Between blocks the base
    relations are copied; inside a block every relation is uniform (loops,
    arcs forward in the order and arcs backward each decided once), so blocks
    are intervals and tend to be unions of equivalence classes.
    """
    sig = tuple(signature)
    if any(a != 2 for a in sig):
        raise ValueError("random_blowup supports binary signatures only")
    rng = np.random.default_rng(seed)
    sizes = rng.integers(1, max_block + 1, size=base_n)
    block_of = [b for b, s in enumerate(sizes) for _ in range(int(s))]
    n = len(block_of)
    base = random_structure(sig, base_n, density, ordered, int(rng.integers(1 << 30)), symmetric=symmetric)
    rels = []
    for r in range(len(sig)):
        if ordered and r == 0:
            rels.append(chain_relation(n))
            continue
        base_rel = base.rel_sets[r]
        inner = rng.random((base_n, 3)) < density
        if symmetric:
            inner[:, 2] = inner[:, 1]
        rel = []
        for x in range(n):
            for y in range(n):
                bx, by = block_of[x], block_of[y]
                if bx != by:
                    keep = (bx, by) in base_rel
                elif x == y:
                    keep = bool(inner[bx, 0])
                else:
                    keep = bool(inner[bx, 1] if x < y else inner[bx, 2])
                if keep:
                    rel.append((x, y))
        rels.append(rel)
    return make_structure(sig, n, rels, ordered)
