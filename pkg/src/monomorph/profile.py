"""Ages, profiles, bounds of hereditary classes and growth classification."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from .catalog import CatalogSpec, generate
from .core import (
    Structure,
    StructureError,
    _encode,
    canonical_code,
    code_size,
    colored_code,
    embeds,
    induced,
    make_structure,
    structure_from_code,
)
from .decomposition import monomorphic_partition

__all__ = [
    "ProfileSeries",
    "GrowthVerdict",
    "QuasiPolynomialFit",
    "InsufficientDataError",
    "DegreeReport",
    "age",
    "age_levels",
    "profile_series",
    "StructureKind",
    "get_kind",
    "infer_kind",
    "KINDS",
    "all_structures",
    "forb_class",
    "forb_profile",
    "bounds_up_to",
    "fit_quasi_polynomial",
    "classify_growth",
    "infinite_component_degree_check",
]


@dataclass(frozen=True)
class ProfileSeries:
    """Exact counts phi(0), ..., phi(N)."""

    values: tuple[int, ...]

    def __post_init__(self):
        if any(v < 0 for v in self.values):
            raise ValueError("profile values must be nonnegative")
        if self.values and self.values[0] > 1:
            raise ValueError("phi(0) counts the empty structure, so it is 0 or 1")

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, n):
        return self.values[n]

    def __iter__(self):
        return iter(self.values)

    @property
    def n_max(self) -> int:
        return len(self.values) - 1

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "phi"])
        for n, v in enumerate(self.values):
            w.writerow([n, v])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "ProfileSeries":
        rows = list(csv.DictReader(io.StringIO(text)))
        if not rows or not {"n", "phi"} <= set(rows[0]):
            raise ValueError("CSV needs the header n,phi")
        pairs = sorted((int(r["n"]), int(r["phi"])) for r in rows)
        if [n for n, _ in pairs] != list(range(len(pairs))):
            raise ValueError("CSV rows must cover n = 0..N without gaps")
        return cls(tuple(v for _, v in pairs))


# --- ages -------------------------------------------------------------------


def _ordered_age_levels(R: Structure, n_max: int) -> list[set[bytes]]:
    """Levelwise enumeration of increasing subsets with state merging.

    Two partial subsets with the same last element, the same ordered type and
    the same relations to every later element have identical sets of
    completion types, so only one representative is kept.
    """
    order = R.order
    rank = R.rank
    N = R.n
    binary = R.binary
    later_mask = [0] * (N + 1)
    for p in range(N - 1, -1, -1):
        later_mask[p] = later_mask[p + 1] | (1 << order[p])

    def cross_key(A: tuple[int, ...], last: int):
        fut = later_mask[last + 1]
        if binary:
            return tuple(
                (R.out_bits[r][v] & fut, R.in_bits[r][v] & fut)
                for v in A
                for r in range(1, len(R.signature))
            )
        pos = {v: i for i, v in enumerate(A)}
        keys = []
        for r, rel in enumerate(R.relations):
            for t in rel:
                if any(e in pos for e in t) and any((fut >> e) & 1 and e not in pos for e in t):
                    if all(e in pos or (fut >> e) & 1 for e in t):
                        keys.append((r, tuple(("a", pos[e]) if e in pos else ("f", e) for e in t)))
        return frozenset(keys)

    levels = [{_encode(R, ())}]
    states: dict = {(-1, b""): ()}
    for n in range(1, n_max + 1):
        nxt: dict = {}
        codes: set[bytes] = set()
        for A in states.values():
            start = rank[A[-1]] + 1 if A else 0
            for p in range(start, N):
                B = A + (order[p],)
                code = _encode(R, B)
                codes.add(code)
                key = (p, code, cross_key(B, p))
                if key not in nxt:
                    nxt[key] = B
        levels.append(codes)
        states = nxt
    return levels


def _low_cutwidth_order(R: Structure) -> list[int]:
    import numpy as np
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import reverse_cuthill_mckee

    rows, cols = [], []
    for arity, rel in zip(R.signature, R.relations):
        if arity == 2:
            for a, b in rel:
                if a != b:
                    rows += [a, b]
                    cols += [b, a]
    m = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(R.n, R.n))
    return [int(v) for v in reverse_cuthill_mckee(m, symmetric_mode=True)]


def _merged_age_levels(R: Structure, n_max: int) -> list[set[bytes]]:
    """Unordered counterpart of the ordered state merging (binary signatures).

    Subsets are grown along a low-cutwidth vertex order.  Two partial subsets
    with the same last position are merged when they are isomorphic by a map
    that also preserves each vertex's relations to the not-yet-visited
    vertices, which makes their completions pairwise isomorphic.
    """
    order = _low_cutwidth_order(R)
    pos = {v: i for i, v in enumerate(order)}
    N = R.n
    rels = range(len(R.signature))
    later_mask = [0] * (N + 1)
    for p in range(N - 1, -1, -1):
        later_mask[p] = later_mask[p + 1] | (1 << order[p])
    levels = [{canonical_code(induced(R, ()), "generic")}]
    states: dict = {None: ()}
    for _ in range(n_max):
        nxt: dict = {}
        codes: set[bytes] = set()
        for A in states.values():
            start = pos[A[-1]] + 1 if A else 0
            for p in range(start, N):
                B = A + (order[p],)
                fut = later_mask[p + 1]
                verts = sorted(B)
                sub = induced(R, verts)
                cols = tuple(
                    tuple((R.out_bits[r][v] & fut, R.in_bits[r][v] & fut) for r in rels) for v in verts
                )
                key = (p, colored_code(sub, cols))
                if key in nxt:
                    continue
                nxt[key] = B
                codes.add(canonical_code(sub, "generic"))
        levels.append(codes)
        states = nxt
    return levels


def _generic_age_levels(R: Structure, n_max: int) -> list[set[bytes]]:
    return [
        {canonical_code(induced(R, A), "generic") for A in combinations(range(R.n), n)}
        for n in range(n_max + 1)
    ]


def age_levels(R: Structure, n_max: int, *, method: str = "auto") -> list[set[bytes]]:
    """Codes of the n-element members of the age of ``R`` for n = 0..n_max.

    ``method="ordered"`` (default for ordered structures) uses the forced
    labeling and state merging; ``method="merged"`` (default for other
    binary structures) merges partial subsets by a colored canonical form;
    ``method="generic"`` canonicalizes every n-subset separately.
    """
    if not 0 <= n_max <= R.n:
        raise ValueError(f"n_max={n_max} out of range [0, {R.n}]")
    if method == "auto":
        method = "ordered" if R.ordered else ("merged" if R.binary else "generic")
    if method == "ordered":
        if not R.ordered:
            raise StructureError("the ordered method needs an ordered structure")
        return _ordered_age_levels(R, n_max)
    if method == "merged":
        if not R.binary:
            raise StructureError("the merged method needs a binary signature")
        return _merged_age_levels(R, n_max)
    if method == "generic":
        return _generic_age_levels(R, n_max)
    raise ValueError(f"unknown method {method!r}")


def age(R: Structure, n: int, *, method: str = "auto") -> frozenset[bytes]:
    """Codes of the isomorphism types of n-element induced substructures of ``R``."""
    if not 0 <= n <= R.n:
        raise ValueError(f"n={n} out of range [0, {R.n}]")
    if method == "generic":
        return frozenset(canonical_code(induced(R, A), "generic") for A in combinations(range(R.n), n))
    return frozenset(age_levels(R, n, method=method)[n])


def profile_series(R: Structure, n_max: int, *, method: str = "auto") -> ProfileSeries:
    return ProfileSeries(tuple(len(level) for level in age_levels(R, n_max, method=method)))


# --- structure kinds and hereditary classes ---------------------------------


@dataclass(frozen=True)
class StructureKind:
    """A hereditary universe of finite structures that can be grown one vertex at a time."""

    name: str
    signature: tuple[int, ...]
    ordered: bool

    def empty(self) -> Structure:
        rels = [[] for _ in self.signature]
        return make_structure(self.signature, 0, rels, self.ordered)

    def code(self, S: Structure) -> bytes:
        return canonical_code(S, "ordered" if self.ordered else "generic")

    def extensions(self, S: Structure):
        """All one-vertex extensions of ``S`` inside the universe (labeled, with repetitions)."""
        n = S.n
        name = self.name
        if self.ordered:
            # relabel so the order is natural, then insert the new vertex at every position
            base = induced_natural(S)
            for p in range(n + 1):
                shift = lambda v: v + 1 if v >= p else v
                rels = [[(shift(a), shift(b)) for a, b in rel] for rel in base.relations[1:]]
                if name == "ordered_loops":
                    for marks in range(1 << (len(self.signature) - 1)):
                        new = [list(r) for r in rels]
                        for r in range(len(new)):
                            if (marks >> r) & 1:
                                new[r].append((p, p))
                        yield _natural(self.signature, n + 1, new)
                elif name == "ordered_graph":
                    for nb in range(1 << n):
                        new = list(rels[0])
                        for i in range(n):
                            if (nb >> i) & 1:
                                u = shift(i)
                                new += [(p, u), (u, p)]
                        yield _natural(self.signature, n + 1, [new])
                elif name == "ordered_digraph":
                    for nb in range(1 << (2 * n)):
                        new = list(rels[0])
                        for i in range(n):
                            u = shift(i)
                            if (nb >> (2 * i)) & 1:
                                new.append((p, u))
                            if (nb >> (2 * i + 1)) & 1:
                                new.append((u, p))
                        yield _natural(self.signature, n + 1, [new])
            return
        rel = list(S.relations[0])
        if name == "graph":
            for nb in range(1 << n):
                new = rel + [e for i in range(n) if (nb >> i) & 1 for e in ((n, i), (i, n))]
                yield make_structure(self.signature, n + 1, [new], validate=False)
        elif name == "tournament":
            for nb in range(1 << n):
                new = rel + [(n, i) if (nb >> i) & 1 else (i, n) for i in range(n)]
                yield make_structure(self.signature, n + 1, [new], validate=False)
        elif name in ("digraph", "binary"):
            loop_opts = (False, True) if name == "binary" else (False,)
            for loop in loop_opts:
                for nb in range(1 << (2 * n)):
                    new = list(rel)
                    for i in range(n):
                        if (nb >> (2 * i)) & 1:
                            new.append((n, i))
                        if (nb >> (2 * i + 1)) & 1:
                            new.append((i, n))
                    if loop:
                        new.append((n, n))
                    yield make_structure(self.signature, n + 1, [new], validate=False)


def _natural(signature, n, rels) -> Structure:
    from .core import chain_relation

    return make_structure(signature, n, [chain_relation(n), *rels], True, validate=False)


def induced_natural(S: Structure) -> Structure:
    """Relabel an ordered structure so that its order is the natural one."""
    pos = S.rank
    rels = [[tuple(pos[x] for x in t) for t in rel] for rel in S.relations]
    return make_structure(S.signature, S.n, rels, True, validate=False)


KINDS = ("graph", "digraph", "binary", "tournament", "ordered_graph", "ordered_digraph", "ordered_loops")


def get_kind(name: str, signature: Sequence[int] | None = None) -> StructureKind:
    """Universe named ``name``; ``ordered_loops`` takes its number of marks from ``signature``."""
    fixed = {
        "graph": ((2,), False),
        "digraph": ((2,), False),
        "binary": ((2,), False),
        "tournament": ((2,), False),
        "ordered_graph": ((2, 2), True),
        "ordered_digraph": ((2, 2), True),
    }
    if name in fixed:
        sig, ordered = fixed[name]
        if signature is not None and tuple(signature) != sig:
            raise StructureError(f"kind {name} has signature {sig}, got {tuple(signature)}")
        return StructureKind(name, sig, ordered)
    if name == "ordered_loops":
        sig = tuple(signature) if signature is not None else (2, 2)
        if any(a != 2 for a in sig):
            raise StructureError("ordered_loops uses binary loop relations")
        return StructureKind(name, sig, True)
    raise ValueError(f"unknown kind {name!r}; expected one of {KINDS}")


def infer_kind(R: Structure) -> StructureKind:
    """Smallest universe above that contains ``R``: the one its bounds are computed in."""
    sig = R.signature
    if any(a != 2 for a in sig):
        raise StructureError("universes cover binary signatures only")
    rels = R.rel_sets
    if R.ordered:
        others = rels[1:]
        if all(a == b for rel in others for a, b in rel):
            return get_kind("ordered_loops", sig)
        if len(sig) != 2:
            raise StructureError("ordered universes have one relation besides the order, or only loops")
        rel = others[0]
        if any(a == b for a, b in rel):
            raise StructureError("no ordered universe with loops and arcs together")
        if all((b, a) in rel for a, b in rel):
            return get_kind("ordered_graph")
        return get_kind("ordered_digraph")
    if len(sig) != 1:
        raise StructureError("unordered universes have a single binary relation")
    rel = rels[0]
    if any(a == b for a, b in rel):
        return get_kind("binary")
    if all((b, a) in rel for a, b in rel):
        return get_kind("graph")
    return get_kind("digraph")


def all_structures(kind: StructureKind, n: int) -> set[bytes]:
    """Codes of all n-element members of the universe up to isomorphism."""
    level = {kind.code(kind.empty()): kind.empty()}
    for _ in range(n):
        nxt = {}
        for S in level.values():
            for T in kind.extensions(S):
                nxt.setdefault(kind.code(T), T)
        level = nxt
    return set(level)


def forb_class(bounds: Iterable[Structure], kind: StructureKind, n_max: int) -> list[set[bytes]]:
    """Codes per size 0..n_max of the members of ``kind`` embedding no bound."""
    bounds = list(bounds)
    sigs = {b.signature for b in bounds}
    if len(sigs) > 1:
        raise StructureError(f"bounds have mixed signatures: {sorted(sigs)}")
    if sigs and sigs != {kind.signature}:
        raise StructureError(f"bounds signature {sigs.pop()} does not match kind {kind.signature}")
    for b in bounds:
        if b.ordered != kind.ordered:
            raise StructureError("bounds and kind disagree on being ordered")
    level = {kind.code(kind.empty()): kind.empty()}
    if any(b.n == 0 for b in bounds):
        level = {}
    out = [set(level)]
    for _ in range(n_max):
        nxt = {}
        for S in level.values():
            for T in kind.extensions(S):
                c = kind.code(T)
                if c in nxt:
                    continue
                if not any(embeds(b, T) for b in bounds):
                    nxt[c] = T
        level = nxt
        out.append(set(level))
    return out


def forb_profile(bounds: Iterable[Structure], kind: str | StructureKind, n: int) -> int:
    """Number of n-element members (up to isomorphism) of ``kind`` that embed no bound."""
    bounds = list(bounds)
    if not bounds:
        raise ValueError("bounds must be nonempty")
    if isinstance(kind, str):
        kind = get_kind(kind, bounds[0].signature if kind == "ordered_loops" else None)
    return len(forb_class(bounds, kind, n)[n])


def _deletion_codes(kind: StructureKind, S: Structure) -> set[bytes]:
    return {kind.code(induced(S, [u for u in range(S.n) if u != v])) for v in range(S.n)}


def bounds_up_to(
    age_codes: Sequence[Iterable[bytes]],
    kind: str | StructureKind,
    n_max: int,
) -> frozenset[bytes]:
    """Minimal non-members of size <= n_max of the class given by ``age_codes``.

    ``age_codes[m]`` holds the codes of the m-element members.  A bound of
    size m has all its one-point deletions in the class, so candidates are the
    one-vertex extensions of members of size m-1.
    """
    levels = [set(age_codes[m]) for m in range(n_max + 1)]
    if isinstance(kind, str):
        sig = None
        for lv in levels:
            if lv:
                sig = structure_from_code(next(iter(lv))).signature
                break
        kind = get_kind(kind, sig)
    members = [{c: structure_from_code(c) for c in lv} for lv in levels]
    for m in range(1, n_max + 1):
        for c, S in members[m].items():
            if code_size(c) != m:
                raise ValueError(f"code of size {code_size(c)} listed at size {m}")
            if not _deletion_codes(kind, S) <= levels[m - 1]:
                raise ValueError(f"class is not hereditary: a member of size {m} has a deletion outside the class")
    found: set[bytes] = set()
    for m in range(0, n_max + 1):
        if m == 0:
            if not levels[0]:
                found.add(kind.code(kind.empty()))
            continue
        seen: set[bytes] = set()
        for S in members[m - 1].values():
            for T in kind.extensions(S):
                c = kind.code(T)
                if c in seen or c in levels[m]:
                    continue
                seen.add(c)
                if _deletion_codes(kind, T) <= levels[m - 1]:
                    found.add(c)
    return frozenset(found)


# --- quasi-polynomials and growth -------------------------------------------


class InsufficientDataError(ValueError):
    pass


def _solve_exact(matrix: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    n = len(matrix)
    a = [row[:] + [b] for row, b in zip(matrix, rhs)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular system")
        a[col], a[piv] = a[piv], a[col]
        pv = a[col][col]
        a[col] = [x / pv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [a[r][n] for r in range(n)]


@dataclass(frozen=True)
class QuasiPolynomialFit:
    """Periodic coefficients: ``coefficients[r][j]`` is a_j(n) for n = r (mod period)."""

    degree: int
    period: int
    tail_start: int
    coefficients: tuple[tuple[Fraction, ...], ...]
    residual: Fraction
    checked: int

    @property
    def exact(self) -> bool:
        return self.residual == 0

    def __call__(self, n: int) -> Fraction:
        return sum(c * Fraction(n) ** j for j, c in enumerate(self.coefficients[n % self.period]))


def fit_quasi_polynomial(
    series: Sequence[int] | ProfileSeries,
    degree: int,
    period: int,
    tail_start: int | None = None,
) -> QuasiPolynomialFit:
    """Exact fit of phi(n) = sum_j a_j(n) n^j, each a_j of the given period, on the tail n >= tail_start.

    Each residue class is interpolated on its first ``degree + 1`` tail points
    and checked on the rest; every class needs at least one check point.
    ``residual`` is the largest absolute deviation on the check points.
    """
    values = list(series)
    N = len(values) - 1
    t = N // 2 if tail_start is None else tail_start
    if degree < 0 or period < 1:
        raise ValueError("degree must be >= 0 and period >= 1")
    coeffs = []
    residual = Fraction(0)
    checked = 0
    for r in range(period):
        pts = [n for n in range(t, N + 1) if n % period == r]
        if len(pts) < degree + 2:
            raise InsufficientDataError(
                f"residue {r} mod {period} has {len(pts)} tail points; need {degree + 2}"
            )
        base = pts[: degree + 1]
        mat = [[Fraction(n) ** j for j in range(degree + 1)] for n in base]
        c = _solve_exact(mat, [Fraction(values[n]) for n in base])
        coeffs.append(tuple(c))
        for n in pts[degree + 1 :]:
            pred = sum(cj * Fraction(n) ** j for j, cj in enumerate(c))
            residual = max(residual, abs(pred - values[n]))
            checked += 1
    return QuasiPolynomialFit(degree, period, t, tuple(coeffs), residual, checked)


@dataclass(frozen=True)
class GrowthVerdict:
    kind: str  # "quasi_polynomial" | "exponential" | "inconclusive"
    degree: int | None = None
    period: int | None = None
    ratio: Fraction | None = None
    fibonacci_dominance: bool | None = None
    fit: QuasiPolynomialFit | None = None
    notes: tuple[str, ...] = field(default_factory=tuple)


def classify_growth(
    series: Sequence[int] | ProfileSeries,
    *,
    d_max: int = 3,
    p_max: int = 4,
    tail_start: int | None = None,
    ratio_threshold: Fraction = Fraction(13, 10),
    min_length: int = 6,
) -> GrowthVerdict:
    """Quasi-polynomial, exponential or inconclusive.

    Candidate (degree, period) pairs are tried by increasing number of
    unknowns, then degree.  Failing an exact fit, the series is exponential
    when phi(n+1)/phi(n) >= ratio_threshold on the last max(4, N//3) steps;
    whether phi(n+2) >= phi(n+1) + phi(n) holds on the tail is reported
    alongside.
    """
    values = list(series)
    if len(values) < min_length:
        return GrowthVerdict("inconclusive", notes=(f"series shorter than {min_length}",))
    N = len(values) - 1
    t = N // 2 if tail_start is None else tail_start
    notes = []
    cands = sorted(
        ((d, p) for d in range(d_max + 1) for p in range(1, p_max + 1)),
        key=lambda dp: (dp[1] * (dp[0] + 1), dp[0], dp[1]),
    )
    for d, p in cands:
        try:
            fit = fit_quasi_polynomial(values, d, p, t)
        except InsufficientDataError:
            continue
        if fit.exact:
            return GrowthVerdict("quasi_polynomial", degree=d, period=p, fit=fit)
    notes.append(f"no exact quasi-polynomial with degree <= {d_max}, period <= {p_max} on n >= {t}")

    fib = all(values[n + 2] >= values[n + 1] + values[n] for n in range(t, N - 1))
    w = max(4, N // 3)
    if w > N:
        return GrowthVerdict("inconclusive", fibonacci_dominance=fib, notes=tuple(notes))
    if any(values[n] <= 0 for n in range(N - w, N)):
        return GrowthVerdict("inconclusive", fibonacci_dominance=fib, notes=(*notes, "zero in ratio window"))
    ratio = min(Fraction(values[n + 1], values[n]) for n in range(N - w, N))
    if ratio >= ratio_threshold:
        return GrowthVerdict("exponential", ratio=ratio, fibonacci_dominance=fib, notes=tuple(notes))
    notes.append(f"tail ratio {float(ratio):.3f} below {float(ratio_threshold):.3f}")
    return GrowthVerdict("inconclusive", ratio=ratio, fibonacci_dominance=fib, notes=tuple(notes))


@dataclass(frozen=True)
class DegreeReport:
    components: int
    block_sizes: tuple[int, ...]
    series: ProfileSeries
    verdict: GrowthVerdict

    @property
    def fitted_degree(self) -> int | None:
        return self.verdict.degree

    @property
    def matches(self) -> bool:
        return self.verdict.kind == "quasi_polynomial" and self.verdict.degree == self.components - 1


def infinite_component_degree_check(
    spec: CatalogSpec,
    k: int,
    n_max: int,
    *,
    partition_size: int | None = None,
) -> DegreeReport:
    """Compare (number of infinite components - 1) with the fitted profile degree.

    Components are read off a small prefix (at most 12 vertices unless
    ``partition_size`` says otherwise); blocks with at least two elements
    count as the infinite ones.  The profile comes from the prefix of size k.
    """
    if partition_size is None:
        partition_size = k
        while partition_size > 1 and generate(spec.with_size(partition_size)).n > 12:
            partition_size -= 1
    P = monomorphic_partition(generate(spec.with_size(partition_size)))
    sizes = tuple(len(b) for b in P.blocks)
    ell = sum(1 for s in sizes if s >= 2)
    series = profile_series(generate(spec.with_size(k)), n_max)
    return DegreeReport(ell, sizes, series, classify_growth(series))
