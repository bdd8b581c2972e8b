"""From many monomorphic components to exponential growth.

A structure with many components yields a witness system, a dichotomy
witness and a homogeneous restriction whose extension grows exponentially.
Run with ``python3 demos/03_extraction.py``.
"""

from monomorph.catalog import CatalogSpec, generate
from monomorph.extraction import dichotomy_witness, invariant_restriction, witness_system
from monomorph.profile import classify_growth, profile_series

for label, spec, target in (
    ("ordered matching", CatalogSpec("ordered_two_layer", 6), 4),
    ("ordered half-graph", CatalogSpec("ordered_two_layer", 8, base_rule="le"), 4),
):
    G = generate(spec)
    print(f"== {label} on {G.n} vertices")

    # %% separating sets of size at most 1 between chosen representatives
    ws = witness_system(G, 1, target)
    print("representatives", ws.f, "separators", dict(ws.g))

    # %% a set of pairwise 0-equivalent but 1-separated vertices
    w = dichotomy_witness(G, target)
    w.validate(G)
    print("dichotomy witness:", w.kind, w.A if w.kind == "single" else (w.A1, w.A2))

    # %% restriction to homogeneous rows, then extension along the naturals
    res = invariant_restriction(G, 1, target)
    print("rows", res.rows, "classes kept", res.classes)
    s = profile_series(res.extend(10), 10)
    v = classify_growth(s)
    print("extension profile", list(s), "->", v.kind, f"ratio {float(v.ratio):.3f}")
