"""Minimal obstructions of an age, computed from its finite levels.

Run with ``python3 demos/02_bounds.py``.
"""

from monomorph.catalog import CatalogSpec, generate
from monomorph.core import structure_from_code
from monomorph.profile import age_levels, bounds_up_to, forb_profile, infer_kind

# %% The age of the infinite matching is Forb(P3, K3).
M = generate(CatalogSpec("G1", 6))
bounds = bounds_up_to(age_levels(M, 5), infer_kind(M), 5)
for code in sorted(bounds, key=lambda c: (len(c), c)):
    S = structure_from_code(code)
    print(f"bound on {S.n} vertices, edges {sorted(e for e in S.rel_sets[0] if e[0] < e[1])}")

# %% Counting Forb(bounds) level by level recovers the profile floor(n/2)+1.
print("Forb counts:", [forb_profile([structure_from_code(c) for c in bounds], "graph", n) for n in range(9)])

# %% The ordered chain2 example: its bounds all appear by size 4.
C = generate(CatalogSpec("chain2", 16))
kind = infer_kind(C)
levels = age_levels(C, 8)
print("chain2 universe:", kind.name)
print("bounds up to 4:", len(bounds_up_to(levels, kind, 4)), " up to 8:", len(bounds_up_to(levels, kind, 8)))
