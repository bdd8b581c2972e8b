"""Monomorphic decomposition and profile of a few catalog structures.

Run with ``python3 demos/01_decompose_and_profile.py``.
"""

from monomorph.catalog import CatalogSpec, generate
from monomorph.decomposition import components_via_oracle, monomorphic_partition
from monomorph.profile import classify_growth, profile_series

# %% A perfect matching: every edge is its own monomorphic block.
M = generate(CatalogSpec("G1", 5))
P = monomorphic_partition(M)
print("matching on", M.n, "vertices, blocks:", P.to_json_obj())
print("block oracle agrees:", components_via_oracle(M) == P)

# %% Profiles of the infinite matching, the chain and the chain with a loop pattern.
# Long prefixes stand in for the infinite structures.
for family, size in (("G1", 12), ("chain", 12), ("chain2", 24)):
    s = profile_series(generate(CatalogSpec(family, size)), 12)
    v = classify_growth(s)
    print(f"{family:<7} phi = {list(s)}")
    print(f"{'':<7} {v.kind}, degree {v.degree}, period {v.period}")

# %% A short prefix cannot show the whole age.
print("G1 prefix of size 6:", list(profile_series(generate(CatalogSpec("G1", 6)), 10)))
