"""Number of infinite components against the degree of the profile.

An ordered structure cut into ``l`` infinite intervals has a profile that is
a polynomial of degree ``l - 1``.  Run with ``python3 demos/04_degree_law.py``.
"""

from monomorph.catalog import CatalogSpec
from monomorph.profile import infinite_component_degree_check

for parts in (1, 2, 3):
    rep = infinite_component_degree_check(CatalogSpec("interval_chain", 0, parts=parts), 30, 10)
    print(f"{parts} parts: components {rep.components}, fitted degree {rep.fitted_degree}, "
          f"phi = {list(rep.series)}")
