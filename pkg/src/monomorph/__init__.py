"""Monomorphic decompositions, ages and profiles of finite relational structures."""

from .catalog import CatalogSpec, FAMILIES, generate, random_blowup, random_structure
from .core import (
    Structure,
    StructureError,
    canonical_code,
    embeds,
    from_json,
    induced,
    is_interval,
    isomorphic,
    make_structure,
    order_interval,
    to_json,
)
from .decomposition import (
    InconsistencyError,
    Partition,
    components_via_oracle,
    equivalence_partition,
    f_equivalent,
    k_equivalent,
    le_k_equivalent,
    monomorphic_partition,
)
from .extraction import (
    PairColoring,
    SearchFailure,
    dichotomy_witness,
    invariant_restriction,
    ramsey_subset,
    witness_system,
)
from .profile import (
    ProfileSeries,
    age,
    bounds_up_to,
    classify_growth,
    fit_quasi_polynomial,
    forb_profile,
    profile_series,
)
