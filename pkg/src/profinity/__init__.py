"""Cohomology and homology of finite and profinite groups at finite level.

Finite groups are handled exactly through the bar cochain complex;
profinite groups are approximated through towers of finite quotients with
explicit stabilization verdicts.  See the README for a tour.
"""

__version__ = "0.1.0"

from profinity.cohomology import (
    BarCochainComplex,
    CohomologyGroup,
    SizeCapExceeded,
    coefficient_map,
    cohomology,
    conjugation_action,
    five_term_check,
    h1_via_derivations,
    homology,
    inflation_map,
    restriction_map,
    transgression,
    uct_check,
)
from profinity.exact_algebra import (
    ChainComplexSpec,
    FgAbelianGroup,
    SnfDecomposition,
    SubquotientMap,
    cokernel_structure,
    hom_and_ext,
    homology_at,
    induced_map_on_homology,
    smith_normal_form,
)
from profinity.gmodules import (
    GModule,
    ModuleMap,
    build_module,
    coinduce,
    coinvariants,
    induce,
    invariants,
    pontryagin_dual,
    tensor_product,
    trivial_module,
)
from profinity.groups import (
    FiniteGroup,
    Homomorphism,
    SubgroupWithTransversal,
    build_group,
    cyclic,
    product,
    quotient_by,
    subgroup_as_group,
    subgroup_closure,
    symmetric,
)

__all__ = [
    "BarCochainComplex",
    "ChainComplexSpec",
    "CohomologyGroup",
    "FgAbelianGroup",
    "FiniteGroup",
    "GModule",
    "Homomorphism",
    "ModuleMap",
    "SizeCapExceeded",
    "SnfDecomposition",
    "SubgroupWithTransversal",
    "SubquotientMap",
    "build_group",
    "build_module",
    "coefficient_map",
    "cohomology",
    "coinduce",
    "coinvariants",
    "cokernel_structure",
    "conjugation_action",
    "cyclic",
    "five_term_check",
    "h1_via_derivations",
    "hom_and_ext",
    "homology",
    "homology_at",
    "induce",
    "induced_map_on_homology",
    "inflation_map",
    "invariants",
    "pontryagin_dual",
    "product",
    "quotient_by",
    "restriction_map",
    "smith_normal_form",
    "subgroup_as_group",
    "subgroup_closure",
    "symmetric",
    "tensor_product",
    "transgression",
    "trivial_module",
    "uct_check",
    "__version__",
]
