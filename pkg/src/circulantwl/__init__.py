"""Coherent configurations, WL refinement and circulant scheme analysis."""

from .algebra import (
    AlgebraicIso,
    CapExceededError,
    TupleExtension,
    automorphism_group,
    enumerate_algebraic_isos,
    extendable_at,
    find_isomorphism,
    identity_iso,
    induced_color_map,
    induced_on_quotient,
    induced_on_restriction,
    induced_on_section,
    is_algebraic_isomorphism,
    is_isomorphism,
    is_m_extendable,
    tuple_extension,
)
from .circulant import (
    CirculantScheme,
    Multiplier,
    Section,
    SingularClassReport,
    XGroup,
    base_tuple,
    extend_algebraic_automorphism,
    extract_multiplier,
    from_connection_partition,
    is_induced_by_isomorphism,
    is_multiple,
    is_normal,
    is_quasinormal,
    omega,
    proj_equivalence_classes,
    quasinormal_section_decomposition,
    scheme_radical,
    secc0,
    section_bridge,
    section_discreteness_check,
    section_scheme,
    sections,
    singular_classes,
    singular_extension,
    satisfies_ul_condition,
    unit_permutes_connection_sets,
    xgroup_lattice,
)
from .core import (
    CoherentConfig,
    Parabolic,
    Relation,
    ValidationReport,
    converse,
    dot_product,
    fibers,
    generated_equivalence,
    intersection_number,
    intersection_tensor,
    is_homogeneous,
    point_extension,
    quotient,
    radical,
    rank,
    restriction,
    tensor_product,
    trivial_config,
    validate,
)
from .dimension import (
    Corpus,
    DimensionReport,
    enumerate_graphs,
    enumerate_schemes,
    estimate_dimension,
    graph_scheme,
    verify_main_theorem,
    verify_reduction,
)
from .refine import MemoryCapError
from .wl import (
    GameTable,
    MAryConfig,
    OracleCapError,
    pebble_game_oracle,
    projection,
    wl_closure,
    wl_m_equivalent,
    wl_m_refine,
)

__all__ = [
    "AlgebraicIso",
    "CapExceededError",
    "CirculantScheme",
    "CoherentConfig",
    "Corpus",
    "DimensionReport",
    "GameTable",
    "MAryConfig",
    "MemoryCapError",
    "Multiplier",
    "OracleCapError",
    "Parabolic",
    "Relation",
    "Section",
    "SingularClassReport",
    "TupleExtension",
    "ValidationReport",
    "XGroup",
    "automorphism_group",
    "base_tuple",
    "converse",
    "dot_product",
    "enumerate_algebraic_isos",
    "enumerate_graphs",
    "enumerate_schemes",
    "estimate_dimension",
    "extend_algebraic_automorphism",
    "extendable_at",
    "extract_multiplier",
    "fibers",
    "find_isomorphism",
    "from_connection_partition",
    "generated_equivalence",
    "graph_scheme",
    "identity_iso",
    "induced_color_map",
    "induced_on_quotient",
    "induced_on_restriction",
    "induced_on_section",
    "intersection_number",
    "intersection_tensor",
    "is_algebraic_isomorphism",
    "is_homogeneous",
    "is_induced_by_isomorphism",
    "is_isomorphism",
    "is_m_extendable",
    "is_multiple",
    "is_normal",
    "is_quasinormal",
    "omega",
    "pebble_game_oracle",
    "point_extension",
    "proj_equivalence_classes",
    "projection",
    "quasinormal_section_decomposition",
    "quotient",
    "radical",
    "rank",
    "restriction",
    "satisfies_ul_condition",
    "scheme_radical",
    "secc0",
    "section_bridge",
    "section_discreteness_check",
    "section_scheme",
    "sections",
    "singular_classes",
    "singular_extension",
    "tensor_product",
    "trivial_config",
    "tuple_extension",
    "unit_permutes_connection_sets",
    "validate",
    "verify_main_theorem",
    "verify_reduction",
    "wl_closure",
    "wl_m_equivalent",
    "wl_m_refine",
    "xgroup_lattice",
]
