"""rainbow-forge: construct, solve, and verify rainbow-matching
instances in r-uniform (optionally r-partite) hypergraphs."""

from .bounds import (
    BoundValue,
    GiBounds,
    ach_bound,
    bounds_h,
    check_gibounds,
    lower_bound_g_prime,
    nth_root_floor,
    upper_bound_g,
    weak_asymptotic_bound,
)
from .constructions import (
    BlockingFamily,
    PszParams,
    ach_instance,
    blowup_compose,
    certify_blocking_family,
    cycle_instance,
    dummy_lift,
    find_blocking_family,
    k4_union_instance,
    psz_composition_params,
    random_instance,
)
from .core import (
    Edge,
    Instance,
    Matching,
    RainbowMatching,
    Violation,
    canonicalize,
    is_rainbow_matching,
    make_edge,
    validate_instance,
)
from .fileformat import (
    FORMAT_VERSION,
    InstanceValidationError,
    ParseError,
    ReportDoc,
    parse_instance,
    parse_report,
    serialize_instance,
    serialize_report,
)
from .setpairs import SetPairSystem, bollobas_sum, extract_setpairs, is_cross_intersecting
from .solvers import (
    CERT_EXACT,
    CERT_HEURISTIC,
    CERT_LOCAL,
    ExtensionAvailable,
    GoodEdgeTable,
    SampleExtendFailure,
    SolveReport,
    SolveStats,
    SwapAvailable,
    chernoff_tail,
    exact_max_rainbow,
    find_extension,
    find_swap,
    good_edges,
    greedy_rainbow,
    local_search_rainbow,
    sample_and_extend,
)

__version__ = "0.1.0"

__all__ = [
    "BlockingFamily",
    "BoundValue",
    "CERT_EXACT",
    "CERT_HEURISTIC",
    "CERT_LOCAL",
    "Edge",
    "ExtensionAvailable",
    "FORMAT_VERSION",
    "GiBounds",
    "GoodEdgeTable",
    "Instance",
    "InstanceValidationError",
    "Matching",
    "ParseError",
    "PszParams",
    "RainbowMatching",
    "ReportDoc",
    "SampleExtendFailure",
    "SetPairSystem",
    "SolveReport",
    "SolveStats",
    "SwapAvailable",
    "Violation",
    "ach_bound",
    "ach_instance",
    "blowup_compose",
    "bollobas_sum",
    "bounds_h",
    "canonicalize",
    "certify_blocking_family",
    "check_gibounds",
    "chernoff_tail",
    "cycle_instance",
    "dummy_lift",
    "exact_max_rainbow",
    "extract_setpairs",
    "find_blocking_family",
    "find_extension",
    "find_swap",
    "good_edges",
    "greedy_rainbow",
    "is_cross_intersecting",
    "is_rainbow_matching",
    "k4_union_instance",
    "local_search_rainbow",
    "lower_bound_g_prime",
    "make_edge",
    "nth_root_floor",
    "parse_instance",
    "parse_report",
    "psz_composition_params",
    "random_instance",
    "sample_and_extend",
    "serialize_instance",
    "serialize_report",
    "upper_bound_g",
    "validate_instance",
    "weak_asymptotic_bound",
]
