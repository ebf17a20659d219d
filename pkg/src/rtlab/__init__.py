"""rtlab: an exact-computation laboratory for rainbow-K4-free edge
colorings of small graphs, their color-list templates, the rainbow
hypergraph co-degree analysis, and the graph cleaning procedure."""

__version__ = "0.1.0"

from .cleaning import (
    CleaningConfig,
    CleaningTrace,
    CriticalSets,
    clean,
    critical_sets,
    list_size_histogram,
    operation1_step,
    operation2_step,
    remove_singleton_edges,
    supersaturation_bound,
    supersaturation_interval,
    verify_trace,
    xi_from_delta,
)
from .containers import (
    RainbowHypergraphStats,
    build_rainbow_hypergraph,
    codegree,
    container_hypothesis_check,
    delta_tau,
    max_codegree,
    min_n_for_container,
)
from .counting import (
    BoundsVerdict,
    PartitionPolynomial,
    SearchReport,
    bounds_compare,
    brute_force_count,
    count_colorings,
    partition_polynomial,
    rho_max_search,
)
from .graphs import (
    ClosenessResult,
    Graph,
    cliques,
    closeness_to_kpartite,
    complete_graph,
    count_cliques,
    enumerate_graphs,
    extremal_number,
    parse_graph6,
    turan_graph,
    write_graph6,
)
from .templates import (
    Template,
    complete_template,
    count_rainbow_copies,
    count_rainbow_copies_through_triangle,
    from_coloring,
    is_subtemplate,
    lift_template,
    list_product,
    r_neighborhood,
    template_from_json,
    template_to_json,
)
