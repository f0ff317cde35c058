"""coarsesep: graph products of finite groups, their combinatorial
classification (hyperbolicity, virtual cyclicity, virtual-surface shape,
splittings, coarse separability by subexponential families), and
desk-scale experiments on Cayley balls and thickened spheres (growth,
persistence, distortion, balanced-cut bounds)."""

from .classify import (
    HypothesisError,
    Verdict,
    classify_all,
    finite_index_subgraph,
    is_coarsely_separable_subexp,
    is_finite_group,
    is_hyperbolic,
    is_one_ended,
    is_virtual_surface,
    is_virtually_cyclic,
    splits_over_finite,
    splits_over_virtually_cyclic,
)
from .cayley import (
    CapExceeded,
    CayleySubgraph,
    ball,
    distortion_report,
    growth_table,
    intrinsic_distance,
    persistence_check,
    sphere,
    thickened_sphere,
    write_subgraph_csv,
)
from .cuts import (
    CutReport,
    cut_growth_experiment,
    deep_pair_connectivity,
    exact_min_cut,
    exhaustive_min_cut,
    flow_far_pair_lower_bound,
    heuristic_cut,
    sep_profile_estimate,
    verify_partition_lemma,
    vertex_connectivity,
)
from .graphs import (
    GraphFormatError,
    LabeledGraph,
    complete_labeled_graph,
    cycle_graph,
    enumerate_candidate_vc_separators,
    graph,
    is_separating,
    is_square_free,
    join_decomposition,
    link,
    link_of,
    parse_graph,
    star,
)
from .groups import VertexGroup, abstract, cyclic, from_table
from .vgraph import StaticGraph
from .words import GraphProduct, Word, format_word, parse_word_text

__version__ = "0.1.0"
