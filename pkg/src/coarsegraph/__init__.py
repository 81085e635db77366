"""Exact metric graphs, fat minors, tree and star approximations, and a two-path coarse Menger theorem."""

from .fatminor import (
    FatModel,
    FatVerdict,
    InternalError,
    Pattern,
    SearchResult,
    fat_ray_prefix,
    fat_star_of_paths,
    minor_test,
    search_fat_minor,
    subdivision_transfer,
    verify_fat_model,
)
from .menger import MengerOutcome, far_paths_bruteforce, menger2, menger2_endpoints, menger2_to_boundary
from .metric import (
    GraphInputError,
    MetricGraph,
    Region,
    Route,
    at,
    ball,
    cycle_graph,
    diameter,
    distance,
    distance_regions,
    grid_graph,
    near_components,
    path_graph,
    separates,
    spider_graph,
    theta_graph,
)
from .quasitree import bottleneck_check, quasi_tree_pipeline
from .star import star_pipeline

__all__ = [name for name in dir() if not name.startswith("_")]
