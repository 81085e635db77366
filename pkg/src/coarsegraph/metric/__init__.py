from .graph import (
    INF,
    CutPoint,
    GraphInputError,
    Locus,
    MetricGraph,
    as_rational,
    at,
    cycle_graph,
    grid_graph,
    path_graph,
    spider_graph,
    theta_graph,
    vkey,
)
from .region import Region, Route
from .ops import (
    NoPathError,
    as_region,
    ball,
    components,
    diameter,
    distance,
    distance_regions,
    far_set,
    geodesic,
    is_connected_region,
    is_geodesic,
    near_components,
    near_vertex_classes,
    neighborhood,
    separates,
    shortest_route,
    vertex_distances,
)
from .qi import ContractError, QICertificate, attach_stars, net_graph, verify_quasi_isometry
from .cover import ColoredCover, CoverVerdict, verify_cover

__all__ = [name for name in dir() if not name.startswith("_")]
