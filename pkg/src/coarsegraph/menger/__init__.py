from .bridges import BaseGeodesic, Bridge, CrossingSequence, Separator, base_geodesic, build_cover, find_bridge, perfect_subsequence
from .farpaths import FarPathsResult, far_paths_bruteforce
from .meta import JoinTree, MetaBridge, MetaResult, build_meta_bridges, check_meta
from .pipeline import MengerOutcome, menger2, path_bound, verify_paths, verify_separator
from .variants import BoundaryRun, menger2_endpoints, menger2_to_boundary, stabilization

__all__ = [
    "BaseGeodesic", "BoundaryRun", "Bridge", "CrossingSequence", "FarPathsResult", "JoinTree", "MengerOutcome",
    "MetaBridge", "MetaResult", "Separator", "base_geodesic", "build_cover", "build_meta_bridges", "check_meta",
    "far_paths_bruteforce", "find_bridge", "menger2", "menger2_endpoints", "menger2_to_boundary", "path_bound",
    "perfect_subsequence", "stabilization", "verify_paths", "verify_separator",
]
