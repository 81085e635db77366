from .constructions import (
    BadPairGraph,
    InternalError,
    TooShort,
    bad_pair_graph,
    fat_ray_prefix,
    fat_star_of_paths,
    ray_blocks,
    subdivision_transfer,
)
from .model import FatModel, FatVerdict, Pattern, exempt, model_from_vertex_sets, verify_fat_model
from .search import (
    BudgetExhausted,
    SearchResult,
    connected_sets,
    iter_connected_sets,
    minor_test,
    search_fat_minor,
    star_minor_model,
)

__all__ = [
    "BadPairGraph", "BudgetExhausted", "FatModel", "FatVerdict", "InternalError", "Pattern",
    "SearchResult", "TooShort", "bad_pair_graph", "connected_sets", "exempt", "fat_ray_prefix",
    "fat_star_of_paths", "iter_connected_sets", "minor_test", "model_from_vertex_sets",
    "ray_blocks", "search_fat_minor", "star_minor_model", "subdivision_transfer", "verify_fat_model",
]
