"""Graph-based image segmentation with interchangeable execution strategies.

Hot kernels come from the compiled ``graphseg._core`` extension when it is
built, otherwise from ``graphseg._pure``; ``graphseg.BACKEND`` names the
one in use.
"""
from ._backend import kernels as _kernels
from .agglomerate import SegParams, SegmentationResult, extract_result, minsize_pass, threshold_pass
from .engine import StrategyConfig, run, run_hybrid, run_pipelined, run_sequential
from .errors import (
    ContractViolation,
    GraphSegError,
    GridError,
    ParameterError,
    PPMError,
)
from .forest import ComponentForest, component_count, init_forest
from .graph import Edge, EdgeList, build_edges, edge_weight, neighbors_of, sort_edges
from .imaging import (
    Palette,
    RasterImage,
    SmoothingParams,
    gaussian_smooth,
    load_ppm,
    read_ppm,
    render_labels,
    save_ppm,
    write_ppm,
)
from .tiling import BoundaryEdges, TileGrid, boundary_edges, make_grid, stitch, tile_edges

BACKEND = _kernels.NAME

__version__ = "0.1.0"
