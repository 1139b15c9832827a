import numpy as np

# Packed edge record. Field order and widths mirror the C struct in _core.pyx.
EDGE_DTYPE = np.dtype([("w", np.float64), ("a", np.int32), ("b", np.int32)])

VERTEX_DTYPE = np.int32
MAX_VERTICES = np.iinfo(np.int32).max
