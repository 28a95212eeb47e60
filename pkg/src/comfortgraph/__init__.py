"""Building graphs at cell scale, node embeddings over them, and thermal-preference forests.

Hot loops (HNSW search, random walks, skip-gram SGD, tree growing) run in a
compiled extension when it is importable, otherwise in a pure-Python twin with
identical results. ``BACKEND`` names the one in use.
"""

from ._backend import kernels

__version__ = "0.1.0"
BACKEND = kernels.BACKEND

__all__ = ["BACKEND", "__version__"]
