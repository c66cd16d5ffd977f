"""Block decomposition of random rooted planar maps.

Subpackages by layer: ``maps`` (rotation systems), ``blocks`` (blocks and the
block tree), ``counting`` (exact enumeration and the critical offspring law),
``sampler`` (conditioned Galton-Watson trees), ``oracle`` (brute-force ground
truth), ``limits`` (reference laws and statistics) and ``cli``.
"""

__version__ = "0.1.0"
