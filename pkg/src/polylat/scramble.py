"""Owen's nested uniform scrambling in base 2.

The permutation applied to digit ``k`` of coordinate ``j`` depends on the
preceding digits (the prefix).  Each permutation of {0, 1} is either the
identity or the swap, decided by one bit of a counter-based hash of
``(seed, j, k, prefix)``; the tree is never stored.  Digits below the input
precision are filled from a hash of the full prefix, which is the same as
scrambling an infinitely long zero tail.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels, _pykernels
from .lattice import PointSet

__all__ = ["ScrambleRandomness", "scramble", "DEFAULT_DEPTH"]

DEFAULT_DEPTH = 53


@dataclass(frozen=True)
class ScrambleRandomness:
    seed: int
    depth: int = DEFAULT_DEPTH
    identity: bool = False

    def __post_init__(self):
        if not 1 <= self.depth <= 63:
            raise ValueError("scramble depth must be in [1, 63]")

    def swap_bit(self, j: int, k: int, prefix: int) -> int:
        """Whether the permutation for 0-based coordinate ``j``, digit ``k``
        (1-based) and the value of digits ``1..k-1`` swaps 0 and 1."""
        if self.identity:
            return 0
        key = _pykernels.digit_key(_pykernels.dim_key(self.seed, j), k)
        return _pykernels.mix64(prefix ^ key) >> 63

    def residual_bits(self, j: int, numerator: int, n_bits: int) -> int:
        """``n_bits`` uniform digits appended below a point with the given numerator."""
        if self.identity or n_bits == 0:
            return 0
        key = _pykernels.residual_key(_pykernels.dim_key(self.seed, j))
        return _pykernels.mix64(numerator ^ key) >> (64 - n_bits)


def scramble(ps: PointSet, rnd: ScrambleRandomness) -> PointSet:
    """Scrambled copy of ``ps`` written with ``rnd.depth`` digits."""
    if rnd.depth < ps.precision:
        raise ValueError(f"scramble depth {rnd.depth} is below the point precision {ps.precision}")
    if rnd.identity:
        return ps.refine(rnd.depth)
    out = _kernels.owen_scramble(ps.numerators, ps.precision, rnd.depth, rnd.seed)
    return PointSet(out, rnd.depth)


def replicate_seeds(seed: int, replicates: int) -> np.ndarray:
    """Independent 64-bit seeds for ``replicates`` scrambles."""
    return np.random.SeedSequence(seed).generate_state(replicates, dtype=np.uint64)
