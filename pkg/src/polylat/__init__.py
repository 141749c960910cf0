"""Polynomial lattice rules over GF(2) chosen by component-by-component
search for small mean square weighted L2 discrepancy of the Owen-scrambled
point set."""

from ._kernels import BACKEND
from .cbc import (
    CbcResult,
    cbc_construct,
    cbc_construct_general,
    cbc_construct_product,
    exhaustive_best,
    theorem_bound,
    tractability_ratios,
)
from .discrepancy import mc_mean_square_estimate, mean_square_by_dimension, mean_square_criterion, warnock_l2sq
from .gf2poly import find_irreducible, is_irreducible
from .lattice import PointSet, PolyLatticeRule, generate_points
from .scramble import ScrambleRandomness, scramble
from .sobol import DirectionTable, load_direction_table, sobol_points
from .weights import WeightScheme, load_weights, preset

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CbcResult",
    "DirectionTable",
    "PointSet",
    "PolyLatticeRule",
    "ScrambleRandomness",
    "WeightScheme",
    "cbc_construct",
    "cbc_construct_general",
    "cbc_construct_product",
    "exhaustive_best",
    "find_irreducible",
    "generate_points",
    "is_irreducible",
    "load_direction_table",
    "load_weights",
    "mc_mean_square_estimate",
    "mean_square_by_dimension",
    "mean_square_criterion",
    "preset",
    "scramble",
    "sobol_points",
    "theorem_bound",
    "tractability_ratios",
    "warnock_l2sq",
    "__version__",
]
