"""Weighted L2 discrepancy and its mean square over Owen scrambles.

``warnock_l2sq`` is the realized squared discrepancy of any point set.
``mean_square_criterion`` is the closed-form expectation over all scrambles
of a digital point set: for ``x = a / 2^m`` it depends on ``x`` only through
the bit length of ``a``, so

    phi(x)       = (1 - 2^floor(log2 x)) / 2
    phi_tilde(x) = (1 - 3 * 2^floor(log2 x)) / 2     (2^floor(log2 0) := 0)

are tabulated per bit length and never evaluated with a floating log.

The criterion is accumulated one coordinate at a time,

    B_tau = (1 + gamma_tau / 3) B_(tau-1) + (gamma_tau / 3) mean_n acc_n phi_tilde(x_(n,tau)),
    acc_n <- acc_n (1 + gamma_tau phi(x_(n,tau))),

which equals ``-prod(1 + gamma_j/3) + mean_n prod(1 + gamma_j phi)`` but avoids
cancelling two O(1) quantities into an O(4^-m) result.  For s = 1 every
term is a dyadic rational and the sum is exact.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import _kernels
from .lattice import PointSet
from .scramble import DEFAULT_DEPTH, ScrambleRandomness, replicate_seeds, scramble
from .weights import WeightScheme

__all__ = [
    "phi",
    "phi_tilde",
    "phi_table",
    "phi_tilde_table",
    "bit_classes",
    "warnock_l2sq",
    "mean_square_criterion",
    "mean_square_by_dimension",
    "mc_mean_square_estimate",
]


def phi_table(m: int) -> np.ndarray:
    """``phi`` indexed by numerator bit length ``0..m`` at precision ``m``."""
    c = np.arange(m + 1)
    scale = np.where(c == 0, 0.0, np.ldexp(1.0, c - 1 - m))
    return (1.0 - scale) / 2.0


def phi_tilde_table(m: int) -> np.ndarray:
    c = np.arange(m + 1)
    scale = np.where(c == 0, 0.0, np.ldexp(1.0, c - 1 - m))
    return (1.0 - 3.0 * scale) / 2.0


def bit_classes(numer: np.ndarray) -> np.ndarray:
    return _kernels.bit_length(numer)


def phi(a: int, precision: int) -> float:
    """``phi(a / 2^precision)``."""
    return float(phi_table(precision)[int(a).bit_length()])


def phi_tilde(a: int, precision: int) -> float:
    return float(phi_tilde_table(precision)[int(a).bit_length()])


def combine_classes(sums: np.ndarray, m: int) -> np.ndarray:
    """Row-wise ``sum_b sums[:, b] * phi_tilde_b`` in a fixed order."""
    sums = np.atleast_2d(sums)
    table = phi_tilde_table(m)
    out = np.zeros(sums.shape[0])
    for b in range(m + 1):
        out += sums[:, b] * table[b]
    return out


def theta(weights: np.ndarray, numer_col: np.ndarray, m: int) -> float:
    """``sum_n weights_n phi_tilde(x_n)`` via bit-length class sums."""
    sums = np.bincount(bit_classes(numer_col), weights=weights, minlength=m + 1)
    return float(combine_classes(sums, m)[0])


def _check_dims(ps: PointSet, w: WeightScheme) -> None:
    if ps.n_points == 0:
        raise ValueError("empty point set")
    if w.s != ps.s:
        raise ValueError(f"weights are for s={w.s} but the point set has s={ps.s}")


def _product_steps(ps: PointSet, gammas) -> list[float]:
    m = ps.precision
    n = ps.n_points
    phit = phi_table(m)
    acc = np.ones(n)
    out = []
    b = 0.0
    for j, g in enumerate(gammas):
        col = ps.numerators[:, j]
        b = (1.0 + g / 3.0) * b + (g / 3.0) * theta(acc, col, m) / n
        out.append(b)
        acc = acc * (1.0 + g * phit[bit_classes(col)])
    return out


def _subset_products(values: np.ndarray) -> np.ndarray:
    """``out[n, v] = prod_{j in v} values[n, j]`` for every subset mask ``v``."""
    n, s = values.shape
    out = np.ones((n, 1 << s))
    for j in range(s):
        half = 1 << j
        out[:, half : 2 * half] = out[:, :half] * values[:, j : j + 1]
    return out


def general_accumulator(phit_vals: np.ndarray, gt: np.ndarray, tau: int) -> np.ndarray:
    """``G_n = sum over w in I_(tau-1) of gt[w + tau] prod_{j in w} phit_vals[n, j]``."""
    prods = _subset_products(phit_vals[:, : tau - 1])
    half = 1 << (tau - 1)
    return prods @ gt[half : 2 * half]


def general_steps(numer: np.ndarray, m: int, gt: np.ndarray) -> list[float]:
    """Criterion of the first ``tau`` columns of ``numer`` for each ``tau``,
    with the dense derived weights ``gt`` (which may cover more columns)."""
    n = numer.shape[0]
    phit_vals = phi_tilde_table(m)[bit_classes(numer)]
    out = []
    b = 0.0
    for tau in range(1, numer.shape[1] + 1):
        if tau == 1:
            # constant accumulator: keep the class sums as exact point counts
            b = gt[1] * theta(np.ones(n), numer[:, 0], m) / n
        else:
            acc = general_accumulator(phit_vals, gt, tau)
            b += theta(acc, numer[:, tau - 1], m) / n
        out.append(b)
    return out


def mean_square_by_dimension(ps: PointSet, w: WeightScheme) -> list[float]:
    """Criterion of the first ``tau`` coordinates for ``tau = 1..s``.

    Product weights use the weights ``gamma_1..gamma_tau`` alone; general
    weights keep the derived weights of the full dimension.
    """
    _check_dims(ps, w)
    if w.is_product:
        return _product_steps(ps, w.gammas)
    return general_steps(ps.numerators, ps.precision, w.gamma_tilde_all())


def mean_square_criterion(ps: PointSet, w: WeightScheme, method: str = "recursive") -> float:
    """Mean square weighted L2 discrepancy of the scrambled digital net ``ps``.

    ``method="recursive"`` (default) accumulates coordinate by coordinate;
    ``"direct"`` evaluates the per-point product (product weights) or the
    per-point subset sum (general weights) literally; ``"subsets"`` sums
    ``gamma_tilde_v`` times the point average of ``prod_{j in v} phi_tilde``
    over all subsets.
    """
    _check_dims(ps, w)
    m = ps.precision
    if method == "recursive":
        return mean_square_by_dimension(ps, w)[-1]
    if method == "direct":
        if w.is_product:
            g = np.asarray(w.gammas)
            terms = np.prod(1.0 + g * phi_table(m)[bit_classes(ps.numerators)], axis=1)
            return math.fsum(terms) / ps.n_points - math.prod(1.0 + gj / 3.0 for gj in w.gammas)
        phit_vals = phi_tilde_table(m)[bit_classes(ps.numerators)]
        gt = w.gamma_tilde_all()
        per_point = _subset_products(phit_vals) @ gt
        return math.fsum(per_point) / ps.n_points
    if method == "subsets":
        phit_vals = phi_tilde_table(m)[bit_classes(ps.numerators)]
        gt = w.gamma_tilde_all()
        averages = _subset_products(phit_vals).mean(axis=0)
        return math.fsum(gt[1:] * averages[1:])
    raise ValueError(f"unknown method {method!r}")


def _warnock_product(x: np.ndarray, gammas) -> float:
    n = x.shape[0]
    g = np.asarray(gammas, dtype=np.float64)
    first = math.prod(1.0 + gj / 3.0 for gj in gammas)
    second = math.fsum(np.prod(1.0 + g * (1.0 - x * x) / 2.0, axis=1))
    third = math.fsum(_kernels.warnock_rows(x, g))
    return first - 2.0 * second / n + third / (n * n)


def _warnock_general(x: np.ndarray, w: WeightScheme) -> float:
    n, s = x.shape
    gam = w.gamma_array()
    popcount = np.zeros(1 << s)
    for j in range(s):
        half = 1 << j
        popcount[half : 2 * half] = popcount[:half] + 1
    first = math.fsum(gam * 3.0**-popcount)
    second = math.fsum(_subset_products((1.0 - x * x) / 2.0) @ gam)
    block = max(1, (1 << 20) // ((1 << s) * n))
    partial = []
    for start in range(0, n, block):
        xb = x[start : start + block]
        pair = 1.0 - np.maximum(xb[:, None, :], x[None, :, :])
        partial.append(math.fsum(_subset_products(pair.reshape(-1, s)) @ gam))
    third = math.fsum(partial)
    return first - 2.0 * second / n + third / (n * n)


def warnock_l2sq(ps: PointSet, w: WeightScheme) -> float:
    """Squared weighted L2 discrepancy (Warnock's formula with weights)."""
    _check_dims(ps, w)
    x = ps.as_float()
    if w.is_product:
        return _warnock_product(x, w.gammas)
    return _warnock_general(x, w)


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("PLR_THREADS", "1")))
    except ValueError:
        return 1


def mc_mean_square_estimate(
    ps: PointSet,
    w: WeightScheme,
    replicates: int,
    seed: int = 0,
    depth: int = DEFAULT_DEPTH,
    identity: bool = False,
) -> tuple[float, float]:
    """Mean and standard error of ``warnock_l2sq`` over independent scrambles."""
    if replicates < 2:
        raise ValueError("need at least two replicates")
    _check_dims(ps, w)
    seeds = replicate_seeds(seed, replicates)

    def one(sd):
        rnd = ScrambleRandomness(int(sd), depth=depth, identity=identity)
        return warnock_l2sq(scramble(ps, rnd), w)

    workers = _threads()
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            values = np.array(list(pool.map(one, seeds)))
    else:
        values = np.array([one(sd) for sd in seeds])
    return float(values.mean()), float(values.std(ddof=1) / math.sqrt(replicates))
