"""Dyadic Walsh functions and the Walsh-series form of the L2 discrepancy.

Everything here evaluates on dyadic rationals with integer digit masks.  The
series evaluator is slow by design; it exists to check the closed forms in
:mod:`polylat.discrepancy`.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

import numpy as np

from .lattice import PointSet
from .weights import WeightScheme

__all__ = [
    "dyadic_numerator",
    "wal",
    "wal_numer",
    "wal_matrix",
    "psi",
    "psi_vector",
    "r_coeff",
    "r_matrix",
    "l2_series_oracle",
    "series_tail_bound",
]


def dyadic_numerator(x) -> tuple[int, int]:
    """``(a, P)`` with ``x = a / 2^P`` for a float or Fraction in ``[0, 1)``."""
    fx = Fraction(x)
    if not 0 <= fx < 1:
        raise ValueError(f"Walsh functions are defined on [0, 1), got {x}")
    den = fx.denominator
    if den & (den - 1):
        raise ValueError(f"{x} is not a dyadic rational")
    return fx.numerator, den.bit_length() - 1


def _reverse_bits(a: int, precision: int) -> int:
    return int(f"{a:0{precision}b}"[::-1], 2) if precision else 0


def wal_numer(k: int, a: int, precision: int) -> int:
    """``wal_k(a / 2^precision)``.

    Bit ``i`` of the reversed numerator is the dyadic digit ``x_(i+1)``, which
    pairs with bit ``i`` of ``k``.
    """
    if k < 0:
        raise ValueError("Walsh index must be nonnegative")
    if not 0 <= a < 1 << precision:
        raise ValueError("numerator out of range")
    return -1 if (k & _reverse_bits(a, precision)).bit_count() & 1 else 1


def wal(k: int, x) -> int:
    a, precision = dyadic_numerator(x)
    return wal_numer(k, a, precision)


def wal_matrix(numer: np.ndarray, precision: int, k_max: int) -> np.ndarray:
    """``W[n, k] = wal_k(numer[n] / 2^precision)`` for ``k < k_max``, as int8."""
    numer = np.asarray(numer, dtype=np.uint64)
    rev = np.zeros_like(numer)
    for i in range(precision):
        rev |= ((numer >> np.uint64(precision - 1 - i)) & np.uint64(1)) << np.uint64(i)
    ks = np.arange(k_max, dtype=np.uint64)
    bits = rev[:, None] & ks[None, :]
    parity = np.zeros(bits.shape, dtype=np.uint8)
    for i in range(max(1, int(k_max - 1).bit_length())):
        parity ^= ((bits >> np.uint64(i)) & np.uint64(1)).astype(np.uint8)
    return (1 - 2 * parity.astype(np.int8)).astype(np.int8)


def psi(k) -> float:
    """``4^-(floor(log2 k) + 1)`` for ``k >= 1``, ``1`` for ``k = 0``; a
    sequence of indices gives the product over coordinates."""
    if isinstance(k, (int, np.integer)):
        k = int(k)
        if k < 0:
            raise ValueError("index must be nonnegative")
        return 1.0 if k == 0 else 4.0 ** -k.bit_length()
    out = 1.0
    for kj in k:
        out *= psi(kj)
    return out


def psi_vector(k_max: int) -> np.ndarray:
    a = np.frexp(np.arange(k_max, dtype=np.float64))[1]  # bit length
    return 4.0 ** (-a.astype(np.float64))


def _exponents(k: int) -> list[int]:
    """``a_1 > a_2 > ...`` with ``k = sum 2^(a_i - 1)``."""
    return [i + 1 for i in range(k.bit_length() - 1, -1, -1) if k >> i & 1]


def r_coeff(k: int, l: int) -> float:
    if k < 0 or l < 0:
        raise ValueError("indices must be nonnegative")
    if k < l:
        k, l = l, k
    if k == 0:
        return 1.0 / 3.0
    a = _exponents(k)
    v = len(a)
    if l == 0:
        if v == 1:
            return 2.0 ** -(a[0] + 2)
        if v == 2:
            return -(2.0 ** -(a[0] + a[1] + 2))
        return 0.0
    if k == l:
        return 1.0 / (3.0 * 4.0 ** a[0])
    b = _exponents(l)
    w = len(b)
    if v == w + 2 and a[2:] == b:
        return -(2.0 ** -(a[0] + a[1] + 2))
    if v == w and a[0] != b[0] and a[1:] == b[1:]:
        return 2.0 ** -(a[0] + b[0] + 2)
    return 0.0


@lru_cache(maxsize=8)
def r_matrix(k_max: int) -> np.ndarray:
    out = np.empty((k_max, k_max))
    for k in range(k_max):
        for l in range(k + 1):
            out[k, l] = out[l, k] = r_coeff(k, l)
    out.flags.writeable = False
    return out


ORACLE_MAX_S = 3
ORACLE_MAX_N = 64
ORACLE_MAX_K = 256


def l2_series_oracle(ps: PointSet, w: WeightScheme, k_max: int) -> float:
    """Squared weighted L2 discrepancy from its double Walsh series, keeping
    indices below ``k_max`` in every coordinate."""
    if ps.s > ORACLE_MAX_S or ps.n_points > ORACLE_MAX_N or not 1 <= k_max <= ORACLE_MAX_K:
        raise ValueError(
            f"series oracle is limited to s <= {ORACLE_MAX_S}, N <= {ORACLE_MAX_N}, k_max <= {ORACLE_MAX_K}"
        )
    if w.s != ps.s:
        raise ValueError("weights and point set disagree on the dimension")
    walsh = [wal_matrix(ps.numerators[:, j], ps.precision, k_max).astype(np.float64) for j in range(ps.s)]
    r = r_matrix(k_max)
    n = ps.n_points
    gam = w.gamma_array()
    total = 0.0
    for mask in range(1, 1 << ps.s):
        if gam[mask] == 0.0:
            continue
        coords = [j for j in range(ps.s) if mask >> j & 1]
        letters = "abc"[: len(coords)]
        expr = ",".join(f"n{c}" for c in letters) + "->" + letters
        coeffs = np.einsum(expr, *[walsh[j] for j in coords], optimize=True) / n
        coeffs[(0,) * len(coords)] = 0.0
        image = coeffs
        for axis in range(len(coords)):
            image = np.moveaxis(np.tensordot(r, image, axes=([1], [axis])), 0, axis)
        total += gam[mask] * float(np.sum(coeffs * image))
    return total


def _row_mass(a: int) -> Fraction:
    """Sum of ``|r(k, l)|`` over all ``l`` and all ``k`` in ``[2^(a-1), 2^a)``."""
    two = Fraction(2)
    up = two ** -(2 * a + 2) + Fraction(1, 12) * Fraction(1, 4**a)
    diag = Fraction(1, 3 * 4**a)

    def down(a2):
        return sum((two ** -(a + b + 2) for b in range(a2 + 1, a)), Fraction(0))

    total = diag + up + two ** -(a + 2) + down(0)  # the single k with one digit
    for a2 in range(1, a):
        count = 2 ** (a2 - 1)
        per_k = diag + up + down(a2)
        total += count * per_k + two ** -(a + a2 + 2)  # v = 2 pairs with l = 0
        total += (count - 1) * two ** -(a + a2 + 2)  # v > 2 drop the top two digits
    return total


@lru_cache(maxsize=None)
def _row_masses(limit: int = 120) -> tuple[float, ...]:
    return tuple(float(_row_mass(a)) for a in range(1, limit + 1))


def series_tail_bound(w: WeightScheme, k_max: int) -> float:
    """Upper bound on ``|l2_series_oracle - exact|`` using only ``|r|`` and
    ``|Walsh averages| <= 1``."""
    masses = _row_masses()
    top = int(k_max).bit_length() - 1  # every dropped pair has max(k, l) >= 2^top
    total_mass = 2.0 / 3.0 + sum(masses)
    tail = 2.0 * sum(masses[top:])
    gam = w.gamma_array()
    popcount = [bin(mask).count("1") for mask in range(1 << w.s)]
    return float(
        sum(gam[mask] * (total_mass ** popcount[mask] - (total_mass - tail) ** popcount[mask]) for mask in range(1, 1 << w.s))
    )
