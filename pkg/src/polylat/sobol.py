"""Sobol' points from Joe-Kuo direction-number files.

The file format is a header line followed by one line per dimension
``j >= 2``::

    d  s  a  m_1 m_2 ... m_s

with ``s`` the degree of the primitive polynomial, ``a`` its interior
coefficients packed as an integer, and ``m_k`` the initial direction
integers (odd, ``m_k < 2^k``).  Dimension 1 has all ``m_k = 1``.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._kernels import span
from .lattice import PointSet

__all__ = [
    "DirectionEntry",
    "DirectionTable",
    "DirectionFileError",
    "load_direction_table",
    "parse_direction_text",
    "direction_integers",
    "sobol_points",
    "MAX_SOBOL_M",
]

MAX_SOBOL_M = 31


class DirectionFileError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class DirectionEntry:
    dim: int
    degree: int
    a: int
    m_init: tuple[int, ...]


@dataclass(frozen=True)
class DirectionTable:
    entries: tuple[DirectionEntry, ...]  # dimensions 2, 3, ...
    sha256: str = ""
    source: str = ""

    @property
    def n_dims(self) -> int:
        return len(self.entries) + 1


def _parse_line(fields: list[str], lineno: int, expected_dim: int) -> DirectionEntry:
    try:
        nums = [int(f) for f in fields]
    except ValueError:
        raise DirectionFileError(f"non-integer field in {' '.join(fields)!r}", lineno) from None
    if len(nums) < 4:
        raise DirectionFileError("expected 'd s a m_1 ... m_s'", lineno)
    d, deg, a = nums[:3]
    m_init = tuple(nums[3:])
    if d != expected_dim:
        raise DirectionFileError(f"expected dimension {expected_dim}, found {d}", lineno)
    if deg < 1:
        raise DirectionFileError(f"degree must be positive, got {deg}", lineno)
    if len(m_init) != deg:
        raise DirectionFileError(f"degree {deg} needs {deg} direction integers, found {len(m_init)}", lineno)
    if not 0 <= a < 1 << max(deg - 1, 0):
        raise DirectionFileError(f"coefficient code {a} does not fit degree {deg}", lineno)
    for k, mk in enumerate(m_init, start=1):
        if mk % 2 == 0 or not 0 < mk < 1 << k:
            raise DirectionFileError(f"m_{k} = {mk} must be odd and below 2^{k}", lineno)
    return DirectionEntry(d, deg, a, m_init)


def parse_direction_text(text: str, min_dims: int = 1, source: str = "") -> DirectionTable:
    lines = text.splitlines()
    entries = []
    for lineno, raw in enumerate(lines[1:], start=2):
        fields = raw.split()
        if not fields:
            continue
        entries.append(_parse_line(fields, lineno, len(entries) + 2))
    table = DirectionTable(tuple(entries), hashlib.sha256(text.encode()).hexdigest(), source)
    if table.n_dims < min_dims:
        raise DirectionFileError(f"file has {table.n_dims} dimensions, need {min_dims}", len(lines))
    return table


def load_direction_table(path, min_dims: int = 100) -> DirectionTable:
    """Parse and validate a direction-number file."""
    path = Path(path)
    return parse_direction_text(path.read_text(), min_dims, str(path))


def direction_integers(entry: DirectionEntry | None, m: int) -> list[int]:
    """``m_1 .. m_m`` of one dimension (``None`` is dimension 1)."""
    if entry is None:
        return [1] * m
    deg = entry.degree
    mk = list(entry.m_init[:m])
    for k in range(deg, m):
        new = mk[k - deg] ^ (mk[k - deg] << deg)
        for i in range(1, deg):
            if entry.a >> (deg - 1 - i) & 1:
                new ^= mk[k - i] << i
        mk.append(new)
    return mk


def sobol_points(dt: DirectionTable, m: int, s: int, order: str = "direct") -> PointSet:
    """First ``2^m`` Sobol' points with ``m`` digits.

    ``order="direct"`` places point ``n`` at row ``n``; ``order="gray"``
    lists them in Gray-code order, which is the same set.
    """
    if not 0 <= m <= MAX_SOBOL_M:
        raise ValueError(f"m must be in [0, {MAX_SOBOL_M}]")
    if not 1 <= s <= dt.n_dims:
        raise ValueError(f"s must be in [1, {dt.n_dims}]")
    numer = np.empty((1 << m, s), dtype=np.uint64)
    for j in range(s):
        entry = None if j == 0 else dt.entries[j - 1]
        cols = [mk << (m - k) for k, mk in enumerate(direction_integers(entry, m), start=1)]
        numer[:, j] = span(cols, m)
    if order == "gray":
        n = np.arange(1 << m)
        numer = numer[n ^ (n >> 1)]
    elif order != "direct":
        raise ValueError(f"unknown order {order!r}")
    return PointSet(numer, m)
