"""Polynomial lattice point sets and their dual lattices."""

from __future__ import annotations

import csv
import io
import json
from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import gf2poly
from ._kernels import span

__all__ = ["PolyLatticeRule", "PointSet", "generate_points", "iter_rows", "in_dual_lattice", "generator_columns"]


@dataclass(frozen=True)
class PolyLatticeRule:
    """Modulus ``p`` (irreducible, degree ``m``) and generating vector ``q``."""

    p: int
    q: tuple[int, ...]
    m: int
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "q", tuple(int(qj) for qj in self.q))
        if self.m < 1 or gf2poly.degree(self.p) != self.m:
            raise ValueError(f"modulus {self.p:#x} must have degree m={self.m}")
        if not gf2poly.is_irreducible(self.p):
            raise ValueError(f"modulus {self.p:#x} is reducible")
        if not self.q:
            raise ValueError("generating vector is empty")
        for j, qj in enumerate(self.q, start=1):
            if qj <= 0 or gf2poly.degree(qj) >= self.m:
                raise ValueError(f"q_{j} = {qj:#x} must be nonzero with degree < {self.m}")

    @property
    def s(self) -> int:
        return len(self.q)

    @property
    def n_points(self) -> int:
        return 1 << self.m

    def prefix(self, s: int) -> PolyLatticeRule:
        return PolyLatticeRule(self.p, self.q[:s], self.m)

    def to_json(self) -> dict:
        doc = {"m": self.m, "s": self.s, "p": gf2poly.to_hex(self.p), "q": [gf2poly.to_hex(qj) for qj in self.q]}
        doc.update(self.meta)
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> PolyLatticeRule:
        q = [gf2poly.from_hex(h) for h in doc["q"]]
        if "s" in doc and int(doc["s"]) != len(q):
            raise ValueError(f"rule declares s={doc['s']} but lists {len(q)} polynomials")
        meta = {k: v for k, v in doc.items() if k not in ("m", "p", "q", "s")}
        return cls(gf2poly.from_hex(doc["p"]), tuple(q), int(doc["m"]), meta)

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=2) + "\n")

    @classmethod
    def load(cls, path) -> PolyLatticeRule:
        return cls.from_json(json.loads(Path(path).read_text()))


@dataclass(frozen=True, eq=False)
class PointSet:
    """``N x s`` matrix of numerators; coordinate value is ``numer / 2^precision``."""

    numerators: np.ndarray
    precision: int

    def __post_init__(self):
        a = np.ascontiguousarray(self.numerators, dtype=np.uint64)
        if a.ndim != 2:
            raise ValueError("point set must be a 2-D array")
        if not 0 <= self.precision <= 63:
            raise ValueError("precision must be in [0, 63]")
        if a.size and int(a.max()) >> self.precision:
            raise ValueError(f"numerators exceed precision {self.precision}")
        a.flags.writeable = False
        object.__setattr__(self, "numerators", a)

    @property
    def n_points(self) -> int:
        return self.numerators.shape[0]

    @property
    def s(self) -> int:
        return self.numerators.shape[1]

    def as_float(self) -> np.ndarray:
        if self.precision > 53:
            # drop digits a double cannot hold
            shift = np.uint64(self.precision - 53)
            return (self.numerators >> shift).astype(np.float64) / 2.0**53
        return self.numerators.astype(np.float64) / 2.0**self.precision

    def project(self, coords: Sequence[int]) -> PointSet:
        """Columns for 1-based coordinate indices ``coords``."""
        return PointSet(self.numerators[:, [j - 1 for j in coords]], self.precision)

    def refine(self, precision: int) -> PointSet:
        """Same points written with more digits (zero padded)."""
        if precision < self.precision:
            raise ValueError("cannot refine to fewer digits")
        return PointSet(self.numerators << np.uint64(precision - self.precision), precision)

    def to_json(self) -> dict:
        return {"precision": self.precision, "numerators": self.numerators.tolist()}

    @classmethod
    def from_json(cls, doc: dict) -> PointSet:
        numer = np.array(doc["numerators"], dtype=np.uint64).reshape(len(doc["numerators"]), -1)
        return cls(numer, int(doc["precision"]))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow([f"x{j}" for j in range(1, self.s + 1)])
        for row in self.as_float():
            writer.writerow([repr(float(v)) for v in row])
        return buf.getvalue()

    def save(self, path) -> None:
        path = Path(path)
        if path.suffix == ".csv":
            path.write_text(self.to_csv())
        else:
            path.write_text(json.dumps(self.to_json()) + "\n")

    @classmethod
    def load(cls, path) -> PointSet:
        path = Path(path)
        if path.suffix == ".csv":
            raise ValueError("CSV point files are lossy; load the JSON form")
        return cls.from_json(json.loads(path.read_text()))


def generator_columns(p: int, q: int, m: int) -> list[int]:
    """Column ``i`` is the numerator of ``v_m(x^i q / p)``; the coordinate of
    point ``n`` is the XOR of the columns selected by the bits of ``n``."""
    table = gf2poly.vm_table(p, m, 2 * m - 1)
    cols = []
    for i in range(m):
        c = 0
        for k in range(m):
            if q >> k & 1:
                c ^= table[i + k]
        cols.append(c)
    return cols


def generate_points(rule: PolyLatticeRule) -> PointSet:
    numer = np.empty((rule.n_points, rule.s), dtype=np.uint64)
    for j, qj in enumerate(rule.q):
        numer[:, j] = span(generator_columns(rule.p, qj, rule.m), rule.m)
    return PointSet(numer, rule.m)


def iter_rows(rule: PolyLatticeRule, chunk: int = 1 << 16) -> Iterator[np.ndarray]:
    """Point numerators in blocks of ``chunk`` rows, for rules too large to hold."""
    cols = np.array([generator_columns(rule.p, qj, rule.m) for qj in rule.q], dtype=np.uint64)
    for start in range(0, rule.n_points, chunk):
        n = np.arange(start, min(start + chunk, rule.n_points), dtype=np.uint64)
        block = np.zeros((n.size, rule.s), dtype=np.uint64)
        for i in range(rule.m):
            bit = (n >> np.uint64(i)) & np.uint64(1)
            block ^= bit[:, None] * cols[:, i][None, :]
        yield block


def in_dual_lattice(k: Sequence[int], rule: PolyLatticeRule) -> bool:
    """Whether ``sum_j tr_m(k_j) q_j = 0 mod p``."""
    if len(k) != rule.s:
        raise ValueError(f"expected {rule.s} indices, got {len(k)}")
    low = (1 << rule.m) - 1
    total = 0
    for kj, qj in zip(k, rule.q):
        if kj < 0:
            raise ValueError("dual indices must be nonnegative")
        total ^= gf2poly.mul(kj & low, qj)
    return gf2poly.poly_mod(total, rule.p) == 0
