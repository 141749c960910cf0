"""Coordinate weights for the weighted L2 discrepancy.

Subsets of ``{1, ..., s}`` are encoded as bitmasks: bit ``j - 1`` stands for
coordinate ``j``.  Functions taking a subset also accept any iterable of
1-based coordinate indices.
"""

from __future__ import annotations

import json
import math
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

MAX_GENERAL_DIM = 20

PRESETS = ("unweighted", "geo09", "invsq")

__all__ = [
    "MAX_GENERAL_DIM",
    "PRESETS",
    "WeightScheme",
    "as_mask",
    "mask_to_subset",
    "preset",
    "load_weights",
]


def as_mask(u: int | Iterable[int]) -> int:
    if isinstance(u, (int, np.integer)):
        if u < 0:
            raise ValueError(f"subset mask must be nonnegative, got {u}")
        return int(u)
    mask = 0
    for j in u:
        if j < 1:
            raise ValueError(f"coordinate indices are 1-based, got {j}")
        mask |= 1 << (j - 1)
    return mask


def mask_to_subset(mask: int) -> tuple[int, ...]:
    return tuple(j + 1 for j in range(mask.bit_length()) if mask >> j & 1)


@dataclass(frozen=True)
class WeightScheme:
    """Product weights (``gammas``) or general subset weights (``entries``).

    Use :meth:`product` and :meth:`general` rather than the constructor.
    """

    s: int
    gammas: tuple[float, ...] | None = None
    entries: Mapping[int, float] | None = None
    name: str | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.s < 1:
            raise ValueError("dimension s must be at least 1")
        if (self.gammas is None) == (self.entries is None):
            raise ValueError("exactly one of gammas / entries must be given")
        if self.gammas is not None:
            if len(self.gammas) != self.s:
                raise ValueError(f"expected {self.s} product weights, got {len(self.gammas)}")
            if any(not g >= 0 for g in self.gammas):
                raise ValueError("weights must be nonnegative")
        else:
            if self.s > MAX_GENERAL_DIM:
                raise ValueError(f"general weights are limited to s <= {MAX_GENERAL_DIM}")
            full = (1 << self.s) - 1
            for mask, g in self.entries.items():
                if mask == 0 or mask & ~full:
                    raise ValueError(f"subset {mask_to_subset(mask)} is not a nonempty subset of 1..{self.s}")
                if not g >= 0:
                    raise ValueError("weights must be nonnegative")

    @classmethod
    def product(cls, gammas: Iterable[float], name: str | None = None) -> WeightScheme:
        gammas = tuple(float(g) for g in gammas)
        return cls(s=len(gammas), gammas=gammas, name=name)

    @classmethod
    def general(cls, s: int, entries: Mapping, name: str | None = None) -> WeightScheme:
        return cls(s=s, entries={as_mask(u): float(g) for u, g in entries.items()}, name=name)

    @property
    def is_product(self) -> bool:
        return self.gammas is not None

    def _mask_in_range(self, u) -> int:
        mask = as_mask(u)
        if mask >> self.s:
            raise ValueError(f"subset {mask_to_subset(mask)} exceeds dimension {self.s}")
        return mask

    def gamma(self, u) -> float:
        """``gamma_u``; the empty set has weight 1."""
        mask = self._mask_in_range(u)
        if mask == 0:
            return 1.0
        if self.is_product:
            return math.prod(self.gammas[j] for j in range(self.s) if mask >> j & 1)
        return self.entries.get(mask, 0.0)

    def gamma_tilde(self, v) -> float:
        """``sum over u containing v of gamma_u / 3^|u|``."""
        mask = self._mask_in_range(v)
        if mask == 0:
            raise ValueError("gamma_tilde needs a nonempty subset")
        if self.is_product:
            return math.prod(
                g / 3.0 if mask >> j & 1 else 1.0 + g / 3.0 for j, g in enumerate(self.gammas)
            )
        return float(self.gamma_tilde_all()[mask])

    def gamma_tilde_truncated(self, tau: int, v) -> float:
        """Derived weight restricted to the first ``tau`` coordinates (product weights only)."""
        if not self.is_product:
            raise ValueError("truncated derived weights are defined for product weights only")
        if not 1 <= tau <= self.s:
            raise ValueError(f"tau must be in [1, {self.s}]")
        mask = as_mask(v)
        if mask == 0 or mask >> tau:
            raise ValueError(f"v must be a nonempty subset of 1..{tau}")
        return math.prod(
            g / 3.0 if mask >> j & 1 else 1.0 + g / 3.0 for j, g in enumerate(self.gammas[:tau])
        )

    def gamma_array(self) -> np.ndarray:
        """Dense ``gamma_u`` indexed by subset mask (entry 0 is 0)."""
        if self.s > MAX_GENERAL_DIM:
            raise ValueError(f"dense subset arrays are limited to s <= {MAX_GENERAL_DIM}")
        out = np.zeros(1 << self.s)
        if self.is_product:
            out[0] = 1.0
            for j, g in enumerate(self.gammas):
                half = 1 << j
                out[half : 2 * half] = out[:half] * g
        else:
            for mask, g in self.entries.items():
                out[mask] = g
        out[0] = 0.0
        return out

    def gamma_tilde_all(self) -> np.ndarray:
        """Dense ``gamma_tilde_v`` by subset mask via a superset-sum sweep."""
        return self._gamma_tilde_dense

    @cached_property
    def _gamma_tilde_dense(self) -> np.ndarray:
        g = self.gamma_array()
        popcount = np.zeros(1 << self.s, dtype=np.int64)
        for j in range(self.s):
            half = 1 << j
            popcount[half : 2 * half] = popcount[:half] + 1
        t = g / 3.0**popcount
        for j in range(self.s):
            # superset sum: t[v] += t[v | bit j] for every v lacking bit j
            t = t.reshape(-1, 2, 1 << j)
            t[:, 0, :] += t[:, 1, :]
            t = t.reshape(-1)
        t[0] = 0.0
        t.flags.writeable = False
        return t

    def to_general(self) -> WeightScheme:
        g = self.gamma_array()
        entries = {int(mask): float(g[mask]) for mask in np.flatnonzero(g)}
        return WeightScheme(s=self.s, entries=entries, name=self.name)

    def truncate(self, s: int) -> WeightScheme:
        """Product weights of the first ``s`` coordinates."""
        if not self.is_product:
            raise ValueError("only product weights truncate to fewer coordinates")
        return WeightScheme(s=s, gammas=self.gammas[:s], name=self.name)

    def scaled(self, c: float) -> WeightScheme:
        """Every ``gamma_u`` (u nonempty) multiplied by ``c``."""
        g = self.gamma_array() * c
        entries = {int(mask): float(g[mask]) for mask in np.flatnonzero(g)}
        return WeightScheme(s=self.s, entries=entries)

    def to_json(self) -> dict:
        if self.is_product:
            doc = {"type": "product", "gammas": list(self.gammas)}
        else:
            doc = {
                "type": "general",
                "s": self.s,
                "entries": [
                    {"subset": list(mask_to_subset(mask)), "gamma": g}
                    for mask, g in sorted(self.entries.items())
                ],
            }
        if self.name:
            doc["name"] = self.name
        return doc

    @classmethod
    def from_json(cls, doc: Mapping) -> WeightScheme:
        kind = doc.get("type")
        if kind == "product":
            return cls.product(doc["gammas"], name=doc.get("name"))
        if kind == "general":
            entries = {}
            for item in doc["entries"]:
                mask = as_mask(item["subset"])
                if mask in entries:
                    raise ValueError(f"duplicate subset {item['subset']}")
                entries[mask] = float(item["gamma"])
            return cls(s=int(doc["s"]), entries=entries, name=doc.get("name"))
        raise ValueError(f"unknown weight type {kind!r}; expected 'product' or 'general'")


def preset(name: str, s: int) -> WeightScheme:
    """The three product-weight families used in the reference experiments."""
    if name == "unweighted":
        gammas = [1.0] * s
    elif name == "geo09":
        gammas = [0.9**j for j in range(1, s + 1)]
    elif name == "invsq":
        gammas = [1.0 / j**2 for j in range(1, s + 1)]
    else:
        raise ValueError(f"unknown weight preset {name!r}; choose from {', '.join(PRESETS)}")
    return WeightScheme.product(gammas, name=name)


def load_weights(spec: str, s: int | None = None) -> WeightScheme:
    """Preset name or path to a weights JSON document."""
    if spec in PRESETS:
        if s is None:
            raise ValueError(f"preset {spec!r} needs a dimension")
        return preset(spec, s)
    doc = json.loads(Path(spec).read_text())
    w = WeightScheme.from_json(doc)
    if s is not None and w.s != s:
        if w.is_product and w.s > s:
            return w.truncate(s)
        raise ValueError(f"weights file has s={w.s}, expected {s}")
    return w
