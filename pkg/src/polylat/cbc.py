"""Component-by-component construction of polynomial lattice rules.

At step ``tau`` the first ``tau - 1`` polynomials are fixed and ``q_tau`` is
chosen among all ``2^m - 1`` nonzero polynomials of degree below ``m`` to
minimize the criterion of the first ``tau`` coordinates.  Only the new term

    theta(q) = sum_n G_n phi_tilde(x_(n,tau)(q))

depends on ``q``; ``G_n`` is the per-point accumulator of the earlier
coordinates (a running product for product weights, a subset sum for general
weights).  The naive sweep computes ``theta`` for every candidate from
bit-length class sums, ``O(4^m)`` per step.  The fast sweep writes nonzero
``n`` and ``q`` as powers ``g^a`` and ``g^b`` of a generator of the unit
group, so ``x_(n,tau)`` depends on ``a + b mod 2^m - 1`` only and ``theta`` is
one cyclic correlation, ``O(m 2^m)`` with an FFT.

Both sweeps rescore their finalists with the same class-sum kernel and break
ties by the smallest bitmask, so they return identical rules.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np

from . import _kernels, gf2poly
from .discrepancy import (
    bit_classes,
    combine_classes,
    general_accumulator,
    general_steps,
    mean_square_by_dimension,
    phi_table,
    phi_tilde_table,
)
from .lattice import PolyLatticeRule, generate_points
from .weights import WeightScheme, preset

__all__ = [
    "CbcResult",
    "CbcState",
    "cbc_construct",
    "cbc_construct_product",
    "cbc_construct_general",
    "theorem_bound",
    "tractability_ratios",
    "exhaustive_best",
    "MAX_GENERAL_CBC_DIM",
    "EXHAUSTIVE_BUDGET",
]

MAX_GENERAL_CBC_DIM = 12
EXHAUSTIVE_BUDGET = 10**7
AUTO_FAST_FROM = 11  # mode="auto" switches to the FFT sweep for m >= this

TIE_BAND = 1e-13  # relative to the score scale sum_n |G_n| / 2
SHORTLIST_BAND = 1e-9  # FFT scores within this of the minimum are rescored


@dataclass
class CbcResult:
    rule: PolyLatticeRule
    B: list[float]
    weights: WeightScheme
    mode: str

    def to_json(self) -> dict:
        doc = self.rule.to_json()
        doc["weights"] = self.weights.to_json()
        doc["B"] = list(self.B)
        doc["mode"] = self.mode
        return doc


def _resolve_modulus(m: int, p: int | None) -> int:
    if m < 1 or m > 30:
        raise ValueError("m must be in [1, 30]")
    if p is None:
        return gf2poly.find_irreducible(m)
    if gf2poly.degree(p) != m:
        raise ValueError(f"modulus {p:#x} does not have degree {m}")
    if not gf2poly.is_irreducible(p):
        raise ValueError(f"modulus {p:#x} is reducible")
    return p


def _resolve_mode(mode: str, m: int) -> str:
    if mode == "auto":
        return "fast" if m >= AUTO_FAST_FROM else "naive"
    if mode not in ("naive", "fast"):
        raise ValueError(f"unknown mode {mode!r}")
    return mode


class _UnitGroup:
    """Powers of a unit-group generator and the class of ``v_m(g^c / p)``."""

    def __init__(self, p: int, m: int, table):
        self.order = (1 << m) - 1
        g = gf2poly.unit_group_generator(p)
        pw = np.empty(self.order, dtype=np.uint64)
        pw[0] = 1
        filled = 1
        while filled < self.order:
            step = min(filled, self.order - filled)
            h = gf2poly.pow_mod(g, filled, p)
            pw[filled : filled + step] = gf2poly.mul_mod_array(pw[:step], h, p)
            filled += step
        self.powers = pw
        numer = np.zeros(self.order, dtype=np.uint64)
        for t in range(m):
            bit = (pw >> np.uint64(t)) & np.uint64(1)
            numer ^= bit * np.uint64(table[t])
        self.phit = phi_tilde_table(m)[bit_classes(numer)]
        self._phit_fft = np.fft.rfft(self.phit)

    def correlate(self, weights: np.ndarray) -> np.ndarray:
        """``out[q - 1] = sum_n weights[n] phi_tilde(v_m(n q / p))`` up to rounding."""
        a = weights[self.powers.astype(np.int64)]
        corr = np.fft.irfft(np.conj(np.fft.rfft(a)) * self._phit_fft, n=self.order)
        out = np.empty(self.order)
        out[self.powers.astype(np.int64) - 1] = corr
        return out + 0.5 * weights[0]


class CbcState:
    """Rule under construction and the per-point accumulator of its coordinates."""

    def __init__(self, m: int, w: WeightScheme, p: int | None = None):
        self.m = m
        self.p = _resolve_modulus(m, p)
        self.w = w
        self.table = np.array(gf2poly.vm_table(self.p, m, 2 * m - 1), dtype=np.uint64)
        self.n_points = 1 << m
        self.candidates = np.arange(1, self.n_points, dtype=np.uint64)
        self.q: list[int] = []
        self.columns: list[np.ndarray] = []
        self.acc = np.ones(self.n_points)  # product weights only
        self._gt = None if w.is_product else w.gamma_tilde_all()
        self._group = None

    @property
    def tau(self) -> int:
        return len(self.q)

    def column(self, q: int) -> np.ndarray:
        cols = _columns(self.table, self.m, q)
        return _kernels.span(cols, self.m)

    def weights_for_next(self) -> np.ndarray:
        """``G_n`` for the coordinate about to be chosen."""
        if self.w.is_product:
            return self.acc
        tau = self.tau + 1
        if tau == 1:
            return np.full(self.n_points, self._gt[1])
        phit_vals = phi_tilde_table(self.m)[bit_classes(np.stack(self.columns, axis=1))]
        return general_accumulator(phit_vals, self._gt, tau)

    def _raw_scores(self, weights: np.ndarray, candidates: np.ndarray) -> np.ndarray:
        sums = _kernels.class_sums(weights, self.table, self.m, candidates)
        return combine_classes(sums, self.m)

    def candidate_scores(self) -> np.ndarray:
        """``theta(q) / N`` for every candidate ``q = 1 .. 2^m - 1`` (entry ``q - 1``)."""
        weights = self.weights_for_next()
        return self._raw_scores(weights, self.candidates) * self._theta_factor() / self.n_points

    def fast_scores(self) -> np.ndarray:
        """FFT version of :meth:`candidate_scores` (equal up to rounding)."""
        weights = self.weights_for_next()
        return self._group_for().correlate(weights) * self._theta_factor() / self.n_points

    def _group_for(self) -> _UnitGroup:
        if self._group is None:
            self._group = _UnitGroup(self.p, self.m, self.table)
        return self._group

    def _theta_factor(self) -> float:
        if self.w.is_product:
            return self.w.gammas[self.tau] / 3.0
        return 1.0

    def choose(self, mode: str = "naive") -> int:
        tau = self.tau + 1
        if tau == 1:
            return 1
        if self.w.is_product and self.w.gammas[tau - 1] == 0.0:
            return 1
        weights = self.weights_for_next()
        scale = 0.5 * float(np.abs(weights).sum())
        if scale == 0.0:
            return 1
        if mode == "fast" and self.m >= 2:
            approx = self._group_for().correlate(weights)
            finalists = np.flatnonzero(approx <= approx.min() + SHORTLIST_BAND * scale) + 1
            cands = finalists.astype(np.uint64)
        else:
            cands = self.candidates
        raw = self._raw_scores(weights, cands)
        ties = np.flatnonzero(raw <= raw.min() + TIE_BAND * scale)
        return int(cands[ties].min())

    def append(self, q: int) -> None:
        col = self.column(q)
        if self.w.is_product:
            g = self.w.gammas[self.tau]
            self.acc = self.acc * (1.0 + g * phi_table(self.m)[bit_classes(col)])
        self.q.append(int(q))
        self.columns.append(col)

    def regenerate_accumulator(self) -> np.ndarray:
        """Product accumulator recomputed from the rule, for integrity checks."""
        acc = np.ones(self.n_points)
        ph = phi_table(self.m)
        for g, col in zip(self.w.gammas, self.columns):
            acc = acc * (1.0 + g * ph[bit_classes(col)])
        return acc

    def rule(self, meta: dict | None = None) -> PolyLatticeRule:
        return PolyLatticeRule(self.p, tuple(self.q), self.m, dict(meta or {}))


def _columns(table, m, q):
    out = []
    for i in range(m):
        c = 0
        for k in range(m):
            if q >> k & 1:
                c ^= int(table[i + k])
        out.append(c)
    return out


def _check_gammas(gammas: Sequence[float]) -> list[float]:
    g = [float(x) for x in gammas]
    if not g:
        raise ValueError("need at least one weight")
    if any(not math.isfinite(x) or x < 0 for x in g):
        raise ValueError("weights must be finite and nonnegative")
    return g


def _run(state: CbcState, s: int, mode: str) -> None:
    for _ in range(s):
        state.append(state.choose(mode))


def cbc_construct_product(
    m: int, s: int, gammas: Sequence[float], p: int | None = None, mode: str = "auto"
) -> CbcResult:
    """CBC search with product weights ``gammas[:s]``.

    ``B[tau - 1]`` is the criterion of the first ``tau`` coordinates with the
    weights ``gamma_1 .. gamma_tau``.
    """
    if s < 1:
        raise ValueError("s must be at least 1")
    g = _check_gammas(gammas)
    if len(g) < s:
        raise ValueError(f"need {s} weights, got {len(g)}")
    w = WeightScheme.product(g[:s])
    mode = _resolve_mode(mode, m)
    state = CbcState(m, w, p)
    _run(state, s, mode)
    rule = state.rule()
    B = mean_square_by_dimension(generate_points(rule), w)
    return CbcResult(rule, B, w, mode)


def cbc_construct_general(m: int, s: int, w: WeightScheme, p: int | None = None) -> CbcResult:
    """CBC search scoring with the derived weights of the full dimension ``s``.

    Because those weights depend on ``s``, a rule built for ``s`` is not in
    general a prefix of the rule built for ``s + 1``.
    """
    if w.is_product:
        raise ValueError("product weights: use cbc_construct_product")
    if s != w.s:
        raise ValueError(f"weights are for s={w.s}, asked for s={s}")
    if s > MAX_GENERAL_CBC_DIM:
        raise ValueError(f"general-weight CBC is limited to s <= {MAX_GENERAL_CBC_DIM}")
    if any(v < 0 for v in w.gamma_array()):
        raise ValueError("weights must be nonnegative")
    state = CbcState(m, w, p)
    _run(state, s, "naive")
    rule = state.rule()
    B = mean_square_by_dimension(generate_points(rule), w)
    return CbcResult(rule, B, w, "naive")


def cbc_construct(m: int, w: WeightScheme, p: int | None = None, mode: str = "auto") -> CbcResult:
    if w.is_product:
        return cbc_construct_product(m, w.s, w.gammas, p, mode)
    return cbc_construct_general(m, w.s, w, p)


def _check_lambda(lam: float) -> None:
    if not 0.5 < lam <= 1.0:
        raise ValueError("lambda must be in (1/2, 1]")


def theorem_bound(w: WeightScheme, tau: int, m: int, lam: float, form: str = "auto") -> float:
    """Upper bound on the criterion of the first ``tau`` coordinates of a CBC rule.

    ``form``: ``"subsets"`` sums ``gamma_tilde_v^lam / (4^lam - 2)^|v|`` over
    ``v`` in ``{1..tau}`` (general weights use the full-dimension derived
    weights, product weights the truncated ones); ``"exact"`` is the same sum
    for product weights in product form; ``"closed"`` is the looser product
    bound ``prod(1 + c (gamma_j/3)^lam) - prod(1 + gamma_j/3)^lam`` with
    ``c = (4^lam - 1) / (4^lam - 2)``.  ``"auto"`` picks ``"closed"`` for
    product weights and ``"subsets"`` otherwise.
    """
    _check_lambda(lam)
    if not 1 <= tau <= w.s:
        raise ValueError(f"tau must be in [1, {w.s}]")
    d = 4.0**lam - 2.0
    if form == "auto":
        form = "closed" if w.is_product else "subsets"
    if form in ("exact", "closed"):
        if not w.is_product:
            raise ValueError(f"form {form!r} needs product weights")
        g = [x / 3.0 for x in w.gammas[:tau]]
        base = math.prod((1.0 + x) ** lam for x in g)
        if form == "exact":
            top = math.prod(x**lam / d + (1.0 + x) ** lam for x in g)
        else:
            c = (4.0**lam - 1.0) / d
            top = math.prod(1.0 + c * x**lam for x in g)
        inner = top - base
    elif form == "subsets":
        if w.is_product:
            terms = [w.gamma_tilde_truncated(tau, v) ** lam / d ** bin(v).count("1") for v in range(1, 1 << tau)]
        else:
            gt = w.gamma_tilde_all()
            terms = [gt[v] ** lam / d ** bin(v).count("1") for v in range(1, 1 << tau)]
        inner = math.fsum(terms)
    else:
        raise ValueError(f"unknown form {form!r}")
    return max(inner, 0.0) ** (1.0 / lam) / ((1 << m) - 1) ** (1.0 / lam)


def _weights_for(weights, s: int) -> WeightScheme:
    if isinstance(weights, str):
        return preset(weights, s)
    if callable(weights):
        return weights(s)
    return WeightScheme.product(list(weights)[:s])


def tractability_ratios(
    weights: str | Sequence[float] | Callable[[int], WeightScheme],
    lam: float,
    s_max: int,
    form: str = "general",
) -> list[float]:
    """The ratio whose supremum over ``s`` governs strong tractability, for
    ``s = 1 .. s_max``.

    ``weights`` is a preset name, a sequence of product weights, or a
    function returning the scheme for dimension ``s``.  ``form="general"``
    evaluates ``[sum_u (gamma_u/3^|u|)^lam (c^|u| - 1)]^(1/lam) / sum_u gamma_u/3^|u|``;
    ``form="product"`` is the product-weight variant
    ``[prod(1 + c (gamma_j/3)^lam) - prod(1 + gamma_j/3)^lam]^(1/lam) / (prod(1 + gamma_j/3) - 1)``.
    """
    _check_lambda(lam)
    if s_max < 1:
        raise ValueError("s_max must be at least 1")
    c = (4.0**lam - 1.0) / (4.0**lam - 2.0)
    out = []
    for s in range(1, s_max + 1):
        w = _weights_for(weights, s)
        if form == "product" or (form == "general" and w.is_product):
            if not w.is_product:
                raise ValueError("form 'product' needs product weights")
            g = [x / 3.0 for x in w.gammas[:s]]
            den = math.prod(1.0 + x for x in g) - 1.0
            if form == "product":
                num = math.prod(1.0 + c * x**lam for x in g) - math.prod((1.0 + x) ** lam for x in g)
            else:
                num = math.prod(1.0 + c * x**lam for x in g) - math.prod(1.0 + x**lam for x in g)
        elif form == "general":
            gam = w.gamma_array()
            sizes = [bin(u).count("1") for u in range(len(gam))]
            num = math.fsum((gam[u] / 3.0 ** sizes[u]) ** lam * (c ** sizes[u] - 1.0) for u in range(1, len(gam)))
            den = math.fsum(gam[u] / 3.0 ** sizes[u] for u in range(1, len(gam)))
        else:
            raise ValueError(f"unknown form {form!r}")
        out.append(max(num, 0.0) ** (1.0 / lam) / den if den > 0 else 0.0)
    return out


def exhaustive_best(m: int, w: WeightScheme, p: int | None = None) -> CbcResult:
    """Global minimizer of the criterion over all vectors with ``q_1 = 1``.

    Vectors are visited in lexicographic order and replaced only on a strict
    improvement beyond the tie band, so the smallest minimizer wins.
    """
    s = w.s
    if ((1 << m) - 1) ** s > EXHAUSTIVE_BUDGET:
        raise ValueError(f"(2^m - 1)^s exceeds the budget of {EXHAUSTIVE_BUDGET}")
    state = CbcState(m, w, p)
    state.append(1)
    if s == 1:
        rule = state.rule()
        return CbcResult(rule, mean_square_by_dimension(generate_points(rule), w), w, "exhaustive")
    n = state.n_points
    gt = None if w.is_product else w.gamma_tilde_all()
    best_value = math.inf
    best_q: tuple[int, ...] = ()
    for middle in itertools.product(range(1, n), repeat=s - 2):
        trial = CbcState(m, w, state.p)
        for qj in (1, *middle):
            trial.append(qj)
        numer = np.stack(trial.columns, axis=1)
        if w.is_product:
            head = _product_prefix(numer, w.gammas, m)
            totals = (1.0 + w.gammas[s - 1] / 3.0) * head + trial.candidate_scores()
        else:
            totals = general_steps(numer, m, gt)[-1] + trial.candidate_scores()
        i = int(np.argmin(totals))
        if math.isfinite(best_value) and not totals[i] < best_value - TIE_BAND * abs(best_value):
            continue
        ties = np.flatnonzero(totals <= totals[i] + TIE_BAND * abs(totals[i]))
        best_value = float(totals[i])
        best_q = (1, *middle, int(ties.min()) + 1)
    rule = PolyLatticeRule(state.p, best_q, m)
    return CbcResult(rule, mean_square_by_dimension(generate_points(rule), w), w, "exhaustive")


def _product_prefix(numer, gammas, m) -> float:
    n = numer.shape[0]
    ph = phi_table(m)
    acc = np.ones(n)
    b = 0.0
    for j in range(numer.shape[1]):
        g = gammas[j]
        sums = np.bincount(bit_classes(numer[:, j]), weights=acc, minlength=m + 1)
        b = (1.0 + g / 3.0) * b + (g / 3.0) * float(combine_classes(sums, m)[0]) / n
        acc = acc * (1.0 + g * ph[bit_classes(numer[:, j])])
    return b
