import math

import numpy as np
import pytest

from polylat import gf2poly
from polylat.cbc import (
    CbcState,
    cbc_construct,
    cbc_construct_general,
    cbc_construct_product,
    exhaustive_best,
    theorem_bound,
    tractability_ratios,
)
from polylat.discrepancy import mean_square_criterion
from polylat.lattice import PolyLatticeRule, generate_points
from polylat.weights import PRESETS, WeightScheme, preset

LAMBDAS = [0.55 + 0.05 * i for i in range(10)]


@pytest.mark.parametrize("m", [1, 2, 5, 9])
@pytest.mark.parametrize("g", [1.0, 0.9, 0.25])
def test_one_dimension(m, g):
    res = cbc_construct_product(m, 1, [g])
    assert res.rule.q == (1,)
    assert res.B == [g / 3 / 2 ** (2 * m + 1)]
    gen = cbc_construct_general(m, 1, WeightScheme.general(1, {(1,): g}))
    assert gen.rule.q == (1,) and gen.B == res.B


@pytest.mark.parametrize("m", [2, 5, 8, 11])
def test_fft_scores_match_class_sums(m):
    w = preset("geo09", 4)
    state = CbcState(m, w)
    for q in (1, 3, 5):
        state.append(q % (1 << m) or 1)
    np.testing.assert_allclose(state.fast_scores(), state.candidate_scores(), rtol=1e-10, atol=1e-14)


@pytest.mark.parametrize("m", [1, 2, 3, 6, 10, 12])
def test_fast_equals_naive_random_weights(m):
    rng = np.random.default_rng(m)
    gam = rng.uniform(0, 2, 8)
    a = cbc_construct_product(m, 8, gam, mode="naive")
    b = cbc_construct_product(m, 8, gam, mode="fast")
    assert a.rule.q == b.rule.q
    assert a.B == b.B


def independent_step_scores(rule_prefix, w, tau, m):
    """Criterion of the first tau coordinates for every candidate, via the literal product formula."""
    out = []
    wt = WeightScheme.product(w.gammas[:tau]) if w.is_product else w
    for q in range(1, 1 << m):
        rule = PolyLatticeRule(rule_prefix.p, (*rule_prefix.q[: tau - 1], q), m)
        ps = generate_points(rule)
        if w.is_product:
            out.append(mean_square_criterion(ps, wt, "direct"))
        else:
            gt = w.gamma_tilde_all()
            phit = np.where(ps.numerators == 0, 0.5, 0.0)
            from polylat.discrepancy import phi_tilde_table, bit_classes

            phit = phi_tilde_table(m)[bit_classes(ps.numerators)]
            total = 0.0
            for v in range(1, 1 << tau):
                cols = [j for j in range(tau) if v >> j & 1]
                total += gt[v] * phit[:, cols].prod(axis=1).mean()
            out.append(total)
    return np.array(out)


@pytest.mark.parametrize("name", PRESETS)
def test_per_step_argmin_reverified(name):
    m, s = 5, 4
    w = preset(name, s)
    res = cbc_construct_product(m, s, w.gammas)
    for tau in range(2, s + 1):
        scores = independent_step_scores(res.rule, w, tau, m)
        chosen = scores[res.rule.q[tau - 1] - 1]
        assert chosen <= scores.min() + 1e-12 * abs(scores.min())
        assert res.B[tau - 1] == pytest.approx(chosen, rel=1e-10)


def test_general_argmin_reverified():
    m = 4
    w = WeightScheme.general(3, {(1,): 1.0, (2,): 0.5, (1, 3): 0.8, (2, 3): 0.3, (1, 2, 3): 0.1})
    res = cbc_construct_general(m, 3, w)
    for tau in (2, 3):
        scores = independent_step_scores(res.rule, w, tau, m)
        assert scores[res.rule.q[tau - 1] - 1] <= scores.min() + 1e-12 * abs(scores.min())
        assert res.B[tau - 1] == pytest.approx(scores[res.rule.q[tau - 1] - 1], rel=1e-10)


@pytest.mark.parametrize("name", PRESETS)
def test_averaging_bound_each_step(name):
    m, s = 7, 6
    w = preset(name, s)
    state = CbcState(m, w)
    state.append(1)
    for _ in range(1, s):
        scores = state.candidate_scores()
        q = state.choose("naive")
        assert scores[q - 1] <= scores.mean()
        assert scores[q - 1] <= scores.min() + 1e-13 * np.abs(scores).max()
        state.append(q)


def test_incremental_accumulator_integrity():
    w = preset("geo09", 10)
    state = CbcState(9, w)
    for _ in range(10):
        state.append(state.choose("fast"))
        np.testing.assert_allclose(state.acc, state.regenerate_accumulator(), rtol=1e-12)


@pytest.mark.parametrize("s", [2, 4, 8])
def test_general_path_matches_product_path(s):
    m = 6
    w = preset("geo09", s)
    a = cbc_construct_product(m, s, w.gammas)
    b = cbc_construct_general(m, s, w.to_general())
    assert b.B[-1] == pytest.approx(a.B[-1], rel=1e-12)


def test_all_zero_general_weights():
    w = WeightScheme.general(3, {})
    res = cbc_construct_general(5, 3, w)
    assert res.rule.q == (1, 1, 1)
    assert res.B == [0.0, 0.0, 0.0]
    res = cbc_construct_product(5, 3, [0.0, 0.0, 0.0], mode="fast")
    assert res.rule.q == (1, 1, 1)


@pytest.mark.parametrize("m,s", [(3, 2), (4, 2), (4, 3)])
@pytest.mark.parametrize("name", PRESETS)
def test_exhaustive_versus_cbc(m, s, name):
    w = preset(name, s)
    ex = exhaustive_best(m, w)
    cb = cbc_construct(m, w)
    assert ex.rule.q[0] == 1
    assert ex.B[-1] <= cb.B[-1] * (1 + 1e-12)
    for lam in LAMBDAS:
        assert cb.B[-1] <= theorem_bound(w, s, m, lam)


def test_exhaustive_one_dimension_and_budget():
    w = preset("unweighted", 1)
    assert exhaustive_best(6, w).rule.q == (1,)
    assert exhaustive_best(6, w).B == cbc_construct(6, w).B
    with pytest.raises(ValueError):
        exhaustive_best(8, preset("unweighted", 3))


def test_exhaustive_brute_force_agrees():
    m, s = 3, 3
    w = preset("geo09", s)
    p = gf2poly.find_irreducible(m)
    best = min(
        (mean_square_criterion(generate_points(PolyLatticeRule(p, (1, a, b), m)), w, "direct"), (1, a, b))
        for a in range(1, 8)
        for b in range(1, 8)
    )
    ex = exhaustive_best(m, w)
    assert ex.B[-1] == pytest.approx(best[0], rel=1e-10)


def test_theorem_bound_examples():
    w = WeightScheme.product([1.0])
    assert theorem_bound(w, 1, 4, 1.0) == pytest.approx(1 / 90, rel=1e-14)
    assert cbc_construct(4, w).B[0] <= 1 / 90
    assert theorem_bound(w, 1, 4, 0.5 + 1e-6) > 1e3
    for lam in (0.5, 1.01):
        with pytest.raises(ValueError):
            theorem_bound(w, 1, 4, lam)


@pytest.mark.parametrize("s", [1, 3, 8])
def test_bound_forms_ordered(s):
    w = WeightScheme.product(np.random.default_rng(s).uniform(0, 2, s))
    for lam in LAMBDAS:
        for tau in range(1, s + 1):
            exact = theorem_bound(w, tau, 6, lam, "exact")
            assert theorem_bound(w, tau, 6, lam, "subsets") == pytest.approx(exact, rel=1e-10)
            assert theorem_bound(w, tau, 6, lam, "closed") >= exact * (1 - 1e-12)


def test_general_bound_matches_product_at_full_dimension():
    w = preset("invsq", 4)
    for lam in LAMBDAS:
        assert theorem_bound(w.to_general(), 4, 7, lam) == pytest.approx(theorem_bound(w, 4, 7, lam, "exact"), rel=1e-10)


def test_tractability_examples():
    ratios = tractability_ratios("invsq", 1.0, 50)
    assert all(math.isfinite(r) for r in ratios)
    tail = ratios[-10:]
    assert (max(tail) - min(tail)) / max(tail) < 0.01
    flat = tractability_ratios("unweighted", 1.0, 20)
    assert all(b > a for a, b in zip(flat, flat[1:]))
    lam, g = 0.7, 0.6
    c = (4**lam - 1) / (4**lam - 2)
    gt = g / 3
    expect = (gt**lam * c - gt**lam) ** (1 / lam) / (g / 3)
    assert tractability_ratios([g], lam, 1)[0] == pytest.approx(expect, rel=1e-13)
    general = tractability_ratios(lambda s: preset("geo09", s).to_general(), 0.8, 6)
    assert general == pytest.approx(tractability_ratios("geo09", 0.8, 6), rel=1e-10)
    assert tractability_ratios("geo09", 0.8, 3, form="product")[0] > 0
    with pytest.raises(ValueError):
        tractability_ratios("geo09", 0.4, 3)


def test_errors():
    with pytest.raises(ValueError):
        cbc_construct_product(4, 2, [1.0, -1.0])
    with pytest.raises(ValueError):
        cbc_construct_product(4, 2, [1.0], p=0b10011)
    with pytest.raises(ValueError):
        cbc_construct_product(4, 1, [1.0], p=0b10001)
    with pytest.raises(ValueError):
        cbc_construct_product(4, 1, [1.0], mode="turbo")
    with pytest.raises(ValueError):
        cbc_construct_general(4, 2, preset("geo09", 2))
    with pytest.raises(ValueError):
        cbc_construct_general(4, 13, WeightScheme.general(13, {(1,): 1.0}))


def test_explicit_modulus_is_used():
    p = 0b11001  # x^4 + x^3 + 1
    res = cbc_construct_product(4, 3, [1.0, 1.0, 1.0], p=p)
    assert res.rule.p == p


@pytest.mark.parametrize("m", range(1, 16))
def test_rate_one_dimension(m):
    b = cbc_construct_product(m, 1, [1.0]).B[0]
    b_next = cbc_construct_product(m + 1, 1, [1.0]).B[0]
    assert b_next * 4 == b


@pytest.mark.parametrize("name", PRESETS)
@pytest.mark.parametrize("s", [2, 5])
def test_rate_low_dimension(name, s):
    bs = [cbc_construct_product(m, s, preset(name, s).gammas, mode="fast").B[-1] for m in range(8, 15)]
    slope = np.polyfit(np.arange(8, 15), np.log2(bs), 1)[0]
    assert -2.15 <= slope <= -1.6
