import numpy as np
import pytest

from polylat import _kernels, _pykernels, gf2poly
from polylat.discrepancy import bit_classes


def brute_class_sums(weights, p, m, candidates):
    out = np.zeros((len(candidates), m + 1))
    for c, q in enumerate(candidates):
        for n in range(1 << m):
            a = gf2poly.laurent_truncate_vm(n, int(q), p, m)
            out[c, a.bit_length()] += weights[n]
    return out


@pytest.mark.parametrize("m", [1, 2, 5, 7])
def test_class_sums_against_brute_force(backend, m):
    p = gf2poly.find_irreducible(m)
    table = np.array(gf2poly.vm_table(p, m, 2 * m - 1), dtype=np.uint64)
    rng = np.random.default_rng(m)
    w = rng.random(1 << m)
    cands = np.arange(1, 1 << m, dtype=np.uint64)
    np.testing.assert_allclose(backend.class_sums(w, table, m, cands), brute_class_sums(w, p, m, cands), rtol=1e-13)


def test_backends_bit_identical():
    if "cython" not in _kernels.BACKENDS:
        pytest.skip("compiled extension not built")
    c, py = _kernels.BACKENDS["cython"], _kernels.BACKENDS["python"]
    m = 9
    p = gf2poly.find_irreducible(m)
    table = np.array(gf2poly.vm_table(p, m, 2 * m - 1), dtype=np.uint64)
    w = np.random.default_rng(0).random(1 << m) - 0.3
    cands = np.arange(1, 1 << m, dtype=np.uint64)
    np.testing.assert_array_equal(c.class_sums(w, table, m, cands), py.class_sums(w, table, m, cands))
    numer = np.random.default_rng(1).integers(0, 1 << m, size=(64, 3)).astype(np.uint64)
    np.testing.assert_array_equal(c.owen_scramble(numer, m, 53, 77), py.owen_scramble(numer, m, 53, 77))
    x = np.random.default_rng(2).random((50, 4))
    g = np.array([1.0, 0.5, 0.25, 0.125])
    np.testing.assert_allclose(c.warnock_rows(x, g), py.warnock_rows(x, g), rtol=1e-13)


def test_bit_length():
    xs = np.array([0, 1, 2, 3, 4, 2**52, 2**53 - 1], dtype=np.uint64)
    assert bit_classes(xs).tolist() == [int(v).bit_length() for v in xs]


def test_span_order():
    assert _pykernels.span([1, 2, 4], 3).tolist() == [0, 1, 2, 3, 4, 5, 6, 7]


def test_env_var_forces_fallback():
    import os
    import subprocess
    import sys

    env = dict(os.environ, POLYLAT_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "from polylat import _kernels; print(_kernels.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"
