"""Pure numpy implementations of the hot kernels.

Every function here has a twin in ``_ckernels.pyx`` with the same signature.
``class_sums`` and ``owen_scramble`` must agree bit for bit with the compiled
versions, so the accumulation order below mirrors the C loops exactly.
"""

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
RESIDUAL_SALT = 0xD1B54A32D192ED03

_BLOCK_ELEMS = 1 << 21


def mix64(z):
    """splitmix64 finalizer; works on Python ints and uint64 arrays."""
    if isinstance(z, np.ndarray):
        z = z ^ (z >> np.uint64(30))
        z = z * np.uint64(0xBF58476D1CE4E5B9)
        z = z ^ (z >> np.uint64(27))
        z = z * np.uint64(0x94D049BB133111EB)
        return z ^ (z >> np.uint64(31))
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def dim_key(seed, j):
    return mix64(mix64((seed & MASK64) ^ GOLDEN) + (j + 1) * GOLDEN)


def digit_key(dkey, k):
    return mix64(dkey + k * GOLDEN)


def residual_key(dkey):
    return mix64(dkey ^ RESIDUAL_SALT)


def span(cols, m):
    """All ``2^m`` XOR combinations of ``cols``; entry ``n`` uses the bits of ``n``."""
    out = np.zeros(1 << m, dtype=np.uint64)
    for i in range(m):
        half = 1 << i
        out[half : 2 * half] = out[:half] ^ np.uint64(cols[i])
    return out


def bit_length(x):
    """Bit length of nonnegative integers below ``2^53``."""
    return np.frexp(np.asarray(x, dtype=np.float64))[1].astype(np.intp)


def candidate_columns(table, m, candidates):
    """Generator columns of every candidate: column ``i`` of ``q`` is
    ``XOR_k bit_k(q) * table[i + k]``."""
    table = np.asarray(table, dtype=np.uint64)
    q = np.asarray(candidates, dtype=np.uint64)
    cols = np.zeros((q.size, m), dtype=np.uint64)
    for k in range(m):
        bit = (q >> np.uint64(k)) & np.uint64(1)
        cols ^= bit[:, None] * table[k : k + m][None, :]
    return cols


def class_sums(weights, table, m, candidates):
    """``out[c, b]`` = sum of ``weights[n]`` over points ``n`` whose coordinate
    under candidate ``c`` has numerator of bit length ``b``."""
    weights = np.ascontiguousarray(weights, dtype=np.float64)
    candidates = np.ascontiguousarray(candidates, dtype=np.uint64)
    n_points = 1 << m
    nb = m + 1
    out = np.empty((candidates.size, nb))
    block = max(1, _BLOCK_ELEMS // n_points)
    for start in range(0, candidates.size, block):
        chunk = candidates[start : start + block]
        cols = candidate_columns(table, m, chunk)
        x = np.zeros((chunk.size, n_points), dtype=np.uint64)
        for i in range(m):
            half = 1 << i
            x[:, half : 2 * half] = x[:, :half] ^ cols[:, i : i + 1]
        idx = bit_length(x) + (np.arange(chunk.size) * nb)[:, None]
        sums = np.bincount(
            idx.ravel(), weights=np.broadcast_to(weights, x.shape).ravel(), minlength=chunk.size * nb
        )
        out[start : start + chunk.size] = sums.reshape(chunk.size, nb)
    return out


def owen_scramble(numer, m, depth, seed):
    """Nested uniform scramble of ``m``-digit numerators to ``depth`` digits."""
    numer = np.ascontiguousarray(numer, dtype=np.uint64)
    n_points, s = numer.shape
    out = np.empty_like(numer)
    one = np.uint64(1)
    for j in range(s):
        a = numer[:, j]
        dkey = dim_key(seed, j)
        y = np.zeros(n_points, dtype=np.uint64)
        for k in range(1, m + 1):
            kk = np.uint64(digit_key(dkey, k))
            prefix = a >> np.uint64(m - k + 1)
            flip = mix64(prefix ^ kk) >> np.uint64(63)
            digit = (a >> np.uint64(m - k)) & one
            y = (y << one) | (digit ^ flip)
        extra = depth - m
        if extra > 0:
            rk = np.uint64(residual_key(dkey))
            resid = mix64(a ^ rk) >> np.uint64(64 - extra)
            y = (y << np.uint64(extra)) | resid
        out[:, j] = y
    return out


def warnock_rows(x, gammas):
    """``rows[n] = sum over n' of prod_j (1 + gamma_j (1 - max(x[n,j], x[n',j])))``."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    g = np.asarray(gammas, dtype=np.float64)
    n_points = x.shape[0]
    rows = np.empty(n_points)
    block = max(1, _BLOCK_ELEMS // max(1, n_points * x.shape[1]))
    for start in range(0, n_points, block):
        xb = x[start : start + block]
        terms = 1.0 + g * (1.0 - np.maximum(xb[:, None, :], x[None, :, :]))
        rows[start : start + block] = np.prod(terms, axis=2).sum(axis=1)
    return rows
