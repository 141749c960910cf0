# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the kernels in ``_pykernels``."""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t

cnp.import_array()

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL
cdef uint64_t RESIDUAL_SALT = 0xD1B54A32D192ED03ULL


cdef inline uint64_t mix64(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline int bitlen(uint64_t x) noexcept nogil:
    if x == 0:
        return 0
    return 64 - __builtin_clzll(x)


cdef extern from *:
    int __builtin_clzll(unsigned long long) nogil
    int __builtin_ctzll(unsigned long long) nogil


def class_sums(weights, table, int m, candidates):
    cdef const double[::1] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef const uint64_t[::1] tab = np.ascontiguousarray(table, dtype=np.uint64)
    cdef const uint64_t[::1] cand = np.ascontiguousarray(candidates, dtype=np.uint64)
    cdef Py_ssize_t n_points = 1 << m
    cdef Py_ssize_t nc = cand.shape[0]
    cdef int nb = m + 1
    out_arr = np.zeros((nc, nb), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef uint64_t[::1] x = np.zeros(n_points, dtype=np.uint64)
    cdef uint64_t cols[64]
    cdef Py_ssize_t c, n
    cdef int i, k
    cdef uint64_t q, col
    with nogil:
        for c in range(nc):
            q = cand[c]
            for i in range(m):
                col = 0
                for k in range(m):
                    if (q >> k) & 1:
                        col ^= tab[i + k]
                cols[i] = col
            x[0] = 0
            out[c, 0] += w[0]
            for n in range(1, n_points):
                x[n] = x[n & (n - 1)] ^ cols[__builtin_ctzll(n)]
                out[c, bitlen(x[n])] += w[n]
    return out_arr


def owen_scramble(numer, int m, int depth, seed):
    cdef const uint64_t[:, ::1] a = np.ascontiguousarray(numer, dtype=np.uint64)
    cdef Py_ssize_t n_points = a.shape[0]
    cdef Py_ssize_t s = a.shape[1]
    out_arr = np.empty((n_points, s), dtype=np.uint64)
    cdef uint64_t[:, ::1] out = out_arr
    cdef uint64_t sd = <uint64_t>(int(seed) & 0xFFFFFFFFFFFFFFFF)
    cdef uint64_t dkey, rk, y, v
    cdef uint64_t kk[64]
    cdef int extra = depth - m
    cdef Py_ssize_t j, n
    cdef int k
    with nogil:
        for j in range(s):
            dkey = mix64(mix64(sd ^ GOLDEN) + <uint64_t>(j + 1) * GOLDEN)
            for k in range(1, m + 1):
                kk[k] = mix64(dkey + <uint64_t>k * GOLDEN)
            rk = mix64(dkey ^ RESIDUAL_SALT)
            for n in range(n_points):
                v = a[n, j]
                y = 0
                for k in range(1, m + 1):
                    y = (y << 1) | (((v >> (m - k)) & 1) ^ (mix64((v >> (m - k + 1)) ^ kk[k]) >> 63))
                if extra > 0:
                    y = (y << extra) | (mix64(v ^ rk) >> (64 - extra))
                out[n, j] = y
    return out_arr


def warnock_rows(x, gammas):
    cdef const double[:, ::1] xs = np.ascontiguousarray(x, dtype=np.float64)
    cdef const double[::1] g = np.ascontiguousarray(gammas, dtype=np.float64)
    cdef Py_ssize_t n_points = xs.shape[0]
    cdef Py_ssize_t s = xs.shape[1]
    rows_arr = np.zeros(n_points, dtype=np.float64)
    cdef double[::1] rows = rows_arr
    cdef Py_ssize_t n, n2, j
    cdef double prod, mx, acc
    with nogil:
        for n in range(n_points):
            acc = 0.0
            for n2 in range(n_points):
                prod = 1.0
                for j in range(s):
                    mx = xs[n, j] if xs[n, j] > xs[n2, j] else xs[n2, j]
                    prod *= 1.0 + g[j] * (1.0 - mx)
                acc += prod
            rows[n] = acc
    return rows_arr
