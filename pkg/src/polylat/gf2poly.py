"""Arithmetic in GF(2)[x] on integer bitmasks.

A polynomial b_n x^n + ... + b_1 x + b_0 is the integer b_n 2^n + ... + b_0.
Addition is XOR, the zero polynomial is 0 and has degree ``-1`` (standing in
for minus infinity).  Degrees are capped at :data:`MAX_DEGREE` so that every
polynomial fits in one unsigned 64-bit word.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

MAX_DEGREE = 62

__all__ = [
    "MAX_DEGREE",
    "degree",
    "add",
    "mul",
    "poly_divmod",
    "poly_mod",
    "mul_mod",
    "pow_mod",
    "gcd",
    "is_irreducible",
    "is_irreducible_trial",
    "find_irreducible",
    "mul_mod_array",
    "laurent_truncate_vm",
    "vm_table",
    "unit_group_generator",
    "to_hex",
    "from_hex",
    "to_str",
]


def degree(a: int) -> int:
    """Degree of ``a``; ``-1`` for the zero polynomial."""
    return a.bit_length() - 1


def _check(a: int) -> int:
    a = int(a)
    if a < 0:
        raise ValueError(f"polynomial bitmask must be nonnegative, got {a}")
    return a


def add(a: int, b: int) -> int:
    return _check(a) ^ _check(b)


def mul(a: int, b: int) -> int:
    """Carry-less product of ``a`` and ``b``."""
    a, b = _check(a), _check(b)
    if a < b:
        a, b = b, a
    c = 0
    while b:
        if b & 1:
            c ^= a
        a <<= 1
        b >>= 1
    return c


def poly_divmod(a: int, b: int) -> tuple[int, int]:
    """Quotient and remainder of ``a`` divided by ``b``."""
    a, b = _check(a), _check(b)
    if b == 0:
        raise ZeroDivisionError("division by the zero polynomial")
    db = b.bit_length() - 1
    q = 0
    while a and a.bit_length() - 1 >= db:
        shift = a.bit_length() - 1 - db
        q ^= 1 << shift
        a ^= b << shift
    return q, a


def poly_mod(a: int, b: int) -> int:
    return poly_divmod(a, b)[1]


def mul_mod(a: int, b: int, p: int) -> int:
    """``a * b mod p``; the result has degree below ``deg(p)``."""
    p = _check(p)
    if p == 0:
        raise ZeroDivisionError("zero modulus")
    dp = p.bit_length() - 1
    a = poly_mod(a, p)
    b = poly_mod(b, p)
    top = 1 << dp
    r = 0
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if a & top:
            a ^= p
    return r


def pow_mod(a: int, e: int, p: int) -> int:
    if e < 0:
        raise ValueError("negative exponent")
    result = poly_mod(1, p)
    base = poly_mod(a, p)
    while e:
        if e & 1:
            result = mul_mod(result, base, p)
        base = mul_mod(base, base, p)
        e >>= 1
    return result


def gcd(a: int, b: int) -> int:
    a, b = _check(a), _check(b)
    while b:
        a, b = b, poly_mod(a, b)
    return a


def _prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _check_nonconstant(p: int) -> int:
    p = _check(p)
    if p.bit_length() - 1 < 1:
        raise ValueError(f"irreducibility is undefined for constant polynomial {p:#x}")
    if p.bit_length() - 1 > MAX_DEGREE:
        raise ValueError(f"degree {p.bit_length() - 1} exceeds the cap {MAX_DEGREE}")
    return p


def is_irreducible(p: int) -> bool:
    """Rabin's test: ``x^(2^m) = x mod p`` and ``gcd(x^(2^(m/r)) - x, p) = 1``
    for every prime ``r`` dividing ``m = deg(p)``."""
    p = _check_nonconstant(p)
    m = p.bit_length() - 1
    if m == 1:
        return True
    if not p & 1:
        return False
    frob = [2]  # frob[i] = x^(2^i) mod p
    for _ in range(m):
        frob.append(mul_mod(frob[-1], frob[-1], p))
    if frob[m] != poly_mod(2, p):
        return False
    for r in _prime_factors(m):
        if gcd(frob[m // r] ^ 2, p) != 1:
            return False
    return True


def is_irreducible_trial(p: int) -> bool:
    """Trial division by every polynomial of degree ``1..deg(p)//2``."""
    p = _check_nonconstant(p)
    m = p.bit_length() - 1
    for d in range(2, 1 << (m // 2 + 1)):
        if poly_mod(p, d) == 0:
            return False
    return True


@lru_cache(maxsize=None)
def find_irreducible(m: int) -> int:
    """Smallest bitmask irreducible polynomial of degree ``m``."""
    if not 1 <= m <= MAX_DEGREE:
        raise ValueError(f"degree must be in [1, {MAX_DEGREE}], got {m}")
    for p in range(1 << m, 1 << (m + 1)):
        if is_irreducible(p):
            return p
    raise AssertionError("unreachable: irreducibles exist in every degree")


def _check_modulus(p: int, m: int) -> None:
    if m < 1 or p.bit_length() - 1 != m:
        raise ValueError(f"modulus {p:#x} does not have degree m={m}")
    if not is_irreducible(p):
        raise ValueError(f"modulus {p:#x} is reducible")


def laurent_truncate_vm(n: int, q: int, p: int, m: int) -> int:
    """Numerator ``a`` of ``v_m(n q / p) = a / 2^m``.

    The first ``m`` coefficients ``t_1..t_m`` of the Laurent expansion of
    ``(n q mod p) / p`` are the quotient of ``(n q mod p) x^m`` by ``p``;
    read as a bitmask this quotient is exactly ``sum t_l 2^(m-l)``.
    """
    n, q, p = _check(n), _check(q), _check(p)
    _check_modulus(p, m)
    if n.bit_length() > m or q.bit_length() > m:
        raise ValueError(f"n and q must have degree < m={m}")
    r = mul_mod(n, q, p)
    return poly_divmod(r << m, p)[0]


def vm_table(p: int, m: int, length: int) -> list[int]:
    """``[v_m(x^t mod p / p) * 2^m for t in range(length)]``.

    ``n -> v_m(n q / p)`` is GF(2)-linear in both ``n`` and ``q``, so this
    table is all that is needed to produce any point coordinate.
    """
    _check_modulus(p, m)
    out = []
    r = 1 if m > 0 else 0
    top = 1 << m
    for _ in range(length):
        out.append(poly_divmod(r << m, p)[0])
        r <<= 1
        if r & top:
            r ^= p
    return out


def unit_group_generator(p: int) -> int:
    """A generator of the cyclic group ``(GF(2)[x]/p)^*`` of order ``2^m - 1``."""
    p = _check(p)
    m = p.bit_length() - 1
    _check_modulus(p, m)
    order = (1 << m) - 1
    if order == 1:
        return 1
    factors = _prime_factors(order)
    for g in range(2, 1 << m):
        if all(pow_mod(g, order // r, p) != 1 for r in factors):
            return g
    raise AssertionError("unreachable: the multiplicative group of a field is cyclic")


def mul_mod_array(r: np.ndarray, h: int, p: int) -> np.ndarray:
    """Multiply every entry of ``r`` (degree < m) by ``h`` modulo ``p``."""
    m = p.bit_length() - 1
    r = np.asarray(r, dtype=np.uint64)
    out = np.zeros_like(r)
    col = poly_mod(h, p)
    for i in range(m):
        bit = (r >> np.uint64(i)) & np.uint64(1)
        out ^= bit * np.uint64(col)
        col = mul_mod(col, 2, p)
    return out


def to_hex(a: int) -> str:
    return f"{_check(a):#x}"


def from_hex(text: str) -> int:
    text = text.strip().lower()
    if not text.startswith("0x"):
        raise ValueError(f"polynomial must be a 0x-prefixed hex bitmask, got {text!r}")
    return int(text, 16)


def to_str(a: int) -> str:
    """Human-readable form, e.g. ``x^4 + x + 1``."""
    a = _check(a)
    if a == 0:
        return "0"
    terms = []
    for i in range(a.bit_length() - 1, -1, -1):
        if a >> i & 1:
            terms.append("1" if i == 0 else "x" if i == 1 else f"x^{i}")
    return " + ".join(terms)
