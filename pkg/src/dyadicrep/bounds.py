"""Structural bounds on solutions, all in exact integer arithmetic.

The logarithmic bounds are integer ceilings computed by bit-length tests
(least m with 2**m >= k**(2k)), never by floating point, so they are exact
for every k. Oversized comparisons such as a_k**(k-1) * 2**a_1 >= 2**a_k are
decided through bit lengths instead of materializing 2**a_k.
"""

from __future__ import annotations

from math import prod

from .arith import Solution

__all__ = [
    "ak_bound_cor",
    "ak_bound_thm",
    "corollary_bound_holds",
    "forced_prefix_len",
    "max_n",
    "product_bound_holds",
    "trivial_solution",
]


def max_n(k: int) -> int:
    """Largest n admitting a k-term solution: 2**(k+1) - k - 2."""
    if k < 2:
        raise ValueError("k must be at least 2")
    return (1 << (k + 1)) - k - 2


def trivial_solution(k: int) -> Solution:
    """The extremal solution at n = max_n(k): terms n+1, ..., n+k."""
    n = max_n(k)
    return Solution(n, tuple(range(n + 1, n + k + 1)))


def forced_prefix_len(n: int, k: int) -> int:
    """Largest j <= k-1 with n >= 2**(j+1) - j, or 0 when n < 3.

    Any k-term solution for such n must start a_i = n+i for all i <= j.
    """
    if n < 1:
        raise ValueError("n must be a positive integer")
    if k < 2:
        raise ValueError("k must be at least 2")
    j = 0
    while j < k - 1 and n >= (1 << (j + 2)) - (j + 1):
        j += 1
    return j


def _ceil_2k_log2_k(k: int) -> int:
    """Least integer m with 2**m >= k**(2k), i.e. ceil(2k * log2 k)."""
    if k & (k - 1) == 0:
        # k = 2**b makes 2k*log2(k) exact
        return 2 * k * (k.bit_length() - 1)
    return (k ** (2 * k) - 1).bit_length()


def ak_bound_thm(n: int, k: int) -> int:
    """Least integer B >= 2n + 2k*log2(k); every solution has a_k <= B."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    if k < 2:
        raise ValueError("k must be at least 2")
    return 2 * n + _ceil_2k_log2_k(k)


def ak_bound_cor(k: int) -> int:
    """n-free form of the last-term bound: least integer >=
    2**(k+2) + 2k*(log2(k) - 1) - 4."""
    if k < 2:
        raise ValueError("k must be at least 2")
    return (1 << (k + 2)) - 2 * k - 4 + _ceil_2k_log2_k(k)


def product_bound_holds(sol: Solution) -> bool:
    """Necessary condition on solutions: 2**(a_k - a_{k-1}) divides a_k and
    2**(a_k - a_i) <= (a_{i+2} * ... * a_k) * a_k for every i <= k-2."""
    terms = sol.terms
    ak = terms[-1]
    d = ak - terms[-2]
    if d >= ak.bit_length() or ak & ((1 << d) - 1):
        return False
    for i in range(len(terms) - 2):
        rhs = prod(terms[i + 2 :]) * ak
        # 2**(ak - terms[i]) <= rhs, decided by bit length
        if rhs.bit_length() < ak - terms[i] + 1:
            return False
    return True


def corollary_bound_holds(sol: Solution) -> bool:
    """Check a_k**(k-1) * 2**a_1 >= 2**a_k without building 2**a_k."""
    ak = sol.terms[-1]
    p = sol.terms[-1] ** (len(sol.terms) - 1)
    return p.bit_length() >= ak - sol.terms[0] + 1
