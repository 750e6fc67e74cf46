"""Solution families from the congruence 3*2**(k-1) + 3u + 1 == 0 (mod M).

For M = 2**(u+3) - 3, any k satisfying the congruence yields the solution

    n = 2**(k-1) - k + (3*2**(k-1) + 3u + 1) / M
    terms = (n+1, ..., n+k-2, n+k+u, n+k+u+1)

and the solving k form the arithmetic progression k0 + t*r, r the
multiplicative order of 2 mod M. Solving for k0 is a discrete logarithm:
2**(k-1) == (-3u - 1) / 3 (mod M), done here by baby-step/giant-step.

Desk-scale policy: the multiplicative order is found by the literal
doubling loop for moduli below 2**34; beyond that a caller must supply the
factorization of a multiple of the order, which the shipped table never
needs because the four rows whose moduli are out of range (u in
{55, 99, 113, 119}) ship as constants verified by the modular identities
3*2**(k0-1) + 3u + 1 == 0 and 2**r == 1 (mod M).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import isqrt
from typing import Optional

from .arith import Solution

__all__ = [
    "EMBEDDED_US",
    "ITERATIVE_MODULUS_LIMIT",
    "TABLE_ROWS",
    "ProgressionRow",
    "UnsupportedModulusError",
    "bsgs_dlog",
    "check_row",
    "congruence_holds",
    "family_modulus",
    "family_n",
    "family_solution",
    "mult_order",
    "solve_congruence",
    "table_row",
]

ITERATIVE_MODULUS_LIMIT = 1 << 34


class UnsupportedModulusError(ValueError):
    """Order computation out of the supported desk-scale range."""


def family_modulus(u: int) -> int:
    """M = 2**(u+3) - 3 for u >= 0."""
    if u < 0:
        raise ValueError("u must be non-negative")
    return (1 << (u + 3)) - 3


def congruence_holds(u: int, k: int) -> bool:
    """Whether 3*2**(k-1) + 3u + 1 == 0 (mod 2**(u+3) - 3). Cheap for any
    size of k via modular exponentiation."""
    if k < 1:
        raise ValueError("k must be positive")
    m = family_modulus(u)
    return (3 * pow(2, k - 1, m) + 3 * u + 1) % m == 0


def family_n(u: int, k: int) -> Optional[int]:
    """n = 2**(k-1) - k + (3*2**(k-1) + 3u + 1)/M when that quotient is a
    positive integer, else None. Builds 2**(k-1), so keep k desk-scale;
    for astronomic k test membership with congruence_holds instead."""
    if k < 2:
        raise ValueError("k must be at least 2")
    m = family_modulus(u)
    num = 3 * (1 << (k - 1)) + 3 * u + 1
    q, rem = divmod(num, m)
    if rem or q < 1:
        return None
    n = (1 << (k - 1)) - k + q
    return n if n >= 1 else None


def family_solution(u: int, k: int) -> Optional[Solution]:
    """The k-term solution (n+1, ..., n+k-2, n+k+u, n+k+u+1), or None when
    the congruence does not hold at (u, k)."""
    n = family_n(u, k)
    if n is None:
        return None
    terms = tuple(range(n + 1, n + k - 1)) + (n + k + u, n + k + u + 1)
    return Solution(n, terms)


def mult_order(
    modulus: int,
    *,
    order_multiple: Optional[int] = None,
    factors: Optional[dict[int, int]] = None,
) -> int:
    """Least v >= 1 with 2**v == 1 (mod modulus), for odd modulus >= 3.

    Without hints this is the literal doubling loop, supported for moduli
    below 2**34 (it runs exactly ord iterations). With order_multiple and
    its prime factorization {p: e}, any modulus is supported: the multiple
    is reduced by stripping primes while the power stays 1.
    """
    if modulus < 3 or modulus % 2 == 0:
        raise ValueError("modulus must be an odd integer >= 3")
    if order_multiple is not None:
        if factors is None:
            raise ValueError("order_multiple needs its factorization")
        if pow(2, order_multiple, modulus) != 1:
            raise ValueError("order_multiple is not a multiple of the order")
        v = order_multiple
        for p in factors:
            while v % p == 0 and pow(2, v // p, modulus) == 1:
                v //= p
        return v
    if modulus >= ITERATIVE_MODULUS_LIMIT:
        raise UnsupportedModulusError(
            f"modulus {modulus} >= 2^34: supply order_multiple with factors"
        )
    x = 2 % modulus
    v = 1
    while x != 1:
        x <<= 1
        if x >= modulus:
            x -= modulus
        v += 1
    return v


def bsgs_dlog(target: int, modulus: int, order: int) -> Optional[int]:
    """Least e in [0, order) with 2**e == target (mod modulus), or None.

    Baby-step/giant-step over the cyclic group generated by 2: baby table
    of 2**j for j < ceil(sqrt(order)) keeping the smallest j per value,
    then giant strides by 2**-m. Scanning stride indices upward and keeping
    minimal j makes the first hit the least exponent.
    """
    if order < 1:
        raise ValueError("order must be positive")
    target %= modulus
    m = isqrt(order - 1) + 1
    baby: dict[int, int] = {}
    x = 1
    for j in range(m):
        if x not in baby:
            baby[x] = j
        x = (x << 1) % modulus
    stride = pow(x, -1, modulus)  # x == 2**m mod modulus after the loop
    y = target
    for i in range((order + m - 1) // m):
        j = baby.get(y)
        if j is not None:
            return i * m + j
        y = y * stride % modulus
    return None


@dataclass(frozen=True, slots=True)
class ProgressionRow:
    """One table row: every k with k == k0 (mod r) solves the congruence
    for this u, and r is the multiplicative order of 2 mod 2**(u+3)-3."""

    u: int
    k0: int
    r: int


def check_row(row: ProgressionRow) -> None:
    """Modular identity checks: the congruence holds at k0 and 2**r == 1.
    Raises ValueError on failure. (Least-ness of k0 and r is established by
    computation for rows within the desk-scale policy, not re-proved here.)"""
    m = family_modulus(row.u)
    if not 1 <= row.k0 <= row.r:
        raise ValueError(f"u={row.u}: k0 must lie in [1, r]")
    if (3 * pow(2, row.k0 - 1, m) + 3 * row.u + 1) % m:
        raise ValueError(f"u={row.u}: congruence fails at k0={row.k0}")
    if pow(2, row.r, m) != 1:
        raise ValueError(f"u={row.u}: 2^r != 1 mod {m}")


def solve_congruence(u: int, *, order: Optional[int] = None) -> Optional[ProgressionRow]:
    """The progression row for u, or None when -(3u+1)/3 is not a power of
    2 mod M. Raises UnsupportedModulusError for moduli past the iterative
    policy when no order is supplied."""
    m = family_modulus(u)
    r = mult_order(m) if order is None else order
    c = (-3 * u - 1) * pow(3, -1, m) % m
    e = bsgs_dlog(c, m, r)
    if e is None:
        return None
    return ProgressionRow(u, e + 1, r)


# Progression table for every u <= 26 admitting a solution, plus the four
# out-of-policy rows shipped as verified constants (see check_row; the
# regular test suite recomputes every row below u=27 from scratch).
EMBEDDED_US = frozenset({55, 99, 113, 119})

TABLE_ROWS: tuple[ProgressionRow, ...] = (
    ProgressionRow(0, 4, 4),
    ProgressionRow(1, 5, 12),
    ProgressionRow(2, 22, 28),
    ProgressionRow(3, 48, 60),
    ProgressionRow(4, 83, 100),
    ProgressionRow(6, 221, 508),
    ProgressionRow(9, 242, 4092),
    ProgressionRow(11, 5531, 16380),
    ProgressionRow(17, 66328, 1048572),
    ProgressionRow(21, 2796185, 5592404),
    ProgressionRow(22, 775376, 1116130),
    ProgressionRow(26, 96489490, 536870908),
    ProgressionRow(55, 5843993308712118, 26202761468337430),
    ProgressionRow(99, 364550281031913286431277811782,
                   2535300206192230667655098198606),
    ProgressionRow(113, 2452672773763126728478631379525174,
                   83076749736557242056487941267521532),
    ProgressionRow(119, 3303995011423016739508338720636484139,
                   5316911983139663491615228241121378300),
)


def table_row(u: int) -> Optional[ProgressionRow]:
    for row in TABLE_ROWS:
        if row.u == u:
            return row
    return None
