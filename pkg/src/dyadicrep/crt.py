"""Intersection of congruence classes and multiplicity certificates.

The k-progressions of different table rows live on moduli that are far
from coprime, so combining them is general CRT: classes a mod m and
b mod n are compatible iff a == b (mod gcd(m, n)), and then intersect in
a single class mod lcm(m, n). A k lying in the intersection of several
rows' progressions admits one solution family per row, all with distinct
second-largest terms n+k+u, plus the trivial solution, giving a certified
lower bound on how many solutions that k has.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import gcd
from typing import Optional, Sequence

from .congruence import ProgressionRow, congruence_holds

__all__ = [
    "CertificationError",
    "CongruenceClass",
    "certify_multiplicity",
    "combine_rows",
    "crt_pair",
    "scan_subsets",
]


class CertificationError(RuntimeError):
    """A multiplicity certificate failed one of its identity checks."""


@dataclass(frozen=True, slots=True)
class CongruenceClass:
    """The residue class residue + modulus * Z, 0 <= residue < modulus."""

    residue: int
    modulus: int

    def __post_init__(self) -> None:
        if self.modulus < 1:
            raise ValueError("modulus must be positive")
        if not 0 <= self.residue < self.modulus:
            raise ValueError("residue must be reduced mod modulus")

    def least_member_at_least(self, lo: int) -> int:
        """Smallest member of the class that is >= lo."""
        shift = -(-(lo - self.residue) // self.modulus) if lo > self.residue else 0
        return self.residue + shift * self.modulus


def crt_pair(a: CongruenceClass, b: CongruenceClass) -> Optional[CongruenceClass]:
    """Intersection of two classes, or None when they are incompatible.

    Non-coprime moduli are the normal case here: compatibility is agreement
    mod gcd, and the intersection lives mod lcm.
    """
    g = gcd(a.modulus, b.modulus)
    if (b.residue - a.residue) % g:
        return None
    l = a.modulus // g * b.modulus
    step = b.modulus // g
    t = (b.residue - a.residue) // g * pow(a.modulus // g, -1, step) % step
    return CongruenceClass((a.residue + a.modulus * t) % l, l)


def combine_rows(rows: Sequence[ProgressionRow]) -> Optional[CongruenceClass]:
    """Fold crt_pair over the classes (k0 mod r) of the given rows."""
    if not rows:
        raise ValueError("combine_rows needs at least one row")
    acc = CongruenceClass(rows[0].k0 % rows[0].r, rows[0].r)
    for row in rows[1:]:
        nxt = crt_pair(acc, CongruenceClass(row.k0 % row.r, row.r))
        if nxt is None:
            return None
        acc = nxt
    return acc


def scan_subsets(
    rows: Sequence[ProgressionRow], m: int
) -> list[tuple[tuple[int, ...], CongruenceClass]]:
    """All m-subsets of rows whose progressions intersect, as
    (ascending u-tuple, combined class), in combinations order."""
    if not 1 <= m <= len(rows):
        raise ValueError("subset size out of range")
    out = []
    for subset in combinations(rows, m):
        combined = combine_rows(subset)
        if combined is not None:
            out.append((tuple(r.u for r in subset), combined))
    return out


def certify_multiplicity(
    k_class: CongruenceClass, rows: Sequence[ProgressionRow]
) -> int:
    """Certified count of distinct solutions for a k in k_class: one family
    per row plus the trivial solution.

    Checks, for the least class member k >= 2: the congruence identity of
    every row holds at k (modular exponentiation, cheap at any size), the
    family is nondegenerate (k >= u+3 makes the quotient in family_n
    positive), and the rows' u values are distinct (distinct u means
    distinct second-largest term n+k+u, so the families cannot collide;
    the trivial solution's terms are consecutive, which no family's are).
    Raises CertificationError on any failure; returns 1 + len(rows).
    """
    k = k_class.least_member_at_least(2)
    seen_u = set()
    for row in rows:
        if row.u in seen_u:
            raise CertificationError(f"duplicate row u={row.u}")
        seen_u.add(row.u)
        if k % row.r != row.k0 % row.r:
            raise CertificationError(
                f"k={k} is not in row u={row.u}'s progression"
            )
        if not congruence_holds(row.u, k):
            raise CertificationError(
                f"congruence fails for u={row.u} at k={k}"
            )
        if k < row.u + 3:
            raise CertificationError(
                f"k={k} too small for a nondegenerate u={row.u} family"
            )
    return 1 + len(rows)
