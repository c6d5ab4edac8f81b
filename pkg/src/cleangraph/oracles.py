"""Brute-force counts over Z/n used to check the ring-core formulas."""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from .rings import FactoredRing


@njit(cache=True, nogil=True)
def _count_square_roots_of_one(n):
    count = 0
    sq = 1  # x^2 mod n, advanced by (x+1)^2 = x^2 + 2x + 1
    for x in range(1, n):
        if sq == 1 % n:
            a, b = x, n
            while b:
                a, b = b, a % b
            if a == 1:
                count += 1
        sq += 2 * x + 1
        while sq >= n:
            sq -= n
    return count


def brute_self_inverse_count(n: int) -> int:
    """|{x in [1, n) : gcd(x, n) = 1, x^2 = 1 mod n}| by exhaustive scan."""
    return int(_count_square_roots_of_one(n))


def brute_self_inverse_counts(upto: int) -> np.ndarray:
    """Vector of brute counts for n = 0..upto (entries 0 and 1 unused)."""
    out = np.zeros(upto + 1, dtype=np.int64)
    _fill_counts(out, upto)
    return out


@njit(cache=True)
def _fill_counts(out, upto):
    for n in range(2, upto + 1):
        out[n] = _count_square_roots_of_one(n)


def brute_idempotents_mod(n: int) -> list[int]:
    """Nonzero residues e mod n with e^2 = e."""
    x = np.arange(1, n, dtype=np.int64)
    return (x[(x * x) % n == x]).tolist()


def brute_units(ring: FactoredRing) -> int:
    """Invertible residue tuples, counted by searching for an inverse."""
    count = 0
    one = ring.one
    elems = list(ring.elements())
    for a in elems:
        if any((a * b) == one for b in elems):
            count += 1
    return count


def brute_idempotent_count(ring: FactoredRing) -> int:
    """Nonzero idempotents found by scanning every element."""
    return sum(1 for x in ring.elements() if not x.is_zero() and x * x == x)


def brute_totient(n: int) -> int:
    return sum(1 for x in range(1, n) if math.gcd(x, n) == 1)
