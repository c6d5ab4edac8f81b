"""Finite commutative rings presented as products of local factors Z/p^a.

Elements are residue tuples, one coordinate per factor. When the primes are
pairwise distinct the ring is also viewed as Z/n through the Chinese remainder
theorem, and integers can be used as element literals.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from functools import cached_property, reduce
from typing import Iterator, Sequence

from .errors import DomainError, InvalidInput

__all__ = [
    "FactoredRing",
    "RingElement",
    "IdempotentTable",
    "UnitTable",
    "factorize",
    "is_prime",
    "make_ring",
    "ring_from_modulus",
    "parse_ring_spec",
    "enumerate_idempotents",
    "enumerate_units",
    "count_self_inverse_closed_form",
]


_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(p: int) -> bool:
    """Deterministic Miller-Rabin; exact for p < 3.3e24."""
    if p < 2:
        return False
    for q in _MR_BASES:
        if p % q == 0:
            return p == q
    d, s = p - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, p)
        if x in (1, p - 1):
            continue
        for _ in range(s - 1):
            x = x * x % p
            if x == p - 1:
                break
        else:
            return False
    return True


def factorize(n: int) -> list[tuple[int, int]]:
    """Prime-power decomposition of n >= 2, primes ascending.

    >>> factorize(12)
    [(2, 2), (3, 1)]
    """
    if not isinstance(n, int) or isinstance(n, bool) or n < 2:
        raise InvalidInput(f"factorize needs an integer n >= 2, got {n!r}")
    out = []
    for p in (2, 3):
        if n % p == 0:
            a = 0
            while n % p == 0:
                n //= p
                a += 1
            out.append((p, a))
    p, step = 5, 2
    while p * p <= n:
        if n % p == 0:
            a = 0
            while n % p == 0:
                n //= p
                a += 1
            out.append((p, a))
        p += step
        step = 6 - step
    if n > 1:
        out.append((n, 1))
    return out


def _crt(residues: Sequence[int], moduli: Sequence[int]) -> int:
    total, mod = 0, 1
    for r, m in zip(residues, moduli):
        # solve x = total (mod mod), x = r (mod m)
        t = (r - total) * pow(mod, -1, m) % m
        total += mod * t
        mod *= m
    return total


def _local_self_inverse(p: int, a: int) -> int:
    """|{x in Z/p^a : x^2 = 1}|."""
    if p != 2:
        return 2
    return {1: 1, 2: 2}.get(a, 4)


@dataclass(frozen=True)
class RingElement:
    ring: FactoredRing = field(repr=False)
    coords: tuple[int, ...]

    def _check(self, other: RingElement) -> None:
        if not isinstance(other, RingElement) or other.ring != self.ring:
            raise DomainError("operands belong to different rings")

    def __add__(self, other: RingElement) -> RingElement:
        self._check(other)
        return RingElement(self.ring, tuple((x + y) % m for x, y, m in zip(self.coords, other.coords, self.ring.moduli)))

    def __sub__(self, other: RingElement) -> RingElement:
        self._check(other)
        return RingElement(self.ring, tuple((x - y) % m for x, y, m in zip(self.coords, other.coords, self.ring.moduli)))

    def __mul__(self, other: RingElement) -> RingElement:
        self._check(other)
        return RingElement(self.ring, tuple(x * y % m for x, y, m in zip(self.coords, other.coords, self.ring.moduli)))

    def __neg__(self) -> RingElement:
        return RingElement(self.ring, tuple(-x % m for x, m in zip(self.coords, self.ring.moduli)))

    def __int__(self) -> int:
        return self.ring.to_int(self)

    def __repr__(self) -> str:
        if self.ring.modulus is not None:
            return f"{self.ring.to_int(self)} (mod {self.ring.modulus})"
        return f"{self.coords}"

    def is_zero(self) -> bool:
        return not any(self.coords)

    def is_one(self) -> bool:
        return all(c == 1 % m for c, m in zip(self.coords, self.ring.moduli))

    def is_idempotent(self) -> bool:
        return self * self == self

    def is_unit(self) -> bool:
        return all(c % p != 0 for c, (p, _) in zip(self.coords, self.ring.factors))

    def inverse(self) -> RingElement:
        if not self.is_unit():
            raise DomainError(f"{self!r} is not a unit")
        return RingElement(self.ring, tuple(pow(c, -1, m) for c, m in zip(self.coords, self.ring.moduli)))

    def complement(self) -> RingElement:
        """1 - e for an idempotent e."""
        if not self.is_idempotent():
            raise DomainError(f"{self!r} is not idempotent")
        return self.ring.one - self


@dataclass(frozen=True)
class IdempotentTable:
    """Nonzero idempotents e_1 = 1, e_2, e_3 = 1 - e_2, ..., indexed from 0.

    Each idempotent is identified with its support mask: bit i is set when
    coordinate i equals 1.
    """

    masks: tuple[int, ...]
    elements: tuple[RingElement, ...]

    def __len__(self) -> int:
        return len(self.masks)

    def __getitem__(self, i: int) -> RingElement:
        return self.elements[i]

    @cached_property
    def _index(self) -> dict[RingElement, int]:
        return {e: i for i, e in enumerate(self.elements)}

    def index_of(self, e: RingElement) -> int:
        try:
            return self._index[e]
        except KeyError:
            raise DomainError(f"{e!r} is not a nonzero idempotent") from None

    def orthogonal(self, i: int, k: int) -> bool:
        return self.masks[i] & self.masks[k] == 0


@dataclass(frozen=True)
class UnitTable:
    self_inverse: tuple[RingElement, ...]
    paired: tuple[tuple[RingElement, RingElement], ...]

    @cached_property
    def all_units(self) -> tuple[RingElement, ...]:
        return self.self_inverse + tuple(itertools.chain.from_iterable(self.paired))

    @property
    def r(self) -> int:
        return len(self.self_inverse)

    def __len__(self) -> int:
        return len(self.self_inverse) + 2 * len(self.paired)

    def __getitem__(self, j: int) -> RingElement:
        return self.all_units[j]

    @cached_property
    def _index(self) -> dict[RingElement, int]:
        return {u: j for j, u in enumerate(self.all_units)}

    def index_of(self, u: RingElement) -> int:
        try:
            return self._index[u]
        except KeyError:
            raise DomainError(f"{u!r} is not a unit") from None

    @cached_property
    def inverse_index(self) -> tuple[int, ...]:
        """inverse_index[j] is the position of all_units[j]**-1."""
        r = self.r
        inv = list(range(r))
        for t in range(len(self.paired)):
            a = r + 2 * t
            inv += [a + 1, a]
        return tuple(inv)


@dataclass(frozen=True)
class FactoredRing:
    """Product of local rings Z/p_i^a_i, factors kept in the given order."""

    factors: tuple[tuple[int, int], ...]
    label_hint: str | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if not self.factors:
            raise InvalidInput("a ring needs at least one local factor")
        for item in self.factors:
            if len(item) != 2:
                raise InvalidInput(f"factor {item!r} is not a (prime, exponent) pair")
            p, a = item
            if not isinstance(p, int) or not is_prime(p):
                raise InvalidInput(f"{p!r} is not prime")
            if not isinstance(a, int) or a < 1:
                raise InvalidInput(f"exponent {a!r} must be a positive integer")

    # -- derived counts -------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.factors)

    @cached_property
    def moduli(self) -> tuple[int, ...]:
        return tuple(p**a for p, a in self.factors)

    @cached_property
    def has_crt(self) -> bool:
        primes = [p for p, _ in self.factors]
        return len(set(primes)) == len(primes)

    @cached_property
    def modulus(self) -> int | None:
        return math.prod(self.moduli) if self.has_crt else None

    @property
    def k(self) -> int:
        """Number of distinct primes."""
        return len({p for p, _ in self.factors})

    @cached_property
    def phi(self) -> int:
        return math.prod(p**a - p ** (a - 1) for p, a in self.factors)

    @property
    def h(self) -> int:
        return sum(1 for p, _ in self.factors if p != 2)

    @property
    def m(self) -> int | None:
        """2-adic valuation of the modulus; None without a CRT view."""
        if not self.has_crt:
            return None
        return sum(a for p, a in self.factors if p == 2)

    @cached_property
    def self_inverse_count(self) -> int:
        return math.prod(_local_self_inverse(p, a) for p, a in self.factors)

    @property
    def num_idempotents(self) -> int:
        """Nonzero idempotents: 2^n - 1."""
        return 2**self.n - 1

    @property
    def num_vertices(self) -> int:
        return self.num_idempotents * self.phi

    @cached_property
    def label(self) -> str:
        if self.label_hint is not None:
            return self.label_hint
        if self.has_crt and list(self.factors) == factorize(self.modulus):
            return str(self.modulus)
        return "*".join(f"{p}^{a}" for p, a in self.factors)

    def __str__(self) -> str:
        return self.label

    # -- elements -------------------------------------------------------

    def __call__(self, x: int | Sequence[int]) -> RingElement:
        """Element from an integer (reduced coordinate-wise) or a residue tuple."""
        if isinstance(x, int):
            return RingElement(self, tuple(x % m for m in self.moduli))
        coords = tuple(x)
        if len(coords) != self.n:
            raise InvalidInput(f"expected {self.n} coordinates, got {len(coords)}")
        return RingElement(self, tuple(c % m for c, m in zip(coords, self.moduli)))

    @property
    def one(self) -> RingElement:
        return self(1)

    @property
    def zero(self) -> RingElement:
        return self(0)

    def to_int(self, x: RingElement) -> int:
        if not self.has_crt:
            raise DomainError(f"ring {self.label} has repeated primes; no Z/n view")
        return _crt(x.coords, self.moduli)

    def elements(self) -> Iterator[RingElement]:
        for coords in itertools.product(*(range(m) for m in self.moduli)):
            yield RingElement(self, coords)

    def idempotent_from_mask(self, mask: int) -> RingElement:
        return RingElement(self, tuple((mask >> i) & 1 for i in range(self.n)))

    @cached_property
    def idempotents(self) -> IdempotentTable:
        return enumerate_idempotents(self)

    @cached_property
    def units(self) -> UnitTable:
        return enumerate_units(self)

    def sort_key(self, x: RingElement):
        return self.to_int(x) if self.has_crt else x.coords


def make_ring(factors: Sequence[tuple[int, int]], label: str | None = None) -> FactoredRing:
    """Build a ring from (prime, exponent) pairs; repeated primes are allowed."""
    try:
        fs = tuple((int(p), int(a)) for p, a in factors)
    except (TypeError, ValueError) as exc:
        raise InvalidInput(f"bad factor list {factors!r}") from exc
    return FactoredRing(fs, label)


def ring_from_modulus(n: int) -> FactoredRing:
    return FactoredRing(tuple(factorize(n)), str(n))


_TERM = re.compile(r"^\s*(\d+)\s*(?:\^\s*(\d+))?\s*$")


def parse_ring_spec(text: str) -> FactoredRing:
    """Parse ``"15"`` or ``"2^1 * 2^1 * 3"`` into a ring."""
    text = text.strip()
    if re.fullmatch(r"\d+", text):
        return ring_from_modulus(int(text))
    factors = []
    for term in text.split("*"):
        mt = _TERM.match(term)
        if not mt:
            raise InvalidInput(f"cannot parse ring term {term!r} in {text!r}")
        factors.append((int(mt.group(1)), int(mt.group(2) or 1)))
    ring = make_ring(factors)
    return ring


def enumerate_idempotents(ring: FactoredRing) -> IdempotentTable:
    """Nonzero idempotents in complement-paired order.

    Index 0 is the identity. The remaining masks come in complementary pairs;
    the representative of a pair is the mask containing factor 0, pairs go in
    increasing representative order, representative before its complement.
    """
    full = (1 << ring.n) - 1
    masks = [full]
    for rep in range(1, full, 2):
        masks += [rep, full ^ rep]
    return IdempotentTable(tuple(masks), tuple(ring.idempotent_from_mask(m) for m in masks))


def enumerate_units(ring: FactoredRing) -> UnitTable:
    """All units, self-inverse ones first, then inverse pairs (smaller first)."""
    local_units = []
    local_inv = []
    for p, a in ring.factors:
        q = p**a
        us = [x for x in range(1, q) if x % p]
        local_units.append(us)
        local_inv.append({x: pow(x, -1, q) for x in us})

    self_inv, pairs = [], []
    key = ring.sort_key
    for coords in itertools.product(*local_units):
        inv = tuple(d[c] for c, d in zip(coords, local_inv))
        u = RingElement(ring, coords)
        if inv == coords:
            self_inv.append(u)
            continue
        v = RingElement(ring, inv)
        if key(u) < key(v):
            pairs.append((u, v))
    self_inv.sort(key=key)
    pairs.sort(key=lambda uv: key(uv[0]))
    return UnitTable(tuple(self_inv), tuple(pairs))


def count_self_inverse_closed_form(n: int) -> int:
    """Number of units u of Z/n with u^2 = 1, from the 2-adic valuation of n."""
    if not isinstance(n, int) or n < 2:
        raise InvalidInput(f"need n >= 2, got {n!r}")
    m = (n & -n).bit_length() - 1
    h = sum(1 for p, _ in factorize(n) if p != 2)
    if m <= 1:
        return 2**h
    if m == 2:
        return 2 ** (h + 1)
    return 2 ** (h + 2)
