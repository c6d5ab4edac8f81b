"""Wiener index of Cl2(R): closed forms and an exhaustive BFS oracle.

Closed forms depend only on the number of local factors n, the unit count
|U| = phi and the self-inverse count r. Three variants are kept:

``proof``
    The standard three-case form (default). Case 2 is the case-3
    expression with |U| = r.
``statement``
    An alternative case-2 form with coefficients 17/21 and 8/11. Kept to
    show that it disagrees with the oracle.
``corrected``
    Counts adjacent pairs directly. The other two forms treat only
    complementary idempotents (e, 1-e) as orthogonal; for n >= 3 there are
    3^n - 2^(n+1) + 1 ordered orthogonal pairs, not 2^n - 2.
    Agrees with ``proof`` whenever n = 2 or |U| = 1.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .errors import BudgetExceeded, FormulaViolation, InvalidInput, Unsupported
from .graph import DEFAULT_VERTEX_BUDGET, CleanGraph, build_clean_graph
from .rings import FactoredRing, count_self_inverse_closed_form, factorize

__all__ = [
    "VARIANTS",
    "WienerReport",
    "wiener_case",
    "wiener_closed_form",
    "wiener_formula",
    "wiener_zn",
    "wiener_oracle",
    "pairs_at_distance",
    "wiener_report",
]

VARIANTS = ("proof", "statement", "corrected")


def _half(numerator: int, what: str) -> int:
    if numerator % 2:
        raise FormulaViolation(f"{what}: odd numerator {numerator}, cannot halve exactly")
    return numerator // 2


def wiener_case(units: int, r: int) -> int:
    """1: U = {1}; 2: every unit self-inverse, |U| > 1; 3: some unit is not self-inverse."""
    if units == r:
        return 1 if r == 1 else 2
    return 3


def wiener_formula(n: int, units: int, r: int, variant: str = "proof") -> int:
    """Closed-form Wiener index from (n, |U|, r); n >= 2 local factors."""
    if variant not in VARIANTS:
        raise InvalidInput(f"unknown variant {variant!r}; expected one of {VARIANTS}")
    if n < 2:
        raise Unsupported("closed forms need n >= 2 local factors (the graph is disconnected otherwise)")
    if not 1 <= r <= units:
        raise InvalidInput(f"need 1 <= r <= |U|, got r={r}, |U|={units}")
    t = 2**n
    tt = t * t
    if variant == "corrected":
        idem = t - 1
        orth = 3**n - 2 * t + 1
        nv = idem * units
        ordered_edges = orth * units * (units - 1) + units * idem * idem - r * idem
        ordered_far = units * (units - 1) - (units - r)
        return _half(2 * nv * (nv - 1) - ordered_edges + ordered_far, "corrected")

    case = wiener_case(units, r)
    if case == 1:
        return _half((t - 2) * (t - 1), "case 1")
    if case == 2:
        if variant == "statement":
            num = r * r * (2 * tt - 17 * t + 21) - r * (2 * tt - 8 * t + 11)
            return _half(num, "case 2 (statement)")
        num = r * r * (2 * tt - 5 * t + 5) - r * (tt - 2 * t + 3)
        return _half(num, "case 2")
    num = units * units * (2 * tt - 5 * t + 5) - units * (tt - t + 3) + r * t
    return _half(num, "case 3")


def wiener_closed_form(ring: FactoredRing, variant: str = "proof") -> int:
    return wiener_formula(ring.n, ring.phi, ring.self_inverse_count, variant)


def wiener_zn(n: int, variant: str = "proof") -> int | float:
    """Wiener index of Cl2(Z/n); ``math.inf`` for prime powers.

    The default evaluates the Z/n specialisation
    ``(phi^2 (2*4^k - 5*2^k + 5) - phi (4^k - 2^k + 3) + 2^k r) / 2``
    with k distinct primes and r solutions of x^2 = 1 (mod n).
    """
    if not isinstance(n, int) or n < 2:
        raise InvalidInput(f"need n >= 2, got {n!r}")
    fs = factorize(n)
    k = len(fs)
    if k == 1:
        return math.inf
    phi = math.prod(p**a - p ** (a - 1) for p, a in fs)
    r = count_self_inverse_closed_form(n)
    if variant != "proof":
        return wiener_formula(k, phi, r, variant)
    t = 2**k
    num = phi * phi * (2 * t * t - 5 * t + 5) - phi * (t * t - t + 3) + t * r
    return _half(num, f"Z/{n} form")


def pairs_at_distance(g: CleanGraph, jobs: int = 1) -> dict[int, int]:
    """Unordered pair counts per finite distance d >= 1."""
    counts, _ = g.distance_tally(jobs)
    out = {}
    for d in range(1, len(counts)):
        c = int(counts[d])
        if c:
            out[d] = _half(c, f"ordered pairs at distance {d}")
    return out


def wiener_oracle(g: CleanGraph, jobs: int = 1) -> int | float:
    """Sum of BFS distances over unordered pairs; ``math.inf`` if disconnected."""
    counts, unreachable = g.distance_tally(jobs)
    if unreachable:
        return math.inf
    ordered = sum(d * int(c) for d, c in enumerate(counts))
    return _half(ordered, "ordered distance sum")


def _fmt(x) -> str | None:
    if x is None:
        return None
    return "inf" if x == math.inf else str(x)


@dataclass
class WienerReport:
    ring: str
    n: int
    case: int
    variant: str
    closed_form: int | float
    oracle: int | float | None = None
    pairs: dict[int, int] = field(default_factory=dict)
    variant_values: dict[str, int | float] = field(default_factory=dict)
    oracle_skipped: str | None = None

    @property
    def match(self) -> bool | None:
        if self.oracle is None:
            return None
        return self.closed_form == self.oracle

    def variant_matches(self) -> dict[str, bool | None]:
        if self.oracle is None:
            return {v: None for v in self.variant_values}
        return {v: val == self.oracle for v, val in self.variant_values.items()}

    def to_dict(self) -> dict:
        return {
            "ring": self.ring,
            "case": self.case,
            "variant": self.variant,
            "closed_form": _fmt(self.closed_form),
            "oracle": _fmt(self.oracle),
            "match": self.match,
            "pairs_at_distance": {str(d): c for d, c in sorted(self.pairs.items())},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def wiener_report(
    ring: FactoredRing,
    variant: str = "proof",
    budget: int = DEFAULT_VERTEX_BUDGET,
    graph: CleanGraph | None = None,
    jobs: int = 1,
) -> WienerReport:
    """Closed form next to the BFS oracle; the oracle half is skipped past the budget."""
    if variant not in VARIANTS:
        raise InvalidInput(f"unknown variant {variant!r}; expected one of {VARIANTS}")
    case = wiener_case(ring.phi, ring.self_inverse_count)
    if ring.n < 2:
        values = {v: math.inf for v in VARIANTS}
    else:
        values = {}
        for v in VARIANTS:
            try:
                values[v] = wiener_closed_form(ring, v)
            except FormulaViolation:
                values[v] = math.nan
    report = WienerReport(ring.label, ring.n, case, variant, values[variant], variant_values=values)
    try:
        g = graph if graph is not None else build_clean_graph(ring, budget)
    except BudgetExceeded as exc:
        report.oracle_skipped = str(exc)
        return report
    report.oracle = wiener_oracle(g, jobs)
    report.pairs = pairs_at_distance(g, jobs)
    return report
