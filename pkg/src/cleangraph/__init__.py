"""Clean graphs Cl2(R) of finite commutative rings R = Z/p1^a1 x ... x Z/pn^an.

Closed-form invariants (distances, Wiener index, self-inverse unit counts,
matching numbers) together with brute-force oracles that check them.
"""

__version__ = "0.1.0"

from .errors import BudgetExceeded, DomainError, FormulaViolation, InvalidInput, Unsupported
from .graph import (
    CleanGraph,
    CleanVertex,
    bfs_distance,
    bfs_distances,
    build_clean_graph,
    closed_form_distance,
    diameter,
    export_graph,
    is_adjacent,
    is_connected,
)
from .matching import (
    MatchingResult,
    construct_matching,
    matching_number_closed_form,
    maximum_matching_oracle,
    verify_matching,
)
from .rings import (
    FactoredRing,
    RingElement,
    count_self_inverse_closed_form,
    enumerate_idempotents,
    enumerate_units,
    factorize,
    make_ring,
    parse_ring_spec,
    ring_from_modulus,
)
from .wiener import WienerReport, wiener_closed_form, wiener_oracle, wiener_report, wiener_zn
