import json
import math

import networkx as nx
import pytest

from cleangraph.errors import FormulaViolation, InvalidInput, Unsupported
from cleangraph.graph import build_clean_graph, is_adjacent
from cleangraph.rings import make_ring, parse_ring_spec, ring_from_modulus
from cleangraph.wiener import (
    _half,
    VARIANTS,
    pairs_at_distance,
    wiener_case,
    wiener_closed_form,
    wiener_formula,
    wiener_oracle,
    wiener_report,
    wiener_zn,
)

from conftest import SMALL_SPECS


def oracle(spec):
    return wiener_oracle(build_clean_graph(parse_ring_spec(spec)))


def test_examples():
    assert wiener_zn(15) == 492 == oracle("15")
    assert wiener_zn(12) == 114 == oracle("12")
    r222 = make_ring([(2, 1)] * 3)
    assert wiener_closed_form(r222) == 21 == oracle("2^1*2^1*2^1")
    assert wiener_zn(4) == math.inf == oracle("4")


def test_printed_example_value_is_not_the_index():
    # 332 is the known-wrong fixture value for Z15; the formula and the graph both give 492.
    assert wiener_zn(15) != 332
    assert oracle("15") != 332
    assert pairs_at_distance(build_clean_graph(ring_from_modulus(15))) == {1: 86, 2: 164, 3: 26}


def test_statement_variant_case2_disagrees():
    ring = ring_from_modulus(12)
    assert wiener_case(ring.phi, ring.self_inverse_count) == 2
    assert wiener_closed_form(ring, "statement") == -142
    assert wiener_closed_form(ring, "proof") == 114


def test_case2_is_case3_with_all_units_self_inverse():
    for n in range(2, 11):
        t = 2**n
        for r in range(2, 65):
            case3 = (r * r * (2 * t * t - 5 * t + 5) - r * (t * t - t + 3) + r * t) // 2
            assert wiener_formula(n, r, r) == case3


def test_case1():
    for n in range(2, 12):
        t = 2**n
        assert wiener_formula(n, 1, 1) == (t - 2) * (t - 1) // 2
        # Cl2 of F_2^n is complete on 2^n - 1 vertices
        nv = t - 1
        assert wiener_formula(n, 1, 1) == nv * (nv - 1) // 2


@pytest.mark.parametrize("spec", [s for s in SMALL_SPECS if parse_ring_spec(s).n >= 2])
def test_corrected_matches_oracle(spec):
    ring = parse_ring_spec(spec)
    assert wiener_closed_form(ring, "corrected") == oracle(spec)


@pytest.mark.parametrize("spec", ["6", "10", "12", "15", "20", "21", "36", "2^1*2^1", "3^1*3^1", "5*5", "2^3*3", "2^2*7^2"])
def test_proof_matches_oracle_for_two_factors(spec):
    ring = parse_ring_spec(spec)
    assert ring.n == 2
    assert wiener_closed_form(ring) == oracle(spec)


@pytest.mark.parametrize("spec", ["30", "42", "60", "3^1*3^1*2^1", "105", "210"])
def test_proof_overcounts_for_three_or_more_factors(spec):
    # For n >= 3 with |U| > 1 the default form misses orthogonal pairs
    # beyond complementary ones; the graph has more edges than it assumes.
    ring = parse_ring_spec(spec)
    assert ring.n >= 3 and ring.phi > 1
    proof, corr = wiener_closed_form(ring), wiener_closed_form(ring, "corrected")
    assert corr == oracle(spec) < proof


def test_large_values():
    assert oracle("30") == 2588 and wiener_zn(30) == 2756
    assert oracle("210") == 457048 and wiener_zn(210) == 497656
    assert wiener_zn(210, "corrected") == 457048


def test_unit_only_rings_agree_for_all_n():
    for n in range(2, 6):
        spec = "*".join(["2^1"] * n)
        assert oracle(spec) == wiener_closed_form(parse_ring_spec(spec)) == (2**n - 1) * (2**n - 2) // 2


def test_against_networkx():
    for spec in ("15", "12", "30", "2^1*2^1*2^1"):
        g = build_clean_graph(parse_ring_spec(spec))
        G = nx.Graph()
        G.add_nodes_from(range(g.num_vertices))
        G.add_edges_from((a, b) for a in range(g.num_vertices) for b in range(a + 1, g.num_vertices) if is_adjacent(g, a, b))
        assert int(nx.wiener_index(G)) == wiener_oracle(g)


def test_relabeling_invariance():
    # the same ring listed with factors in another order
    a = wiener_oracle(build_clean_graph(make_ring([(3, 1), (5, 1)])))
    b = wiener_oracle(build_clean_graph(make_ring([(5, 1), (3, 1)])))
    assert a == b == 492


@pytest.mark.parametrize("spec", ["15", "30", "60", "3^1*3^1*2^1"])
def test_histogram_invariants(spec):
    ring = parse_ring_spec(spec)
    g = build_clean_graph(ring)
    pairs = pairs_at_distance(g)
    nv = g.num_vertices
    assert sum(pairs.values()) == nv * (nv - 1) // 2
    assert pairs[1] == g.num_edges
    assert sum(d * c for d, c in pairs.items()) == wiener_oracle(g)
    assert max(pairs) == 3
    # distance 3 only between identity vertices with non-inverse units
    phi, r = ring.phi, ring.self_inverse_count
    assert pairs[3] == (phi * (phi - 1) - (phi - r)) // 2


def test_report():
    rep = wiener_report(ring_from_modulus(15))
    assert rep.closed_form == 492 and rep.oracle == 492 and rep.match
    assert rep.case == 3
    doc = json.loads(rep.to_json())
    assert doc == {
        "ring": "15",
        "case": 3,
        "variant": "proof",
        "closed_form": "492",
        "oracle": "492",
        "match": True,
        "pairs_at_distance": {"1": 86, "2": 164, "3": 26},
    }
    rep30 = wiener_report(ring_from_modulus(30))
    assert not rep30.match
    assert rep30.variant_matches() == {"proof": False, "statement": False, "corrected": True}


def test_report_edge_cases():
    rep = wiener_report(ring_from_modulus(4))
    assert json.loads(rep.to_json())["closed_form"] == "inf" and rep.oracle == math.inf and rep.match
    big = wiener_report(make_ring([(p, 1) for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29)]), budget=1000)
    assert big.oracle is None and big.match is None and "budget" in big.oracle_skipped
    with pytest.raises(InvalidInput):
        wiener_report(ring_from_modulus(15), variant="bogus")


def test_formula_parity_and_errors():
    # every case numerator is even on real rings
    for n in range(6, 3000):
        if len(ring_from_modulus(n).factors) >= 2:
            for v in VARIANTS:
                wiener_zn(n, v)
    for n in range(2, 8):
        for u in range(1, 40):
            for r in range(1, u + 1):
                for v in VARIANTS:
                    wiener_formula(n, u, r, v)  # numerators stay even even off real rings
    with pytest.raises(FormulaViolation):
        _half(7, "probe")
    with pytest.raises(Unsupported):
        wiener_formula(1, 2, 2)
    with pytest.raises(InvalidInput):
        wiener_formula(2, 2, 3)
    with pytest.raises(InvalidInput):
        wiener_formula(2, 2, 2, "other")
    for bad in (0, 1, -3, 2.5):
        with pytest.raises(InvalidInput):
            wiener_zn(bad)
