from fractions import Fraction

from netbargain import (
    certify_expansion_case,
    certify_gap_case,
    expansion_instance,
    gap_instance,
    make_instance,
)

GAP_ITEM_NAMES = [
    "unique-maximum-c-matching",
    "uniform-allocation-in-core-and-prekernel",
    "forced-splits-break-balance-at-B-C",
    "no-balanced-solution-with-uniform-payoff",
    "balanced-fixture-verified-exactly",
    "balanced-allocation-in-core-and-prekernel",
]


def test_gap_case_certifications():
    transcript = certify_gap_case()
    assert [item.name for item in transcript.items] == GAP_ITEM_NAMES
    by_name = {item.name: item for item in transcript.items}
    for name in GAP_ITEM_NAMES[:5]:
        assert by_name[name].ok, by_name[name].detail
    # the balanced allocation is in the core but has asymmetric powers on the
    # pair A-B (exhaustively certified); this last item therefore fails
    last = by_name["balanced-allocation-in-core-and-prekernel"]
    assert not last.ok
    assert "core=True" in last.detail and "prekernel=False" in last.detail
    assert not transcript.ok


def test_gap_case_sensitive_to_chord_weight():
    weights = {
        ("A", "B"): 10, ("B", "C"): 20, ("C", "D"): 30, ("D", "E"): 10,
        ("E", "F"): 20, ("A", "F"): 30, ("B", "E"): 11,
    }
    perturbed = make_instance(
        [(v, 2) for v in "ABCDEF"], [(u, v, w) for (u, v), w in weights.items()]
    )
    transcript = certify_gap_case(perturbed)
    by_name = {item.name: item for item in transcript.items}
    assert not by_name["uniform-allocation-in-core-and-prekernel"].ok
    assert not by_name["balanced-fixture-verified-exactly"].ok


def test_gap_case_with_unit_capacities_reports_mismatch():
    squeezed = make_instance(
        [(v, 1) for v in "ABCDEF"],
        [(u, v, w) for u, v, w in gap_instance().edges],
    )
    transcript = certify_gap_case(squeezed)
    assert not transcript.ok
    assert not transcript.items[0].ok  # the optimum is no longer the outer cycle
    rendered = transcript.render()
    assert "FAIL" in rendered


def test_expansion_case_green():
    transcript = certify_expansion_case()
    assert transcript.ok
    assert len(transcript.items) == 4
    assert "all certifications green" in transcript.render()


def test_expansion_case_copy_count_sensitivity():
    transcript = certify_expansion_case(u_capacity=3)
    by_name = {item.name: item for item in transcript.items}
    assert not by_name["copy-counts"].ok


def test_expansion_instance_shape():
    instance, matching = expansion_instance()
    assert instance.capacity["u"] == 4
    assert matching.degree_of("u") == 2
    assert all(w == Fraction(1) for _, _, w in instance.edges)
