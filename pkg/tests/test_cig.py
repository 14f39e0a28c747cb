import random

import pytest

from cigkit import (
    ChartSet,
    Kind,
    NoInteraction,
    SchemaError,
    build_cig,
    cig_from_json,
    cig_to_dot,
    cig_to_json,
    classify_states,
    cross_services,
    find_switching_states,
    format_kinds,
    parse_statechart,
)
from oracles import random_interacting_pair

VM = "VendingMachine"
DISP = "Dispenser"

GOLDEN_DOT = """\
digraph CIG {
  node [shape=ellipse];
  subgraph cluster_0 {
    label="VendingMachine";
    style=dashed;
    "VendingMachine.NoCoins" [label="NoCoins\\n[G]"];
    "VendingMachine.SingleCoin" [label="SingleCoin\\n[P]"];
    "VendingMachine.MultipleCoins" [label="MultipleCoins\\n[P]"];
    "VendingMachine.Dispensing" [label="Dispensing\\n[R]"];
  }
  subgraph cluster_1 {
    label="Dispenser";
    style=dashed;
    "Dispenser.Empty" [label="Empty\\n[P,R]"];
    "Dispenser.Insufficient" [label="Insufficient\\n[P]"];
    "Dispenser.Enabled" [label="Enabled\\n[P]"];
  }
  "VendingMachine.SingleCoin" -> "Dispenser.Empty" [label="setCredit"];
  "VendingMachine.MultipleCoins" -> "Dispenser.Empty" [label="setCredit"];
  "Dispenser.Empty" -> "VendingMachine.Dispensing" [label="nok"];
  "Dispenser.Insufficient" -> "VendingMachine.Dispensing" [label="nok"];
  "Dispenser.Enabled" -> "VendingMachine.Dispensing" [label="ok"];
}
"""


def _pair(a_text, b_text):
    return ChartSet((parse_statechart(a_text), parse_statechart(b_text)))


def test_cross_services_fixture_map(fixture_charts):
    cross = cross_services(fixture_charts)
    assert set(cross) == {"setCredit", "dispense", "nok", "ok"}
    assert cross["setCredit"].emitters == ((VM, "SingleCoin"), (VM, "MultipleCoins"))
    assert cross["setCredit"].acceptors == ((DISP, "Empty"),)
    assert cross["dispense"].emitters == ((VM, "ReadyToDispense"),)
    assert cross["dispense"].acceptors == (
        (DISP, "Empty"),
        (DISP, "Insufficient"),
        (DISP, "Enabled"),
    )
    assert cross["nok"].emitters == ((DISP, "Empty"), (DISP, "Insufficient"))
    assert cross["nok"].acceptors == ((VM, "Dispensing"),)
    assert cross["ok"].emitters == ((DISP, "Enabled"),)
    assert cross["ok"].acceptors == ((VM, "Dispensing"),)


def test_cross_services_single_chart_empty(vending_chart):
    assert cross_services(ChartSet((vending_chart,))) == {}


def test_cross_services_disjoint_charts_empty():
    charts = _pair(
        "component A\nstate X\ninitial X\ntransition X -> X on go\nend\n",
        "component B\nstate Y\ninitial Y\ntransition Y -> Y on run\nend\n",
    )
    assert cross_services(charts) == {}


def test_find_switching_states_fixture(fixture_charts):
    assert find_switching_states(fixture_charts) == {(VM, "ReadyToDispense")}


def test_find_switching_states_none_without_automatics():
    charts = _pair(
        "component A\nstate X\ninitial X\ntransition X -> X on go do ping\nend\n",
        "component B\nstate Y\ninitial Y\ntransition Y -> Y on ping do pong\nend\n",
    )
    assert find_switching_states(charts) == frozenset()


def test_mixed_outgoing_state_is_not_switching():
    charts = _pair(
        "component A\nstate X\nstate Y\ninitial X\n"
        "transition X -> Y do ping\n"
        "transition X -> X on keep\n"
        "end\n",
        "component B\nstate Z\ninitial Z\ntransition Z -> Z on ping\nend\n",
    )
    assert find_switching_states(charts) == frozenset()


def test_classify_states_fixture(fixture_charts):
    classification = classify_states(fixture_charts)
    assert classification == {
        (VM, "NoCoins"): {Kind.INTERMEDIATE},
        (VM, "SingleCoin"): {Kind.PROVIDED},
        (VM, "MultipleCoins"): {Kind.PROVIDED},
        (VM, "ReadyToDispense"): {Kind.REMOVED},
        (VM, "Dispensing"): {Kind.REQUIRED},
        (DISP, "Empty"): {Kind.PROVIDED, Kind.REQUIRED},
        (DISP, "Insufficient"): {Kind.PROVIDED},
        (DISP, "Enabled"): {Kind.PROVIDED},
    }


def test_classify_disjoint_charts_all_intermediate():
    charts = _pair(
        "component A\nstate X\ninitial X\ntransition X -> X on go\nend\n",
        "component B\nstate Y\ninitial Y\ntransition Y -> Y on run\nend\n",
    )
    assert set(classify_states(charts).values()) == {frozenset({Kind.INTERMEDIATE})}


def test_format_kinds():
    assert format_kinds(frozenset({Kind.PROVIDED})) == "P"
    assert format_kinds(frozenset({Kind.REQUIRED, Kind.PROVIDED})) == "P,R"
    assert format_kinds(frozenset({Kind.INTERMEDIATE})) == "G"
    assert format_kinds(frozenset({Kind.REMOVED})) == "Removed"


def test_build_cig_fixture_golden(fixture_charts):
    cig = build_cig(fixture_charts)
    assert cig.components == (VM, DISP)
    assert cig.removed == ((VM, "ReadyToDispense"),)
    assert [(n.component, n.state, format_kinds(n.kinds)) for n in cig.nodes] == [
        (VM, "NoCoins", "G"),
        (VM, "SingleCoin", "P"),
        (VM, "MultipleCoins", "P"),
        (VM, "Dispensing", "R"),
        (DISP, "Empty", "P,R"),
        (DISP, "Insufficient", "P"),
        (DISP, "Enabled", "P"),
    ]
    assert [(e.source, e.target, str(e.service)) for e in cig.edges] == [
        ((VM, "SingleCoin"), (DISP, "Empty"), "setCredit"),
        ((VM, "MultipleCoins"), (DISP, "Empty"), "setCredit"),
        ((DISP, "Empty"), (VM, "Dispensing"), "nok"),
        ((DISP, "Insufficient"), (VM, "Dispensing"), "nok"),
        ((DISP, "Enabled"), (VM, "Dispensing"), "ok"),
    ]


def test_build_cig_minimal_interaction():
    charts = _pair(
        "component A\nstate W\nstate X\ninitial W\n"
        "transition W -> X on go\n"
        "transition X -> W on fire do alarm\n"
        "end\n",
        "component B\nstate Y\nstate Z\ninitial Y\ntransition Y -> Z on alarm\nend\n",
    )
    cig = build_cig(charts)
    assert [(e.source, e.target, str(e.service)) for e in cig.edges] == [
        (("A", "X"), ("B", "Y"), "alarm")
    ]


def test_build_cig_rejects_disjoint_charts():
    charts = _pair(
        "component A\nstate X\ninitial X\ntransition X -> X on go\nend\n",
        "component B\nstate Y\ninitial Y\ntransition Y -> Y on run\nend\n",
    )
    with pytest.raises(NoInteraction, match="share no services"):
        build_cig(charts)


def test_build_cig_rejects_interaction_lost_to_removal():
    # the only emitter is a switching state, so nothing is left afterwards
    charts = _pair(
        "component A\nstate X\nstate Y\ninitial X\ntransition X -> Y do ping\nend\n",
        "component B\nstate P\nstate Q\ninitial P\ntransition P -> Q on ping\nend\n",
    )
    with pytest.raises(NoInteraction, match="switching-state removal"):
        build_cig(charts)


def test_build_cig_requires_two_charts(vending_chart):
    with pytest.raises(ValueError):
        build_cig(ChartSet((vending_chart,)))


def test_cig_to_dot_golden(fixture_charts):
    assert cig_to_dot(build_cig(fixture_charts)) == GOLDEN_DOT


def test_cig_outputs_deterministic(fixture_charts):
    once = build_cig(fixture_charts)
    again = build_cig(fixture_charts)
    assert cig_to_dot(once) == cig_to_dot(again)
    assert cig_to_json(once) == cig_to_json(again)


def test_cig_json_round_trip(fixture_charts):
    cig = build_cig(fixture_charts)
    text = cig_to_json(cig)
    assert text.endswith("\n")
    back = cig_from_json(text)
    assert back == cig
    assert back.node(DISP, "Empty").kinds == {Kind.PROVIDED, Kind.REQUIRED}


def test_cig_json_schema_errors():
    with pytest.raises(SchemaError):
        cig_from_json("[]")
    with pytest.raises(SchemaError):
        cig_from_json('{"components": [], "removed": [], "nodes": []}')
    with pytest.raises(SchemaError):
        cig_from_json(
            '{"components": ["A"], "removed": [], '
            '"nodes": [{"component": "A", "state": "X", "kinds": ["Q"]}], "edges": []}'
        )


def test_random_pairs_respect_graph_laws():
    rng = random.Random(97)
    built = 0
    for _ in range(120):
        alpha, beta = random_interacting_pair(rng)
        charts = ChartSet((alpha, beta))
        try:
            cig = build_cig(charts)
        except NoInteraction:
            continue
        built += 1
        by_ref = {(n.component, n.state): n for n in cig.nodes}
        removed = set(cig.removed)
        chart_of = {c.component_name: c for c in charts}
        for node in cig.nodes:
            assert (node.component, node.state) not in removed
        for edge in cig.edges:
            assert edge.source[0] != edge.target[0]
            assert Kind.PROVIDED in by_ref[edge.source].kinds
            assert Kind.REQUIRED in by_ref[edge.target].kinds
            src_chart = chart_of[edge.source[0]]
            dst_chart = chart_of[edge.target[0]]
            assert any(
                a.action == edge.service
                for t in src_chart.outgoing(edge.source[1])
                for a in t.actions
            )
            assert any(
                t.event == edge.service for t in dst_chart.outgoing(edge.target[1])
            )
    assert built >= 30  # the generator must actually exercise the builder
