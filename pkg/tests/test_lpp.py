import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from taskgraph_works.errors import InvalidEcosystem
from taskgraph_works.lpp import (
    INACCESSIBLE,
    LPP,
    TRIVIAL,
    EcosystemConfig,
    lpp_accessible,
    lpp_threshold,
    novice_time,
    onion_layers,
    report_dot,
    report_json,
    trivially_accessible,
    upskilled_cost,
)
from taskgraph_works.model import load_graph, validate_graph

CFG = EcosystemConfig(e_normal=1, slowdown=2, deadline=5)


def pair(pre_size, size, d):
    return validate_graph([("u", pre_size), ("v", size)], [("u", "v", d)])


@st.composite
def ecosystems(draw):
    n = draw(st.integers(1, 7))
    nodes = [(f"n{i}", draw(st.floats(0.05, 4))) for i in range(n)]
    edges = [(f"n{i}", f"n{j}", draw(st.floats(0, 1))) for i in range(n) for j in range(i + 1, n) if draw(st.booleans())]
    cfg = EcosystemConfig(draw(st.floats(0.5, 2)), draw(st.floats(1.1, 4)), draw(st.floats(1, 10)))
    return validate_graph(nodes, edges), cfg


class TestCosts:
    def test_upskilled_cost(self):
        assert upskilled_cost(validate_graph([("v", 2.4)]), CFG, "v") == 2.4
        assert upskilled_cost(pair(2.4, 0.2, 1), CFG, "v") == pytest.approx(2.6)
        assert upskilled_cost(pair(2.4, 0.2, 1), EcosystemConfig(2, 2, 5), "v") == pytest.approx(1.3)

    def test_novice_time(self):
        g = pair(2.4, 0.2, 1)
        assert novice_time(g, CFG, "v", set()) == pytest.approx(5.2)
        assert novice_time(g, CFG, "v", {"u"}) == pytest.approx(2.8)

    def test_trivial(self):
        g = validate_graph([("a", 2.4), ("b", 2.6)])
        assert trivially_accessible(g, CFG) == {"a"}
        assert trivially_accessible(g, EcosystemConfig(1, 1.0001, 5)) == {"a", "b"}

    @pytest.mark.parametrize("kwargs", [{"e_normal": 0, "slowdown": 2, "deadline": 1}, {"e_normal": 1, "slowdown": 1, "deadline": 1}, {"e_normal": 1, "slowdown": 2, "deadline": 0}])
    def test_invalid_config(self, kwargs):
        with pytest.raises(InvalidEcosystem):
            EcosystemConfig(**kwargs)


class TestAccessibility:
    def test_unlocked_by_prerequisite(self):
        rep = lpp_accessible(pair(2.4, 0.2, 1), CFG)
        assert rep.nodes["u"].status == TRIVIAL and rep.nodes["u"].layer == 0
        v = rep.nodes["v"]
        assert v.status == LPP and v.layer == 1
        assert v.upskilled_time == pytest.approx(2.6)
        assert v.upskilled_share == pytest.approx(0.92308, abs=1e-5)
        assert v.threshold == pytest.approx(0.076923, abs=1e-6)

    def test_boundary_equality(self):
        g = pair(9.2, 0.2, 0.5)
        check = lpp_threshold(g, CFG, "v", {"u"})
        assert check.upskilled_share == pytest.approx(0.95833, abs=1e-5)
        assert check.threshold == pytest.approx(0.95833, abs=1e-5)
        assert check.novice_time == pytest.approx(5.0)
        assert check.holds
        # u itself is out of reach (novice time 18.4), so the full fixpoint cannot use it.
        rep = lpp_accessible(g, CFG)
        assert rep.accessible() == frozenset()

    def test_isolated_at_deadline(self):
        rep = lpp_accessible(validate_graph([("v", 5)]), CFG)
        v = rep.nodes["v"]
        assert v.status == INACCESSIBLE and v.upskilled_share == 0 and v.threshold > 0 and v.layer is None


class TestLayers:
    def test_pair(self):
        assert onion_layers(pair(2.4, 0.2, 1), CFG).layers == (("u",), ("v",))

    def test_all_trivial(self):
        layers = onion_layers(validate_graph([("a", 1), ("b", 2), ("c", 0.5)], [("a", "b", 0.1)]), CFG)
        assert layers.layers == (("a", "b", "c"),) and layers.inaccessible == ()

    def test_chain_of_three(self, data_dir):
        layers = onion_layers(load_graph(data_dir / "lpp_chain.json"), CFG)
        assert layers.layers == (("a",), ("b",), ("c",))


def test_outputs_are_stable():
    g = pair(2.4, 0.2, 1)
    rep = lpp_accessible(g, CFG)
    payload = json.loads(report_json(rep, CFG))
    assert payload["nodes"]["v"]["status"] == "lpp"
    assert report_json(rep, CFG) == report_json(lpp_accessible(g, CFG), CFG)
    dot = report_dot(g, rep)
    assert dot.startswith("digraph lpp {") and '"u" -> "v"' in dot and "layer_1" in dot


@settings(max_examples=200, deadline=None)
@given(ecosystems())
def test_fixpoint_matches_threshold(eco):
    g, cfg = eco
    rep = lpp_accessible(g, cfg)
    final = rep.accessible()
    for v in g.order:
        check = lpp_threshold(g, cfg, v, final)
        assert (v in final) == check.holds
        assert (v in final) == (check.novice_time <= cfg.deadline + 1e-9)


@settings(max_examples=100, deadline=None)
@given(ecosystems(), st.floats(1.0, 2.0))
def test_more_time_never_shrinks_access(eco, factor):
    g, cfg = eco
    looser = EcosystemConfig(cfg.e_normal, cfg.slowdown, cfg.deadline * factor)
    assert lpp_accessible(g, cfg).accessible() <= lpp_accessible(g, looser).accessible()
