import math

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from conftest import GOLDEN_D, single_node, three_workers
from taskgraph_works.errors import (
    AllocationNegative,
    InconsistentObservations,
    MalformedAssignment,
    ParseError,
    PositivityViolated,
    UnknownSubtask,
    UnknownWorker,
)
from taskgraph_works.execution import (
    Assignment,
    assignment_from_dict,
    assignment_to_dict,
    check_feasible,
    closed_form_v_feasible,
    estimate_interdependency,
    execute_subtask,
    geometric_capacity,
    load_assignment,
    prerequisite_context_time,
)
from taskgraph_works.model import Worker, WorkerPool, load_graph, load_pool, validate_graph

IJK = ("w0", "w1", "w2")


class TestExampleOne:
    def test_no_interdependency(self):
        ex = execute_subtask(single_node(10, 0), "v", IJK, (5, 5, 5), three_workers())
        assert [s.contribution for s in ex.steps] == [5, 5, 0]
        assert [s.active for s in ex.steps] == [True, True, False]
        assert ex.feasible

    def test_golden_ratio_interdependency(self):
        ex = execute_subtask(single_node(10, GOLDEN_D), "v", IJK, (5, 5, 5), three_workers())
        assert [s.context_time for s in ex.steps] == pytest.approx([0, 1.909830, 3.090170], abs=1e-6)
        assert [s.contribution for s in ex.steps] == pytest.approx([5, 3.090170, 1.909830], abs=1e-6)
        assert ex.completed_work == pytest.approx(10, abs=1e-9)
        assert ex.feasible

    def test_full_interdependency(self):
        ex = execute_subtask(single_node(10, 1), "v", IJK, (5, 5, 5), three_workers())
        assert [s.context_time for s in ex.steps] == [0, 5, 5]
        assert [s.contribution for s in ex.steps] == [5, 0, 0]
        assert not ex.feasible

    def test_golden_case_uses_all_time(self):
        report, trace = check_feasible(
            single_node(10, GOLDEN_D), Assignment({"v": (IJK, (5, 5, 5))}), three_workers()
        )
        assert report.feasible and report.first_violation is None
        assert all(abs(x) < 1e-9 for x in report.slack.values())
        assert trace.total_completed_work == pytest.approx(10)

    def test_bundled_files(self, data_dir):
        a = load_assignment(data_dir / "handoff_assignment.json")
        pool = load_pool(data_dir / "handoff_pool.json")
        verdicts = [check_feasible(load_graph(data_dir / f"handoff_{t}.json"), a, pool)[0].feasible
                    for t in ("d0", "golden", "d1")]
        assert verdicts == [True, True, False]


class TestPrerequisites:
    g = validate_graph([("u", 4), ("v", 6)], [("u", "v", 0.5)])

    def test_none(self):
        assert prerequisite_context_time(self.g, "u", Worker("a", 1)) == 0

    def test_one(self):
        assert prerequisite_context_time(self.g, "v", Worker("a", 1)) == 2.0
        assert prerequisite_context_time(self.g, "v", Worker("a", 1, {"u": 2})) == 1.0

    def test_chain_feasible(self):
        pool = WorkerPool([Worker("a", 4), Worker("b", 10)])
        report, trace = check_feasible(self.g, Assignment({"u": (["a"], [4]), "v": (["b"], [6])}), pool)
        assert report.feasible
        assert trace.worker_time["b"] == pytest.approx(8)
        assert report.slack["b"] == pytest.approx(2)

    def test_budget_overrun(self):
        pool = WorkerPool([Worker("a", 4), Worker("b", 7.5)])
        report, _ = check_feasible(self.g, Assignment({"u": (["a"], [4]), "v": (["b"], [6])}), pool)
        assert not report.feasible
        assert "over budget" in report.first_violation
        assert report.node_feasible == {"u": True, "v": True}

    def test_unassigned_node_is_incomplete(self):
        report, _ = check_feasible(self.g, Assignment({"u": (["a"], [4])}), WorkerPool([Worker("a", 4)]))
        assert report.node_feasible["v"] is False
        assert "'v'" in report.first_violation


def test_context_reuse_charges_shared_prerequisite_once():
    g = validate_graph([("u", 4), ("v", 1), ("x", 1)], [("u", "v", 0.5), ("u", "x", 0.25)])
    pool = WorkerPool([Worker("a", 4), Worker("b", 4.5)])
    a = Assignment({"u": (["a"], [4]), "v": (["b"], [1]), "x": (["b"], [1])})
    plain, trace = check_feasible(g, a, pool)
    assert trace.worker_time["b"] == pytest.approx(1 + 2 + 1 + 1)
    assert not plain.feasible
    shared, trace = check_feasible(g, a, pool, context_reuse=True)
    assert trace.worker_time["b"] == pytest.approx(1 + 1 + 2)
    assert shared.feasible


def test_empty_assignment_on_empty_graph():
    report, trace = check_feasible(validate_graph([]), Assignment(), WorkerPool([]))
    assert report.feasible and trace.total_completed_work == 0


class TestAssignmentValidation:
    def test_malformed(self):
        with pytest.raises(MalformedAssignment):
            Assignment({"v": (["a", "b"], [1])})

    def test_negative(self):
        with pytest.raises(AllocationNegative):
            Assignment({"v": (["a"], [-1])})

    def test_unknown_worker(self):
        with pytest.raises(UnknownWorker):
            check_feasible(single_node(1, 0), Assignment({"v": (["ghost"], [1])}), three_workers())

    def test_unknown_subtask(self):
        with pytest.raises(UnknownSubtask):
            check_feasible(single_node(1, 0), Assignment({"zz": (["w0"], [1])}), three_workers())

    def test_json(self):
        a = Assignment({"v": (["w0", "w1"], [1.5, 2])})
        assert assignment_to_dict(assignment_from_dict(assignment_to_dict(a))) == assignment_to_dict(a)
        with pytest.raises(ParseError):
            assignment_from_dict({"v": {"workers": ["a"], "times": ["1"]}})
        with pytest.raises(ParseError):
            assignment_from_dict({"v": {"workers": ["a"]}})


def test_trace_csv():
    _, trace = check_feasible(single_node(10, 0), Assignment({"v": (IJK, (5, 5, 5))}), three_workers())
    lines = trace.to_csv().splitlines()
    assert lines[0] == "node,step,worker,context,contribution,cumulative"
    assert lines[1:] == ["v,1,w0,0.0,5.0,5.0", "v,2,w1,0.0,5.0,10.0", "v,3,w2,0.0,0.0,10.0"]


class TestClosedForm:
    def test_geometric_sum(self):
        assert geometric_capacity([5, 5, 5], 0.5) == pytest.approx(8.75)
        assert geometric_capacity([1, 2, 3], 0) == 6
        assert geometric_capacity([], 0.3) == 0

    def test_boundary(self):
        assert closed_form_v_feasible(single_node(8.75, 0.5), "v", IJK, (5, 5, 5), three_workers())
        assert not closed_form_v_feasible(single_node(8.76, 0.5), "v", IJK, (5, 5, 5), three_workers())

    def test_additive_when_independent(self):
        assert closed_form_v_feasible(single_node(15, 0), "v", IJK, (5, 5, 5), three_workers())
        assert not closed_form_v_feasible(single_node(15.01, 0), "v", IJK, (5, 5, 5), three_workers())

    def test_positivity_violated(self):
        with pytest.raises(PositivityViolated):
            closed_form_v_feasible(single_node(10, 1), "v", IJK, (5, 5, 5), three_workers())

    @settings(max_examples=300, deadline=None)
    @given(
        st.lists(st.tuples(st.floats(0.2, 5), st.floats(0.1, 10)), min_size=1, max_size=7),
        st.floats(0, 1),
        st.floats(0.05, 1.5),
    )
    def test_matches_simulation(self, crew, d, fraction):
        pool = WorkerPool([Worker(f"w{i}", 10, default_expertise=e) for i, (e, _) in enumerate(crew)])
        ids = [w.id for w in pool]
        times = [r for _, r in crew]
        cap = geometric_capacity([e * r for e, r in crew], d)
        g = single_node(cap * fraction, d)
        ex = execute_subtask(g, "v", ids, times, pool)
        assume(all(s.active and s.contribution > 0 for s in ex.steps))
        assume(abs(cap - g.sizes["v"]) > 1e-7 * cap)
        assert closed_form_v_feasible(g, "v", ids, times, pool) == ex.feasible


class TestEstimate:
    def test_handoff_example(self):
        est = estimate_interdependency(10, 1, 5, 8)
        assert est.size == 10 and est.d == pytest.approx(0.6) and not est.clamped

    def test_no_extra_time(self):
        assert estimate_interdependency(10, 1, 5, 5).d == 0

    def test_full(self):
        assert estimate_interdependency(10, 1, 5, 10).d == pytest.approx(1)

    def test_clamped(self):
        est = estimate_interdependency(10, 1, 5, 12)
        assert est.d == 1 and est.clamped and est.raw_d == pytest.approx(1.4)

    def test_inconsistent(self):
        with pytest.raises(InconsistentObservations):
            estimate_interdependency(10, 1, 5, 4)
        with pytest.raises(InconsistentObservations):
            estimate_interdependency(10, 1, 12, 4)

    @given(st.floats(1, 50), st.floats(0.1, 0.9), st.floats(0, 1))
    def test_recovers_planted_d(self, solo, split, d):
        first = solo * split
        # Second worker absorbs d * (work done so far) then finishes the rest.
        second = d * first + (solo - first)
        assert estimate_interdependency(solo, 1, first, second).d == pytest.approx(d, abs=1e-9)
