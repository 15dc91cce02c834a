"""Coverability, coverability sets, termination, and their oracles."""

import random

import pytest

from gen import random_lcs, random_vass, random_vector_target, random_word_target
from wsts.analyses import (
    backward_coverability,
    bounded_forward_oracle,
    boundedness,
    build_rrt,
    control_state_reachability,
    karp_miller,
    km_to_dot,
    replay_witness,
    rrt_to_dot,
    termination,
)
from wsts.errors import BudgetExceededError, UnsupportedAnalysisError, UsageError
from wsts.models import CounterInstruction, CounterMachine, VassModel, VassTransition
from wsts.orders import MARKING_ORDER, Configuration, is_omega, maximal_elements, minimize


def producer_consumer():
    return VassModel(
        2,
        ("q0", "q1"),
        (
            VassTransition("t1", "q0", "q0", "a", (0, 0), (1, 0)),
            VassTransition("t2", "q0", "q1", "b", (1, 0), (-1, 1)),
        ),
        Configuration("q0", (0, 0)),
    )


def oracle_coverable(oracle, target, order):
    return any(order.leq(target, c) for c in oracle.reachable)


def clover_covers(km, target):
    lifted = Configuration(target.state, tuple(target.payload))
    return any(MARKING_ORDER.leq(lifted, c) for c in km.clover)


def lasso_exists(model, reachable):
    """Cycle among the (conclusively explored) reachable configurations."""
    remaining = set(reachable)
    changed = True
    while changed:
        changed = False
        for c in list(remaining):
            if not any(s in remaining for _, s in model.successors(c)):
                remaining.discard(c)
                changed = True
    return bool(remaining)


class TestBackwardCoverability:
    def test_producer_consumer_coverable(self):
        m = producer_consumer()
        r = backward_coverability(m, Configuration("q1", (0, 1)))
        assert r.verdict == "coverable"
        assert r.witness == ("t1", "t2")

    def test_second_counter_never_grows_at_home(self):
        m = producer_consumer()
        r = backward_coverability(m, Configuration("q0", (0, 1)))
        assert r.verdict == "not-coverable"
        assert r.witness is None

    def test_target_equal_to_init(self):
        m = producer_consumer()
        r = backward_coverability(m, m.init)
        assert r.verdict == "coverable"
        assert r.witness == ()

    def test_final_basis_is_a_fixpoint(self):
        rng = random.Random(51)
        for _ in range(10):
            m = random_vass(rng)
            target = random_vector_target(rng, m)
            r = backward_coverability(m, target)
            pres = [
                pre for s in r.basis.elements for _, pre in m.pre_elements(s)
            ]
            grown = r.basis.union(minimize(pres, m.order))
            assert r.basis.includes(grown) and grown.includes(r.basis)

    def test_agreement_with_oracle_and_witness_replay(self):
        rng = random.Random(52)
        conclusive = 0
        for _ in range(30):
            m = random_vass(rng)
            target = random_vector_target(rng, m)
            r = backward_coverability(m, target)
            if r.verdict == "coverable":
                final = replay_witness(m, r.witness)[-1]
                assert m.order.leq(target, final)
            oracle = bounded_forward_oracle(m, 8)
            if not oracle.conclusive:
                continue
            conclusive += 1
            assert (r.verdict == "coverable") == oracle_coverable(oracle, target, m.order)
        assert conclusive >= 5

    def test_reset_machine_backward(self):
        m = VassModel(
            2,
            ("q",),
            (
                VassTransition("t1", "q", "q", "a", (0, 0), (1, 0)),
                VassTransition("t2", "q", "q", "r", (0, 0), (0, 1), frozenset({0})),
            ),
            Configuration("q", (0, 0)),
        )
        r = backward_coverability(m, Configuration("q", (1, 1)))
        assert r.verdict == "coverable"
        final = replay_witness(m, r.witness)[-1]
        assert m.order.leq(Configuration("q", (1, 1)), final)

    def test_rejects_model_without_backward_interface(self):
        cm = CounterMachine(
            1,
            ("q",),
            (CounterInstruction("i", "q", "q", "zero", 0),),
            Configuration("q", (0,)),
        )
        with pytest.raises(UnsupportedAnalysisError):
            backward_coverability(cm, Configuration("q", (0,)))

    def test_basis_budget(self):
        m = producer_consumer()
        with pytest.raises(BudgetExceededError):
            backward_coverability(m, Configuration("q1", (0, 3)), budget_basis=1)


class TestControlStateReachability:
    def test_init_state_immediately_coverable(self):
        m = producer_consumer()
        r = control_state_reachability(m, "q0")
        assert r.verdict == "coverable" and r.witness == ()

    def test_reachable_target_state(self):
        m = producer_consumer()
        assert control_state_reachability(m, "q1").verdict == "coverable"

    def test_isolated_state(self):
        m = VassModel(
            1,
            ("q0", "zzz"),
            (VassTransition("t", "q0", "q0", "a", (0,), (1,)),),
            Configuration("q0", (0,)),
        )
        assert control_state_reachability(m, "zzz").verdict == "not-coverable"

    def test_unknown_state(self):
        with pytest.raises(UsageError):
            control_state_reachability(producer_consumer(), "nope")


class TestKarpMiller:
    def test_single_increment_loop(self):
        m = VassModel(
            2,
            ("q",),
            (VassTransition("t1", "q", "q", "a", (0, 0), (1, 0)),),
            Configuration("q", (0, 0)),
        )
        km = karp_miller(m)
        assert len(km.clover) == 1
        marking = km.clover[0].payload
        assert is_omega(marking[0]) and marking[1] == 0

    def test_strictly_decreasing_counter(self):
        m = VassModel(
            1,
            ("q",),
            (VassTransition("t", "q", "q", "a", (1,), (-1,)),),
            Configuration("q", (3,)),
        )
        km = karp_miller(m)
        assert km.clover == (Configuration("q", (3,)),)

    def test_two_transition_saturation(self):
        m = VassModel(
            2,
            ("q",),
            (
                VassTransition("t1", "q", "q", "a", (0, 0), (1, 0)),
                VassTransition("t2", "q", "q", "b", (1, 0), (-1, 1)),
            ),
            Configuration("q", (0, 0)),
        )
        km = karp_miller(m)
        assert len(km.clover) == 1
        assert all(is_omega(v) for v in km.clover[0].payload)

    def test_rejects_resets(self):
        m = VassModel(
            1,
            ("q",),
            (VassTransition("t", "q", "q", "a", (0,), (0,), frozenset({0})),),
            Configuration("q", (0,)),
        )
        with pytest.raises(UnsupportedAnalysisError):
            karp_miller(m)

    def test_node_budget(self):
        with pytest.raises(BudgetExceededError):
            karp_miller(producer_consumer(), budget_states=2)

    def test_acceleration_adds_omegas(self):
        from wsts.orders import omega_add

        rng = random.Random(53)
        for _ in range(15):
            m = random_vass(rng)
            km = karp_miller(m)
            for node in km.nodes:
                if not node.accelerated:
                    continue
                t = m.transition(node.tid)
                raw = tuple(
                    omega_add(v, d)
                    for v, d in zip(node.parent.marking.payload, t.delta)
                )
                raw_omegas = sum(1 for v in raw if is_omega(v))
                now_omegas = sum(1 for v in node.marking.payload if is_omega(v))
                assert now_omegas > raw_omegas

    def test_soundness_and_exactness_against_oracle(self):
        rng = random.Random(54)
        exact_checked = 0
        for _ in range(30):
            m = random_vass(rng)
            km = karp_miller(m)
            oracle = bounded_forward_oracle(m, 6)
            for c in oracle.reachable:
                assert clover_covers(km, c)
            omega_free = not any(
                is_omega(v) for c in km.clover for v in c.payload
            )
            if omega_free and oracle.conclusive:
                exact_checked += 1
                expected = maximal_elements(oracle.reachable, m.order)
                assert set(km.clover) == set(expected)
        assert exact_checked >= 5

    def test_forward_backward_agreement(self):
        rng = random.Random(55)
        for _ in range(30):
            m = random_vass(rng)
            km = karp_miller(m)
            target = random_vector_target(rng, m)
            r = backward_coverability(m, target)
            assert (r.verdict == "coverable") == clover_covers(km, target)

    def test_dot_output(self):
        m = VassModel(
            2,
            ("q",),
            (VassTransition("t1", "q", "q", "a", (0, 0), (1, 0)),),
            Configuration("q", (0, 0)),
        )
        dot = km_to_dot(karp_miller(m))
        assert dot.startswith("digraph km {")
        assert 'style="dashed"' in dot
        assert 'shape="doublecircle"' in dot
        assert dot.rstrip().endswith("}")


class TestTerminationAndBoundedness:
    def test_decreasing_counter_terminates(self):
        m = VassModel(
            1,
            ("q",),
            (VassTransition("t", "q", "q", "a", (1,), (-1,)),),
            Configuration("q", (3,)),
        )
        assert termination(m).terminates
        assert boundedness(m).bounded

    def test_idle_loop_runs_forever_but_is_bounded(self):
        m = VassModel(
            1,
            ("q",),
            (VassTransition("t", "q", "q", "a", (0,), (0,)),),
            Configuration("q", (0,)),
        )
        r = termination(m)
        assert not r.terminates
        assert r.witness.pump == ("t",)
        assert boundedness(m).bounded

    def test_increment_loop_unbounded(self):
        m = VassModel(
            1,
            ("q",),
            (VassTransition("t", "q", "q", "a", (0,), (1,)),),
            Configuration("q", (0,)),
        )
        r = boundedness(m)
        assert not r.bounded
        assert r.witness.pump == ("t",)
        assert not termination(m).terminates

    def test_witnesses_replay_and_pump(self):
        rng = random.Random(56)
        pumped = 0
        for _ in range(60):
            m = random_vass(rng)
            b = boundedness(m)
            if b.bounded:
                continue
            pumped += 1
            prefix_end = replay_witness(m, b.witness.prefix)[-1]
            once = replay_witness(m, b.witness.pump, start=prefix_end)[-1]
            assert m.order.leq(prefix_end, once) and prefix_end != once
            twice = replay_witness(m, b.witness.pump, start=once)[-1]
            assert m.order.leq(once, twice) and once != twice
        assert pumped >= 5

    def test_termination_witness_pumps(self):
        rng = random.Random(57)
        for _ in range(30):
            m = random_vass(rng)
            r = termination(m)
            if r.terminates:
                continue
            prefix_end = replay_witness(m, r.witness.prefix)[-1]
            once = replay_witness(m, r.witness.pump, start=prefix_end)[-1]
            assert m.order.leq(prefix_end, once)
            again = replay_witness(m, r.witness.pump, start=once)[-1]
            assert m.order.leq(once, again)

    def test_agreement_with_lasso_oracle(self):
        rng = random.Random(58)
        conclusive = 0
        for _ in range(30):
            m = random_vass(rng)
            oracle = bounded_forward_oracle(m, 8)
            if not oracle.conclusive:
                assert not boundedness(m).bounded or True
                continue
            conclusive += 1
            assert boundedness(m).bounded
            expects_lasso = lasso_exists(m, oracle.reachable)
            assert termination(m).terminates == (not expects_lasso)
        assert conclusive >= 5

    def test_boundedness_matches_clover_omegas(self):
        rng = random.Random(59)
        for _ in range(25):
            m = random_vass(rng)
            km = karp_miller(m)
            has_omega = any(is_omega(v) for c in km.clover for v in c.payload)
            assert boundedness(m).bounded == (not has_omega)

    def test_termination_allows_resets_boundedness_does_not(self):
        m = VassModel(
            1,
            ("q",),
            (VassTransition("t", "q", "q", "a", (0,), (0,), frozenset({0})),),
            Configuration("q", (0,)),
        )
        assert not termination(m).terminates
        with pytest.raises(UnsupportedAnalysisError):
            boundedness(m)

    def test_rrt_dot(self):
        m = VassModel(
            1,
            ("q",),
            (VassTransition("t", "q", "q", "a", (0,), (1,)),),
            Configuration("q", (0,)),
        )
        dot = rrt_to_dot(build_rrt(m))
        assert dot.startswith("digraph rrt {")
        assert 'shape="doublecircle"' in dot


class TestForwardOracle:
    def test_decreasing_chain_is_exact(self):
        m = VassModel(
            1,
            ("q",),
            (VassTransition("t", "q", "q", "a", (1,), (-1,)),),
            Configuration("q", (2,)),
        )
        r = bounded_forward_oracle(m, 8)
        assert r.conclusive
        assert {c.payload for c in r.reachable} == {(2,), (1,), (0,)}

    def test_boundary_contact_flags_inconclusive(self):
        m = VassModel(
            1,
            ("q",),
            (VassTransition("t", "q", "q", "a", (0,), (1,)),),
            Configuration("q", (0,)),
        )
        r = bounded_forward_oracle(m, 4)
        assert not r.conclusive
        assert {c.payload for c in r.reachable} == {(v,) for v in range(5)}

    def test_no_transitions(self):
        m = VassModel(1, ("q",), (), Configuration("q", (1,)))
        r = bounded_forward_oracle(m, 3)
        assert r.conclusive and r.reachable == frozenset([m.init])

    def test_step_budget_flags_inconclusive(self):
        m = producer_consumer()
        r = bounded_forward_oracle(m, 8, step_budget=3)
        assert not r.conclusive


class TestLcsCoverability:
    def test_backward_agrees_with_lossy_oracle(self):
        rng = random.Random(60)
        conclusive = 0
        for _ in range(15):
            m = random_lcs(rng)
            target = random_word_target(rng, m, max_len=2)
            r = backward_coverability(m, target)
            if r.verdict == "coverable":
                final = replay_witness(m, r.witness)[-1]
                assert m.order.leq(target, final)
            oracle = bounded_forward_oracle(m, 4)
            if not oracle.conclusive:
                continue
            conclusive += 1
            assert (r.verdict == "coverable") == oracle_coverable(oracle, target, m.order)
        assert conclusive >= 4

    def test_perfect_semantics_rejected(self):
        rng = random.Random(61)
        m = random_lcs(rng, semantics="perfect")
        with pytest.raises(UnsupportedAnalysisError):
            backward_coverability(m, random_word_target(rng, m))


class TestDeterminism:
    def test_repeat_runs_identical(self):
        rng = random.Random(62)
        for _ in range(10):
            m = random_vass(rng)
            target = random_vector_target(rng, m)
            a = backward_coverability(m, target)
            b = backward_coverability(m, target)
            assert a.witness == b.witness
            assert a.basis.elements == b.basis.elements
            assert a.iterations == b.iterations
            ka = karp_miller(m)
            kb = karp_miller(m)
            assert ka.clover == kb.clover
            assert [n.marking for n in ka.nodes] == [n.marking for n in kb.nodes]
