"""One-step derivation and state-space construction."""

import random

import pytest
from hypothesis import given, settings, strategies as st

from pacheck import (
    Action,
    Choice,
    Const,
    Environment,
    Hide,
    InvalidEnvironmentError,
    Lts,
    NIL,
    Parallel,
    Prefix,
    StateBoundExceededError,
    TAU,
    UnboundConstantError,
    build_lts,
    observable,
    parse_model_file,
    parse_term,
    reachable_action_set,
    state_label,
    step_transitions,
)

import randgen
import strategies

EMPTY_ENV = Environment({}, "unused")
DEPOSIT, WITHDRAW = observable("deposit"), observable("withdraw")


def steps(text, env=EMPTY_ENV):
    return step_transitions(parse_term(text), env)


def test_nil_has_no_transitions():
    assert steps("0") == frozenset()


def test_prefix_steps_to_its_continuation():
    assert steps("a . b . 0") == {(observable("a"), parse_term("b . 0"))}


def test_choice_offers_both_branches():
    got = steps("a . 0 + b . 0")
    assert got == {
        (observable("a"), NIL),
        (observable("b"), NIL),
    }


def test_unsynchronized_actions_interleave():
    got = steps("a . 0 ||[] b . 0")
    assert got == {
        (observable("a"), parse_term("0 ||[] b . 0")),
        (observable("b"), parse_term("a . 0 ||[] 0")),
    }


def test_synchronized_actions_move_jointly_and_stay_observable():
    assert steps("a . P ||[a] a . Q") == {
        (observable("a"), parse_term("P ||[a] Q"))
    }


def test_synchronization_blocks_a_lone_participant():
    assert steps("a . P ||[a] b . Q") == {
        (observable("b"), parse_term("a . P ||[a] Q"))
    }


def test_three_way_synchronization_through_nesting():
    # The synchronized action stays observable, so an outer composition can
    # synchronize on it again.
    got = steps("(a . P ||[a] a . Q) ||[a] a . R")
    assert got == {(observable("a"), parse_term("(P ||[a] Q) ||[a] R"))}


def test_tau_always_interleaves():
    assert steps("tau . P ||[a] a . Q") == {
        (TAU, parse_term("P ||[a] a . Q"))
    }


def test_hiding_relabels_to_tau_and_persists():
    assert steps("(a . b . 0) \\ {a}") == {(TAU, parse_term("(b . 0) \\ {a}"))}
    assert steps("(b . a . 0) \\ {a}") == {
        (observable("b"), parse_term("(a . 0) \\ {a}"))
    }


def test_constants_expand_through_the_environment():
    env = Environment({"P": parse_term("a . P")}, "P")
    assert step_transitions(Const("P"), env) == {(observable("a"), Const("P"))}
    with pytest.raises(UnboundConstantError, match="'Q'"):
        step_transitions(Const("Q"), EMPTY_ENV)


# -- LTS construction --------------------------------------------------------


def spec_transition_table(lts):
    return [(src, action.name, dst) for src, action, dst in lts.transitions]


def test_two_slot_counter_lts_is_pinned_exactly(buffer_ltss):
    lts = buffer_ltss["spec"]
    assert lts.n_states == 3
    assert spec_transition_table(lts) == [
        (0, "deposit", 1),
        (1, "deposit", 2),
        (1, "withdraw", 0),
        (2, "withdraw", 1),
    ]


def test_concurrent_and_pipeline_sizes_are_pinned(buffer_ltss):
    conc, pipe = buffer_ltss["concurrent"], buffer_ltss["pipeline"]
    assert (conc.n_states, len(conc.transitions)) == (4, 8)
    assert conc.alphabet == {DEPOSIT, WITHDRAW}
    assert (pipe.n_states, len(pipe.transitions)) == (4, 5)
    assert pipe.alphabet == {DEPOSIT, WITHDRAW, TAU}


def test_buffer_models_have_no_unreachable_or_stuck_states(buffer_ltss):
    for lts in buffer_ltss.values():
        seen = {0}
        stack = [0]
        while stack:
            state = stack.pop()
            for _, target in lts.outgoing[state]:
                if target not in seen:
                    seen.add(target)
                    stack.append(target)
        assert seen == set(range(lts.n_states))
        assert all(lts.outgoing[state] for state in range(lts.n_states))


def test_initial_state_is_the_unfolded_root_body(buffer_models, buffer_ltss):
    env = buffer_models["spec"].env
    assert buffer_ltss["spec"].states[0] == env.defs["ProdCons_0_2"]
    # Inner constants stay folded: concurrent states are parallel terms over
    # constant references, not unfolded bodies.
    assert isinstance(buffer_ltss["concurrent"].states[0], Parallel)


@given(strategies.environments)
@settings(max_examples=60, deadline=None)
def test_construction_is_deterministic(env):
    assert build_lts(env) == build_lts(env)


@given(strategies.environments)
@settings(max_examples=60, deadline=None)
def test_every_state_satisfies_its_own_step_relation(env):
    lts = build_lts(env)
    index = {state: i for i, state in enumerate(lts.states)}

    def resolve(term):
        while isinstance(term, Const):
            term = env.defs[term.name]
        return term

    for src, state in enumerate(lts.states):
        expected = {
            (action, index[resolve(successor)])
            for action, successor in step_transitions(state, env)
        }
        got = {(action, dst) for s, action, dst in lts.transitions if s == src}
        assert got == expected


@given(strategies.environments, st.integers(1, 40))
@settings(max_examples=60, deadline=None)
def test_bound_is_monotone_and_exact(env, slack):
    lts = build_lts(env)
    assert build_lts(env, max_states=lts.n_states) == lts
    assert build_lts(env, max_states=lts.n_states + slack) == lts
    if lts.n_states > 1:
        with pytest.raises(StateBoundExceededError):
            build_lts(env, max_states=lts.n_states - 1)


def test_exceeding_the_bound_reports_sizes():
    env = parse_model_file("P = a . (P ||[] P);\n").env
    with pytest.raises(StateBoundExceededError) as err:
        build_lts(env, max_states=50)
    assert err.value.max_states == 50
    assert err.value.frontier_size > 0
    assert "more than 50 reachable states" in str(err.value)


def test_invalid_environments_are_rejected_up_front():
    env = Environment({"P": Const("P")}, "P")
    with pytest.raises(InvalidEnvironmentError) as err:
        build_lts(env)
    assert err.value.report.diagnostics
    with pytest.raises(ValueError, match="max_states must be positive"):
        build_lts(Environment({"P": NIL}, "P"), max_states=0)


def test_lts_rejects_malformed_contents():
    with pytest.raises(ValueError, match="at least one state"):
        Lts((), ())
    with pytest.raises(ValueError, match="pairwise distinct"):
        Lts((0, 0), ())
    with pytest.raises(ValueError, match="out of range"):
        Lts((0,), ((0, observable("a"), 3),))
    with pytest.raises(TypeError, match="not an Action"):
        Lts((0, 1), ((0, "a", 1),))


def test_transitions_are_stored_canonically():
    a, b = observable("a"), observable("b")
    scrambled = Lts((0, 1), ((1, a, 0), (0, b, 1), (0, a, 1), (0, a, 1)))
    assert scrambled.transitions == ((0, a, 1), (0, b, 1), (1, a, 0))
    assert scrambled.alphabet == {a, b}
    assert scrambled.successors(0, a) == (1,)
    assert scrambled.successors(1, b) == ()


def test_reachable_action_set_sees_through_the_whole_graph(buffer_ltss):
    pipe = buffer_ltss["pipeline"]
    assert reachable_action_set(pipe, 0) == {DEPOSIT, WITHDRAW, TAU}
    ab = build_lts(parse_model_file("P = a . b . 0;\n").env)
    assert reachable_action_set(ab, 0) == {observable("a"), observable("b")}
    last = ab.successors(ab.successors(0, observable("a"))[0], observable("b"))[0]
    assert reachable_action_set(ab, last) == frozenset()
    with pytest.raises(IndexError):
        reachable_action_set(ab, 99)


def test_state_labels_render_terms_tags_and_plain_objects():
    term = parse_term("a . 0 ||[] b . 0")
    assert state_label(term) == "a . 0 ||[] b . 0"
    assert state_label(("a", term)) == "a:a . 0 ||[] b . 0"
    assert state_label(("b", 7)) == "b:7"
    assert state_label(12) == "12"
