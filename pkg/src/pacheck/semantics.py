"""One-step operational semantics and explicit-state LTS construction.

``step_transitions`` derives the immediate transitions of a single term;
``build_lts`` computes the breadth-first closure of a root definition into a
labeled transition system with deterministic state numbering, so repeated
builds of the same model are identical object-for-object.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property

from .terms import (
    TAU,
    Action,
    Choice,
    Const,
    Environment,
    Hide,
    Nil,
    Parallel,
    Prefix,
    ProcessTerm,
    ValidationReport,
    render_term,
    validate_environment,
)

DEFAULT_MAX_STATES = 100_000


class UnboundConstantError(KeyError):
    """A term referenced a constant the environment does not define."""

    def __init__(self, name: str):
        super().__init__(name)
        self.name = name

    def __str__(self) -> str:
        return f"undefined process constant {self.name!r}"


class InvalidEnvironmentError(ValueError):
    """``build_lts`` was given an environment that fails validation."""

    def __init__(self, report: ValidationReport):
        self.report = report
        lines = "; ".join(d.message for d in report.diagnostics)
        super().__init__(f"invalid environment: {lines}")


class StateBoundExceededError(RuntimeError):
    """State-space exploration hit the configured bound.

    Exceeding the bound is an error, never a silent truncation: a partial LTS
    would make every downstream verdict unsound.
    """

    def __init__(self, max_states: int, frontier_size: int):
        self.max_states = max_states
        self.frontier_size = frontier_size
        super().__init__(
            f"state bound exceeded: more than {max_states} reachable states"
            f" ({frontier_size} states still on the frontier)"
        )


def step_transitions(term: ProcessTerm, env: Environment) -> frozenset[tuple[Action, ProcessTerm]]:
    """The set of one-step derivatives ``(action, successor)`` of ``term``.

    Parallel composition synchronizes both sides on actions named in the sync
    set and keeps the synchronized action observable; everything else,
    including ``tau``, interleaves.  Hiding relabels matches to ``tau``.
    Constants are expanded through ``env``; guarded recursion keeps this
    finite.
    """
    if isinstance(term, Nil):
        return frozenset()
    if isinstance(term, Prefix):
        return frozenset({(term.action, term.cont)})
    if isinstance(term, Choice):
        return step_transitions(term.left, env) | step_transitions(term.right, env)
    if isinstance(term, Parallel):
        sync = set(term.sync)
        lefts = step_transitions(term.left, env)
        rights = step_transitions(term.right, env)
        out: set[tuple[Action, ProcessTerm]] = set()
        for action, successor in lefts:
            if action.is_tau or action.name not in sync:
                out.add((action, Parallel(successor, term.sync, term.right)))
        for action, successor in rights:
            if action.is_tau or action.name not in sync:
                out.add((action, Parallel(term.left, term.sync, successor)))
        for name in term.sync:
            action = Action(name)
            left_succ = [s for a, s in lefts if a == action]
            right_succ = [s for a, s in rights if a == action]
            for ls in left_succ:
                for rs in right_succ:
                    out.add((action, Parallel(ls, term.sync, rs)))
        return frozenset(out)
    if isinstance(term, Hide):
        hidden = set(term.hidden)
        out = set()
        for action, successor in step_transitions(term.body, env):
            relabeled = TAU if action.name in hidden else action
            out.add((relabeled, Hide(successor, term.hidden)))
        return frozenset(out)
    if isinstance(term, Const):
        try:
            body = env.defs[term.name]
        except KeyError:
            raise UnboundConstantError(term.name) from None
        return step_transitions(body, env)
    raise TypeError(f"not a process term: {term!r}")


@dataclass(frozen=True)
class Lts:
    """A labeled transition system over indexed states.

    ``states`` holds pairwise-distinct state objects (process terms when built
    from a model; opaque labels when imported); index 0 is the initial state.
    ``transitions`` is stored deduplicated in a canonical sort order, and the
    action ``alphabet`` is derived from it, so two structurally identical
    systems compare and hash equal.
    """

    states: tuple
    transitions: tuple
    saturated: bool = False
    alphabet: frozenset = field(init=False, default=frozenset())

    def __post_init__(self) -> None:
        n = len(self.states)
        if n == 0:
            raise ValueError("an LTS needs at least one state")
        if len(set(self.states)) != n:
            raise ValueError("LTS states must be pairwise distinct")
        for src, action, dst in self.transitions:
            if not isinstance(action, Action):
                raise TypeError(f"transition label {action!r} is not an Action")
            if not (0 <= src < n and 0 <= dst < n):
                raise ValueError(f"transition ({src}, {action}, {dst}) out of range")
        canon = sorted(set(self.transitions), key=lambda t: (t[0], t[1].name, t[2]))
        object.__setattr__(self, "transitions", tuple(canon))
        object.__setattr__(self, "alphabet", frozenset(a for _, a, _ in canon))

    @property
    def n_states(self) -> int:
        return len(self.states)

    @cached_property
    def outgoing(self) -> tuple:
        """Per-state outgoing edges ``(action, target)`` in canonical order."""
        table: list[list[tuple[Action, int]]] = [[] for _ in self.states]
        for src, action, dst in self.transitions:
            table[src].append((action, dst))
        return tuple(tuple(edges) for edges in table)

    def successors(self, state: int, action: Action) -> tuple[int, ...]:
        return tuple(dst for a, dst in self.outgoing[state] if a == action)


def _unfold(term: ProcessTerm, env: Environment) -> ProcessTerm:
    # Top-level constants are unfolded before a term is registered as a state,
    # so a reference and its definition body denote the same state.  Inner
    # constants stay folded; guardedness bounds this loop.
    while isinstance(term, Const):
        try:
            term = env.defs[term.name]
        except KeyError:
            raise UnboundConstantError(term.name) from None
    return term


def build_lts(env: Environment, max_states: int = DEFAULT_MAX_STATES) -> Lts:
    """Breadth-first closure of ``step_transitions`` from the root definition.

    State numbering is deterministic: discovery order is BFS, and within a
    state the derivatives are ordered by rendered action name, then rendered
    successor term.  Raises ``StateBoundExceededError`` if more than
    ``max_states`` states are reachable.
    """
    report = validate_environment(env)
    if not report.ok:
        raise InvalidEnvironmentError(report)
    if max_states < 1:
        raise ValueError("max_states must be positive")

    initial = _unfold(Const(env.root), env)
    index: dict[ProcessTerm, int] = {initial: 0}
    states: list[ProcessTerm] = [initial]
    transitions: list[tuple[int, Action, int]] = []
    queue: deque[int] = deque([0])
    while queue:
        src = queue.popleft()
        derivatives = sorted(
            step_transitions(states[src], env),
            key=lambda pair: (pair[0].name, render_term(pair[1])),
        )
        for action, successor in derivatives:
            state = _unfold(successor, env)
            dst = index.get(state)
            if dst is None:
                if len(states) >= max_states:
                    raise StateBoundExceededError(max_states, len(queue) + 1)
                dst = len(states)
                index[state] = dst
                states.append(state)
                queue.append(dst)
            transitions.append((src, action, dst))
    return Lts(tuple(states), tuple(transitions))


def reachable_action_set(lts: Lts, state: int) -> frozenset[Action]:
    """Labels of every transition reachable (transitively) from ``state``."""
    if not (0 <= state < lts.n_states):
        raise IndexError(f"state index {state} out of range")
    seen = {state}
    stack = [state]
    labels: set[Action] = set()
    while stack:
        current = stack.pop()
        for action, target in lts.outgoing[current]:
            labels.add(action)
            if target not in seen:
                seen.add(target)
                stack.append(target)
    return frozenset(labels)


def state_label(state: object) -> str:
    """Human-readable name for a state object (term, import label, or tag)."""
    if isinstance(state, ProcessTerm):
        return render_term(state)
    if isinstance(state, tuple) and len(state) == 2 and isinstance(state[0], str):
        side, inner = state
        return f"{side}:{state_label(inner)}"
    return str(state)
