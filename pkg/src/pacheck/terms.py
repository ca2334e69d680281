"""Process terms: abstract syntax, well-formedness checks, and rendering.

The term language is a small CCS/CSP hybrid: the inert process ``0``, action
prefix ``a . P``, binary choice ``P + Q``, parallel composition with an
explicit synchronization set ``P ||[a,b] Q``, hiding ``P \\ {a,b}`` (which
relabels the named actions to the internal action ``tau``), and references
to named recursive definitions.  Terms are immutable and hashable so they
can serve directly as state keys during state-space exploration.
"""

from __future__ import annotations

import graphlib
import re
from dataclasses import dataclass, replace

TAU_NAME = "tau"

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def is_identifier(name: str) -> bool:
    return bool(_IDENT_RE.match(name))


def _require_identifier(name: str, what: str) -> None:
    if not is_identifier(name):
        raise ValueError(f"{what} {name!r} is not a valid identifier")


@dataclass(frozen=True)
class Action:
    """A transition label: an observable action name, or the internal ``tau``."""

    name: str

    def __post_init__(self) -> None:
        _require_identifier(self.name, "action name")

    @property
    def is_tau(self) -> bool:
        return self.name == TAU_NAME

    def __str__(self) -> str:
        return self.name


TAU = Action(TAU_NAME)


def observable(name: str) -> Action:
    """Build an observable action; the reserved name ``tau`` is rejected."""
    if name == TAU_NAME:
        raise ValueError("'tau' is reserved for the internal action")
    return Action(name)


def _canonical_names(names, what: str) -> tuple[str, ...]:
    # Synchronization and hiding sets are canonicalized (deduplicated, sorted)
    # at construction so structural equality sees set equality.
    out = sorted(set(names))
    for name in out:
        _require_identifier(name, f"{what} entry")
        if name == TAU_NAME:
            raise ValueError(f"'tau' cannot appear in a {what}")
    return tuple(out)


class ProcessTerm:
    """Base class for process syntax trees."""

    __slots__ = ()


@dataclass(frozen=True)
class Nil(ProcessTerm):
    """The inert process, written ``0``.  It has no transitions."""


@dataclass(frozen=True)
class Prefix(ProcessTerm):
    """``a . P``: perform ``action``, then behave as ``cont``."""

    action: Action
    cont: ProcessTerm


@dataclass(frozen=True)
class Choice(ProcessTerm):
    """``P + Q``: nondeterministic choice, resolved by the first transition."""

    left: ProcessTerm
    right: ProcessTerm


@dataclass(frozen=True)
class Parallel(ProcessTerm):
    """``P ||[S] Q``: parallel composition synchronizing on the names in ``sync``.

    Actions named in ``sync`` must be performed jointly by both sides and the
    synchronized action stays observable, so a third component composed above
    can synchronize on it again.  All other actions (and ``tau``) interleave.
    """

    left: ProcessTerm
    sync: tuple[str, ...]
    right: ProcessTerm

    def __post_init__(self) -> None:
        object.__setattr__(self, "sync", _canonical_names(self.sync, "synchronization set"))


@dataclass(frozen=True)
class Hide(ProcessTerm):
    """``P \\ {H}``: behave as ``body`` with actions named in ``hidden`` turned into ``tau``."""

    body: ProcessTerm
    hidden: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "hidden", _canonical_names(self.hidden, "hiding set"))


@dataclass(frozen=True)
class Const(ProcessTerm):
    """Reference to a named definition in the enclosing environment."""

    name: str

    def __post_init__(self) -> None:
        _require_identifier(self.name, "process constant")
        if self.name == TAU_NAME:
            raise ValueError("'tau' cannot be used as a process constant")


NIL = Nil()


def structurally_equal(a: ProcessTerm, b: ProcessTerm) -> bool:
    """Syntactic equality modulo canonicalized synchronization/hiding sets.

    No semantic laws are applied: ``P + Q`` and ``Q + P`` are different terms.
    This relation is the state key used during LTS construction.
    """
    return a == b


@dataclass(frozen=True)
class Environment:
    """Named recursive process definitions plus a distinguished root name.

    ``defs`` preserves definition order (first definition is the default root
    of a parsed model file).  Instances are treated as immutable; ``with_root``
    derives a variant pointing at another definition.
    """

    defs: dict[str, ProcessTerm]
    root: str

    def with_root(self, name: str) -> "Environment":
        if name not in self.defs:
            raise KeyError(f"no definition named {name!r}")
        return replace(self, root=name)


@dataclass(frozen=True)
class EnvDiagnostic:
    """One well-formedness violation, naming the definition and the rule broken."""

    definition: str
    rule: str  # "undefined-root" | "undefined-constant" | "unguarded-recursion"
    message: str


@dataclass(frozen=True)
class ValidationReport:
    diagnostics: tuple[EnvDiagnostic, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.diagnostics


def constants_of(term: ProcessTerm) -> frozenset[str]:
    """All constant names referenced anywhere inside ``term``."""
    out: set[str] = set()
    _walk_constants(term, out, stop_at_prefix=False)
    return frozenset(out)


def _unguarded_constants(term: ProcessTerm) -> frozenset[str]:
    # Constants reachable without crossing a Prefix; these are the references
    # that step derivation must expand immediately.
    out: set[str] = set()
    _walk_constants(term, out, stop_at_prefix=True)
    return frozenset(out)


def _walk_constants(term: ProcessTerm, out: set[str], stop_at_prefix: bool) -> None:
    stack = [term]
    while stack:
        t = stack.pop()
        if isinstance(t, Const):
            out.add(t.name)
        elif isinstance(t, Prefix):
            if not stop_at_prefix:
                stack.append(t.cont)
        elif isinstance(t, Choice):
            stack.append(t.left)
            stack.append(t.right)
        elif isinstance(t, Parallel):
            stack.append(t.left)
            stack.append(t.right)
        elif isinstance(t, Hide):
            stack.append(t.body)


def validate_environment(env: Environment) -> ValidationReport:
    """Check that every referenced constant is defined and recursion is guarded.

    Guardedness requires that on every cyclic chain of definitions at least one
    reference sits under an action prefix; this keeps one-step derivation
    finite.  Diagnostics are returned in a deterministic order.
    """
    diags: list[EnvDiagnostic] = []
    if env.root not in env.defs:
        diags.append(
            EnvDiagnostic(env.root, "undefined-root", f"root {env.root!r} has no definition")
        )
    for name, body in env.defs.items():
        for const in sorted(constants_of(body)):
            if const not in env.defs:
                diags.append(
                    EnvDiagnostic(
                        name,
                        "undefined-constant",
                        f"definition {name!r} references undefined constant {const!r}",
                    )
                )
    # Cycle detection over unguarded references only: an all-unguarded cycle
    # would make step derivation diverge.
    graph = {
        name: sorted(_unguarded_constants(body) & env.defs.keys())
        for name, body in env.defs.items()
    }
    try:
        graphlib.TopologicalSorter(graph).prepare()
    except graphlib.CycleError as err:
        cycle = [str(n) for n in err.args[1]]
        diags.append(
            EnvDiagnostic(
                cycle[0],
                "unguarded-recursion",
                "unguarded recursion through " + " -> ".join(cycle),
            )
        )
    return ValidationReport(tuple(diags))


# Rendering.  Precedence, loosest to tightest: choice < parallel < prefix <
# hiding/atoms.  The renderer emits the minimal parentheses that reparse to a
# structurally equal term: choice is right-associative, parallel left.

_CHOICE, _PAR, _PREFIX, _ATOM = 0, 1, 2, 3


def render_action(action: Action) -> str:
    return action.name


def render_term(term: ProcessTerm) -> str:
    """Deterministic concrete syntax for ``term``; reparses to an equal term."""
    return _render(term, _CHOICE)


def _render(term: ProcessTerm, level: int) -> str:
    if isinstance(term, Nil):
        text, mine = "0", _ATOM
    elif isinstance(term, Const):
        text, mine = term.name, _ATOM
    elif isinstance(term, Hide):
        text = f"{_render(term.body, _ATOM)} \\ {{{','.join(term.hidden)}}}"
        mine = _ATOM
    elif isinstance(term, Prefix):
        text = f"{term.action.name} . {_render(term.cont, _PREFIX)}"
        mine = _PREFIX
    elif isinstance(term, Parallel):
        text = (
            f"{_render(term.left, _PAR)} ||[{','.join(term.sync)}] "
            f"{_render(term.right, _PREFIX)}"
        )
        mine = _PAR
    elif isinstance(term, Choice):
        text = f"{_render(term.left, _PAR)} + {_render(term.right, _CHOICE)}"
        mine = _CHOICE
    else:
        raise TypeError(f"not a process term: {term!r}")
    if mine < level:
        return f"({text})"
    return text
