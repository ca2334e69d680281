"""Hennessy-Milner logic: formulas, evaluation, and failure diagnostics.

Strong modalities ``<a>``/``[a]`` quantify over single transitions.  Weak
modalities ``<<a>>``/``[[a]]`` quantify over observable steps padded with
``tau`` on both sides; ``<<tau>>`` means "after zero or more internal steps".
Evaluation is a memoized recursion over (state, subformula) pairs and returns
a diagnostic trace alongside the verdict: a failing box names one offending
successor, a failing diamond shows the exhausted successor list.
"""

from __future__ import annotations

import weakref
from dataclasses import dataclass

from .semantics import Lts, state_label
from .terms import Action

TRACE_DEPTH_CAP = 50


class HmlFormula:
    """Base class for formula syntax trees; instances are immutable."""

    __slots__ = ()


@dataclass(frozen=True)
class Tt(HmlFormula):
    """``tt``: true at every state."""


@dataclass(frozen=True)
class Ff(HmlFormula):
    """``ff``: false at every state."""


@dataclass(frozen=True)
class Not(HmlFormula):
    body: HmlFormula


@dataclass(frozen=True)
class And(HmlFormula):
    left: HmlFormula
    right: HmlFormula


@dataclass(frozen=True)
class Or(HmlFormula):
    left: HmlFormula
    right: HmlFormula


@dataclass(frozen=True)
class Diamond(HmlFormula):
    """``<a> F``: some ``a``-successor satisfies ``F``."""

    action: Action
    body: HmlFormula


@dataclass(frozen=True)
class Box(HmlFormula):
    """``[a] F``: every ``a``-successor satisfies ``F``."""

    action: Action
    body: HmlFormula


@dataclass(frozen=True)
class WeakDiamond(HmlFormula):
    """``<<a>> F``: some weak ``a``-successor satisfies ``F``.

    For observable ``a`` this means ``tau* a tau*``; for ``a = tau`` it means
    zero or more internal steps, so ``<<tau>> F`` holds wherever ``F`` does.
    """

    action: Action
    body: HmlFormula


@dataclass(frozen=True)
class WeakBox(HmlFormula):
    """``[[a]] F``: every weak ``a``-successor satisfies ``F``."""

    action: Action
    body: HmlFormula


def conjunction(parts) -> HmlFormula:
    """Right-nested conjunction of ``parts``; empty yields ``tt``."""
    parts = list(parts)
    if not parts:
        return Tt()
    out = parts[-1]
    for part in reversed(parts[:-1]):
        out = And(part, out)
    return out


# Rendering precedence, loosest to tightest: or < and < unary (not, modalities).
_OR, _AND, _UNARY = 0, 1, 2


def render_formula(formula: HmlFormula) -> str:
    """Deterministic concrete syntax; reparses to an equal formula."""
    return _render(formula, _OR)


def _render(formula: HmlFormula, level: int) -> str:
    if isinstance(formula, Tt):
        return "tt"
    if isinstance(formula, Ff):
        return "ff"
    if isinstance(formula, Not):
        return f"not {_render(formula.body, _UNARY)}"
    if isinstance(formula, Diamond):
        return f"<{formula.action.name}> {_render(formula.body, _UNARY)}"
    if isinstance(formula, Box):
        return f"[{formula.action.name}] {_render(formula.body, _UNARY)}"
    if isinstance(formula, WeakDiamond):
        return f"<<{formula.action.name}>> {_render(formula.body, _UNARY)}"
    if isinstance(formula, WeakBox):
        return f"[[{formula.action.name}]] {_render(formula.body, _UNARY)}"
    if isinstance(formula, And):
        text = f"{_render(formula.left, _UNARY)} and {_render(formula.right, _AND)}"
        return f"({text})" if level > _AND else text
    if isinstance(formula, Or):
        text = f"{_render(formula.left, _AND)} or {_render(formula.right, _OR)}"
        return f"({text})" if level > _OR else text
    raise TypeError(f"not an HML formula: {formula!r}")


@dataclass(frozen=True)
class EvalTrace:
    """One node of the evaluation trace: what was checked where, and why."""

    state: int
    formula: HmlFormula
    holds: bool
    note: str
    children: tuple = ()


@dataclass(frozen=True)
class EvalResult:
    holds: bool
    trace: EvalTrace


def render_trace(trace: EvalTrace, lts: Lts, depth_cap: int = TRACE_DEPTH_CAP) -> str:
    """Indented plain-text rendering of a trace, capped at ``depth_cap`` levels."""
    lines: list[str] = []
    _render_trace(trace, lts, 0, depth_cap, lines)
    return "\n".join(lines)


def _render_trace(trace: EvalTrace, lts: Lts, depth: int, cap: int, lines: list[str]) -> None:
    pad = "  " * depth
    if depth >= cap:
        lines.append(f"{pad}... (trace depth capped at {cap})")
        return
    verdict = "holds" if trace.holds else "fails"
    label = state_label(lts.states[trace.state])
    lines.append(f"{pad}{render_formula(trace.formula)} {verdict} at state {trace.state} ({label})")
    if trace.note:
        lines.append(f"{pad}  because: {trace.note}")
    for child in trace.children:
        _render_trace(child, lts, depth + 1, cap, lines)


_weak_views: "weakref.WeakKeyDictionary[Lts, Lts]" = weakref.WeakKeyDictionary()


def _weak_view(lts: Lts) -> Lts:
    # Saturation is memoized per LTS object so repeated weak-modality
    # evaluations do not recompute the closure.
    if lts.saturated:
        return lts
    view = _weak_views.get(lts)
    if view is None:
        from .equivalence import saturate_weak

        view = saturate_weak(lts)
        _weak_views[lts] = view
    return view


def evaluate_formula(lts: Lts, state: int, formula: HmlFormula) -> EvalResult:
    """Evaluate ``formula`` at ``state`` and explain the verdict.

    The recursion is memoized on (state, subformula), so shared subformulas
    and convergent states are evaluated once.
    """
    if not (0 <= state < lts.n_states):
        raise IndexError(f"state index {state} out of range")
    memo: dict[tuple[int, HmlFormula], EvalTrace] = {}
    trace = _evaluate(lts, state, formula, memo)
    return EvalResult(trace.holds, trace)


def _evaluate(lts, state, formula, memo) -> EvalTrace:
    key = (state, formula)
    cached = memo.get(key)
    if cached is not None:
        return cached
    trace = _evaluate_once(lts, state, formula, memo)
    memo[key] = trace
    return trace


def _evaluate_once(lts, state, formula, memo) -> EvalTrace:
    if isinstance(formula, Tt):
        return EvalTrace(state, formula, True, "")
    if isinstance(formula, Ff):
        return EvalTrace(state, formula, False, "")
    if isinstance(formula, Not):
        sub = _evaluate(lts, state, formula.body, memo)
        return EvalTrace(state, formula, not sub.holds, "", (sub,))
    if isinstance(formula, And):
        left = _evaluate(lts, state, formula.left, memo)
        if not left.holds:
            return EvalTrace(state, formula, False, "left conjunct fails", (left,))
        right = _evaluate(lts, state, formula.right, memo)
        note = "" if right.holds else "right conjunct fails"
        return EvalTrace(state, formula, right.holds, note, (left, right))
    if isinstance(formula, Or):
        left = _evaluate(lts, state, formula.left, memo)
        if left.holds:
            return EvalTrace(state, formula, True, "left disjunct holds", (left,))
        right = _evaluate(lts, state, formula.right, memo)
        note = "" if right.holds else "both disjuncts fail"
        return EvalTrace(state, formula, right.holds, note, (left, right))
    if isinstance(formula, (Diamond, Box)):
        return _modal(lts, state, formula, formula.action, lts, memo)
    if isinstance(formula, (WeakDiamond, WeakBox)):
        return _modal(lts, state, formula, formula.action, _weak_view(lts), memo)
    raise TypeError(f"not an HML formula: {formula!r}")


def _modal(lts, state, formula, action, view, memo) -> EvalTrace:
    # ``view`` is the transition relation the modality ranges over: the LTS
    # itself for strong modalities, its saturation for weak ones.  Subformulas
    # are always evaluated against the original LTS.
    targets = view.successors(state, action)
    existential = isinstance(formula, (Diamond, WeakDiamond))
    if existential:
        subs = []
        for target in targets:
            sub = _evaluate(lts, target, formula.body, memo)
            subs.append(sub)
            if sub.holds:
                return EvalTrace(
                    state, formula, True, f"witness successor: state {target}", (sub,)
                )
        if not targets:
            return EvalTrace(state, formula, False, f"no {action.name}-successors")
        return EvalTrace(
            state,
            formula,
            False,
            f"all {len(targets)} {action.name}-successors exhausted",
            tuple(subs),
        )
    for target in targets:
        sub = _evaluate(lts, target, formula.body, memo)
        if not sub.holds:
            return EvalTrace(
                state, formula, False, f"offending successor: state {target}", (sub,)
            )
    note = f"all {len(targets)} {action.name}-successors satisfy the body"
    if not targets:
        note = f"no {action.name}-successors (vacuously true)"
    return EvalTrace(state, formula, True, note)
