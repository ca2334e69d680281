"""Interchange formats: Aldebaran ``.aut`` import/export and Graphviz DOT export.

The ``.aut`` dialect follows the common tool convention: a header
``des (initial, n_transitions, n_states)`` followed by one
``(source, "label", target)`` line per transition.  The internal action is
written ``i`` on export and read back as the internal action on import.
"""

from __future__ import annotations

import re

from .equivalence import Partition
from .semantics import Lts, state_label
from .terms import TAU, Action, is_identifier
from .parsing import ModelSyntaxError, SourceDiagnostic

_AUT_HEADER_RE = re.compile(r"\s*des\s*\(\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*\)\s*\Z")
_AUT_EDGE_RE = re.compile(r'\s*\(\s*(\d+)\s*,\s*"([^"]*)"\s*,\s*(\d+)\s*\)\s*\Z')

_DOT_PALETTE = (
    "#a6cee3",
    "#b2df8a",
    "#fb9a99",
    "#fdbf6f",
    "#cab2d6",
    "#ffff99",
    "#1f78b4",
    "#33a02c",
)


def export_aut(lts: Lts) -> str:
    """Serialize to ``.aut`` text; the initial state is always 0."""
    lines = [f"des (0, {len(lts.transitions)}, {lts.n_states})"]
    for src, action, dst in lts.transitions:
        label = "i" if action.is_tau else action.name
        lines.append(f'({src}, "{label}", {dst})')
    return "\n".join(lines) + "\n"


def _aut_error(line_no: int, message: str, line: str) -> ModelSyntaxError:
    return ModelSyntaxError(SourceDiagnostic(line_no, 1, message, snippet=line.strip()))


def parse_aut(text: str) -> Lts:
    """Parse ``.aut`` text into an LTS over opaque ``s<original_index>`` states.

    States unreachable from the initial state are dropped and the remainder
    renumbered so the initial state is index 0.  Labels must be identifiers
    (``i`` and ``tau`` both denote the internal action).
    """
    lines = text.splitlines()
    header_at = next(
        (i for i, line in enumerate(lines) if line.strip() and not line.lstrip().startswith("#")),
        None,
    )
    if header_at is None:
        raise ModelSyntaxError(SourceDiagnostic(1, 1, "missing 'des (...)' header"))
    header = _AUT_HEADER_RE.match(lines[header_at])
    if header is None:
        raise _aut_error(header_at + 1, "malformed 'des (initial, transitions, states)' header",
                         lines[header_at])
    initial, n_edges, n_states = (int(g) for g in header.groups())
    if n_states == 0:
        raise _aut_error(header_at + 1, "state count must be positive", lines[header_at])
    if initial >= n_states:
        raise _aut_error(header_at + 1, f"initial state {initial} out of range", lines[header_at])

    edges: list[tuple[int, Action, int]] = []
    for offset, raw in enumerate(lines[header_at + 1 :], start=header_at + 2):
        if not raw.strip() or raw.lstrip().startswith("#"):
            continue
        edge = _AUT_EDGE_RE.match(raw)
        if edge is None:
            raise _aut_error(offset, "malformed transition line", raw)
        src, label, dst = int(edge.group(1)), edge.group(2), int(edge.group(3))
        if src >= n_states or dst >= n_states:
            raise _aut_error(offset, f"state index out of range in ({src}, ., {dst})", raw)
        if label in ("i", "tau"):
            action = TAU
        elif is_identifier(label):
            action = Action(label)
        else:
            raise _aut_error(offset, f"label {label!r} is not an action name", raw)
        edges.append((src, action, dst))
    if len(edges) != n_edges:
        raise _aut_error(header_at + 1,
                         f"header announces {n_edges} transitions, file has {len(edges)}",
                         lines[header_at])

    outgoing: dict[int, list[tuple[Action, int]]] = {}
    for src, action, dst in edges:
        outgoing.setdefault(src, []).append((action, dst))
    order = [initial]
    seen = {initial}
    cursor = 0
    while cursor < len(order):
        state = order[cursor]
        cursor += 1
        for _, dst in outgoing.get(state, ()):
            if dst not in seen:
                seen.add(dst)
                order.append(dst)
    renumber = {original: new for new, original in enumerate(order)}
    states = tuple(f"s{original}" for original in order)
    kept = tuple(
        (renumber[src], action, renumber[dst])
        for src, action, dst in edges
        if src in seen
    )
    return Lts(states, kept)


def export_dot(
    lts: Lts,
    partition: Partition | None = None,
    graph_name: str = "lts",
) -> str:
    """Render the LTS as a Graphviz digraph.

    With a partition, states are filled with one color per block (palette
    cycling past eight blocks).  The initial state is marked by a dashed
    arrow from an invisible point node.
    """
    lines = [f"digraph {graph_name} {{", "  rankdir=LR;", '  node [shape=circle, fontsize=10];']
    for index in range(lts.n_states):
        attrs = [f'label="{_dot_escape(str(index))}"',
                 f'tooltip="{_dot_escape(state_label(lts.states[index]))}"']
        if partition is not None:
            color = _DOT_PALETTE[partition.block_of[index] % len(_DOT_PALETTE)]
            attrs.append("style=filled")
            attrs.append(f'fillcolor="{color}"')
        lines.append(f"  n{index} [{', '.join(attrs)}];")
    lines.append("  init [shape=point, style=invis];")
    lines.append("  init -> n0 [style=dashed];")
    for src, action, dst in lts.transitions:
        style = ", style=dotted" if action.is_tau else ""
        lines.append(f'  n{src} -> n{dst} [label="{_dot_escape(str(action))}"{style}];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')
