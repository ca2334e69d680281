"""Executable corpus: producer-consumer builders and offline-payment threat studies.

The offline-payment studies encode narrative threat scenarios as process
models with pinned verdicts: counterfeit attribution along offline transfer
chains, double spending against a payee wallet, and torn transfers over a
lossy channel.  The corpus checks confirm the encodings are internally
consistent; they do not derive impossibility claims from first principles.
Two modeling choices apply throughout: reporting on reconnection is
abstracted to one sync action per wallet, and token identity is bounded to
two token names to keep the state spaces desk-scale.

Corpus data ships as model files plus a manifest of checks with expected
outcomes.  The builders in this module are the source of truth; the shipped
files are their rendered output, byte for byte.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Mapping, Union

from .equivalence import EquivalenceKind, check_equivalence
from .hml import evaluate_formula, render_formula
from .parsing import ModelFile, parse_model_file, render_model_file
from .semantics import DEFAULT_MAX_STATES, Lts, build_lts, reachable_action_set
from .terms import Action, is_identifier

_STYLES = ("spec", "concurrent", "pipeline")


def _counter_model(capacity: int) -> str:
    lines = []
    for fill in range(capacity + 1):
        options = []
        if fill < capacity:
            options.append(f"deposit . ProdCons_{fill + 1}_{capacity}")
        if fill > 0:
            options.append(f"withdraw . ProdCons_{fill - 1}_{capacity}")
        lines.append(f"ProdCons_{fill}_{capacity} = {' + '.join(options)};")
    return "\n".join(lines) + "\n"


def _group(name: str, copies: int) -> str:
    joined = " ||[] ".join([name] * copies)
    return f"({joined})" if copies > 1 else joined


def _concurrent_model(capacity: int, producers: int, consumers: int) -> str:
    root = (
        f"PC_conc_{capacity} = {_group('Prod', producers)} ||[deposit] "
        f"{_group('Buff', capacity)} ||[withdraw] {_group('Cons', consumers)};"
    )
    return "\n".join(
        [
            root,
            "Prod = deposit . Prod;",
            "Buff = deposit . withdraw . Buff;",
            "Cons = withdraw . Cons;",
        ]
    ) + "\n"


def _pipeline_model(capacity: int, producers: int, consumers: int) -> str:
    prods = _group("Prod", producers)
    conss = _group("Cons", consumers)
    if capacity == 1:
        buffers = ["Buff = deposit . withdraw . Buff;"]
        middle = "Buff"
    elif capacity == 2:
        buffers = [
            "LBuff = deposit . pass . LBuff;",
            "RBuff = pass . withdraw . RBuff;",
        ]
        middle = "(LBuff ||[pass] RBuff) \\ {pass}"
    else:
        buffers = ["Buff_1 = deposit . pass_1 . Buff_1;"]
        for i in range(2, capacity):
            buffers.append(f"Buff_{i} = pass_{i - 1} . pass_{i} . Buff_{i};")
        buffers.append(f"Buff_{capacity} = pass_{capacity - 1} . withdraw . Buff_{capacity};")
        chain = " ".join(
            f"||[pass_{i}] Buff_{i + 1}" for i in range(1, capacity)
        )
        hidden = ",".join(sorted(f"pass_{i}" for i in range(1, capacity)))
        middle = f"(Buff_1 {chain}) \\ {{{hidden}}}"
    root = f"PC_pipe_{capacity} = {prods} ||[deposit] {middle} ||[withdraw] {conss};"
    return "\n".join([root, "Prod = deposit . Prod;", *buffers, "Cons = withdraw . Cons;"]) + "\n"


def build_producer_consumer(
    capacity: int,
    producers: int = 1,
    consumers: int = 1,
    style: str = "spec",
) -> ModelFile:
    """Build a bounded producer-consumer model.

    The ``spec`` style is the abstract buffer: a (capacity+1)-state counter
    over deposit and withdraw, independent of the producer and consumer
    counts.  The ``concurrent`` style composes that many one-slot buffers
    with no mutual synchronization; the ``pipeline`` style chains them with
    hidden hand-off actions, so items flow through internal steps.
    """
    if capacity < 1:
        raise ValueError(f"capacity must be at least 1, got {capacity}")
    if producers < 1:
        raise ValueError(f"producers must be at least 1, got {producers}")
    if consumers < 1:
        raise ValueError(f"consumers must be at least 1, got {consumers}")
    if style not in _STYLES:
        raise ValueError(f"style must be one of {_STYLES}, got {style!r}")
    if style == "spec":
        text = _counter_model(capacity)
    elif style == "concurrent":
        text = _concurrent_model(capacity, producers, consumers)
    else:
        text = _pipeline_model(capacity, producers, consumers)
    return parse_model_file(text)


# -- checks and studies ----------------------------------------------------


@dataclass(frozen=True)
class ReachabilityCheck:
    """Asserts whether an action is reachable from the primary model's start."""

    name: str
    description: str
    action: str
    expected: bool


@dataclass(frozen=True)
class FormulaCheck:
    """Asserts the verdict of a property declared in the primary model."""

    name: str
    description: str
    property_name: str
    expected: bool


@dataclass(frozen=True)
class EquivalenceCheck:
    """Asserts an equivalence verdict between two corpus models."""

    name: str
    description: str
    left: str
    right: str
    kind: EquivalenceKind
    expected: bool


Check = Union[ReachabilityCheck, FormulaCheck, EquivalenceCheck]


@dataclass(frozen=True)
class CaseStudy:
    """A named scenario: a primary model, peer models, and pinned checks."""

    name: str
    description: str
    primary: str
    models: Mapping[str, ModelFile]
    checks: tuple[Check, ...]

    def __post_init__(self):
        if self.primary not in self.models:
            raise ValueError(f"primary model {self.primary!r} not in study models")
        names = [check.name for check in self.checks]
        if len(names) != len(set(names)):
            raise ValueError(f"duplicate check names in study {self.name!r}")
        for check in self.checks:
            if isinstance(check, EquivalenceCheck):
                for key in (check.left, check.right):
                    if key not in self.models:
                        raise ValueError(
                            f"check {check.name!r} references {key!r}, "
                            f"which is not a model of study {self.name!r}"
                        )
            elif isinstance(check, FormulaCheck):
                self.models[self.primary].property_named(check.property_name)
            elif not is_identifier(check.action):
                raise ValueError(f"check {check.name!r} has malformed action")

    @property
    def model(self) -> ModelFile:
        return self.models[self.primary]


@dataclass(frozen=True)
class Corpus:
    """All case studies plus standalone models shipped alongside them."""

    studies: tuple[CaseStudy, ...]
    extras: Mapping[str, ModelFile]

    def study(self, name: str) -> CaseStudy:
        for study in self.studies:
            if study.name == name:
                return study
        raise KeyError(f"no case study named {name!r}")

    def models(self) -> dict[str, ModelFile]:
        merged: dict[str, ModelFile] = {}
        for study in self.studies:
            merged.update(study.models)
        merged.update(self.extras)
        return merged


# Transfer chain with one offline intermediary.  S pays A, A forges a token
# and pays R with it; S and R sync their local histories with the ledger in
# either order.  One intermediary means one possible counterfeiter.
_CHAIN1 = """\
Chain1 = S ||[pay_s_a] A ||[pay_a_r] R ||[sync_s,sync_r] Ledger;
S = pay_s_a . sync_s . 0;
A = pay_s_a . forge . pay_a_r . 0;
R = pay_a_r . sync_r . 0;
Ledger = sync_s . sync_r . Verdict + sync_r . sync_s . Verdict;
Verdict = blame_a . 0;
Chain1Observed = Chain1 \\ {forge};
"""

# What an external observer should see of chain 1 once the forge step is
# hidden: the payments happen in order, the two sync reports interleave
# (S may report before the second payment), then blame is assigned.
_CHAIN1_ATTRIB_SPEC = """\
AttribSpec = pay_s_a . Routing;
Routing = sync_s . pay_a_r . sync_r . Blame + pay_a_r . (sync_s . sync_r . Blame + sync_r . sync_s . Blame);
Blame = blame_a . 0;
"""

# Transfer chain with two offline intermediaries.  Either A or B may have
# forged; the ledger still receives only the endpoint reports, so it can
# name two suspects but is never able to blame one of them.
_CHAIN2 = """\
Chain2 = S ||[pay_s_a] A ||[pay_a_b] B ||[pay_b_r] R ||[sync_s,sync_r] Ledger;
S = pay_s_a . sync_s . 0;
A = pay_s_a . (forge_a . pay_a_b . 0 + pay_a_b . 0);
B = pay_a_b . (forge_b . pay_b_r . 0 + pay_b_r . 0);
R = pay_b_r . sync_r . 0;
Ledger = sync_s . sync_r . Verdict + sync_r . sync_s . Verdict;
Verdict = suspect_a . 0 + suspect_b . 0;
"""

# Session wallet: tracks which token names it has received, settles at any
# point, and the settlement verdict flips to reject once any replay is seen.
_WALLET_DEFS = """\
Wallet = recv_t1 . SeenT1 + recv_t2 . SeenT2 + accept . 0;
SeenT1 = recv_t1 . DupT1 + recv_t2 . SeenBoth + accept . 0;
SeenT2 = recv_t1 . SeenBoth + recv_t2 . DupT2 + accept . 0;
SeenBoth = recv_t1 . DupBoth + recv_t2 . DupBoth + accept . 0;
DupT1 = recv_t1 . DupT1 + recv_t2 . DupBoth + reject . 0;
DupT2 = recv_t1 . DupBoth + recv_t2 . DupT2 + reject . 0;
DupBoth = recv_t1 . DupBoth + recv_t2 . DupBoth + reject . 0;
"""

_DOUBLE_SPEND = (
    "DoubleSpend = Payer ||[recv_t1,recv_t2] Wallet;\n"
    "Payer = recv_t1 . recv_t1 . 0;\n"
    + _WALLET_DEFS
    + "property replay_rejected expected true : "
    "[recv_t1] [recv_t1] ([accept] ff and <reject> tt);\n"
)

# Declarative wallet contract: remember the set of seen tokens and whether a
# replay has occurred; all flagged histories are one state.
_WALLET_SPEC = """\
WalletSpec = recv_t1 . SpecSeenT1 + recv_t2 . SpecSeenT2 + accept . 0;
SpecSeenT1 = recv_t1 . SpecFlagged + recv_t2 . SpecSeenBoth + accept . 0;
SpecSeenT2 = recv_t1 . SpecSeenBoth + recv_t2 . SpecFlagged + accept . 0;
SpecSeenBoth = recv_t1 . SpecFlagged + recv_t2 . SpecFlagged + accept . 0;
SpecFlagged = recv_t1 . SpecFlagged + recv_t2 . SpecFlagged + reject . 0;
"""

# Deliberately broken wallet: replays are tracked but still accepted.
_WALLET_BROKEN = """\
WalletBroken = recv_t1 . BrokenSeenT1 + recv_t2 . BrokenSeenT2 + accept . 0;
BrokenSeenT1 = recv_t1 . BrokenDupT1 + recv_t2 . BrokenSeenBoth + accept . 0;
BrokenSeenT2 = recv_t1 . BrokenSeenBoth + recv_t2 . BrokenDupT2 + accept . 0;
BrokenSeenBoth = recv_t1 . BrokenDupBoth + recv_t2 . BrokenDupBoth + accept . 0;
BrokenDupT1 = recv_t1 . BrokenDupT1 + recv_t2 . BrokenDupBoth + accept . 0;
BrokenDupT2 = recv_t1 . BrokenDupBoth + recv_t2 . BrokenDupT2 + accept . 0;
BrokenDupBoth = recv_t1 . BrokenDupBoth + recv_t2 . BrokenDupBoth + accept . 0;
"""

# Transfer over a lossy channel.  A drop tears the transaction: value has
# left the payer but not reached the payee.  The recovery handler can still
# deliver late or refund the payer; the drop itself is internal.
_TORN = """\
TornTransfer = (Payer ||[send,refund] Channel ||[deliver] Payee) \\ {drop};
Payer = send . PayerPending;
PayerPending = refund . 0;
Channel = send . InTransit;
InTransit = deliver . 0 + drop . TornRecovery;
TornRecovery = deliver . 0 + refund . 0;
Payee = deliver . 0;
property send_resolves expected true : [[send]] (<<deliver>> tt or <<refund>> tt);
"""

_TORN_SPEC = """\
TornSpec = send . (deliver . 0 + refund . 0);
"""

# Same system with the recovery handler removed: a dropped transfer
# deadlocks and the value is silently lost.
_TORN_BROKEN = """\
TornTransferBroken = (Payer ||[send,refund] Channel ||[deliver] Payee) \\ {drop};
Payer = send . PayerPending;
PayerPending = refund . 0;
Channel = send . InTransit;
InTransit = deliver . 0 + drop . 0;
Payee = deliver . 0;
"""


def build_offline_chain(variant: str) -> CaseStudy:
    """Build the offline transfer-chain study: one intermediary or two.

    With a single offline intermediary the endpoint reports single it out,
    so the ledger can assign blame; with two, the reports are compatible
    with either culprit and no blame action is ever enabled.
    """
    if variant == "chain1":
        return CaseStudy(
            name="offline_chain_1",
            description="counterfeit along S -> A -> R is attributable to A",
            primary="chain1",
            models={
                "chain1": parse_model_file(_CHAIN1),
                "chain1_attrib_spec": parse_model_file(_CHAIN1_ATTRIB_SPEC),
            },
            checks=(
                ReachabilityCheck(
                    name="blame_a_reachable",
                    description="the ledger can eventually blame the only intermediary",
                    action="blame_a",
                    expected=True,
                ),
            ),
        )
    if variant == "chain2":
        return CaseStudy(
            name="offline_chain_2",
            description="counterfeit along S -> A -> B -> R cannot be attributed",
            primary="chain2",
            models={"chain2": parse_model_file(_CHAIN2)},
            checks=(
                ReachabilityCheck(
                    name="blame_a_unreachable",
                    description="no run lets the ledger blame the first intermediary",
                    action="blame_a",
                    expected=False,
                ),
                ReachabilityCheck(
                    name="blame_b_unreachable",
                    description="no run lets the ledger blame the second intermediary",
                    action="blame_b",
                    expected=False,
                ),
            ),
        )
    raise ValueError(f"variant must be 'chain1' or 'chain2', got {variant!r}")


def build_double_spend() -> CaseStudy:
    """Build the double-spend study: a payer replays a token at a wallet."""
    return CaseStudy(
        name="double_spend",
        description="a replayed token is flagged and settlement turns into reject",
        primary="double_spend",
        models={
            "double_spend": parse_model_file(_DOUBLE_SPEND),
            "ds_wallet": parse_model_file(_WALLET_DEFS),
            "ds_wallet_spec": parse_model_file(_WALLET_SPEC),
            "ds_wallet_broken": parse_model_file(_WALLET_BROKEN),
        },
        checks=(
            FormulaCheck(
                name="replay_rejected",
                description="after two receipts of t1 the wallet can only reject",
                property_name="replay_rejected",
                expected=True,
            ),
            EquivalenceCheck(
                name="wallet_meets_spec",
                description="the tracking wallet refines the declarative contract",
                left="ds_wallet",
                right="ds_wallet_spec",
                kind="weak",
                expected=True,
            ),
            EquivalenceCheck(
                name="broken_wallet_caught",
                description="a wallet that accepts replays is told apart from the contract",
                left="ds_wallet_broken",
                right="ds_wallet_spec",
                kind="weak",
                expected=False,
            ),
        ),
    )


def build_torn_transaction() -> CaseStudy:
    """Build the torn-transfer study: loss on a channel with a recovery path."""
    return CaseStudy(
        name="torn_transaction",
        description="a dropped transfer is always recovered by delivery or refund",
        primary="torn",
        models={
            "torn": parse_model_file(_TORN),
            "torn_spec": parse_model_file(_TORN_SPEC),
            "torn_broken": parse_model_file(_TORN_BROKEN),
        },
        checks=(
            EquivalenceCheck(
                name="recovery_masks_loss",
                description="with recovery, observers see send then deliver or refund",
                left="torn",
                right="torn_spec",
                kind="weak",
                expected=True,
            ),
            EquivalenceCheck(
                name="dropped_recovery_caught",
                description="without recovery, a drop silently strands the transfer",
                left="torn_broken",
                right="torn_spec",
                kind="weak",
                expected=False,
            ),
        ),
    )


def build_corpus() -> Corpus:
    """Construct the whole corpus programmatically (the source of truth)."""
    return Corpus(
        studies=(
            build_offline_chain("chain1"),
            build_offline_chain("chain2"),
            build_double_spend(),
            build_torn_transaction(),
        ),
        extras={
            "pc_spec": build_producer_consumer(2, 1, 1, "spec"),
            "pc_conc": build_producer_consumer(2, 1, 1, "concurrent"),
            "pc_pipe": build_producer_consumer(2, 1, 1, "pipeline"),
        },
    )


_FILE_HEADERS = {
    "pc_spec": "Two-slot buffer specification: a counter over deposit and withdraw.",
    "pc_conc": "Concurrent two-slot buffer: two independent one-slot buffers.",
    "pc_pipe": "Pipelined two-slot buffer: hand-off between slots is hidden.",
    "chain1": (
        "Offline transfer chain with one intermediary.\n"
        "S pays A, A forges a token and pays R; S and R sync with the ledger\n"
        "in either order, leaving A as the only possible counterfeiter."
    ),
    "chain1_attrib_spec": (
        "Observable attribution contract for the one-intermediary chain\n"
        "once the forge step is hidden: payments in order, endpoint reports\n"
        "interleaved, then blame."
    ),
    "chain2": (
        "Offline transfer chain with two intermediaries.\n"
        "Either A or B may have forged; the endpoint reports are compatible\n"
        "with both, so the ledger holds two suspects and can blame neither."
    ),
    "double_spend": (
        "A payer replays token t1 at a session wallet.\n"
        "The wallet tracks received token names and settles at any point;\n"
        "once a replay is seen, settlement can only be a reject."
    ),
    "ds_wallet": "Session wallet that tracks received token names and flags replays.",
    "ds_wallet_spec": (
        "Declarative wallet contract: all histories with a flagged replay\n"
        "are the same state, and only they reject."
    ),
    "ds_wallet_broken": "Broken wallet that tracks replays but accepts anyway.",
    "torn": (
        "Transfer over a lossy channel with a recovery handler.\n"
        "A drop tears the transaction; recovery delivers late or refunds,\n"
        "and the drop itself is internal."
    ),
    "torn_spec": "What a torn-tolerant transfer looks like from outside.",
    "torn_broken": "Lossy transfer without recovery: a drop strands the value.",
}


def _check_to_json(check: Check) -> dict:
    if isinstance(check, ReachabilityCheck):
        return {
            "kind": "reachability",
            "name": check.name,
            "description": check.description,
            "action": check.action,
            "expected": check.expected,
        }
    if isinstance(check, FormulaCheck):
        return {
            "kind": "formula",
            "name": check.name,
            "description": check.description,
            "property": check.property_name,
            "expected": check.expected,
        }
    return {
        "kind": "equivalence",
        "name": check.name,
        "description": check.description,
        "left": check.left,
        "right": check.right,
        "equivalence": check.kind,
        "expected": check.expected,
    }


def _check_from_json(obj: dict) -> Check:
    kind = obj["kind"]
    if kind == "reachability":
        return ReachabilityCheck(obj["name"], obj["description"], obj["action"], obj["expected"])
    if kind == "formula":
        return FormulaCheck(obj["name"], obj["description"], obj["property"], obj["expected"])
    if kind == "equivalence":
        return EquivalenceCheck(
            obj["name"],
            obj["description"],
            obj["left"],
            obj["right"],
            obj["equivalence"],
            obj["expected"],
        )
    raise ValueError(f"unknown check kind {kind!r} in manifest")


def corpus_manifest(corpus: Corpus) -> dict:
    """The manifest structure listing studies, checks, and expected outcomes."""
    return {
        "studies": [
            {
                "name": study.name,
                "description": study.description,
                "primary": study.primary,
                "models": sorted(study.models),
                "checks": [_check_to_json(check) for check in study.checks],
            }
            for study in corpus.studies
        ],
        "extras": sorted(corpus.extras),
    }


def corpus_file_texts() -> dict[str, str]:
    """Render every corpus file (models and manifest) from the builders."""
    corpus = build_corpus()
    texts = {}
    for key, model in sorted(corpus.models().items()):
        texts[f"{key}.pa"] = render_model_file(model, header=_FILE_HEADERS[key])
    texts["manifest.json"] = json.dumps(corpus_manifest(corpus), indent=2) + "\n"
    return texts


def load_corpus(directory: Path | None = None) -> Corpus:
    """Load the corpus from rendered model files plus the check manifest.

    Reads the packaged corpus by default; pass a directory to load a
    regenerated or edited copy instead.
    """
    if directory is None:
        base = resources.files(__package__) / "corpus"
    else:
        base = Path(directory)
    manifest = json.loads((base / "manifest.json").read_text(encoding="utf-8"))

    def read_model(key: str) -> ModelFile:
        return parse_model_file((base / f"{key}.pa").read_text(encoding="utf-8"))

    studies = tuple(
        CaseStudy(
            name=entry["name"],
            description=entry["description"],
            primary=entry["primary"],
            models={key: read_model(key) for key in entry["models"]},
            checks=tuple(_check_from_json(obj) for obj in entry["checks"]),
        )
        for entry in manifest["studies"]
    )
    extras = {key: read_model(key) for key in manifest["extras"]}
    return Corpus(studies=studies, extras=extras)


# -- corpus runner ----------------------------------------------------------


@dataclass(frozen=True)
class CheckOutcome:
    """One executed check: what was expected, what happened, and a detail line."""

    study: str
    check: str
    expected: bool
    actual: bool
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.expected == self.actual


def format_outcome(outcome: CheckOutcome) -> str:
    status = "PASS" if outcome.passed else "FAIL"
    return (
        f"CHECK {outcome.study}.{outcome.check} "
        f"expected={str(outcome.expected).lower()} "
        f"actual={str(outcome.actual).lower()} {status}"
    )


def _run_study(study: CaseStudy, max_states: int) -> list[CheckOutcome]:
    cache: dict[str, Lts] = {}

    def lts_of(key: str) -> Lts:
        if key not in cache:
            cache[key] = build_lts(study.models[key].env, max_states=max_states)
        return cache[key]

    outcomes = []
    for check in study.checks:
        if isinstance(check, ReachabilityCheck):
            reachable = reachable_action_set(lts_of(study.primary), 0)
            actual = Action(check.action) in reachable
            detail = f"reachable actions: {sorted(a.name for a in reachable)}"
        elif isinstance(check, FormulaCheck):
            declared = study.model.property_named(check.property_name)
            actual = evaluate_formula(lts_of(study.primary), 0, declared.formula).holds
            detail = render_formula(declared.formula)
        else:
            verdict = check_equivalence(lts_of(check.left), lts_of(check.right), check.kind)
            actual = verdict.equivalent
            if verdict.equivalent:
                detail = f"witness partition with {verdict.witness_partition.n_blocks} blocks"
            else:
                detail = f"distinguished by {render_formula(verdict.distinguishing)}"
        outcomes.append(
            CheckOutcome(
                study=study.name,
                check=check.name,
                expected=check.expected,
                actual=actual,
                detail=detail,
            )
        )
    return outcomes


def run_corpus(
    corpus: Corpus | None = None,
    study: str | None = None,
    max_states: int = DEFAULT_MAX_STATES,
) -> tuple[CheckOutcome, ...]:
    """Run corpus checks (all studies, or one by name) in manifest order."""
    if corpus is None:
        corpus = load_corpus()
    selected = corpus.studies if study is None else (corpus.study(study),)
    outcomes: list[CheckOutcome] = []
    for case in selected:
        outcomes.extend(_run_study(case, max_states))
    return tuple(outcomes)
