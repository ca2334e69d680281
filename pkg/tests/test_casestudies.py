"""Corpus studies: builders, pinned verdicts, file round trips, and the runner."""

import json
from importlib import resources

import pytest

from pacheck import (
    CaseStudy,
    EquivalenceCheck,
    FormulaCheck,
    ReachabilityCheck,
    build_corpus,
    build_lts,
    build_producer_consumer,
    check_equivalence,
    corpus_file_texts,
    corpus_manifest,
    evaluate_formula,
    format_outcome,
    load_corpus,
    naive_equivalence_oracle,
    observable,
    parse_model_file,
    reachable_action_set,
    run_corpus,
)


def test_builder_arguments_are_validated():
    with pytest.raises(ValueError, match="capacity must be at least 1, got 0"):
        build_producer_consumer(0)
    with pytest.raises(ValueError, match="producers must be at least 1"):
        build_producer_consumer(2, producers=0)
    with pytest.raises(ValueError, match="consumers must be at least 1"):
        build_producer_consumer(2, consumers=0)
    with pytest.raises(ValueError, match="style must be one of"):
        build_producer_consumer(2, style="parallel")
    with pytest.raises(ValueError, match="variant must be 'chain1' or 'chain2'"):
        from pacheck import build_offline_chain

        build_offline_chain("chain3")


def test_buffer_styles_agree_across_capacities():
    for capacity in (1, 3):
        spec = build_lts(build_producer_consumer(capacity, 1, 1, "spec").env)
        conc = build_lts(build_producer_consumer(capacity, 1, 1, "concurrent").env)
        pipe = build_lts(build_producer_consumer(capacity, 1, 1, "pipeline").env)
        assert spec.n_states == capacity + 1
        assert conc.n_states == 2**capacity
        assert check_equivalence(conc, spec, "strong").equivalent
        assert check_equivalence(pipe, spec, "weak").equivalent


def test_extra_producers_and_consumers_do_not_change_behavior():
    spec = build_lts(build_producer_consumer(2, 1, 1, "spec").env)
    crowded = build_lts(build_producer_consumer(2, 3, 2, "concurrent").env)
    assert check_equivalence(crowded, spec, "strong").equivalent


def test_corpus_shape_is_pinned(corpus):
    assert [study.name for study in corpus.studies] == [
        "offline_chain_1",
        "offline_chain_2",
        "double_spend",
        "torn_transaction",
    ]
    assert sum(len(study.checks) for study in corpus.studies) == 8
    assert sorted(corpus.extras) == ["pc_conc", "pc_pipe", "pc_spec"]
    assert len(corpus.models()) == 13
    with pytest.raises(KeyError, match="no case study named 'escrow'"):
        corpus.study("escrow")
    for study in corpus.studies:
        assert study.model is study.models[study.primary]


def test_study_construction_is_validated(corpus):
    wallet = corpus.study("double_spend").models["ds_wallet"]
    check = ReachabilityCheck("r", "d", "accept", True)
    with pytest.raises(ValueError, match="primary model"):
        CaseStudy("s", "d", "missing", {"m": wallet}, ())
    with pytest.raises(ValueError, match="duplicate check names"):
        CaseStudy("s", "d", "m", {"m": wallet}, (check, check))
    with pytest.raises(ValueError, match="not a model of study"):
        CaseStudy(
            "s",
            "d",
            "m",
            {"m": wallet},
            (EquivalenceCheck("e", "d", "m", "other", "strong", True),),
        )
    with pytest.raises(KeyError):
        CaseStudy(
            "s",
            "d",
            "m",
            {"m": wallet},
            (FormulaCheck("f", "d", "undeclared", True),),
        )


def test_chain_one_attributes_blame_and_terminates(corpus, corpus_ltss):
    chain = corpus_ltss["chain1"]
    assert observable("blame_a") in reachable_action_set(chain, 0)
    assert observable("forge") in reachable_action_set(chain, 0)
    # Chains are acyclic: no state can reach itself again.
    for state in range(chain.n_states):
        stack = [target for _, target in chain.outgoing[state]]
        seen = set()
        while stack:
            current = stack.pop()
            assert current != state
            if current not in seen:
                seen.add(current)
                stack.extend(target for _, target in chain.outgoing[current])


def test_observed_chain_one_meets_its_attribution_contract(corpus):
    study = corpus.study("offline_chain_1")
    observed_env = study.models["chain1"].env.with_root("Chain1Observed")
    observed = build_lts(observed_env)
    contract = build_lts(study.models["chain1_attrib_spec"].env)
    assert observable("forge") not in observed.alphabet
    assert check_equivalence(observed, contract, "weak").equivalent
    assert naive_equivalence_oracle(observed, contract, "weak")


def test_chain_two_names_suspects_but_never_blames(corpus_ltss):
    chain = corpus_ltss["chain2"]
    reachable = reachable_action_set(chain, 0)
    assert observable("suspect_a") in reachable
    assert observable("suspect_b") in reachable
    assert not any(action.name.startswith("blame") for action in reachable)


def test_double_spend_formula_holds_and_wallets_sort_out(corpus, corpus_ltss):
    study = corpus.study("double_spend")
    declared = study.model.property_named("replay_rejected")
    assert evaluate_formula(corpus_ltss["double_spend"], 0, declared.formula).holds

    wallet, spec = corpus_ltss["ds_wallet"], corpus_ltss["ds_wallet_spec"]
    broken = corpus_ltss["ds_wallet_broken"]
    assert check_equivalence(wallet, spec, "weak").equivalent
    verdict = check_equivalence(broken, spec, "weak")
    assert not verdict.equivalent
    from pacheck import render_formula

    formula = verdict.distinguishing
    assert "accept" in render_formula(formula)
    assert evaluate_formula(broken, 0, formula).holds
    assert not evaluate_formula(spec, 0, formula).holds


def test_torn_recovery_is_invisible_and_its_absence_is_not(corpus, corpus_ltss):
    torn, spec = corpus_ltss["torn"], corpus_ltss["torn_spec"]
    broken = corpus_ltss["torn_broken"]
    assert check_equivalence(torn, spec, "weak").equivalent
    assert not check_equivalence(broken, spec, "weak").equivalent

    declared = corpus.study("torn_transaction").model.property_named("send_resolves")
    assert evaluate_formula(torn, 0, declared.formula).holds
    assert not evaluate_formula(broken, 0, declared.formula).holds


def test_every_corpus_equivalence_check_agrees_with_the_oracle(corpus, corpus_ltss):
    for study in corpus.studies:
        for check in study.checks:
            if isinstance(check, EquivalenceCheck):
                left, right = corpus_ltss[check.left], corpus_ltss[check.right]
                verdict = check_equivalence(left, right, check.kind)
                assert verdict.equivalent == check.expected
                assert naive_equivalence_oracle(left, right, check.kind) == check.expected


def test_corpus_run_reports_eight_passes(corpus):
    outcomes = run_corpus(corpus)
    assert len(outcomes) == 8
    assert all(outcome.passed for outcome in outcomes)
    lines = [format_outcome(outcome) for outcome in outcomes]
    assert (
        "CHECK double_spend.replay_rejected expected=true actual=true PASS" in lines
    )
    assert all(line.startswith("CHECK ") and line.endswith(" PASS") for line in lines)


def test_corpus_run_can_select_a_single_study(corpus):
    outcomes = run_corpus(corpus, study="double_spend")
    assert [outcome.check for outcome in outcomes] == [
        "replay_rejected",
        "wallet_meets_spec",
        "broken_wallet_caught",
    ]
    with pytest.raises(KeyError):
        run_corpus(corpus, study="missing")


def test_failed_expectations_are_reported_not_raised(corpus):
    study = corpus.study("offline_chain_1")
    flipped = CaseStudy(
        study.name,
        study.description,
        study.primary,
        study.models,
        (ReachabilityCheck("blame_a_reachable", "flipped", "blame_a", False),),
    )
    outcome = run_corpus(
        type(corpus)(studies=(flipped,), extras={})
    )[0]
    assert not outcome.passed
    assert format_outcome(outcome).endswith("FAIL")
    assert "reachable actions:" in outcome.detail


def test_rendered_corpus_files_match_the_packaged_ones():
    texts = corpus_file_texts()
    package_dir = resources.files("pacheck") / "corpus"
    packaged = {
        entry.name: entry.read_text(encoding="utf-8")
        for entry in package_dir.iterdir()
        if entry.name.endswith((".pa", ".json"))
    }
    assert packaged == texts


def test_corpus_loads_identically_from_files_and_builders(corpus, tmp_path):
    for name, text in corpus_file_texts().items():
        (tmp_path / name).write_text(text, encoding="utf-8")
    from_disk = load_corpus(tmp_path)
    assert from_disk == corpus
    assert load_corpus() == corpus


def test_manifest_lists_studies_models_and_checks(corpus):
    manifest = corpus_manifest(corpus)
    assert manifest["extras"] == ["pc_conc", "pc_pipe", "pc_spec"]
    names = [entry["name"] for entry in manifest["studies"]]
    assert names == [study.name for study in corpus.studies]
    double_spend = manifest["studies"][2]
    kinds = [check["kind"] for check in double_spend["checks"]]
    assert kinds == ["formula", "equivalence", "equivalence"]
    assert json.dumps(manifest)  # round-trippable plain data
