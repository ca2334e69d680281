"""Shared fixtures: the corpus and the three buffer models used throughout."""

import pytest

from pacheck import build_corpus, build_lts, build_producer_consumer


@pytest.fixture(scope="session")
def corpus():
    return build_corpus()


@pytest.fixture(scope="session")
def corpus_ltss(corpus):
    return {key: build_lts(model.env) for key, model in corpus.models().items()}


@pytest.fixture(scope="session")
def buffer_models():
    return {
        style: build_producer_consumer(2, 1, 1, style)
        for style in ("spec", "concurrent", "pipeline")
    }


@pytest.fixture(scope="session")
def buffer_ltss(buffer_models):
    return {style: build_lts(model.env) for style, model in buffer_models.items()}
