"""Shared pipeline fixtures built from the bundled synthetic corpus."""

import pytest

from guiltspan.annotations import aggregate_corpus, exclude_participants, exclude_stories
from guiltspan.corpus import filter_archive
from guiltspan.fixtures import generate_fixture
from guiltspan.modeling import SubwordTokenizer, build_dataset


@pytest.fixture(scope="session")
def fixture_pipeline():
    """(stories, annotations, aggregated, truths) from the 30-story fixture."""
    archive, sessions, truths = generate_fixture()
    stories, _ = filter_archive(archive)
    kept_sessions, _ = exclude_participants(sessions)
    annotations = [a for s in kept_sessions for a in s.annotations]
    kept_ids, _ = exclude_stories([s.id for s in stories], annotations)
    by_id = {s.id: s for s in stories}
    kept = [by_id[i] for i in kept_ids]
    aggregated = aggregate_corpus(kept, annotations)
    return kept, annotations, aggregated, truths


@pytest.fixture(scope="session")
def fixture_tokenizer(fixture_pipeline):
    stories, _, _, _ = fixture_pipeline
    return SubwordTokenizer.train([[t.surface for t in s.tokens] for s in stories])


@pytest.fixture(scope="session")
def fixture_dataset(fixture_pipeline, fixture_tokenizer):
    stories, _, aggregated, _ = fixture_pipeline
    return build_dataset(fixture_tokenizer, stories, aggregated, "reader_perception")
