from __future__ import annotations

import pytest

from thimac.corpus import FIXTURES, fixture_source
from thimac.dsl import parse_model


def load_fixture(fixture_id: str):
    fixture = next(f for f in FIXTURES if f.id == fixture_id)
    result = parse_model(fixture_source(fixture))
    assert result.ok, [d.message for d in result.diagnostics]
    return result.model


@pytest.fixture(scope="session")
def fixture_models():
    return {f.id: load_fixture(f.id) for f in FIXTURES}


@pytest.fixture(scope="session")
def fixture_sources():
    return {f.id: fixture_source(f) for f in FIXTURES}
