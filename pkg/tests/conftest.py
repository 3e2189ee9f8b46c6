import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from scenery.scenegen import GenParams, generate_bench_corpus, generate_bundle


@pytest.fixture(scope="session")
def default_params():
    return GenParams()


@pytest.fixture(scope="session")
def composite_bundle(default_params):
    """(files, manifest) for the default composite; shared, treat as
    read-only."""
    return generate_bundle("composite", default_params)


@pytest.fixture(scope="session")
def bench_corpus(default_params):
    return generate_bench_corpus(default_params)
