"""Parameterized reconstruction of the Georgia/Savannah composite scene."""

from .composite import LOD_RANGE, bundle_resolver, generate_bundle, generate_composite
from .corpus import (
    CorpusArtifact,
    MAX_SEARCH_ITERATIONS,
    SIZE_WINDOW,
    XML_SIZE_TARGETS,
    generate_bench_corpus,
)
from .files import (
    BACKDROP_FILE,
    CAR_FILE,
    ENGINE_FILE,
    GEORGIA_FILE,
    SAVANNAH_FILE,
    STATION_FILE,
)
from .georgia import default_detail, generate_georgia
from .params import GenParams, SceneManifest
from .savannah import generate_savannah

__all__ = [
    "BACKDROP_FILE",
    "CAR_FILE",
    "CorpusArtifact",
    "ENGINE_FILE",
    "GEORGIA_FILE",
    "GenParams",
    "LOD_RANGE",
    "MAX_SEARCH_ITERATIONS",
    "SAVANNAH_FILE",
    "SIZE_WINDOW",
    "STATION_FILE",
    "SceneManifest",
    "XML_SIZE_TARGETS",
    "bundle_resolver",
    "default_detail",
    "generate_bench_corpus",
    "generate_bundle",
    "generate_composite",
    "generate_georgia",
    "generate_savannah",
]
