import numpy as np
import pytest

from imagequery import synth
from imagequery.embeddings import WordVectors
from imagequery.textprep import LexiconTagger


@pytest.fixture(scope="session")
def demo_world(tmp_path_factory):
    out = tmp_path_factory.mktemp("demo_world")
    return synth.write_demo_world(out)


@pytest.fixture(scope="session")
def ablation_world(tmp_path_factory):
    out = tmp_path_factory.mktemp("ablation_world")
    return synth.write_ablation_world(out, n_samples=50, seed=7)


@pytest.fixture(scope="session")
def tagger():
    return LexiconTagger.bundled()


def store_from(table: dict[str, list[float]]) -> WordVectors:
    """Build an in-memory word store from plain lists (test helper)."""
    dim = len(next(iter(table.values())))
    return WordVectors(
        dim=dim,
        vectors={k: np.asarray(v, dtype=np.float64) for k, v in table.items()},
    )
