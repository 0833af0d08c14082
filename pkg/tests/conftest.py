from importlib import resources

import pytest

from khmseg import FallbackClusterDatabase, TrainingDatabase, default_tables


def data_text(name: str) -> str:
    return resources.files("khmseg.data").joinpath(name).read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def tables():
    return default_tables()


@pytest.fixture(scope="session")
def mini_tdb(tables):
    return TrainingDatabase.load(data_text("mini_tdb.tsv"), tables)


@pytest.fixture(scope="session")
def mini_fallback(tables):
    return FallbackClusterDatabase.load(data_text("mini_fallback.tsv"), tables)
