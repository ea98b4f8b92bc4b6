import json
from pathlib import Path

import pytest

from src.corpus import hidden_axiom_example, regular_model, standard_sorted_group

CORPUS = Path(__file__).resolve().parent.parent / "corpus"


@pytest.fixture(scope="session")
def corpus_dir() -> Path:
    return CORPUS


@pytest.fixture(scope="session")
def hidden_example():
    return hidden_axiom_example(4)


@pytest.fixture(scope="session")
def z2():
    return standard_sorted_group("Z2")


@pytest.fixture(scope="session")
def z4():
    return standard_sorted_group("Z4")


@pytest.fixture(scope="session")
def s3():
    return standard_sorted_group("S3")


@pytest.fixture(scope="session")
def z2_model(z2):
    return regular_model(z2)


@pytest.fixture
def write_json(tmp_path):
    def write(name: str, data) -> str:
        path = tmp_path / name
        path.write_text(json.dumps(data) if not isinstance(data, str) else data, encoding="utf-8")
        return str(path)
    return write
