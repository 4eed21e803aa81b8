import importlib.resources

import pytest

from relmine import compile_matcher, load_dictionary
from relmine.grammar import load_grammar

DATA = importlib.resources.files("relmine") / "data"


def data_path(*parts) -> str:
    return str(DATA.joinpath(*parts))


@pytest.fixture(scope="session")
def dictionaries():
    return [
        load_dictionary(data_path("dictionaries", "crops.dic"), "p"),
        load_dictionary(data_path("dictionaries", "diseases.dic"), "m"),
        load_dictionary(data_path("dictionaries", "pests.dic"), "b"),
        load_dictionary(data_path("dictionaries", "regions.dic"), "r"),
    ]


@pytest.fixture(scope="session")
def matcher(dictionaries):
    return compile_matcher(dictionaries)


@pytest.fixture(scope="session")
def grammar_set():
    return load_grammar([
        data_path("grammars", "date.gmr"),
        data_path("grammars", "stage.gmr"),
        data_path("grammars", "damage.gmr"),
    ])
