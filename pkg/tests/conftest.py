import json

import pytest

from asmstarve.corpus import entries, entry
from asmstarve.engine.envscript import parse_env_script


@pytest.fixture(scope="session")
def corpus():
    return {e.name: e for e in entries()}


@pytest.fixture(scope="session")
def dp5(corpus):
    return corpus["dining_philosophers"].model()


@pytest.fixture(scope="session")
def dp2(corpus):
    return corpus["dp2"].model()


@pytest.fixture(scope="session")
def dp5_bakery(corpus):
    return corpus["dining_philosophers_bakery"].model()


@pytest.fixture(scope="session")
def aodv_nt(corpus):
    return corpus["aodv_no_timeout"].model()


@pytest.fixture(scope="session")
def aodv_t(corpus):
    return corpus["aodv_timeout"].model()


def env_for(name: str, env_file: str):
    e = entry(name)
    data = json.loads((e.path.parent / env_file).read_text())
    return parse_env_script(data, e.model())
