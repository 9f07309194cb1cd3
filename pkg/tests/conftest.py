import datetime
import os

import pytest

from calnlu import Avm, Engine, EngineConfig, Term

TODAY = datetime.date(1994, 6, 1)
DATA_DIR = os.path.join(os.path.dirname(__file__), "data")


def make_engine(**overrides):
    overrides.setdefault("today", TODAY)
    return Engine(EngineConfig(**overrides))


@pytest.fixture(scope="session")
def engine():
    return make_engine()


@pytest.fixture(scope="session")
def engine_nofilters():
    return make_engine(no_filters=True)


@pytest.fixture
def ctx_ready():
    return Avm(hr=Avm(attends="user"), sr="user", lang_code="english", lang_channel="text")


@pytest.fixture
def ctx_ques():
    return Avm(
        hr=Avm(attends="user"),
        sr="user",
        lang_code="english",
        lang_channel="text",
        p_utter=Avm(cons_n=Term("sent", ("ques", "wh_time"))),
    )


def load_corpus():
    items = []
    with open(os.path.join(DATA_DIR, "corpus.txt"), encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            ctx, text = line.split("|", 1)
            items.append((ctx, text))
    return items
