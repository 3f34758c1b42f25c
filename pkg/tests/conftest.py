from pathlib import Path

import numpy as np
import pytest

from evidence_tools import corpus

DATA_DIR = Path(__file__).resolve().parent.parent / "data"


@pytest.fixture
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def y_table():
    return corpus.y_table()


@pytest.fixture
def bel_and():
    return corpus.bel_and()


@pytest.fixture
def m_and(bel_and):
    return corpus.m_and(bel_and.frame)


@pytest.fixture
def forty_sixty():
    return corpus.forty_sixty()


@pytest.fixture
def box_ambiguity():
    return corpus.box_ambiguity()


@pytest.fixture
def xz_frame():
    return corpus.XZ_FRAME


@pytest.fixture
def backtracking():
    return corpus.backtracking_instance()
