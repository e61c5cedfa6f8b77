import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

import pytest

from oracles import random_corpus


@pytest.fixture(scope="session")
def fuzz_corpus_small():
    """200 random valid molecules, <= 15 heavy atoms."""
    return random_corpus(seed=11, size=200, max_atoms=15)


@pytest.fixture(scope="session")
def fuzz_corpus_tiny():
    """100 random valid molecules, <= 8 heavy atoms."""
    return random_corpus(seed=23, size=100, max_atoms=8)
