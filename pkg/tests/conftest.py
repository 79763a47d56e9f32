# tests/conftest.py

import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

from src.acquisition.channel import symmetric_channel
from src.acquisition.genome import BaseDistribution, generate_genome


@pytest.fixture
def uniform():
    return BaseDistribution.uniform()


@pytest.fixture
def genome_2k(uniform):
    """A 2000-base uniform genome shared by the correction and quality tests."""
    return generate_genome(2_000, uniform, seed=3)


@pytest.fixture
def channel_01():
    return symmetric_channel(0.1)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


