"""Shared pytest fixtures."""

import numpy as np
import pytest

from relu_sgd_lab.network.net_core import ParamVector
from relu_sgd_lab.sampling.input_model import EmpiricalBatch, UniformBox
from tests.fixtures.listing_data import LISTING_D, LISTING_H, LISTING_PHI, LISTING_X


@pytest.fixture(autouse=True)
def single_worker(monkeypatch):
    """Keep seed sweeps in-process during tests."""
    monkeypatch.setenv("RELU_SGD_LAB_THREADS", "1")


@pytest.fixture
def listing_phi() -> ParamVector:
    return ParamVector.from_list(LISTING_D, LISTING_H, LISTING_PHI)


@pytest.fixture
def listing_batch() -> EmpiricalBatch:
    return EmpiricalBatch.of([[LISTING_X]])


@pytest.fixture
def unit_interval() -> UniformBox:
    return UniformBox(0.0, 1.0, 1)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)
