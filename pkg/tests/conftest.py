# Test Configuration
"""
Configuration and fixtures for entangle tests
"""

import os
import sys
from pathlib import Path

import numpy as np
import pytest

# Set test environment variables before the settings cache is filled
os.environ["ENTANGLE_ENVIRONMENT"] = "test"
os.environ["ENTANGLE_LOG_LEVEL"] = "WARNING"
os.environ["ENTANGLE_THREADS"] = "1"

# Add the package to Python path
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from entangle.core.config import DEFAULT_TOLERANCES, get_settings  # noqa: E402
from entangle.processors.bipartite import (  # noqa: E402
    maximally_mixed,
    singlet_vector,
    tensor_system,
    vector_state,
    werner_state,
)

get_settings.cache_clear()

# Test data directory
TEST_DATA_DIR = Path(__file__).parent.parent / "test_data"
CONFIGS_DIR = Path(__file__).parent.parent / "configs"


@pytest.fixture(scope="session")
def test_data_dir():
    """Fixture providing path to test data directory"""
    return TEST_DATA_DIR


@pytest.fixture(scope="session")
def configs_dir():
    return CONFIGS_DIR


@pytest.fixture(scope="session")
def tol():
    return DEFAULT_TOLERANCES


@pytest.fixture(scope="session")
def qubits():
    """Standard 2x2 tensor system"""
    return tensor_system(2, 2)


@pytest.fixture(scope="session")
def qutrits():
    return tensor_system(3, 3)


@pytest.fixture(scope="session")
def singlet():
    return vector_state(singlet_vector())


@pytest.fixture(scope="session")
def mixed():
    return maximally_mixed(2, 2)


@pytest.fixture
def werner():
    """Factory for Werner states p |singlet><singlet| + (1 - p) I/4"""
    return werner_state


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
