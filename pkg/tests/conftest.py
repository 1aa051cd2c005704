import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from miqyas.guidelines import load_profile
from miqyas.levels import load_grade_bands, load_granularity_map

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def gmap():
    return load_granularity_map()


@pytest.fixture(scope="session")
def grade_bands():
    return load_grade_bands()


@pytest.fixture(scope="session")
def profile():
    return load_profile()


@pytest.fixture(scope="session")
def fixtures_dir():
    return FIXTURES
