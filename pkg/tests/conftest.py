from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from metarepo.fixtures import build_demo_repository


@pytest.fixture
def demo_repo():
    return build_demo_repository()
