import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

DATA = Path(__file__).parent.parent / "src" / "polyhom" / "data"


@pytest.fixture
def data():
    return DATA
