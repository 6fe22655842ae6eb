from __future__ import annotations

import sys
from pathlib import Path

import pytest

# allow running the suite from a source checkout without installing
_SRC = Path(__file__).resolve().parents[1] / "src"
if str(_SRC) not in sys.path:
    sys.path.insert(0, str(_SRC))

from cantofuse import fusion, textnorm  # noqa: E402


@pytest.fixture(scope="session")
def tables() -> textnorm.NormalizationTables:
    return textnorm.load_tables()


@pytest.fixture(scope="session")
def jyutping_table() -> dict[str, tuple[str, ...]]:
    return fusion.load_jyutping_table()
