import sys
from pathlib import Path

import pytest

project_root = Path(__file__).resolve().parents[1]
if str(project_root) not in sys.path:
    sys.path.insert(0, str(project_root))

from src import config  # noqa: E402
from src.chartab import build_character_table  # noqa: E402
from src.psl2 import enumerate_group  # noqa: E402


@pytest.fixture(autouse=True)
def isolated_cache(tmp_path, monkeypatch):
    """Каждый тест пишет кэш в свой временный каталог."""
    cache_dir = tmp_path / "cache"
    monkeypatch.setattr(config, "CACHE_DIR", str(cache_dir))
    monkeypatch.setattr(config, "CACHE_ENABLED", True)
    return cache_dir


@pytest.fixture(scope="session")
def group7():
    return enumerate_group(7)


@pytest.fixture(scope="session")
def table7():
    return build_character_table(7)


@pytest.fixture(scope="session")
def table11():
    return build_character_table(11)
