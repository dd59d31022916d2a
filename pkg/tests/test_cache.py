from unittest.mock import patch

from src import config
from src.cache import JsonCache, cache_key


def test_put_then_get(tmp_path):
    cache = JsonCache(tmp_path, enabled=True)
    payload = {"p": 7, "values": [[1.0, 0.0]]}
    assert cache.put("chartab", 7, payload, variant="x") is not None
    assert cache.get("chartab", 7, variant="x") == payload
    assert cache.get("chartab", 7, variant="y") is None


def test_key_ignores_param_order():
    assert cache_key("epi", 7, seed=1, sig="0:2,3,7") == cache_key("epi", 7, sig="0:2,3,7", seed=1)
    assert cache_key("epi", 7, seed=1) != cache_key("epi", 11, seed=1)


def test_corrupted_file_is_a_miss(tmp_path):
    cache = JsonCache(tmp_path, enabled=True)
    path = cache.put("chartab", 7, {"ok": True})
    path.write_text("{not json", encoding="utf-8")
    assert cache.get("chartab", 7) is None


def test_disabled_cache_does_nothing(tmp_path):
    cache = JsonCache(tmp_path, enabled=False)
    assert cache.put("chartab", 7, {"ok": True}) is None
    assert cache.get("chartab", 7) is None
    assert not list(tmp_path.iterdir())


def test_write_failure_is_not_fatal(tmp_path):
    cache = JsonCache(tmp_path, enabled=True)
    with patch("builtins.open", side_effect=OSError("disk full")):
        assert cache.put("chartab", 7, {"ok": True}) is None


def test_clear(tmp_path):
    cache = JsonCache(tmp_path / "c", enabled=True)
    assert cache.clear() == 0
    cache.put("a", 7, 1)
    cache.put("b", 7, 2)
    assert cache.clear() == 2
    assert cache.get("a", 7) is None


def test_defaults_follow_config(isolated_cache):
    cache = JsonCache()
    assert str(cache.directory) == config.CACHE_DIR == str(isolated_cache)
    assert cache.enabled is True
