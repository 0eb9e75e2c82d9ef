"""Cache round trips and corruption handling."""
import numpy as np
import pytest

from pentlab import cache
from pentlab.census import build_census


def test_roundtrip_and_inspect(tmp_path):
    arrays = {"x": np.arange(5), "y": np.array(["a", "bc"])}
    cache.save("demo", 3, arrays, str(tmp_path))
    back = cache.load("demo", 3, str(tmp_path))
    assert np.array_equal(back["x"], arrays["x"]) and list(back["y"]) == ["a", "bc"]
    rec = cache.inspect(str(tmp_path))
    assert rec[0]["file"] == "demo-3-v1.npz" and rec[0]["ok"]


def test_corruption_is_detected_and_rebuilt(tmp_path):
    cache.save("demo", 1, {"x": np.arange(3)}, str(tmp_path))
    path = cache.entry_path("demo", 1, str(tmp_path))
    raw = bytearray(path.read_bytes())
    raw[len(raw) // 2] ^= 0xFF
    path.write_bytes(bytes(raw))
    with pytest.raises(cache.CacheError):
        cache.load("demo", 1, str(tmp_path))
    assert not cache.inspect(str(tmp_path))[0]["ok"]
    out = cache.cached("demo", 1, lambda: {"x": np.arange(4)}, str(tmp_path))
    assert len(out["x"]) == 4
    assert cache.load("demo", 1, str(tmp_path)) is not None


def test_catalog_roundtrip(tmp_path):
    cat = cache.load_catalog(5, str(tmp_path))
    again = cache.load_catalog(5, str(tmp_path))
    ref = build_census(5).catalog()
    assert again.words == ref.words == cat.words
    assert np.allclose(again.len_hyp, ref.len_hyp, equal_nan=True)
    assert np.array_equal(again.primitive, ref.primitive)


def test_env_var(monkeypatch, tmp_path):
    monkeypatch.setenv(cache.ENV_VAR, str(tmp_path))
    assert cache.cache_dir() == tmp_path
    assert cache.cache_dir("/elsewhere").as_posix() == "/elsewhere"
