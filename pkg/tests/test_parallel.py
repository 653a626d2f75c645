import pytest

from hetnet import duopoly
from hetnet.parallel import ENV_VAR, pmap, worker_count


def _square(x):
    return x * x


def test_worker_count(monkeypatch):
    monkeypatch.delenv(ENV_VAR, raising=False)
    assert worker_count() == 1
    monkeypatch.setenv(ENV_VAR, "3")
    assert worker_count() == 3
    for bad in ("0", "-2", "many"):
        monkeypatch.setenv(ENV_VAR, bad)
        with pytest.raises(ValueError, match=ENV_VAR):
            worker_count()


def test_pmap_preserves_order(monkeypatch):
    monkeypatch.setenv(ENV_VAR, "2")
    assert pmap(_square, range(20)) == [x * x for x in range(20)]
    assert pmap(_square, []) == []


def test_parallel_region_map_identical(monkeypatch, duo_market):
    monkeypatch.delenv(ENV_VAR, raising=False)
    serial = duopoly.region_map(duo_market, 2.0, 1.0, 2.0, floor_grid=9).labels
    monkeypatch.setenv(ENV_VAR, "2")
    assert duopoly.region_map(duo_market, 2.0, 1.0, 2.0, floor_grid=9).labels == serial
