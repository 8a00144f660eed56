import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as hs

from wavebranch import config as cfg
from wavebranch.errors import ConfigError
from wavebranch.report import NonFiniteOutput, csv_text, dumps


def test_parse_text_and_load(tmp_path):
    p = tmp_path / "run.cfg"
    p.write_text("# sweep\ncommand = stream\nomega = [1, -2]  # linear\nn_samples = 128\ntol_quad = 1e-11\n")
    c = cfg.load(str(p), {"s": "2.0"})
    assert c.command == "stream" and c.omega == [1.0, -2.0]
    assert c.n_samples == 128 and c.tol_quad == 1e-11 and c.s == 2.0


@pytest.mark.parametrize(
    "over",
    [
        {"tol_quad": -1.0},
        {"tol_newton": 0.0},
        {"n_q": 48},
        {"n_x": 2048},
        {"n_p": 8},
        {"command": "plot"},
        {"omega": "[1, x]"},
        {"k": 0},
        {"R": -1.0},
        {"bogus": 1},
    ],
)
def test_invalid_configs(over):
    with pytest.raises(ConfigError):
        cfg.load(None, over)


def test_bad_lines():
    with pytest.raises(ConfigError):
        cfg.parse_text("omega [1]")
    with pytest.raises(ConfigError):
        cfg.parse_text("nope = 1")
    with pytest.raises(ConfigError):
        cfg.parse_value("[1, 2")


def test_missing_file():
    with pytest.raises(ConfigError):
        cfg.load("/nonexistent/run.cfg")


def test_threads(monkeypatch):
    monkeypatch.delenv("WAVEBRANCH_THREADS", raising=False)
    assert cfg.threads() == 1
    monkeypatch.setenv("WAVEBRANCH_THREADS", "4")
    assert cfg.threads() == 4
    for bad in ("0", "x"):
        monkeypatch.setenv("WAVEBRANCH_THREADS", bad)
        with pytest.raises(ConfigError):
            cfg.threads()


@settings(max_examples=100)
@given(hs.floats(allow_nan=False, allow_infinity=False))
def test_dumps_round_trip(x):
    assert json.loads(dumps({"v": x}))["v"] == x
    assert float(csv_text(["v"], [[x]]).splitlines()[1]) == x


@given(hs.lists(hs.floats(-1e6, 1e6), max_size=5), hs.integers(-10, 10))
def test_dumps_structures(xs, n):
    obj = {"a": xs, "b": {"n": n, "arr": np.array(xs)}, "c": None, "d": True}
    back = json.loads(dumps(obj))
    assert back["a"] == xs and back["b"]["arr"] == xs and back["b"]["n"] == n


def test_non_finite_rejected():
    with pytest.raises(NonFiniteOutput):
        dumps({"x": [1.0, math.nan]})
    with pytest.raises(NonFiniteOutput):
        csv_text(["x"], [[math.inf]])
    assert json.loads(dumps({"x": math.inf}, allow_inf=True))["x"] == "inf"


def test_seventeen_digits():
    assert dumps(0.1) == "0.10000000000000001"
