import json
from unittest import mock

import pytest

from dagcast import config, g


def test_defaults():
    assert config.MATCH_LIMIT.get == 10 ** 6
    assert config.LP_SOLVER.get == "simplex"
    assert config.CHECK_LEVEL.get == "sampled"
    assert config["lp_tolerance"].get == 1e-9
    assert "STABILITY_THETA" in config
    assert "nonsense" not in config


def test_unknown_item():
    with pytest.raises(KeyError):
        config["nonsense"]

    with pytest.raises(AttributeError):
        config.NONSENSE


@pytest.mark.parametrize(
    "key,value,expected",
    (
        ("workers", "4", 4),
        ("workers", "4.0", 4),
        ("stability_theta", "0.05", 0.05),
        ("lp_solver", "highs", "highs"),
        ("check_level", "every-slot", "every-slot"),
        ("update_prob", "0.5", 0.5),
    ),
)
def test_set_valid(key, value, expected):
    message = config[key].set(value, is_temp=True)
    assert "set to" in message
    assert config[key].get == expected


@pytest.mark.parametrize(
    "key,value",
    (
        ("workers", "0"),
        ("workers", "2.5"),
        ("workers", "many"),
        ("lp_solver", "glpk"),
        ("cut_limit", "31"),
        ("update_prob", "0"),
        ("update_prob", "1.5"),
        ("stability_theta", "nan"),
    ),
)
def test_set_invalid(key, value):
    before = config[key].get
    config[key].set(value, is_temp=True)
    assert config[key].get == before


def test_save_and_load_roundtrip():
    config.WORKERS.set("3")

    with open(g.CFFILE) as fh:
        saved = json.load(fh)
    assert saved["workers"] == 3

    config.reset()
    assert config.WORKERS.get == 1
    config.load()
    assert config.WORKERS.get == 3


def test_load_ignores_unknown_and_bad_files():
    with open(g.CFFILE, "w") as fh:
        json.dump({"workers": 2, "no_such_item": 5}, fh)

    config.load()
    assert config.WORKERS.get == 2

    with open(g.CFFILE, "w") as fh:
        fh.write("{broken")

    config.load()
    assert config.WORKERS.get == 2


def test_env_override():
    with mock.patch.dict("os.environ", {"DAGCAST_MATCH_LIMIT": "50"}):
        assert config.MATCH_LIMIT.get == 50
        assert "DAGCAST_MATCH_LIMIT" in str(config.MATCH_LIMIT.display)

    assert config.MATCH_LIMIT.get == 10 ** 6


def test_env_override_ignores_garbage():
    with mock.patch.dict("os.environ", {"DAGCAST_MATCH_LIMIT": "lots"}):
        assert config.MATCH_LIMIT.get == 10 ** 6
