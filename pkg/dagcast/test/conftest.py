import os

import pytest

from dagcast import config, g, graph, paths
from dagcast.connectivity import load_process


@pytest.fixture(autouse=True)
def isolated_config(tmp_path, monkeypatch):
    """ Keep every test away from the user's config file. """
    monkeypatch.setattr(g, "CFFILE", str(tmp_path / "config.json"))
    monkeypatch.delenv("DAGCAST_MATCH_LIMIT", raising=False)
    config.reset()
    yield
    config.reset()


def fixture_path(name):
    return os.path.join(paths.get_fixture_dir(), name)


@pytest.fixture
def grid():
    return graph.grid_network()


@pytest.fixture
def twolink():
    return graph.two_link_network()


@pytest.fixture
def twolink_case():
    """ Loader for the correlated two-link tables: case 1, 2 or 3. """
    net = graph.two_link_network()

    def load(case):
        return load_process(fixture_path("twolink-case%d.json" % case), net)

    return load
