from pathlib import Path

import pytest

from calig.graph import load_graph, load_query, load_update_stream

DATA = Path(__file__).parent / "data"


def load_running():
    vocab: dict[str, int] = {}
    g = load_graph((DATA / "running_data.graph").read_text(), vocab)
    q = load_query((DATA / "running_query.graph").read_text(), vocab)
    ops = load_update_stream((DATA / "running.stream").read_text(), g.vertex_count)
    return q, g, ops


@pytest.fixture
def running():
    """Query, data graph and two-op stream of the worked example."""
    return load_running()


@pytest.fixture
def data_dir():
    return DATA
