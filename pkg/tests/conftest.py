import os
import random
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from twapprox.trigraph import Trigraph


def random_graph(n, p, seed):
    rng = random.Random(seed)
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
    return Trigraph.from_edges(n, edges)


@pytest.fixture
def fig1():
    from twapprox.instances import gen_figure1
    return gen_figure1()


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.report_lines():
        terminalreporter.write_line(line)
