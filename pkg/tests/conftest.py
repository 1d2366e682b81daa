import sys

import numpy as np
import pytest

from eqlab.bodies2d import (make_disc, make_ellipse, make_limacon, make_parabola_body,
                            make_yanagihara)
from eqlab.geometry2d import Circle


@pytest.fixture(scope="session")
def ellipse_body():
    return make_ellipse(2.0, 1.0)


@pytest.fixture(scope="session")
def parabola_body():
    return make_parabola_body()


@pytest.fixture(scope="session")
def yanagihara():
    return make_yanagihara()


@pytest.fixture(scope="session")
def limacon():
    return make_limacon(1.0, 3.0)


def concentric(R, r):
    return make_disc(R), Circle((0.0, 0.0), r)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)




def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
