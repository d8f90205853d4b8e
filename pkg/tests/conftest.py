import math

import pytest

from pcosync import NetworkConfig, OscillatorProfile, PhaseResponseCurve, Topology

PI = math.pi

FIG5_EDGES = [(1, 2), (2, 3), (3, 2), (2, 4), (4, 2)]
TEST_PHASES = (PI / 2, 0.3 * PI, 0.03 * PI, 0.9 * PI)


@pytest.fixture
def fig5():
    return Topology.from_edges(4, FIG5_EDGES, one_based=True)


@pytest.fixture
def sine():
    return PhaseResponseCurve("negative_sine")


@pytest.fixture
def test1_config(fig5, sine):
    return NetworkConfig.homogeneous(1.0, OscillatorProfile(sine, 0.4), fig5, TEST_PHASES)


@pytest.fixture
def test2_config(fig5, sine):
    profiles = (
        OscillatorProfile(PhaseResponseCurve("triangle"), 0.6),
        OscillatorProfile(sine, 0.4),
        OscillatorProfile(sine, 0.5),
        OscillatorProfile(sine, 0.6),
    )
    return NetworkConfig(1.0, profiles, fig5, TEST_PHASES)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
