"""Shared fixtures and the acceptance-summary terminal hook."""
from __future__ import annotations

import numpy as np
import pytest

from thermodelay.generator import build_grid
from thermodelay.model import SystemSpec, Variant

ACCEPTANCE_LINES: list[str] = []


def record_acceptance(line: str) -> None:
    """Store one criterion verdict for the terminal summary."""
    ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def grid8():
    return build_grid(8)


@pytest.fixture(scope="session")
def grid16():
    return build_grid(16)


@pytest.fixture(scope="session")
def grid32():
    return build_grid(32)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def elastic_spec():
    # xi = 2*tau/a, the smallest admissible history weight
    return SystemSpec(
        Variant.DELAY_ELASTIC, 0.5, 0.5, a=1.0, kappa=1.0, tau=1.0, xi=2.0
    )


@pytest.fixture
def heat_spec():
    # xi = tau*a, the midpoint of the admissible interval
    return SystemSpec(Variant.DELAY_HEAT, 0.5, 0.5, a=2.0, kappa=1.0, tau=1.0, xi=2.0)
