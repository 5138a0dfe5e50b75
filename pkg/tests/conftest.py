import dataclasses

import numpy as np
import pytest

from splitlab.harness.config import load_config
from splitlab.splitting import SplittingSequence, run_simulation

PAPER_DX = (22.5e3, 45e3, 90e3, 180e3, 360e3)
PAPER_DT = (180.0, 360.0, 1800.0, 3600.0)
GODUNOV = (SplittingSequence.GODUNOV_TC, SplittingSequence.GODUNOV_CT)

_acceptance_lines = []


class PaperRuns:
    """Lazily computed final states of the coupled and transport-only scenarios."""

    def __init__(self):
        self.spec = load_config("paper_fig1.cfg")
        self._cache = {}

    def config(self, dx, dt, seq):
        return self.spec.scenario(dx, dt, seq)

    def result(self, dx, dt, seq):
        key = (dx, dt, SplittingSequence(seq))
        if key not in self._cache:
            self._cache[key] = run_simulation(self.config(*key))
        return self._cache[key]

    def final(self, dx, dt, seq):
        return self.result(dx, dt, seq).final


@pytest.fixture(scope="session")
def paper_runs():
    return PaperRuns()


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture(scope="session")
def acceptance_report():
    def record(number, title, passed, detail):
        _acceptance_lines.append((number, f"{'PASS' if passed else 'FAIL'}  criterion {number:2d}  {title}: {detail}"))
    return record


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_lines:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_acceptance_lines):
        terminalreporter.write_line(line)


def replace(cfg, **kw):
    return dataclasses.replace(cfg, **kw)
