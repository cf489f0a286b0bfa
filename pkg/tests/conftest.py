import numpy as np
import pytest

from activeirs.channel import ChannelRealization, Geometry, PathLossModel, SystemParams, sample_channel


@pytest.fixture
def unit_params():
    # P_S = 1, P_I = 3, unit noise, one element
    return SystemParams(p_s=1.0, p_i=3.0, sigma_i_sq=1.0, sigma_u_sq=1.0, n=1)


@pytest.fixture
def unit_channel():
    return ChannelRealization([1.0], [1.0], 1.0)


def random_channel(rng, n, h_scale=1.0):
    def cn(size):
        return (rng.standard_normal(size) + 1j * rng.standard_normal(size)) / np.sqrt(2)
    return ChannelRealization(cn(n), cn(n), h_scale * cn(1)[0])


def default_channel(n, seed):
    params = SystemParams(n=n)
    return sample_channel(Geometry(), PathLossModel(), params, seed), params


ACCEPTANCE_LINES: list[str] = []


def record_criterion(number: int, title: str, passed: bool, detail: str) -> None:
    ACCEPTANCE_LINES.append(f"[{'PASS' if passed else 'FAIL'}] criterion {number:>2}: {title} -- {detail}")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda l: int(l.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
