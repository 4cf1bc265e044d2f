import numpy as np
import pytest

from dfrc_outage.array_model import UlaConfig
from dfrc_outage.channel_model import ChannelSet, UserSpec, db_to_linear, make_rng, sample_nominal_channels


def random_psd(rng, n, rank=None, trace=1.0):
    rank = n if rank is None else rank
    A = rng.standard_normal((n, rank)) + 1j * rng.standard_normal((n, rank))
    W = A @ A.conj().T
    return W * (trace / np.trace(W).real)


def uniform_channels(rng, n_users, n_antennas, gamma_db, outage_p=0.1, sigma_delta=0.1, noise_var=0.2):
    user = UserSpec(float(db_to_linear(gamma_db)), outage_p, sigma_delta)
    h = sample_nominal_channels(rng, n_users, n_antennas)
    return ChannelSet(h, [user] * n_users, noise_var)


@pytest.fixture
def rng():
    return make_rng(20240611)


@pytest.fixture
def ula8():
    return UlaConfig(8)


# One line per acceptance criterion, echoed in the terminal summary.
ACCEPTANCE_LINES = []


def record_acceptance(tag, ok, detail):
    line = f"{tag} {'PASS' if ok else 'FAIL'}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[0][2:])):
            terminalreporter.write_line(line)
