import hypothesis
import numpy as np
import pytest

from entropy_stability.domain import SampleSpec, make_sample_set

hypothesis.settings.register_profile("default", max_examples=60, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=10, deadline=None)
hypothesis.settings.load_profile("default")

# overflow, divide-by-zero and invalid ops fail tests; underflow to zero is benign
np.seterr(all="raise", under="ignore")


@pytest.fixture(scope="session")
def default_samples():
    return make_sample_set()


@pytest.fixture(scope="session")
def small_samples():
    return make_sample_set(SampleSpec(lo=0.05, hi=20.0, per_axis=6, t_count=5), seed=11)


# acceptance criteria report one line each in the terminal summary
ACCEPTANCE = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[ACCEPTANCE] = {}


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.stash.get(ACCEPTANCE, {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        terminalreporter.write_line(results[n])
