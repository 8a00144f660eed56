import math
import warnings

import pytest

from wavebranch import stream as st
from wavebranch.errors import AccuracyWarning
from wavebranch.vorticity import VorticityModel, builtin_models


@pytest.fixture(scope="session")
def models():
    return builtin_models()


@pytest.fixture(scope="session")
def zero():
    return VorticityModel((0.0,))


@pytest.fixture(scope="session")
def curves(models):
    return {k: st.bernoulli_curve(m) for k, m in models.items()}


def subcritical(model, dR, curve=None):
    curve = curve or st.bernoulli_curve(model)
    s_plus, _ = st.invert_bernoulli(model, curve[1] + dR, curve)
    return st.solve_stream(model, s_plus)


@pytest.fixture(scope="session")
def sub_zero(zero):
    """Irrotational subcritical stream at R = R_c + 0.01."""
    return subcritical(zero, 0.01)


@pytest.fixture(scope="session")
def sup_zero(zero):
    return st.solve_stream(zero, 2.0)


@pytest.fixture(scope="session")
def sub_streams(models, curves):
    return {k: subcritical(m, 0.01, curves[k]) for k, m in models.items()}


@pytest.fixture(autouse=True)
def _quiet():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", AccuracyWarning)
        yield


SQRT2M1 = math.sqrt(2.0) - 1.0


@pytest.fixture(scope="session")
def branch_zero(sub_zero):
    """Five continuation steps from the irrotational stream at R = R_c + 0.01."""
    from wavebranch import continuation as co

    state = co.start_branch(sub_zero)
    co.branch_extend(state, 0.005 * sub_zero.d, 5)
    return state


@pytest.fixture(scope="session")
def small_wave(branch_zero):
    from wavebranch import continuation as co

    return co.reconstruct_physical(branch_zero.points[2].field)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
