import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as hs

from wavebranch.errors import DomainError
from wavebranch.vorticity import Case, VorticityModel, capital_omega, classify, omega_eval


@pytest.mark.parametrize(
    "coeffs, tag, s0",
    [
        ((0.0,), Case.CaseI, 0.0),
        ((1.0, -2.0), Case.CaseI, math.sqrt(0.5)),  # Omega = p - p^2, max 1/4 at p = 1/2
        ((0.0, 0.3), Case.CaseIII, math.sqrt(0.3)),  # Omega = 0.15 p^2, max at p = 1
        ((-0.5,), Case.CaseII, 0.0),
    ],
)
def test_builtin_classification(coeffs, tag, s0):
    m = VorticityModel(coeffs)
    assert m.case_tag == tag
    assert m.s0 == pytest.approx(s0, abs=1e-14)
    assert classify(m)[0] == tag


def test_omega_and_antiderivative():
    m = VorticityModel((1.0, -2.0))
    assert omega_eval(m, 0.25) == pytest.approx(0.5)
    assert capital_omega(m, 0.5) == pytest.approx(0.25)
    assert capital_omega(m, 0.0) == 0.0


def test_domain_errors():
    m = VorticityModel((1.0,))
    with pytest.raises(DomainError):
        omega_eval(m, 1.5)
    with pytest.raises(DomainError):
        capital_omega(m, -0.1)
    with pytest.raises(DomainError):
        VorticityModel(tuple([1.0] * 10))
    with pytest.raises(DomainError):
        VorticityModel((float("nan"),))


coef_lists = hs.lists(hs.floats(-3, 3, allow_nan=False), min_size=1, max_size=5)


@settings(max_examples=60, deadline=None)
@given(coef_lists)
def test_s0_is_dense_maximum(c):
    m = VorticityModel(tuple(c))
    x = np.linspace(0, 1, 20001)
    dense = math.sqrt(max(2 * np.max(m.Om(x)), 0.0))
    assert m.s0 >= dense - 1e-9
    assert m.s0 <= dense + 1e-4
    assert capital_omega(m, 0.0) == 0.0


@settings(max_examples=40, deadline=None)
@given(coef_lists, hs.floats(0.1, 10))
def test_classification_scale_invariant(c, a):
    m1 = VorticityModel(tuple(c))
    m2 = VorticityModel(tuple(a * x for x in c))
    if np.allclose(c, 0):
        return
    assert m1.case_tag == m2.case_tag
    assert m2.s0 == pytest.approx(math.sqrt(a) * m1.s0, rel=1e-9, abs=1e-12)
