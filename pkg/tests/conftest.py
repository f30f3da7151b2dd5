import warnings

import mpmath
import numpy as np
import pytest

from phasepad.numgrid import Axis, Wavefunction1D


def maclaurin_erf(z, digits=50):
    """Independent erf oracle: the Maclaurin series summed in high precision."""
    with mpmath.workdps(digits):
        z = mpmath.mpc(z)
        term = z
        total = z
        n = 0
        while abs(term) > mpmath.mpf(10) ** (-digits):
            n += 1
            term = term * (-z * z) / n
            total += term / (2 * n + 1)
        return complex(2 / mpmath.sqrt(mpmath.pi) * total)


def aligned_max_error(num, ref):
    """Max pointwise error after removing the best single global phase."""
    num = np.asarray(num).ravel()
    ref = np.asarray(ref).ravel()
    overlap = np.vdot(num, ref)
    phase = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
    return float(np.max(np.abs(num * phase - ref)))


def direct_amplitude(psi, window, q, p):
    """Slow quadrature of Ψ(q,p) = √(2/π)∫ψ(u)·conj(φ₀(2q−u))·e^{2ip(q−u)} du."""
    u = psi.axis.points
    w = psi.axis.weights()
    out = np.empty((len(q), len(p)), dtype=complex)
    for i, qi in enumerate(q):
        g = psi.values * np.conj(window(2 * qi - u)) * w
        out[i] = np.exp(2j * np.outer(p, qi - u)) @ g
    return np.sqrt(2 / np.pi) * out


@pytest.fixture
def x_axis():
    return Axis(-16.0, 16.0, 512)


@pytest.fixture
def default_axis():
    return Axis.default()


@pytest.fixture
def ground_state(x_axis):
    return Wavefunction1D.from_function(lambda x: np.pi ** -0.25 * np.exp(-x**2 / 2), x_axis)


@pytest.fixture
def quiet():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        yield


#: One summary line per acceptance criterion, filled by test_acceptance.py.
ACCEPTANCE_LINES: dict = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[number])
