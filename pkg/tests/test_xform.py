import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import direct_amplitude
from phasepad.analytic import (coherent_wavefunction, coherent_wigner, oscillator_wavefunction,
                               test_state, test_state_window)
from phasepad.errors import (AliasingError, InconsistentAmplitudeWarning, RangeError,
                             ShapeError, SingularityError, TruncationError)
from phasepad.numgrid import Axis, PhaseSpaceField, Wavefunction1D, inner_product, integrate_2d
from phasepad.windows import GaussianWindow, OscillatorWindow, SquareWindow
from phasepad.xform import (DEFAULT_X_AXIS, TransformPlan, cohen_kernel, cross_wigner,
                            forward_amplitude, gabor_transform, gabor_window, inverse_amplitude,
                            pointwise_inverse, spectrogram_husimi, symplectic_fourier)

ODD = Axis(-8.0, 8.0, 257)
SMALL_Q = Axis(-3.0, 3.0, 25)
SMALL_P = Axis(-4.0, 4.0, 33)


def _rel(a, b):
    return np.linalg.norm(np.ravel(a) - np.ravel(b)) / np.linalg.norm(np.ravel(b))


def test_ground_state_value_at_origin(ground_state):
    Psi = forward_amplitude(ground_state, TransformPlan(DEFAULT_X_AXIS, ODD, ODD, GaussianWindow()))
    assert Psi.values[128, 128] == pytest.approx(np.sqrt(2 / np.pi), abs=1e-13)
    assert np.sqrt(2 / np.pi) == pytest.approx(0.797885, abs=1e-6)


def test_zero_state_gives_zero_amplitude():
    psi = Wavefunction1D(DEFAULT_X_AXIS, np.zeros(DEFAULT_X_AXIS.n))
    Psi = forward_amplitude(psi, TransformPlan.default(GaussianWindow()))
    assert np.max(np.abs(Psi.values)) == 0


def test_coherent_peak_with_matched_window():
    mu = 1.0 + 0.5j
    psi = coherent_wavefunction(mu).sample()
    qa = Axis(-7.0, 9.0, 257)   # contains q = 1 exactly
    pa = Axis(-7.5, 8.5, 257)   # contains p = 0.5 exactly
    Psi = forward_amplitude(psi, TransformPlan(DEFAULT_X_AXIS, qa, pa, GaussianWindow.from_lambda(1, mu)))
    i = np.argmin(np.abs(qa.points - 1.0))
    j = np.argmin(np.abs(pa.points - 0.5))
    assert abs(Psi.values[i, j]) ** 2 == pytest.approx(2 / np.pi, abs=1e-12)
    assert np.max(np.abs(Psi.values)) ** 2 == pytest.approx(2 / np.pi, abs=1e-12)


@pytest.mark.parametrize("state, window", [
    (test_state().wavefunction, test_state_window(1.0)),
    (coherent_wavefunction(0.5 - 1j), GaussianWindow(1.5, 0.2, -0.3)),
    (oscillator_wavefunction(2), SquareWindow(1.0)),
    (oscillator_wavefunction(1), OscillatorWindow(2, 0.8, 0.1, 0.4)),
])
def test_forward_matches_direct_quadrature(state, window):
    psi = state.sample()
    fast = forward_amplitude(psi, TransformPlan(DEFAULT_X_AXIS, SMALL_Q, SMALL_P, window))
    slow = direct_amplitude(psi, window, SMALL_Q.points, SMALL_P.points)
    assert np.max(np.abs(fast.values - slow)) <= 1e-9


@settings(max_examples=15, deadline=None)
@given(c1=st.complex_numbers(max_magnitude=3), c2=st.complex_numbers(max_magnitude=3))
def test_forward_is_linear(c1, c2):
    plan = TransformPlan(DEFAULT_X_AXIS, SMALL_Q, SMALL_P, GaussianWindow(1.2, 0.3, 0.1))
    p1 = coherent_wavefunction(0.3 + 0.4j).sample()
    p2 = oscillator_wavefunction(3).sample()
    lhs = forward_amplitude(c1 * p1 + c2 * p2, plan).values
    rhs = c1 * forward_amplitude(p1, plan).values + c2 * forward_amplitude(p2, plan).values
    assert np.max(np.abs(lhs - rhs)) <= 1e-10 * max(1.0, abs(c1) + abs(c2))


@pytest.mark.parametrize("window", [GaussianWindow(), GaussianWindow(0.7, 0.5, 1.0)])
def test_forward_is_isometric(window):
    plan = TransformPlan.default(window)
    p1 = test_state().wavefunction.sample()
    p2 = coherent_wavefunction(1 - 0.5j).sample()
    P1, P2 = forward_amplitude(p1, plan), forward_amplitude(p2, plan)
    assert inner_product(P1, P2) == pytest.approx(p1.inner(p2), abs=1e-8)
    assert inner_product(P1, P1) == pytest.approx(1.0, abs=1e-8)


def test_forward_plan_errors(ground_state):
    with pytest.raises(AliasingError):
        TransformPlan(DEFAULT_X_AXIS, Axis.default(), Axis(-30, 30, 64), GaussianWindow())
    with pytest.raises(RangeError):
        TransformPlan(Axis(-4, 4, 512), Axis.default(), Axis.default(), GaussianWindow())
    plan = TransformPlan(Axis(-16, 16, 600), Axis.default(), Axis.default(), GaussianWindow())
    with pytest.raises(ShapeError):
        forward_amplitude(ground_state, plan)


# -- Gabor and symplectic Fourier ------------------------------------------------

def _half(ax):
    return Axis(ax.min / 2, ax.max / 2, ax.n)


@pytest.mark.parametrize("window", [test_state_window(1.0), GaussianWindow(1.3, 1.0, 0.5)])
def test_gabor_relation(window):
    psi = test_state().wavefunction.sample()
    qa = pa = Axis(-8, 8, 129)
    Phi = gabor_transform(psi, gabor_window(window), TransformPlan(DEFAULT_X_AXIS, qa, pa, window))
    Psi_half = forward_amplitude(psi, TransformPlan(DEFAULT_X_AXIS, _half(qa), _half(pa), window))
    q, p = Phi.mesh()
    assert np.max(np.abs(Psi_half.values - 2 * np.exp(0.5j * q * p) * Phi.values)) <= 1e-9


def test_gabor_zero_and_energy():
    plan = TransformPlan.default(GaussianWindow())
    zero = Wavefunction1D(DEFAULT_X_AXIS, np.zeros(DEFAULT_X_AXIS.n))
    assert np.max(np.abs(gabor_transform(zero, gabor_window(GaussianWindow()), plan).values)) == 0
    psi = coherent_wavefunction(0.5 + 0.5j).sample()
    Phi = gabor_transform(psi, gabor_window(GaussianWindow()), plan)
    assert integrate_2d(Phi.abs2()).real == pytest.approx(1.0, abs=1e-10)


def test_gabor_accepts_sampled_window():
    win = GaussianWindow(1.1, 0.4, -0.2)
    psi = test_state().wavefunction.sample()
    plan = TransformPlan(DEFAULT_X_AXIS, SMALL_Q, SMALL_P, win)
    sampled = Wavefunction1D.from_function(gabor_window(win), Axis(-12, 12, 400))
    a = gabor_transform(psi, gabor_window(win), plan).values
    b = gabor_transform(psi, sampled, plan).values
    assert np.max(np.abs(a - b)) < 1e-10


@pytest.mark.parametrize("window", [GaussianWindow(), GaussianWindow(1.0, 1.0, 0.5)])
def test_symplectic_fourier_of_amplitude(window):
    # the symplectic transform of Ψ pairs with the Gabor window w(x) = conj(φ₀(x))
    psi = test_state().wavefunction.sample()
    grid = Axis(-8, 8, 129)
    plan = TransformPlan(DEFAULT_X_AXIS, grid, grid, window)
    Psi = forward_amplitude(psi, plan)
    Phi = gabor_transform(psi, lambda x: np.conj(window(x)), plan)
    q, p = Phi.mesh()
    S = symplectic_fourier(Psi)
    assert np.max(np.abs(S.values - np.exp(0.5j * q * p) * Phi.values)) <= 1e-8


def test_symplectic_fourier_zero_and_involution():
    grid = Axis(-8, 8, 129)
    assert np.max(np.abs(symplectic_fourier(PhaseSpaceField.zeros(grid, grid)).values)) == 0
    f = PhaseSpaceField.from_function(
        lambda q, p: np.exp(-0.5 * (q - 0.5) ** 2 - 0.5 * p**2 + 1j * p), grid, grid)
    back = symplectic_fourier(symplectic_fourier(f))
    assert np.max(np.abs(back.values - f.values)) <= 1e-8


def test_symplectic_fourier_aliasing():
    f = PhaseSpaceField.zeros(Axis(-8, 8, 16), Axis(-8, 8, 16))
    with pytest.raises(AliasingError):
        symplectic_fourier(f, q_axis=Axis(-20, 20, 16))


def test_cross_wigner_diagonal_is_wigner():
    psi = test_state().wavefunction.sample()
    W = cross_wigner(psi, psi, SMALL_Q, SMALL_P)
    ref = test_state().wigner.on_grid(SMALL_Q, SMALL_P)
    assert np.max(np.abs(W.values - ref.values)) < 1e-12


# -- inverses ------------------------------------------------------------------

def test_inverse_round_trip_test_state():
    win = test_state_window(1.0)
    psi = test_state().wavefunction.sample()
    back = inverse_amplitude(forward_amplitude(psi, TransformPlan.default(win)), win)
    assert _rel(back.values, psi.values) <= 1e-8


def test_inverse_recovers_coherent_wavefunction():
    win = GaussianWindow(2.0)
    mu = 1 + 1j
    Psi = forward_amplitude(coherent_wavefunction(mu).sample(), TransformPlan.default(win))
    back = inverse_amplitude(Psi, win)
    assert _rel(back.values, coherent_wavefunction(mu)(DEFAULT_X_AXIS.points)) <= 1e-8


def test_inverse_of_zero_is_zero():
    zero = PhaseSpaceField.zeros(Axis.default(), Axis.default())
    assert np.max(np.abs(inverse_amplitude(zero, GaussianWindow()).values)) == 0
    assert np.max(np.abs(pointwise_inverse(zero, GaussianWindow(), 0.0).values)) == 0


def test_inverse_warns_on_foreign_field():
    rng = np.random.default_rng(7)
    grid = Axis.default()
    vals = rng.normal(size=(256, 256)) * np.exp(-np.add.outer(grid.points**2, grid.points**2) / 4)
    with pytest.warns(InconsistentAmplitudeWarning):
        out = inverse_amplitude(PhaseSpaceField(grid, grid, vals), GaussianWindow())
    assert "inconsistent-amplitude" in out.flags


def test_inverse_accepts_amplitude_silently():
    win = GaussianWindow()
    Psi = forward_amplitude(coherent_wavefunction(0.2j).sample(), TransformPlan.default(win))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        inverse_amplitude(Psi, win)


def test_pointwise_inverse_agrees_with_full_inverse():
    win = test_state_window(1.0)
    psi = test_state().wavefunction.sample()
    Psi = forward_amplitude(psi, TransformPlan.default(win))
    x_axis = Axis(-8, 8, 257)
    a = pointwise_inverse(Psi, win, 0.0, x_axis)
    b = inverse_amplitude(Psi, win, x_axis)
    assert _rel(a.values, b.values) <= 1e-7


def test_pointwise_inverse_errors():
    Psi = PhaseSpaceField.zeros(Axis.default(), Axis.default())
    with pytest.raises(SingularityError):
        pointwise_inverse(Psi, SquareWindow(1.0), 2.0)
    with pytest.raises(RangeError):
        pointwise_inverse(Psi, GaussianWindow(), 0.0, Axis(-30, 30, 64))


# -- spectrogram and Cohen kernel ----------------------------------------------

def test_spectrogram_of_coherent_state_is_husimi():
    # Gaussian smoothing of W_μ with e^{−q²−p²}/π gives e^{−|z−μ|²/2}/(2π)
    mu = 1.0 - 0.5j
    Psi = forward_amplitude(coherent_wavefunction(mu).sample(), TransformPlan.default(GaussianWindow()))
    Q = spectrogram_husimi(Psi)
    q, p = Q.mesh()
    ref = np.exp(-((q - mu.real) ** 2 + (p - mu.imag) ** 2) / 2) / (2 * np.pi)
    assert np.max(np.abs(Q.values - ref)) <= 1e-10
    assert np.min(Q.values.real) >= 0
    assert integrate_2d(Q).real == pytest.approx(1.0, abs=1e-8)
    assert integrate_2d(coherent_wigner(mu).on_grid()).real == pytest.approx(1.0, abs=1e-10)


def test_spectrogram_range_error():
    f = PhaseSpaceField.zeros(Axis(1, 8, 16), Axis(-8, 8, 16))
    with pytest.raises(RangeError):
        spectrogram_husimi(f)


def test_cohen_kernel_gaussian():
    r = Axis(-4, 4, 33)
    v = Axis(-4, 4, 33)
    f = cohen_kernel(GaussianWindow(), r, v)
    R, V = f.mesh()
    assert np.max(np.abs(f.values - np.exp(-(R**2 + V**2) / 4))) <= 1e-10
    assert f.values[16, 16] == pytest.approx(1.0, abs=1e-12)
    assert f.values[24, 16] == pytest.approx(np.exp(-1), abs=1e-12)
    assert np.exp(-1) == pytest.approx(0.367879, abs=1e-6)


@pytest.mark.parametrize("window", [SquareWindow(1.0), OscillatorWindow(2), GaussianWindow(2.0, 1.0, 3.0)])
def test_cohen_kernel_at_origin_is_window_norm(window):
    grid = Axis(-2, 2, 9)
    theta = Axis(-16, 16, 4097)
    f = cohen_kernel(window, grid, grid, theta)
    # sampling the square window's jumps costs O(h) in the θ quadrature
    tol = theta.spacing if isinstance(window, SquareWindow) else 1e-10
    assert f.values[4, 4].real == pytest.approx(1.0, abs=tol)


def test_cohen_kernel_errors():
    grid = Axis(-2, 2, 9)
    with pytest.raises(TruncationError):
        cohen_kernel(GaussianWindow(0.2), grid, grid)
    with pytest.raises(AliasingError):
        cohen_kernel(GaussianWindow(), Axis(-100, 100, 9), grid)
