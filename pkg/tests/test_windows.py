import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from phasepad.errors import ConfigError, TruncationError
from phasepad.numgrid import Axis, Wavefunction1D
from phasepad.windows import (CustomWindow, GaussianWindow, OscillatorWindow, SquareWindow,
                              excited_window, format_window, hermite_functions, parse_window,
                              sample_window, square_window_norm, window_momentum_rep)

K_AXIS = Axis(-20.0, 20.0, 801)


def test_gaussian_value_at_origin(x_axis):
    w = sample_window(GaussianWindow(), x_axis)
    assert GaussianWindow()(0.0) == pytest.approx(np.pi ** -0.25, abs=1e-15)
    assert np.pi ** -0.25 == pytest.approx(0.751126, abs=1e-6)
    assert w.norm() == pytest.approx(1.0, abs=1e-10)


def test_square_value_and_norm():
    sq = SquareWindow(1.0)
    assert sq(0.0) == pytest.approx(1 / np.sqrt(2), abs=1e-15)
    assert sq(1.5) == 0
    assert sq(1.0) == pytest.approx(0.5 / np.sqrt(2))
    ax = Axis(-4, 4, 300)  # jumps fall between grid points
    assert square_window_norm(sq, ax) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("spec", [GaussianWindow(), GaussianWindow(2.0, 1.0, -0.5),
                                  GaussianWindow(0.5, -1.0, 0.3), OscillatorWindow(3, 1.2, 0.5, 1.0)])
def test_every_sampled_window_has_unit_norm(spec, x_axis):
    assert sample_window(spec, x_axis).norm() == pytest.approx(1.0, abs=1e-10)


@settings(max_examples=30, deadline=None)
@given(beta=st.floats(0.5, 3.0), xw=st.floats(-3, 3), kw=st.floats(-3, 3))
def test_gaussian_unit_norm_and_peak(beta, xw, kw):
    ax = Axis(-16, 16, 4097)
    spec = GaussianWindow(beta, xw, kw)
    w = sample_window(spec, ax)
    assert w.norm() == pytest.approx(1.0, abs=1e-10)
    dens = np.abs(w.values) ** 2
    assert abs(ax.points[np.argmax(dens)] - xw) <= ax.spacing / 2 + 1e-12
    # |φ₀|² ∝ exp(−β²(x−x_W)²)
    mask = np.abs(beta * (ax.points - xw)) < 20
    ratio = dens[mask] / np.exp(-beta**2 * (ax.points[mask] - xw) ** 2)
    np.testing.assert_allclose(ratio, beta / np.sqrt(np.pi), rtol=1e-10)


def test_lambda_is_derived():
    w = GaussianWindow(2.0, 0.5, 1.2)
    assert w.lam == pytest.approx(0.5 + 1.2j / 4)
    assert GaussianWindow.from_lambda(2.0, w.lam) == w


def test_momentum_rep_of_standard_gaussian():
    assert GaussianWindow().momentum(0.0) == pytest.approx(np.pi ** -0.25, abs=1e-15)


def test_momentum_rep_peaks_at_kw():
    rep = window_momentum_rep(GaussianWindow(1.0, 0.3, 2.0), K_AXIS)
    assert K_AXIS.points[np.argmax(np.abs(rep.values))] == pytest.approx(2.0, abs=1e-12)
    assert rep.norm() == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("spec", [GaussianWindow(1.3, 0.4, -0.7), OscillatorWindow(2, 0.8, -0.5, 1.0)])
def test_momentum_rep_matches_quadrature(spec, x_axis):
    k = np.linspace(-4, 4, 17)
    x = Axis(-30, 30, 6001)
    oracle = np.exp(-1j * np.outer(k, x.points)) @ (spec(x.points) * x.weights()) / np.sqrt(2 * np.pi)
    np.testing.assert_allclose(spec.momentum(k), oracle, atol=1e-12)


def test_square_momentum_parseval():
    # the sinc² tail decays like 1/k², so integrate analytically via the tail mass
    sq = SquareWindow(1.0)
    assert sq.momentum_tail_mass(-np.inf, np.inf) == pytest.approx(0.0, abs=1e-12)
    assert sq.momentum_tail_mass(0.0, 0.0) == pytest.approx(1.0, abs=1e-12)
    k = np.linspace(-400, 400, 400001)
    dens = np.abs(sq.momentum(k)) ** 2
    inside = np.trapezoid(dens, k) if hasattr(np, "trapezoid") else np.trapz(dens, k)
    assert inside + sq.momentum_tail_mass(-400, 400) == pytest.approx(1.0, abs=1e-6)


def test_excited_window_zero_is_base(x_axis):
    base = GaussianWindow(1.5, 0.2, 0.4)
    np.testing.assert_allclose(excited_window(base, 0, x_axis).values,
                               sample_window(base, x_axis).values, atol=1e-15)


def test_excited_window_reference_value():
    val = OscillatorWindow(1)(1.0)
    expected = np.sqrt(2) * np.exp(-0.5) / np.pi ** 0.25
    assert val == pytest.approx(expected, abs=1e-15)
    assert expected == pytest.approx(0.6442883651134752, abs=1e-15)


def test_excited_window_is_creation_operator(x_axis):
    # φ̌₁ = (β(x − λ̄) − ∂ₓ/β)/√2 φ₀, applied symbolically to the Gaussian
    base = GaussianWindow(1.4, 0.3, 0.8)
    x = x_axis.points
    phi0 = base(x)
    dphi0 = (-base.beta**2 * (x - base.x_w) + 1j * base.k_w) * phi0
    created = (base.beta * (x - np.conj(base.lam)) * phi0 - dphi0 / base.beta) / np.sqrt(2)
    np.testing.assert_allclose(excited_window(base, 1, x_axis).values, created, atol=1e-13)


def test_excited_windows_orthonormal(x_axis):
    base = GaussianWindow(1.2, -0.4, 0.6)
    ws = [excited_window(base, n, x_axis) for n in range(6)]
    gram = np.array([[a.inner(b) for b in ws] for a in ws])
    np.testing.assert_allclose(gram, np.eye(6), atol=1e-10)


def test_hermite_functions_orthonormal():
    ax = Axis(-15, 15, 3001)
    h = hermite_functions(12, ax.points)
    gram = (h * ax.weights()) @ h.T
    np.testing.assert_allclose(gram, np.eye(13), atol=1e-12)


def test_excited_window_errors(x_axis):
    with pytest.raises(ValueError):
        excited_window(GaussianWindow(), 13, x_axis)
    with pytest.raises(ValueError):
        excited_window(GaussianWindow(), -1, x_axis)
    with pytest.raises(TypeError):
        excited_window(SquareWindow(), 1, x_axis)
    with pytest.raises(TruncationError):
        excited_window(GaussianWindow(), 12, Axis(-3, 3, 64))


def test_sample_window_truncation_errors():
    with pytest.raises(TruncationError):
        sample_window(GaussianWindow(0.5), Axis(-4, 4, 64))
    with pytest.raises(TruncationError):
        sample_window(SquareWindow(2.0), Axis(-1, 1, 64))


@pytest.mark.parametrize("kwargs", [{"beta": 0}, {"beta": -1}])
def test_gaussian_rejects_nonpositive_beta(kwargs):
    with pytest.raises(ValueError):
        GaussianWindow(**kwargs)


def test_square_rejects_nonpositive_width():
    with pytest.raises(ValueError):
        SquareWindow(0.0)


def test_custom_window_interpolates_and_checks_norm(x_axis):
    g = GaussianWindow(1.1, 0.2, 0.5)
    cw = CustomWindow(sample_window(g, x_axis))
    x = np.array([-1.234, 0.0, 0.777, 2.5])
    np.testing.assert_allclose(cw(x), g(x), atol=1e-12)
    assert cw(100.0) == 0
    np.testing.assert_allclose(cw.momentum(np.array([0.0, 1.0])), g.momentum(np.array([0.0, 1.0])),
                               atol=1e-12)
    with pytest.raises(ValueError):
        CustomWindow(Wavefunction1D(x_axis, 2 * sample_window(g, x_axis).values))


@pytest.mark.parametrize("spec", [GaussianWindow(2.0, 0.5, -1.25), SquareWindow(0.75),
                                  OscillatorWindow(3, 1.5, -0.25, 0.1)])
def test_window_text_round_trip(spec):
    assert parse_window(format_window(spec)) == spec


@settings(max_examples=40, deadline=None)
@given(beta=st.floats(0.01, 100), xw=st.floats(-50, 50), kw=st.floats(-50, 50))
def test_gaussian_text_round_trip_property(beta, xw, kw):
    spec = GaussianWindow(beta, xw, kw)
    assert parse_window(format_window(spec)) == spec


@pytest.mark.parametrize("text", ["triangle:a=1", "gaussian:beta=abc", "gaussian:foo=1",
                                  "square:a=-1", "oscillator:n=20", "gaussian:beta"])
def test_parse_window_errors(text):
    with pytest.raises(ConfigError):
        parse_window(text)


def test_parse_window_defaults():
    assert parse_window("gaussian") == GaussianWindow()
    assert parse_window(" Square : a = 2 ") == SquareWindow(2.0)
