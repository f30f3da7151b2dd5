"""Data behind the six reference figures.

Each builder returns a :class:`FigureData` holding named real fields on the
default grid plus the parameters used. Plotting is left to the caller.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .analytic import momentum_eigenamplitude, oscillator_amplitude, oscillator_wigner, test_state
from .analytic import test_state_window
from .numgrid import Axis, PhaseSpaceField
from .windows import GaussianWindow, SquareWindow, format_window

__all__ = ["FigureData", "build_figure", "FIGURE_NUMBERS", "marginal_variance"]

FIGURE_NUMBERS = (1, 2, 3, 4, 5, 6)


@dataclass
class FigureData:
    """Fields plotted in one figure and the parameters behind them."""

    number: int
    title: str
    fields: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)


def _real(F: PhaseSpaceField, values) -> PhaseSpaceField:
    return F.with_values(np.asarray(values, dtype=float))


def marginal_variance(density: PhaseSpaceField, axis: str = "q") -> float:
    """Variance of the ``q`` (or ``p``) marginal of a nonnegative density."""
    vals = np.asarray(density.values, dtype=float)
    wq = density.q_axis.weights()
    wp = density.p_axis.weights()
    if axis == "q":
        marg, pts, w = vals @ wp, density.q_axis.points, wq
    elif axis == "p":
        marg, pts, w = wq @ vals, density.p_axis.points, wp
    else:
        raise ValueError("axis must be 'q' or 'p'")
    mass = np.sum(w * marg)
    mean = np.sum(w * marg * pts) / mass
    return float(np.sum(w * marg * (pts - mean) ** 2) / mass)


def build_figure(n: int, q_axis: Axis | None = None, p_axis: Axis | None = None) -> FigureData:
    """Fields for figure ``n`` in 1..6.

    1. Re and Im of the test-state amplitude, Gaussian window ``β = 1``.
    2. The test state's Wigner function and ``|Ψ|²`` for ``β = 1``.
    3. ``|Ψ|²`` of the test state for ``β = 0.5`` and ``β = 2``.
    4. ``W₁`` of the oscillator and ``|Ψ₁|²``, Gaussian window ``β = 1, λ = 0``.
    5. ``|Ψ₁|²`` for the square window ``a = 1``.
    6. ``Re Ψ_{k₀}`` for ``k₀ = −2`` with a Gaussian window ``x_W = 4, k_W = −2, β = 1``.

    Raises
    ------
    ValueError
        If ``n`` is not in 1..6.
    """
    if n not in FIGURE_NUMBERS:
        raise ValueError(f"figure number must be in 1..6, got {n}")
    qa = q_axis or Axis.default()
    pa = p_axis or Axis.default()
    ts = test_state()
    if n == 1:
        Psi = ts.amplitude(1.0).on_grid(qa, pa)
        fields = {"re": _real(Psi, Psi.values.real), "im": _real(Psi, Psi.values.imag)}
        params = {"state": "test", "window": format_window(test_state_window(1.0))}
        title = "real and imaginary parts of the test-state amplitude"
    elif n == 2:
        Psi = ts.amplitude(1.0).on_grid(qa, pa)
        fields = {"wigner": _real(Psi, ts.wigner.on_grid(qa, pa).values.real),
                  "modsq": _real(Psi, np.abs(Psi.values) ** 2)}
        params = {"state": "test", "window": format_window(test_state_window(1.0))}
        title = "Wigner function and |Psi|^2 of the test state"
    elif n == 3:
        fields = {}
        for beta in (0.5, 2.0):
            Psi = ts.amplitude(beta).on_grid(qa, pa)
            fields[f"modsq_beta{beta:g}"] = _real(Psi, np.abs(Psi.values) ** 2)
        params = {"state": "test", "beta": [0.5, 2.0]}
        title = "|Psi|^2 of the test state for two window widths"
    elif n == 4:
        win = GaussianWindow()
        Psi = oscillator_amplitude(1, win).on_grid(qa, pa)
        fields = {"wigner": _real(Psi, oscillator_wigner(1).on_grid(qa, pa).values.real),
                  "modsq": _real(Psi, np.abs(Psi.values) ** 2)}
        params = {"state": "oscillator:n=1", "window": format_window(win)}
        title = "oscillator W_1 and |Psi_1|^2, Gaussian window"
    elif n == 5:
        win = SquareWindow(1.0)
        Psi = oscillator_amplitude(1, win).on_grid(qa, pa)
        fields = {"modsq": _real(Psi, np.abs(Psi.values) ** 2)}
        params = {"state": "oscillator:n=1", "window": format_window(win)}
        title = "|Psi_1|^2 for the square window"
    else:
        win = GaussianWindow(1.0, 4.0, -2.0)
        Psi = momentum_eigenamplitude(-2.0, win).on_grid(qa, pa)
        fields = {"re": _real(Psi, Psi.values.real)}
        params = {"state": "momentum:k0=-2", "window": format_window(win)}
        title = "real part of the momentum-eigenstate amplitude"
    return FigureData(n, title, fields, params)
